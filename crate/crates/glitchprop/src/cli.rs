//! The `glitchprop` command line: `survey`, `refine`, `trig-split` and
//! `worst-case`. All numbers on the command line and in reports are
//! hex-float literals (decimals are accepted on input).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::float_kernel::{FloatFormat, FloatInterval, MachineFloat};
use crate::glitch_model::{
    quasi_monotone_split, survey_glitches_sharded, write_atomic, GlitchBounds, GlitchDb,
    GlitchRecord, GlitchSurvey, MonotoneClass, SURVEY_CHUNK,
};
use crate::hexfloat;
use crate::oracle;
use crate::refine_core::{self, BoundResult, CallBudgetReport, RefineParams};
use crate::synth::{self, FunctionBinding};
use crate::trig_reduce::{worst_case_search, ReductionConfig, WorstCase};
use crate::trig_refine::{compute_bounds_trig, PeriodClass, TrigQuery};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_HOLES: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_NOT_TIGHT: i32 = 4;
pub const EXIT_MISSING_ENTRY: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "glitchprop", version, about = "Glitch-aware inverse propagation for libm functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a function for monotonicity glitches and record a glitch-db row.
    Survey(SurveyArgs),
    /// Refine an input interval against an output value.
    Refine(RefineArgs),
    /// Refine a trigonometric function over several periods.
    TrigSplit(TrigSplitArgs),
    /// List floats whose quotient by π/2 lies close to an integer.
    WorstCase(WorstCaseArgs),
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Registry name: host libm (`expf`, `sin`, ...) or `synth:...`.
    #[arg(long = "fn")]
    pub function: String,
    /// binary32 or binary64; defaults to the function's own format.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub func: FunctionArgs,
    /// `[lo,hi]`.
    #[arg(long)]
    pub domain: String,
    /// isotonic or antitonic. Without it periodic functions are split into
    /// monotonic pieces and others use their registered class.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, env = "GLITCHPROP_JOBS", default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = SURVEY_CHUNK)]
    pub chunk: u64,
    /// Glitch database to create or update.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the detail report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundSide {
    Lower,
    Upper,
    Both,
}

#[derive(Debug, Args)]
pub struct GlitchSource {
    /// Glitch database holding a row for the function.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Treat the function as glitch-free instead of reading a database.
    #[arg(long, conflicts_with = "db")]
    pub assume_monotone: bool,
    #[arg(long, default_value_t = 4)]
    pub s: u64,
    #[arg(long, default_value_t = 16)]
    pub t: u64,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub func: FunctionArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// `[lo,hi]`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: String,
    #[command(flatten)]
    pub glitch: GlitchSource,
    #[arg(long, value_enum, default_value_t = BoundSide::Both)]
    pub bound: BoundSide,
    /// Override the registered class.
    #[arg(long)]
    pub class: Option<String>,
    /// Also print the exhaustive optimum (intervals up to 2^20 floats).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct TrigSplitArgs {
    #[command(flatten)]
    pub func: FunctionArgs,
    /// even_v, odd_v or odd_c; defaults to the registered class.
    #[arg(long)]
    pub pclass: Option<String>,
    /// Output interval `[lo,hi]`.
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Input interval `[lo,hi]`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Maximum number of sub-intervals.
    #[arg(long, default_value_t = 8)]
    pub g: u32,
    #[command(flatten)]
    pub glitch: GlitchSource,
    /// Largest supported |x|; defaults to 2^p.
    #[arg(long)]
    pub l_max: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WorstOrder {
    /// By cancellation `e_x − e_Δ`, then `|Δ|`.
    Relative,
    /// By `|Δ|` alone.
    Absolute,
}

#[derive(Debug, Args)]
pub struct WorstCaseArgs {
    #[arg(long, default_value = "binary32")]
    pub format: String,
    /// `[lo,hi]`; defaults to `[−ℓ_max, ℓ_max]`.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Report every x with `|x·2/π − k̂| < threshold`. Defaults to 2^-25
    /// for binary32 and 2^-54 for binary64.
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long, value_enum, default_value_t = WorstOrder::Relative)]
    pub order: WorstOrder,
    /// Print at most this many lines.
    #[arg(long)]
    pub limit: Option<usize>,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            msg: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn binding<F: MachineFloat>(name: &str) -> std::result::Result<synth::FunctionBinding<F>, Failure> {
    synth::resolve::<F>(name).map_err(|e| fail(EXIT_USAGE, e.to_string()))
}

fn fail(code: i32, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut buf = String::new();
    let r = match &cli.command {
        Command::Survey(a) => survey(a, &mut buf, err),
        Command::Refine(a) => refine(a, &mut buf),
        Command::TrigSplit(a) => trig_split(a, &mut buf),
        Command::WorstCase(a) => worst_case(a, &mut buf),
    };
    let _ = out.write_all(buf.as_bytes());
    match r {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "glitchprop: {}", f.msg);
            f.code
        }
    }
}

fn format_for(func: &FunctionArgs) -> std::result::Result<FloatFormat, Failure> {
    match &func.format {
        Some(s) => FloatFormat::from_name(s).ok_or_else(|| fail(EXIT_USAGE, format!("unknown format {s:?}"))),
        None => synth::default_format(&func.function)
            .ok_or_else(|| fail(EXIT_USAGE, format!("unknown function {:?}", func.function))),
    }
}

fn format_named(s: &str) -> std::result::Result<FloatFormat, Failure> {
    FloatFormat::from_name(s).ok_or_else(|| fail(EXIT_USAGE, format!("unknown format {s:?}")))
}

macro_rules! dispatch {
    ($fmt:expr, $f:ident ( $($arg:expr),* )) => {
        if $fmt == FloatFormat::BINARY32 {
            $f::<f32>($($arg),*)
        } else {
            $f::<f64>($($arg),*)
        }
    };
}

/// Parse `[lo,hi]` (brackets optional) into an interval.
pub fn parse_interval<F: MachineFloat>(text: &str) -> crate::error::Result<FloatInterval<F>> {
    let t = text.trim();
    let t = t.strip_prefix('[').unwrap_or(t);
    let t = t.strip_suffix(']').unwrap_or(t);
    let (a, b) = t.split_once(',').ok_or_else(|| Error::Parse {
        line: 0,
        msg: format!("expected [lo,hi], got {text:?}"),
    })?;
    FloatInterval::new(hexfloat::parse(a)?, hexfloat::parse(b)?)
}

fn parse_class(s: &str) -> std::result::Result<MonotoneClass, Failure> {
    MonotoneClass::from_name(s).ok_or_else(|| fail(EXIT_USAGE, format!("unknown class {s:?}")))
}

fn record_line<F: MachineFloat>(tag: &str, r: &GlitchRecord<F>) -> String {
    format!(
        "{tag} {} {} {} {} {}",
        hexfloat::format(r.start),
        hexfloat::format(r.end),
        r.width,
        r.depth,
        hexfloat::format(r.ref_max)
    )
}

/// Detail report of one survey: a header line, then one line per record.
pub fn survey_report<F: MachineFloat>(s: &GlitchSurvey<F>) -> String {
    let mut r = String::new();
    let first = s.first_hole.map(hexfloat::format).unwrap_or_else(|| "-".into());
    let _ = writeln!(
        r,
        "survey {} {} {} {} evaluations {} holes {} first_hole {}",
        s.function_name,
        s.format.name(),
        s.domain,
        s.class.name(),
        s.evaluations,
        s.holes,
        first
    );
    for g in &s.glitches {
        let _ = writeln!(r, "{}", record_line("forward", g));
    }
    for g in &s.mirrored {
        let _ = writeln!(r, "{}", record_line("mirrored", g));
    }
    r
}

/// Survey `f` over `domain`, splitting into monotonic pieces when `period`
/// is given. Returns every piece's survey in domain order.
pub fn survey_pieces<F: MachineFloat>(
    b: &FunctionBinding<F>,
    domain: FloatInterval<F>,
    class: Option<MonotoneClass>,
    jobs: usize,
    chunk: u64,
) -> crate::error::Result<Vec<GlitchSurvey<F>>> {
    let f = |x: F| (b.f)(x);
    let pieces = match (class, b.period) {
        (Some(c), _) => vec![(domain, c)],
        (None, Some(p)) => {
            let cfg = ReductionConfig::<F>::default();
            quasi_monotone_split(p, domain, &cfg)?
                .into_iter()
                .map(|(iv, c)| (iv, if p == PeriodClass::OddC { MonotoneClass::Isotonic } else { c }))
                .collect()
        }
        (None, None) => vec![(domain, b.class)],
    };
    Ok(pieces
        .into_iter()
        .map(|(iv, c)| survey_glitches_sharded(&b.name, &f, iv, c, jobs.max(1), chunk))
        .collect())
}

fn survey(a: &SurveyArgs, out: &mut String, err: &mut dyn Write) -> Outcome {
    let fmt = format_for(&a.func)?;
    dispatch!(fmt, survey_in(a, out, err))
}

fn survey_in<F: MachineFloat>(a: &SurveyArgs, out: &mut String, err: &mut dyn Write) -> Outcome {
    let b = binding::<F>(&a.func.function)?;
    let domain = parse_interval::<F>(&a.domain)?;
    let class = a.class.as_deref().map(parse_class).transpose()?;
    if a.chunk == 0 {
        return Err(fail(EXIT_USAGE, "chunk must be positive"));
    }
    let surveys = survey_pieces(&b, domain, class, a.jobs, a.chunk)?;
    let mut report = String::new();
    let mut row = GlitchBounds::none();
    let mut holes = 0;
    for s in &surveys {
        report.push_str(&survey_report(s));
        row = row.hull(&s.refinement_bounds());
        holes += s.holes;
    }
    let mut db = match &a.out {
        Some(p) if p.exists() => GlitchDb::load(p)?,
        _ => GlitchDb::default(),
    };
    db.insert(&b.name, &row);
    match &a.report {
        Some(p) => write_atomic(p, report.as_bytes())?,
        None => out.push_str(&report),
    }
    match &a.out {
        Some(p) => db.store(p)?,
        None => out.push_str(&db.render()),
    }
    if holes > 0 {
        let _ = writeln!(err, "glitchprop: {holes} inputs map to NaN");
        return Ok(EXIT_HOLES);
    }
    Ok(EXIT_OK)
}

fn load_bounds<F: MachineFloat>(name: &str, src: &GlitchSource) -> std::result::Result<GlitchBounds<F>, Failure> {
    if src.assume_monotone {
        return Ok(GlitchBounds::none());
    }
    let path: &Path = src
        .db
        .as_deref()
        .ok_or_else(|| fail(EXIT_USAGE, "pass --db or --assume-monotone"))?;
    let db = GlitchDb::load(path)?;
    match db.get::<F>(name) {
        Some(r) => Ok(r?),
        None => Err(fail(
            EXIT_MISSING_ENTRY,
            format!("no glitch-db entry for {name:?} in {}", path.display()),
        )),
    }
}

fn status_code(statuses: &[u8]) -> i32 {
    if statuses.iter().any(|r| matches!(r, 0 | 5)) {
        EXIT_NO_SOLUTION
    } else if statuses.iter().any(|r| matches!(r, 2 | 7)) {
        EXIT_NOT_TIGHT
    } else {
        EXIT_OK
    }
}

fn refine(a: &RefineArgs, out: &mut String) -> Outcome {
    let fmt = format_for(&a.func)?;
    dispatch!(fmt, refine_in(a, out))
}

fn bound_line<F: MachineFloat>(side: &str, r: &BoundResult<F>, c: &CallBudgetReport) -> String {
    format!("{side} {} r={} calls={}\n", hexfloat::format(r.value), r.status, c.f_calls)
}

fn refine_in<F: MachineFloat>(a: &RefineArgs, out: &mut String) -> Outcome {
    let b = binding::<F>(&a.func.function)?;
    let y: F = hexfloat::parse(&a.y)?;
    let iv = parse_interval::<F>(&a.interval)?;
    let class = match &a.class {
        Some(c) => parse_class(c)?,
        None => b.class,
    };
    let glitch = load_bounds::<F>(&b.name, &a.glitch)?.restrict(&iv);
    let anti = class == MonotoneClass::Antitonic;
    let g = |x: F| if anti { (b.f)(x).neg() } else { (b.f)(x) };
    let inv = |v: F| if anti { (b.f_inv)(v.neg()) } else { (b.f_inv)(v) };
    let yy = if anti { y.neg() } else { y };
    let params = RefineParams {
        glitch,
        s: a.glitch.s,
        t: a.glitch.t,
        f_inv: &inv,
    };
    let mut statuses = Vec::new();
    if a.bound != BoundSide::Upper {
        let (r, c) = refine_core::lower_bound_counted(&g, yy, iv, &params)?;
        out.push_str(&bound_line("lower", &r, &c));
        statuses.push(r.status);
    }
    if a.bound != BoundSide::Lower {
        let (r, c) = refine_core::upper_bound_counted(&g, yy, iv, &params)?;
        out.push_str(&bound_line("upper", &r, &c));
        statuses.push(r.status);
    }
    if a.oracle {
        match oracle::brute_refine(&g, yy, iv) {
            Ok(ans) => {
                let (l, rl) = ans.optimal_lower(&iv);
                let (u, ru) = ans.optimal_upper(&iv);
                let _ = writeln!(
                    out,
                    "oracle lower {} r={rl} upper {} r={ru}",
                    hexfloat::format(l),
                    hexfloat::format(u)
                );
            }
            Err(e) => {
                let _ = writeln!(out, "oracle unavailable: {e}");
            }
        }
    }
    Ok(status_code(&statuses))
}

fn trig_split(a: &TrigSplitArgs, out: &mut String) -> Outcome {
    let fmt = format_for(&a.func)?;
    dispatch!(fmt, trig_split_in(a, out))
}

fn trig_split_in<F: MachineFloat>(a: &TrigSplitArgs, out: &mut String) -> Outcome {
    let b = binding::<F>(&a.func.function)?;
    let pclass = match (&a.pclass, b.period) {
        (Some(s), _) => PeriodClass::from_name(s).ok_or_else(|| fail(EXIT_USAGE, format!("unknown period class {s:?}")))?,
        (None, Some(p)) => p,
        (None, None) => return Err(fail(EXIT_USAGE, format!("{} is not periodic; pass --pclass", b.name))),
    };
    let cfg = match &a.l_max {
        Some(s) => ReductionConfig::new(hexfloat::parse::<F>(s)?)?,
        None => ReductionConfig::default(),
    };
    let glitch = load_bounds::<F>(&b.name, &a.glitch)?;
    let f = |x: F| (b.f)(x);
    let f_inv = |v: F| (b.f_inv)(v);
    let q = TrigQuery {
        f: &f,
        f_inv: &f_inv,
        pclass,
        y: parse_interval::<F>(&a.y)?,
        x: parse_interval::<F>(&a.x)?,
        glitch,
        g: a.g,
        s: a.glitch.s,
        t: a.glitch.t,
        cfg,
    };
    let res = compute_bounds_trig(&q)?;
    for r in &res {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            b.name,
            hexfloat::format(r.x_lo),
            hexfloat::format(r.x_hi),
            hexfloat::format(r.l),
            r.r_l,
            hexfloat::format(r.u),
            r.r_u,
            r.k
        );
    }
    Ok(if res.iter().all(|r| r.r_l == 0 || r.r_u == 5) {
        EXIT_NO_SOLUTION
    } else {
        EXIT_OK
    })
}

fn worst_case(a: &WorstCaseArgs, out: &mut String) -> Outcome {
    let fmt = format_named(&a.format)?;
    dispatch!(fmt, worst_case_in(a, out))
}

/// One report line: `x Δ k̂ e_x e_Δ`.
pub fn worst_case_line<F: MachineFloat>(w: &WorstCase<F>) -> String {
    format!(
        "{} {} {} {} {}",
        hexfloat::format(w.x),
        hexfloat::format(w.delta),
        w.k_hat,
        w.e_x,
        w.e_delta
    )
}

fn worst_case_in<F: MachineFloat>(a: &WorstCaseArgs, out: &mut String) -> Outcome {
    let l = ReductionConfig::<F>::default().l_max;
    let domain = match &a.domain {
        Some(s) => parse_interval::<F>(s)?,
        None => FloatInterval::new(l.neg(), l)?,
    };
    let threshold = match &a.threshold {
        Some(s) => hexfloat::parse::<f64>(s)?,
        None if F::FORMAT == FloatFormat::BINARY32 => 2f64.powi(-25),
        None => 2f64.powi(-54),
    };
    let mut found = worst_case_search(domain, threshold)?;
    if a.order == WorstOrder::Absolute {
        found.sort_by(|p, q| p.delta.abs().total_cmp(&q.delta.abs()).then(p.rank_cmp(q)));
    }
    for w in found.iter().take(a.limit.unwrap_or(usize::MAX)) {
        let _ = writeln!(out, "{}", worst_case_line(w));
    }
    Ok(EXIT_OK)
}
