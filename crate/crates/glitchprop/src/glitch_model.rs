//! Glitch summaries, glitch surveys and the persistent glitch database.
//!
//! A glitch of an isotonic implementation is a maximal run of consecutive
//! floats whose image lies strictly below the running maximum of everything
//! scanned before it (left to right). Its depth is the number of float steps
//! from that running maximum down to the smallest image inside the run.
//! Antitonic implementations are handled through `-f`.
//!
//! Upper bounds rely on this forward reading. Lower bounds mirror the
//! upper-bound machinery through `x ↦ -f(-x)`, so they rely on the mirrored
//! reading: runs lying above the running minimum of everything to their
//! right. [`GlitchSurvey::refinement_bounds`] returns a summary valid for both.
//!
//! Survey summaries and records use the runs themselves: `α` is the first
//! float of the first run and `ω` the last float of the last one. The
//! refinement algorithms instead expect the window to bracket the runs, with
//! `α` the float just before the first run and `ω` the float just after the
//! last, so `refinement_bounds` widens the window by one float on each side
//! (clamped to the surveyed domain).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::float_kernel::{
    self as fk, distance, le, lt, ordinal, FloatFormat, FloatInterval, MachineFloat,
};
use crate::hexfloat;
use crate::trig_reduce::{self, ReductionConfig};
use crate::trig_refine::PeriodClass;

/// Upper bounds on the glitch data of a function over some domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlitchBounds<F> {
    pub n_g: u64,
    pub d_m: u64,
    pub w_m: u64,
    pub alpha: F,
    pub omega: F,
}

impl<F: MachineFloat> GlitchBounds<F> {
    /// No glitches at all.
    pub fn none() -> Self {
        let z = F::from_f64(0.0);
        GlitchBounds {
            n_g: 0,
            d_m: 0,
            w_m: 0,
            alpha: z,
            omega: z,
        }
    }

    pub fn new(n_g: u64, d_m: u64, w_m: u64, alpha: F, omega: F) -> Result<Self> {
        let g = GlitchBounds {
            n_g,
            d_m,
            w_m,
            alpha,
            omega,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_g == 0 {
            return Ok(());
        }
        if self.alpha.is_nan() || self.omega.is_nan() {
            return Err(Error::Domain("glitch window endpoint is NaN".into()));
        }
        if !le(self.alpha, self.omega) {
            return Err(Error::Contract(format!(
                "glitch window [{}, {}] is empty",
                hexfloat::format(self.alpha),
                hexfloat::format(self.omega)
            )));
        }
        Ok(())
    }

    /// Check `n_g > 0 ⇒ x_l ⪯ α ⪯ ω ⪯ x_u`.
    pub fn check_within(&self, iv: &FloatInterval<F>) -> Result<()> {
        self.validate()?;
        if self.n_g > 0 && !(le(iv.lo, self.alpha) && le(self.omega, iv.hi)) {
            return Err(Error::Contract(format!(
                "glitch window [{}, {}] not inside {}",
                hexfloat::format(self.alpha),
                hexfloat::format(self.omega),
                iv
            )));
        }
        Ok(())
    }

    /// Glitch data of `x ↦ -f(-x)` given the data of `f` in the other reading.
    pub fn reflect(&self) -> Self {
        GlitchBounds {
            alpha: self.omega.neg(),
            omega: self.alpha.neg(),
            ..*self
        }
    }

    /// Smallest bounds dominating both `self` and `other`.
    pub fn hull(&self, other: &Self) -> Self {
        match (self.n_g, other.n_g) {
            (0, _) => *other,
            (_, 0) => *self,
            _ => GlitchBounds {
                n_g: self.n_g.max(other.n_g),
                d_m: self.d_m.max(other.d_m),
                w_m: self.w_m.max(other.w_m),
                alpha: fk::min(self.alpha, other.alpha),
                omega: fk::max(self.omega, other.omega),
            },
        }
    }

    /// Widen `[α, ω]` by one float on each side, staying inside `domain`.
    pub fn bracketed(&self, domain: &FloatInterval<F>) -> Self {
        if self.n_g == 0 {
            return *self;
        }
        let a = ordinal(self.alpha).max(ordinal(domain.lo) + 1) - 1;
        let w = ordinal(self.omega).min(ordinal(domain.hi) - 1) + 1;
        GlitchBounds {
            alpha: fk::min(self.alpha, fk::from_ordinal(a)),
            omega: fk::max(self.omega, fk::from_ordinal(w)),
            ..*self
        }
    }

    /// Restrict to `iv`: zero glitches when `iv` misses `[α, ω]`, otherwise
    /// the window is clamped to `iv`.
    pub fn restrict(&self, iv: &FloatInterval<F>) -> Self {
        if self.n_g == 0 || lt(iv.hi, self.alpha) || lt(self.omega, iv.lo) {
            return GlitchBounds::none();
        }
        GlitchBounds {
            alpha: fk::max(self.alpha, iv.lo),
            omega: fk::min(self.omega, iv.hi),
            ..*self
        }
    }
}

/// One maximal run below the running extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlitchRecord<F> {
    pub start: F,
    pub end: F,
    pub width: u64,
    pub depth: u64,
    /// The running extremum the run violates.
    pub ref_max: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotoneClass {
    Isotonic,
    Antitonic,
}

impl MonotoneClass {
    pub fn name(&self) -> &'static str {
        match self {
            MonotoneClass::Isotonic => "isotonic",
            MonotoneClass::Antitonic => "antitonic",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "isotonic" | "iso" => Some(MonotoneClass::Isotonic),
            "antitonic" | "anti" => Some(MonotoneClass::Antitonic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlitchSurvey<F> {
    pub function_name: String,
    pub format: FloatFormat,
    pub domain: FloatInterval<F>,
    pub class: MonotoneClass,
    /// Forward-reading glitches, left to right.
    pub glitches: Vec<GlitchRecord<F>>,
    pub summary: GlitchBounds<F>,
    /// Mirrored-reading glitches, left to right.
    pub mirrored: Vec<GlitchRecord<F>>,
    pub mirrored_summary: GlitchBounds<F>,
    /// Inputs scanned, counted once per reading.
    pub evaluations: u64,
    /// Number of inputs whose image is NaN.
    pub holes: u64,
    pub first_hole: Option<F>,
}

impl<F: MachineFloat> GlitchSurvey<F> {
    /// Bounds valid for both upper and lower refinement, with the window
    /// bracketing the runs.
    pub fn refinement_bounds(&self) -> GlitchBounds<F> {
        self.summary
            .hull(&self.mirrored_summary)
            .bracketed(&self.domain)
    }
}

/// Summary of a record list per the survey invariants.
pub fn summarize<F: MachineFloat>(records: &[GlitchRecord<F>]) -> GlitchBounds<F> {
    match (records.first(), records.last()) {
        (Some(first), Some(last)) => GlitchBounds {
            n_g: records.len() as u64,
            d_m: records.iter().map(|r| r.depth).max().unwrap_or(0),
            w_m: records.iter().map(|r| r.width).max().unwrap_or(0),
            alpha: first.start,
            omega: last.end,
        },
        _ => GlitchBounds::none(),
    }
}

/// Ordinal chunk size used by sharded surveys.
pub const SURVEY_CHUNK: u64 = 1 << 16;

/// Survey `f` over `domain` in both readings, serially.
pub fn survey_glitches<F, Fun>(
    name: &str,
    f: &Fun,
    domain: FloatInterval<F>,
    expected: MonotoneClass,
) -> GlitchSurvey<F>
where
    F: MachineFloat,
    Fun: Fn(F) -> F + Sync,
{
    survey_glitches_sharded(name, f, domain, expected, 1, SURVEY_CHUNK)
}

/// Survey `f` over `domain` with `jobs` workers and ordinal chunks of
/// `chunk` floats. Output does not depend on `jobs`.
pub fn survey_glitches_sharded<F, Fun>(
    name: &str,
    f: &Fun,
    domain: FloatInterval<F>,
    expected: MonotoneClass,
    jobs: usize,
    chunk: u64,
) -> GlitchSurvey<F>
where
    F: MachineFloat,
    Fun: Fn(F) -> F + Sync,
{
    let anti = expected == MonotoneClass::Antitonic;
    // Forward reading of the isotonic view of f.
    let fwd = |x: F| {
        let v = f(x);
        if anti {
            v.neg()
        } else {
            v
        }
    };
    // Mirrored reading: forward reading of x ↦ -h(-x).
    let mir = |x: F| fwd(x.neg()).neg();
    let run = || {
        let a = scan_sharded(&fwd, domain, chunk);
        let b = scan_sharded(&mir, domain.reflect(), chunk);
        (a, b)
    };
    let (a, b) = if jobs <= 1 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    };
    let fix = |r: GlitchRecord<F>| {
        if anti {
            GlitchRecord {
                ref_max: r.ref_max.neg(),
                ..r
            }
        } else {
            r
        }
    };
    let glitches: Vec<_> = a.records.into_iter().map(fix).collect();
    let mirrored: Vec<_> = b
        .records
        .into_iter()
        .rev()
        .map(|r| {
            let r = GlitchRecord {
                start: r.end.neg(),
                end: r.start.neg(),
                ref_max: r.ref_max.neg(),
                ..r
            };
            fix(r)
        })
        .collect();
    GlitchSurvey {
        function_name: name.to_string(),
        format: F::FORMAT,
        domain,
        class: expected,
        summary: summarize(&glitches),
        mirrored_summary: summarize(&mirrored),
        glitches,
        mirrored,
        evaluations: a.evaluations + b.evaluations,
        holes: a.holes,
        first_hole: a.first_hole,
    }
}

struct ScanOutput<F> {
    records: Vec<GlitchRecord<F>>,
    evaluations: u64,
    holes: u64,
    first_hole: Option<F>,
}

/// Per-chunk result of the unseeded first pass.
struct ChunkPass<F> {
    lo: i64,
    hi: i64,
    /// Records of the local scan, closed or still open at `hi`.
    records: Vec<OpenRun<F>>,
    /// Running maximum at the end of the chunk, if the chunk reset it.
    reset_state: Option<Option<i64>>,
    /// Largest finite image of the chunk (used when no reset happened).
    local_max: Option<i64>,
    holes: u64,
    first_hole: Option<F>,
    evaluations: u64,
}

#[derive(Clone, Copy)]
struct OpenRun<F> {
    start: i64,
    end: i64,
    min: i64,
    ref_max: i64,
    open_at_end: bool,
    _p: std::marker::PhantomData<F>,
}

enum Image {
    Value(i64),
    /// NaN: a domain hole, also terminates the run.
    Hole,
    /// Infinite: terminates the run.
    Break,
}

fn classify<F: MachineFloat>(v: F) -> Image {
    if v.is_nan() {
        Image::Hole
    } else if !v.is_finite() {
        Image::Break
    } else {
        Image::Value(ordinal(v))
    }
}

/// Forward scan of `[lo, hi]` (ordinals) starting from running maximum `seed`.
/// Stops early, returning the ordinal where it stopped, when `stop_at_seed`
/// is set and an image reaches the seed or resets the run.
fn scan_range<F, Fun>(
    f: &Fun,
    lo: i64,
    hi: i64,
    seed: Option<i64>,
) -> ChunkPass<F>
where
    F: MachineFloat,
    Fun: Fn(F) -> F,
{
    let mut m = seed;
    let mut records: Vec<OpenRun<F>> = Vec::new();
    let mut open: Option<OpenRun<F>> = None;
    let mut reset_state: Option<Option<i64>> = None;
    let mut local_max: Option<i64> = None;
    let mut holes = 0u64;
    let mut first_hole = None;
    let mut evaluations = 0u64;
    for o in lo..=hi {
        let x: F = fk::from_ordinal(o);
        let v = f(x);
        evaluations += 1;
        match classify(v) {
            Image::Value(vo) => {
                local_max = Some(local_max.map_or(vo, |c: i64| c.max(vo)));
                match m {
                    Some(mv) if vo < mv => match open.as_mut() {
                        Some(r) => {
                            r.end = o;
                            r.min = r.min.min(vo);
                        }
                        None => {
                            open = Some(OpenRun {
                                start: o,
                                end: o,
                                min: vo,
                                ref_max: mv,
                                open_at_end: false,
                                _p: std::marker::PhantomData,
                            })
                        }
                    },
                    _ => {
                        if let Some(r) = open.take() {
                            records.push(r);
                        }
                        m = Some(vo);
                        if reset_state.is_some() {
                            reset_state = Some(m);
                        }
                    }
                }
            }
            img => {
                if let Image::Hole = img {
                    holes += 1;
                    if first_hole.is_none() {
                        first_hole = Some(x);
                    }
                }
                if let Some(r) = open.take() {
                    records.push(r);
                }
                m = None;
                reset_state = Some(None);
            }
        }
    }
    if let Some(mut r) = open.take() {
        r.open_at_end = true;
        records.push(r);
    }
    ChunkPass {
        lo,
        hi,
        records,
        reset_state,
        local_max,
        holes,
        first_hole,
        evaluations,
    }
}

/// Length of the prefix of `[lo, hi]` whose images stay strictly below
/// `seed` without resetting, and the minimum image over it.
fn seeded_prefix<F, Fun>(f: &Fun, lo: i64, hi: i64, seed: i64) -> (i64, Option<i64>)
where
    F: MachineFloat,
    Fun: Fn(F) -> F,
{
    let mut min: Option<i64> = None;
    let mut o = lo;
    while o <= hi {
        let v = f(fk::from_ordinal::<F>(o));
        match classify(v) {
            Image::Value(vo) if vo < seed => {
                min = Some(min.map_or(vo, |c| c.min(vo)));
                o += 1;
            }
            _ => break,
        }
    }
    (o - lo, min)
}

const MAX_CHUNKS: i128 = 1 << 20;

fn scan_sharded<F, Fun>(f: &Fun, domain: FloatInterval<F>, chunk: u64) -> ScanOutput<F>
where
    F: MachineFloat,
    Fun: Fn(F) -> F + Sync,
{
    let lo = ordinal(domain.lo);
    let hi = ordinal(domain.hi);
    let len = hi as i128 - lo as i128 + 1;
    let chunk = (chunk.max(1) as i128).max((len + MAX_CHUNKS - 1) / MAX_CHUNKS);
    let n = (len + chunk - 1) / chunk;
    let bounds: Vec<(i64, i64)> = (0..n)
        .map(|c| {
            let a = lo as i128 + c * chunk;
            let b = (a + chunk - 1).min(hi as i128);
            (a as i64, b as i64)
        })
        .collect();
    let passes: Vec<ChunkPass<F>> = bounds
        .par_iter()
        .map(|&(a, b)| scan_range(f, a, b, None))
        .collect();
    // Running maximum entering each chunk.
    let mut seeds: Vec<Option<i64>> = Vec::with_capacity(passes.len());
    let mut state: Option<i64> = None;
    for p in &passes {
        seeds.push(state);
        state = match p.reset_state {
            Some(s) => s,
            None => match (state, p.local_max) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        };
    }
    let fixed: Vec<Vec<OpenRun<F>>> = passes
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(p, seed)| fix_chunk(f, p, *seed))
        .collect();
    let mut records: Vec<GlitchRecord<F>> = Vec::new();
    let mut carry: Option<OpenRun<F>> = None;
    let mut evaluations = 0;
    let mut holes = 0;
    let mut first_hole = None;
    for (p, runs) in passes.iter().zip(fixed) {
        evaluations += p.evaluations;
        holes += p.holes;
        if first_hole.is_none() {
            first_hole = p.first_hole;
        }
        for r in runs {
            match carry.take() {
                Some(mut c) if c.end + 1 == r.start && c.ref_max == r.ref_max => {
                    c.end = r.end;
                    c.min = c.min.min(r.min);
                    c.open_at_end = r.open_at_end;
                    carry = Some(c);
                }
                Some(c) => {
                    records.push(finish(c));
                    carry = Some(r);
                }
                None => carry = Some(r),
            }
            if let Some(c) = carry {
                if !c.open_at_end {
                    records.push(finish(c));
                    carry = None;
                }
            }
        }
    }
    if let Some(c) = carry {
        records.push(finish(c));
    }
    ScanOutput {
        records,
        evaluations,
        holes,
        first_hole,
    }
}

/// Replace the seed-dependent prefix of a chunk's local scan.
fn fix_chunk<F, Fun>(f: &Fun, p: &ChunkPass<F>, seed: Option<i64>) -> Vec<OpenRun<F>>
where
    F: MachineFloat,
    Fun: Fn(F) -> F,
{
    let Some(seed) = seed else {
        return p.records.clone();
    };
    let (len, min) = seeded_prefix(f, p.lo, p.hi, seed);
    let mut out = Vec::with_capacity(p.records.len() + 1);
    if len > 0 {
        let end = p.lo + len - 1;
        out.push(OpenRun {
            start: p.lo,
            end,
            min: min.unwrap_or(seed),
            ref_max: seed,
            open_at_end: end == p.hi,
            _p: std::marker::PhantomData,
        });
    }
    let cut = p.lo + len;
    out.extend(p.records.iter().copied().filter(|r| r.start >= cut));
    out
}

fn finish<F: MachineFloat>(r: OpenRun<F>) -> GlitchRecord<F> {
    GlitchRecord {
        start: fk::from_ordinal(r.start),
        end: fk::from_ordinal(r.end),
        width: (r.end - r.start + 1) as u64,
        depth: distance::<F>(fk::from_ordinal(r.min), fk::from_ordinal(r.ref_max)) as u64,
        ref_max: fk::from_ordinal(r.ref_max),
    }
}

/// Partition `domain` into maximal pieces lying within one monotonic branch of
/// a trigonometric function of class `p`, tagged with their tonicity.
pub fn quasi_monotone_split<F: MachineFloat>(
    p: PeriodClass,
    domain: FloatInterval<F>,
    cfg: &ReductionConfig<F>,
) -> Result<Vec<(FloatInterval<F>, MonotoneClass)>> {
    use crate::trig_refine::{geq_tonicity_change, quasi_isotonic};
    let mut k = geq_tonicity_change(p, trig_reduce::div_pio2_up(domain.lo, cfg)?);
    let k_end = geq_tonicity_change(p, trig_reduce::div_pio2_up(domain.hi, cfg)?);
    let mut out = Vec::new();
    let mut lo = domain.lo;
    loop {
        let class = if quasi_isotonic(k, p) {
            MonotoneClass::Isotonic
        } else {
            MonotoneClass::Antitonic
        };
        if k >= k_end {
            out.push((FloatInterval::new(lo, domain.hi)?, class));
            return Ok(out);
        }
        let hi = trig_reduce::pio2_mult_down(k, cfg)?;
        out.push((FloatInterval::new(lo, hi)?, class));
        lo = trig_reduce::pio2_mult_up(k, cfg)?;
        k += 2;
    }
}

/// Persistent glitch summaries keyed by function name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlitchDb {
    pub entries: BTreeMap<String, DbEntry>,
}

/// A database row. Window endpoints are kept as binary64; binary32 rows hold
/// exactly representable values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbEntry {
    pub format: FloatFormat,
    pub bounds: GlitchBounds<f64>,
}

impl DbEntry {
    pub fn from_bounds<F: MachineFloat>(b: &GlitchBounds<F>) -> Self {
        DbEntry {
            format: F::FORMAT,
            bounds: GlitchBounds {
                n_g: b.n_g,
                d_m: b.d_m,
                w_m: b.w_m,
                alpha: b.alpha.to_f64(),
                omega: b.omega.to_f64(),
            },
        }
    }

    /// The row as bounds in `F`; fails when the row was stored for another format.
    pub fn bounds<F: MachineFloat>(&self) -> Result<GlitchBounds<F>> {
        if self.format != F::FORMAT {
            return Err(Error::Contract(format!(
                "glitch row is {}, requested {}",
                self.format.name(),
                F::FORMAT.name()
            )));
        }
        Ok(GlitchBounds {
            n_g: self.bounds.n_g,
            d_m: self.bounds.d_m,
            w_m: self.bounds.w_m,
            alpha: F::from_f64(self.bounds.alpha),
            omega: F::from_f64(self.bounds.omega),
        })
    }
}

pub const DB_HEADER: &str = "glitchdb v1";

impl GlitchDb {
    pub fn insert<F: MachineFloat>(&mut self, name: &str, b: &GlitchBounds<F>) {
        self.entries.insert(name.to_string(), DbEntry::from_bounds(b));
    }

    pub fn get<F: MachineFloat>(&self, name: &str) -> Option<Result<GlitchBounds<F>>> {
        self.entries.get(name).map(|e| e.bounds())
    }

    pub fn render(&self) -> String {
        let mut s = String::from(DB_HEADER);
        s.push('\n');
        for (name, e) in &self.entries {
            let b = &e.bounds;
            let (a, o) = if e.format == FloatFormat::BINARY32 {
                (
                    hexfloat::format(b.alpha as f32),
                    hexfloat::format(b.omega as f32),
                )
            } else {
                (hexfloat::format(b.alpha), hexfloat::format(b.omega))
            };
            s.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                name,
                e.format.name(),
                b.n_g,
                b.d_m,
                b.w_m,
                a,
                o
            ));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        match lines.next() {
            Some((_, h)) if h.trim() == DB_HEADER => {}
            Some((_, h)) if h.trim().starts_with("glitchdb") => {
                return Err(bad(1, format!("unsupported version {:?}", h.trim())))
            }
            Some(_) => return Err(bad(1, "missing glitchdb header".into())),
            None => return Ok(GlitchDb::default()),
        }
        let mut db = GlitchDb::default();
        for (i, line) in lines {
            let ln = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 7 {
                return Err(bad(ln, format!("expected 7 fields, found {}", fields.len())));
            }
            let format = FloatFormat::from_name(fields[1])
                .ok_or_else(|| bad(ln, format!("unknown format {:?}", fields[1])))?;
            let int = |s: &str| -> Result<u64> {
                s.parse().map_err(|_| bad(ln, format!("bad integer {s:?}")))
            };
            let (n_g, d_m, w_m) = (int(fields[2])?, int(fields[3])?, int(fields[4])?);
            let float = |s: &str| -> Result<f64> {
                let v = if format == FloatFormat::BINARY32 {
                    hexfloat::parse::<f32>(s).map(|v| v as f64)
                } else {
                    hexfloat::parse::<f64>(s)
                };
                let v = v.map_err(|_| bad(ln, format!("bad float {s:?}")))?;
                if !v.is_finite() {
                    return Err(bad(ln, format!("non-finite window endpoint {s:?}")));
                }
                Ok(v)
            };
            let (alpha, omega) = (float(fields[5])?, float(fields[6])?);
            let bounds = GlitchBounds {
                n_g,
                d_m,
                w_m,
                alpha,
                omega,
            };
            bounds.validate().map_err(|e| bad(ln, e.to_string()))?;
            if db.entries.contains_key(fields[0]) {
                return Err(bad(ln, format!("duplicate entry {:?}", fields[0])));
            }
            db.entries
                .insert(fields[0].to_string(), DbEntry { format, bounds });
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
