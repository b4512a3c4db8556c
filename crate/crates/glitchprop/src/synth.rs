//! Synthetic functions with known glitch structure, and the name registry
//! shared by the CLI and the examples.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::float_kernel::{self as fk, FloatFormat, MachineFloat};
use crate::glitch_model::{GlitchRecord, MonotoneClass};
use crate::hexfloat;
use crate::trig_refine::PeriodClass;

/// Isotonic map through the float order:
/// `ordinal(f(x)) = ⌊num·ordinal(x)/den⌋ + offset`, clamped to finite floats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinalAffine {
    pub num: i64,
    pub den: i64,
    pub offset: i64,
}

impl OrdinalAffine {
    pub const IDENTITY: OrdinalAffine = OrdinalAffine {
        num: 1,
        den: 1,
        offset: 0,
    };

    pub fn new(num: i64, den: i64, offset: i64) -> Result<Self> {
        if num < 0 || den <= 0 {
            return Err(Error::Contract(format!("ordinal slope {num}/{den} is not isotonic")));
        }
        Ok(OrdinalAffine { num, den, offset })
    }

    fn map(&self, o: i64, m: i64) -> i64 {
        let v = (o as i128 * self.num as i128).div_euclid(self.den as i128) + self.offset as i128;
        v.clamp(-(m as i128) - 1, m as i128) as i64
    }

    pub fn eval<F: MachineFloat>(&self, x: F) -> F {
        let m = fk::max_ordinal::<F>();
        fk::from_ordinal(self.map(fk::ordinal(x), m))
    }

    /// Rough inverse used to seed refinement.
    pub fn inverse<F: MachineFloat>(&self, y: F) -> F {
        let m = fk::max_ordinal::<F>();
        if self.num == 0 {
            return F::from_f64(0.0);
        }
        let o = fk::ordinal(y) as i128 - self.offset as i128;
        let v = (o * self.den as i128).div_euclid(self.num as i128);
        fk::from_ordinal(v.clamp(-(m as i128) - 1, m as i128) as i64)
    }
}

/// A dip starting at ordinal `start`: point `start + i` is mapped `drops[i]`
/// steps below the base image of `start − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub start: i64,
    pub drops: Vec<u64>,
}

impl Injection {
    pub fn flat(start: i64, width: u64, depth: u64) -> Self {
        Injection {
            start,
            drops: vec![depth; width as usize],
        }
    }

    pub fn end(&self) -> i64 {
        self.start + self.drops.len() as i64 - 1
    }
}

/// An isotonic base with non-overlapping injected dips.
#[derive(Debug, Clone, PartialEq)]
pub struct GlitchyFn {
    pub base: OrdinalAffine,
    pub injections: Vec<Injection>,
}

impl GlitchyFn {
    /// Dips must be nonempty, ordered, separated by at least one float and
    /// each drop in `1..` steps.
    pub fn new(base: OrdinalAffine, mut injections: Vec<Injection>) -> Result<Self> {
        injections.sort_by_key(|i| i.start);
        for w in injections.windows(2) {
            if w[1].start <= w[0].end() + 1 {
                return Err(Error::Contract("injected glitches must be separated".into()));
            }
        }
        if injections.iter().any(|i| i.drops.is_empty() || i.drops.contains(&0)) {
            return Err(Error::Contract("empty injection or zero drop".into()));
        }
        Ok(GlitchyFn { base, injections })
    }

    pub fn eval<F: MachineFloat>(&self, x: F) -> F {
        let o = fk::ordinal(x);
        let idx = self.injections.partition_point(|i| i.end() < o);
        match self.injections.get(idx) {
            Some(inj) if inj.start <= o => {
                let m = fk::max_ordinal::<F>();
                let top = self.base.map(inj.start - 1, m);
                let d = inj.drops[(o - inj.start) as usize] as i64;
                fk::from_ordinal((top - d).max(-m - 1))
            }
            _ => self.base.eval(x),
        }
    }

    /// Forward-reading records this function must produce over any domain
    /// starting left of every dip and ending right of every dip.
    pub fn expected_records<F: MachineFloat>(&self) -> Vec<GlitchRecord<F>> {
        let m = fk::max_ordinal::<F>();
        self.injections
            .iter()
            .map(|inj| GlitchRecord {
                start: fk::from_ordinal(inj.start),
                end: fk::from_ordinal(inj.end()),
                width: inj.drops.len() as u64,
                depth: *inj.drops.iter().max().unwrap(),
                ref_max: fk::from_ordinal(self.base.map(inj.start - 1, m)),
            })
            .collect()
    }
}

pub fn sin_model_f32(x: f32) -> f32 {
    (x as f64).sin() as f32
}

pub fn cos_model_f32(x: f32) -> f32 {
    (x as f64).cos() as f32
}

pub fn tan_model_f32(x: f32) -> f32 {
    (x as f64).tan() as f32
}

type Callable<F> = Arc<dyn Fn(F) -> F + Send + Sync>;

/// A named function with its rough inverse and monotonicity data.
#[derive(Clone)]
pub struct FunctionBinding<F> {
    pub name: String,
    pub f: Callable<F>,
    pub f_inv: Callable<F>,
    /// Tonicity for non-periodic functions.
    pub class: MonotoneClass,
    pub period: Option<PeriodClass>,
}

impl<F: MachineFloat> std::fmt::Debug for FunctionBinding<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionBinding")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("period", &self.period)
            .finish()
    }
}

pub const SYNTH_PREFIX: &str = "synth:";

/// Default dip of `synth:glitch1`: five floats from 1.5, three steps deep.
pub fn glitch1_default() -> GlitchyFn {
    let start = fk::ordinal(1.5f32);
    GlitchyFn::new(OrdinalAffine::IDENTITY, vec![Injection::flat(start, 5, 3)]).unwrap()
}

/// `synth:glitch3`: three dips of different shapes in `[1, 2]`.
pub fn glitch3_default() -> GlitchyFn {
    let o = |x: f32| fk::ordinal(x);
    GlitchyFn::new(
        OrdinalAffine::IDENTITY,
        vec![
            Injection::flat(o(1.25), 2, 1),
            Injection {
                start: o(1.5),
                drops: vec![1, 3, 5, 2, 2, 1, 4],
            },
            Injection::flat(o(1.75), 4, 2),
        ],
    )
    .unwrap()
}

/// Parse `synth:glitch1:<start>:<width>:<depth>` parameters, if present.
fn glitch1_params<F: MachineFloat>(rest: &str) -> Result<GlitchyFn> {
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected synth:glitch1:<start>:<width>:<depth>, got {rest:?}"),
        });
    }
    let start: F = hexfloat::parse(parts[0])?;
    let num = |s: &str| {
        s.parse::<u64>().map_err(|_| Error::Parse {
            line: 0,
            msg: format!("bad integer {s:?}"),
        })
    };
    GlitchyFn::new(
        OrdinalAffine::IDENTITY,
        vec![Injection::flat(fk::ordinal(start), num(parts[1])?, num(parts[2])?)],
    )
}

fn binding<F: MachineFloat>(
    name: &str,
    f: impl Fn(F) -> F + Send + Sync + 'static,
    inv: impl Fn(F) -> F + Send + Sync + 'static,
    class: MonotoneClass,
    period: Option<PeriodClass>,
) -> FunctionBinding<F> {
    FunctionBinding {
        name: name.to_string(),
        f: Arc::new(f),
        f_inv: Arc::new(inv),
        class,
        period,
    }
}

fn via_f64<F: MachineFloat>(g: fn(f64) -> f64) -> impl Fn(F) -> F + Send + Sync + 'static {
    move |x: F| F::from_f64(g(x.to_f64()))
}

fn synth<F: MachineFloat>(name: &str) -> Result<Option<FunctionBinding<F>>> {
    let body = &name[SYNTH_PREFIX.len()..];
    let (kind, rest) = body.split_once(':').unwrap_or((body, ""));
    let iso = MonotoneClass::Isotonic;
    let glitchy = |g: GlitchyFn| {
        let b = g.base;
        binding::<F>(name, move |x: F| g.eval(x), move |y: F| b.inverse(y), iso, None)
    };
    Ok(Some(match kind {
        "identity" => glitchy(GlitchyFn::new(OrdinalAffine::IDENTITY, vec![])?),
        "glitch1" if rest.is_empty() => glitchy(glitch1_default()),
        "glitch1" => glitchy(glitch1_params::<F>(rest)?),
        "glitch3" => glitchy(glitch3_default()),
        "sin" => binding(name, via_f64::<F>(f64::sin), via_f64::<F>(f64::asin), iso, Some(PeriodClass::OddV)),
        "cos" => binding(name, via_f64::<F>(f64::cos), via_f64::<F>(f64::acos), iso, Some(PeriodClass::EvenV)),
        "tan" => binding(name, via_f64::<F>(f64::tan), via_f64::<F>(f64::atan), iso, Some(PeriodClass::OddC)),
        _ => return Ok(None),
    }))
}

trait InverseOps {
    fn square(self) -> Self;
    fn cube(self) -> Self;
    fn exp10(self) -> Self;
}

macro_rules! inverse_ops {
    ($($t:ty),*) => {$(
        impl InverseOps for $t {
            fn square(self) -> Self {
                self * self
            }
            fn cube(self) -> Self {
                self * self * self
            }
            fn exp10(self) -> Self {
                (10.0 as $t).powf(self)
            }
        }
    )*};
}

inverse_ops!(f32, f64);

macro_rules! libm_table {
    ($($n32:literal, $n64:literal, $f:ident, $inv:ident, $class:ident, $period:expr;)*) => {
        fn libm32(name: &str) -> Option<FunctionBinding<f32>> {
            match name {
                $($n32 => Some(binding(name, f32::$f, f32::$inv, MonotoneClass::$class, $period)),)*
                _ => None,
            }
        }
        fn libm64(name: &str) -> Option<FunctionBinding<f64>> {
            match name {
                $($n64 => Some(binding(name, f64::$f, f64::$inv, MonotoneClass::$class, $period)),)*
                _ => None,
            }
        }
        /// Host math-library functions known to the registry.
        pub const LIBM_NAMES: &[&str] = &[$($n32, $n64,)*];
    };
}

libm_table! {
    "expf", "exp", exp, ln, Isotonic, None;
    "exp2f", "exp2", exp2, log2, Isotonic, None;
    "expm1f", "expm1", exp_m1, ln_1p, Isotonic, None;
    "logf", "log", ln, exp, Isotonic, None;
    "log2f", "log2", log2, exp2, Isotonic, None;
    "log10f", "log10", log10, exp10, Isotonic, None;
    "log1pf", "log1p", ln_1p, exp_m1, Isotonic, None;
    "sqrtf", "sqrt", sqrt, square, Isotonic, None;
    "cbrtf", "cbrt", cbrt, cube, Isotonic, None;
    "atanf", "atan", atan, tan, Isotonic, None;
    "asinf", "asin", asin, sin, Isotonic, None;
    "acosf", "acos", acos, cos, Antitonic, None;
    "sinhf", "sinh", sinh, asinh, Isotonic, None;
    "tanhf", "tanh", tanh, atanh, Isotonic, None;
    "asinhf", "asinh", asinh, sinh, Isotonic, None;
    "atanhf", "atanh", atanh, tanh, Isotonic, None;
    "sinf", "sin", sin, asin, Isotonic, Some(PeriodClass::OddV);
    "cosf", "cos", cos, acos, Isotonic, Some(PeriodClass::EvenV);
    "tanf", "tan", tan, atan, Isotonic, Some(PeriodClass::OddC);
}

/// Format a registry name evaluates in when no format is requested:
/// binary32 for `synth:` names and `…f` libm names, binary64 otherwise.
pub fn default_format(name: &str) -> Option<FloatFormat> {
    if name.starts_with(SYNTH_PREFIX) {
        return Some(FloatFormat::BINARY32);
    }
    let i = LIBM_NAMES.iter().position(|n| *n == name)?;
    Some(if i % 2 == 0 {
        FloatFormat::BINARY32
    } else {
        FloatFormat::BINARY64
    })
}

/// Resolve `name` for format `F`. Synthetic names exist in both formats;
/// libm names only in their own.
pub fn resolve<F: MachineFloat>(name: &str) -> Result<FunctionBinding<F>> {
    let missing = || Error::Domain(format!("unknown function {name:?} for {}", F::FORMAT.name()));
    if name.starts_with(SYNTH_PREFIX) {
        return synth::<F>(name)?.ok_or_else(missing);
    }
    let any: Option<Box<dyn std::any::Any>> = if F::FORMAT == FloatFormat::BINARY32 {
        libm32(name).map(|b| Box::new(b) as Box<dyn std::any::Any>)
    } else {
        libm64(name).map(|b| Box::new(b) as Box<dyn std::any::Any>)
    };
    any.and_then(|b| b.downcast::<FunctionBinding<F>>().ok())
        .map(|b| *b)
        .ok_or_else(missing)
}
