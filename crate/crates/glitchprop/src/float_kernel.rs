//! Bit-exact navigation of the totally ordered set of machine floats.
//!
//! Every finite float (and the two infinities) is mapped onto a signed
//! ordinal. `+0.0` has ordinal 0 and `-0.0` has ordinal -1, so the two zeros
//! are distinct neighbours with `-0.0 ≺ +0.0`. Successor, predecessor,
//! counting and distance queries are integer arithmetic on ordinals.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use crate::error::{Error, Result};
use crate::hexfloat;

/// Parameters of an IEEE 754 binary interchange format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FloatFormat {
    /// Significand bits including the hidden bit.
    pub precision_bits: u32,
    pub min_exponent: i32,
    pub max_exponent: i32,
    pub storage_bits: u32,
}

impl FloatFormat {
    pub const BINARY32: FloatFormat = FloatFormat {
        precision_bits: 24,
        min_exponent: -126,
        max_exponent: 127,
        storage_bits: 32,
    };
    pub const BINARY64: FloatFormat = FloatFormat {
        precision_bits: 53,
        min_exponent: -1022,
        max_exponent: 1023,
        storage_bits: 64,
    };

    pub fn name(&self) -> &'static str {
        if self.precision_bits == 24 {
            "binary32"
        } else {
            "binary64"
        }
    }

    pub fn from_name(name: &str) -> Option<FloatFormat> {
        match name {
            "binary32" | "f32" | "float" => Some(Self::BINARY32),
            "binary64" | "f64" | "double" => Some(Self::BINARY64),
            _ => None,
        }
    }

    pub(crate) fn mantissa_bits(&self) -> u32 {
        self.precision_bits - 1
    }

    pub(crate) fn exponent_bias(&self) -> i32 {
        self.max_exponent
    }

    pub(crate) fn sign_mask(&self) -> u64 {
        1u64 << (self.storage_bits - 1)
    }

    /// Bit pattern of +infinity.
    pub(crate) fn inf_bits(&self) -> u64 {
        let exp_bits = self.storage_bits - self.precision_bits;
        ((1u64 << exp_bits) - 1) << self.mantissa_bits()
    }
}

/// A binary32 or binary64 machine float.
pub trait MachineFloat:
    Copy + PartialEq + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const FORMAT: FloatFormat;

    fn to_bits64(self) -> u64;
    fn from_bits64(bits: u64) -> Self;
    fn to_f64(self) -> f64;
    /// Round-to-nearest conversion from binary64.
    fn from_f64(v: f64) -> Self;
    fn is_nan(self) -> bool;
    fn is_finite(self) -> bool;
    fn neg(self) -> Self;
    fn max_finite() -> Self;
}

impl MachineFloat for f32 {
    const FORMAT: FloatFormat = FloatFormat::BINARY32;

    fn to_bits64(self) -> u64 {
        self.to_bits() as u64
    }
    fn from_bits64(bits: u64) -> Self {
        f32::from_bits(bits as u32)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn is_nan(self) -> bool {
        f32::is_nan(self)
    }
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn neg(self) -> Self {
        -self
    }
    fn max_finite() -> Self {
        f32::MAX
    }
}

impl MachineFloat for f64 {
    const FORMAT: FloatFormat = FloatFormat::BINARY64;

    fn to_bits64(self) -> u64 {
        self.to_bits()
    }
    fn from_bits64(bits: u64) -> Self {
        f64::from_bits(bits)
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn is_nan(self) -> bool {
        f64::is_nan(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn neg(self) -> Self {
        -self
    }
    fn max_finite() -> Self {
        f64::MAX
    }
}

/// Signed ordinal of `x`. Infinities sit one step beyond the largest finite
/// magnitudes. Callers reject NaN before asking.
pub fn ordinal<F: MachineFloat>(x: F) -> i64 {
    let fmt = F::FORMAT;
    let bits = x.to_bits64();
    let mag = (bits & !fmt.sign_mask()) as i64;
    if bits & fmt.sign_mask() == 0 {
        mag
    } else {
        -mag - 1
    }
}

/// Inverse of [`ordinal`]. The ordinal must lie within the infinite range.
pub fn from_ordinal<F: MachineFloat>(o: i64) -> F {
    let fmt = F::FORMAT;
    if o >= 0 {
        F::from_bits64(o as u64)
    } else {
        F::from_bits64(((-(o + 1)) as u64) | fmt.sign_mask())
    }
}

/// Ordinal of the largest finite float.
pub fn max_ordinal<F: MachineFloat>() -> i64 {
    F::FORMAT.inf_bits() as i64 - 1
}

fn check_not_nan<F: MachineFloat>(x: F) -> Result<()> {
    if x.is_nan() {
        Err(Error::Domain("NaN has no position in the float order".into()))
    } else {
        Ok(())
    }
}

fn check_finite<F: MachineFloat>(x: F) -> Result<()> {
    check_not_nan(x)?;
    if !x.is_finite() {
        return Err(Error::Range(format!("{} is not finite", hexfloat::format(x))));
    }
    Ok(())
}

/// Move `x` by `d` steps in the float order; the result must stay finite.
pub fn step<F: MachineFloat>(x: F, d: i128) -> Result<F> {
    check_finite(x)?;
    let o = ordinal(x) as i128 + d;
    let m = max_ordinal::<F>() as i128;
    if o > m || o < -m - 1 {
        return Err(Error::Range(format!(
            "moving {} by {} steps leaves the finite range",
            hexfloat::format(x),
            d
        )));
    }
    Ok(from_ordinal(o as i64))
}

pub fn succ<F: MachineFloat>(x: F) -> Result<F> {
    step(x, 1)
}

pub fn pred<F: MachineFloat>(x: F) -> Result<F> {
    step(x, -1)
}

pub fn succ_n<F: MachineFloat>(x: F, n: u64) -> Result<F> {
    step(x, n as i128)
}

pub fn pred_n<F: MachineFloat>(x: F, n: u64) -> Result<F> {
    step(x, -(n as i128))
}

/// Signed number of steps from `a` to `b`.
pub fn distance<F: MachineFloat>(a: F, b: F) -> i128 {
    ordinal(b) as i128 - ordinal(a) as i128
}

/// Comparison in the total order (−0 ≺ +0). NaN must be excluded by the caller.
pub fn total_cmp<F: MachineFloat>(a: F, b: F) -> Ordering {
    ordinal(a).cmp(&ordinal(b))
}

pub fn lt<F: MachineFloat>(a: F, b: F) -> bool {
    ordinal(a) < ordinal(b)
}

pub fn le<F: MachineFloat>(a: F, b: F) -> bool {
    ordinal(a) <= ordinal(b)
}

pub fn same<F: MachineFloat>(a: F, b: F) -> bool {
    ordinal(a) == ordinal(b)
}

pub fn min<F: MachineFloat>(a: F, b: F) -> F {
    if le(a, b) {
        a
    } else {
        b
    }
}

pub fn max<F: MachineFloat>(a: F, b: F) -> F {
    if le(a, b) {
        b
    } else {
        a
    }
}

/// `a ≻_k b`: `a` lies more than `k` steps above `b`.
pub fn gt_by<F: MachineFloat>(a: F, b: F, k: u64) -> bool {
    distance(b, a) > k as i128
}

/// `a ≺_k b`: `a` lies more than `k` steps below `b`.
pub fn lt_by<F: MachineFloat>(a: F, b: F, k: u64) -> bool {
    gt_by(b, a, k)
}

/// Number of floats in `[lo, hi]`, counting both zeros.
pub fn count<F: MachineFloat>(lo: F, hi: F) -> u64 {
    (distance(lo, hi) + 1).max(0) as u64
}

/// Ordinal midpoint of `lo` and `hi`; requires `hi ≻_1 lo`.
pub fn split_point<F: MachineFloat>(lo: F, hi: F) -> Result<F> {
    check_not_nan(lo)?;
    check_not_nan(hi)?;
    if !gt_by(hi, lo, 1) {
        return Err(Error::Contract(format!(
            "split_point needs a float strictly between {} and {}",
            hexfloat::format(lo),
            hexfloat::format(hi)
        )));
    }
    let a = ordinal(lo) as i128;
    let b = ordinal(hi) as i128;
    Ok(from_ordinal((a + (b - a) / 2) as i64))
}

/// Binary exponent `e_x` with `2^e_x ≤ |x| < 2^(e_x+1)`, subnormals included.
pub fn exponent<F: MachineFloat>(x: F) -> Result<i32> {
    check_finite(x)?;
    let fmt = F::FORMAT;
    let bits = x.to_bits64() & !fmt.sign_mask();
    if bits == 0 {
        return Err(Error::Domain("exponent of zero".into()));
    }
    let mant_bits = fmt.mantissa_bits();
    let biased = (bits >> mant_bits) as i32;
    if biased == 0 {
        let lead = 63 - bits.leading_zeros() as i32;
        Ok(fmt.min_exponent - mant_bits as i32 + lead)
    } else {
        Ok(biased - fmt.exponent_bias())
    }
}

/// `2^(e_x - p + 1)`; subnormals and zero get the smallest subnormal.
pub fn ulp<F: MachineFloat>(x: F) -> Result<F> {
    check_finite(x)?;
    let fmt = F::FORMAT;
    let e = match exponent(x) {
        Ok(e) => e.max(fmt.min_exponent),
        Err(_) => fmt.min_exponent,
    };
    let u = e - fmt.precision_bits as i32 + 1;
    Ok(pow2::<F>(u))
}

/// Exact power of two representable in `F`.
pub(crate) fn pow2<F: MachineFloat>(e: i32) -> F {
    let fmt = F::FORMAT;
    let mant_bits = fmt.mantissa_bits() as i32;
    if e >= fmt.min_exponent {
        F::from_bits64(((e + fmt.exponent_bias()) as u64) << mant_bits)
    } else {
        F::from_bits64(1u64 << (e - fmt.min_exponent + mant_bits))
    }
}

/// A closed interval `[lo, hi]` of finite floats with `lo ⪯ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatInterval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: MachineFloat> FloatInterval<F> {
    pub fn new(lo: F, hi: F) -> Result<Self> {
        check_finite(lo)?;
        check_finite(hi)?;
        if !le(lo, hi) {
            return Err(Error::Contract(format!(
                "empty interval [{}, {}]",
                hexfloat::format(lo),
                hexfloat::format(hi)
            )));
        }
        Ok(FloatInterval { lo, hi })
    }

    pub fn point(x: F) -> Result<Self> {
        Self::new(x, x)
    }

    pub fn count(&self) -> u64 {
        count(self.lo, self.hi)
    }

    pub fn contains(&self, x: F) -> bool {
        le(self.lo, x) && le(x, self.hi)
    }

    /// `[-hi, -lo]`.
    pub fn reflect(&self) -> Self {
        FloatInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn intersects(&self, lo: F, hi: F) -> bool {
        le(self.lo, hi) && le(lo, self.hi)
    }

    /// All floats of the interval in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = F> {
        let a = ordinal(self.lo);
        let b = ordinal(self.hi);
        (a..=b).map(from_ordinal)
    }
}

impl<F: MachineFloat> Display for FloatInterval<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{},{}]",
            hexfloat::format(self.lo),
            hexfloat::format(self.hi)
        )
    }
}
