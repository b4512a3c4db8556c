//! Range reduction by π/2: quadrant index, π/2 multiples rounded in both
//! directions, working-precision requirements and the worst-case search.

mod constants;
pub mod worst_case;

use num_bigint::BigUint;

pub use worst_case::{binade_minimum, worst_case_search, WorstCase};

use crate::error::{Error, Result};
use crate::float_kernel::{from_ordinal, ordinal, FloatFormat, MachineFloat};
use crate::hexfloat;

/// Which constant a product uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionOp {
    Divide2OverPi,
    MultiplyPiOver2,
}

/// Stored extremal cancellation of `x·2/π` for a format: the float `x̂`
/// maximizing `e_x − e_Δ` over `[−ℓ_max, ℓ_max]` (default `ℓ_max`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoredWorstCase {
    pub x_bits: u64,
    pub e_x: i32,
    pub e_delta: i32,
}

pub const WORST_CASE_BINARY32: StoredWorstCase = StoredWorstCase {
    x_bits: 0x4a25_62ae,
    e_x: 21,
    e_delta: -27,
};

pub const WORST_CASE_BINARY64: StoredWorstCase = StoredWorstCase {
    x_bits: 0x4325_cba8_9af1_f855,
    e_x: 51,
    e_delta: -55,
};

pub fn stored_worst_case(fmt: FloatFormat) -> StoredWorstCase {
    if fmt == FloatFormat::BINARY32 {
        WORST_CASE_BINARY32
    } else {
        WORST_CASE_BINARY64
    }
}

/// Smallest working precision `p` with `p > e_x − e_Δ + e_c + 4`, where
/// `e_c` is the exponent of the constant the operation multiplies by.
pub fn required_precision(fmt: FloatFormat, op: ReductionOp) -> u32 {
    let w = stored_worst_case(fmt);
    let e_const = match op {
        ReductionOp::Divide2OverPi => -1,
        ReductionOp::MultiplyPiOver2 => 0,
    };
    (w.e_x - w.e_delta + e_const + 4 + 1) as u32
}

/// `2^(e_k + e_x − p + 4)`, the bound on `|k ⊡ RN(x) − k·x|`.
pub fn fp_mult_error_bound(e_k: i32, e_x: i32, p: i32) -> f64 {
    2f64.powi(e_k + e_x - p + 4)
}

/// Precision reached by the product routines for each target.
pub fn working_precision_of(fmt: FloatFormat) -> u32 {
    if fmt == FloatFormat::BINARY32 {
        53
    } else {
        // three binary64 limbs; the lowest is rounded
        158
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig<F> {
    pub target: FloatFormat,
    pub l_max: F,
    pub working_precision: u32,
}

impl<F: MachineFloat> Default for ReductionConfig<F> {
    fn default() -> Self {
        ReductionConfig {
            target: F::FORMAT,
            l_max: F::from_f64(2f64.powi(F::FORMAT.precision_bits as i32)),
            working_precision: working_precision_of(F::FORMAT),
        }
    }
}

impl<F: MachineFloat> ReductionConfig<F> {
    /// Validates that `l_max` keeps every quotient representable and that the
    /// product routines reach the required precision.
    pub fn new(l_max: F) -> Result<Self> {
        let c = ReductionConfig {
            l_max,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target != F::FORMAT {
            return Err(Error::Contract("configuration format mismatch".into()));
        }
        let limit = 2f64.powi(F::FORMAT.precision_bits as i32);
        let l = self.l_max.to_f64();
        if !(l.is_finite() && l > 0.0 && l <= limit) {
            return Err(Error::Range(format!(
                "l_max {} must lie in (0, 2^{}]",
                hexfloat::format(self.l_max),
                F::FORMAT.precision_bits
            )));
        }
        let need = required_precision(F::FORMAT, ReductionOp::Divide2OverPi)
            .max(required_precision(F::FORMAT, ReductionOp::MultiplyPiOver2));
        if self.working_precision < need || self.working_precision > working_precision_of(F::FORMAT) {
            return Err(Error::Contract(format!(
                "working precision {} unsupported (need {}, have {})",
                self.working_precision,
                need,
                working_precision_of(F::FORMAT)
            )));
        }
        Ok(())
    }

    /// Largest |k| accepted by the π/2-multiple routines.
    pub fn k_max(&self) -> i64 {
        (self.l_max.to_f64() * constants_f64(constants::TWO_OVER_PI_F64)[0]).ceil() as i64 + 2
    }
}

fn constants_f64(bits: [u64; 3]) -> [f64; 3] {
    bits.map(f64::from_bits)
}

fn limbs_to_biguint(limbs: [u64; 4]) -> BigUint {
    let mut v = BigUint::from(0u32);
    for l in limbs {
        v = (v << 64u32) | BigUint::from(l);
    }
    v
}

/// `⌊2/π · 2^256⌋`.
pub fn two_over_pi_scaled() -> BigUint {
    limbs_to_biguint(constants::TWO_OVER_PI_LIMBS)
}

/// `⌊π/2 · 2^255⌋`.
pub fn pio2_scaled() -> BigUint {
    limbs_to_biguint(constants::PIO2_LIMBS)
}

/// `−constants::*_EXP`, the binary scale of the 256-bit tables.
pub const TWO_OVER_PI_SCALE: u32 = -constants::TWO_OVER_PI_EXP as u32;
pub const PIO2_SCALE: u32 = -constants::PIO2_EXP as u32;

pub fn two_over_pi_dd() -> DoubleDouble {
    let c = constants_f64(constants::TWO_OVER_PI_F64);
    DoubleDouble { hi: c[0], lo: c[1] }
}

pub fn pio2_dd() -> DoubleDouble {
    let c = constants_f64(constants::PIO2_F64);
    DoubleDouble { hi: c[0], lo: c[1] }
}

pub fn two_over_pi_td() -> TripleDouble {
    let c = constants_f64(constants::TWO_OVER_PI_F64);
    TripleDouble {
        hi: c[0],
        mid: c[1],
        lo: c[2],
    }
}

pub fn pio2_td() -> TripleDouble {
    let c = constants_f64(constants::PIO2_F64);
    TripleDouble {
        hi: c[0],
        mid: c[1],
        lo: c[2],
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

/// Unevaluated sum of three nonoverlapping binary64 limbs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleDouble {
    pub hi: f64,
    pub mid: f64,
    pub lo: f64,
}

pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Exact product as `p + e`, through a fused multiply-add.
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `k · c` for an integer-valued `k`, to about 106 bits.
pub fn dd_mul(k: f64, c: DoubleDouble) -> DoubleDouble {
    let (p, e) = two_prod(k, c.hi);
    let e = e + k * c.lo;
    let (hi, lo) = fast_two_sum(p, e);
    DoubleDouble { hi, lo }
}

/// `k · c` for an integer-valued `k`, to about 158 bits.
pub fn td_mul(k: f64, c: TripleDouble) -> TripleDouble {
    let (p1, e1) = two_prod(k, c.hi);
    let (p2, e2) = two_prod(k, c.mid);
    let p3 = k * c.lo;
    let (a, b) = two_sum(e1, p2);
    let tail = b + (e2 + p3);
    let (a, tail) = two_sum(a, tail);
    let (hi, m) = two_sum(p1, a);
    let (mid, lo) = two_sum(m, tail);
    let (hi, mid) = fast_two_sum(hi, mid);
    TripleDouble { hi, mid, lo }
}

/// Residual kept as an unevaluated double-double.
#[derive(Clone, Copy)]
struct Residual(f64, f64);

impl Residual {
    fn new(terms: &[f64]) -> Self {
        let mut r = Residual(0.0, 0.0);
        for &t in terms {
            r = r.add(t);
        }
        r
    }

    fn add(self, t: f64) -> Self {
        let (s, e) = two_sum(self.0, t);
        let (h, l) = two_sum(s, e + self.1);
        Residual(h, l)
    }

    fn sign(self) -> i32 {
        let v = if self.0 != 0.0 { self.0 } else { self.1 };
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }
}

/// Round `Σ terms` (nonoverlapping, decreasing magnitude) towards −∞ or +∞.
fn round_directed<F: MachineFloat>(terms: &[f64], up: bool) -> F {
    let mut h = F::from_f64(terms[0]);
    if !h.is_finite() {
        return h;
    }
    let mut rest = vec![terms[0] - h.to_f64()];
    rest.extend_from_slice(&terms[1..]);
    let mut r = Residual::new(&rest);
    let fin = |o: i64| -> bool { from_ordinal::<F>(o).is_finite() };
    loop {
        match (up, r.sign()) {
            (_, 0) => return h,
            (true, 1) => {
                let o = ordinal(h) + 1;
                if !fin(o) {
                    return from_ordinal(o);
                }
                let n: F = from_ordinal(o);
                r = r.add(-(n.to_f64() - h.to_f64()));
                h = n;
                if r.sign() <= 0 {
                    return h;
                }
            }
            (true, _) => {
                let p: F = from_ordinal(ordinal(h) - 1);
                if r.add(h.to_f64() - p.to_f64()).sign() > 0 {
                    return h;
                }
                r = r.add(h.to_f64() - p.to_f64());
                h = p;
            }
            (false, -1) => {
                let o = ordinal(h) - 1;
                if !fin(o) {
                    return from_ordinal(o);
                }
                let n: F = from_ordinal(o);
                r = r.add(h.to_f64() - n.to_f64());
                h = n;
                if r.sign() >= 0 {
                    return h;
                }
            }
            (false, _) => {
                let n: F = from_ordinal(ordinal(h) + 1);
                if r.add(h.to_f64() - n.to_f64()).sign() < 0 {
                    return h;
                }
                r = r.add(h.to_f64() - n.to_f64());
                h = n;
            }
        }
    }
}

pub fn dd_round_down<F: MachineFloat>(v: DoubleDouble) -> F {
    round_directed(&[v.hi, v.lo], false)
}

pub fn dd_round_up<F: MachineFloat>(v: DoubleDouble) -> F {
    round_directed(&[v.hi, v.lo], true)
}

pub fn td_round_down<F: MachineFloat>(v: TripleDouble) -> F {
    round_directed(&[v.hi, v.mid, v.lo], false)
}

pub fn td_round_up<F: MachineFloat>(v: TripleDouble) -> F {
    round_directed(&[v.hi, v.mid, v.lo], true)
}

fn check_arg<F: MachineFloat>(x: F, cfg: &ReductionConfig<F>) -> Result<()> {
    if x.is_nan() {
        return Err(Error::Domain("NaN argument to range reduction".into()));
    }
    if !(x.to_f64().abs() <= cfg.l_max.to_f64()) {
        return Err(Error::Range(format!(
            "|{}| exceeds l_max = {}",
            hexfloat::format(x),
            hexfloat::format(cfg.l_max)
        )));
    }
    Ok(())
}

/// `⌈x · 2/π⌉`, so that `(k−1)·π/2 ≤ x ≤ k·π/2`; `−0 ↦ 0`, `+0 ↦ 1`.
pub fn div_pio2_up<F: MachineFloat>(x: F, cfg: &ReductionConfig<F>) -> Result<i64> {
    check_arg(x, cfg)?;
    let xf = x.to_f64();
    if xf == 0.0 {
        return Ok(if xf.is_sign_negative() { 0 } else { 1 });
    }
    let c = two_over_pi_td();
    if F::FORMAT == FloatFormat::BINARY32 {
        return Ok((xf * c.hi).ceil() as i64);
    }
    let (p1, e1) = two_prod(xf, c.hi);
    let (p2, e2) = two_prod(xf, c.mid);
    let p3 = xf * c.lo;
    let n = p1.round();
    // p1 − n is exact for |p1| ≥ 1/2 (Sterbenz) and trivially for n = 0.
    let mut r = Residual::new(&[p1 - n, e1, p2, e2, p3]);
    // The residual can leave (−1, 1] once ulp(p1) reaches 1/2.
    let mut k = n as i64;
    while r.sign() > 0 {
        r = r.add(-1.0);
        k += 1;
    }
    while r.add(1.0).sign() <= 0 {
        r = r.add(1.0);
        k -= 1;
    }
    Ok(k)
}

fn check_k<F: MachineFloat>(k: i64, cfg: &ReductionConfig<F>) -> Result<()> {
    if k.unsigned_abs() > cfg.k_max() as u64 {
        return Err(Error::Range(format!(
            "k = {k} exceeds the reduction range (|k| ≤ {})",
            cfg.k_max()
        )));
    }
    Ok(())
}

fn pio2_mult<F: MachineFloat>(k: i64, cfg: &ReductionConfig<F>, up: bool) -> Result<F> {
    check_k(k, cfg)?;
    if k == 0 {
        return Ok(F::from_f64(if up { 0.0 } else { -0.0 }));
    }
    let kf = k as f64;
    if F::FORMAT == FloatFormat::BINARY32 {
        let c = pio2_td();
        let (p, e) = two_prod(kf, c.hi);
        let f = F::from_f64(p);
        let d = f.to_f64() - p;
        let above = if d != 0.0 { d > 0.0 } else { e + kf * c.mid < 0.0 };
        let o = ordinal(f);
        return Ok(match (up, above) {
            (false, true) => from_ordinal(o - 1),
            (true, false) => from_ordinal(o + 1),
            _ => f,
        });
    }
    let v = td_mul(kf, pio2_td());
    Ok(if up { td_round_up(v) } else { td_round_down(v) })
}

/// Largest float strictly below `k·π/2`; `k = 0 ↦ −0`.
pub fn pio2_mult_down<F: MachineFloat>(k: i64, cfg: &ReductionConfig<F>) -> Result<F> {
    pio2_mult(k, cfg, false)
}

/// Smallest float strictly above `k·π/2`; `k = 0 ↦ +0`.
pub fn pio2_mult_up<F: MachineFloat>(k: i64, cfg: &ReductionConfig<F>) -> Result<F> {
    pio2_mult(k, cfg, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float_kernel::{pred, succ};

    #[test]
    fn precision_table() {
        assert_eq!(required_precision(FloatFormat::BINARY32, ReductionOp::Divide2OverPi), 52);
        assert_eq!(required_precision(FloatFormat::BINARY32, ReductionOp::MultiplyPiOver2), 53);
        assert_eq!(required_precision(FloatFormat::BINARY64, ReductionOp::Divide2OverPi), 110);
        assert_eq!(required_precision(FloatFormat::BINARY64, ReductionOp::MultiplyPiOver2), 111);
    }

    #[test]
    fn error_bound_formula() {
        assert_eq!(fp_mult_error_bound(21, -1, 53), 2f64.powi(-29));
        assert_eq!(fp_mult_error_bound(0, 0, 24), 2f64.powi(-20));
    }

    #[test]
    fn zero_and_small_quotients() {
        let cfg = ReductionConfig::<f32>::default();
        assert_eq!(div_pio2_up(0.0f32, &cfg).unwrap(), 1);
        assert_eq!(div_pio2_up(-0.0f32, &cfg).unwrap(), 0);
        assert_eq!(div_pio2_up(1.0f32, &cfg).unwrap(), 1);
        assert_eq!(div_pio2_up(f32::from_bits(0x3fc9_0fdb), &cfg).unwrap(), 2);
        let cfg = ReductionConfig::<f64>::default();
        assert_eq!(div_pio2_up(-1e-300f64, &cfg).unwrap(), 0);
        assert_eq!(div_pio2_up(std::f64::consts::FRAC_PI_2, &cfg).unwrap(), 1);
        assert_eq!(div_pio2_up(-std::f64::consts::FRAC_PI_2, &cfg).unwrap(), 0);
        assert!(div_pio2_up(1e17f64, &cfg).is_err());
    }

    #[test]
    fn multiples_bracket() {
        let c32 = ReductionConfig::<f32>::default();
        let pio2 = f32::from_bits(0x3fc9_0fdb);
        assert_eq!(pio2_mult_down(1, &c32).unwrap(), pred(pio2).unwrap());
        assert_eq!(pio2_mult_up(1, &c32).unwrap(), pio2);
        assert_eq!(pio2_mult_down(0, &c32).unwrap().to_bits(), (-0.0f32).to_bits());
        assert_eq!(pio2_mult_up(0, &c32).unwrap().to_bits(), 0);
        let c64 = ReductionConfig::<f64>::default();
        let p = std::f64::consts::FRAC_PI_2;
        assert_eq!(pio2_mult_down(1, &c64).unwrap(), p);
        assert_eq!(pio2_mult_up(1, &c64).unwrap(), succ(p).unwrap());
        assert_eq!(pio2_mult_down(-1, &c64).unwrap(), -succ(p).unwrap());
    }

    #[test]
    fn dd_identity_and_brackets() {
        let c = pio2_dd();
        assert_eq!(dd_mul(1.0, c), c);
        let d: f64 = dd_round_down(c);
        let u: f64 = dd_round_up(c);
        assert_eq!(succ(d).unwrap(), u);
        let d: f32 = dd_round_down(c);
        let u: f32 = dd_round_up(c);
        assert_eq!(succ(d).unwrap(), u);
    }

    #[test]
    fn config_validation() {
        assert!(ReductionConfig::<f32>::new(2f32.powi(24)).is_ok());
        assert!(ReductionConfig::<f32>::new(2f32.powi(25)).is_err());
        let c = ReductionConfig::<f32> {
            working_precision: 40,
            ..ReductionConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn generated_constants_match_the_exact_values() {
        use crate::oracle::{float_rational, pi_rational};
        use num_bigint::{BigInt, BigUint};
        use num_rational::BigRational;
        use num_traits::Signed;
        let pi = pi_rational();
        let two = BigRational::from_integer(BigInt::from(2));
        let cases = [
            (&two / &pi, constants::TWO_OVER_PI_LIMBS, constants::TWO_OVER_PI_EXP, constants::TWO_OVER_PI_F64),
            (&pi / &two, constants::PIO2_LIMBS, constants::PIO2_EXP, constants::PIO2_F64),
        ];
        for (exact, limbs, exp, parts) in cases {
            // The limbs hold the significand truncated to 256 bits.
            let m = limbs.iter().fold(BigUint::default(), |acc, &l| (acc << 64u32) + l);
            let scaled = &exact * BigRational::from_integer(BigInt::from(1) << (-exp) as u32);
            assert_eq!(BigInt::from(m), scaled.floor().to_integer());
            let sum = parts.iter().map(|&b| float_rational(f64::from_bits(b))).fold(BigRational::default(), |a, b| a + b);
            assert!((sum - exact).abs() < BigRational::new(BigInt::from(1), BigInt::from(1) << 158u32));
        }
    }
}
