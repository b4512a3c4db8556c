//! Ground truth for tests: exhaustive refinement, literal predicate checks,
//! an independent glitch scanner and the two constants from a decimal source.
//!
//! Nothing here calls into `refine_core`, `trig_reduce` or the surveyor; the
//! float order is recomputed from raw bits.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::float_kernel::{FloatInterval, MachineFloat};
use crate::glitch_model::{GlitchBounds, MonotoneClass};

/// π to 120 decimals.
pub const PI_DECIMAL: &str = "3.141592653589793238462643383279502884197169399375105820974944592307816406286208998628034825342117067982148086513282306647093";

pub const BRUTE_LIMIT: u64 = 1 << 20;

fn sign_bit<F: MachineFloat>() -> u64 {
    1u64 << (F::FORMAT.storage_bits - 1)
}

/// Position of `x` in the float order, from raw bits.
pub fn key<F: MachineFloat>(x: F) -> i64 {
    let b = x.to_bits64();
    let mag = (b & !sign_bit::<F>()) as i64;
    if b & sign_bit::<F>() != 0 {
        -mag - 1
    } else {
        mag
    }
}

pub fn from_key<F: MachineFloat>(k: i64) -> F {
    if k < 0 {
        F::from_bits64(((-k - 1) as u64) | sign_bit::<F>())
    } else {
        F::from_bits64(k as u64)
    }
}

fn cmp_f<F: MachineFloat>(a: F, b: F) -> Ordering {
    key(a).cmp(&key(b))
}

fn check_size<F: MachineFloat>(iv: &FloatInterval<F>) -> Result<(i64, i64)> {
    let (a, b) = (key(iv.lo), key(iv.hi));
    if b < a || (b - a) as u64 >= BRUTE_LIMIT {
        return Err(Error::Range(format!("oracle scans at most 2^20 floats, got {iv}")));
    }
    Ok((a, b))
}

fn eval<F: MachineFloat>(f: &dyn Fn(F) -> F, x: F) -> Result<F> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::DomainHole {
            x: crate::hexfloat::format(x),
        });
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceAnswer<F> {
    pub leftmost_sol: Option<F>,
    pub rightmost_sol: Option<F>,
    /// Every image lies strictly below `y`.
    pub below_all: bool,
    /// Every image lies strictly above `y`.
    pub above_all: bool,
    pub min_f: F,
    pub max_f: F,
    /// Rightmost `x` with `f(x) ⪯ y`.
    pub last_at_or_below: Option<F>,
    /// Leftmost `x` with `f(x) ⪰ y`.
    pub first_at_or_above: Option<F>,
}

impl<F: MachineFloat> BruteForceAnswer<F> {
    /// Tightest upper answer `(u, r)` an isotonic refinement can give.
    pub fn optimal_upper(&self, iv: &FloatInterval<F>) -> (F, u8) {
        match self.last_at_or_below {
            None => (iv.lo, 5),
            Some(z) if Some(z) == self.rightmost_sol => (z, 9),
            Some(z) if key(z) == key(iv.hi) => (z, 6),
            Some(z) => (from_key(key(z) + 1), 8),
        }
    }

    /// Mirror of [`Self::optimal_upper`].
    pub fn optimal_lower(&self, iv: &FloatInterval<F>) -> (F, u8) {
        match self.first_at_or_above {
            None => (iv.hi, 0),
            Some(z) if Some(z) == self.leftmost_sol => (z, 4),
            Some(z) if key(z) == key(iv.lo) => (z, 1),
            Some(z) => (from_key(key(z) - 1), 3),
        }
    }
}

/// Exhaustive left-to-right scan.
pub fn brute_refine<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
) -> Result<BruteForceAnswer<F>> {
    let (a, b) = check_size(&iv)?;
    let ky = key(y);
    let mut ans = BruteForceAnswer {
        leftmost_sol: None,
        rightmost_sol: None,
        below_all: true,
        above_all: true,
        min_f: eval(f, iv.lo)?,
        max_f: eval(f, iv.lo)?,
        last_at_or_below: None,
        first_at_or_above: None,
    };
    for k in a..=b {
        let x: F = from_key(k);
        let v = eval(f, x)?;
        let kv = key(v);
        if kv == ky {
            ans.leftmost_sol.get_or_insert(x);
            ans.rightmost_sol = Some(x);
        }
        if kv >= ky {
            ans.below_all = false;
            ans.first_at_or_above.get_or_insert(x);
        }
        if kv <= ky {
            ans.above_all = false;
            ans.last_at_or_below = Some(x);
        }
        if kv < key(ans.min_f) {
            ans.min_f = v;
        }
        if kv > key(ans.max_f) {
            ans.max_f = v;
        }
    }
    Ok(ans)
}

/// Second scan, right to left over native comparisons, for self-checks.
pub fn brute_refine_reverse<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
) -> Result<BruteForceAnswer<F>> {
    check_size(&iv)?;
    let order = |a: F, b: F| -> Ordering {
        let (x, z) = (a.to_f64(), b.to_f64());
        match x.partial_cmp(&z) {
            Some(Ordering::Equal) if x == 0.0 => z.is_sign_negative().cmp(&x.is_sign_negative()),
            Some(o) => o,
            None => unreachable!("NaN filtered by eval"),
        }
    };
    let mut xs = Vec::new();
    let mut x = iv.hi;
    loop {
        xs.push(x);
        if x.to_bits64() == iv.lo.to_bits64() {
            break;
        }
        x = step_down(x);
    }
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push((x, eval(f, x)?));
    }
    let sols: Vec<F> = vals
        .iter()
        .filter(|(_, v)| order(*v, y) == Ordering::Equal)
        .map(|p| p.0)
        .collect();
    let min_f = vals.iter().map(|p| p.1).reduce(|a, b| if order(b, a).is_lt() { b } else { a });
    let max_f = vals.iter().map(|p| p.1).reduce(|a, b| if order(b, a).is_gt() { b } else { a });
    Ok(BruteForceAnswer {
        leftmost_sol: sols.last().copied(),
        rightmost_sol: sols.first().copied(),
        below_all: vals.iter().all(|p| order(p.1, y).is_lt()),
        above_all: vals.iter().all(|p| order(p.1, y).is_gt()),
        min_f: min_f.expect("nonempty"),
        max_f: max_f.expect("nonempty"),
        last_at_or_below: vals.iter().find(|p| order(p.1, y).is_le()).map(|p| p.0),
        first_at_or_above: vals.iter().rev().find(|p| order(p.1, y).is_ge()).map(|p| p.0),
    })
}

fn step_down<F: MachineFloat>(x: F) -> F {
    let b = x.to_bits64();
    let s = sign_bit::<F>();
    if b == 0 {
        F::from_bits64(s)
    } else if b & s != 0 {
        F::from_bits64(b + 1)
    } else {
        F::from_bits64(b - 1)
    }
}

/// Literal evaluation of `p_r(y, x_l, x_u, value)` by exhaustive scan.
pub fn check_predicate<F: MachineFloat>(
    r: u8,
    y: F,
    iv: FloatInterval<F>,
    value: F,
    f: &dyn Fn(F) -> F,
) -> Result<bool> {
    let (a, b) = check_size(&iv)?;
    let ky = key(y);
    let kv = key(value);
    let inside = a <= kv && kv <= b;
    let img = |k: i64| -> Result<i64> { Ok(key(eval(f, from_key::<F>(k))?)) };
    let all = |lo: i64, hi: i64, p: &dyn Fn(i64) -> bool| -> Result<bool> {
        for k in lo..=hi {
            if !p(img(k)?) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let below = move |v: i64| v < ky;
    let above = move |v: i64| v > ky;
    Ok(match r {
        0 => all(a, b, &below)?,
        1 => inside && all(a, kv, &above)?,
        2 => inside && all(a, kv, &below)?,
        3 => inside && above(img(kv + 1)?) && all(a, kv, &below)?,
        4 => inside && img(kv)? == ky && all(a, kv - 1, &below)?,
        5 => all(a, b, &above)?,
        6 => inside && all(kv, b, &below)?,
        7 => inside && all(kv, b, &above)?,
        8 => inside && below(img(kv - 1)?) && all(kv, b, &above)?,
        9 => inside && img(kv)? == ky && all(kv + 1, b, &above)?,
        _ => false,
    })
}

/// `p_r^f(y, …) ∨ p_r^{−f}(−y', …)`, the disjunction trig results satisfy.
pub fn check_predicate_either<F: MachineFloat>(
    r: u8,
    y: F,
    y_reflected: F,
    iv: FloatInterval<F>,
    value: F,
    f: &dyn Fn(F) -> F,
) -> Result<bool> {
    if check_predicate(r, y, iv, value, f)? {
        return Ok(true);
    }
    let nf = |x: F| f(x).neg();
    check_predicate(r, y_reflected.neg(), iv, value, &nf)
}

/// One glitch as found by [`scan_glitches`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGlitch<F> {
    pub start: F,
    pub end: F,
    pub width: u64,
    pub depth: u64,
    /// Running extremum the run stays strictly beyond (in `f`'s values).
    pub reference: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleScan<F> {
    /// Runs strictly below the running maximum, scanning left to right.
    pub forward: Vec<OracleGlitch<F>>,
    /// Runs strictly above the running minimum, scanning right to left.
    pub mirrored: Vec<OracleGlitch<F>>,
    pub holes: u64,
}

/// O(n) scan of both readings; NaN and infinite images end a run and
/// restart the running extremum.
pub fn scan_glitches<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    domain: FloatInterval<F>,
    class: MonotoneClass,
) -> OracleScan<F> {
    let flip = class == MonotoneClass::Antitonic;
    let h = |x: F| -> Option<i64> {
        let v = f(x);
        if !v.is_finite() {
            return None;
        }
        Some(if flip { key(v.neg()) } else { key(v) })
    };
    let (a, b) = (key(domain.lo), key(domain.hi));
    let mut holes = 0;
    let back = |k: i64| -> F {
        let v: F = from_key(k);
        if flip {
            v.neg()
        } else {
            v
        }
    };

    let mut forward = Vec::new();
    let mut best: Option<i64> = None;
    let mut run: Option<(i64, i64, i64, i64)> = None;
    for k in a..=b {
        let x: F = from_key(k);
        if f(x).is_nan() {
            holes += 1;
        }
        match h(x) {
            Some(v) if best.is_some_and(|m| v < m) => {
                let m = best.unwrap();
                run = Some(match run {
                    Some((s, _, lo, r)) => (s, k, lo.min(v), r),
                    None => (k, k, v, m),
                });
            }
            other => {
                if let Some((s, e, lo, r)) = run.take() {
                    forward.push(OracleGlitch {
                        start: from_key(s),
                        end: from_key(e),
                        width: (e - s + 1) as u64,
                        depth: (r - lo) as u64,
                        reference: back(r),
                    });
                }
                best = other;
            }
        }
    }
    if let Some((s, e, lo, r)) = run.take() {
        forward.push(OracleGlitch {
            start: from_key(s),
            end: from_key(e),
            width: (e - s + 1) as u64,
            depth: (r - lo) as u64,
            reference: back(r),
        });
    }

    let mut mirrored = Vec::new();
    let mut least: Option<i64> = None;
    let mut run: Option<(i64, i64, i64, i64)> = None;
    let close = |run: (i64, i64, i64, i64), out: &mut Vec<OracleGlitch<F>>| {
        let (e, s, hi, r) = run;
        out.push(OracleGlitch {
            start: from_key(s),
            end: from_key(e),
            width: (e - s + 1) as u64,
            depth: (hi - r) as u64,
            reference: back(r),
        });
    };
    for k in (a..=b).rev() {
        match h(from_key::<F>(k)) {
            Some(v) if least.is_some_and(|m| v > m) => {
                let m = least.unwrap();
                run = Some(match run {
                    Some((e, _, hi, r)) => (e, k, hi.max(v), r),
                    None => (k, k, v, m),
                });
            }
            other => {
                if let Some(r) = run.take() {
                    close(r, &mut mirrored);
                }
                least = other;
            }
        }
    }
    if let Some(r) = run.take() {
        close(r, &mut mirrored);
    }
    mirrored.reverse();
    OracleScan {
        forward,
        mirrored,
        holes,
    }
}

/// Summary `(n_g, d_M, w_M, α, ω)` of a glitch list.
pub fn summary<F: MachineFloat>(gs: &[OracleGlitch<F>]) -> Option<(u64, u64, u64, F, F)> {
    let first = gs.first()?;
    let last = gs.last()?;
    Some((
        gs.len() as u64,
        gs.iter().map(|g| g.depth).max()?,
        gs.iter().map(|g| g.width).max()?,
        first.start,
        last.end,
    ))
}

/// Whether the tightness clause of the refinement contract applies: the
/// images at both ends bracket `y`, and the glitch data is either empty or
/// a single narrow glitch located well enough: one side of the window is
/// exactly the float bracketing the run on that side, or the window spans at
/// most `t` steps. `upper` selects the forward reading, otherwise the
/// mirrored one.
pub fn precision_condition<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    t: u64,
    upper: bool,
) -> bool {
    let (fl, fu) = (f(iv.lo), f(iv.hi));
    if fl.is_nan() || fu.is_nan() || cmp_f(fl, y).is_gt() || cmp_f(y, fu).is_gt() {
        return false;
    }
    if g.n_g == 0 {
        return true;
    }
    if g.n_g != 1 || g.w_m >= t {
        return false;
    }
    let scan = scan_glitches(f, iv, MonotoneClass::Isotonic);
    let reading = if upper { &scan.forward } else { &scan.mirrored };
    let (lo, hi) = (key(iv.lo), key(iv.hi));
    let exact = match summary(reading) {
        Some((_, _, _, a, w)) => {
            let (a, w) = (key(a) - 1, key(w) + 1);
            (a >= lo && a == key(g.alpha)) || (w <= hi && w == key(g.omega))
        }
        None => false,
    };
    exact || (key(g.omega) - key(g.alpha)) as u64 <= t
}

/// Sign, integer significand and exponent of a finite float.
fn float_parts<F: MachineFloat>(x: F) -> (bool, u64, i64) {
    let fmt = F::FORMAT;
    let mb = fmt.precision_bits - 1;
    let b = x.to_bits64();
    let neg = b & sign_bit::<F>() != 0;
    let mag = b & !sign_bit::<F>();
    let biased = (mag >> mb) as i64;
    let frac = mag & ((1u64 << mb) - 1);
    let bias = fmt.max_exponent as i64;
    let (m, e) = if biased == 0 {
        (frac, 1 - bias - mb as i64)
    } else {
        (frac | (1u64 << mb), biased - bias - mb as i64)
    };
    (neg, m, e)
}

/// Exact value of a finite float.
pub fn float_rational<F: MachineFloat>(x: F) -> BigRational {
    let (neg, m, e) = float_parts(x);
    let mut r = BigRational::from_integer(BigInt::from(m));
    if e >= 0 {
        r *= BigRational::from_integer(BigInt::one() << e as u32);
    } else {
        r /= BigRational::from_integer(BigInt::one() << (-e) as u32);
    }
    if neg {
        -r
    } else {
        r
    }
}

/// π from [`PI_DECIMAL`] (error below `10^−120`).
pub fn pi_rational() -> BigRational {
    static PI: OnceLock<BigRational> = OnceLock::new();
    PI.get_or_init(|| {
        let digits: String = PI_DECIMAL.chars().filter(|c| c.is_ascii_digit()).collect();
        let frac_len = PI_DECIMAL.len() - PI_DECIMAL.find('.').unwrap() - 1;
        let num: BigInt = digits.parse().unwrap();
        BigRational::new(num, BigInt::from(10u32).pow(frac_len as u32))
    })
    .clone()
}

/// π to `digits` decimals by Machin's formula, truncated.
pub fn machin_pi(digits: u32) -> BigRational {
    let guard = 10;
    let scale = BigInt::from(10u32).pow(digits + guard);
    let atan_inv = |n: u32| -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut power = &scale / BigInt::from(n);
        let mut sum = BigInt::zero();
        let mut k = 0u32;
        while !power.is_zero() {
            let term = &power / BigInt::from(2 * k + 1);
            if k.is_multiple_of(2) {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &n2;
            k += 1;
        }
        sum
    };
    let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
    let cut = BigInt::from(10u32).pow(guard);
    BigRational::new(pi / cut, BigInt::from(10u32).pow(digits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstName {
    PiOver2,
    TwoOverPi,
}

impl ConstName {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "pi_over_2" => Some(ConstName::PiOver2),
            "two_over_pi" => Some(ConstName::TwoOverPi),
            _ => None,
        }
    }
}

/// `mantissa · 2^exponent`, with `mantissa` exactly `bits` bits long.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpConst {
    pub mantissa: BigUint,
    pub exponent: i64,
    pub bits: u32,
}

impl HpConst {
    pub fn to_rational(&self) -> BigRational {
        let m = BigRational::from_integer(BigInt::from(self.mantissa.clone()));
        let p = BigInt::one() << self.exponent.unsigned_abs() as u32;
        if self.exponent >= 0 {
            m * BigRational::from_integer(p)
        } else {
            m / BigRational::from_integer(p)
        }
    }

    /// `0x<hex mantissa>p<exponent>`.
    pub fn to_hex(&self) -> String {
        format!("0x{:x}p{}", self.mantissa, self.exponent)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("bad constant literal {s:?}"),
        };
        let body = s.strip_prefix("0x").ok_or_else(bad)?;
        let (m, e) = body.split_once('p').ok_or_else(bad)?;
        let mantissa = BigUint::parse_bytes(m.as_bytes(), 16).ok_or_else(bad)?;
        let exponent: i64 = e.parse().map_err(|_| bad())?;
        let bits = mantissa.bits() as u32;
        Ok(HpConst {
            mantissa,
            exponent,
            bits,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_rational();
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }
}

/// `name` rounded to nearest at `bits ∈ [1, 256]` significant bits.
pub fn hp_const(name: ConstName, bits: u32) -> Result<HpConst> {
    if bits == 0 || bits > 256 {
        return Err(Error::Domain(format!("constant precision {bits} outside [1, 256]")));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let pi = pi_rational();
    let v = match name {
        ConstName::PiOver2 => &pi / &two,
        ConstName::TwoOverPi => &two / &pi,
    };
    // both constants lie in [1/2, 2)
    let e_top: i64 = if v >= BigRational::one() { 0 } else { -1 };
    let exponent = e_top - bits as i64 + 1;
    let scaled = if exponent >= 0 {
        v / BigRational::from_integer(BigInt::one() << exponent as u32)
    } else {
        v * BigRational::from_integer(BigInt::one() << (-exponent) as u32)
    };
    let fl = scaled.floor();
    let frac = &scaled - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let margin = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(100));
    if (&frac - &half).abs() < margin {
        return Err(Error::Contract("decimal source too short to round".into()));
    }
    let mut m = fl.to_integer();
    if frac > half {
        m += 1;
    }
    let mut mantissa = m.to_biguint().expect("positive constant");
    let mut exponent = exponent;
    if mantissa.bits() as u32 > bits {
        mantissa >>= 1u32;
        exponent += 1;
    }
    Ok(HpConst {
        mantissa,
        exponent,
        bits,
    })
}

/// Largest float strictly below `k·π/2` and smallest strictly above it.
pub fn pio2_bracket<F: MachineFloat>(k: i64) -> (F, F) {
    let target = pi_rational() * BigRational::new(BigInt::from(k), BigInt::from(2));
    if k == 0 {
        return (F::from_f64(-0.0), F::from_f64(0.0));
    }
    let approx = target.numer().to_f64().unwrap() / target.denom().to_f64().unwrap();
    let mut c = key(F::from_f64(approx));
    while float_rational(from_key::<F>(c)) > target {
        c -= 1;
    }
    while float_rational(from_key::<F>(c + 1)) < target {
        c += 1;
    }
    (from_key(c), from_key(c + 1))
}

/// `(k−1)·π/2 ≤ x ≤ k·π/2`, decided exactly against [`PI_DECIMAL`].
pub fn quadrant_holds<F: MachineFloat>(x: F, k: i64) -> bool {
    static PI_PARTS: OnceLock<(BigInt, BigInt)> = OnceLock::new();
    let (p, d) = PI_PARTS.get_or_init(|| {
        let pi = pi_rational();
        (pi.numer().clone(), pi.denom().clone())
    });
    let (neg, m, e) = float_parts(x);
    if m == 0 {
        return if neg { k == 0 } else { k == 1 };
    }
    // With x = ±m·2^e and π = p/d: compare 2·d·x against k·p, scaled to integers.
    let mut xs: BigInt = BigInt::from(m) * d * BigInt::from(2);
    if neg {
        xs = -xs;
    }
    let mut ps = p.clone();
    if e >= 0 {
        xs <<= e as u32;
    } else {
        ps <<= (-e) as u32;
    }
    let (lo, hi): (BigInt, BigInt) = (&ps * BigInt::from(k - 1), &ps * BigInt::from(k));
    lo <= xs && xs <= hi
}

/// `⌊log2 |v|⌋` of a nonzero rational.
pub fn exponent_of(v: &BigRational) -> i64 {
    let n = v.numer().abs();
    let d = v.denom().clone();
    let mut e = n.bits() as i64 - d.bits() as i64;
    let p = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as u32)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as u32)
        }
    };
    let a = BigRational::new(n, d);
    while p(e) > a {
        e -= 1;
    }
    while p(e + 1) <= a {
        e += 1;
    }
    e
}
