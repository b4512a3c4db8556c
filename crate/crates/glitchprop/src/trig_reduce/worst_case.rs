//! Exact search for floats whose quotient `x·2/π` lies close to an integer.
//!
//! Inside one binade `x = m·2^q` with consecutive integers `m`, so the
//! fractional parts `{x·2/π}` form an orbit of an irrational rotation.
//! Every quantity is kept as an integer modulo `M = 2^L`, and the minimum of
//! an orbit segment is found by inducing the rotation on `[0, A)` and
//! recursing Euclid-style, which costs `O(log n)` levels per query.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{two_over_pi_scaled, TWO_OVER_PI_SCALE};
use crate::error::{Error, Result};
use crate::float_kernel::{FloatFormat, FloatInterval, MachineFloat};
use crate::hexfloat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCase<F> {
    pub x: F,
    /// Nearest integer to `x·2/π`.
    pub k_hat: i64,
    /// `x·2/π − k̂`, rounded to nearest.
    pub delta: f64,
    pub e_x: i32,
    /// Exact `⌊log2 |Δ|⌋`.
    pub e_delta: i32,
}

impl<F: MachineFloat> WorstCase<F> {
    pub fn cancellation(&self) -> i32 {
        self.e_x - self.e_delta
    }

    /// Ranking: larger `e_x − e_Δ` first, then smaller `|Δ|`, then positive `x`.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .cancellation()
            .cmp(&self.cancellation())
            .then(self.delta.abs().total_cmp(&other.delta.abs()))
            .then(other.x.to_f64().is_sign_positive().cmp(&self.x.to_f64().is_sign_positive()))
            .then(self.x.to_f64().abs().total_cmp(&other.x.to_f64().abs()))
    }
}

#[derive(Debug, Clone, Copy)]
enum Dir {
    Up,
    Down,
}

const BRUTE_ORBIT: u64 = 32;

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn to_u64(v: &BigInt) -> u64 {
    v.to_u64().expect("orbit index fits in u64")
}

/// Minimum of `x_j = (s ± j·a) mod m` over `0 ≤ j < n`, as `(value, j)`;
/// ties go to the smallest `j`. Requires `0 ≤ s < m`, `0 ≤ a < m`, `n ≥ 1`.
fn orbit_min(s: &BigInt, a: &BigInt, m: &BigInt, n: u64, dir: Dir) -> (BigInt, u64) {
    if a.is_zero() {
        return (s.clone(), 0);
    }
    if n <= BRUTE_ORBIT {
        return brute_orbit_min(s, a, m, n, dir);
    }
    let flip = a * 2u32 > *m;
    match (dir, flip) {
        (Dir::Up, true) => orbit_min(s, &(m - a), m, n, Dir::Down),
        (Dir::Down, true) => orbit_min(s, &(m - a), m, n, Dir::Up),
        (Dir::Up, false) => up_min(s, a, m, n),
        (Dir::Down, false) => down_min(s, a, m, n),
    }
}

fn brute_orbit_min(s: &BigInt, a: &BigInt, m: &BigInt, n: u64, dir: Dir) -> (BigInt, u64) {
    let step = match dir {
        Dir::Up => a.clone(),
        Dir::Down => m - a,
    };
    let mut x = s.clone();
    let mut best = (x.clone(), 0);
    for j in 1..n {
        x += &step;
        if x >= *m {
            x -= m;
        }
        if x < best.0 {
            best = (x.clone(), j);
        }
    }
    best
}

fn up_min(s: &BigInt, a: &BigInt, m: &BigInt, n: u64) -> (BigInt, u64) {
    let inside = s < a;
    let visits = to_u64(&((s + a * big(n - 1)) / m)) + u64::from(inside);
    if visits == 0 {
        return (s.clone(), 0);
    }
    let x0 = if inside {
        s.clone()
    } else {
        let j0 = (m - s).div_ceil(a);
        s + &j0 * a - m
    };
    let r = m % a;
    let i = if r.is_zero() {
        0
    } else {
        let (_, i) = orbit_min(&x0, &r, a, visits, Dir::Down);
        i
    };
    let delta = u64::from(!inside);
    let j = (big(i + delta) * m - s).div_ceil(a);
    let v = (s + &j * a) % m;
    (v, to_u64(&j))
}

fn down_min(s: &BigInt, a: &BigInt, m: &BigInt, n: u64) -> (BigInt, u64) {
    let span = a * big(n) - s;
    let visits = if span.is_positive() {
        to_u64(&span.div_ceil(m))
    } else {
        0
    };
    let last = (s - a * big(n - 1)).mod_floor(m);
    if visits == 0 {
        return (last, n - 1);
    }
    let j0 = s / a;
    let x0 = s - &j0 * a;
    let r = m % a;
    let i = if r.is_zero() {
        0
    } else {
        let (_, i) = orbit_min(&x0, &r, a, visits, Dir::Up);
        i
    };
    let j = (s + big(i) * m) / a;
    let v = (s - &j * a).mod_floor(m);
    if last < v {
        (last, n - 1)
    } else {
        (v, to_u64(&j))
    }
}

/// One positive binade slice `x = (m_lo + j)·2^q`, `0 ≤ j < n`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    bits_lo: u64,
    m_lo: u64,
    n: u64,
    q: i32,
}

/// Integer frame of a segment: `x·2/π ≈ (m·a_full) / 2^l`.
struct Frame {
    a_full: BigInt,
    l: u32,
}

impl Frame {
    fn new(q: i32, extra: u32) -> Frame {
        let c = BigInt::from(two_over_pi_scaled());
        let mut l = TWO_OVER_PI_SCALE + extra;
        let a_full = if q >= 0 {
            c << (q as u32 + extra)
        } else {
            l += (-q) as u32;
            c << extra
        };
        Frame { a_full, l }
    }

    fn modulus(&self) -> BigInt {
        BigInt::one() << self.l
    }
}

fn segments<F: MachineFloat>(lo_bits: u64, hi_bits: u64) -> Vec<Segment> {
    let fmt = F::FORMAT;
    let mb = fmt.mantissa_bits();
    let frac_mask = (1u64 << mb) - 1;
    let mut out = Vec::new();
    let mut b = lo_bits;
    while b <= hi_bits {
        let biased = b >> mb;
        let end = (((biased + 1) << mb) - 1).min(hi_bits);
        let (lead, e_unb) = if biased == 0 {
            (0, fmt.min_exponent)
        } else {
            (1u64 << mb, biased as i32 - fmt.exponent_bias())
        };
        // |x| < 1/2 gives |x·2/π| < 1/π, so k̂ = 0
        if e_unb >= -1 {
            out.push(Segment {
                bits_lo: b,
                m_lo: lead | (b & frac_mask),
                n: end - b + 1,
                q: e_unb - mb as i32,
            });
        }
        b = end + 1;
    }
    out
}

fn make_case<F: MachineFloat>(seg: &Segment, j: u64, frame: &Frame, neg: bool) -> WorstCase<F> {
    let m = seg.m_lo + j;
    let y = big(m) * &frame.a_full;
    let modulus = frame.modulus();
    let half = &modulus >> 1u32;
    let k_hat = (&y + &half).div_floor(&modulus);
    let d = &y - &k_hat * &modulus;
    let bits = seg.bits_lo + j;
    let x_pos = F::from_bits64(bits);
    let e_x = 63 - m.leading_zeros() as i32 + seg.q;
    let (delta, e_delta) = rational_to_f64(&d, frame.l);
    let k = k_hat.to_i64().expect("quotient fits in i64");
    if neg {
        WorstCase {
            x: x_pos.neg(),
            k_hat: -k,
            delta: -delta,
            e_x,
            e_delta,
        }
    } else {
        WorstCase {
            x: x_pos,
            k_hat: k,
            delta,
            e_x,
            e_delta,
        }
    }
}

/// `d / 2^l` rounded to nearest binary64, with its exact binary exponent.
fn rational_to_f64(d: &BigInt, l: u32) -> (f64, i32) {
    if d.is_zero() {
        return (0.0, i32::MIN);
    }
    let mag = d.magnitude();
    let nbits = mag.bits() as i64;
    let (mant, shift, sticky) = if nbits > 120 {
        let sh = nbits - 120;
        let kept = mag >> sh as u64;
        let sticky = mag.trailing_zeros().unwrap_or(0) < sh as u64;
        (kept, sh, sticky)
    } else {
        (mag.clone(), 0, false)
    };
    let mant128 = mant.to_u128().expect("fits in 120 bits");
    let exp2 = shift - l as i64;
    let bits = hexfloat::round_to_format::<f64>(d.sign() == Sign::Minus, mant128, exp2, sticky);
    (f64::from_bits(bits), (nbits - 1 - l as i64) as i32)
}

fn search_segment<F: MachineFloat>(seg: &Segment, threshold: f64, neg: bool) -> Vec<WorstCase<F>> {
    let (t_int, frame) = threshold_frame(seg.q, threshold);
    let modulus = frame.modulus();
    let window = &t_int * 2u32;
    let mut found = Vec::new();
    if window >= modulus || seg.n <= 4 * BRUTE_ORBIT {
        let half = &modulus >> 1u32;
        let mut y = big(seg.m_lo) * &frame.a_full;
        for j in 0..seg.n {
            let r = (&y + &half).mod_floor(&modulus) - &half;
            if r.abs() <= t_int {
                found.push(j);
            }
            y += &frame.a_full;
        }
    } else {
        let a = frame.a_full.mod_floor(&modulus);
        let start = (big(seg.m_lo) * &frame.a_full + &t_int).mod_floor(&modulus);
        let mut stack = vec![(start, 0u64, seg.n)];
        while let Some((s, base, n)) = stack.pop() {
            if n == 0 {
                continue;
            }
            let (v, j) = orbit_min(&s, &a, &modulus, n, Dir::Up);
            if v > window {
                continue;
            }
            found.push(base + j);
            stack.push((s.clone(), base, j));
            let s2 = (&s + &a * big(j + 1)).mod_floor(&modulus);
            stack.push((s2, base + j + 1, n - j - 1));
        }
    }
    found
        .into_iter()
        .map(|j| make_case::<F>(seg, j, &frame, neg))
        .filter(|c| c.k_hat != 0)
        .collect()
}

/// `T·2^l` as an integer, extending `l` when `T` has bits below `2^−l`.
fn threshold_frame(q: i32, threshold: f64) -> (BigInt, Frame) {
    let probe = Frame::new(q, 0);
    if threshold == 0.0 {
        return (BigInt::zero(), probe);
    }
    let bits = threshold.to_bits();
    let biased = (bits >> 52) as i32;
    let (tm, te) = if biased == 0 {
        (bits & ((1 << 52) - 1), -1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), biased - 1075)
    };
    let extra = (-(te + probe.l as i32)).max(0) as u32;
    let frame = Frame::new(q, extra);
    let t = BigInt::from(tm) << (te + frame.l as i32) as u32;
    (t, frame)
}

fn split_domain<F: MachineFloat>(domain: FloatInterval<F>) -> Vec<(u64, u64, bool)> {
    let sign = F::FORMAT.sign_mask();
    let lo = domain.lo.to_bits64();
    let hi = domain.hi.to_bits64();
    let lo_neg = lo & sign != 0;
    let hi_neg = hi & sign != 0;
    let mut parts = Vec::new();
    match (lo_neg, hi_neg) {
        (true, true) => parts.push((hi & !sign, lo & !sign, true)),
        (true, false) => {
            parts.push((0, lo & !sign, true));
            parts.push((0, hi, false));
        }
        (false, false) => parts.push((lo, hi, false)),
        (false, true) => {}
    }
    parts
}

fn check_domain<F: MachineFloat>(domain: &FloatInterval<F>) -> Result<()> {
    let limit = 2f64.powi(F::FORMAT.precision_bits as i32);
    for x in [domain.lo, domain.hi] {
        if !(x.to_f64().abs() <= limit) {
            return Err(Error::Range(format!(
                "{} lies outside [-2^{p}, 2^{p}]",
                hexfloat::format(x),
                p = F::FORMAT.precision_bits
            )));
        }
    }
    Ok(())
}

/// Every `x` in `domain` with `k̂ ≠ 0` and `|x·2/π − k̂| ≤ threshold`, ranked
/// by [`WorstCase::rank_cmp`]. Binades are searched in parallel.
pub fn worst_case_search<F: MachineFloat>(
    domain: FloatInterval<F>,
    threshold: f64,
) -> Result<Vec<WorstCase<F>>> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::Domain(format!("threshold {threshold} must be finite and nonnegative")));
    }
    check_domain(&domain)?;
    let work: Vec<(Segment, bool)> = split_domain(domain)
        .into_iter()
        .flat_map(|(lo, hi, neg)| segments::<F>(lo, hi).into_iter().map(move |s| (s, neg)))
        .collect();
    let mut all: Vec<WorstCase<F>> = work
        .par_iter()
        .flat_map_iter(|(seg, neg)| search_segment::<F>(seg, threshold, *neg))
        .collect();
    all.sort_by(|a, b| a.rank_cmp(b));
    Ok(all)
}

/// The positive float of binade `e` (normal, `e ≥ −1`) with the smallest
/// `|x·2/π − k̂|`, restricted to `x ≤ limit` when given.
pub fn binade_minimum<F: MachineFloat>(e: i32, limit: Option<F>) -> Result<WorstCase<F>> {
    let fmt: FloatFormat = F::FORMAT;
    if e < -1 || e > fmt.max_exponent {
        return Err(Error::Range(format!("binade {e} outside [-1, {}]", fmt.max_exponent)));
    }
    let mb = fmt.mantissa_bits();
    let lo_bits = ((e + fmt.exponent_bias()) as u64) << mb;
    let mut hi_bits = lo_bits | ((1u64 << mb) - 1);
    if let Some(l) = limit {
        hi_bits = hi_bits.min(l.to_bits64() & !fmt.sign_mask());
    }
    if hi_bits < lo_bits {
        return Err(Error::Range(format!("binade {e} lies above the limit")));
    }
    let seg = segments::<F>(lo_bits, hi_bits)[0];
    check_domain(&FloatInterval::new(F::from_bits64(lo_bits), F::from_bits64(hi_bits))?)?;
    let frame = Frame::new(seg.q, 0);
    let modulus = frame.modulus();
    let a = frame.a_full.mod_floor(&modulus);
    let s = (big(seg.m_lo) * &frame.a_full).mod_floor(&modulus);
    let (_, j_below) = orbit_min(&s, &a, &modulus, seg.n, Dir::Up);
    let s_neg = (-&s).mod_floor(&modulus);
    let (_, j_above) = orbit_min(&s_neg, &a, &modulus, seg.n, Dir::Down);
    let c1 = make_case::<F>(&seg, j_below, &frame, false);
    let c2 = make_case::<F>(&seg, j_above, &frame, false);
    Ok(if c2.rank_cmp(&c1) == Ordering::Less { c2 } else { c1 })
}
