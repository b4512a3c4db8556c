#![allow(dead_code)]

use glitchprop::float_kernel::{self as fk, FloatInterval, MachineFloat};
use glitchprop::glitch_model::GlitchBounds;
use glitchprop::synth::{GlitchyFn, Injection, OrdinalAffine};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Monotone,
    OneGlitch,
    KGlitch,
}

pub const FAMILIES: [Family; 3] = [Family::Monotone, Family::OneGlitch, Family::KGlitch];

#[derive(Debug, Clone)]
pub struct Instance<F> {
    pub func: GlitchyFn,
    pub iv: FloatInterval<F>,
    pub family: Family,
}

impl<F: MachineFloat> Instance<F> {
    pub fn eval(&self, x: F) -> F {
        self.func.eval(x)
    }

    pub fn inverse(&self, y: F) -> F {
        self.func.base.inverse(y)
    }
}

/// Ordinal in the middle eighth of the finite range, so slopes up to 4
/// keep images finite.
pub fn random_center<F: MachineFloat, R: Rng>(rng: &mut R) -> i64 {
    let m = fk::max_ordinal::<F>() / 8;
    rng.gen_range(-m..=m)
}

/// Isotonic slope in `[1/4, 4]`, anchored so images stay near `center`.
pub fn random_base<R: Rng>(rng: &mut R, center: i64) -> OrdinalAffine {
    let num = rng.gen_range(1..=4i64);
    let den = rng.gen_range(1..=4i64);
    let scaled = (center as i128 * num as i128).div_euclid(den as i128) as i64;
    let offset = center - scaled + rng.gen_range(-1000..=1000);
    OrdinalAffine::new(num, den, offset).unwrap()
}

/// Up to `k` separated dips with starts in `(lo, hi]`; each has at least
/// one point exactly `depth` below.
pub fn random_injections<R: Rng>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    k: usize,
    max_width: u64,
    max_depth: u64,
) -> Vec<Injection> {
    let mut out: Vec<Injection> = Vec::new();
    if hi - lo < 1 {
        return out;
    }
    let mut starts: Vec<i64> = (0..k).map(|_| rng.gen_range(lo + 1..=hi)).collect();
    starts.sort_unstable();
    starts.dedup();
    for (i, &s) in starts.iter().enumerate() {
        if out.last().is_some_and(|p| s <= p.end() + 1) {
            continue;
        }
        let limit = starts.get(i + 1).map_or(hi, |n| n - 2);
        if limit < s {
            continue;
        }
        let w = rng.gen_range(1..=max_width).min((limit - s + 1) as u64);
        let depth = rng.gen_range(1..=max_depth);
        let mut drops: Vec<u64> = (0..w).map(|_| rng.gen_range(1..=depth)).collect();
        let j = rng.gen_range(0..w as usize);
        drops[j] = depth;
        out.push(Injection { start: s, drops });
    }
    out
}

pub fn random_instance<F: MachineFloat, R: Rng>(rng: &mut R, family: Family, max_log_count: u32) -> Instance<F> {
    let center = random_center::<F, R>(rng);
    let log = rng.gen_range(0.0..=max_log_count as f64);
    let n = (2f64.powf(log) as i64).max(1);
    let (lo, hi) = (center, center + n - 1);
    let base = random_base(rng, center);
    let inj = match family {
        Family::Monotone => Vec::new(),
        Family::OneGlitch => random_injections(rng, lo, hi, 1, 12, 12),
        Family::KGlitch => {
            let k = rng.gen_range(2..=8);
            random_injections(rng, lo, hi, k, 40, 200)
        }
    };
    Instance {
        func: GlitchyFn::new(base, inj).unwrap(),
        iv: FloatInterval::new(fk::from_ordinal(lo), fk::from_ordinal(hi)).unwrap(),
        family,
    }
}

pub fn random_point<F: MachineFloat, R: Rng>(rng: &mut R, iv: &FloatInterval<F>) -> F {
    fk::from_ordinal(rng.gen_range(fk::ordinal(iv.lo)..=fk::ordinal(iv.hi)))
}

fn nudge<F: MachineFloat>(v: F, d: i64) -> F {
    let m = fk::max_ordinal::<F>();
    fk::from_ordinal((fk::ordinal(v) + d).clamp(-m - 1, m))
}

/// Mostly attainable targets, with near misses and out-of-range values.
pub fn random_y<F: MachineFloat, R: Rng>(rng: &mut R, f: &dyn Fn(F) -> F, iv: &FloatInterval<F>) -> F {
    match rng.gen_range(0..8) {
        0..=3 => f(random_point(rng, iv)),
        4 | 5 => nudge(f(random_point(rng, iv)), rng.gen_range(-3..=3)),
        6 => nudge(f(iv.lo), -rng.gen_range(0..=300)),
        _ => nudge(f(iv.hi), rng.gen_range(0..=300)),
    }
}

/// Sometimes loosen surveyed bounds; looser bounds must stay sound.
pub fn maybe_inflate<F: MachineFloat, R: Rng>(rng: &mut R, g: GlitchBounds<F>, iv: &FloatInterval<F>) -> GlitchBounds<F> {
    if rng.gen_range(0..4) != 0 {
        return g;
    }
    if g.n_g == 0 {
        return g;
    }
    GlitchBounds {
        n_g: g.n_g + rng.gen_range(0..3),
        d_m: g.d_m + rng.gen_range(0..5),
        w_m: g.w_m + rng.gen_range(0..5),
        alpha: if rng.gen_bool(0.5) { iv.lo } else { g.alpha },
        omega: if rng.gen_bool(0.5) { iv.hi } else { g.omega },
    }
}

pub fn log2_count(n: u64) -> f64 {
    (n as f64).log2()
}
