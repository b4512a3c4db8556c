//! Inverse propagation for sine-, cosine- and tangent-like functions.
//!
//! The domain is cut at the π/2 multiples where the function changes
//! tonicity; every piece is refined with [`refine_core`] (antitonic pieces
//! through `−f`), and at most `g` sub-results are returned.

use crate::error::{Error, Result};
use crate::float_kernel::{self as fk, le, lt, FloatInterval, MachineFloat};
use crate::glitch_model::{GlitchBounds, MonotoneClass};
use crate::hexfloat;
use crate::refine_core::{self, BoundResult, RefineParams};
use crate::trig_reduce::{div_pio2_up, pio2_mult_down, pio2_mult_up, ReductionConfig};

/// Where the monotonicity changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeriodClass {
    /// Even multiples of π/2 (cosine).
    EvenV,
    /// Odd multiples of π/2 (sine).
    OddV,
    /// Poles at odd multiples of π/2, isotonic in between (tangent).
    OddC,
}

impl PeriodClass {
    pub fn name(&self) -> &'static str {
        match self {
            PeriodClass::EvenV => "even_v",
            PeriodClass::OddV => "odd_v",
            PeriodClass::OddC => "odd_c",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "even_v" => Some(PeriodClass::EvenV),
            "odd_v" => Some(PeriodClass::OddV),
            "odd_c" => Some(PeriodClass::OddC),
            _ => None,
        }
    }
}

/// Smallest `k ≥ k0` at which `p` changes tonicity.
pub fn geq_tonicity_change(p: PeriodClass, k0: i64) -> i64 {
    let want_odd = p != PeriodClass::EvenV;
    if (k0.rem_euclid(2) == 1) == want_odd {
        k0
    } else {
        k0 + 1
    }
}

/// Whether the branch ending at `k·π/2` is isotonic.
pub fn quasi_isotonic(k: i64, p: PeriodClass) -> bool {
    let m = k.rem_euclid(4);
    match p {
        PeriodClass::EvenV => m == 0 || m == 3,
        PeriodClass::OddV => m == 1 || m == 2,
        PeriodClass::OddC => true,
    }
}

/// Floats of branch `k`: `[↑((k−2)·π/2), ↓(k·π/2)]`, clipped to `±l_max`.
pub fn branch_interval<F: MachineFloat>(k: i64, cfg: &ReductionConfig<F>) -> Result<FloatInterval<F>> {
    let lo = match pio2_mult_up(k - 2, cfg) {
        Ok(v) => v,
        Err(Error::Range(_)) => cfg.l_max.neg(),
        Err(e) => return Err(e),
    };
    let hi = match pio2_mult_down(k, cfg) {
        Ok(v) => v,
        Err(Error::Range(_)) => cfg.l_max,
        Err(e) => return Err(e),
    };
    FloatInterval::new(lo, hi)
}

pub struct TrigQuery<'a, F> {
    pub f: &'a dyn Fn(F) -> F,
    pub f_inv: &'a dyn Fn(F) -> F,
    pub pclass: PeriodClass,
    pub y: FloatInterval<F>,
    pub x: FloatInterval<F>,
    /// Uniform per-branch glitch data.
    pub glitch: GlitchBounds<F>,
    pub g: u32,
    pub s: u64,
    pub t: u64,
    pub cfg: ReductionConfig<F>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigSubResult<F> {
    pub x_lo: F,
    pub x_hi: F,
    pub l: F,
    pub r_l: u8,
    pub u: F,
    pub r_u: u8,
    pub k: i64,
}

impl<F: MachineFloat> TrigSubResult<F> {
    pub fn interval(&self) -> FloatInterval<F> {
        FloatInterval {
            lo: self.x_lo,
            hi: self.x_hi,
        }
    }
}

fn check_branch<F: MachineFloat>(q: &TrigQuery<F>, iv: &FloatInterval<F>, k: i64) -> Result<()> {
    if geq_tonicity_change(q.pclass, k) != k {
        return Err(Error::Contract(format!(
            "k = {k} is not a tonicity change of {}",
            q.pclass.name()
        )));
    }
    let b = branch_interval(k, &q.cfg)?;
    if lt(iv.lo, b.lo) || lt(b.hi, iv.hi) {
        return Err(Error::Contract(format!("{iv} straddles a tonicity change of branch {k} {b}")));
    }
    Ok(())
}

fn negated<'a, F: MachineFloat>(f: &'a dyn Fn(F) -> F) -> impl Fn(F) -> F + 'a {
    move |x| f(x).neg()
}

/// Lower bound over one branch; antitonic branches are solved for `−f = −y_u`.
pub fn branch_lb<F: MachineFloat>(q: &TrigQuery<F>, iv: FloatInterval<F>, k: i64) -> Result<BoundResult<F>> {
    check_branch(q, &iv, k)?;
    let glitch = q.glitch.restrict(&iv);
    if quasi_isotonic(k, q.pclass) {
        let params = RefineParams {
            glitch,
            s: q.s,
            t: q.t,
            f_inv: q.f_inv,
        };
        refine_core::lower_bound(q.f, q.y.lo, iv, &params)
    } else {
        let nf = negated(q.f);
        let inv = |v: F| (q.f_inv)(v.neg());
        let params = RefineParams {
            glitch,
            s: q.s,
            t: q.t,
            f_inv: &inv,
        };
        refine_core::lower_bound(&nf, q.y.hi.neg(), iv, &params)
    }
}

/// Upper bound over one branch; antitonic branches are solved for `−f = −y_l`.
pub fn branch_ub<F: MachineFloat>(q: &TrigQuery<F>, iv: FloatInterval<F>, k: i64) -> Result<BoundResult<F>> {
    check_branch(q, &iv, k)?;
    let glitch = q.glitch.restrict(&iv);
    if quasi_isotonic(k, q.pclass) {
        let params = RefineParams {
            glitch,
            s: q.s,
            t: q.t,
            f_inv: q.f_inv,
        };
        refine_core::upper_bound(q.f, q.y.hi, iv, &params)
    } else {
        let nf = negated(q.f);
        let inv = |v: F| (q.f_inv)(v.neg());
        let params = RefineParams {
            glitch,
            s: q.s,
            t: q.t,
            f_inv: &inv,
        };
        refine_core::upper_bound(&nf, q.y.lo.neg(), iv, &params)
    }
}

fn iv<F: MachineFloat>(lo: F, hi: F) -> Result<FloatInterval<F>> {
    FloatInterval::new(lo, hi)
}

/// Split `q.x` into at most `q.g` sub-intervals and refine both ends of each.
pub fn compute_bounds_trig<F: MachineFloat>(q: &TrigQuery<F>) -> Result<Vec<TrigSubResult<F>>> {
    if q.g == 0 {
        return Err(Error::Contract("g must be positive".into()));
    }
    q.cfg.validate()?;
    q.glitch.check_within(&q.x)?;
    let (x_l, x_u) = (q.x.lo, q.x.hi);
    let cfg = &q.cfg;
    let down = |k: i64| pio2_mult_down(k, cfg);
    let up = |k: i64| pio2_mult_up(k, cfg);
    let k_l = geq_tonicity_change(q.pclass, div_pio2_up(x_l, cfg)?);
    let k_u = geq_tonicity_change(q.pclass, div_pio2_up(x_u, cfg)?);
    let mut k_c: i64 = if q.pclass == PeriodClass::EvenV { 0 } else { -1 };
    let g = i64::from(q.g);
    let (g_l, mut g_r) = if g == 1 {
        k_c = k_u;
        (1, 0)
    } else if le(x_u, down(k_c)?) {
        (g, 0)
    } else if le(up(k_c)?, x_l) {
        (0, g)
    } else {
        (g / 2, g - g / 2)
    };
    let mut out: Vec<TrigSubResult<F>> = Vec::new();
    let mut cur_hi = x_l;
    if g_l > 0 {
        let lb_hi = fk::min(x_u, down(k_l)?);
        let lb = branch_lb(q, iv(x_l, lb_hi)?, k_l)?;
        let k_lu = k_u.min(k_c);
        let k = k_l.max(k_lu - 2 * (g_l - 1));
        let (mut l, mut r_l) = (lb.value, lb.status);
        if r_l == 0 && k_l < k {
            l = lb_hi;
            r_l = 2;
        }
        let c_xl = fk::max(x_l, up(k - 2)?);
        let hi = fk::min(x_u, down(k)?);
        let ub = branch_ub(q, iv(c_xl, hi)?, k)?;
        let (mut u, mut r_u) = (ub.value, ub.status);
        if r_u == 5 && k_l < k {
            u = c_xl;
            r_u = 7;
        }
        out.push(TrigSubResult {
            x_lo: x_l,
            x_hi: hi,
            l,
            r_l,
            u,
            r_u,
            k,
        });
        cur_hi = hi;
        let mut k = k + 2;
        while k <= k_lu {
            let lo = fk::succ(cur_hi)?;
            let hi = fk::min(down(k)?, x_u);
            out.push(single_branch(q, lo, hi, k)?);
            cur_hi = hi;
            k += 2;
        }
    }
    if g_r > 0 {
        let mut k = k_l.max(k_c + 2);
        let mut hi = if g_l > 0 { cur_hi } else { fk::max(fk::pred(x_l)?, down(k - 2)?) };
        while k < k_u && g_r > 1 {
            let lo = fk::succ(hi)?;
            hi = fk::min(x_u, down(k)?);
            out.push(single_branch(q, lo, hi, k)?);
            k += 2;
            g_r -= 1;
        }
        let lo = fk::succ(hi)?;
        let lb_hi = fk::min(x_u, down(k)?);
        let lb = branch_lb(q, iv(lo, lb_hi)?, k)?;
        let (mut l, mut r_l) = (lb.value, lb.status);
        if r_l == 0 && k < k_u {
            l = lb_hi;
            r_l = 2;
        }
        let c_xl = fk::max(x_l, up(k_u - 2)?);
        let ub = branch_ub(q, iv(c_xl, x_u)?, k_u)?;
        let (mut u, mut r_u) = (ub.value, ub.status);
        if r_u == 5 && k < k_u {
            u = c_xl;
            r_u = 7;
        }
        out.push(TrigSubResult {
            x_lo: lo,
            x_hi: x_u,
            l,
            r_l,
            u,
            r_u,
            k: k_u,
        });
    }
    check_tiling(&q.x, &out, q.g)?;
    Ok(out)
}

fn single_branch<F: MachineFloat>(q: &TrigQuery<F>, lo: F, hi: F, k: i64) -> Result<TrigSubResult<F>> {
    let b = iv(lo, hi)?;
    let lb = branch_lb(q, b, k)?;
    let ub = branch_ub(q, b, k)?;
    Ok(TrigSubResult {
        x_lo: lo,
        x_hi: hi,
        l: lb.value,
        r_l: lb.status,
        u: ub.value,
        r_u: ub.status,
        k,
    })
}

fn check_tiling<F: MachineFloat>(x: &FloatInterval<F>, out: &[TrigSubResult<F>], g: u32) -> Result<()> {
    let broken = |why: &str| Err(Error::Contract(format!("sub-results of {x}: {why}")));
    if out.is_empty() || out.len() > g as usize {
        return broken("wrong count");
    }
    if !fk::same(out[0].x_lo, x.lo) || !fk::same(out[out.len() - 1].x_hi, x.hi) {
        return broken("ends do not match");
    }
    for w in out.windows(2) {
        if fk::distance(w[0].x_hi, w[1].x_lo) != 1 {
            return broken(&format!(
                "gap or overlap at {} / {}",
                hexfloat::format(w[0].x_hi),
                hexfloat::format(w[1].x_lo)
            ));
        }
    }
    Ok(())
}

/// Hull of [`refine_core::direct_image`] over the monotonic pieces of `iv`.
pub fn trig_direct_image<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    pclass: PeriodClass,
    iv: FloatInterval<F>,
    glitch: &GlitchBounds<F>,
    cfg: &ReductionConfig<F>,
) -> Result<FloatInterval<F>> {
    let pieces = crate::glitch_model::quasi_monotone_split(pclass, iv, cfg)?;
    let mut hull: Option<FloatInterval<F>> = None;
    for (piece, class) in pieces {
        let g = glitch.restrict(&piece);
        let class = if pclass == PeriodClass::OddC {
            MonotoneClass::Isotonic
        } else {
            class
        };
        let e = refine_core::direct_image(f, piece, &g, class)?;
        hull = Some(match hull {
            None => e,
            Some(h) => FloatInterval {
                lo: fk::min(h.lo, e.lo),
                hi: fk::max(h.hi, e.hi),
            },
        });
    }
    hull.ok_or_else(|| Error::Contract("empty split".into()))
}
