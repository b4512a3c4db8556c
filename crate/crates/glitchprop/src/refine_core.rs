//! Inverse propagation for quasi-isotonic functions.
//!
//! [`upper_bound`] finds the tightest `u` such that no solution of
//! `f(x) = y` lies right of it within `[x_l, x_u]`; [`lower_bound`] is its
//! mirror, obtained by running the upper-bound machinery on `x ↦ -f(-x)`.
//!
//! Status codes and the predicate each one guarantees (upper side):
//!
//! | r | predicate |
//! |---|-----------|
//! | 5 | `∀x∈[x_l,x_u]: f(x) ≻ y` |
//! | 6 | `∀x∈[u,x_u]: f(x) ≺ y` |
//! | 7 | `∀x∈[u,x_u]: f(x) ≻ y` |
//! | 8 | `f(pred u) ≺ y ∧ ∀x∈[u,x_u]: f(x) ≻ y` |
//! | 9 | `f(u) = y ∧ ∀x∈(u,x_u]: f(x) ≻ y` |
//!
//! Lower statuses 0..=4 are the same table read through the reflection:
//! `<` and `>` swap and `[u, x_u]` becomes `[x_l, l]`.
//!
//! Glitch bounds for the upper side must dominate the forward reading of
//! `f`'s glitches; for the lower side they must dominate the mirrored reading
//! (see [`crate::glitch_model`]).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::float_kernel::{
    count, from_ordinal, gt_by, le, lt, lt_by, ordinal, same, split_point, FloatInterval,
    MachineFloat,
};
use crate::glitch_model::{GlitchBounds, MonotoneClass};
use crate::hexfloat;

#[derive(Clone, Copy)]
pub struct RefineParams<'a, F> {
    pub glitch: GlitchBounds<F>,
    /// Maximum number of `logsearch_ub` invocations.
    pub s: u64,
    /// Maximum number of linear-search steps.
    pub t: u64,
    /// Rough inverse of `f`, used only to seed the gallop.
    pub f_inv: &'a dyn Fn(F) -> F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult<F> {
    pub value: F,
    pub status: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CallBudgetReport {
    /// Distinct points at which `f` was evaluated.
    pub f_calls: u64,
    pub interval_size: u64,
}

impl CallBudgetReport {
    /// `2·log₂(#) + 4`.
    pub fn monotone_ceiling(&self) -> f64 {
        2.0 * (self.interval_size as f64).log2() + 4.0
    }

    /// `(w_M + 1)·log₂(#) + 8`.
    pub fn narrow_glitch_ceiling(&self, w_m: u64) -> f64 {
        (w_m as f64 + 1.0) * (self.interval_size as f64).log2() + 8.0
    }

    /// `(s + 2)·log₂(#) − s + t + 7`.
    pub fn general_ceiling(&self, s: u64, t: u64) -> f64 {
        (s as f64 + 2.0) * (self.interval_size as f64).log2() - s as f64 + t as f64 + 7.0
    }
}

/// Memoizing evaluator of `f`, optionally viewed through `x ↦ -f(-x)`.
pub struct Probe<'a, F> {
    f: &'a dyn Fn(F) -> F,
    mirrored: bool,
    memo: HashMap<i64, F>,
}

impl<'a, F: MachineFloat> Probe<'a, F> {
    pub fn new(f: &'a dyn Fn(F) -> F) -> Self {
        Probe {
            f,
            mirrored: false,
            memo: HashMap::new(),
        }
    }

    /// Evaluates `x ↦ -f(-x)`.
    pub fn mirrored(f: &'a dyn Fn(F) -> F) -> Self {
        Probe {
            mirrored: true,
            ..Probe::new(f)
        }
    }

    pub fn calls(&self) -> u64 {
        self.memo.len() as u64
    }

    pub fn eval(&mut self, x: F) -> Result<F> {
        let o = ordinal(x);
        if let Some(v) = self.memo.get(&o) {
            return Ok(*v);
        }
        let v = if self.mirrored {
            (self.f)(x.neg()).neg()
        } else {
            (self.f)(x)
        };
        if v.is_nan() {
            let at = if self.mirrored { x.neg() } else { x };
            return Err(Error::DomainHole {
                x: hexfloat::format(at),
            });
        }
        self.memo.insert(o, v);
        Ok(v)
    }
}

fn fsucc<F: MachineFloat>(x: F) -> F {
    from_ordinal(ordinal(x) + 1)
}

fn fpred<F: MachineFloat>(x: F) -> F {
    from_ordinal(ordinal(x) - 1)
}

/// `x` moved by `d` steps, clamped to `[lo, hi]`.
fn step_in<F: MachineFloat>(x: F, d: i128, lo: F, hi: F) -> F {
    let o = (ordinal(x) as i128 + d).clamp(ordinal(lo) as i128, ordinal(hi) as i128);
    from_ordinal(o as i64)
}

fn check_y<F: MachineFloat>(y: F) -> Result<()> {
    if y.is_nan() {
        return Err(Error::Domain("target value y is NaN".into()));
    }
    Ok(())
}

fn contract(msg: &str) -> Error {
    Error::Contract(msg.to_string())
}

/// `distance(α, ω) ≤ t`.
fn window_within<F: MachineFloat>(g: &GlitchBounds<F>, t: u64) -> bool {
    !gt_by(g.omega, g.alpha, t)
}

/// `f_inv(y)` clamped to `iv`; a NaN hint falls back to the ordinal midpoint.
pub fn init<F: MachineFloat>(y: F, iv: FloatInterval<F>, f_inv: &dyn Fn(F) -> F) -> F {
    let i = f_inv(y);
    if i.is_nan() {
        return match split_point(iv.lo, iv.hi) {
            Ok(m) => m,
            Err(_) => iv.lo,
        };
    }
    if lt(i, iv.lo) {
        iv.lo
    } else if lt(iv.hi, i) {
        iv.hi
    } else {
        i
    }
}

/// Galloping search from `i`. On return `x_l ⪯ lo ⪯ hi ⪯ x_u`,
/// `x_l ≺ lo ⇒ f(lo) ⪯ y` and `hi ≺ x_u ⇒ f(hi) ≻_{d_M} y`.
pub fn gallop_ub<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    d_m: u64,
    i: F,
) -> Result<(F, F)> {
    check_y(y)?;
    if !iv.contains(i) {
        return Err(contract("gallop start outside the interval"));
    }
    let fi = p.eval(i)?;
    if gt_by(fi, y, d_m) {
        // hi = i; walk left until f ⪯ y.
        let mut hi = i;
        let mut d: i128 = 1;
        loop {
            if same(hi, iv.lo) {
                return Ok((iv.lo, hi));
            }
            let c = step_in(i, -d, iv.lo, iv.hi);
            let fc = p.eval(c)?;
            if le(fc, y) {
                return Ok((c, hi));
            }
            if gt_by(fc, y, d_m) {
                hi = c;
            }
            if same(c, iv.lo) {
                return Ok((iv.lo, hi));
            }
            d *= 2;
        }
    }
    let mut lo = if le(fi, y) { i } else { iv.lo };
    let mut d: i128 = 1;
    loop {
        if same(i, iv.hi) {
            return Ok((lo, iv.hi));
        }
        let c = step_in(i, d, iv.lo, iv.hi);
        let fc = p.eval(c)?;
        if gt_by(fc, y, d_m) {
            return Ok((lo, c));
        }
        if le(fc, y) {
            lo = c;
        }
        if same(c, iv.hi) {
            return Ok((lo, iv.hi));
        }
        d *= 2;
    }
}

/// Backward scan from `x_u` over at most `v = min(t, w_M)` further floats,
/// looking for `f ⪰ y`. Returns `(1, hit, x̂)` or `(0, x̂, x̂)`.
pub fn linsearch_geq<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    w_m: u64,
    t: u64,
) -> Result<(u8, F, F)> {
    check_y(y)?;
    let v = t.min(w_m);
    let x_hat = step_in(iv.hi, -(v as i128), iv.lo, iv.hi);
    let mut x = iv.hi;
    loop {
        if le(y, p.eval(x)?) {
            return Ok((1, x, x_hat));
        }
        if same(x, x_hat) {
            return Ok((0, x_hat, x_hat));
        }
        x = fpred(x);
    }
}

/// Backward scan of `[x̂, s_u]`, `x̂ = max(s_l, pred^{w_M}(s_u))`, looking for
/// `f ⪯ y`. Returns `(1, hit)` or `(0, x̂)`; an empty range yields `(0, s_l)`.
pub fn linsearch_leq<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    w_m: u64,
    s_l: F,
    s_u: F,
) -> Result<(u8, F)> {
    check_y(y)?;
    if lt(s_u, s_l) {
        return Ok((0, s_l));
    }
    let x_hat = step_in(s_u, -(w_m as i128), s_l, s_u);
    let mut x = s_u;
    loop {
        if le(p.eval(x)?, y) {
            return Ok((1, x));
        }
        if same(x, x_hat) {
            return Ok((0, x_hat));
        }
        x = fpred(x);
    }
}

/// Case analysis when `f(x_u) ≺ y`; the result always satisfies `p_6`.
pub fn findhi_ub<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    t: u64,
) -> Result<F> {
    check_y(y)?;
    g.check_within(&iv)?;
    let fxu = p.eval(iv.hi)?;
    if !lt(fxu, y) {
        return Err(contract("findhi_ub requires f(x_u) ≺ y"));
    }
    if g.n_g == 0 || lt(g.omega, iv.hi) || gt_by(y, fxu, g.d_m) {
        return Ok(iv.lo);
    }
    if g.n_g == 1 {
        let a_plus = step_in(g.alpha, 1, iv.lo, iv.hi);
        let wide = g.w_m > t;
        let enter = wide || {
            let fa = p.eval(g.alpha)?;
            lt(p.eval(a_plus)?, fa) && le(fa, y)
        };
        if enter {
            let fa = p.eval(g.alpha)?;
            if lt(y, fa) || le(fa, p.eval(a_plus)?) {
                return Ok(iv.hi);
            } else if same(y, fa) {
                return Ok(a_plus);
            } else {
                return Ok(iv.lo);
            }
        }
    }
    let (b, hi, x_hat) = linsearch_geq(p, y, iv, g.w_m, t)?;
    if b == 1 {
        Ok(fsucc(hi))
    } else if t >= g.w_m {
        Ok(iv.lo)
    } else {
        Ok(x_hat)
    }
}

/// Searches the single glitch between `m` and `hi` for a point with `f ⪯ y`.
pub fn check_glitch<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    t: u64,
    lo: F,
    m: F,
    hi: F,
) -> Result<(u8, F)> {
    check_y(y)?;
    g.check_within(&iv)?;
    if g.n_g == 0 {
        return Err(contract("check_glitch requires n_g > 0"));
    }
    if !(le(iv.lo, lo) && le(lo, m) && le(m, hi) && le(hi, iv.hi)) {
        return Err(contract("check_glitch requires x_l ⪯ lo ⪯ m ⪯ hi ⪯ x_u"));
    }
    if !(lt(y, p.eval(m)?) && lt(y, p.eval(hi)?)) {
        return Err(contract("check_glitch requires f(m) ≻ y and f(hi) ≻ y"));
    }
    if g.n_g != 1 || g.w_m > t {
        return Ok((2, hi));
    }
    let omega_rises = |p: &mut Probe<F>| -> Result<bool> {
        let om = step_in(g.omega, -1, iv.lo, iv.hi);
        Ok(lt(p.eval(om)?, p.eval(g.omega)?))
    };
    let alpha_falls = |p: &mut Probe<F>| -> Result<bool> {
        let ap = step_in(g.alpha, 1, iv.lo, iv.hi);
        Ok(lt(p.eval(ap)?, p.eval(g.alpha)?))
    };
    let s_u = if window_within(g, t) || omega_rises(p)? {
        crate::float_kernel::min(g.omega, hi)
    } else if alpha_falls(p)? {
        crate::float_kernel::min(step_in(g.alpha, g.w_m as i128, iv.lo, iv.hi), hi)
    } else {
        return Ok((2, hi));
    };
    let s_l = crate::float_kernel::max(g.alpha, lo);
    linsearch_leq(p, y, g.w_m, s_l, s_u)
}

/// Bisection for `logsearch_ub`: returns `z ∈ [mid, hi]` with
/// `z ≺ hi ⇒ f(z) ≻_{d_M} y`, or `hi` when the budget is spent.
pub fn logsearch_ub<F: MachineFloat>(
    p: &mut Probe<F>,
    d_m: u64,
    mid: F,
    hi: F,
    y: F,
    s_budget: &mut u64,
) -> Result<F> {
    check_y(y)?;
    if !lt(mid, hi) {
        return Err(contract("logsearch_ub requires mid ≺ hi"));
    }
    if *s_budget == 0 {
        return Ok(hi);
    }
    *s_budget -= 1;
    if gt_by(p.eval(mid)?, y, d_m) {
        return Ok(mid);
    }
    let (mut a, mut b) = (mid, hi);
    while gt_by(b, a, 1) {
        let c = split_point(a, b)?;
        if gt_by(p.eval(c)?, y, d_m) {
            b = c;
        } else {
            a = c;
        }
    }
    Ok(b)
}

/// Bisection keeping `f(lo) ⪯ y ≺ f(hi)` and `∀x∈[hi,x_u]: f(x) ≻ y`.
#[allow(clippy::too_many_arguments)]
pub fn bisect_ub<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    s: u64,
    t: u64,
    lo: F,
    hi: F,
) -> Result<F> {
    check_y(y)?;
    g.check_within(&iv)?;
    if !(le(iv.lo, lo) && lt(lo, hi) && le(hi, iv.hi)) {
        return Err(contract("bisect_ub requires x_l ⪯ lo ≺ hi ⪯ x_u"));
    }
    if !(le(p.eval(lo)?, y) && lt(y, p.eval(hi)?)) {
        return Err(contract("bisect_ub requires f(lo) ⪯ y ≺ f(hi)"));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut budget = s;
    while gt_by(hi, lo, 1) {
        let mid = split_point(lo, hi)?;
        let fm = p.eval(mid)?;
        if le(fm, y) {
            lo = mid;
        } else if g.n_g == 0 || le(hi, g.alpha) || le(g.omega, mid) || lt_by(y, fm, g.d_m) {
            hi = mid;
        } else {
            let (b, z) = check_glitch(p, y, iv, g, t, lo, mid, hi)?;
            match b {
                0 => hi = mid,
                1 => {
                    hi = fsucc(z);
                    break;
                }
                _ => {
                    let z = logsearch_ub(p, g.d_m, mid, hi, y, &mut budget)?;
                    if lt(z, hi) {
                        hi = z;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    Ok(hi)
}

/// Upper bound for `f(x) = y` over `iv`.
pub fn upper_bound<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
    params: &RefineParams<F>,
) -> Result<BoundResult<F>> {
    upper_bound_counted(f, y, iv, params).map(|(r, _)| r)
}

pub fn upper_bound_counted<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
    params: &RefineParams<F>,
) -> Result<(BoundResult<F>, CallBudgetReport)> {
    let mut p = Probe::new(f);
    let r = upper_bound_with(&mut p, y, iv, &params.glitch, params.s, params.t, params.f_inv)?;
    Ok((
        r,
        CallBudgetReport {
            f_calls: p.calls(),
            interval_size: iv.count(),
        },
    ))
}

/// Lower bound for `f(x) = y` over `iv`: the mirror of [`upper_bound`].
pub fn lower_bound<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
    params: &RefineParams<F>,
) -> Result<BoundResult<F>> {
    lower_bound_counted(f, y, iv, params).map(|(r, _)| r)
}

pub fn lower_bound_counted<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    y: F,
    iv: FloatInterval<F>,
    params: &RefineParams<F>,
) -> Result<(BoundResult<F>, CallBudgetReport)> {
    check_y(y)?;
    let mut p = Probe::mirrored(f);
    let inv = |v: F| (params.f_inv)(v.neg()).neg();
    let r = upper_bound_with(
        &mut p,
        y.neg(),
        iv.reflect(),
        &params.glitch.reflect(),
        params.s,
        params.t,
        &inv,
    )?;
    Ok((
        BoundResult {
            value: r.value.neg(),
            status: r.status - 5,
        },
        CallBudgetReport {
            f_calls: p.calls(),
            interval_size: iv.count(),
        },
    ))
}

/// [`upper_bound`] over an explicit evaluator.
pub fn upper_bound_with<F: MachineFloat>(
    p: &mut Probe<F>,
    y: F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    s: u64,
    t: u64,
    f_inv: &dyn Fn(F) -> F,
) -> Result<BoundResult<F>> {
    check_y(y)?;
    g.check_within(&iv)?;
    let done = |value, status| Ok(BoundResult { value, status });
    let i = init(y, iv, f_inv);
    let (lo, hi) = gallop_ub(p, y, iv, g.d_m, i)?;
    let fhi = p.eval(hi)?;
    if lt(fhi, y) {
        return done(findhi_ub(p, y, iv, g, t)?, 6);
    } else if same(fhi, y) {
        return done(hi, 9);
    }
    if lt(y, p.eval(lo)?) {
        if g.n_g == 0 || gt_by(p.eval(g.alpha)?, y, g.d_m) {
            return done(iv.lo, 5);
        }
        let (b, z) = check_glitch(p, y, iv, g, t, lo, lo, hi)?;
        return match b {
            0 => done(iv.lo, 5),
            1 if same(p.eval(z)?, y) => done(z, 9),
            1 => done(fsucc(z), 8),
            _ => done(crate::float_kernel::min(g.omega, hi), 7),
        };
    }
    let mut hi = bisect_ub(p, y, iv, g, s, t, lo, hi)?;
    let mut t = t;
    while lt(y, p.eval(fpred(hi))?) && t > 0 {
        hi = fpred(hi);
        t -= 1;
    }
    let fp = p.eval(fpred(hi))?;
    if lt(fp, y) {
        done(hi, 8)
    } else if same(fp, y) {
        done(fpred(hi), 9)
    } else {
        done(hi, 7)
    }
}

/// The lower-side helpers are the upper-side ones run on `x ↦ -f(-x)`;
/// these wrappers take and return values in `f`'s own coordinates.
pub mod lower {
    use super::*;

    /// Mirror of [`gallop_ub`]: `lo ≻ x_l ⇒ f(lo) ≺_{d_M} y`,
    /// `hi ≺ x_u ⇒ f(hi) ⪰ y`.
    pub fn gallop_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        iv: FloatInterval<F>,
        d_m: u64,
        i: F,
    ) -> Result<(F, F)> {
        let mut p = Probe::mirrored(f);
        let (lo, hi) = gallop_ub(&mut p, y.neg(), iv.reflect(), d_m, i.neg())?;
        Ok((hi.neg(), lo.neg()))
    }

    /// Mirror of [`findhi_ub`]; requires `f(x_l) ≻ y` and satisfies `p_1`.
    pub fn findlo_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        iv: FloatInterval<F>,
        g: &GlitchBounds<F>,
        t: u64,
    ) -> Result<F> {
        let mut p = Probe::mirrored(f);
        findhi_ub(&mut p, y.neg(), iv.reflect(), &g.reflect(), t).map(|u| u.neg())
    }

    /// Mirror of [`linsearch_leq`]: forward scan of `[s_l, x̂]`,
    /// `x̂ = min(s_u, succ^{w_M}(s_l))`, for the first `f ⪰ y`.
    pub fn findfmax<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        w_m: u64,
        s_l: F,
        s_u: F,
    ) -> Result<(u8, F)> {
        let mut p = Probe::mirrored(f);
        linsearch_leq(&mut p, y.neg(), w_m, s_u.neg(), s_l.neg()).map(|(b, z)| (b, z.neg()))
    }

    /// Mirror of [`linsearch_geq`]: forward scan from `x_l` for `f ⪯ y`.
    pub fn linsearch_leq_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        iv: FloatInterval<F>,
        w_m: u64,
        t: u64,
    ) -> Result<(u8, F, F)> {
        let mut p = Probe::mirrored(f);
        linsearch_geq(&mut p, y.neg(), iv.reflect(), w_m, t)
            .map(|(b, lo, x_hat)| (b, lo.neg(), x_hat.neg()))
    }

    /// Mirror of [`check_glitch`] with `hi ⪯ m ⪯ hi'` read as `lo ⪯ m ⪯ hi`.
    #[allow(clippy::too_many_arguments)]
    pub fn check_glitch_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        iv: FloatInterval<F>,
        g: &GlitchBounds<F>,
        t: u64,
        lo: F,
        m: F,
        hi: F,
    ) -> Result<(u8, F)> {
        let mut p = Probe::mirrored(f);
        check_glitch(
            &mut p,
            y.neg(),
            iv.reflect(),
            &g.reflect(),
            t,
            hi.neg(),
            m.neg(),
            lo.neg(),
        )
        .map(|(b, z)| (b, z.neg()))
    }

    /// Mirror of [`bisect_ub`]; returns the new `lo`.
    #[allow(clippy::too_many_arguments)]
    pub fn bisect_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        y: F,
        iv: FloatInterval<F>,
        g: &GlitchBounds<F>,
        s: u64,
        t: u64,
        lo: F,
        hi: F,
    ) -> Result<F> {
        let mut p = Probe::mirrored(f);
        bisect_ub(
            &mut p,
            y.neg(),
            iv.reflect(),
            &g.reflect(),
            s,
            t,
            hi.neg(),
            lo.neg(),
        )
        .map(|v| v.neg())
    }

    /// Mirror of [`logsearch_ub`] over `[lo, mid]`.
    pub fn logsearch_lb<F: MachineFloat>(
        f: &dyn Fn(F) -> F,
        d_m: u64,
        lo: F,
        mid: F,
        y: F,
        s_budget: &mut u64,
    ) -> Result<F> {
        let mut p = Probe::mirrored(f);
        logsearch_ub(&mut p, d_m, mid.neg(), lo.neg(), y.neg(), s_budget).map(|v| v.neg())
    }
}

/// Sound enclosure of `f` over `iv`, which must lie in one branch of the
/// given class. Each end is widened by `d_M` steps when `iv` meets `[α, ω]`.
pub fn direct_image<F: MachineFloat>(
    f: &dyn Fn(F) -> F,
    iv: FloatInterval<F>,
    g: &GlitchBounds<F>,
    class: MonotoneClass,
) -> Result<FloatInterval<F>> {
    g.validate()?;
    let mut p = Probe::new(f);
    let (a, b) = match class {
        MonotoneClass::Isotonic => (p.eval(iv.lo)?, p.eval(iv.hi)?),
        MonotoneClass::Antitonic => (p.eval(iv.hi)?, p.eval(iv.lo)?),
    };
    let widen = if g.n_g > 0 && iv.intersects(g.alpha, g.omega) {
        g.d_m as i128
    } else {
        0
    };
    let bump = |v: F, d: i128| -> F {
        if !v.is_finite() {
            return v;
        }
        let m = crate::float_kernel::max_ordinal::<F>() as i128 + 1;
        from_ordinal((ordinal(v) as i128 + d).clamp(-m - 1, m) as i64)
    };
    let lo = bump(a, -widen);
    let hi = bump(b, widen);
    if lt(hi, lo) {
        return Err(contract("endpoint images contradict the branch class"));
    }
    Ok(FloatInterval { lo, hi })
}

/// `count` reexported for callers sizing budgets.
pub fn interval_size<F: MachineFloat>(iv: &FloatInterval<F>) -> u64 {
    count(iv.lo, iv.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::float_kernel::succ_n;

    fn params<'a>(f_inv: &'a dyn Fn(f32) -> f32) -> RefineParams<'a, f32> {
        RefineParams {
            glitch: GlitchBounds::none(),
            s: 4,
            t: 64,
            f_inv,
        }
    }

    #[test]
    fn doubling_exact_solution() {
        let f = |x: f32| 2.0 * x;
        let inv = |y: f32| y / 2.0;
        let iv = FloatInterval::new(0.0f32, 10.0).unwrap();
        let u = upper_bound(&f, 3.0, iv, &params(&inv)).unwrap();
        assert_eq!((u.value, u.status), (1.5, 9));
        let l = lower_bound(&f, 3.0, iv, &params(&inv)).unwrap();
        assert_eq!((l.value, l.status), (1.5, 4));
    }

    #[test]
    fn no_solution_statuses() {
        let f = |x: f32| x + 1.0;
        let bad = |_: f32| f32::NAN;
        let iv = FloatInterval::new(0.0f32, 10.0).unwrap();
        assert_eq!(upper_bound(&f, 0.5, iv, &params(&bad)).unwrap().status, 5);
        assert_eq!(lower_bound(&f, 12.0, iv, &params(&bad)).unwrap().status, 0);
        let r = upper_bound(&f, 12.0, iv, &params(&bad)).unwrap();
        assert_eq!(r.status, 6);
    }

    #[test]
    fn init_clamps_and_falls_back() {
        let iv = FloatInterval::new(1.0f32, 2.0).unwrap();
        assert_eq!(init(1.5, iv, &|y| y), 1.5);
        assert_eq!(init(0.5, iv, &|y| y), 1.0);
        assert_eq!(init(0.5, iv, &|_| f32::NAN), split_point(1.0f32, 2.0).unwrap());
    }

    #[test]
    fn gallop_vacuous_ends() {
        let f = |x: f32| x;
        let iv = FloatInterval::new(1.0f32, 2.0).unwrap();
        let mut p = Probe::new(&f);
        let (lo, _) = gallop_ub(&mut p, 0.5, iv, 0, 1.0).unwrap();
        assert_eq!(lo, 1.0);
        let mut p = Probe::new(&f);
        let (_, hi) = gallop_ub(&mut p, 3.0, iv, 0, 2.0).unwrap();
        assert_eq!(hi, 2.0);
    }

    #[test]
    fn linsearch_edges() {
        let f = |x: f32| x;
        let mut p = Probe::new(&f);
        assert_eq!(linsearch_leq(&mut p, 5.0, 3, 1.0, 2.0).unwrap(), (1, 2.0));
        let mut p = Probe::new(&f);
        assert_eq!(linsearch_leq(&mut p, 0.0, 0, 1.0, 2.0).unwrap(), (0, 2.0));
        let iv = FloatInterval::new(1.0f32, 2.0).unwrap();
        let mut p = Probe::new(&f);
        assert_eq!(linsearch_geq(&mut p, 5.0, iv, 0, 9).unwrap(), (0, 2.0, 2.0));
    }

    #[test]
    fn nan_is_a_domain_hole() {
        let f = |x: f32| if x > 1.25 { f32::NAN } else { x };
        let iv = FloatInterval::new(1.0f32, 2.0).unwrap();
        let inv = |y: f32| y;
        let e = upper_bound(&f, 1.5, iv, &params(&inv)).unwrap_err();
        assert!(matches!(e, Error::DomainHole { .. }));
    }

    #[test]
    fn direct_image_widening() {
        let f = |x: f32| x;
        let iv = FloatInterval::new(1.0f32, 2.0).unwrap();
        let g = GlitchBounds::new(1, 2, 1, 1.5f32, 1.5).unwrap();
        let d = direct_image(&f, iv, &g, MonotoneClass::Isotonic).unwrap();
        assert_eq!(d.hi, succ_n(2.0f32, 2).unwrap());
        let far = GlitchBounds::new(1, 2, 1, 3.0f32, 3.0).unwrap();
        let d = direct_image(&f, iv, &far, MonotoneClass::Isotonic).unwrap();
        assert_eq!((d.lo, d.hi), (1.0, 2.0));
        let n = |x: f32| -x;
        let d = direct_image(&n, iv, &GlitchBounds::none(), MonotoneClass::Antitonic).unwrap();
        assert_eq!((d.lo, d.hi), (-2.0, -1.0));
    }
}
