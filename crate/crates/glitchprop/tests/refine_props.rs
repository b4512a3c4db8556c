mod common;

use common::{maybe_inflate, random_instance, random_point, random_y, Family, FAMILIES};
use glitchprop::float_kernel::{self as fk, FloatInterval, MachineFloat};
use glitchprop::glitch_model::{survey_glitches, GlitchBounds, MonotoneClass};
use glitchprop::oracle::{self, brute_refine, check_predicate};
use glitchprop::refine_core::{
    check_glitch, direct_image, linsearch_leq, lower_bound, lower_bound_counted, upper_bound, upper_bound_counted,
    Probe, RefineParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sound_case<F: MachineFloat>(seed: u64, fam: Family) -> Result<(), TestCaseError> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_instance::<F, _>(&mut r, fam, 14);
    let f = |x: F| inst.eval(x);
    let inv = |y: F| inst.inverse(y);
    let g = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic).refinement_bounds();
    let g = maybe_inflate(&mut r, g, &inst.iv);
    let y = random_y(&mut r, &f, &inst.iv);
    let params = RefineParams { glitch: g, s: r.gen_range(0..=6), t: r.gen_range(0..=40), f_inv: &inv };
    let u = upper_bound(&f, y, inst.iv, &params).unwrap();
    let l = lower_bound(&f, y, inst.iv, &params).unwrap();
    prop_assert!((5..=9).contains(&u.status) && l.status <= 4);
    prop_assert!(check_predicate(u.status, y, inst.iv, u.value, &f).unwrap(), "upper {:?} {:?}", u, inst.func);
    prop_assert!(check_predicate(l.status, y, inst.iv, l.value, &f).unwrap(), "lower {:?} {:?}", l, inst.func);
    let b = brute_refine(&f, y, inst.iv).unwrap();
    if let (Some(a), Some(z)) = (b.leftmost_sol, b.rightmost_sol) {
        prop_assert!(u.status != 5 && l.status != 0);
        prop_assert!(fk::le(l.value, a) && fk::le(z, u.value));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn bounds_satisfy_their_predicates_f32(seed in any::<u64>(), fam in 0u8..3) {
        sound_case::<f32>(seed, FAMILIES[fam as usize])?;
    }

    #[test]
    fn bounds_satisfy_their_predicates_f64(seed in any::<u64>(), fam in 0u8..3) {
        sound_case::<f64>(seed, FAMILIES[fam as usize])?;
    }

    #[test]
    fn lower_bound_mirrors_upper_bound(seed in any::<u64>(), fam in 0u8..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, FAMILIES[fam as usize], 12);
        let f = |x: f32| inst.eval(x);
        let inv = |y: f32| inst.inverse(y);
        let h = |x: f32| -inst.eval(-x);
        let hinv = |y: f32| -inst.inverse(-y);
        let riv = inst.iv.reflect();
        let g = survey_glitches("f", &f, inst.iv, MonotoneClass::Isotonic).refinement_bounds();
        let gh = survey_glitches("h", &h, riv, MonotoneClass::Isotonic).refinement_bounds();
        let y = random_y(&mut r, &f, &inst.iv);
        let (s, t) = (r.gen_range(0..=6), r.gen_range(0..=40));
        let l = lower_bound(&f, y, inst.iv, &RefineParams { glitch: g, s, t, f_inv: &inv }).unwrap();
        let u = upper_bound(&h, -y, riv, &RefineParams { glitch: gh, s, t, f_inv: &hinv }).unwrap();
        prop_assert_eq!(l.status + 5, u.status);
        prop_assert!(fk::same(l.value, -u.value));
    }

    #[test]
    fn monotone_calls_stay_logarithmic(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f64, _>(&mut r, Family::Monotone, 40);
        let f = |x: f64| inst.eval(x);
        let inv = |y: f64| inst.inverse(y);
        let y = random_y(&mut r, &f, &inst.iv);
        let params = RefineParams { glitch: GlitchBounds::none(), s: 4, t: 16, f_inv: &inv };
        let (u, cu) = upper_bound_counted(&f, y, inst.iv, &params).unwrap();
        let (l, cl) = lower_bound_counted(&f, y, inst.iv, &params).unwrap();
        prop_assert!(cu.f_calls as f64 <= cu.monotone_ceiling(), "{} > {}", cu.f_calls, cu.monotone_ceiling());
        prop_assert!(cl.f_calls as f64 <= cl.monotone_ceiling());
        // Strictly monotone without glitches: both clauses apply whenever y is bracketed.
        if fk::le(f(inst.iv.lo), y) && fk::le(y, f(inst.iv.hi)) {
            prop_assert!(u.status >= 8 && l.status >= 3);
        }
    }

    #[test]
    fn direct_image_encloses_the_range(seed in any::<u64>(), fam in 0u8..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, FAMILIES[fam as usize], 12);
        let f = |x: f32| inst.eval(x);
        let g = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic).refinement_bounds();
        let a = random_point(&mut r, &inst.iv);
        let b = random_point(&mut r, &inst.iv);
        let sub = FloatInterval::new(fk::min(a, b), fk::max(a, b)).unwrap();
        let img = direct_image(&f, sub, &g, MonotoneClass::Isotonic).unwrap();
        for x in sub.iter() {
            prop_assert!(img.contains(f(x)), "{} not in {}", f(x), img);
        }
        let neg = |x: f32| -inst.eval(x);
        let nimg = direct_image(&neg, sub, &g, MonotoneClass::Antitonic).unwrap();
        for x in sub.iter() {
            prop_assert!(nimg.contains(neg(x)));
        }
    }

    #[test]
    fn linear_searches_find_the_rightmost_hit(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, Family::OneGlitch, 10);
        let f = |x: f32| inst.eval(x);
        let a = random_point(&mut r, &inst.iv);
        let b = random_point(&mut r, &inst.iv);
        let (s_l, s_u) = (fk::min(a, b), fk::max(a, b));
        let y = f(random_point(&mut r, &inst.iv));
        let w = r.gen_range(0..=64u64);
        let mut p = Probe::new(&f);
        let (hit, z) = linsearch_leq(&mut p, y, w, s_l, s_u).unwrap();
        let lowest = fk::step(s_u, -(w as i128)).map_or(s_l, |v| fk::max(v, s_l));
        let want = FloatInterval::new(lowest, s_u).unwrap().iter().filter(|&x| fk::le(f(x), y)).last();
        match want {
            Some(x) => prop_assert!(hit == 1 && fk::same(z, x)),
            None => prop_assert!(hit == 0 && fk::same(z, lowest)),
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig { cases: 600, max_global_rejects: 200_000, ..ProptestConfig::default() })]

    #[test]
    fn check_glitch_answers_are_exact(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, Family::OneGlitch, 10);
        let f = |x: f32| inst.eval(x);
        let g = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic).refinement_bounds();
        prop_assume!(g.n_g == 1);
        let t = g.w_m + r.gen_range(0..8);
        let y = f(random_point(&mut r, &inst.iv));
        // Pick m ⪯ hi with both images above y, bracketing part of the window.
        let above = |x: &f32| fk::lt(y, f(*x));
        let ms: Vec<f32> = inst.iv.iter().filter(above).filter(|&x| fk::le(x, g.omega)).collect();
        prop_assume!(!ms.is_empty());
        let m = ms[r.gen_range(0..ms.len())];
        let his: Vec<f32> = inst.iv.iter().filter(above).filter(|&x| fk::le(fk::max(m, g.alpha), x)).collect();
        prop_assume!(!his.is_empty());
        let hi = his[r.gen_range(0..his.len())];
        let lo = fk::from_ordinal(r.gen_range(fk::ordinal(inst.iv.lo)..=fk::ordinal(m)));
        let mut p = Probe::new(&f);
        let (b, z) = check_glitch(&mut p, y, inst.iv, &g, t, lo, m, hi).unwrap();
        let hits: Vec<f32> = FloatInterval::new(lo, hi).unwrap().iter().filter(|&x| fk::le(f(x), y)).collect();
        match b {
            0 => prop_assert!(FloatInterval::new(m, hi).unwrap().iter().all(|x| fk::lt(y, f(x)))),
            1 => prop_assert!(fk::same(z, *hits.last().unwrap())),
            _ => {
                let iv = inst.iv;
                let falls = fk::lt(g.alpha, iv.hi) && fk::lt(f(fk::succ(g.alpha).unwrap()), f(g.alpha));
                let rises = fk::lt(iv.lo, g.omega) && fk::lt(f(fk::pred(g.omega).unwrap()), f(g.omega));
                let small = fk::distance(g.alpha, g.omega) <= t as i128;
                prop_assert!(!(falls || rises || small), "searchable glitch refused");
            }
        }
    }
}

#[test]
fn brute_scans_agree_in_both_directions() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for i in 0..300 {
        let inst = random_instance::<f64, _>(&mut r, FAMILIES[i % 3], 12);
        let f = |x: f64| inst.eval(x);
        let y = random_y(&mut r, &f, &inst.iv);
        let a = oracle::brute_refine(&f, y, inst.iv).unwrap();
        let b = oracle::brute_refine_reverse(&f, y, inst.iv).unwrap();
        assert_eq!(a, b);
    }
}
