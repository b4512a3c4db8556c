mod common;

use common::{random_instance, Family, FAMILIES};
use glitchprop::float_kernel::{self as fk, FloatInterval, MachineFloat};
use glitchprop::glitch_model::{
    quasi_monotone_split, summarize, survey_glitches, survey_glitches_sharded, GlitchBounds, GlitchDb,
    GlitchRecord, MonotoneClass,
};
use glitchprop::oracle;
use glitchprop::trig_reduce::ReductionConfig;
use glitchprop::trig_refine::PeriodClass;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Inputs whose image is strictly below the running maximum (left to right)
/// or strictly above the running minimum (right to left).
fn violators<F: MachineFloat>(f: &dyn Fn(F) -> F, iv: &FloatInterval<F>) -> (Vec<i64>, Vec<i64>) {
    let xs: Vec<F> = iv.iter().collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x).to_f64()).collect();
    let mut fwd = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        if v < best {
            fwd.push(fk::ordinal(xs[i]));
        }
        best = best.max(v);
    }
    let mut back = Vec::new();
    let mut least = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate().rev() {
        if v > least {
            back.push(fk::ordinal(xs[i]));
        }
        least = least.min(v);
    }
    back.reverse();
    (fwd, back)
}

fn covered<F: MachineFloat>(records: &[GlitchRecord<F>]) -> Vec<i64> {
    records
        .iter()
        .flat_map(|r| fk::ordinal(r.start)..=fk::ordinal(r.end))
        .collect()
}

fn dominates<F: MachineFloat>(big: &GlitchBounds<F>, small: &GlitchBounds<F>) -> bool {
    small.n_g == 0
        || (big.n_g >= small.n_g
            && big.d_m >= small.d_m
            && big.w_m >= small.w_m
            && fk::le(big.alpha, small.alpha)
            && fk::le(small.omega, big.omega))
}

fn family(i: u8) -> Family {
    FAMILIES[i as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn survey_union_is_the_violating_set(seed in any::<u64>(), fam in 0u8..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, family(fam), 16);
        let f = |x: f32| inst.eval(x);
        let s = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic);
        let (fwd, back) = violators(&f, &inst.iv);
        prop_assert_eq!(covered(&s.glitches), fwd);
        prop_assert_eq!(covered(&s.mirrored), back);
        prop_assert_eq!(s.summary, summarize(&s.glitches));
    }

    #[test]
    fn survey_agrees_with_reference_scanner(seed in any::<u64>(), fam in 0u8..3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f64, _>(&mut r, family(fam), 14);
        let f = |x: f64| inst.eval(x);
        let s = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic);
        let o = oracle::scan_glitches(&f, inst.iv, MonotoneClass::Isotonic);
        let strip = |v: &[GlitchRecord<f64>]| v.iter().map(|g| (g.start, g.end, g.width, g.depth)).collect::<Vec<_>>();
        let ostrip = |v: &[oracle::OracleGlitch<f64>]| v.iter().map(|g| (g.start, g.end, g.width, g.depth)).collect::<Vec<_>>();
        prop_assert_eq!(strip(&s.glitches), ostrip(&o.forward));
        prop_assert_eq!(strip(&s.mirrored), ostrip(&o.mirrored));
    }

    #[test]
    fn summaries_dominate_their_records(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, Family::KGlitch, 14);
        let f = |x: f32| inst.eval(x);
        let s = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic);
        for (sum, recs) in [(&s.summary, &s.glitches), (&s.mirrored_summary, &s.mirrored)] {
            prop_assert_eq!(sum.n_g, recs.len() as u64);
            for g in recs.iter() {
                prop_assert!(g.width <= sum.w_m && g.depth <= sum.d_m);
                prop_assert!(fk::le(sum.alpha, g.start) && fk::le(g.end, sum.omega));
                prop_assert_eq!(fk::count(g.start, g.end), g.width);
            }
        }
        let rb = s.refinement_bounds();
        prop_assert!(dominates(&rb, &s.summary) && dominates(&rb, &s.mirrored_summary));
        if rb.n_g > 0 {
            prop_assert!(rb.check_within(&inst.iv).is_ok());
        }
    }

    #[test]
    fn sharding_does_not_change_the_survey(seed in any::<u64>(), jobs in 1usize..6, chunk in 1u64..5000) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, Family::KGlitch, 15);
        let f = |x: f32| inst.eval(x);
        let serial = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic);
        let sharded = survey_glitches_sharded("p", &f, inst.iv, MonotoneClass::Isotonic, jobs, chunk);
        prop_assert_eq!(serial, sharded);
    }

    #[test]
    fn antitonic_survey_is_the_negated_one(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance::<f32, _>(&mut r, Family::OneGlitch, 12);
        let f = |x: f32| inst.eval(x);
        let g = |x: f32| -inst.eval(x);
        let iso = survey_glitches("p", &f, inst.iv, MonotoneClass::Isotonic);
        let anti = survey_glitches("p", &g, inst.iv, MonotoneClass::Antitonic);
        prop_assert_eq!(iso.summary, anti.summary);
        prop_assert_eq!(iso.mirrored_summary, anti.mirrored_summary);
    }

    #[test]
    fn db_round_trips(n_g in 1u64..50, d in 0u64..1000, w in 0u64..1000, a in any::<u32>(), b in any::<u64>()) {
        let a = f32::from_bits(a);
        let b = f64::from_bits(b);
        prop_assume!(a.is_finite() && b.is_finite());
        let g32 = GlitchBounds { n_g, d_m: d, w_m: w, alpha: a, omega: fk::max(a, a.abs()) };
        let g64 = GlitchBounds { n_g, d_m: d, w_m: w, alpha: -b.abs(), omega: b.abs() };
        let mut db = GlitchDb::default();
        db.insert("sinf_lo", &g32);
        db.insert("f64", &g64);
        let back = GlitchDb::parse(&db.render()).unwrap();
        prop_assert_eq!(&back, &db);
        prop_assert_eq!(back.get::<f32>("sinf_lo").unwrap().unwrap(), g32);
        prop_assert_eq!(back.get::<f64>("f64").unwrap().unwrap(), g64);
        prop_assert!(back.get::<f64>("sinf_lo").unwrap().is_err());
    }
}

/// The `k` with `(k−1)·π/2 ≤ x ≤ k·π/2`; only the zeros sit on a boundary.
fn true_quadrant(x: f64) -> i64 {
    let mut k = (x * std::f64::consts::FRAC_2_PI).ceil() as i64;
    while !oracle::quadrant_holds(x, k) {
        if oracle::quadrant_holds(x, k - 1) {
            k -= 1;
        } else {
            k += 1;
        }
    }
    k
}

/// Monotonicity of the real function on quadrant `k`.
fn quadrant_class(p: PeriodClass, k: i64) -> MonotoneClass {
    let m = k.rem_euclid(4);
    let up = match p {
        PeriodClass::OddV => m == 0 || m == 1,
        PeriodClass::EvenV => m == 3 || m == 0,
        PeriodClass::OddC => true,
    };
    if up {
        MonotoneClass::Isotonic
    } else {
        MonotoneClass::Antitonic
    }
}

fn check_split<F: MachineFloat>(p: PeriodClass, lo: F, hi: F) -> Result<(), TestCaseError> {
    let domain = FloatInterval::new(lo, hi).unwrap();
    let cfg = ReductionConfig::<F>::default();
    let pieces = quasi_monotone_split(p, domain, &cfg).unwrap();
    prop_assert!(!pieces.is_empty());
    prop_assert!(fk::same(pieces[0].0.lo, lo));
    prop_assert!(fk::same(pieces[pieces.len() - 1].0.hi, hi));
    for w in pieces.windows(2) {
        prop_assert_eq!(fk::distance(w[0].0.hi, w[1].0.lo), 1);
        prop_assert!(w[0].1 != w[1].1 || p == PeriodClass::OddC);
    }
    for (iv, class) in &pieces {
        let (ka, kb) = (true_quadrant(iv.lo.to_f64()), true_quadrant(iv.hi.to_f64()));
        for k in ka..=kb {
            if p != PeriodClass::OddC {
                prop_assert_eq!(quadrant_class(p, k), *class, "piece {} quadrant {}", iv, k);
            }
        }
    }
    Ok(())
}

fn pclass(i: u8) -> PeriodClass {
    [PeriodClass::OddV, PeriodClass::EvenV, PeriodClass::OddC][i as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn split_tiles_and_classes_are_true_f32(a in -1.0e4f32..1.0e4, len in 0.0f32..60.0, p in 0u8..3) {
        let hi = a + len;
        prop_assume!(a <= hi);
        check_split(pclass(p), a, hi)?;
    }

    #[test]
    fn split_tiles_and_classes_are_true_f64(a in -1.0e9f64..1.0e9, len in 0.0f64..60.0, p in 0u8..3) {
        check_split(pclass(p), a, a + len)?;
    }
}

#[test]
fn split_pieces_near_zero() {
    for p in [PeriodClass::OddV, PeriodClass::EvenV, PeriodClass::OddC] {
        check_split(p, -0.0f32, 0.0).unwrap();
        check_split(p, -2.0f64, 2.0).unwrap();
        check_split(p, 0.0f64, 1.0e-300).unwrap();
    }
}

#[test]
fn survey_of_sinf_branches_matches_reference_scan() {
    let cfg = ReductionConfig::<f32>::default();
    let sinf = |x: f32| x.sin();
    let domain = FloatInterval::new(1.0f32, 1.0 + 2f32.powi(-7)).unwrap();
    let domain2 = FloatInterval::new(1.5f32, 1.6).unwrap();
    for d in [domain, domain2] {
        for (piece, class) in quasi_monotone_split(PeriodClass::OddV, d, &cfg).unwrap() {
            let s = survey_glitches("sinf", &sinf, piece, class);
            let o = oracle::scan_glitches(&sinf, piece, class);
            assert_eq!(s.glitches.len(), o.forward.len());
            assert_eq!(s.mirrored.len(), o.mirrored.len());
        }
    }
}
