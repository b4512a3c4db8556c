//! Upper and lower bounds around an injected glitch, checked against the
//! exhaustive optimum.
//!
//! `cargo run --release --example refine_bounds`

use glitchprop::float_kernel::{self as fk, FloatInterval};
use glitchprop::glitch_model::{survey_glitches, MonotoneClass};
use glitchprop::hexfloat;
use glitchprop::oracle;
use glitchprop::refine_core::{lower_bound_counted, upper_bound_counted, RefineParams};
use glitchprop::synth;

fn main() {
    let g = synth::glitch1_default();
    let f = |x: f32| g.eval(x);
    let inv = |y: f32| y;
    let iv = FloatInterval::new(1.4999f32, 1.5001).unwrap();
    let survey = survey_glitches("synth:glitch1", &f, iv, MonotoneClass::Isotonic);
    let params = RefineParams {
        glitch: survey.refinement_bounds(),
        s: 4,
        t: 16,
        f_inv: &inv,
    };
    for y in [1.49995f32, fk::pred_n(1.5, 2).unwrap(), 1.5, 1.50005] {
        let (lo, lc) = lower_bound_counted(&f, y, iv, &params).unwrap();
        let (hi, hc) = upper_bound_counted(&f, y, iv, &params).unwrap();
        let ans = oracle::brute_refine(&f, y, iv).unwrap();
        println!(
            "y = {}: [{}, {}] r = ({}, {}) calls = {} + {}; optimum {:?} {:?}",
            hexfloat::format(y),
            hexfloat::format(lo.value),
            hexfloat::format(hi.value),
            lo.status,
            hi.status,
            lc.f_calls,
            hc.f_calls,
            ans.optimal_lower(&iv),
            ans.optimal_upper(&iv)
        );
    }
}
