//! Forward enclosures: a glitchy isotonic function and a sine spanning
//! several branches.
//!
//! `cargo run --release --example direct_image`

use glitchprop::float_kernel::FloatInterval;
use glitchprop::glitch_model::{survey_glitches, MonotoneClass};
use glitchprop::glitch_model::GlitchBounds;
use glitchprop::refine_core::direct_image;
use glitchprop::synth;
use glitchprop::trig_reduce::ReductionConfig;
use glitchprop::trig_refine::{trig_direct_image, PeriodClass};

fn main() {
    let g = synth::glitch1_default();
    let f = |x: f32| g.eval(x);
    let dom = FloatInterval::new(1.0f32, 2.0).unwrap();
    let b = survey_glitches("synth:glitch1", &f, dom, MonotoneClass::Isotonic).refinement_bounds();
    let iv = FloatInterval::new(1.5f32, 1.5000001).unwrap();
    println!("glitch1 over {iv} -> {}", direct_image(&f, iv, &b, MonotoneClass::Isotonic).unwrap());

    let cfg = ReductionConfig::<f32>::default();
    let iv = FloatInterval::new(0.5f32, 4.0).unwrap();
    let e = trig_direct_image(&synth::sin_model_f32, PeriodClass::OddV, iv, &GlitchBounds::none(), &cfg).unwrap();
    println!("sin over {iv} -> {e}");
}
