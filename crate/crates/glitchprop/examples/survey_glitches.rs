//! Survey a synthetic function with three injected glitches, then a host
//! libm function, and compare with the independent scanner.
//!
//! `cargo run --release --example survey_glitches`

use glitchprop::float_kernel::FloatInterval;
use glitchprop::glitch_model::{survey_glitches, MonotoneClass};
use glitchprop::hexfloat;
use glitchprop::oracle;
use glitchprop::synth;

fn main() {
    let g = synth::glitch3_default();
    let f = |x: f32| g.eval(x);
    let dom = FloatInterval::new(1.0f32, 2.0).unwrap();
    let s = survey_glitches("synth:glitch3", &f, dom, MonotoneClass::Isotonic);
    for r in &s.glitches {
        println!(
            "found    {} .. {} width {} depth {}",
            hexfloat::format(r.start),
            hexfloat::format(r.end),
            r.width,
            r.depth
        );
    }
    for r in g.expected_records::<f32>() {
        println!(
            "injected {} .. {} width {} depth {}",
            hexfloat::format(r.start),
            hexfloat::format(r.end),
            r.width,
            r.depth
        );
    }
    println!("summary {:?}", s.summary);

    let dom = FloatInterval::new(-10.0f32, 10.0).unwrap();
    let s = survey_glitches("expf", &f32::exp, dom, MonotoneClass::Isotonic);
    let o = oracle::scan_glitches(&f32::exp, dom, MonotoneClass::Isotonic);
    println!(
        "expf on {dom}: {} glitches (scanner {}), {} evaluations",
        s.glitches.len(),
        o.forward.len(),
        s.evaluations
    );
}
