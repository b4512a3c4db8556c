//! Refine `sin(x) ∈ [0.25, 0.5]` over `[0, 10]` with several split budgets.
//!
//! `cargo run --release --example trig_split`

use glitchprop::float_kernel::FloatInterval;
use glitchprop::glitch_model::GlitchBounds;
use glitchprop::hexfloat;
use glitchprop::synth;
use glitchprop::trig_reduce::ReductionConfig;
use glitchprop::trig_refine::{compute_bounds_trig, PeriodClass, TrigQuery};

fn main() {
    let inv = |y: f32| (y as f64).asin() as f32;
    for g in [8, 3, 1] {
        let q = TrigQuery {
            f: &synth::sin_model_f32,
            f_inv: &inv,
            pclass: PeriodClass::OddV,
            y: FloatInterval::new(0.25f32, 0.5).unwrap(),
            x: FloatInterval::new(0.0f32, 10.0).unwrap(),
            glitch: GlitchBounds::none(),
            g,
            s: 4,
            t: 16,
            cfg: ReductionConfig::default(),
        };
        println!("g = {g}");
        for r in compute_bounds_trig(&q).unwrap() {
            println!(
                "  {} [{}, {}] -> [{} r={}, {} r={}]",
                r.k,
                hexfloat::format(r.x_lo),
                hexfloat::format(r.x_hi),
                hexfloat::format(r.l),
                r.r_l,
                hexfloat::format(r.u),
                r.r_u
            );
        }
    }
}
