//! Floats whose quotient by π/2 comes closest to an integer.
//!
//! `cargo run --release --example worst_case_search -- binary64`

use glitchprop::float_kernel::{FloatInterval, MachineFloat};
use glitchprop::hexfloat;
use glitchprop::trig_reduce::{binade_minimum, worst_case_search, ReductionConfig};

fn per_binade<F: MachineFloat>() {
    let cfg = ReductionConfig::<F>::default();
    let top = F::FORMAT.precision_bits as i32 - 1;
    let mut best = None;
    for e in -1..=top {
        let w = binade_minimum::<F>(e, Some(cfg.l_max)).unwrap();
        println!(
            "binade {e:>3}: x = {} delta = {:e} e_x - e_delta = {}",
            hexfloat::format(w.x),
            w.delta,
            w.cancellation()
        );
        if best.is_none_or(|b: glitchprop::trig_reduce::WorstCase<F>| w.rank_cmp(&b).is_lt()) {
            best = Some(w);
        }
    }
    let b = best.unwrap();
    println!(
        "worst: x = {} (bits {:#x}) delta = {} e_x = {} e_delta = {}",
        hexfloat::format(b.x),
        b.x.to_bits64(),
        hexfloat::format(b.delta),
        b.e_x,
        b.e_delta
    );
}

fn main() {
    let fmt = std::env::args().nth(1).unwrap_or_else(|| "binary32".into());
    if fmt == "binary64" {
        per_binade::<f64>();
    } else {
        per_binade::<f32>();
        let l = ReductionConfig::<f32>::default().l_max;
        let dom = FloatInterval::new(-l, l).unwrap();
        for w in worst_case_search(dom, 2f64.powi(-25)).unwrap().iter().take(6) {
            println!("{} {} k = {}", hexfloat::format(w.x), hexfloat::format(w.delta), w.k_hat);
        }
    }
}
