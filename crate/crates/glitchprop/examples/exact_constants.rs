//! Reduction constants and directed multiples of π/2 against exact rationals.
//!
//! `cargo run --release --example exact_constants`

use glitchprop::float_kernel::FloatFormat;
use glitchprop::hexfloat;
use glitchprop::oracle::{hp_const, pio2_bracket, ConstName};
use glitchprop::trig_reduce::{
    div_pio2_up, pio2_mult_down, pio2_mult_up, required_precision, ReductionConfig, ReductionOp,
};

fn main() {
    for fmt in [FloatFormat::BINARY32, FloatFormat::BINARY64] {
        println!(
            "{}: divide needs {} bits, multiply {}",
            fmt.name(),
            required_precision(fmt, ReductionOp::Divide2OverPi),
            required_precision(fmt, ReductionOp::MultiplyPiOver2)
        );
    }
    println!("pi/2 ~ {}", hp_const(ConstName::PiOver2, 128).unwrap().to_hex());
    println!("2/pi ~ {}", hp_const(ConstName::TwoOverPi, 128).unwrap().to_hex());

    let cfg = ReductionConfig::<f64>::default();
    for k in [1i64, 7, -3, 1_000_003] {
        let (d, u) = (pio2_mult_down(k, &cfg).unwrap(), pio2_mult_up(k, &cfg).unwrap());
        let (od, ou) = pio2_bracket::<f64>(k);
        println!(
            "{k} pi/2 in [{}, {}] oracle [{}, {}]",
            hexfloat::format(d),
            hexfloat::format(u),
            hexfloat::format(od),
            hexfloat::format(ou)
        );
    }
    let x = f64::from_bits(0x4325_cba8_9af1_f855);
    println!("div_pio2_up({}) = {}", hexfloat::format(x), div_pio2_up(x, &cfg).unwrap());
}
