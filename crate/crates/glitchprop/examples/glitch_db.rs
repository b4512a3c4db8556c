//! Build a glitch database from two surveys, store it and load it back.
//!
//! `cargo run --release --example glitch_db`

use glitchprop::float_kernel::FloatInterval;
use glitchprop::glitch_model::{survey_glitches, GlitchDb, MonotoneClass};
use glitchprop::synth;

fn main() {
    let mut db = GlitchDb::default();
    let g = synth::glitch3_default();
    let dom = FloatInterval::new(1.0f32, 2.0).unwrap();
    let s = survey_glitches("synth:glitch3", &|x: f32| g.eval(x), dom, MonotoneClass::Isotonic);
    db.insert("synth:glitch3", &s.refinement_bounds());
    let dom = FloatInterval::new(1.0f64, 1.0 + 2f64.powi(-36)).unwrap();
    let s = survey_glitches("sqrt", &f64::sqrt, dom, MonotoneClass::Isotonic);
    db.insert("sqrt", &s.refinement_bounds());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("glitch.db");
    db.store(&path).unwrap();
    print!("{}", std::fs::read_to_string(&path).unwrap());
    let back = GlitchDb::load(&path).unwrap();
    assert_eq!(back, db);
    println!("round trip ok: {:?}", back.get::<f32>("synth:glitch3").unwrap().unwrap());
}
