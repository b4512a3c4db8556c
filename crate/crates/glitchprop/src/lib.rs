//! Inverse interval propagation through floating-point math-library functions
//! that are only *almost* monotonic.
//!
//! Given `f`, an output `y` and an input interval `[x_l, x_u]`, the refiners in
//! [`refine_core`] shrink the interval to the inputs that may map to `y`,
//! using a glitch summary measured by [`glitch_model`] to stay sound when the
//! implementation of `f` briefly runs against its mathematical trend.
//! [`trig_refine`] extends this to periodic functions with exact argument
//! reduction from [`trig_reduce`].
//!
//! - [`float_kernel`]: float order, stepping and intervals.
//! - [`glitch_model`]: glitch surveys, bounds and the glitch database.
//! - [`refine_core`]: `upper_bound`, `lower_bound`, `direct_image`.
//! - [`trig_reduce`]: directed quotient and multiple of π/2, worst-case search.
//! - [`trig_refine`]: branch splitting for sine, cosine and tangent.
//! - [`oracle`]: exhaustive and exact-arithmetic references for testing.
//! - [`synth`]: synthetic functions with known glitches and the name registry.
//! - [`cli`]: the `glitchprop` command line.

pub mod cli;
pub mod error;
pub mod float_kernel;
pub mod glitch_model;
pub mod hexfloat;
pub mod oracle;
pub mod refine_core;
pub mod synth;
pub mod trig_reduce;
pub mod trig_refine;

pub use error::{Error, Result};
