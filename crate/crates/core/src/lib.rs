//! Asymptotic key-generation rates for decoy-state BB84 with an arbitrary
//! number of decoy intensities.
//!
//! The crate is organised bottom-up:
//!
//! * [`divided_diff`]: divided differences and their simplex representation.
//! * [`expansion`]: convex expansion of Poisson mixtures into basis states.
//! * [`bounds`]: closed-form yield and error bounds, plus an LP cross-check.
//! * [`channel`]: fiber/detector model and the `ε` functional.
//! * [`keyrate`]: key-rate formulas, intensity optimisation, distance search.
//! * [`scenario`]: named decoy configurations and distance sweeps.

pub mod bounds;
pub mod channel;
pub mod divided_diff;
pub mod error;
pub mod expansion;
pub mod keyrate;
pub mod lp;
pub mod scenario;

pub use error::{Error, Result};
