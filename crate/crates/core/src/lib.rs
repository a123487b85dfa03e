//! Theta-neuron networks with partial stochastic resetting: microscopic
//! simulation, Ott–Antonsen mean-field reductions and bifurcation analysis.

// `!(x > 0.0)` style checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod error;
pub mod io;
pub mod meanfield;
pub mod model;
pub mod network;
pub mod ode;
pub mod reproduce;

pub use error::{Error, Result};
pub use meanfield::{MeanFieldSystem, Reduction};
pub use model::{ModelParams, ResetRate};
