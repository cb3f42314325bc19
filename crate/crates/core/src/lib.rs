//! Learning-capability benchmarking for parametrized quantum circuits.
//!
//! The crate simulates layered and dissipative-QNN circuit families with a
//! single data-encoding input, trains them against random truncated Fourier
//! series and reports the mean final validation loss over a function set.

pub mod ansatz;
pub mod autodiff;
pub mod circuit;
mod error;
pub mod fourier;
pub mod harness;
pub mod lie;
pub mod stochastic;
pub mod training;

pub use error::{Error, Result};
