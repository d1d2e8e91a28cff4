//! Horn's problem: eigenvalue distributions of sums of random orbits, their
//! exact densities, and the Littlewood-Richardson combinatorics behind them.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod lr;
pub mod orbital;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod sampler;
pub mod scalar;
pub mod so_density;
pub mod spectra;
pub mod stats;
pub mod su_density;

pub use error::{HornError, Result};
pub use exec::Execution;
pub use spectra::{DynkinWeight, GroupClass, HyperplaneTriple, Spectrum, Theta};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
