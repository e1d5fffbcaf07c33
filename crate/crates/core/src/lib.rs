pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod report;
pub mod representation;
pub mod rescale;
pub mod cli;
pub mod conformal;
pub mod movingplane;
pub mod ode1d;
pub mod sampling;
pub mod semilinear;
pub mod suites;

pub use error::{Error, Result};
