//! Exact Fourier analysis of Boolean functions on the discrete cube.

pub mod bfn1;
pub mod calculus;
pub mod cli;
pub mod cube;
pub mod dyadic;
pub mod entropy;
pub mod error;
pub mod families;
pub mod render;
pub mod spectrum;
pub mod verify;

pub use cube::{PointIndex, PseudoBooleanFunction, SubsetMask, TruthTable};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use spectrum::{transform, Spectrum};
