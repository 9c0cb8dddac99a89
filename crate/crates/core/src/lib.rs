//! Multivariate sampling Kantorovich operators
//!
//! `(S_w f)(x) = Σ_k χ(wx − t_k) (w^n/A_k) ∫_{R_k^w} f(u) du`
//!
//! with a kernel toolbox, exact cell means for step-function images, image
//! upscaling and L^p / Orlicz-modular error measurement.

pub mod error;
pub mod image;
pub mod kernels;
pub mod numeric;
pub mod orlicz;
pub mod quadrature;
pub mod sampling;
pub mod signals;

pub use error::{Error, Result};
pub use image::{reconstruct, ReconstructionConfig, StepImage};
pub use kernels::{KernelSpec, ProductKernel, UnivariateKernel};
pub use sampling::{CellMeans, Extension, SamplingScheme};
