//! Finite-dimensional graded frame families.
//!
//! A graded space is one finite-dimensional vector space carrying a monotone
//! ladder of diagonal-weighted Euclidean norms. Frame families over such
//! spaces get per-grade optimal bounds via singular values, a canonical
//! pseudoinverse reconstruction, and a certificate checker for each of the
//! classical frame-perturbation results (closeness, invertibility sandwich,
//! Bessel, min-condition, weighted, reconstruction-side and functional-side
//! perturbations).

pub mod error;
pub mod frame;
pub mod graded;
pub mod linalg;
pub mod oracle;
pub mod perturb;
pub mod report;
pub mod rng;
pub mod scenario;

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Scalar type the numerical core is generic over.
pub trait Scalar:
    Float + FromPrimitive + Sum + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + Sum + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

pub use error::Error;
pub type Result<T, E = Error> = std::result::Result<T, E>;

// Concrete aliases used by the CLI and most callers.
pub type Mat = linalg::Matrix<f64>;
pub type Space = graded::GradedSpace<f64>;
pub type Frame = frame::FrameFamily<f64>;
pub type Bounds = frame::FrameBounds<f64>;
pub type Recon = frame::ReconstructionOp<f64>;
pub type Cert = perturb::Certificate<f64>;

pub type Mat32 = linalg::Matrix<f32>;
pub type Space32 = graded::GradedSpace<f32>;
pub type Frame32 = frame::FrameFamily<f32>;
