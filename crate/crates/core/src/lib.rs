//! Executable geometry of Hadamard spaces: geodesic models, the
//! quasilinearization pairing, the linear dual, monotone relations and
//! their extensions.
//!
//! Algorithms are generic over the [`Scalar`] type. The spider tree runs
//! over exact [`Rational`]s; Euclidean space runs over `f64` (or `f32`).

pub mod dual;
pub mod error;
pub mod extension;
pub mod flatness;
pub mod io;
pub mod monotone;
pub mod quasilin;
pub mod reproduce;
pub mod sampling;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};
pub use scalar::{ArithmeticMode, Context, Rational, RealScalar, Scalar};
pub use spaces::{
    convex_combination, convex_combination_nonzero, Euclidean, EuclideanPoint, GeodesicSpace,
    Spider, SpiderPoint,
};

/// The spider tree with exact arithmetic.
pub type ExactSpider = Spider<Rational>;
pub type ExactSpiderPoint = SpiderPoint<Rational>;
/// Double-precision Euclidean space.
pub type Euclidean64 = Euclidean<f64>;
pub type Euclidean64Point = EuclideanPoint<f64>;
pub type Euclidean32 = Euclidean<f32>;
