//! Geodesic space abstraction and the two shipped Hadamard models.
//!
//! [`Euclidean`] is flat; [`Spider`] is an ℝ-tree made of unit-length
//! branches glued at a common origin, and is the standard non-flat example.
//! Both models are immutable values, so every operation here is a pure
//! function and can be evaluated from many threads at once.

mod euclidean;
mod spider;

pub use euclidean::{Euclidean, EuclideanPoint};
pub use spider::{Spider, SpiderPoint};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::scalar::{ArithmeticMode, Context, Scalar};
use num_traits::{One, Zero};

/// A uniquely geodesic metric space.
pub trait GeodesicSpace: Send + Sync {
    type Scalar: Scalar;
    type Point: Clone + PartialEq + Debug + Send + Sync;

    fn name(&self) -> &'static str;

    /// Comparison context (tolerance) for this model.
    fn context(&self) -> &Context<Self::Scalar>;

    /// Checks that `p` is a well-formed point of this model.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<Self::Scalar>;

    /// Squared distance. Models override this when it can be computed
    /// without a square root.
    fn distance_squared(&self, x: &Self::Point, y: &Self::Point) -> Result<Self::Scalar> {
        let d = self.distance(x, y)?;
        Ok(d.clone() * d)
    }

    /// The point `(1-λ)x ⊕ λy` on the geodesic from `x` to `y`.
    fn geodesic(
        &self,
        x: &Self::Point,
        y: &Self::Point,
        lambda: &Self::Scalar,
    ) -> Result<Self::Point>;

    /// Parameters in (0,1) where the geodesic from `x` to `y` changes
    /// its analytic form. Empty for smooth models.
    fn breakpoints(&self, _x: &Self::Point, _y: &Self::Point) -> Vec<Self::Scalar> {
        Vec::new()
    }

    /// Nearby points with simpler coordinates, simplest first. Used to
    /// shrink reported witnesses.
    fn simpler_points(&self, _p: &Self::Point) -> Vec<Self::Point> {
        Vec::new()
    }

    fn mode(&self) -> ArithmeticMode {
        <Self::Scalar as Scalar>::MODE
    }
}

pub(crate) fn check_unit_interval<S: Scalar>(lambda: &S) -> Result<()> {
    if !lambda.is_finite() || *lambda < S::zero() || *lambda > S::one() {
        return Err(Error::domain(format!("λ = {lambda} is outside [0, 1]")));
    }
    Ok(())
}

/// n-ary convex combination `⊕ λᵢ vᵢ`, built by the right fold
///
/// ```text
/// ⊕ⁿ λᵢvᵢ = (1-λₙ) (⊕ⁿ⁻¹ λᵢ/(1-λₙ) vᵢ) ⊕ λₙvₙ
/// ```
///
/// In a non-flat space the result depends on the order of `points`; in
/// Euclidean space it is the weighted mean regardless of order.
///
/// Every weight must lie in (0, 1] and the weights must sum to one (exactly
/// in exact mode, within the model tolerance otherwise). Use
/// [`convex_combination_nonzero`] to drop zero weights first.
pub fn convex_combination<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::Point],
    weights: &[Sp::Scalar],
) -> Result<Sp::Point> {
    validate_simplex_weights(space.context(), weights, points.len())?;
    for p in points {
        space.validate(p)?;
    }
    let mut acc = points[0].clone();
    let mut mass = weights[0].clone();
    for (p, w) in points.iter().zip(weights).skip(1) {
        mass = mass + w.clone();
        let step = w.clone() / mass.clone();
        // float rounding can push the ratio a hair past 1
        let step = step.min_of(Sp::Scalar::one());
        acc = space.geodesic(&acc, p, &step)?;
    }
    Ok(acc)
}

/// Like [`convex_combination`] but silently skips entries whose weight is zero.
pub fn convex_combination_nonzero<Sp: GeodesicSpace>(
    space: &Sp,
    points: &[Sp::Point],
    weights: &[Sp::Scalar],
) -> Result<Sp::Point> {
    if points.len() != weights.len() {
        return Err(Error::domain(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    let (pts, ws): (Vec<_>, Vec<_>) = points
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(p, w)| (p.clone(), w.clone()))
        .unzip();
    convex_combination(space, &pts, &ws)
}

pub(crate) fn validate_simplex_weights<S: Scalar>(
    ctx: &Context<S>,
    weights: &[S],
    expected_len: usize,
) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::domain("convex combination needs at least one point"));
    }
    if weights.len() != expected_len {
        return Err(Error::domain(format!(
            "{expected_len} points but {} weights",
            weights.len()
        )));
    }
    let mut sum = S::zero();
    for w in weights {
        if !w.is_finite() || *w <= S::zero() || *w > S::one() + ctx.tol.clone() {
            return Err(Error::domain(format!("weight {w} is outside (0, 1]")));
        }
        sum = sum + w.clone();
    }
    if !ctx.approx_eq(&sum, &S::one()) {
        return Err(Error::domain(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}
