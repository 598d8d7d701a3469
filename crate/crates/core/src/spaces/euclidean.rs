use crate::error::{Error, Result};
use crate::scalar::{Context, RealScalar, Scalar};

use super::{check_unit_interval, GeodesicSpace};

/// Point of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPoint<S>(Vec<S>);

impl<S: Scalar> EuclideanPoint<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl<S: Scalar> std::fmt::Display for EuclideanPoint<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Scalar::render).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl<S: Scalar> From<Vec<S>> for EuclideanPoint<S> {
    fn from(coords: Vec<S>) -> Self {
        Self(coords)
    }
}

/// ℝⁿ with the usual metric; geodesics are straight segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Euclidean<S> {
    dim: usize,
    ctx: Context<S>,
}

impl<S: RealScalar> Euclidean<S> {
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_context(dim, Context::default())
    }

    pub fn with_context(dim: usize, ctx: Context<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("Euclidean dimension must be at least 1"));
        }
        Ok(Self { dim, ctx })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, coords: Vec<S>) -> Result<EuclideanPoint<S>> {
        let p = EuclideanPoint(coords);
        self.validate(&p)?;
        Ok(p)
    }

    pub fn origin(&self) -> EuclideanPoint<S> {
        EuclideanPoint(vec![S::zero(); self.dim])
    }

    fn check_pair(&self, x: &EuclideanPoint<S>, y: &EuclideanPoint<S>) -> Result<()> {
        self.validate(x)?;
        self.validate(y)
    }
}

impl<S: RealScalar> GeodesicSpace for Euclidean<S> {
    type Scalar = S;
    type Point = EuclideanPoint<S>;

    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn context(&self) -> &Context<S> {
        &self.ctx
    }

    fn validate(&self, p: &EuclideanPoint<S>) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::ModelMismatch(format!(
                "point of dimension {} in ℝ^{}",
                p.dim(),
                self.dim
            )));
        }
        if p.0.iter().any(|c| !Scalar::is_finite(c)) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(())
    }

    fn distance(&self, x: &EuclideanPoint<S>, y: &EuclideanPoint<S>) -> Result<S> {
        Ok(num_traits::Float::sqrt(self.distance_squared(x, y)?))
    }

    fn distance_squared(&self, x: &EuclideanPoint<S>, y: &EuclideanPoint<S>) -> Result<S> {
        self.check_pair(x, y)?;
        Ok(x.0
            .iter()
            .zip(&y.0)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .fold(S::zero(), |acc, v| acc + v))
    }

    fn geodesic(
        &self,
        x: &EuclideanPoint<S>,
        y: &EuclideanPoint<S>,
        lambda: &S,
    ) -> Result<EuclideanPoint<S>> {
        check_unit_interval(lambda)?;
        self.check_pair(x, y)?;
        let l = *lambda;
        Ok(EuclideanPoint(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| *a + l * (*b - *a))
                .collect(),
        ))
    }

    fn simpler_points(&self, p: &EuclideanPoint<S>) -> Vec<EuclideanPoint<S>> {
        let rounded = EuclideanPoint(p.0.iter().map(|c| num_traits::Float::round(*c)).collect());
        if rounded == *p {
            Vec::new()
        } else {
            vec![rounded]
        }
    }
}
