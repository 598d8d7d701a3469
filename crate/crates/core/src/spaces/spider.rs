use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Context, Scalar};

use super::{check_unit_interval, GeodesicSpace};

/// Point `[(branch, radius)]` of the spider tree.
///
/// All points at radius 0 are the same point (the hub); they are stored
/// canonically as `(1, 0)` so that derived equality is the quotient equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpiderPoint<S> {
    branch: u32,
    radius: S,
}

impl<S: Scalar> SpiderPoint<S> {
    pub fn new(branch: u32, radius: S) -> Result<Self> {
        if branch == 0 {
            return Err(Error::InvalidPoint(
                "spider branches are numbered from 1".into(),
            ));
        }
        if !radius.is_finite() || radius < S::zero() || radius > S::one() {
            return Err(Error::InvalidPoint(format!(
                "spider radius {radius} is outside [0, 1]"
            )));
        }
        Ok(Self::canonical(branch, radius))
    }

    pub fn hub() -> Self {
        Self {
            branch: 1,
            radius: S::zero(),
        }
    }

    fn canonical(branch: u32, radius: S) -> Self {
        if radius.is_zero() {
            Self::hub()
        } else {
            Self { branch, radius }
        }
    }

    pub fn branch(&self) -> u32 {
        self.branch
    }

    pub fn radius(&self) -> &S {
        &self.radius
    }

    pub fn is_hub(&self) -> bool {
        self.radius.is_zero()
    }
}

impl<S: Scalar> fmt::Display for SpiderPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[({}, {})]", self.branch, self.radius.render())
    }
}

/// Countably many unit segments glued at their origin:
///
/// ```text
/// d([(n,t)], [(m,s)]) = |t - s|   if n = m
///                     = t + s     otherwise
/// ```
///
/// An ℝ-tree, hence a Hadamard space, but not a flat one. Distances and
/// geodesics are rational in the coordinates, so the model runs exactly
/// over [`crate::Rational`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spider<S> {
    ctx: Context<S>,
}

impl<S: Scalar> Default for Spider<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Spider<S> {
    pub fn new() -> Self {
        Self {
            ctx: Context::default(),
        }
    }

    pub fn with_context(ctx: Context<S>) -> Self {
        Self { ctx }
    }

    pub fn point(&self, branch: u32, radius: S) -> Result<SpiderPoint<S>> {
        SpiderPoint::new(branch, radius)
    }

    fn same_branch(x: &SpiderPoint<S>, y: &SpiderPoint<S>) -> bool {
        x.branch == y.branch || x.is_hub() || y.is_hub()
    }
}

impl<S: Scalar> GeodesicSpace for Spider<S> {
    type Scalar = S;
    type Point = SpiderPoint<S>;

    fn name(&self) -> &'static str {
        "spider"
    }

    fn context(&self) -> &Context<S> {
        &self.ctx
    }

    fn validate(&self, p: &SpiderPoint<S>) -> Result<()> {
        SpiderPoint::new(p.branch, p.radius.clone()).map(|_| ())
    }

    fn distance(&self, x: &SpiderPoint<S>, y: &SpiderPoint<S>) -> Result<S> {
        let (t, s) = (x.radius.clone(), y.radius.clone());
        Ok(if x.branch == y.branch {
            (t - s).abs()
        } else {
            t + s
        })
    }

    fn geodesic(
        &self,
        x: &SpiderPoint<S>,
        y: &SpiderPoint<S>,
        lambda: &S,
    ) -> Result<SpiderPoint<S>> {
        check_unit_interval(lambda)?;
        if x == y {
            return Ok(x.clone());
        }
        let l = lambda.clone();
        let (t, s) = (x.radius.clone(), y.radius.clone());
        if Self::same_branch(x, y) {
            // one segment: interpolate radii along it
            let branch = if x.is_hub() { y.branch } else { x.branch };
            let r = (S::one() - l.clone()) * t + l * s;
            return Ok(SpiderPoint::canonical(branch, r));
        }
        // through the hub: walk inward on x's branch, then outward on y's
        let walked = l * (t.clone() + s);
        if walked <= t {
            Ok(SpiderPoint::canonical(x.branch, t - walked))
        } else {
            Ok(SpiderPoint::canonical(y.branch, walked - t))
        }
    }

    fn breakpoints(&self, x: &SpiderPoint<S>, y: &SpiderPoint<S>) -> Vec<S> {
        if Self::same_branch(x, y) {
            return Vec::new();
        }
        let t = x.radius.clone();
        vec![t.clone() / (t + y.radius.clone())]
    }

    /// Unit-fraction radii `1/2, …, 1/6, 1` on the same branch.
    fn simpler_points(&self, p: &SpiderPoint<S>) -> Vec<SpiderPoint<S>> {
        (2..=7i64)
            .map(|q| {
                if q == 7 {
                    S::one()
                } else {
                    S::from_ratio(1, q)
                }
            })
            .filter(|r| *r != p.radius)
            .map(|r| SpiderPoint::canonical(p.branch, r))
            .collect()
    }
}
