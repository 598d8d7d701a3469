//! Sampled flatness classification.
//!
//! Three residuals are tested, each zero everywhere exactly when the space
//! is flat: CN equality, the projection identity
//! `⟨→x((1-λ)x⊕λy), →ab⟩ = λ⟨→xy, →ab⟩`, and affinity of the potentials
//! `φ_pz`. On a single instance they are linked through the CN residual
//! `R(w)` at matched points:
//!
//! ```text
//! projection(x, y, a, b, λ) = ½ (R(b) − R(a))
//! phi_affine(p, z, x, y, λ) = ½ (R(p) − R(z))
//! ```
//!
//! A nonzero residual proves non-flatness. Samples never prove flatness,
//! hence the verdict name [`Verdict::FlatOnSamples`].

use crate::error::{Error, Result};
use crate::quasilin::{phi, qlin, BoundVector};
use crate::sampling::PointSampler;
use crate::scalar::{Context, Scalar};
use crate::spaces::GeodesicSpace;
use num_traits::{One, Signed};

/// `(1-λ)d(z,x)² + λd(z,y)² − λ(1-λ)d(x,y)² − d(z,(1-λ)x⊕λy)²`, which is
/// nonnegative in any CAT(0) space.
pub fn cn_residual<Sp: GeodesicSpace>(
    space: &Sp,
    z: &Sp::Point,
    x: &Sp::Point,
    y: &Sp::Point,
    lambda: &Sp::Scalar,
) -> Result<Sp::Scalar> {
    let m = space.geodesic(x, y, lambda)?;
    let l = lambda.clone();
    let one_minus = Sp::Scalar::one() - l.clone();
    Ok(one_minus.clone() * space.distance_squared(z, x)?
        + l.clone() * space.distance_squared(z, y)?
        - l * one_minus * space.distance_squared(x, y)?
        - space.distance_squared(z, &m)?)
}

/// `⟨→x((1-λ)x⊕λy), →ab⟩ − λ⟨→xy, →ab⟩`.
pub fn projection_residual<Sp: GeodesicSpace>(
    space: &Sp,
    x: &Sp::Point,
    y: &Sp::Point,
    a: &Sp::Point,
    b: &Sp::Point,
    lambda: &Sp::Scalar,
) -> Result<Sp::Scalar> {
    let m = space.geodesic(x, y, lambda)?;
    let ab = BoundVector::new(a.clone(), b.clone());
    Ok(qlin(space, &BoundVector::new(x.clone(), m), &ab)?
        - lambda.clone() * qlin(space, &BoundVector::new(x.clone(), y.clone()), &ab)?)
}

/// `(1-λ)φ_pz(x) + λφ_pz(y) − φ_pz((1-λ)x⊕λy)`; nonnegative when `φ_pz` is
/// convex along the segment.
pub fn phi_affine_residual<Sp: GeodesicSpace>(
    space: &Sp,
    p: &Sp::Point,
    z: &Sp::Point,
    x: &Sp::Point,
    y: &Sp::Point,
    lambda: &Sp::Scalar,
) -> Result<Sp::Scalar> {
    let m = space.geodesic(x, y, lambda)?;
    let pz = BoundVector::new(p.clone(), z.clone());
    let l = lambda.clone();
    Ok(
        (Sp::Scalar::one() - l.clone()) * phi(space, &pz, x)? + l * phi(space, &pz, y)?
            - phi(space, &pz, &m)?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    CnEquality,
    Projection,
    PhiAffine,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::CnEquality => "cn-equality",
            Criterion::Projection => "projection",
            Criterion::PhiAffine => "phi-affine",
        }
    }

    /// Meaning of the witness points, in order.
    pub fn point_roles(self) -> &'static [&'static str] {
        match self {
            Criterion::CnEquality => &["z", "x", "y"],
            Criterion::Projection => &["x", "y", "a", "b"],
            Criterion::PhiAffine => &["p", "z", "x", "y"],
        }
    }

    fn residual<Sp: GeodesicSpace>(
        self,
        space: &Sp,
        pts: &[Sp::Point],
        lambda: &Sp::Scalar,
    ) -> Result<Sp::Scalar> {
        match self {
            Criterion::CnEquality => cn_residual(space, &pts[0], &pts[1], &pts[2], lambda),
            Criterion::Projection => {
                projection_residual(space, &pts[0], &pts[1], &pts[2], &pts[3], lambda)
            }
            Criterion::PhiAffine => {
                phi_affine_residual(space, &pts[0], &pts[1], &pts[2], &pts[3], lambda)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FlatOnSamples,
    NonFlat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessWitness<P, S> {
    pub criterion: Criterion,
    /// Points in the order given by [`Criterion::point_roles`].
    pub points: Vec<P>,
    pub lambda: S,
    pub residual: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessVerdict<P, S> {
    pub verdict: Verdict,
    pub samples: usize,
    pub witness: Option<FlatnessWitness<P, S>>,
}

/// Runs the three residual tests on `count` sampled instances and stops at
/// the first residual exceeding `tol`, which is then shrunk toward simpler
/// coordinates while it stays nonzero.
pub fn classify_flat<Sp, Sm>(
    space: &Sp,
    sampler: &mut Sm,
    count: usize,
    tol: &Sp::Scalar,
) -> Result<FlatnessVerdict<Sp::Point, Sp::Scalar>>
where
    Sp: GeodesicSpace,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    if count == 0 {
        return Err(Error::domain(
            "flatness classification needs at least one sample",
        ));
    }
    let ctx = Context::with_tolerance(tol.clone());
    for n in 1..=count {
        let pts: Vec<Sp::Point> = (0..5).map(|_| sampler.sample_point()).collect();
        let lambda = sampler.sample_unit();
        let (z, x, y, a, b) = (&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]);
        let instances = [
            (Criterion::CnEquality, vec![z.clone(), x.clone(), y.clone()]),
            (
                Criterion::Projection,
                vec![x.clone(), y.clone(), a.clone(), b.clone()],
            ),
            (
                Criterion::PhiAffine,
                vec![a.clone(), b.clone(), x.clone(), y.clone()],
            ),
        ];
        for (criterion, points) in instances {
            let residual = criterion.residual(space, &points, &lambda)?;
            if !ctx.is_zero(&residual) {
                let witness = minimize_witness(
                    space,
                    &ctx,
                    FlatnessWitness {
                        criterion,
                        points,
                        lambda: lambda.clone(),
                        residual,
                    },
                )?;
                return Ok(FlatnessVerdict {
                    verdict: Verdict::NonFlat,
                    samples: n,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(FlatnessVerdict {
        verdict: Verdict::FlatOnSamples,
        samples: count,
        witness: None,
    })
}

fn simple_lambdas<S: Scalar>() -> Vec<S> {
    let mut out = Vec::new();
    for denom in 2..=12i64 {
        for numer in 1..denom {
            if num_integer::gcd(numer, denom) == 1 {
                out.push(S::from_ratio(numer, denom));
            }
        }
    }
    out
}

/// Replaces λ by the simplest fraction, then each point by the simplest
/// nearby point, that keeps the residual above tolerance.
fn minimize_witness<Sp: GeodesicSpace>(
    space: &Sp,
    ctx: &Context<Sp::Scalar>,
    mut w: FlatnessWitness<Sp::Point, Sp::Scalar>,
) -> Result<FlatnessWitness<Sp::Point, Sp::Scalar>> {
    for l in simple_lambdas::<Sp::Scalar>() {
        let r = w.criterion.residual(space, &w.points, &l)?;
        if !ctx.is_zero(&r) {
            w.lambda = l;
            w.residual = r;
            break;
        }
    }
    for k in 0..w.points.len() {
        for candidate in space.simpler_points(&w.points[k]) {
            let mut pts = w.points.clone();
            pts[k] = candidate;
            let r = w.criterion.residual(space, &pts, &w.lambda)?;
            if !ctx.is_zero(&r) && r.abs() > ctx.tol {
                w.points = pts;
                w.residual = r;
                break;
            }
        }
    }
    Ok(w)
}
