//! Quasilinearization: the pairing of bound vectors built from squared
//! distances alone,
//!
//! ```text
//! ⟨ab, cd⟩ = ½ (d(a,d)² + d(b,c)² − d(a,c)² − d(b,d)²)
//! ```
//!
//! together with the potentials `φ_xy(z) = ½ (d(x,z)² − d(y,z)²)`.

use crate::error::Result;
use crate::sampling::PointSampler;
use crate::scalar::Scalar;
use crate::spaces::GeodesicSpace;

/// Ordered pair of points, written →xy.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundVector<P> {
    pub tail: P,
    pub head: P,
}

impl<P: Clone> BoundVector<P> {
    pub fn new(tail: P, head: P) -> Self {
        Self { tail, head }
    }

    /// The zero bound vector at `p`.
    pub fn zero_at(p: P) -> Self {
        Self {
            tail: p.clone(),
            head: p,
        }
    }

    /// −→xy = →yx.
    pub fn reversed(&self) -> Self {
        Self {
            tail: self.head.clone(),
            head: self.tail.clone(),
        }
    }
}

pub fn qlin<Sp: GeodesicSpace>(
    space: &Sp,
    ab: &BoundVector<Sp::Point>,
    cd: &BoundVector<Sp::Point>,
) -> Result<Sp::Scalar> {
    let (a, b, c, d) = (&ab.tail, &ab.head, &cd.tail, &cd.head);
    let sum = space.distance_squared(a, d)? + space.distance_squared(b, c)?
        - space.distance_squared(a, c)?
        - space.distance_squared(b, d)?;
    Ok(Sp::Scalar::half() * sum)
}

pub fn phi<Sp: GeodesicSpace>(
    space: &Sp,
    xy: &BoundVector<Sp::Point>,
    z: &Sp::Point,
) -> Result<Sp::Scalar> {
    let diff = space.distance_squared(&xy.tail, z)? - space.distance_squared(&xy.head, z)?;
    Ok(Sp::Scalar::half() * diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// ⟨ab,cd⟩ = φ_cd(b) − φ_cd(a) = φ_ab(d) − φ_ab(c)
    PhiDecomposition,
    /// ⟨ba,cd⟩ = −⟨ab,cd⟩ and ⟨ab,dc⟩ = −⟨ab,cd⟩
    Antisymmetry,
    /// ⟨ab,cd⟩ = ⟨ax,cd⟩ + ⟨xb,cd⟩
    Telescoping,
    /// ⟨ab,cd⟩ ≤ d(a,b) d(c,d)
    CauchySchwarz,
}

impl Identity {
    pub const ALL: [Identity; 4] = [
        Identity::PhiDecomposition,
        Identity::Antisymmetry,
        Identity::Telescoping,
        Identity::CauchySchwarz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::PhiDecomposition => "phi-decomposition",
            Identity::Antisymmetry => "antisymmetry",
            Identity::Telescoping => "telescoping",
            Identity::CauchySchwarz => "cauchy-schwarz",
        }
    }
}

/// A sampled instance on which an identity failed. `points` holds
/// `a, b, c, d` and, for telescoping, the intermediate point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityWitness<P, S> {
    pub points: Vec<P>,
    pub lhs: S,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityOutcome<P, S> {
    pub identity: Identity,
    pub checked: usize,
    pub failures: usize,
    pub first_witness: Option<IdentityWitness<P, S>>,
}

impl<P, S> IdentityOutcome<P, S> {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<P, S> {
    pub samples: usize,
    pub outcomes: Vec<IdentityOutcome<P, S>>,
}

impl<P, S> IdentityReport<P, S> {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(IdentityOutcome::passed)
    }

    pub fn outcome(&self, identity: Identity) -> &IdentityOutcome<P, S> {
        self.outcomes
            .iter()
            .find(|o| o.identity == identity)
            .expect("every identity is reported")
    }
}

/// Checks the quasilinearization identities and the Cauchy-Schwarz
/// inequality on `count` sampled quadruples (plus one extra point for
/// telescoping). Equalities are exact in exact mode and use the model
/// tolerance otherwise.
pub fn check_identities<Sp, Sm>(
    space: &Sp,
    sampler: &mut Sm,
    count: usize,
) -> Result<IdentityReport<Sp::Point, Sp::Scalar>>
where
    Sp: GeodesicSpace,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let ctx = space.context();
    let mut outcomes: Vec<IdentityOutcome<Sp::Point, Sp::Scalar>> = Identity::ALL
        .iter()
        .map(|&identity| IdentityOutcome {
            identity,
            checked: 0,
            failures: 0,
            first_witness: None,
        })
        .collect();

    let mut record =
        |idx: usize, ok: bool, points: &[Sp::Point], lhs: Sp::Scalar, rhs: Sp::Scalar| {
            let o = &mut outcomes[idx];
            o.checked += 1;
            if !ok {
                o.failures += 1;
                if o.first_witness.is_none() {
                    o.first_witness = Some(IdentityWitness {
                        points: points.to_vec(),
                        lhs,
                        rhs,
                    });
                }
            }
        };

    for _ in 0..count {
        let pts: Vec<Sp::Point> = (0..5).map(|_| sampler.sample_point()).collect();
        let (a, b, c, d, x) = (&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]);
        let ab = BoundVector::new(a.clone(), b.clone());
        let cd = BoundVector::new(c.clone(), d.clone());
        let quad = &pts[..4];
        let value = qlin(space, &ab, &cd)?;

        let via_cd = phi(space, &cd, b)? - phi(space, &cd, a)?;
        let via_ab = phi(space, &ab, d)? - phi(space, &ab, c)?;
        let ok = ctx.approx_eq(&value, &via_cd) && ctx.approx_eq(&value, &via_ab);
        let worst = if ctx.approx_eq(&value, &via_cd) {
            via_ab
        } else {
            via_cd
        };
        record(0, ok, quad, value.clone(), worst);

        let ba = qlin(space, &ab.reversed(), &cd)?;
        let dc = qlin(space, &ab, &cd.reversed())?;
        let neg = -value.clone();
        let ok = ctx.approx_eq(&ba, &neg) && ctx.approx_eq(&dc, &neg);
        let worst = if ctx.approx_eq(&ba, &neg) { dc } else { ba };
        record(1, ok, quad, worst, neg);

        let ax = qlin(space, &BoundVector::new(a.clone(), x.clone()), &cd)?;
        let xb = qlin(space, &BoundVector::new(x.clone(), b.clone()), &cd)?;
        let split = ax + xb;
        record(2, ctx.approx_eq(&value, &split), &pts, value.clone(), split);

        let bound = space.distance(a, b)? * space.distance(c, d)?;
        record(3, ctx.le(&value, &bound), quad, value, bound);
    }

    Ok(IdentityReport {
        samples: count,
        outcomes,
    })
}
