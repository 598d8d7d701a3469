//! The linear dual: finite formal sums `Σ wᵢ [→aᵢbᵢ]` acting on bound
//! vectors through the quasilinearization.
//!
//! A coefficient `α` in front of a class `[t→ab]` is folded into a single
//! weight `w = α·t`; evaluation and the norm only ever see the product.

use crate::error::{Error, Result};
use crate::quasilin::{qlin, BoundVector};
use crate::sampling::PointSampler;
use crate::scalar::Scalar;
use crate::spaces::GeodesicSpace;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct DualTerm<P, S> {
    pub weight: S,
    pub tail: P,
    pub head: P,
}

/// Element of the linear dual. The empty sum is the zero element.
///
/// Equality is equality of representations, not of the functionals they
/// induce; see [`equivalent`] for the latter.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement<P, S> {
    terms: Vec<DualTerm<P, S>>,
}

impl<P, S> Default for DualElement<P, S> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<P: Clone + PartialEq, S: Scalar> DualElement<P, S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `[t→ab]`.
    pub fn single(weight: S, tail: P, head: P) -> Self {
        Self::from_terms(vec![DualTerm { weight, tail, head }])
    }

    /// `[→ab]`.
    pub fn unit(tail: P, head: P) -> Self {
        Self::single(S::one(), tail, head)
    }

    /// Builds an element, dropping terms that are trivially zero (zero
    /// weight or zero bound vector). Like terms are kept separate.
    pub fn from_terms(terms: Vec<DualTerm<P, S>>) -> Self {
        Self {
            terms: terms
                .into_iter()
                .filter(|t| !t.weight.is_zero() && t.tail != t.head)
                .collect(),
        }
    }

    pub fn terms(&self) -> &[DualTerm<P, S>] {
        &self.terms
    }

    pub fn is_zero_representation(&self) -> bool {
        self.terms.is_empty()
    }

    /// Formal sum; terms are concatenated without merging.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| DualTerm {
                    weight: c.clone() * t.weight.clone(),
                    tail: t.tail.clone(),
                    head: t.head.clone(),
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    /// Merges terms over the same bound vector and drops the ones that
    /// cancel.
    pub fn canonicalize(&self) -> Self {
        let mut merged: Vec<DualTerm<P, S>> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged
                .iter_mut()
                .find(|m| m.tail == t.tail && m.head == t.head)
            {
                Some(m) => m.weight = m.weight.clone() + t.weight.clone(),
                None => merged.push(t.clone()),
            }
        }
        Self::from_terms(merged)
    }

    /// Linear combination `Σ cᵢ fᵢ`.
    pub fn combination<'a>(items: impl IntoIterator<Item = (&'a S, &'a Self)>) -> Self
    where
        P: 'a,
    {
        items
            .into_iter()
            .fold(Self::zero(), |acc, (c, f)| acc.add(&f.scale(c)))
    }

    /// Points that occur as a tail or head, without repetition.
    pub fn support_points(&self) -> Vec<P> {
        let mut out: Vec<P> = Vec::new();
        for t in &self.terms {
            for p in [&t.tail, &t.head] {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out
    }
}

/// `⟨f, →xy⟩ = Σ wᵢ ⟨→aᵢbᵢ, →xy⟩`.
pub fn evaluate<Sp: GeodesicSpace>(
    space: &Sp,
    f: &DualElement<Sp::Point, Sp::Scalar>,
    xy: &BoundVector<Sp::Point>,
) -> Result<Sp::Scalar> {
    let mut acc = Sp::Scalar::zero();
    for t in f.terms() {
        let pairing = qlin(space, &BoundVector::new(t.tail.clone(), t.head.clone()), xy)?;
        acc = acc + t.weight.clone() * pairing;
    }
    Ok(acc)
}

/// Norm of a single class, `‖[t→ab]‖ = |t| d(a,b)`.
pub fn norm_single<Sp: GeodesicSpace>(
    space: &Sp,
    t: &Sp::Scalar,
    a: &Sp::Point,
    b: &Sp::Point,
) -> Result<Sp::Scalar> {
    Ok(t.abs() * space.distance(a, b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormBounds<S> {
    /// Largest observed Lipschitz quotient.
    pub lower: S,
    /// Triangle-inequality bound `Σ |wᵢ| d(aᵢ,bᵢ)`.
    pub upper: S,
    /// Non-degenerate quadruples that entered the lower bound.
    pub quadruples: usize,
}

/// Certified bounds on the dual norm
///
/// ```text
/// ‖f‖ = sup |⟨f,→ab⟩ − ⟨f,→cd⟩| / (d(a,b) + d(c,d))
/// ```
///
/// The lower bound maximizes the quotient over `count` sampled quadruples
/// plus the reversal quadruples `(u, v, v, u)` for every pair of support
/// points of `f`; for a single class these attain the norm. Quadruples
/// with a zero denominator are skipped.
pub fn norm_bounds<Sp, Sm>(
    space: &Sp,
    f: &DualElement<Sp::Point, Sp::Scalar>,
    sampler: &mut Sm,
    count: usize,
) -> Result<NormBounds<Sp::Scalar>>
where
    Sp: GeodesicSpace,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    if count == 0 {
        return Err(Error::domain("norm bounds need at least one sample"));
    }
    let support = f.support_points();
    let mut quads = Vec::new();
    for u in &support {
        for v in &support {
            if u != v {
                quads.push([u.clone(), v.clone(), v.clone(), u.clone()]);
            }
        }
    }
    for _ in 0..count {
        quads.push(std::array::from_fn(|_| sampler.sample_point()));
    }
    norm_bounds_over(space, f, &quads)
}

/// [`norm_bounds`] over an explicit list of quadruples `(a, b, c, d)`.
pub fn norm_bounds_over<Sp: GeodesicSpace>(
    space: &Sp,
    f: &DualElement<Sp::Point, Sp::Scalar>,
    quadruples: &[[Sp::Point; 4]],
) -> Result<NormBounds<Sp::Scalar>> {
    let mut upper = Sp::Scalar::zero();
    for t in f.terms() {
        upper = upper + norm_single(space, &t.weight, &t.tail, &t.head)?;
    }
    let mut lower = Sp::Scalar::zero();
    let mut used = 0;
    for [a, b, c, d] in quadruples {
        let denom = space.distance(a, b)? + space.distance(c, d)?;
        if denom.is_zero() {
            continue;
        }
        let num = evaluate(space, f, &BoundVector::new(a.clone(), b.clone()))?
            - evaluate(space, f, &BoundVector::new(c.clone(), d.clone()))?;
        used += 1;
        lower = lower.max_of(num.abs() / denom);
    }
    // float noise must not break the sandwich
    let lower = if Sp::Scalar::is_exact() {
        lower
    } else {
        lower.min_of(upper.clone())
    };
    Ok(NormBounds {
        lower,
        upper,
        quadruples: used,
    })
}

/// Whether `f` and `g` agree on every witness bound vector, up to `tol`.
///
/// A `false` answer is a proof of inequivalence; `true` only means no
/// witness told them apart.
pub fn equivalent<Sp: GeodesicSpace>(
    space: &Sp,
    f: &DualElement<Sp::Point, Sp::Scalar>,
    g: &DualElement<Sp::Point, Sp::Scalar>,
    witnesses: &[BoundVector<Sp::Point>],
    tol: &Sp::Scalar,
) -> Result<bool> {
    if witnesses.is_empty() {
        return Err(Error::domain(
            "equivalence check needs at least one witness",
        ));
    }
    for w in witnesses {
        let diff = evaluate(space, f, w)? - evaluate(space, g, w)?;
        if diff.abs() > *tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All ordered pairs over `points` plus `extra` sampled points, as bound
/// vectors. The default witness set for [`equivalent`].
pub fn witness_set<P, Sm>(points: &[P], sampler: &mut Sm, extra: usize) -> Vec<BoundVector<P>>
where
    P: Clone + PartialEq,
    Sm: PointSampler<Point = P>,
{
    let mut pool: Vec<P> = Vec::new();
    for p in points
        .iter()
        .cloned()
        .chain((0..extra).map(|_| sampler.sample_point()))
    {
        if !pool.contains(&p) {
            pool.push(p);
        }
    }
    let mut out = Vec::with_capacity(pool.len() * pool.len());
    for a in &pool {
        for b in &pool {
            if a != b {
                out.push(BoundVector::new(a.clone(), b.clone()));
            }
        }
    }
    out
}
