//! Relations `M ⊆ X × X⋄` and the checks built on them.
//!
//! Universal statements over geodesics (the 𝒲-property) are checked on a
//! finite λ grid augmented with the model's breakpoints. A violation is a
//! proof; a clean run only means no violation was found on that grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dual::{evaluate, DualElement};
use crate::error::{Error, Result};
use crate::quasilin::BoundVector;
use crate::sampling::simplex_weights;
use crate::scalar::{Context, Scalar};
use crate::spaces::{convex_combination, validate_simplex_weights, GeodesicSpace};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct RelationPair<P, S> {
    pub point: P,
    pub dual: DualElement<P, S>,
}

/// Finite relation, kept in insertion order. Distinct pairs may share a
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation<P, S> {
    pairs: Vec<RelationPair<P, S>>,
}

impl<P, S> Default for Relation<P, S> {
    fn default() -> Self {
        Self { pairs: Vec::new() }
    }
}

impl<P: Clone + PartialEq, S: Scalar> Relation<P, S> {
    pub fn new(pairs: Vec<RelationPair<P, S>>) -> Self {
        Self { pairs }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (P, DualElement<P, S>)>) -> Self {
        Self {
            pairs: pairs
                .into_iter()
                .map(|(point, dual)| RelationPair { point, dual })
                .collect(),
        }
    }

    pub fn push(&mut self, point: P, dual: DualElement<P, S>) {
        self.pairs.push(RelationPair { point, dual });
    }

    /// A copy with one more pair appended.
    pub fn augmented(&self, point: P, dual: DualElement<P, S>) -> Self {
        let mut out = self.clone();
        out.push(point, dual);
        out
    }

    pub fn pairs(&self) -> &[RelationPair<P, S>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Distinct points, in first-occurrence order.
    pub fn domain(&self) -> Vec<P> {
        let mut out: Vec<P> = Vec::new();
        for pair in &self.pairs {
            if !out.contains(&pair.point) {
                out.push(pair.point.clone());
            }
        }
        out
    }

    /// Distinct dual elements (by representation), in first-occurrence order.
    pub fn range(&self) -> Vec<DualElement<P, S>> {
        let mut out: Vec<DualElement<P, S>> = Vec::new();
        for pair in &self.pairs {
            if !out.contains(&pair.dual) {
                out.push(pair.dual.clone());
            }
        }
        out
    }
}

/// `⟨u⋄ − v⋄, →vu⟩` for pairs `(u, u⋄)` and `(v, v⋄)`. Symmetric in the
/// two pairs.
pub fn pair_margin<Sp: GeodesicSpace>(
    space: &Sp,
    u: &RelationPair<Sp::Point, Sp::Scalar>,
    v: &RelationPair<Sp::Point, Sp::Scalar>,
) -> Result<Sp::Scalar> {
    let vu = BoundVector::new(v.point.clone(), u.point.clone());
    Ok(evaluate(space, &u.dual, &vu)? - evaluate(space, &v.dual, &vu)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneWitness<S> {
    pub first: usize,
    pub second: usize,
    pub margin: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<S> {
    pub monotone: bool,
    pub pairs_checked: usize,
    /// Smallest pairwise margin; `None` for fewer than two pairs.
    pub min_margin: Option<S>,
    /// First violating pair in index order.
    pub witness: Option<MonotoneWitness<S>>,
}

/// Checks every unordered pair of `relation`, tolerating margins down to
/// `-ctx.tol` of the space model.
pub fn is_monotone<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
) -> Result<MonotonicityReport<Sp::Scalar>> {
    is_monotone_within(space, relation, &space.context().tol)
}

pub fn is_monotone_within<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    tol: &Sp::Scalar,
) -> Result<MonotonicityReport<Sp::Scalar>> {
    let pairs = relation.pairs();
    let rows: Vec<Vec<Sp::Scalar>> = (0..pairs.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..pairs.len())
                .map(|j| pair_margin(space, &pairs[i], &pairs[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let floor = -tol.clone();
    let mut report = MonotonicityReport {
        monotone: true,
        pairs_checked: 0,
        min_margin: None,
        witness: None,
    };
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, margin) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            report.pairs_checked += 1;
            if report.min_margin.as_ref().is_none_or(|m| margin < *m) {
                report.min_margin = Some(margin.clone());
            }
            if margin < floor && report.witness.is_none() {
                report.monotone = false;
                report.witness = Some(MonotoneWitness {
                    first: i,
                    second: j,
                    margin,
                });
            }
        }
    }
    Ok(report)
}

/// `k/steps` for `k = 0..=steps`.
pub fn lambda_grid<S: Scalar>(steps: u32) -> Vec<S> {
    let steps = steps.max(1) as i64;
    (0..=steps)
        .map(|k| crate::scalar::ratio(k, steps))
        .collect()
}

/// Instance on which the 𝒲 inequality
/// `⟨x⋄, →p((1-λ)x₁⊕λx₂)⟩ ≤ (1-λ)⟨x⋄,→px₁⟩ + λ⟨x⋄,→px₂⟩` fails.
#[derive(Debug, Clone, PartialEq)]
pub struct WWitness<P, S> {
    pub base: P,
    pub dual: DualElement<P, S>,
    pub x1: P,
    pub x2: P,
    pub lambda: S,
    pub lhs: S,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WReport<P, S> {
    pub checks: usize,
    pub violations: usize,
    /// Whether a violation was found, per base point (input order).
    pub violated_at_base: Vec<bool>,
    pub first_violation: Option<WWitness<P, S>>,
}

impl<P, S> WReport<P, S> {
    /// No violation found on the grid.
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    /// Same verdict at every base point.
    pub fn base_point_invariant(&self) -> bool {
        self.violated_at_base.windows(2).all(|w| w[0] == w[1])
    }
}

/// Looks for violations of the 𝒲 inequality for every base point, every
/// `x⋄ ∈ Range(M)`, every ordered `(x₁, x₂) ∈ Dom(M)²` and every λ in
/// `lambda_grid` plus the geodesic breakpoints of `(x₁, x₂)`.
pub fn check_w_property<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    base_points: &[Sp::Point],
    lambda_grid: &[Sp::Scalar],
) -> Result<WReport<Sp::Point, Sp::Scalar>> {
    for l in lambda_grid {
        crate::spaces::check_unit_interval(l)?;
    }
    let ctx = space.context();
    let domain = relation.domain();
    let range = relation.range();

    // geodesic points do not depend on the base point or the dual element
    let mut segments = Vec::with_capacity(domain.len() * domain.len());
    for x1 in &domain {
        for x2 in &domain {
            let mut lambdas: Vec<Sp::Scalar> = lambda_grid.to_vec();
            for b in space.breakpoints(x1, x2) {
                if !lambdas.contains(&b) {
                    lambdas.push(b);
                }
            }
            let points = lambdas
                .iter()
                .map(|l| space.geodesic(x1, x2, l))
                .collect::<Result<Vec<_>>>()?;
            segments.push((x1, x2, lambdas, points));
        }
    }

    let mut report = WReport {
        checks: 0,
        violations: 0,
        violated_at_base: Vec::with_capacity(base_points.len()),
        first_violation: None,
    };
    for p in base_points {
        let mut violated = false;
        for dual in &range {
            let at = |z: &Sp::Point| evaluate(space, dual, &BoundVector::new(p.clone(), z.clone()));
            let values = domain.iter().map(&at).collect::<Result<Vec<_>>>()?;
            for (k, (x1, x2, lambdas, points)) in segments.iter().enumerate() {
                let (v1, v2) = (&values[k / domain.len()], &values[k % domain.len()]);
                for (l, z) in lambdas.iter().zip(points) {
                    report.checks += 1;
                    let lhs = at(z)?;
                    let rhs = (Sp::Scalar::one() - l.clone()) * v1.clone() + l.clone() * v2.clone();
                    if !ctx.le(&lhs, &rhs) {
                        violated = true;
                        report.violations += 1;
                        if report.first_violation.is_none() {
                            report.first_violation = Some(WWitness {
                                base: p.clone(),
                                dual: dual.clone(),
                                x1: (*x1).clone(),
                                x2: (*x2).clone(),
                                lambda: l.clone(),
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
            }
        }
        report.violated_at_base.push(violated);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WnReport<P, S> {
    pub combination: P,
    /// `(lhs, rhs)` per element of `Range(M)`.
    pub values: Vec<(S, S)>,
    /// Index into `Range(M)` of the first violated inequality.
    pub first_violation: Option<usize>,
}

impl<P, S> WnReport<P, S> {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// The n-ary form `⟨x⋄, →q(⊕λᵢxᵢ)⟩ ≤ Σλᵢ⟨x⋄,→qxᵢ⟩` for every
/// `x⋄ ∈ Range(M)`, with `xᵢ` the points of the pairs at `indices`.
pub fn check_wn<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    q: &Sp::Point,
    indices: &[usize],
    weights: &[Sp::Scalar],
) -> Result<WnReport<Sp::Point, Sp::Scalar>> {
    let pairs = relation.pairs();
    let points = indices
        .iter()
        .map(|&i| {
            pairs
                .get(i)
                .map(|p| p.point.clone())
                .ok_or_else(|| Error::domain(format!("pair index {i} out of range")))
        })
        .collect::<Result<Vec<_>>>()?;
    let combination = convex_combination(space, &points, weights)?;
    let ctx = space.context();
    let mut values = Vec::new();
    let mut first_violation = None;
    for (k, dual) in relation.range().iter().enumerate() {
        let lhs = evaluate(
            space,
            dual,
            &BoundVector::new(q.clone(), combination.clone()),
        )?;
        let mut rhs = Sp::Scalar::zero();
        for (x, w) in points.iter().zip(weights) {
            rhs = rhs + w.clone() * evaluate(space, dual, &BoundVector::new(q.clone(), x.clone()))?;
        }
        if !ctx.le(&lhs, &rhs) && first_violation.is_none() {
            first_violation = Some(k);
        }
        values.push((lhs, rhs));
    }
    Ok(WnReport {
        combination,
        values,
        first_violation,
    })
}

/// Finitely supported probability weights over the pairs of a relation.
/// The entry order is significant: it fixes the fold order of `α(η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction<S> {
    entries: Vec<(usize, S)>,
}

impl<S: Scalar> SupportFunction<S> {
    /// Validates distinct indices below `relation_len`, positive weights and
    /// unit total (exact, or within `ctx.tol`).
    pub fn new(entries: Vec<(usize, S)>, relation_len: usize, ctx: &Context<S>) -> Result<Self> {
        for (k, (i, _)) in entries.iter().enumerate() {
            if *i >= relation_len {
                return Err(Error::domain(format!(
                    "support index {i} out of range for {relation_len} pairs"
                )));
            }
            if entries[..k].iter().any(|(j, _)| j == i) {
                return Err(Error::domain(format!("support index {i} repeated")));
            }
        }
        let weights: Vec<S> = entries.iter().map(|(_, w)| w.clone()).collect();
        validate_simplex_weights(ctx, &weights, entries.len())?;
        Ok(Self { entries })
    }

    /// Point mass at pair `index`.
    pub fn delta(index: usize) -> Self {
        Self {
            entries: vec![(index, S::one())],
        }
    }

    /// `½δᵢ + ½δⱼ`.
    pub fn midpoint(i: usize, j: usize) -> Self {
        Self {
            entries: vec![(i, S::half()), (j, S::half())],
        }
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Seeded sampler of support functions: support size uniform in
/// `1..=min(max_support, |M|)`, indices drawn without replacement in random
/// order, weights from [`simplex_weights`].
#[derive(Debug, Clone)]
pub struct EtaSampler {
    rng: ChaCha8Rng,
    max_support: usize,
}

impl EtaSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_max_support(seed, 5)
    }

    pub fn with_max_support(seed: u64, max_support: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_support: max_support.max(1),
        }
    }

    /// `None` when the relation is empty.
    pub fn sample<S: Scalar>(&mut self, relation_len: usize) -> Option<SupportFunction<S>> {
        if relation_len == 0 {
            return None;
        }
        let size = self.rng.gen_range(1..=self.max_support.min(relation_len));
        let indices = rand::seq::index::sample(&mut self.rng, relation_len, size).into_vec();
        let weights = simplex_weights::<S>(&mut self.rng, size);
        Some(SupportFunction {
            entries: indices.into_iter().zip(weights).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaReport<P, S> {
    /// `α(η) = ⊕ λᵢxᵢ`.
    pub alpha: P,
    /// `β(η) = Σ λᵢxᵢ⋄`.
    pub beta: DualElement<P, S>,
    /// `θ_p(η) = Σ λᵢ⟨xᵢ⋄, →pxᵢ⟩`.
    pub theta_p: S,
    /// `⟨β(η), →pα(η)⟩`.
    pub rhs: S,
    pub member: bool,
}

impl<P, S: Scalar> ThetaReport<P, S> {
    pub fn gap(&self) -> S {
        self.theta_p.clone() - self.rhs.clone()
    }
}

fn check_support<S: Scalar>(eta: &SupportFunction<S>, len: usize) -> Result<()> {
    if eta.is_empty() {
        return Err(Error::domain("support function is empty"));
    }
    match eta.entries().iter().find(|(i, _)| *i >= len) {
        Some((i, _)) => Err(Error::domain(format!("support index {i} out of range"))),
        None => Ok(()),
    }
}

/// Evaluates `θ_p(η)` against `⟨β(η), →pα(η)⟩`; `η` is a member of `Θ_{p,M}`
/// when the former is at least the latter.
pub fn theta_evaluate<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    eta: &SupportFunction<Sp::Scalar>,
    p: &Sp::Point,
) -> Result<ThetaReport<Sp::Point, Sp::Scalar>> {
    let pairs = relation.pairs();
    check_support(eta, pairs.len())?;
    let points: Vec<Sp::Point> = eta
        .entries()
        .iter()
        .map(|(i, _)| pairs[*i].point.clone())
        .collect();
    let weights: Vec<Sp::Scalar> = eta.entries().iter().map(|(_, w)| w.clone()).collect();
    let alpha = convex_combination(space, &points, &weights)?;
    let beta = DualElement::combination(eta.entries().iter().map(|(i, w)| (w, &pairs[*i].dual)));
    let mut theta_p = Sp::Scalar::zero();
    for (i, w) in eta.entries() {
        let pair = &pairs[*i];
        let v = evaluate(
            space,
            &pair.dual,
            &BoundVector::new(p.clone(), pair.point.clone()),
        )?;
        theta_p = theta_p + w.clone() * v;
    }
    let rhs = evaluate(space, &beta, &BoundVector::new(p.clone(), alpha.clone()))?;
    let member = space.context().ge(&theta_p, &rhs);
    Ok(ThetaReport {
        alpha,
        beta,
        theta_p,
        rhs,
        member,
    })
}

/// `½ ΣᵢΣⱼ λᵢλⱼ ⟨xᵢ⋄ − xⱼ⋄, →xⱼxᵢ⟩`, computed from pairwise margins. In a
/// flat space this equals `θ_p(η) − ⟨β(η), →pα(η)⟩`.
pub fn pairwise_theta_gap<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    eta: &SupportFunction<Sp::Scalar>,
) -> Result<Sp::Scalar> {
    let pairs = relation.pairs();
    check_support(eta, pairs.len())?;
    let e = eta.entries();
    let mut acc = Sp::Scalar::zero();
    for a in 0..e.len() {
        for b in (a + 1)..e.len() {
            let m = pair_margin(space, &pairs[e[a].0], &pairs[e[b].0])?;
            acc = acc + e[a].1.clone() * e[b].1.clone() * m;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PIndependenceReport<S> {
    pub members: Vec<bool>,
    pub gaps: Vec<S>,
}

impl<S> PIndependenceReport<S> {
    pub fn consistent(&self) -> bool {
        self.members.windows(2).all(|w| w[0] == w[1])
    }
}

/// Membership of `η` in `Θ_{p,M}` at each base point; the flags must agree.
pub fn check_theta_p_independence<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    eta: &SupportFunction<Sp::Scalar>,
    base_points: &[Sp::Point],
) -> Result<PIndependenceReport<Sp::Scalar>> {
    if base_points.len() < 2 {
        return Err(Error::domain("need at least two base points"));
    }
    let mut members = Vec::with_capacity(base_points.len());
    let mut gaps = Vec::with_capacity(base_points.len());
    for p in base_points {
        let r = theta_evaluate(space, relation, eta, p)?;
        gaps.push(r.gap());
        members.push(r.member);
    }
    Ok(PIndependenceReport { members, gaps })
}

/// Grid on which the 𝒲-property precondition is established.
#[derive(Debug, Clone, PartialEq)]
pub struct WConfig<P, S> {
    pub base_points: Vec<P>,
    pub lambda_grid: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseProbe<S> {
    pub first: usize,
    pub second: usize,
    pub margin: S,
    pub gap: S,
    pub member: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationCheck<S> {
    pub monotone: bool,
    pub samples: usize,
    pub non_members: usize,
    pub first_non_member: Option<SupportFunction<S>>,
    /// `½δ + ½δ` over the first violating pair, when `M` is not monotone.
    pub converse_probe: Option<ConverseProbe<S>>,
    /// No sampled instance contradicts "monotone ⟺ Θ_M = ς_M".
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CharacterizationReport<P, S> {
    /// The 𝒲 grid check failed, so the characterization does not apply.
    WPropertyNotEstablished(WWitness<P, S>),
    Checked(CharacterizationCheck<S>),
}

/// Samples `count` support functions and checks them against the
/// monotonicity verdict: under the 𝒲-property, `M` is monotone exactly when
/// every `η` lies in `Θ_M`. Refuses to judge when the 𝒲 grid check fails.
pub fn check_characterization<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    w_config: &WConfig<Sp::Point, Sp::Scalar>,
    eta_sampler: &mut EtaSampler,
    count: usize,
    p: &Sp::Point,
) -> Result<CharacterizationReport<Sp::Point, Sp::Scalar>> {
    let w = check_w_property(
        space,
        relation,
        &w_config.base_points,
        &w_config.lambda_grid,
    )?;
    if let Some(witness) = w.first_violation {
        return Ok(CharacterizationReport::WPropertyNotEstablished(witness));
    }
    let mono = is_monotone(space, relation)?;
    let mut check = CharacterizationCheck {
        monotone: mono.monotone,
        samples: 0,
        non_members: 0,
        first_non_member: None,
        converse_probe: None,
        consistent: true,
    };
    for _ in 0..count {
        let Some(eta) = eta_sampler.sample::<Sp::Scalar>(relation.len()) else {
            break;
        };
        check.samples += 1;
        if !theta_evaluate(space, relation, &eta, p)?.member {
            check.non_members += 1;
            if check.first_non_member.is_none() {
                check.first_non_member = Some(eta);
            }
        }
    }
    if let Some(wit) = &mono.witness {
        let eta = SupportFunction::midpoint(wit.first, wit.second);
        let r = theta_evaluate(space, relation, &eta, p)?;
        let gap = r.gap();
        // the converse argument bounds the gap by a quarter of the margin
        let quarter = Sp::Scalar::from_ratio(1, 4) * wit.margin.clone();
        if !space.context().le(&gap, &quarter) {
            check.consistent = false;
        }
        check.converse_probe = Some(ConverseProbe {
            first: wit.first,
            second: wit.second,
            margin: wit.margin.clone(),
            gap,
            member: r.member,
        });
    }
    if mono.monotone && check.non_members > 0 {
        check.consistent = false;
    }
    Ok(CharacterizationReport::Checked(check))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::spaces::{Euclidean, EuclideanPoint, Spider, SpiderPoint};

    type Q = Rational;

    fn pt(b: u32, n: i64, d: i64) -> SpiderPoint<Q> {
        SpiderPoint::new(b, ratio(n, d)).unwrap()
    }

    fn spider_m(n_max: u32) -> Relation<SpiderPoint<Q>, Q> {
        Relation::from_pairs((1..=n_max).map(|n| {
            (
                pt(n, 1, 2),
                DualElement::unit(pt(n + 1, 1, n as i64 + 1), pt(n, 1, n as i64)),
            )
        }))
    }

    fn e1(x: f64) -> EuclideanPoint<f64> {
        EuclideanPoint::new(vec![x])
    }

    #[test]
    fn domain_and_range() {
        let m = spider_m(3);
        assert_eq!(m.domain(), vec![pt(1, 1, 2), pt(2, 1, 2), pt(3, 1, 2)]);
        assert_eq!(m.range().len(), 3);
        let empty = Relation::<SpiderPoint<Q>, Q>::default();
        assert!(empty.domain().is_empty() && empty.range().is_empty());

        let mut dup: Relation<SpiderPoint<Q>, Q> = Relation::default();
        dup.push(pt(1, 1, 2), DualElement::unit(pt(2, 1, 2), pt(3, 1, 2)));
        dup.push(pt(1, 1, 2), DualElement::unit(pt(3, 1, 2), pt(2, 1, 2)));
        assert_eq!(dup.domain().len(), 1);
        assert_eq!(dup.range().len(), 2);
    }

    #[test]
    fn spider_relation_is_monotone() {
        let s = Spider::<Q>::new();
        let m = spider_m(5);
        let r = is_monotone(&s, &m).unwrap();
        assert!(r.monotone);
        assert_eq!(r.pairs_checked, 10);
        let u = &m.pairs()[2];
        let v = &m.pairs()[1];
        assert_eq!(pair_margin(&s, u, v).unwrap(), ratio(7, 6));
    }

    #[test]
    fn two_pair_line_relation() {
        // f₀ = −[→(0)(1)] acts as the vector −1, f₁ = +[→(0)(1)] as +1;
        // margin ⟨f₁ − f₀, →(0)(1)⟩ = 2 ≥ 0
        let e = Euclidean::<f64>::new(1).unwrap();
        let unit = DualElement::unit(e1(0.0), e1(1.0));
        let m = Relation::from_pairs([(e1(0.0), unit.scale(&-1.0)), (e1(1.0), unit.clone())]);
        let r = is_monotone(&e, &m).unwrap();
        assert!(r.monotone);
        assert_eq!(r.min_margin, Some(2.0));

        let flipped = Relation::from_pairs([(e1(0.0), unit.clone()), (e1(1.0), unit.scale(&-1.0))]);
        let r = is_monotone(&e, &flipped).unwrap();
        assert!(!r.monotone);
        let w = r.witness.unwrap();
        assert_eq!((w.first, w.second, w.margin), (0, 1, -2.0));
    }

    #[test]
    fn w_counterexample_on_the_spider() {
        let s = Spider::<Q>::new();
        let m = Relation::from_pairs([
            (pt(1, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
            (pt(3, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
        ]);
        let r = check_w_property(&s, &m, &[pt(1, 1, 1)], &[ratio(1, 3)]).unwrap();
        assert!(!r.holds());
        let w = r.first_violation.unwrap();
        assert_eq!((w.x1, w.x2), (pt(1, 1, 2), pt(3, 1, 2)));
        assert_eq!(w.lambda, ratio(1, 3));
        assert_eq!(w.lhs, ratio(1, 24));
        assert_eq!(w.rhs, ratio(1, 40));
    }

    #[test]
    fn endpoints_never_violate() {
        // domain on a single branch, so no breakpoints are added and only
        // λ ∈ {0, 1} is tested
        let s = Spider::<Q>::new();
        let f = DualElement::unit(pt(5, 1, 5), pt(4, 1, 4));
        let m = Relation::from_pairs([
            (pt(2, 1, 2), f.clone()),
            (pt(2, 1, 4), f.scale(&ratio(-3, 1))),
        ]);
        let r = check_w_property(
            &s,
            &m,
            &[pt(1, 1, 1), pt(3, 1, 7)],
            &[ratio(0, 1), ratio(1, 1)],
        )
        .unwrap();
        assert!(r.holds());
        assert_eq!(r.checks, 2 * 2 * 4 * 2);
    }

    #[test]
    fn euclidean_w_property_holds() {
        let e = Euclidean::<f64>::new(1).unwrap();
        let unit = DualElement::unit(e1(0.0), e1(1.0));
        let m = Relation::from_pairs([
            (e1(0.0), unit.scale(&-1.0)),
            (e1(3.0), unit),
            (e1(-2.0), DualElement::unit(e1(4.0), e1(1.5))),
        ]);
        let r = check_w_property(&e, &m, &[e1(0.5), e1(-7.0)], &lambda_grid(16)).unwrap();
        assert!(r.holds());
        assert!(check_w_property(&e, &m, &[e1(0.0)], &[1.5]).is_err());
    }

    #[test]
    fn wn_matches_reference_counterexample() {
        let s = Spider::<Q>::new();
        let m = Relation::from_pairs([
            (pt(1, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
            (pt(2, 1, 2), DualElement::unit(pt(3, 1, 3), pt(2, 1, 2))),
            (pt(3, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
        ]);
        let r = check_wn(&s, &m, &pt(1, 1, 1), &[0, 2], &[ratio(2, 3), ratio(1, 3)]).unwrap();
        assert_eq!(r.combination, pt(1, 1, 6));
        assert!(!r.holds());
        assert_eq!(r.values[0], (ratio(1, 24), ratio(1, 40)));
    }

    #[test]
    fn delta_is_always_a_member() {
        let s = Spider::<Q>::new();
        let m = spider_m(4);
        for i in 0..4 {
            let r = theta_evaluate(&s, &m, &SupportFunction::delta(i), &pt(3, 2, 3)).unwrap();
            assert!(r.member);
            assert_eq!(r.theta_p, r.rhs);
            assert_eq!(r.alpha, m.pairs()[i].point);
        }
    }

    #[test]
    fn non_monotone_midpoint_is_not_a_member() {
        let e = Euclidean::<f64>::new(1).unwrap();
        let unit = DualElement::unit(e1(0.0), e1(1.0));
        let m = Relation::from_pairs([(e1(0.0), unit.clone()), (e1(1.0), unit.scale(&-1.0))]);
        let eta = SupportFunction::midpoint(0, 1);
        let r = theta_evaluate(&e, &m, &eta, &e1(0.3)).unwrap();
        assert!(!r.member);
        // flat-space oracle: gap = ¼ ⟨x⋄ − y⋄, →yx⟩
        let margin = pair_margin(&e, &m.pairs()[0], &m.pairs()[1]).unwrap();
        assert!((r.gap() - margin / 4.0).abs() < 1e-12);
    }

    #[test]
    fn support_function_validation() {
        let ctx = Context::<Q>::default();
        assert!(SupportFunction::new(vec![(0, ratio(1, 2)), (1, ratio(1, 2))], 2, &ctx).is_ok());
        assert!(SupportFunction::new(vec![(0, ratio(1, 2)), (0, ratio(1, 2))], 2, &ctx).is_err());
        assert!(SupportFunction::new(vec![(5, ratio(1, 1))], 2, &ctx).is_err());
        assert!(SupportFunction::new(vec![(0, ratio(1, 3))], 2, &ctx).is_err());
        assert!(SupportFunction::<Q>::new(vec![], 2, &ctx).is_err());
    }

    #[test]
    fn p_independence_needs_two_points() {
        let s = Spider::<Q>::new();
        let m = spider_m(3);
        let eta = SupportFunction::delta(0);
        assert!(check_theta_p_independence(&s, &m, &eta, &[pt(1, 1, 1)]).is_err());
        let r =
            check_theta_p_independence(&s, &m, &eta, &[pt(1, 1, 1), SpiderPoint::hub()]).unwrap();
        assert!(r.consistent() && r.members[0]);
    }

    #[test]
    fn spider_two_pair_p_independence() {
        let s = Spider::<Q>::new();
        let m = spider_m(4);
        let eta =
            SupportFunction::new(vec![(1, ratio(1, 3)), (3, ratio(2, 3))], 4, s.context()).unwrap();
        let r =
            check_theta_p_independence(&s, &m, &eta, &[pt(1, 1, 1), SpiderPoint::hub()]).unwrap();
        assert!(r.consistent());
        assert_eq!(r.gaps[0], r.gaps[1]);
    }

    #[test]
    fn characterization_on_small_relations() {
        let e = Euclidean::<f64>::new(1).unwrap();
        let cfg = WConfig {
            base_points: vec![e1(0.0)],
            lambda_grid: lambda_grid(8),
        };
        let mut sampler = EtaSampler::new(1);
        let empty = Relation::default();
        let r = check_characterization(&e, &empty, &cfg, &mut sampler, 10, &e1(0.0)).unwrap();
        let CharacterizationReport::Checked(c) = r else {
            panic!()
        };
        assert!(c.monotone && c.consistent && c.samples == 0);

        let unit = DualElement::unit(e1(0.0), e1(1.0));
        let bad = Relation::from_pairs([(e1(0.0), unit.clone()), (e1(1.0), unit.scale(&-1.0))]);
        let r = check_characterization(&e, &bad, &cfg, &mut sampler, 50, &e1(0.0)).unwrap();
        let CharacterizationReport::Checked(c) = r else {
            panic!()
        };
        assert!(!c.monotone && c.consistent);
        let probe = c.converse_probe.unwrap();
        assert!(!probe.member);
        assert!(c.non_members > 0);
    }

    #[test]
    fn characterization_refuses_without_w() {
        let s = Spider::<Q>::new();
        let m = Relation::from_pairs([
            (pt(1, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
            (pt(3, 1, 2), DualElement::unit(pt(5, 1, 5), pt(4, 1, 4))),
        ]);
        let cfg = WConfig {
            base_points: vec![pt(1, 1, 1)],
            lambda_grid: lambda_grid(6),
        };
        let r = check_characterization(&s, &m, &cfg, &mut EtaSampler::new(2), 10, &pt(1, 1, 1))
            .unwrap();
        assert!(matches!(
            r,
            CharacterizationReport::WPropertyNotEstablished(_)
        ));
    }
}
