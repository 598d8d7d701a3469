//! Searching for extension points of monotone relations.
//!
//! Given a relation `M`, a hull `C = co{c₁, …, c_k}` of dual elements and a
//! continuous map `φ: C → X`, we look for `z⋄ ∈ C` such that
//! `M ∪ {(φ(z⋄), z⋄)}` is monotone, i.e. the margin
//!
//! ```text
//! m(μ) = min over (y, y⋄) ∈ M of ⟨z⋄ − y⋄, →yφ(z⋄)⟩,   z⋄ = Σ μᵢcᵢ
//! ```
//!
//! is nonnegative. When `M` is monotone and has the 𝒲-property such a point
//! is known to exist; the search is a maximin over barycentric coordinates:
//! a full simplex grid followed by a local pattern search.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::dual::{evaluate, DualElement};
use crate::error::{Error, Result};
use crate::monotone::{check_w_property, is_monotone, is_monotone_within, lambda_grid, Relation};
use crate::quasilin::BoundVector;
use crate::scalar::{ArithmeticMode, Context, Scalar};
use crate::spaces::{convex_combination_nonzero, GeodesicSpace};

/// Compact convex set of dual elements, given by its generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHullSet<P, S> {
    generators: Vec<DualElement<P, S>>,
}

impl<P: Clone + PartialEq, S: Scalar> ConvexHullSet<P, S> {
    pub fn new(generators: Vec<DualElement<P, S>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::domain("a hull needs at least one generator"));
        }
        Ok(Self { generators })
    }

    pub fn generators(&self) -> &[DualElement<P, S>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `Σ μᵢcᵢ`, with like terms merged.
    pub fn realize(&self, mu: &[S], ctx: &Context<S>) -> Result<DualElement<P, S>> {
        check_coordinates(mu, self.len(), ctx)?;
        Ok(DualElement::combination(mu.iter().zip(&self.generators)).canonicalize())
    }
}

/// Barycentric coordinates: right length, nonnegative, summing to one.
pub fn check_coordinates<S: Scalar>(mu: &[S], k: usize, ctx: &Context<S>) -> Result<()> {
    if mu.len() != k {
        return Err(Error::domain(format!(
            "{} coordinates for {k} generators",
            mu.len()
        )));
    }
    let mut sum = S::zero();
    for m in mu {
        if !m.is_finite() || *m < S::zero() {
            return Err(Error::domain(format!("coordinate {m} is negative")));
        }
        sum = sum + m.clone();
    }
    if !ctx.approx_eq(&sum, &S::one()) {
        return Err(Error::domain(format!("coordinates sum to {sum}, not 1")));
    }
    Ok(())
}

/// Point values on the simplex grid of a given resolution, interpolated
/// piecewise linearly over the Freudenthal triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTable<P> {
    resolution: u32,
    parts: usize,
    values: BTreeMap<Vec<u32>, P>,
}

impl<P: Clone> PhiTable<P> {
    /// `entries` must cover every composition of `resolution` into `parts`
    /// nonnegative integers.
    pub fn new(resolution: u32, parts: usize, entries: Vec<(Vec<u32>, P)>) -> Result<Self> {
        if resolution == 0 || parts == 0 {
            return Err(Error::domain("table resolution and size must be positive"));
        }
        let mut values = BTreeMap::new();
        for (key, p) in entries {
            if key.len() != parts || key.iter().sum::<u32>() != resolution {
                return Err(Error::domain(format!(
                    "table key {key:?} is not a composition of {resolution} into {parts} parts"
                )));
            }
            if values.insert(key.clone(), p).is_some() {
                return Err(Error::domain(format!("table key {key:?} appears twice")));
            }
        }
        for key in compositions(resolution, parts) {
            if !values.contains_key(&key) {
                return Err(Error::domain(format!("table has no entry for {key:?}")));
            }
        }
        Ok(Self {
            resolution,
            parts,
            values,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &P)> {
        self.values.iter()
    }

    /// Vertices of the cell containing `mu`, with their interpolation
    /// weights, in chain order. Zero-weight vertices are omitted.
    fn cell<S: Scalar>(&self, mu: &[S]) -> Vec<(P, S)> {
        let n = S::from_i64(self.resolution as i64);
        let k = self.parts;
        // cumulative coordinates s_j = N(μ₁ + … + μ_j), j < k
        let mut cum = Vec::with_capacity(k.saturating_sub(1));
        let mut acc = S::zero();
        for m in &mu[..k - 1] {
            acc = acc + m.clone() * n.clone();
            cum.push(acc.clone().min_of(n.clone()).max_of(S::zero()));
        }
        let base: Vec<i64> = cum
            .iter()
            .map(|s| s.floor_i64().min(self.resolution as i64))
            .collect();
        let frac: Vec<S> = cum
            .iter()
            .zip(&base)
            .map(|(s, b)| s.clone() - S::from_i64(*b))
            .collect();
        let mut order: Vec<usize> = (0..cum.len()).collect();
        // larger fraction first; on ties the later coordinate moves first so
        // the cumulative vertex stays nondecreasing
        order.sort_by(|&a, &b| {
            frac[b]
                .partial_cmp(&frac[a])
                .unwrap_or(Ordering::Equal)
                .then(b.cmp(&a))
        });

        let to_key = |c: &[i64]| -> Vec<u32> {
            let mut key = Vec::with_capacity(k);
            let mut prev = 0i64;
            for v in c {
                key.push((v - prev) as u32);
                prev = *v;
            }
            key.push((self.resolution as i64 - prev) as u32);
            key
        };

        let mut out = Vec::with_capacity(k);
        let mut vertex = base.clone();
        let first_weight = match order.first() {
            Some(&i) => S::one() - frac[i].clone(),
            None => S::one(),
        };
        let push = |v: &[i64], w: S, out: &mut Vec<(P, S)>| {
            if !w.is_zero() {
                out.push((self.values[&to_key(v)].clone(), w));
            }
        };
        push(&vertex, first_weight, &mut out);
        for (pos, &i) in order.iter().enumerate() {
            vertex[i] += 1;
            let next = order
                .get(pos + 1)
                .map(|&j| frac[j].clone())
                .unwrap_or_else(S::zero);
            push(&vertex, frac[i].clone() - next, &mut out);
        }
        out
    }
}

/// Continuous maps from hull coordinates to points.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiMap<P> {
    Constant(P),
    /// `μ ↦ ⊕ μᵢ aᵢ`, one anchor per generator.
    AnchorBlend(Vec<P>),
    Table(PhiTable<P>),
}

impl<P: Clone + PartialEq> PhiMap<P> {
    pub fn evaluate<Sp>(&self, space: &Sp, mu: &[Sp::Scalar]) -> Result<P>
    where
        Sp: GeodesicSpace<Point = P>,
    {
        match self {
            PhiMap::Constant(p) => Ok(p.clone()),
            PhiMap::AnchorBlend(anchors) => convex_combination_nonzero(space, anchors, mu),
            PhiMap::Table(table) => {
                if mu.len() != table.parts {
                    return Err(Error::domain(format!(
                        "{} coordinates for a table over {} parts",
                        mu.len(),
                        table.parts
                    )));
                }
                let (points, weights): (Vec<P>, Vec<Sp::Scalar>) =
                    table.cell(mu).into_iter().unzip();
                convex_combination_nonzero(space, &points, &weights)
            }
        }
    }

    /// Number of generators the map expects, if it fixes one.
    pub fn arity(&self) -> Option<usize> {
        match self {
            PhiMap::Constant(_) => None,
            PhiMap::AnchorBlend(a) => Some(a.len()),
            PhiMap::Table(t) => Some(t.parts),
        }
    }
}

/// Smallest pairing margin against `M`; unbounded when `M` is empty.
#[derive(Debug, Clone, PartialEq)]
pub enum Margin<S> {
    Finite(S),
    Unbounded,
}

impl<S: Scalar> Margin<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Margin::Finite(s) => Some(s),
            Margin::Unbounded => None,
        }
    }

    pub fn at_least(&self, bound: &S) -> bool {
        match self {
            Margin::Finite(s) => s >= bound,
            Margin::Unbounded => true,
        }
    }
}

impl<S: Scalar> PartialOrd for Margin<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Margin::Unbounded, Margin::Unbounded) => Some(Ordering::Equal),
            (Margin::Unbounded, _) => Some(Ordering::Greater),
            (_, Margin::Unbounded) => Some(Ordering::Less),
            (Margin::Finite(a), Margin::Finite(b)) => a.partial_cmp(b),
        }
    }
}

pub fn violation_margin<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    hull: &ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &PhiMap<Sp::Point>,
    mu: &[Sp::Scalar],
) -> Result<Margin<Sp::Scalar>> {
    let z = hull.realize(mu, space.context())?;
    let x = phi.evaluate(space, mu)?;
    margin_at(space, relation, &z, &x)
}

fn margin_at<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    z: &DualElement<Sp::Point, Sp::Scalar>,
    x: &Sp::Point,
) -> Result<Margin<Sp::Scalar>> {
    let mut best: Option<Sp::Scalar> = None;
    for pair in relation.pairs() {
        let v = BoundVector::new(pair.point.clone(), x.clone());
        let m = evaluate(space, z, &v)? - evaluate(space, &pair.dual, &v)?;
        if best.as_ref().is_none_or(|b| m < *b) {
            best = Some(m);
        }
    }
    Ok(best.map_or(Margin::Unbounded, Margin::Finite))
}

/// All compositions of `n` into `k` nonnegative parts, first part
/// descending.
pub fn compositions(n: u32, k: usize) -> Vec<Vec<u32>> {
    fn go(n: u32, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            go(n - first, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions<S> {
    pub eps: S,
    /// Grid resolution is `2^grid_depth` per coordinate.
    pub grid_depth: u32,
    pub refine_steps: usize,
    /// λ grid used for the 𝒲 precondition.
    pub w_steps: u32,
}

impl<S: Scalar> SearchOptions<S> {
    pub fn new(eps: S) -> Self {
        Self {
            eps,
            grid_depth: 4,
            refine_steps: 40,
            w_steps: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preconditions {
    pub monotone: bool,
    /// No 𝒲 violation found for `M`.
    pub w_property: bool,
    /// 𝒲 status of the augmented relation; reported, not required.
    pub augmented_w_property: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult<P, S> {
    pub z_dual: DualElement<P, S>,
    pub point: P,
    pub coordinates: Vec<S>,
    pub margin: Margin<S>,
    /// Best margin on the initial grid, before refinement.
    pub grid_margin: Margin<S>,
    pub iterations: usize,
    pub preconditions: Preconditions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome<P, S> {
    Extended(ExtensionResult<P, S>),
    /// Budget exhausted below `-eps`; carries the best candidate seen. The
    /// preconditions field tells whether a solution was guaranteed.
    Inconclusive(ExtensionResult<P, S>),
}

impl<P, S> SearchOutcome<P, S> {
    pub fn result(&self) -> &ExtensionResult<P, S> {
        match self {
            SearchOutcome::Extended(r) | SearchOutcome::Inconclusive(r) => r,
        }
    }

    pub fn succeeded(&self) -> bool {
        matches!(self, SearchOutcome::Extended(_))
    }
}

/// Index of the largest margin, lowest index on ties.
fn argmax<S: Scalar>(margins: &[Margin<S>]) -> usize {
    let mut best = 0;
    for (i, m) in margins.iter().enumerate().skip(1) {
        if m.partial_cmp(&margins[best]) == Some(Ordering::Greater) {
            best = i;
        }
    }
    best
}

fn margins_for<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    hull: &ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &PhiMap<Sp::Point>,
    candidates: &[Vec<Sp::Scalar>],
) -> Result<Vec<Margin<Sp::Scalar>>> {
    candidates
        .par_iter()
        .map(|mu| violation_margin(space, relation, hull, phi, mu))
        .collect()
}

/// Grid of barycentric coordinates at resolution `2^depth`.
pub fn simplex_grid<S: Scalar>(depth: u32, k: usize) -> Vec<Vec<S>> {
    let n = 1i64 << depth;
    compositions(n as u32, k)
        .into_iter()
        .map(|c| c.into_iter().map(|v| S::from_ratio(v as i64, n)).collect())
        .collect()
}

/// Coordinates of a grid cell and its margin.
pub type GridBest<S> = (Vec<S>, Margin<S>);

/// Best grid cell and its margin, by exhaustive evaluation.
pub fn grid_maximin<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    hull: &ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &PhiMap<Sp::Point>,
    depth: u32,
) -> Result<GridBest<Sp::Scalar>> {
    let grid = simplex_grid(depth, hull.len());
    let margins = margins_for(space, relation, hull, phi, &grid)?;
    let i = argmax(&margins);
    Ok((grid[i].clone(), margins[i].clone()))
}

pub fn find_extension_point<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    hull: &ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &PhiMap<Sp::Point>,
    options: &SearchOptions<Sp::Scalar>,
) -> Result<SearchOutcome<Sp::Point, Sp::Scalar>> {
    let eps = &options.eps;
    if *eps < Sp::Scalar::zero() || (eps.is_zero() && space.mode() == ArithmeticMode::Float) {
        return Err(Error::domain(format!("ε = {eps} must be positive")));
    }
    if options.grid_depth > 16 {
        return Err(Error::domain("grid depth above 16"));
    }
    let k = hull.len();
    if let Some(a) = phi.arity() {
        if a != k {
            return Err(Error::ModelMismatch(format!(
                "φ expects {a} coordinates but the hull has {k} generators"
            )));
        }
    }
    let grid_w = lambda_grid::<Sp::Scalar>(options.w_steps);
    let w_holds = |m: &Relation<Sp::Point, Sp::Scalar>| -> Result<bool> {
        let base: Vec<Sp::Point> = m.domain().into_iter().take(1).collect();
        Ok(check_w_property(space, m, &base, &grid_w)?.holds())
    };
    let monotone = is_monotone(space, relation)?.monotone;
    let w_property = w_holds(relation)?;

    let (mut mu, grid_margin) = grid_maximin(space, relation, hull, phi, options.grid_depth)?;
    let mut margin = grid_margin.clone();
    let mut iterations = 0;
    let mut h = Sp::Scalar::from_ratio(1, 1i64 << (options.grid_depth + 1));
    let offsets = offset_lattice(k);
    while iterations < options.refine_steps && !margin.at_least(&Sp::Scalar::zero()) {
        iterations += 1;
        let candidates: Vec<Vec<Sp::Scalar>> =
            offsets.iter().filter_map(|o| shifted(&mu, o, &h)).collect();
        if candidates.is_empty() {
            break;
        }
        let margins = margins_for(space, relation, hull, phi, &candidates)?;
        let i = argmax(&margins);
        if margins[i].partial_cmp(&margin) == Some(Ordering::Greater) {
            mu = candidates[i].clone();
            margin = margins[i].clone();
        } else {
            h = h * Sp::Scalar::half();
        }
    }

    let z_dual = hull.realize(&mu, space.context())?;
    let point = phi.evaluate(space, &mu)?;
    let augmented_w_property = w_holds(&relation.augmented(point.clone(), z_dual.clone()))?;
    let found = margin.at_least(&-eps.clone());
    let result = ExtensionResult {
        z_dual,
        point,
        coordinates: mu,
        margin,
        grid_margin,
        iterations,
        preconditions: Preconditions {
            monotone,
            w_property,
            augmented_w_property,
        },
    };
    Ok(if found {
        SearchOutcome::Extended(result)
    } else {
        SearchOutcome::Inconclusive(result)
    })
}

/// Offsets in `{-2, …, 2}^(k-1)` without the origin.
fn offset_lattice(k: usize) -> Vec<Vec<i64>> {
    let free = k.saturating_sub(1);
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..free {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-2..=2).map(move |d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|d| *d != 0));
    out
}

fn shifted<S: Scalar>(mu: &[S], offset: &[i64], h: &S) -> Option<Vec<S>> {
    let mut out: Vec<S> = Vec::with_capacity(mu.len());
    let mut rest = S::one();
    for (m, d) in mu.iter().zip(offset) {
        let v = m.clone() + S::from_i64(*d) * h.clone();
        if v < S::zero() {
            return None;
        }
        rest = rest - v.clone();
        out.push(v);
    }
    if rest < S::zero() {
        return None;
    }
    out.push(rest);
    Some(out)
}

/// Recomputes the candidate from its coordinates and checks that the
/// augmented relation is monotone up to `eps`. Stored values that do not
/// match the coordinates are rejected.
pub fn verify_extension<Sp: GeodesicSpace>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
    hull: &ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &PhiMap<Sp::Point>,
    result: &ExtensionResult<Sp::Point, Sp::Scalar>,
    eps: &Sp::Scalar,
) -> Result<bool> {
    let z = match hull.realize(&result.coordinates, space.context()) {
        Ok(z) => z,
        Err(_) => return Ok(false),
    };
    let x = phi.evaluate(space, &result.coordinates)?;
    if z != result.z_dual.canonicalize() || x != result.point {
        return Ok(false);
    }
    Ok(is_monotone_within(space, &relation.augmented(x, z), eps)?.monotone)
}
