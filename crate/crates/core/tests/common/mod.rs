//! Seeded instance generators shared by the integration tests.

#![allow(dead_code)]

use hadamard_core::dual::DualElement;
use hadamard_core::extension::{ConvexHullSet, PhiMap};
use hadamard_core::monotone::Relation;
use hadamard_core::sampling::{signed_scalar, PointSampler, SpiderSampler};
use hadamard_core::spaces::{EuclideanPoint, SpiderPoint};
use hadamard_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type EP = EuclideanPoint<f64>;
pub type SP = SpiderPoint<Rational>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec2(rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    (0..2).map(|_| rng.gen_range(-scale..=scale)).collect()
}

fn origin() -> EP {
    EuclideanPoint::new(vec![0.0, 0.0])
}

/// `[→0v]`, the functional `u ↦ ⟨v, u⟩` on ℝ².
pub fn arrow(v: Vec<f64>) -> DualElement<EP, f64> {
    DualElement::unit(origin(), EuclideanPoint::new(v))
}

fn apply(a: [[f64; 2]; 2], x: &[f64]) -> Vec<f64> {
    vec![
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

/// `BᵀB + εI`, scaled by `sign`.
fn definite(rng: &mut ChaCha8Rng, sign: f64) -> [[f64; 2]; 2] {
    let b = [vec2(rng, 1.5), vec2(rng, 1.5)];
    let mut a = [[0.0; 2]; 2];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = sign * (b[0][i] * b[0][j] + b[1][i] * b[1][j] + if i == j { 0.1 } else { 0.0 });
        }
    }
    a
}

/// Pairs `(x, [→0(Ax)] + [→0c])` with `A` positive definite: the graph of
/// the gradient of a convex quadratic, hence monotone. The dual is kept as
/// two terms on purpose.
pub fn monotone_euclidean(seed: u64, pairs: usize) -> Relation<EP, f64> {
    let mut r = rng(seed);
    let a = definite(&mut r, 1.0);
    let c = vec2(&mut r, 1.0);
    Relation::from_pairs((0..pairs).map(|_| {
        let x = vec2(&mut r, 2.0);
        let dual = arrow(apply(a, &x)).add(&arrow(c.clone()));
        (EuclideanPoint::new(x), dual)
    }))
}

/// Same construction with `A` negative definite: every pair of distinct
/// points violates monotonicity.
pub fn anti_monotone_euclidean(seed: u64, pairs: usize) -> Relation<EP, f64> {
    let mut r = rng(seed);
    let a = definite(&mut r, -1.0);
    Relation::from_pairs((0..pairs).map(|_| {
        let x = vec2(&mut r, 2.0);
        (EuclideanPoint::new(x.clone()), arrow(apply(a, &x)))
    }))
}

pub struct ExtensionInstance {
    pub relation: Relation<EP, f64>,
    pub hull: ConvexHullSet<EP, f64>,
    pub generators: Vec<Vec<f64>>,
    pub anchors: Vec<Vec<f64>>,
    pub phi: PhiMap<EP>,
}

/// Hull of up to 3 generators `gⱼ`, a relation of up to 5 pairs
/// `(x, [→0gⱼ])` with `j` maximizing `⟨gⱼ, x⟩ + bⱼ` (subgradients of a
/// convex function, so monotone with range inside the hull) and an affine
/// blend φ of random anchors.
pub fn extension_instance(seed: u64) -> ExtensionInstance {
    let mut r = rng(seed ^ 0x5eed);
    let k = r.gen_range(1..=3);
    let pairs = r.gen_range(1..=5);
    let generators: Vec<Vec<f64>> = (0..k).map(|_| vec2(&mut r, 3.0)).collect();
    let offsets: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..=1.0)).collect();
    let anchors: Vec<Vec<f64>> = (0..k).map(|_| vec2(&mut r, 2.0)).collect();
    let relation = Relation::from_pairs((0..pairs).map(|_| {
        let x = vec2(&mut r, 2.0);
        let value = |j: usize| generators[j][0] * x[0] + generators[j][1] * x[1] + offsets[j];
        let best = (0..k)
            .max_by(|&a, &b| value(a).total_cmp(&value(b)))
            .unwrap();
        (EuclideanPoint::new(x), arrow(generators[best].clone()))
    }));
    ExtensionInstance {
        relation,
        hull: ConvexHullSet::new(generators.iter().cloned().map(arrow).collect()).unwrap(),
        phi: PhiMap::AnchorBlend(anchors.iter().cloned().map(EuclideanPoint::new).collect()),
        generators,
        anchors,
    }
}

/// Spider relation of random points and random single-term duals.
pub fn spider_relation(seed: u64, pairs: usize) -> Relation<SP, Rational> {
    let mut s = SpiderSampler::<Rational>::new(seed, 4);
    Relation::from_pairs((0..pairs).map(|_| {
        let x = s.sample_point();
        let (a, b) = (s.sample_point(), s.sample_point());
        let w: Rational = signed_scalar(s.rng(), 1);
        (x, DualElement::single(w, a, b))
    }))
}
