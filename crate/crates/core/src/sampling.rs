//! Seeded random inputs for the identity, flatness and norm checks.
//!
//! All samplers draw from [`ChaCha8Rng`], so a seed fixes the whole stream
//! on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{RealScalar, Scalar};
use crate::spaces::{EuclideanPoint, SpiderPoint};

/// Largest denominator used for sampled exact rationals.
pub const MAX_DENOMINATOR: i64 = 64;

/// Seed used by the command line and the reproduction checks when none is given.
pub const DEFAULT_SEED: u64 = 2024;

/// Branch count for sampled spider points.
pub const DEFAULT_BRANCHES: u32 = 4;

pub trait PointSampler {
    type Scalar: Scalar;
    type Point;

    fn sample_point(&mut self) -> Self::Point;

    /// A value in [0, 1].
    fn sample_unit(&mut self) -> Self::Scalar;

    fn rng(&mut self) -> &mut ChaCha8Rng;
}

/// Uniform value in [0, 1]; in exact mode a rational with denominator at
/// most [`MAX_DENOMINATOR`].
pub fn unit_scalar<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    if S::is_exact() {
        let denom = rng.gen_range(1..=MAX_DENOMINATOR);
        let numer = rng.gen_range(0..=denom);
        S::from_ratio(numer, denom)
    } else {
        S::from_f64(rng.gen::<f64>()).expect("finite")
    }
}

/// Uniform value in [-scale, scale].
pub fn signed_scalar<S: Scalar>(rng: &mut ChaCha8Rng, scale: i64) -> S {
    let u: S = unit_scalar(rng);
    let two = S::from_i64(2);
    (two * u - S::one()) * S::from_i64(scale)
}

/// Spider points on branches `1..=branches`. A small share of draws is
/// forced to the hub so that degenerate segments are exercised.
#[derive(Debug, Clone)]
pub struct SpiderSampler<S> {
    rng: ChaCha8Rng,
    branches: u32,
    _scalar: std::marker::PhantomData<S>,
}

impl<S: Scalar> SpiderSampler<S> {
    pub fn new(seed: u64, branches: u32) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            branches: branches.max(1),
            _scalar: std::marker::PhantomData,
        }
    }
}

impl<S: Scalar> PointSampler for SpiderSampler<S> {
    type Scalar = S;
    type Point = SpiderPoint<S>;

    fn sample_point(&mut self) -> SpiderPoint<S> {
        if self.rng.gen_ratio(1, 20) {
            return SpiderPoint::hub();
        }
        let branch = self.rng.gen_range(1..=self.branches);
        let radius = unit_scalar(&mut self.rng);
        SpiderPoint::new(branch, radius).expect("sampled radius lies in [0, 1]")
    }

    fn sample_unit(&mut self) -> S {
        unit_scalar(&mut self.rng)
    }

    fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Points of ℝⁿ with coordinates uniform in `[-scale, scale]`.
#[derive(Debug, Clone)]
pub struct EuclideanSampler<S> {
    rng: ChaCha8Rng,
    dim: usize,
    scale: i64,
    _scalar: std::marker::PhantomData<S>,
}

impl<S: RealScalar> EuclideanSampler<S> {
    pub fn new(seed: u64, dim: usize, scale: i64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            scale,
            _scalar: std::marker::PhantomData,
        }
    }
}

impl<S: RealScalar> PointSampler for EuclideanSampler<S> {
    type Scalar = S;
    type Point = EuclideanPoint<S>;

    fn sample_point(&mut self) -> EuclideanPoint<S> {
        let coords = (0..self.dim)
            .map(|_| signed_scalar(&mut self.rng, self.scale))
            .collect();
        EuclideanPoint::new(coords)
    }

    fn sample_unit(&mut self) -> S {
        unit_scalar(&mut self.rng)
    }

    fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Random simplex weights of the given length, all strictly positive.
///
/// Exact mode splits [`MAX_DENOMINATOR`] into positive integer parts so the
/// weights sum to one exactly; float mode normalizes exponential draws
/// (a flat Dirichlet sample).
pub fn simplex_weights<S: Scalar>(rng: &mut ChaCha8Rng, len: usize) -> Vec<S> {
    assert!(len >= 1 && len as i64 <= MAX_DENOMINATOR);
    if S::is_exact() {
        // choose len-1 distinct cut points in 1..MAX_DENOMINATOR
        let mut cuts = rand::seq::index::sample(rng, (MAX_DENOMINATOR - 1) as usize, len - 1)
            .into_iter()
            .map(|c| c as i64 + 1)
            .collect::<Vec<_>>();
        cuts.sort_unstable();
        let mut prev = 0;
        let mut out = Vec::with_capacity(len);
        for c in cuts.into_iter().chain(std::iter::once(MAX_DENOMINATOR)) {
            out.push(crate::scalar::ratio(c - prev, MAX_DENOMINATOR));
            prev = c;
        }
        out
    } else {
        let draws: Vec<f64> = (0..len)
            .map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12)
            .collect();
        let total: f64 = draws.iter().sum();
        let mut out: Vec<S> = draws
            .iter()
            .map(|d| S::from_f64(d / total).expect("finite"))
            .collect();
        // push the rounding residue into the last weight
        let head = out[..len - 1]
            .iter()
            .cloned()
            .fold(S::zero(), |acc, w| acc + w);
        out[len - 1] = S::one() - head;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::{One, Zero};

    #[test]
    fn exact_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in 1..=6 {
            let w: Vec<Rational> = simplex_weights(&mut rng, len);
            assert_eq!(w.len(), len);
            assert!(w.iter().all(|x| *x > Rational::zero()));
            assert_eq!(w.iter().cloned().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn float_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w: Vec<f64> = simplex_weights(&mut rng, 5);
        assert!(w.iter().all(|x| *x > 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seeded_streams_repeat() {
        let mut a = SpiderSampler::<Rational>::new(11, 4);
        let mut b = SpiderSampler::<Rational>::new(11, 4);
        for _ in 0..50 {
            assert_eq!(a.sample_point(), b.sample_point());
        }
    }
}
