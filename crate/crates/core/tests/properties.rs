mod common;

use common::*;
use hadamard_core::dual::{evaluate, DualElement};
use hadamard_core::extension::{violation_margin, Margin};
use hadamard_core::flatness::{cn_residual, phi_affine_residual, projection_residual};
use hadamard_core::monotone::{is_monotone, theta_evaluate, EtaSampler, Relation, SupportFunction};
use hadamard_core::quasilin::{phi, qlin, BoundVector};
use hadamard_core::scalar::ratio;
use hadamard_core::spaces::{Euclidean, GeodesicSpace, Spider, SpiderPoint};
use hadamard_core::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q() -> impl Strategy<Value = Rational> {
    (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |n| ratio(n, d)))
}

fn lambda() -> impl Strategy<Value = Rational> {
    q()
}

fn point() -> impl Strategy<Value = SP> {
    (1u32..=4, q()).prop_map(|(b, r)| SpiderPoint::new(b, r).unwrap())
}

fn spider() -> Spider<Rational> {
    Spider::new()
}

fn bv(a: &SP, b: &SP) -> BoundVector<SP> {
    BoundVector::new(a.clone(), b.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(x in point(), y in point(), z in point()) {
        let s = spider();
        let d = |a: &SP, b: &SP| s.distance(a, b).unwrap();
        prop_assert!(d(&x, &x).is_zero());
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &y).is_zero(), x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn geodesic_is_a_constant_speed_path(x in point(), y in point(), l in lambda(), m in lambda()) {
        let s = spider();
        let g = s.geodesic(&x, &y, &l).unwrap();
        let d = s.distance(&x, &y).unwrap();
        prop_assert_eq!(s.distance(&x, &g).unwrap(), l.clone() * d.clone());
        prop_assert_eq!(s.distance(&g, &y).unwrap(), (Rational::one() - l.clone()) * d);
        // reversed and restricted parameterizations land on the same point
        prop_assert_eq!(s.geodesic(&y, &x, &(Rational::one() - l.clone())).unwrap(), g.clone());
        let sub = s.geodesic(&x, &s.geodesic(&x, &y, &m).unwrap(), &l).unwrap();
        prop_assert_eq!(sub, s.geodesic(&x, &y, &(l * m)).unwrap());
    }

    #[test]
    fn cn_inequality(z in point(), x in point(), y in point(), l in lambda()) {
        prop_assert!(cn_residual(&spider(), &z, &x, &y, &l).unwrap() >= Rational::zero());
    }

    #[test]
    fn qlin_antisymmetry_and_telescoping(a in point(), b in point(), c in point(), d in point(), x in point()) {
        let s = spider();
        let v = qlin(&s, &bv(&a, &b), &bv(&c, &d)).unwrap();
        prop_assert_eq!(qlin(&s, &bv(&b, &a), &bv(&c, &d)).unwrap(), -v.clone());
        prop_assert_eq!(qlin(&s, &bv(&a, &b), &bv(&d, &c)).unwrap(), -v.clone());
        prop_assert_eq!(qlin(&s, &bv(&c, &d), &bv(&a, &b)).unwrap(), v.clone());
        let split = qlin(&s, &bv(&a, &x), &bv(&c, &d)).unwrap() + qlin(&s, &bv(&x, &b), &bv(&c, &d)).unwrap();
        prop_assert_eq!(split, v.clone());
        prop_assert_eq!(phi(&s, &bv(&c, &d), &b).unwrap() - phi(&s, &bv(&c, &d), &a).unwrap(), v);
    }

    #[test]
    fn dual_evaluation_is_linear(
        a in point(), b in point(), c in point(), d in point(),
        x in point(), y in point(), t in q(), u in q(),
    ) {
        let s = spider();
        let f = DualElement::single(t.clone(), a, b);
        let g = DualElement::single(-u.clone(), c, d);
        let xy = bv(&x, &y);
        let ef = evaluate(&s, &f, &xy).unwrap();
        let eg = evaluate(&s, &g, &xy).unwrap();
        prop_assert_eq!(evaluate(&s, &f.add(&g), &xy).unwrap(), ef.clone() + eg.clone());
        prop_assert_eq!(evaluate(&s, &f.scale(&u), &xy).unwrap(), u * ef.clone());
        prop_assert_eq!(evaluate(&s, &f.sub(&f), &xy).unwrap(), Rational::zero());
        prop_assert_eq!(evaluate(&s, &f, &bv(&y, &x)).unwrap(), -ef);
    }

    #[test]
    fn matched_flatness_residuals(
        x in point(), y in point(), a in point(), b in point(), p in point(), l in lambda(),
    ) {
        let s = spider();
        let r = |w: &SP| cn_residual(&s, w, &x, &y, &l).unwrap();
        let half = ratio::<Rational>(1, 2);
        prop_assert_eq!(
            projection_residual(&s, &x, &y, &a, &b, &l).unwrap(),
            half.clone() * (r(&b) - r(&a))
        );
        prop_assert_eq!(
            phi_affine_residual(&s, &p, &a, &x, &y, &l).unwrap(),
            half * (r(&p) - r(&a))
        );
    }

    #[test]
    fn monotone_verdict_ignores_pair_order(seed in 0u64..500, n in 1usize..6) {
        let s = spider();
        let m = spider_relation(seed, n);
        let reversed = Relation::new(m.pairs().iter().rev().cloned().collect());
        prop_assert_eq!(
            is_monotone(&s, &m).unwrap().monotone,
            is_monotone(&s, &reversed).unwrap().monotone
        );
    }

    #[test]
    fn point_masses_are_members(seed in 0u64..500, n in 1usize..6, p in point()) {
        let s = spider();
        let m = spider_relation(seed, n);
        for i in 0..n {
            let r = theta_evaluate(&s, &m, &SupportFunction::delta(i), &p).unwrap();
            prop_assert!(r.gap().is_zero());
            prop_assert!(r.member);
        }
    }

    #[test]
    fn theta_gap_ignores_base_point(seed in 0u64..500, n in 1usize..6, p in point(), r in point()) {
        let s = spider();
        let m = spider_relation(seed, n);
        let eta = EtaSampler::new(seed).sample::<Rational>(m.len()).unwrap();
        let at_p = theta_evaluate(&s, &m, &eta, &p).unwrap();
        let at_r = theta_evaluate(&s, &m, &eta, &r).unwrap();
        prop_assert_eq!(at_p.gap(), at_r.gap());
        prop_assert_eq!(at_p.alpha, at_r.alpha);
    }

    #[test]
    fn monotone_generator_is_monotone(seed in 0u64..1000, n in 1usize..7) {
        let e = Euclidean::<f64>::new(2).unwrap();
        prop_assert!(is_monotone(&e, &monotone_euclidean(seed, n)).unwrap().monotone);
    }

    #[test]
    fn margin_is_continuous(seed in 0u64..200, a in 0.0f64..1.0, b in 0.0f64..1.0, step in 1e-7f64..1e-5) {
        let e = Euclidean::<f64>::new(2).unwrap();
        let inst = extension_instance(seed);
        let k = inst.hull.len();
        let mu = |shift: f64| -> Vec<f64> {
            let (a, b) = ((a + shift).min(1.0), b);
            match k {
                1 => vec![1.0],
                2 => vec![a, 1.0 - a],
                _ => vec![a * b, a * (1.0 - b), 1.0 - a],
            }
        };
        let at = |m: Vec<f64>| match violation_margin(&e, &inst.relation, &inst.hull, &inst.phi, &m).unwrap() {
            Margin::Finite(v) => v,
            Margin::Unbounded => f64::INFINITY,
        };
        // generators and anchors are bounded by 3 and 2, points by 2
        let lipschitz = 200.0;
        prop_assert!((at(mu(0.0)) - at(mu(step))).abs() <= lipschitz * step);
    }
}
