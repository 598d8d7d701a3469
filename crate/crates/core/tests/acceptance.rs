//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p hadamard-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use hadamard_core::dual::{norm_bounds, DualElement};
use hadamard_core::extension::{
    find_extension_point, grid_maximin, simplex_grid, verify_extension, Margin, SearchOptions,
};
use hadamard_core::flatness::{
    classify_flat, cn_residual, phi_affine_residual, projection_residual, Verdict,
};
use hadamard_core::monotone::{
    check_theta_p_independence, check_w_property, is_monotone, lambda_grid, pairwise_theta_gap,
    theta_evaluate, EtaSampler, Relation, SupportFunction,
};
use hadamard_core::quasilin::{check_identities, qlin, BoundVector, Identity};
use hadamard_core::reproduce::{reproduce, tabulated_margin};
use hadamard_core::sampling::{
    signed_scalar, EuclideanSampler, PointSampler, SpiderSampler, DEFAULT_BRANCHES, DEFAULT_SEED,
};
use hadamard_core::scalar::ratio;
use hadamard_core::spaces::{Euclidean, GeodesicSpace, Spider, SpiderPoint};
use hadamard_core::{Rational, Scalar};
use num_traits::{Signed, Zero};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: hadamard_core::Error) -> String {
    e.to_string()
}

fn sp(branch: u32, n: i64, d: i64) -> SpiderPoint<Rational> {
    SpiderPoint::new(branch, ratio(n, d)).unwrap()
}

fn within(limit: Duration, start: Instant) -> Outcome {
    let took = start.elapsed();
    ensure!(took <= limit, "took {took:?}, limit {limit:?}");
    Ok(())
}

fn exact_values() -> Outcome {
    let start = Instant::now();
    let s = Spider::<Rational>::new();
    let g = s
        .geodesic(&sp(2, 1, 2), &sp(1, 1, 2), &ratio(1, 5))
        .map_err(err)?;
    ensure!(g == sp(2, 3, 10), "first geodesic gave {g}");
    let g = s
        .geodesic(&sp(1, 1, 2), &sp(3, 1, 2), &ratio(1, 3))
        .map_err(err)?;
    ensure!(g == sp(1, 1, 6), "second geodesic gave {g}");

    let ab = BoundVector::new(sp(3, 1, 3), sp(2, 1, 2));
    let partial = qlin(&s, &BoundVector::new(sp(2, 1, 2), sp(2, 3, 10)), &ab).map_err(err)?;
    let full = qlin(&s, &BoundVector::new(sp(2, 1, 2), sp(1, 1, 2)), &ab).map_err(err)?;
    let scaled = ratio::<Rational>(1, 5) * full;
    ensure!(partial == ratio(-1, 6), "partial pairing {partial}");
    ensure!(scaled == ratio(-1, 10), "scaled pairing {scaled}");

    let dual = DualElement::unit(sp(5, 1, 5), sp(4, 1, 4));
    let relation = Relation::from_pairs([(sp(1, 1, 2), dual.clone()), (sp(3, 1, 2), dual)]);
    let w = check_w_property(&s, &relation, &[sp(1, 1, 1)], &[ratio(1, 3)]).map_err(err)?;
    let wit = w.first_violation.ok_or("no 𝒲 violation found")?;
    ensure!(
        wit.lhs == ratio(1, 24) && wit.rhs == ratio(1, 40),
        "𝒲 values {} vs {}",
        wit.lhs,
        wit.rhs
    );
    let report = reproduce(&s, 10).map_err(err)?;
    ensure!(
        report.passed(),
        "reproduction failures: {}",
        report.failures().count()
    );
    within(Duration::from_secs(1), start)
}

fn margin_table() -> Outcome {
    let start = Instant::now();
    let s = Spider::<Rational>::new();
    let m = hadamard_core::reproduce::spider_relation(25);
    let pairs = m.pairs();
    for n in 1..=25u32 {
        for k in 1..=25u32 {
            let got = hadamard_core::monotone::pair_margin(
                &s,
                &pairs[n as usize - 1],
                &pairs[k as usize - 1],
            )
            .map_err(err)?;
            let want = tabulated_margin(n, k);
            ensure!(got == want, "n={n} m={k}: computed {got}, table {want}");
            ensure!(
                got >= Rational::zero(),
                "n={n} m={k}: negative margin {got}"
            );
        }
    }
    within(Duration::from_secs(5), start)
}

fn single_norm<Sp, Sm>(space: &Sp, sampler: &mut Sm, terms: usize) -> Outcome
where
    Sp: GeodesicSpace,
    Sp::Point: std::fmt::Debug,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let slack = Sp::Scalar::from_ratio(99, 100);
    let tol = space.context().tol.clone();
    for i in 0..terms {
        let t: Sp::Scalar = signed_scalar(sampler.rng(), 3);
        let (a, b) = (sampler.sample_point(), sampler.sample_point());
        let exact = t.abs() * space.distance(&a, &b).map_err(err)?;
        let f = DualElement::single(t, a.clone(), b.clone());
        let nb = norm_bounds(space, &f, sampler, 20).map_err(err)?;
        ensure!(
            (nb.upper.clone() - exact.clone()).abs() <= tol,
            "{} term {i}: upper {} vs {exact}",
            space.name(),
            nb.upper
        );
        ensure!(
            nb.lower <= nb.upper && nb.lower >= slack.clone() * exact.clone(),
            "{} term {i}: lower {} vs {exact} at {a:?} {b:?}",
            space.name(),
            nb.lower
        );
    }
    Ok(())
}

fn norms() -> Outcome {
    single_norm(
        &Spider::<Rational>::new(),
        &mut SpiderSampler::new(31, DEFAULT_BRANCHES),
        50,
    )?;
    single_norm(
        &Euclidean::<f64>::new(2).map_err(err)?,
        &mut EuclideanSampler::new(31, 2, 4),
        50,
    )
}

fn flatness() -> Outcome {
    let e = Euclidean::<f64>::new(2).map_err(err)?;
    let mut s = EuclideanSampler::<f64>::new(7, 2, 4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p: Vec<_> = (0..5).map(|_| s.sample_point()).collect();
        let l = s.sample_unit();
        let r = [
            cn_residual(&e, &p[0], &p[1], &p[2], &l),
            projection_residual(&e, &p[0], &p[1], &p[2], &p[3], &l),
            phi_affine_residual(&e, &p[3], &p[4], &p[0], &p[1], &l),
        ];
        for v in r {
            worst = worst.max(v.map_err(err)?.abs());
        }
    }
    ensure!(worst <= 1e-9, "Euclidean residual {worst:e}");

    let spider = Spider::<Rational>::new();
    let mut sampler = SpiderSampler::new(DEFAULT_SEED, DEFAULT_BRANCHES);
    let v = classify_flat(&spider, &mut sampler, 1000, &Rational::zero()).map_err(err)?;
    ensure!(v.verdict == Verdict::NonFlat, "spider classified flat");
    let w = v.witness.ok_or("NonFlat without witness")?;
    ensure!(!w.residual.is_zero(), "zero witness residual");
    ensure!(
        w.points
            .iter()
            .all(|p| p.is_hub() || p.radius().numer() == &1.into()),
        "witness outside the unit-fraction family: {:?}",
        w.points.iter().map(ToString::to_string).collect::<Vec<_>>()
    );
    Ok(())
}

fn theta_suite() -> Outcome {
    let e = Euclidean::<f64>::new(2).map_err(err)?;
    for seed in 0..20u64 {
        let m = monotone_euclidean(seed, 2 + (seed as usize % 5));
        ensure!(
            is_monotone(&e, &m).map_err(err)?.monotone,
            "seed {seed}: generator not monotone"
        );
        let p = m.pairs()[0].point.clone();
        let mut etas = EtaSampler::new(seed);
        for k in 0..500 {
            let eta = etas.sample::<f64>(m.len()).unwrap();
            let r = theta_evaluate(&e, &m, &eta, &p).map_err(err)?;
            ensure!(r.member, "seed {seed} sample {k}: gap {}", r.gap());
            let pairwise = pairwise_theta_gap(&e, &m, &eta).map_err(err)?;
            ensure!(
                (r.gap() - pairwise).abs() <= 1e-9,
                "seed {seed} sample {k}: gap {} vs pairwise {pairwise}",
                r.gap()
            );
        }
    }
    for seed in 0..20u64 {
        let m = anti_monotone_euclidean(100 + seed, 2 + (seed as usize % 5));
        let report = is_monotone(&e, &m).map_err(err)?;
        let wit = report
            .witness
            .ok_or(format!("seed {seed}: no violating pair"))?;
        let eta = SupportFunction::midpoint(wit.first, wit.second);
        let r = theta_evaluate(&e, &m, &eta, &m.pairs()[0].point).map_err(err)?;
        ensure!(
            !r.member,
            "seed {seed}: midpoint η is a member, gap {}",
            r.gap()
        );
        let pairwise = pairwise_theta_gap(&e, &m, &eta).map_err(err)?;
        ensure!(
            (r.gap() - pairwise).abs() <= 1e-9,
            "seed {seed}: flat identity off"
        );
    }
    Ok(())
}

fn invariance<Sp, Sm>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
    sampler: &mut Sm,
    seed: u64,
) -> Outcome
where
    Sp: GeodesicSpace,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let bases: Vec<Sp::Point> = (0..5).map(|_| sampler.sample_point()).collect();
    let w = check_w_property(space, m, &bases, &lambda_grid(6)).map_err(err)?;
    ensure!(
        w.base_point_invariant(),
        "{} seed {seed}: 𝒲 verdicts {:?}",
        space.name(),
        w.violated_at_base
    );
    let mut etas = EtaSampler::new(seed);
    let tol = space.context().tol.clone();
    for _ in 0..20 {
        let eta = etas.sample(m.len()).unwrap();
        let r = check_theta_p_independence(space, m, &eta, &bases).map_err(err)?;
        ensure!(
            r.consistent(),
            "{} seed {seed}: Θ flags {:?}",
            space.name(),
            r.members
        );
        for g in &r.gaps {
            ensure!(
                (g.clone() - r.gaps[0].clone()).abs() <= tol,
                "{} seed {seed}: gaps {:?}",
                space.name(),
                r.gaps
            );
        }
    }
    Ok(())
}

fn p_independence() -> Outcome {
    let spider = Spider::<Rational>::new();
    let e = Euclidean::<f64>::new(2).map_err(err)?;
    for seed in 0..10u64 {
        if seed % 2 == 0 {
            let m = spider_relation(seed, 4);
            invariance(
                &spider,
                &m,
                &mut SpiderSampler::new(seed + 50, DEFAULT_BRANCHES),
                seed,
            )?;
        } else {
            let m = monotone_euclidean(seed, 5);
            invariance(&e, &m, &mut EuclideanSampler::new(seed + 50, 2, 4), seed)?;
        }
    }
    // the reference relation fails 𝒲 at every base point
    let m = hadamard_core::reproduce::spider_relation(5);
    invariance(&spider, &m, &mut SpiderSampler::new(3, DEFAULT_BRANCHES), 3)
}

/// `min_i ⟨z − (Axᵢ + c), x − xᵢ⟩` written out with plain vectors.
fn direct_margin(inst: &ExtensionInstance, mu: &[f64]) -> f64 {
    let mix = |vs: &[Vec<f64>]| -> [f64; 2] {
        let mut out = [0.0; 2];
        for (v, w) in vs.iter().zip(mu) {
            out[0] += w * v[0];
            out[1] += w * v[1];
        }
        out
    };
    let z = mix(&inst.generators);
    let x = mix(&inst.anchors);
    inst.relation
        .pairs()
        .iter()
        .map(|pair| {
            let mut d = [0.0; 2];
            for t in pair.dual.terms() {
                for (k, dk) in d.iter_mut().enumerate() {
                    *dk += t.weight * (t.head.coords()[k] - t.tail.coords()[k]);
                }
            }
            let xi = pair.point.coords();
            (z[0] - d[0]) * (x[0] - xi[0]) + (z[1] - d[1]) * (x[1] - xi[1])
        })
        .fold(f64::INFINITY, f64::min)
}

fn extension_search() -> Outcome {
    let start = Instant::now();
    let e = Euclidean::<f64>::new(2).map_err(err)?;
    for seed in 0..10u64 {
        let inst = extension_instance(seed);
        let opts = SearchOptions::new(1e-6);
        let out =
            find_extension_point(&e, &inst.relation, &inst.hull, &inst.phi, &opts).map_err(err)?;
        ensure!(
            out.succeeded(),
            "seed {seed}: inconclusive, margin {:?}",
            out.result().margin
        );
        ensure!(
            verify_extension(
                &e,
                &inst.relation,
                &inst.hull,
                &inst.phi,
                out.result(),
                &1e-6
            )
            .map_err(err)?,
            "seed {seed}: verification failed"
        );

        let (_, grid) = grid_maximin(&e, &inst.relation, &inst.hull, &inst.phi, 4).map_err(err)?;
        let oracle = simplex_grid::<f64>(4, inst.hull.len())
            .iter()
            .map(|mu| direct_margin(&inst, mu))
            .fold(f64::NEG_INFINITY, f64::max);
        let Margin::Finite(grid) = grid else {
            return Err(format!("seed {seed}: unbounded grid margin"));
        };
        ensure!(
            (grid - oracle).abs() <= 1e-9,
            "seed {seed}: grid {grid} vs oracle {oracle}"
        );
    }
    within(Duration::from_secs(30), start)
}

fn identity_suite() -> Outcome {
    let spider = Spider::<Rational>::new();
    let mut s = SpiderSampler::new(DEFAULT_SEED, DEFAULT_BRANCHES);
    let r = check_identities(&spider, &mut s, 10_000).map_err(err)?;
    for id in Identity::ALL {
        let o = r.outcome(id);
        ensure!(o.passed(), "spider {}: {} failures", id.name(), o.failures);
    }
    let e = Euclidean::<f64>::new(3).map_err(err)?;
    let mut s = EuclideanSampler::new(DEFAULT_SEED, 3, 4);
    let r = check_identities(&e, &mut s, 10_000).map_err(err)?;
    let cs = r.outcome(Identity::CauchySchwarz);
    ensure!(
        cs.passed(),
        "Euclidean Cauchy-Schwarz: {} failures",
        cs.failures
    );
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact reference values", exact_values),
        ("pairwise margin table 25x25", margin_table),
        ("single-term norm bounds", norms),
        ("flatness suite", flatness),
        ("theta membership suite", theta_suite),
        ("base-point independence", p_independence),
        ("extension search", extension_search),
        ("identity suite", identity_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("[PASS] {} {name} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {name} ({ms} ms): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
