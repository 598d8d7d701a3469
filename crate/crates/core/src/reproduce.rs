//! Exact recomputation of the reference spider values.
//!
//! The relation used throughout is `M = {(xₙ, [→yₙ₊₁yₙ])}` with
//! `xₙ = [(n, 1/2)]` and `yₙ = [(n, 1/n)]`.

use crate::dual::{evaluate, DualElement};
use crate::error::Result;
use crate::flatness::projection_residual;
use crate::monotone::{check_w_property, is_monotone, pair_margin, Relation};
use crate::quasilin::{qlin, BoundVector};
use crate::scalar::{ratio, Rational, Scalar};
use crate::spaces::{GeodesicSpace, SpiderPoint};

fn q(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

fn spider(branch: u32, radius: Rational) -> SpiderPoint<Rational> {
    SpiderPoint::new(branch, radius).expect("radius in [0, 1]")
}

/// `xₙ = [(n, 1/2)]`.
pub fn x_n(n: u32) -> SpiderPoint<Rational> {
    spider(n, q(1, 2))
}

/// `yₙ = [(n, 1/n)]`.
pub fn y_n(n: u32) -> SpiderPoint<Rational> {
    spider(n, q(1, n as i64))
}

/// `{(xₙ, [→yₙ₊₁yₙ]) : 1 ≤ n ≤ n_max}`.
pub fn spider_relation(n_max: u32) -> Relation<SpiderPoint<Rational>, Rational> {
    Relation::from_pairs((1..=n_max).map(|n| (x_n(n), DualElement::unit(y_n(n + 1), y_n(n)))))
}

/// Closed form of `⟨u⋄ − v⋄, →vu⟩` for `u = xₙ`, `v = xₘ`.
pub fn tabulated_margin(n: u32, m: u32) -> Rational {
    let inv = |k: u32| q(1, k as i64);
    if n == m {
        q(0, 1)
    } else if n == m + 1 {
        inv(m + 1) + inv(n) + inv(m)
    } else if n + 1 == m {
        inv(n + 1) + inv(n) + inv(m)
    } else {
        inv(n) + inv(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    /// What the value is, in words.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReproductionReport {
    pub checks: Vec<Check>,
}

impl ReproductionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, name: &str, source: &str, expected: String, actual: String) {
        let pass = expected == actual;
        self.checks.push(Check {
            name: name.into(),
            expected,
            actual,
            pass,
            source: source.into(),
        });
    }
}

/// Recomputes every reference value on `space`, which is expected to behave
/// like the spider tree. The pairwise table is compared for
/// `1 ≤ n, m ≤ table_max`.
pub fn reproduce<Sp>(space: &Sp, table_max: u32) -> Result<ReproductionReport>
where
    Sp: GeodesicSpace<Scalar = Rational, Point = SpiderPoint<Rational>>,
{
    let mut r = ReproductionReport::default();
    let render = |p: &SpiderPoint<Rational>| p.to_string();

    let (x, y) = (spider(2, q(1, 2)), spider(1, q(1, 2)));
    let (a, b) = (spider(3, q(1, 3)), spider(2, q(1, 2)));
    let l = q(1, 5);
    let m = space.geodesic(&x, &y, &l)?;
    r.push(
        "geodesic-cross-branch",
        "point at λ = 1/5 from [(2, 1/2)] to [(1, 1/2)]",
        render(&spider(2, q(3, 10))),
        render(&m),
    );
    let ab = BoundVector::new(a.clone(), b.clone());
    let lhs = qlin(space, &BoundVector::new(x.clone(), m), &ab)?;
    let full = qlin(space, &BoundVector::new(x.clone(), y.clone()), &ab)?;
    r.push(
        "qlin-partial-segment",
        "pairing of the partial segment with →ab, a = [(3, 1/3)], b = [(2, 1/2)]",
        q(-1, 6).render(),
        lhs.render(),
    );
    r.push(
        "qlin-full-segment",
        "pairing of →xy with →ab",
        q(-1, 2).render(),
        full.render(),
    );
    r.push(
        "qlin-scaled",
        "λ times the full-segment pairing",
        q(-1, 10).render(),
        (l.clone() * full).render(),
    );
    let residual = projection_residual(space, &x, &y, &a, &b, &l)?;
    r.push(
        "projection-residual",
        "difference of the two pairings; nonzero means not flat",
        q(-1, 15).render(),
        residual.render(),
    );

    let p = spider(1, q(1, 1));
    let l = q(1, 3);
    let xt = space.geodesic(&x_n(1), &x_n(3), &l)?;
    r.push(
        "geodesic-combination",
        "(2/3)x₁ ⊕ (1/3)x₃",
        render(&spider(1, q(1, 6))),
        render(&xt),
    );
    let dual = DualElement::unit(y_n(5), y_n(4));
    let at =
        |z: &SpiderPoint<Rational>| evaluate(space, &dual, &BoundVector::new(p.clone(), z.clone()));
    let w_lhs = at(&xt)?;
    let w_rhs = q(2, 3) * at(&x_n(1))? + q(1, 3) * at(&x_n(3))?;
    r.push(
        "w-lhs",
        "[→y₅y₄] paired with →p x̃, p = [(1, 1)]",
        q(1, 24).render(),
        w_lhs.render(),
    );
    r.push(
        "w-rhs",
        "convex combination of the endpoint pairings",
        q(1, 40).render(),
        w_rhs.render(),
    );
    r.push(
        "w-violated",
        "the 𝒲 inequality fails on this instance",
        "true".into(),
        (w_lhs > w_rhs).to_string(),
    );
    let restricted = Relation::from_pairs([
        (x_n(1), DualElement::unit(y_n(2), y_n(1))),
        (x_n(3), DualElement::unit(y_n(4), y_n(3))),
        (x_n(4), dual.clone()),
    ]);
    let report = check_w_property(
        space,
        &restricted,
        std::slice::from_ref(&p),
        std::slice::from_ref(&l),
    )?;
    r.push(
        "w-check-detects",
        "the 𝒲 checker flags a relation containing x₁, x₃ and [→y₅y₄]",
        "true".into(),
        (!report.holds()).to_string(),
    );

    let rel = spider_relation(table_max.max(1));
    let pairs = rel.pairs();
    let mut mismatches = Vec::new();
    let mut negative = 0usize;
    for n in 1..=table_max {
        for mm in 1..=table_max {
            let got = pair_margin(space, &pairs[(n - 1) as usize], &pairs[(mm - 1) as usize])?;
            if got < Rational::from_i64(0) {
                negative += 1;
            }
            let want = tabulated_margin(n, mm);
            if got != want {
                mismatches.push(format!(
                    "(n={n}, m={mm}): {} vs {}",
                    got.render(),
                    want.render()
                ));
            }
        }
    }
    let total = (table_max * table_max) as usize;
    r.push(
        "margin-n3-m2",
        "⟨u⋄ − v⋄, →vu⟩ for u = x₃, v = x₂",
        q(7, 6).render(),
        pair_margin(
            space,
            &spider_relation(3).pairs()[2],
            &spider_relation(3).pairs()[1],
        )?
        .render(),
    );
    r.push(
        "margin-table",
        "pairwise margins of M against the closed-form case table",
        format!("{total}/{total} match"),
        if mismatches.is_empty() {
            format!("{total}/{total} match")
        } else {
            format!(
                "{}/{total} match; first mismatch {}",
                total - mismatches.len(),
                mismatches[0]
            )
        },
    );
    r.push(
        "margin-table-nonnegative",
        "no pairwise margin is negative",
        "0".into(),
        negative.to_string(),
    );
    r.push(
        "relation-monotone",
        "M truncated to the table size is monotone",
        "true".into(),
        is_monotone(space, &rel)?.monotone.to_string(),
    );
    Ok(r)
}
