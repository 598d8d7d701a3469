use std::fs;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde_json::{json, Value};

use hadamard_core::dual::norm_bounds;
use hadamard_core::extension::{
    find_extension_point, verify_extension, Margin, SearchOptions, SearchOutcome,
};
use hadamard_core::flatness::{classify_flat, Verdict};
use hadamard_core::io::{
    dual_to_json, parse_document, parse_hull, parse_phi, parse_relation, parse_space,
    scalar_to_json, JsonModel, SpaceSpec,
};
use hadamard_core::monotone::{
    check_characterization, check_w_property, is_monotone_within, lambda_grid, theta_evaluate,
    CharacterizationReport, EtaSampler, Relation, WConfig, WWitness,
};
use hadamard_core::quasilin::check_identities;
use hadamard_core::reproduce::reproduce;
use hadamard_core::sampling::{EuclideanSampler, PointSampler, SpiderSampler, DEFAULT_BRANCHES};
use hadamard_core::{Context, Euclidean, GeodesicSpace, Rational, Scalar, Spider, SpiderPoint};

use crate::report::{code, Outcome};
use crate::{Cli, Command, Common};

const EUCLIDEAN_SAMPLE_SCALE: i64 = 4;

macro_rules! with_model {
    ($spec:expr, $common:expr, |$space:ident, $sampler:ident| $body:expr) => {
        match $spec {
            SpaceSpec::Spider => {
                let $space = Spider::<Rational>::with_context(context($common)?);
                #[allow(unused_mut, unused_variables)]
                let mut $sampler = SpiderSampler::<Rational>::new($common.seed, DEFAULT_BRANCHES);
                $body
            }
            SpaceSpec::Euclidean { dim } => {
                let $space = Euclidean::<f64>::with_context(dim, context($common)?)?;
                #[allow(unused_mut, unused_variables)]
                let mut $sampler =
                    EuclideanSampler::<f64>::new($common.seed, dim, EUCLIDEAN_SAMPLE_SCALE);
                $body
            }
        }
    };
}

fn context<S: Scalar>(common: &Common) -> Result<Context<S>> {
    match &common.tol {
        None => Ok(Context::default()),
        Some(t) => Ok(Context::with_tolerance(nonnegative::<S>(t, "--tol")?)),
    }
}

fn nonnegative<S: Scalar>(text: &str, flag: &str) -> Result<S> {
    let v = S::parse_scalar(text).with_context(|| format!("{flag}: cannot parse {text:?}"))?;
    if v < S::zero() {
        bail!("{flag}: must not be negative, got {text}");
    }
    Ok(v)
}

fn read_doc(path: &Path) -> Result<Value> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_document(&text, &path.display().to_string())?)
}

fn in_file<T>(path: &Path, r: hadamard_core::Result<T>) -> Result<T> {
    r.with_context(|| format!("in {}", path.display()))
}

fn doc_space(path: &Path, doc: &Value) -> Result<SpaceSpec> {
    let v = doc
        .get("space")
        .with_context(|| format!("in {}: missing field \"space\"", path.display()))?;
    in_file(path, parse_space(v, "space"))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let common = cli.command.common();
    match &cli.command {
        Command::ReproducePaper { table_size, .. } => {
            reproduce_outcome(&Spider::<Rational>::new(), *table_size)
        }
        Command::CheckMonotone { relation, .. } => {
            let doc = read_doc(relation)?;
            with_model!(doc_space(relation, &doc)?, common, |space, _s| {
                let m = in_file(relation, parse_relation(&space, &doc, ""))?;
                check_monotone(&space, &m)
            })
        }
        Command::CheckW {
            relation,
            base,
            steps,
            ..
        } => {
            let doc = read_doc(relation)?;
            with_model!(doc_space(relation, &doc)?, common, |space, _s| {
                let m = in_file(relation, parse_relation(&space, &doc, ""))?;
                let bases = base_points(&space, base, &m)?;
                check_w(&space, &m, &bases, *steps)
            })
        }
        Command::ClassifyFlat { space, .. } => {
            let doc = read_doc(space)?;
            let spec = in_file(space, parse_space(&doc, ""))?;
            with_model!(spec, common, |model, sampler| {
                flat(&model, &mut sampler, common)
            })
        }
        Command::Theta {
            relation,
            base,
            steps,
            ..
        } => {
            let doc = read_doc(relation)?;
            with_model!(doc_space(relation, &doc)?, common, |space, _s| {
                let m = in_file(relation, parse_relation(&space, &doc, ""))?;
                let bases = base_points(&space, base, &m)?;
                theta(&space, &m, &bases, *steps, common)
            })
        }
        Command::Extend {
            relation,
            hull,
            phi,
            eps,
            depth,
            refine,
            ..
        } => {
            let doc = read_doc(relation)?;
            let hull_doc = read_doc(hull)?;
            let phi_path = phi.as_deref().unwrap_or(hull);
            let phi_doc = if phi_path == hull.as_path() {
                hull_doc.clone()
            } else {
                read_doc(phi_path)?
            };
            let spec = doc_space(relation, &doc)?;
            for (p, d) in [(hull.as_path(), &hull_doc), (phi_path, &phi_doc)] {
                if d.get("space").is_some() && doc_space(p, d)? != spec {
                    bail!(
                        "{} describes a different space than {}",
                        p.display(),
                        relation.display()
                    );
                }
            }
            with_model!(spec, common, |space, _s| {
                let m = in_file(relation, parse_relation(&space, &doc, ""))?;
                let c = in_file(hull, parse_hull(&space, &hull_doc, ""))?;
                let f = in_file(phi_path, parse_phi(&space, &phi_doc, ""))?;
                extend(&space, &m, &c, &f, eps, *depth, *refine)
            })
        }
        Command::Norm { relation, .. } => {
            let doc = read_doc(relation)?;
            with_model!(doc_space(relation, &doc)?, common, |space, sampler| {
                let m = in_file(relation, parse_relation(&space, &doc, ""))?;
                norms(&space, &m, &mut sampler, common)
            })
        }
        Command::Identities { space, .. } => {
            let doc = read_doc(space)?;
            let spec = in_file(space, parse_space(&doc, ""))?;
            with_model!(spec, common, |model, sampler| {
                identities(&model, &mut sampler, common)
            })
        }
    }
}

fn base_points<Sp: JsonModel>(
    space: &Sp,
    base: &[String],
    m: &Relation<Sp::Point, Sp::Scalar>,
) -> Result<Vec<Sp::Point>> {
    if base.is_empty() {
        return Ok(m.domain().into_iter().take(1).collect());
    }
    base.iter()
        .map(|b| {
            let v = parse_document(b, "--base")?;
            Ok(space.point_from_json(&v, "--base")?)
        })
        .collect()
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> Value) -> Value {
    v.map_or(Value::Null, f)
}

/// Runs the reference reproduction on `space`; exposed so that broken
/// models can be plugged in.
pub fn reproduce_outcome<Sp>(space: &Sp, table_size: u32) -> Result<Outcome>
where
    Sp: GeodesicSpace<Scalar = Rational, Point = SpiderPoint<Rational>>,
{
    let r = reproduce(space, table_size)?;
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "expected": c.expected,
                "actual": c.actual,
                "pass": c.pass,
                "source": c.source,
            })
        })
        .collect();
    let mut text = String::new();
    for c in &r.checks {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        text.push_str(&format!("{mark}  {:<26} {}\n", c.name, c.actual));
        if !c.pass {
            text.push_str(&format!("      expected {}\n", c.expected));
        }
    }
    let passed = r.passed();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        r.checks.iter().filter(|c| c.pass).count(),
        r.checks.len()
    ));
    Ok(Outcome::new(
        code(passed),
        json!({"command": "reproduce-paper", "passed": passed, "checks": checks}),
        text,
    ))
}

fn check_monotone<Sp: JsonModel>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
) -> Result<Outcome> {
    let r = is_monotone_within(space, m, &space.context().tol)?;
    let witness = opt(
        r.witness.clone(),
        |w| json!({"first": w.first, "second": w.second, "margin": scalar_to_json(&w.margin)}),
    );
    let text = match &r.witness {
        None => format!(
            "monotone: {} pairs, {} pairwise checks, smallest margin {}",
            m.len(),
            r.pairs_checked,
            r.min_margin.as_ref().map_or("n/a".into(), |s| s.render())
        ),
        Some(w) => format!(
            "not monotone: pairs {} and {} have margin {}",
            w.first,
            w.second,
            w.margin.render()
        ),
    };
    Ok(Outcome::new(
        code(r.monotone),
        json!({
            "command": "check-monotone",
            "space": space.spec().to_json(),
            "monotone": r.monotone,
            "pairs": m.len(),
            "pairs_checked": r.pairs_checked,
            "min_margin": opt(r.min_margin, |s| scalar_to_json(&s)),
            "witness": witness,
        }),
        text,
    ))
}

fn w_witness_json<Sp: JsonModel>(space: &Sp, w: &WWitness<Sp::Point, Sp::Scalar>) -> Value {
    json!({
        "base": space.point_to_json(&w.base),
        "dual": dual_to_json(space, &w.dual),
        "x1": space.point_to_json(&w.x1),
        "x2": space.point_to_json(&w.x2),
        "lambda": scalar_to_json(&w.lambda),
        "lhs": scalar_to_json(&w.lhs),
        "rhs": scalar_to_json(&w.rhs),
    })
}

fn check_w<Sp: JsonModel>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
    bases: &[Sp::Point],
    steps: u32,
) -> Result<Outcome> {
    let r = check_w_property(space, m, bases, &lambda_grid(steps))?;
    let text = match &r.first_violation {
        None => format!("no 𝒲 violation found ({} checks)", r.checks),
        Some(w) => format!(
            "𝒲 violated ({} of {} checks); first: base {}, x1 {}, x2 {}, λ = {}: {} > {}",
            r.violations,
            r.checks,
            w.base,
            w.x1,
            w.x2,
            w.lambda.render(),
            w.lhs.render(),
            w.rhs.render()
        ),
    };
    Ok(Outcome::new(
        code(r.holds()),
        json!({
            "command": "check-w",
            "space": space.spec().to_json(),
            "holds": r.holds(),
            "checks": r.checks,
            "violations": r.violations,
            "base_points": bases.iter().map(|p| space.point_to_json(p)).collect::<Vec<_>>(),
            "violated_at_base": r.violated_at_base,
            "base_point_invariant": r.base_point_invariant(),
            "witness": opt(r.first_violation.as_ref(), |w| w_witness_json(space, w)),
        }),
        text,
    ))
}

fn flat<Sp, Sm>(space: &Sp, sampler: &mut Sm, common: &Common) -> Result<Outcome>
where
    Sp: JsonModel,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let tol = space.context().tol.clone();
    let v = classify_flat(space, sampler, common.samples as usize, &tol)?;
    let verdict = match v.verdict {
        Verdict::FlatOnSamples => "flat-on-samples",
        Verdict::NonFlat => "non-flat",
    };
    let witness = opt(v.witness.as_ref(), |w| {
        let points: serde_json::Map<String, Value> = w
            .criterion
            .point_roles()
            .iter()
            .zip(&w.points)
            .map(|(role, p)| (role.to_string(), space.point_to_json(p)))
            .collect();
        json!({
            "criterion": w.criterion.name(),
            "points": points,
            "lambda": scalar_to_json(&w.lambda),
            "residual": scalar_to_json(&w.residual),
        })
    });
    let text = match &v.witness {
        None => format!("flat on {} samples (not a proof)", v.samples),
        Some(w) => format!(
            "not flat: {} residual {} at λ = {} with {}",
            w.criterion.name(),
            w.residual.render(),
            w.lambda.render(),
            w.criterion
                .point_roles()
                .iter()
                .zip(&w.points)
                .map(|(r, p)| format!("{r} = {p}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    // both verdicts are results, not failures
    Ok(Outcome::new(
        0,
        json!({
            "command": "classify-flat",
            "space": space.spec().to_json(),
            "seed": common.seed,
            "verdict": verdict,
            "samples": v.samples,
            "witness": witness,
        }),
        text,
    ))
}

fn theta<Sp: JsonModel>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
    bases: &[Sp::Point],
    steps: u32,
    common: &Common,
) -> Result<Outcome> {
    let Some(p) = bases.first() else {
        return Ok(Outcome::new(
            0,
            json!({"command": "theta", "samples": 0, "members": 0, "non_members": 0,
                   "first_non_member": null, "characterization": {"status": "empty-relation"}}),
            "empty relation: every support function is vacuously a member".into(),
        ));
    };
    let count = common.samples as usize;
    let mut sampler = EtaSampler::new(common.seed);
    let (mut members, mut non_members, mut first) = (0usize, 0usize, None);
    for _ in 0..count {
        let eta = sampler
            .sample::<Sp::Scalar>(m.len())
            .expect("relation is not empty");
        let r = theta_evaluate(space, m, &eta, p)?;
        if r.member {
            members += 1;
        } else {
            non_members += 1;
            if first.is_none() {
                first = Some((eta, r.gap()));
            }
        }
    }
    let config = WConfig {
        base_points: bases.to_vec(),
        lambda_grid: lambda_grid(steps),
    };
    let characterization = check_characterization(
        space,
        m,
        &config,
        &mut EtaSampler::new(common.seed),
        count,
        p,
    )?;
    let (char_json, consistent) = match &characterization {
        CharacterizationReport::WPropertyNotEstablished(w) => (
            json!({"status": "w-property-not-established", "witness": w_witness_json(space, w)}),
            true,
        ),
        CharacterizationReport::Checked(c) => (
            json!({
                "status": "checked",
                "monotone": c.monotone,
                "consistent": c.consistent,
                "converse_probe": opt(c.converse_probe.as_ref(), |q| json!({
                    "first": q.first,
                    "second": q.second,
                    "margin": scalar_to_json(&q.margin),
                    "gap": scalar_to_json(&q.gap),
                    "member": q.member,
                })),
            }),
            c.consistent,
        ),
    };
    let first_json = opt(first.as_ref(), |(eta, gap)| {
        json!({
            "entries": eta.entries().iter().map(|(i, w)| json!({"index": i, "weight": scalar_to_json(w)})).collect::<Vec<_>>(),
            "gap": scalar_to_json(gap),
        })
    });
    let mut text = format!("{members} of {count} sampled support functions are members");
    if let Some((eta, gap)) = &first {
        text.push_str(&format!(
            "\nfirst non-member: {} (θ − rhs = {})",
            eta.entries()
                .iter()
                .map(|(i, w)| format!("{}·δ{i}", w.render()))
                .collect::<Vec<_>>()
                .join(" + "),
            gap.render()
        ));
    }
    text.push_str(&match &characterization {
        CharacterizationReport::WPropertyNotEstablished(_) => {
            "\ncharacterization not applicable: 𝒲-property fails on the grid".to_string()
        }
        CharacterizationReport::Checked(c) => format!(
            "\ncharacterization {} (relation {}monotone)",
            if c.consistent {
                "consistent"
            } else {
                "CONTRADICTED"
            },
            if c.monotone { "" } else { "not " }
        ),
    });
    Ok(Outcome::new(
        code(non_members == 0 && consistent),
        json!({
            "command": "theta",
            "space": space.spec().to_json(),
            "seed": common.seed,
            "base": space.point_to_json(p),
            "samples": count,
            "members": members,
            "non_members": non_members,
            "first_non_member": first_json,
            "characterization": char_json,
        }),
        text,
    ))
}

fn margin_json<S: Scalar>(m: &Margin<S>) -> Value {
    match m {
        Margin::Finite(s) => scalar_to_json(s),
        Margin::Unbounded => Value::String("unbounded".into()),
    }
}

fn margin_text<S: Scalar>(m: &Margin<S>) -> String {
    match m {
        Margin::Finite(s) => s.render(),
        Margin::Unbounded => "unbounded".into(),
    }
}

fn extend<Sp: JsonModel>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
    c: &hadamard_core::extension::ConvexHullSet<Sp::Point, Sp::Scalar>,
    phi: &hadamard_core::extension::PhiMap<Sp::Point>,
    eps: &str,
    depth: u32,
    refine: usize,
) -> Result<Outcome> {
    let mut options = SearchOptions::new(nonnegative::<Sp::Scalar>(eps, "--eps")?);
    options.grid_depth = depth;
    options.refine_steps = refine;
    let options = &options;
    let out = find_extension_point(space, m, c, phi, options)?;
    let r = out.result();
    let verified = out.succeeded() && verify_extension(space, m, c, phi, r, &options.eps)?;
    let status = match out {
        SearchOutcome::Extended(_) => "extended",
        SearchOutcome::Inconclusive(_) => "inconclusive",
    };
    let text = format!(
        "{status}: margin {} (grid {}), {} refinement steps\ncoordinates [{}]\npoint {}\npreconditions: monotone {}, 𝒲 {}",
        margin_text(&r.margin),
        margin_text(&r.grid_margin),
        r.iterations,
        r.coordinates.iter().map(|x| x.render()).collect::<Vec<_>>().join(", "),
        r.point,
        r.preconditions.monotone,
        r.preconditions.w_property,
    );
    Ok(Outcome::new(
        code(out.succeeded() && verified),
        json!({
            "command": "extend",
            "space": space.spec().to_json(),
            "status": status,
            "verified": verified,
            "coordinates": r.coordinates.iter().map(scalar_to_json).collect::<Vec<_>>(),
            "margin": margin_json(&r.margin),
            "grid_margin": margin_json(&r.grid_margin),
            "iterations": r.iterations,
            "point": space.point_to_json(&r.point),
            "z_dual": dual_to_json(space, &r.z_dual),
            "preconditions": {
                "monotone": r.preconditions.monotone,
                "w_property": r.preconditions.w_property,
                "augmented_w_property": r.preconditions.augmented_w_property,
            },
            "eps": scalar_to_json(&options.eps),
            "depth": options.grid_depth,
        }),
        text,
    ))
}

fn norms<Sp, Sm>(
    space: &Sp,
    m: &Relation<Sp::Point, Sp::Scalar>,
    sampler: &mut Sm,
    common: &Common,
) -> Result<Outcome>
where
    Sp: JsonModel,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut sound = true;
    let ctx = space.context();
    for (i, pair) in m.pairs().iter().enumerate() {
        let b = norm_bounds(space, &pair.dual, sampler, common.samples as usize)?;
        sound &= ctx.le(&b.lower, &b.upper);
        text.push_str(&format!(
            "pair {i}: {} ≤ ‖x⋄‖ ≤ {}\n",
            b.lower.render(),
            b.upper.render()
        ));
        rows.push(json!({
            "index": i,
            "lower": scalar_to_json(&b.lower),
            "upper": scalar_to_json(&b.upper),
            "quadruples": b.quadruples,
        }));
    }
    Ok(Outcome::new(
        code(sound),
        json!({"command": "norm", "space": space.spec().to_json(), "seed": common.seed, "bounds": rows}),
        text,
    ))
}

fn identities<Sp, Sm>(space: &Sp, sampler: &mut Sm, common: &Common) -> Result<Outcome>
where
    Sp: JsonModel,
    Sm: PointSampler<Scalar = Sp::Scalar, Point = Sp::Point>,
{
    let r = check_identities(space, sampler, common.samples as usize)?;
    let mut text = String::new();
    let rows: Vec<Value> = r
        .outcomes
        .iter()
        .map(|o| {
            text.push_str(&format!(
                "{}  {:<20} {} checked, {} failed\n",
                if o.passed() { "PASS" } else { "FAIL" },
                o.identity.name(),
                o.checked,
                o.failures
            ));
            json!({
                "identity": o.identity.name(),
                "checked": o.checked,
                "failures": o.failures,
                "witness": opt(o.first_witness.as_ref(), |w| json!({
                    "points": w.points.iter().map(|p| space.point_to_json(p)).collect::<Vec<_>>(),
                    "lhs": scalar_to_json(&w.lhs),
                    "rhs": scalar_to_json(&w.rhs),
                })),
            })
        })
        .collect();
    Ok(Outcome::new(
        code(r.passed()),
        json!({
            "command": "identities",
            "space": space.spec().to_json(),
            "seed": common.seed,
            "samples": r.samples,
            "passed": r.passed(),
            "identities": rows,
        }),
        text,
    ))
}
