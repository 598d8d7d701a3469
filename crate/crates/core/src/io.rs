//! JSON encoding of spaces, points, dual elements, relations and hulls.
//!
//! Exact scalars are written as `"p/q"` strings. On input a scalar may be a
//! string (`"3/10"`, `"0.3"`, `"1e-3"`) or a JSON number; numbers are read
//! from their decimal text, so `0.3` is exactly `3/10` in exact mode.
//!
//! Parse errors carry a location such as `pairs[2].dual.terms[0].weight`.

use serde_json::{json, Value};

use crate::dual::{DualElement, DualTerm};
use crate::error::{Error, Result};
use crate::extension::{ConvexHullSet, PhiMap, PhiTable};
use crate::monotone::Relation;
use crate::scalar::{Rational, Scalar};
use crate::spaces::{Euclidean, EuclideanPoint, GeodesicSpace, Spider, SpiderPoint};

/// Parsed `{"model": …}` space description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    Euclidean { dim: usize },
    Spider,
}

impl SpaceSpec {
    pub fn to_json(self) -> Value {
        match self {
            SpaceSpec::Euclidean { dim } => json!({"model": "euclidean", "dim": dim}),
            SpaceSpec::Spider => json!({"model": "spider"}),
        }
    }
}

fn field<'a>(v: &'a Value, key: &str, loc: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| Error::format(loc, "expected an object"))?
        .get(key)
        .ok_or_else(|| Error::format(loc, format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, loc: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::format(loc, "expected an array"))
}

fn join(loc: &str, key: &str) -> String {
    if loc.is_empty() {
        key.to_string()
    } else {
        format!("{loc}.{key}")
    }
}

pub fn parse_space(v: &Value, loc: &str) -> Result<SpaceSpec> {
    let model = field(v, "model", loc)?
        .as_str()
        .ok_or_else(|| Error::format(join(loc, "model"), "expected a string"))?;
    match model {
        "spider" => Ok(SpaceSpec::Spider),
        "euclidean" => {
            let dim = field(v, "dim", loc)?
                .as_u64()
                .filter(|d| *d >= 1)
                .ok_or_else(|| Error::format(join(loc, "dim"), "expected a positive integer"))?;
            Ok(SpaceSpec::Euclidean { dim: dim as usize })
        }
        other => Err(Error::format(
            join(loc, "model"),
            format!("unknown model \"{other}\" (expected \"euclidean\" or \"spider\")"),
        )),
    }
}

pub fn parse_scalar<S: Scalar>(v: &Value, loc: &str) -> Result<S> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::format(loc, "expected a number or a \"p/q\" string")),
    };
    S::parse_scalar(&text).map_err(|e| Error::format(loc, e.to_string()))
}

pub fn scalar_to_json<S: Scalar>(s: &S) -> Value {
    if S::is_exact() {
        return Value::String(s.render());
    }
    serde_json::Number::from_f64(s.to_f64())
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(s.render()))
}

/// A space model that can read and write its points as JSON.
pub trait JsonModel: GeodesicSpace<Point: std::fmt::Display> {
    fn spec(&self) -> SpaceSpec;
    fn point_from_json(&self, v: &Value, loc: &str) -> Result<Self::Point>;
    fn point_to_json(&self, p: &Self::Point) -> Value;
}

impl JsonModel for Spider<Rational> {
    fn spec(&self) -> SpaceSpec {
        SpaceSpec::Spider
    }

    fn point_from_json(&self, v: &Value, loc: &str) -> Result<SpiderPoint<Rational>> {
        let branch = field(v, "branch", loc)?
            .as_u64()
            .filter(|b| (1..=u32::MAX as u64).contains(b))
            .ok_or_else(|| Error::format(join(loc, "branch"), "expected a positive integer"))?;
        let radius = parse_scalar(field(v, "radius", loc)?, &join(loc, "radius"))?;
        SpiderPoint::new(branch as u32, radius).map_err(|e| Error::format(loc, e.to_string()))
    }

    fn point_to_json(&self, p: &SpiderPoint<Rational>) -> Value {
        json!({"branch": p.branch(), "radius": scalar_to_json(p.radius())})
    }
}

impl JsonModel for Euclidean<f64> {
    fn spec(&self) -> SpaceSpec {
        SpaceSpec::Euclidean { dim: self.dim() }
    }

    fn point_from_json(&self, v: &Value, loc: &str) -> Result<EuclideanPoint<f64>> {
        let coords = array(v, loc)?
            .iter()
            .enumerate()
            .map(|(i, c)| parse_scalar::<f64>(c, &format!("{loc}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        self.point(coords)
            .map_err(|e| Error::format(loc, e.to_string()))
    }

    fn point_to_json(&self, p: &EuclideanPoint<f64>) -> Value {
        Value::Array(p.coords().iter().map(scalar_to_json).collect())
    }
}

pub fn parse_points<Sp: JsonModel>(space: &Sp, v: &Value, loc: &str) -> Result<Vec<Sp::Point>> {
    array(v, loc)?
        .iter()
        .enumerate()
        .map(|(i, p)| space.point_from_json(p, &format!("{loc}[{i}]")))
        .collect()
}

pub fn parse_dual<Sp: JsonModel>(
    space: &Sp,
    v: &Value,
    loc: &str,
) -> Result<DualElement<Sp::Point, Sp::Scalar>> {
    let terms_loc = join(loc, "terms");
    let terms = array(field(v, "terms", loc)?, &terms_loc)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let tl = format!("{terms_loc}[{i}]");
            Ok(DualTerm {
                weight: parse_scalar(field(t, "weight", &tl)?, &join(&tl, "weight"))?,
                tail: space.point_from_json(field(t, "tail", &tl)?, &join(&tl, "tail"))?,
                head: space.point_from_json(field(t, "head", &tl)?, &join(&tl, "head"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualElement::from_terms(terms))
}

pub fn dual_to_json<Sp: JsonModel>(space: &Sp, f: &DualElement<Sp::Point, Sp::Scalar>) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|t| {
            json!({
                "weight": scalar_to_json(&t.weight),
                "tail": space.point_to_json(&t.tail),
                "head": space.point_to_json(&t.head),
            })
        })
        .collect();
    json!({ "terms": terms })
}

/// Reads the `pairs` of a relation document. The document's `space` is
/// checked separately with [`parse_space`].
pub fn parse_relation<Sp: JsonModel>(
    space: &Sp,
    v: &Value,
    loc: &str,
) -> Result<Relation<Sp::Point, Sp::Scalar>> {
    let pairs_loc = join(loc, "pairs");
    let pairs = array(field(v, "pairs", loc)?, &pairs_loc)?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pl = format!("{pairs_loc}[{i}]");
            Ok((
                space.point_from_json(field(p, "point", &pl)?, &join(&pl, "point"))?,
                parse_dual(space, field(p, "dual", &pl)?, &join(&pl, "dual"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Relation::from_pairs(pairs))
}

pub fn relation_to_json<Sp: JsonModel>(
    space: &Sp,
    relation: &Relation<Sp::Point, Sp::Scalar>,
) -> Value {
    let pairs: Vec<Value> = relation
        .pairs()
        .iter()
        .map(|p| json!({"point": space.point_to_json(&p.point), "dual": dual_to_json(space, &p.dual)}))
        .collect();
    json!({"space": space.spec().to_json(), "pairs": pairs})
}

pub fn parse_hull<Sp: JsonModel>(
    space: &Sp,
    v: &Value,
    loc: &str,
) -> Result<ConvexHullSet<Sp::Point, Sp::Scalar>> {
    let gl = join(loc, "generators");
    let generators = array(field(v, "generators", loc)?, &gl)?
        .iter()
        .enumerate()
        .map(|(i, g)| parse_dual(space, g, &format!("{gl}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    ConvexHullSet::new(generators).map_err(|e| Error::format(gl, e.to_string()))
}

/// Reads a φ description. `v` may be the description itself or an object
/// holding it under `"phi"`.
pub fn parse_phi<Sp: JsonModel>(space: &Sp, v: &Value, loc: &str) -> Result<PhiMap<Sp::Point>> {
    let (v, loc) = match v.get("phi") {
        Some(inner) => (inner, join(loc, "phi")),
        None => (v, loc.to_string()),
    };
    let kind = field(v, "kind", &loc)?
        .as_str()
        .ok_or_else(|| Error::format(join(&loc, "kind"), "expected a string"))?;
    match kind {
        "constant" => Ok(PhiMap::Constant(
            space.point_from_json(field(v, "point", &loc)?, &join(&loc, "point"))?,
        )),
        "blend" => Ok(PhiMap::AnchorBlend(parse_points(
            space,
            field(v, "anchors", &loc)?,
            &join(&loc, "anchors"),
        )?)),
        "table" => {
            let resolution = field(v, "resolution", &loc)?
                .as_u64()
                .filter(|r| (1..=u32::MAX as u64).contains(r))
                .ok_or_else(|| {
                    Error::format(join(&loc, "resolution"), "expected a positive integer")
                })?;
            let el = join(&loc, "entries");
            let mut parts = None;
            let entries = array(field(v, "entries", &loc)?, &el)?
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let l = format!("{el}[{i}]");
                    let key = array(field(e, "key", &l)?, &join(&l, "key"))?
                        .iter()
                        .map(|k| {
                            k.as_u64()
                                .filter(|k| *k <= u32::MAX as u64)
                                .map(|k| k as u32)
                                .ok_or_else(|| {
                                    Error::format(join(&l, "key"), "expected nonnegative integers")
                                })
                        })
                        .collect::<Result<Vec<u32>>>()?;
                    parts.get_or_insert(key.len());
                    let p = space.point_from_json(field(e, "point", &l)?, &join(&l, "point"))?;
                    Ok((key, p))
                })
                .collect::<Result<Vec<_>>>()?;
            let parts = parts.ok_or_else(|| Error::format(&el, "table has no entries"))?;
            PhiTable::new(resolution as u32, parts, entries)
                .map(PhiMap::Table)
                .map_err(|e| Error::format(el, e.to_string()))
        }
        other => Err(Error::format(
            join(&loc, "kind"),
            format!("unknown kind \"{other}\" (expected \"constant\", \"blend\" or \"table\")"),
        )),
    }
}

/// Parses a JSON document, tagging syntax errors with `name:line:column`.
pub fn parse_document(text: &str, name: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::format(format!("{name}:{}:{}", e.line(), e.column()), e.to_string()))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}
