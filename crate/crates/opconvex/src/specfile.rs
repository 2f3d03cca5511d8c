//! Structured function spec files and face-expression parsing for the CLI.
//!
//! A spec is a JSON object with a `kind` field selecting the payload schema;
//! unknown fields are rejected. `inf` spells the point at infinity. Faces are
//! written `F(alpha,{items})` / `E({items})` with comma-separated points and
//! `lo..hi` intervals.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closed_set::ClosedSet;
use crate::error::{Error, Result};
use crate::faces::FaceDescriptor;
use crate::interval::{FaceDescriptorI, MeasureI, OcFunctionI, SegmentI};
use crate::measure::{FiniteMeasure, Segment};
use crate::ocfun::OcFunction;
use crate::param::ExtendedParam;

/// A parsed spec: a cone member on (0, ∞) or on (−1, 1), plus its name.
#[derive(Debug, Clone)]
pub struct ParsedSpec {
    pub name: String,
    pub function: ParsedFunction,
}

/// The two function domains a spec can describe.
#[derive(Debug, Clone)]
pub enum ParsedFunction {
    HalfLine(OcFunction),
    Interval(OcFunctionI),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomSpec {
    lambda: ExtendedParam,
    mass: f64,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SegmentSpec {
    lo: f64,
    hi: f64,
    density: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalPayload {
    f1: f64,
    d1: f64,
    #[serde(default)]
    atoms: Vec<AtomSpec>,
    #[serde(default)]
    segments: Vec<SegmentSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtremePayload {
    alpha: ExtendedParam,
    lambda: ExtendedParam,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearPayload {
    p: f64,
    q: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumPayload {
    children: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalePayload {
    factor: f64,
    child: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomSpecI {
    lambda: f64,
    mass: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalCanonicalPayload {
    f0: f64,
    d0: f64,
    #[serde(default)]
    atoms: Vec<AtomSpecI>,
    #[serde(default)]
    segments: Vec<SegmentSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalExtremePayload {
    alpha: f64,
    lambda: f64,
}

fn parse_err(detail: impl std::fmt::Display) -> Error {
    Error::Parse(detail.to_string())
}

/// Parse the textual content of a spec file.
pub fn parse_spec_str(text: &str) -> Result<ParsedSpec> {
    let value: Value = serde_json::from_str(text).map_err(parse_err)?;
    let name = value
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("unnamed")
        .to_string();
    let function = parse_function_value(&value)?;
    Ok(ParsedSpec { name, function })
}

/// Parse one spec node (recursively used for `sum` children and `scale`).
pub fn parse_function_value(value: &Value) -> Result<ParsedFunction> {
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err("spec must be a JSON object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("missing string field `kind`"))?;
    // `kind` and `name` are envelope fields; the rest is the payload
    let mut payload = obj.clone();
    payload.remove("kind");
    payload.remove("name");
    let payload = Value::Object(payload);

    match kind {
        "canonical" => {
            let p: CanonicalPayload =
                serde_json::from_value(payload).map_err(parse_err)?;
            let atoms = p.atoms.into_iter().map(|a| (a.lambda, a.mass)).collect();
            let segments = p
                .segments
                .into_iter()
                .map(|s| Segment {
                    lo: s.lo,
                    hi: s.hi,
                    density: s.density,
                })
                .collect();
            let nu = FiniteMeasure::new(atoms, segments)?;
            Ok(ParsedFunction::HalfLine(OcFunction::new(p.f1, p.d1, nu)?))
        }
        "extreme" => {
            let p: ExtremePayload = serde_json::from_value(payload).map_err(parse_err)?;
            Ok(ParsedFunction::HalfLine(OcFunction::make_extreme(
                p.alpha, p.lambda,
            )))
        }
        "linear" => {
            let p: LinearPayload = serde_json::from_value(payload).map_err(parse_err)?;
            Ok(ParsedFunction::HalfLine(OcFunction::affine(p.p, p.q)?))
        }
        "sum" => {
            let p: SumPayload = serde_json::from_value(payload).map_err(parse_err)?;
            if p.children.is_empty() {
                return Err(parse_err("`sum` needs at least one child"));
            }
            let mut parts = p.children.iter().map(parse_function_value);
            let mut acc = parts.next().unwrap()?;
            for part in parts {
                acc = match (acc, part?) {
                    (ParsedFunction::HalfLine(a), ParsedFunction::HalfLine(b)) => {
                        ParsedFunction::HalfLine(a.add(&b))
                    }
                    (ParsedFunction::Interval(a), ParsedFunction::Interval(b)) => {
                        ParsedFunction::Interval(a.add(&b))
                    }
                    _ => {
                        return Err(parse_err(
                            "`sum` children mix the (0, inf) and (-1, 1) domains",
                        ))
                    }
                };
            }
            Ok(acc)
        }
        "scale" => {
            let p: ScalePayload = serde_json::from_value(payload).map_err(parse_err)?;
            match parse_function_value(&p.child)? {
                ParsedFunction::HalfLine(f) => {
                    Ok(ParsedFunction::HalfLine(f.scale(p.factor)?))
                }
                ParsedFunction::Interval(f) => {
                    Ok(ParsedFunction::Interval(f.scale(p.factor)?))
                }
            }
        }
        "interval-canonical" => {
            let p: IntervalCanonicalPayload =
                serde_json::from_value(payload).map_err(parse_err)?;
            let atoms = p.atoms.into_iter().map(|a| (a.lambda, a.mass)).collect();
            let segments = p
                .segments
                .into_iter()
                .map(|s| SegmentI {
                    lo: s.lo,
                    hi: s.hi,
                    density: s.density,
                })
                .collect();
            let mu = MeasureI::new(atoms, segments)?;
            Ok(ParsedFunction::Interval(OcFunctionI::new(p.f0, p.d0, mu)?))
        }
        "interval-extreme" => {
            let p: IntervalExtremePayload =
                serde_json::from_value(payload).map_err(parse_err)?;
            Ok(ParsedFunction::Interval(crate::interval::make_extreme_i(
                p.alpha, p.lambda,
            )?))
        }
        other => Err(parse_err(format!("unknown spec kind `{other}`"))),
    }
}

/// Serialize a (0, ∞) member back to canonical spec JSON.
pub fn spec_from_function(name: &str, f: &OcFunction) -> Value {
    let atoms: Vec<Value> = f
        .nu()
        .atoms()
        .iter()
        .map(|(l, m)| json!({ "lambda": l, "mass": m }))
        .collect();
    let segments: Vec<Value> = f
        .nu()
        .segments()
        .iter()
        .map(|s| json!({ "lo": s.lo, "hi": s.hi, "density": s.density }))
        .collect();
    json!({
        "name": name,
        "kind": "canonical",
        "f1": f.f1(),
        "d1": f.d1(),
        "atoms": atoms,
        "segments": segments,
    })
}

/// Serialize a (−1, 1) member back to interval-canonical spec JSON.
pub fn spec_from_interval_function(name: &str, f: &OcFunctionI) -> Value {
    let atoms: Vec<Value> = f
        .mu()
        .atoms()
        .iter()
        .map(|(l, m)| json!({ "lambda": l, "mass": m }))
        .collect();
    let segments: Vec<Value> = f
        .mu()
        .segments()
        .iter()
        .map(|s| json!({ "lo": s.lo, "hi": s.hi, "density": s.density }))
        .collect();
    json!({
        "name": name,
        "kind": "interval-canonical",
        "f0": f.f0(),
        "d0": f.d0(),
        "atoms": atoms,
        "segments": segments,
    })
}

/// Split a face expression into its head (F/E), optional α, and set body.
fn split_face_expr(expr: &str) -> Result<(char, Option<&str>, &str)> {
    let trimmed = expr.trim();
    let (head, rest) = trimmed
        .split_at_checked(1)
        .ok_or_else(|| parse_err("empty face expression"))?;
    let head = head
        .chars()
        .next()
        .unwrap()
        .to_ascii_uppercase();
    let rest = rest.trim();
    if !(rest.starts_with('(') && rest.ends_with(')')) {
        return Err(parse_err(format!(
            "face expression `{trimmed}` must be F(alpha,{{set}}) or E({{set}})"
        )));
    }
    let inner = &rest[1..rest.len() - 1];
    match head {
        'E' => {
            let body = inner.trim();
            let body = body
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| parse_err("E-face set must be {{...}}"))?;
            Ok(('E', None, body))
        }
        'F' => {
            let comma = inner
                .find(',')
                .ok_or_else(|| parse_err("F-face needs `alpha, {set}`"))?;
            let alpha = inner[..comma].trim();
            let body = inner[comma + 1..].trim();
            let body = body
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| parse_err("F-face set must be {{...}}"))?;
            Ok(('F', Some(alpha), body))
        }
        other => Err(parse_err(format!("unknown face head `{other}`"))),
    }
}

fn parse_param(text: &str) -> Result<ExtendedParam> {
    text.trim()
        .parse::<ExtendedParam>()
        .map_err(|_| parse_err(format!("cannot parse `{text}` as a parameter")))
}

fn parse_set_body(body: &str) -> Result<ClosedSet> {
    let mut intervals = Vec::new();
    for item in body.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = item.split_once("..") {
            intervals.push((parse_param(lo)?, parse_param(hi)?));
        } else {
            let p = parse_param(item)?;
            intervals.push((p, p));
        }
    }
    ClosedSet::from_intervals(intervals)
}

/// Parse a face expression over [0, ∞].
pub fn parse_face(expr: &str) -> Result<FaceDescriptor> {
    let (head, alpha, body) = split_face_expr(expr)?;
    let set = parse_set_body(body)?;
    match head {
        'E' => Ok(FaceDescriptor::e(set)),
        _ => FaceDescriptor::f(parse_param(alpha.unwrap())?, set),
    }
}

/// Parse a face expression over [−1, 1].
pub fn parse_face_i(expr: &str) -> Result<FaceDescriptorI> {
    let (head, alpha, body) = split_face_expr(expr)?;
    let set = parse_set_body(body)?;
    match head {
        'E' => FaceDescriptorI::e_face(set),
        _ => {
            let alpha = alpha
                .unwrap()
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_err("interval face alpha must be a number"))?;
            FaceDescriptorI::f_face(alpha, set)
        }
    }
}
