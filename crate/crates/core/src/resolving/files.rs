//! Landmark files.
//!
//! ```json
//! {
//!   "spec": {"q": 2, "n": 4, "d": 2, "field": {"p": 2, "e": 1, "modulus": [0, 1]}},
//!   "landmarks": [[[0, 1], [1, 0], [0, 0], [1, 1]], ...],
//!   "provenance": [{"block": 0, "label": 0, "coords": [0, 0]}, ...],
//!   "construction": {"case": 1, "blocks": 8, "anchor": [[...], ...]}
//! }
//! ```
//!
//! `provenance` and `construction` are optional on input.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::bilform::{vertices_from_json, vertices_to_json, GraphSpec};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec};

use super::construct::{ConstructionContext, LandmarkSet, Provenance};

pub fn landmark_file_value(set: &LandmarkSet, ctx: Option<&ConstructionContext>) -> Value {
    let g = set.spec();
    let mut v = json!({
        "spec": {
            "q": g.q(),
            "n": g.n(),
            "d": g.d(),
            "field": g.field().spec(),
        },
        "landmarks": vertices_to_json(set.landmarks()),
        "provenance": set.provenance(),
    });
    if let Some(ctx) = ctx {
        v["construction"] = json!({
            "case": ctx.case.number(),
            "blocks": ctx.blocks.len(),
            "anchor": ctx.anchor.basis_rows(),
        });
    }
    v
}

pub fn landmark_file_json(set: &LandmarkSet, ctx: Option<&ConstructionContext>) -> String {
    let mut s = serde_json::to_string_pretty(&landmark_file_value(set, ctx)).expect("plain JSON");
    s.push('\n');
    s
}

#[derive(Deserialize)]
struct SpecRepr {
    q: u64,
    n: usize,
    d: usize,
    field: Option<FieldSpec>,
}

pub fn landmark_set_from_value(value: &Value) -> Result<LandmarkSet> {
    let spec_value = value
        .get("spec")
        .ok_or_else(|| Error::Format("landmark file has no \"spec\"".into()))?;
    let repr: SpecRepr = serde_json::from_value(spec_value.clone())?;
    let field = match &repr.field {
        Some(fs) => Field::from_spec(fs)?,
        None => Field::from_order(repr.q)?,
    };
    if field.q() as u64 != repr.q {
        return Err(Error::Format(format!(
            "field of order {} declared for q = {}",
            field.q(),
            repr.q
        )));
    }
    let spec = GraphSpec::new(&field, repr.n, repr.d)?;
    let landmarks = vertices_from_json(
        &spec,
        value
            .get("landmarks")
            .ok_or_else(|| Error::Format("landmark file has no \"landmarks\"".into()))?,
    )?;
    let provenance: Option<Vec<Provenance>> = match value.get("provenance") {
        None | Some(Value::Null) => None,
        Some(p) => Some(serde_json::from_value(p.clone())?),
    };
    LandmarkSet::new(&spec, landmarks, provenance)
}

pub fn read_landmark_file(path: &std::path::Path) -> Result<LandmarkSet> {
    let text = std::fs::read_to_string(path)?;
    landmark_set_from_value(&serde_json::from_str(&text)?)
}
