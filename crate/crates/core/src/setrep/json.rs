//! JSON document form of [`RegionSet`].
//!
//! ```json
//! {"dim": 1, "universe": [[-10, 10]], "boxes": [[["-inf", 0.5, "[)"]], [[1, 2]]]}
//! ```
//!
//! Each box is a list of per-axis entries `[lo, hi]` (closed) or
//! `[lo, hi, kind]` with `kind` one of `"[]"`, `"()"`, `"[)"`, `"(]"`.
//! Infinite coordinates are the strings `"-inf"` and `"inf"`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::interval::{AxisBox, Interval};
use super::region::RegionSet;
use crate::error::{Error, Result};

fn coord_to_json(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

fn coord_from_json(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Invalid(format!("coordinate {n} is not a float"))),
        Value::String(s) if s == "inf" || s == "+inf" => Ok(f64::INFINITY),
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        other => Err(Error::Invalid(format!("bad coordinate {other}"))),
    }
}

pub fn interval_to_json(iv: &Interval) -> Value {
    let lo = coord_to_json(iv.lo());
    let hi = coord_to_json(iv.hi());
    // infinite ends are always open; only finite ends need a kind marker
    let lo_open = iv.lo_open() && iv.lo().is_finite();
    let hi_open = iv.hi_open() && iv.hi().is_finite();
    match (lo_open, hi_open) {
        (false, false) => json!([lo, hi]),
        (true, true) => json!([lo, hi, "()"]),
        (true, false) => json!([lo, hi, "(]"]),
        (false, true) => json!([lo, hi, "[)"]),
    }
}

pub fn interval_from_json(v: &Value) -> Result<Interval> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Invalid(format!("interval must be an array, got {v}")))?;
    let (lo_open, hi_open) = match arr.len() {
        2 => (false, false),
        3 => match arr[2].as_str() {
            Some("[]") => (false, false),
            Some("()") => (true, true),
            Some("(]") => (true, false),
            Some("[)") => (false, true),
            _ => return Err(Error::Invalid(format!("bad interval kind {}", arr[2]))),
        },
        n => return Err(Error::Invalid(format!("interval needs 2 or 3 entries, got {n}"))),
    };
    Interval::new(coord_from_json(&arr[0])?, coord_from_json(&arr[1])?, lo_open, hi_open)
}

pub fn box_to_json(b: &AxisBox) -> Value {
    Value::Array(b.sides().iter().map(interval_to_json).collect())
}

pub fn box_from_json(v: &Value) -> Result<AxisBox> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Invalid(format!("box must be an array of intervals, got {v}")))?;
    AxisBox::new(arr.iter().map(interval_from_json).collect::<Result<_>>()?)
}

pub fn region_to_json(a: &RegionSet) -> Value {
    let mut doc = serde_json::Map::new();
    doc.insert("dim".into(), json!(a.dim()));
    if let Some(u) = a.universe() {
        doc.insert("universe".into(), box_to_json(u));
    }
    doc.insert(
        "boxes".into(),
        Value::Array(a.boxes().iter().map(box_to_json).collect()),
    );
    Value::Object(doc)
}

pub fn region_from_json(v: &Value) -> Result<RegionSet> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Invalid("region set needs an integer \"dim\"".into()))?
        as usize;
    let boxes = v
        .get("boxes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid("region set needs a \"boxes\" array".into()))?
        .iter()
        .map(box_from_json)
        .collect::<Result<Vec<_>>>()?;
    let set = RegionSet::from_boxes(boxes, dim)?;
    match v.get("universe") {
        None | Some(Value::Null) => Ok(set),
        Some(u) => set.with_universe(box_from_json(u)?),
    }
}

impl Serialize for RegionSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        region_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegionSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        region_from_json(&v).map_err(D::Error::custom)
    }
}

impl Serialize for AxisBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        box_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AxisBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        box_from_json(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_lines_and_kinds_round_trip() {
        let text = r#"{"dim":1,"universe":[[-10,10]],"boxes":[[["-inf",0.5,"[)"]],[[1,2]]]}"#;
        let a: RegionSet = serde_json::from_str(text).unwrap();
        assert!(a.contains(&[-1e9]).unwrap());
        assert!(!a.contains(&[0.5]).unwrap());
        assert!(a.contains(&[2.0]).unwrap());
        let back = serde_json::to_string(&a).unwrap();
        let b: RegionSet = serde_json::from_str(&back).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.universe(), b.universe());
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(serde_json::from_str::<RegionSet>(r#"{"boxes":[]}"#).is_err());
        assert!(serde_json::from_str::<RegionSet>(r#"{"dim":1,"boxes":[[[2,1]]]}"#).is_err());
        assert!(serde_json::from_str::<RegionSet>(r#"{"dim":1,"boxes":[[[0,1,"{}"]]]}"#).is_err());
        assert!(serde_json::from_str::<RegionSet>(r#"{"dim":2,"boxes":[[[0,1]]]}"#).is_err());
    }
}
