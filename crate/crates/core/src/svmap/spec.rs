//! JSON descriptions of set-valued maps.
//!
//! ```json
//! {"domain": {"lo": [-1], "hi": [3], "h": 0.1},
//!  "kind": "interval_map",
//!  "params": {"f": "sin(r)", "g": "cos(r)"}}
//! ```
//!
//! Kinds and their parameters:
//!
//! * `interval_map`: `f`, `g` expressions.
//! * `constant`: `value`, a region document.
//! * `translate_family`: `base` region, `direction` vector, `profile` expression.
//! * `expr`: `boxes`, a list of boxes whose axes are `[lo_expr, hi_expr]`
//!   pairs. A box whose lower bound exceeds its upper bound on some axis
//!   is dropped at that parameter, so the plot may take the value ∅.
//!
//! Expressions see the parameter as `r1 … rm`; `r` is an alias for `r1`.
//! `lo`/`hi` may be given as scalars on one-dimensional domains.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use super::{interval_map, ParamDomain, ScalarFn, SetFn, SetPlot};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::setrep::json::region_from_json;
use crate::setrep::{AxisBox, Interval, RegionSet};

#[derive(Deserialize)]
#[serde(untagged)]
enum Bounds {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Bounds {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Bounds::Scalar(x) => vec![x],
            Bounds::Vector(v) => v,
        }
    }
}

#[derive(Deserialize)]
struct DomainDoc {
    lo: Bounds,
    hi: Bounds,
    h: f64,
}

#[derive(Deserialize)]
struct PlotDoc {
    domain: DomainDoc,
    kind: String,
    #[serde(default)]
    params: Value,
}

/// Names `r, r1, …, rm` bound to `[r[0], r[0], …, r[m-1]]`.
fn var_names(m: usize) -> Vec<String> {
    std::iter::once("r".to_string())
        .chain((1..=m).map(|i| format!("r{i}")))
        .collect()
}

fn param_expr(src: &str, m: usize) -> Result<ScalarFn> {
    let names = var_names(m);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let e = Expr::parse(src, &refs)?;
    Ok(Arc::new(move |r: &[f64]| {
        let mut args = Vec::with_capacity(r.len() + 1);
        args.push(r[0]);
        args.extend_from_slice(r);
        e.eval(&args)
    }))
}

fn str_param<'a>(params: &'a Value, key: &str) -> Result<&'a str> {
    params
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Invalid(format!("missing string parameter '{key}'")))
}

fn param<'a>(params: &'a Value, key: &str) -> Result<&'a Value> {
    params
        .get(key)
        .ok_or_else(|| Error::Invalid(format!("missing parameter '{key}'")))
}

pub fn domain_from_json(v: &Value) -> Result<ParamDomain> {
    let d: DomainDoc = serde_json::from_value(v.clone())?;
    ParamDomain::new(d.lo.into_vec(), d.hi.into_vec(), d.h)
}

pub fn plot_from_json(v: &Value) -> Result<SetPlot> {
    let doc: PlotDoc = serde_json::from_value(v.clone())?;
    let domain = ParamDomain::new(doc.domain.lo.into_vec(), doc.domain.hi.into_vec(), doc.domain.h)?;
    let m = domain.dim();
    let p = &doc.params;
    match doc.kind.as_str() {
        "interval_map" => {
            let f = param_expr(str_param(p, "f")?, m)?;
            let g = param_expr(str_param(p, "g")?, m)?;
            Ok(interval_map(domain, f, g))
        }
        "constant" => Ok(SetPlot::constant(domain, region_from_json(param(p, "value")?)?)),
        "translate_family" => {
            let base = region_from_json(param(p, "base")?)?;
            let direction: Vec<f64> = serde_json::from_value(param(p, "direction")?.clone())?;
            let profile = param_expr(str_param(p, "profile")?, m)?;
            SetPlot::translate_family(domain, base, direction, profile)
        }
        "expr" => expr_plot(domain, param(p, "boxes")?),
        other => Err(Error::Invalid(format!(
            "unknown plot kind '{other}' (expected interval_map, constant, translate_family, expr)"
        ))),
    }
}

fn expr_plot(domain: ParamDomain, boxes: &Value) -> Result<SetPlot> {
    let m = domain.dim();
    let raw: Vec<Vec<(String, String)>> = serde_json::from_value(boxes.clone())?;
    let dim = raw
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Invalid("expr plot needs at least one box".into()))?;
    let mut parsed: Vec<Vec<(ScalarFn, ScalarFn)>> = Vec::with_capacity(raw.len());
    for b in &raw {
        if b.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.len(),
            });
        }
        parsed.push(
            b.iter()
                .map(|(lo, hi)| Ok((param_expr(lo, m)?, param_expr(hi, m)?)))
                .collect::<Result<_>>()?,
        );
    }
    let eval: SetFn = Arc::new(move |r| {
        let boxes = parsed
            .iter()
            .filter_map(|axes| {
                let sides: Option<Vec<Interval>> = axes
                    .iter()
                    .map(|(lo, hi)| Interval::closed(lo(r), hi(r)).ok())
                    .collect();
                sides.map(|s| AxisBox::new(s).expect("nonempty axis list"))
            })
            .collect();
        RegionSet::from_boxes(boxes, dim).expect("box dimension fixed")
    });
    Ok(SetPlot::new(domain, dim, eval).with_label("expr"))
}

pub fn plot_from_str(text: &str) -> Result<SetPlot> {
    plot_from_json(&serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_map_document() {
        let p = plot_from_str(
            r#"{"domain":{"lo":-1,"hi":3,"h":0.1},"kind":"interval_map",
                "params":{"f":"sin(r)","g":"cos(r1)"}}"#,
        )
        .unwrap();
        assert_eq!(p.domain().len(), 41);
        assert!(p.interval_parts().is_some());
        assert_eq!(p.eval(&[0.0]), RegionSet::intervals(&[(0.0, 1.0)]).unwrap());
    }

    #[test]
    fn constant_and_translate() {
        let c = plot_from_str(
            r#"{"domain":{"lo":[0],"hi":[1],"h":0.5},"kind":"constant",
                "params":{"value":{"dim":1,"boxes":[[[0,1]]]}}}"#,
        )
        .unwrap();
        assert_eq!(c.eval(&[0.3]), RegionSet::intervals(&[(0.0, 1.0)]).unwrap());

        let t = plot_from_str(
            r#"{"domain":{"lo":-2,"hi":2,"h":0.05},"kind":"translate_family",
                "params":{"base":{"dim":1,"boxes":[[[-1,1]]]},"direction":[1],"profile":"r"}}"#,
        )
        .unwrap();
        assert_eq!(t.eval(&[0.5]), RegionSet::intervals(&[(-0.5, 1.5)]).unwrap());
    }

    #[test]
    fn expr_boxes_may_vanish() {
        let p = plot_from_str(
            r#"{"domain":{"lo":-2,"hi":2,"h":0.05},"kind":"expr",
                "params":{"boxes":[[["abs(r)-1","1-abs(r)"]]]}}"#,
        )
        .unwrap();
        assert_eq!(p.eval(&[0.0]), RegionSet::intervals(&[(-1.0, 1.0)]).unwrap());
        assert_eq!(p.eval(&[1.0]), RegionSet::point(&[0.0]).unwrap());
        assert!(p.eval(&[1.5]).is_empty());
    }

    #[test]
    fn bad_documents() {
        assert!(plot_from_str(r#"{"domain":{"lo":0,"hi":1,"h":0.1},"kind":"spiral"}"#).is_err());
        match plot_from_str(
            r#"{"domain":{"lo":0,"hi":1,"h":0.1},"kind":"interval_map","params":{"f":"r+","g":"r"}}"#,
        ) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(plot_from_str(r#"{"domain":{"lo":1,"hi":0,"h":0.1},"kind":"constant"}"#).is_err());
    }
}
