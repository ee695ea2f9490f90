//! JSON descriptions of functionals on ℝ^m and path families.
//!
//! ```json
//! {"functional": "x*sign(y)",
//!  "family": {"label": "c_alpha",
//!             "paths": [{"label": "a=1", "components": ["t", "t^2"]},
//!                       {"label": "a=0", "components": ["t", "0"]}]}}
//! ```
//!
//! The functional sees `x1 … xm`, with `x`, `y`, `z` as aliases for the
//! first three; path components are expressions in `t`.

use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use super::{Path, PathFamily};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Deserialize)]
struct PathDoc {
    #[serde(default)]
    label: Option<String>,
    components: Vec<String>,
}

#[derive(Deserialize)]
struct FamilyDoc {
    #[serde(default)]
    label: Option<String>,
    paths: Vec<PathDoc>,
}

pub type Functional = Arc<dyn Fn(&Vec<f64>) -> Result<f64> + Send + Sync>;

/// Expression functional on ℝ^m.
pub fn functional_from_str(src: &str, m: usize) -> Result<Functional> {
    let aliases = ["x", "y", "z"];
    let mut names: Vec<String> = aliases.iter().take(m).map(|s| s.to_string()).collect();
    let k = names.len();
    names.extend((1..=m).map(|i| format!("x{i}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let e = Expr::parse(src, &refs)?;
    Ok(Arc::new(move |p: &Vec<f64>| {
        if p.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: p.len() });
        }
        let mut args = Vec::with_capacity(k + m);
        args.extend_from_slice(&p[..k]);
        args.extend_from_slice(p);
        Ok(e.eval(&args))
    }))
}

pub fn family_from_json(v: &Value) -> Result<PathFamily<Vec<f64>>> {
    let doc: FamilyDoc = serde_json::from_value(v.clone())?;
    let dim = doc
        .paths
        .first()
        .map(|p| p.components.len())
        .ok_or_else(|| Error::Empty("path family has no paths".into()))?;
    let mut paths = Vec::with_capacity(doc.paths.len());
    for (i, p) in doc.paths.iter().enumerate() {
        if p.components.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.components.len(),
            });
        }
        let comps: Vec<&str> = p.components.iter().map(String::as_str).collect();
        let label = p.label.clone().unwrap_or_else(|| format!("path{i}"));
        paths.push(Path::from_exprs(label, &comps)?);
    }
    PathFamily::new(doc.label.unwrap_or_else(|| "family".into()), paths)
}

/// `{"functional": ..., "family": ...}`.
pub fn problem_from_json(v: &Value) -> Result<(Functional, PathFamily<Vec<f64>>)> {
    let fam = family_from_json(
        v.get("family")
            .ok_or_else(|| Error::Invalid("missing 'family'".into()))?,
    )?;
    let src = v
        .get("functional")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Invalid("missing string 'functional'".into()))?;
    let m = fam.paths()[0].base().len();
    Ok((functional_from_str(src, m)?, fam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svdiff::{adherence_derivative, DiffSchedule};

    #[test]
    fn multideriv_document() {
        let doc = serde_json::json!({
            "functional": "x*sign(y)",
            "family": {"label": "c", "paths": [
                {"label": "a=-1", "components": ["t", "-t^2"]},
                {"label": "a=0", "components": ["t", "0*t"]},
                {"label": "a=1", "components": ["t", "t^2"]}
            ]}
        });
        let (phi, fam) = problem_from_json(&doc).unwrap();
        let r = adherence_derivative(|p| phi(p), &fam, &DiffSchedule::default()).unwrap();
        assert_eq!(r.values(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn indexed_and_aliased_variables_agree() {
        let f = functional_from_str("x1 + 2*y - x3*z", 3).unwrap();
        assert_eq!(f(&vec![1.0, 2.0, 3.0]).unwrap(), 1.0 + 4.0 - 9.0);
        assert!(f(&vec![1.0]).is_err());
    }

    #[test]
    fn malformed_family() {
        assert!(family_from_json(&serde_json::json!({"paths": []})).is_err());
        let ragged = serde_json::json!({"paths": [{"components": ["t"]}, {"components": ["t", "t"]}]});
        assert!(family_from_json(&ragged).is_err());
        let bad = serde_json::json!({"paths": [{"components": ["t +"]}]});
        assert!(matches!(family_from_json(&bad), Err(Error::Parse { .. })));
    }
}
