use std::fmt;
use std::sync::{Arc, OnceLock};

use serde_json::Value;

use super::quadrature::integrate_with_breaks;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::setrep::RegionSet;

/// Absolute tolerance requested from the quadrature by [`ev`].
pub const EV_TOLERANCE: f64 = 1e-12;

fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// `∫_{−1}^{1} exp(−1/(1−u²)) du`, computed once.
pub(crate) fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        integrate_with_breaks(bump, -1.0, 1.0, &[0.0], 1e-15)
            .expect("bump is bounded")
            .value
    })
}

/// Compactly supported scalar function on ℝ.
#[derive(Clone)]
pub struct TestFunction {
    raw: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    norm: f64,
    breaks: Vec<f64>,
    mollifier: bool,
    label: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("norm", &self.norm)
            .finish()
    }
}

impl TestFunction {
    /// `x ↦ exp(−1/(1−u²)) / (radius·Z)` with `u = (x − center)/radius`,
    /// so that the integral is 1.
    pub fn mollifier(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::Invalid(format!("mollifier needs radius > 0, got {radius}")));
        }
        Ok(TestFunction {
            raw: Arc::new(move |x| bump((x - center) / radius)),
            support: (center - radius, center + radius),
            norm: radius * bump_mass(),
            breaks: vec![center],
            mollifier: true,
            label: format!("mollifier({center}, {radius})"),
        })
    }

    /// Expression in `x`, cut off outside `[lo, hi]`; scaled to unit
    /// integral when `normalize` is set.
    pub fn from_expr(source: &str, lo: f64, hi: f64, normalize: bool) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid(format!("test function support must be a bounded interval, got [{lo}, {hi}]")));
        }
        let e = Expr::parse(source, &["x"])?;
        let mut tf = TestFunction {
            raw: Arc::new(move |x| e.eval1(x)),
            support: (lo, hi),
            norm: 1.0,
            breaks: Vec::new(),
            mollifier: false,
            label: source.to_string(),
        };
        if normalize {
            let z = integrate_with_breaks(|x| (tf.raw)(x), lo, hi, &[], 1e-14)?.value;
            if z == 0.0 || !z.is_finite() {
                return Err(Error::Invalid(format!("cannot normalize '{source}': integral is {z}")));
            }
            tf.norm = z;
            tf.mollifier = true;
        }
        Ok(tf)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.support.0 || x > self.support.1 {
            return 0.0;
        }
        (self.raw)(x) / self.norm
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Normalization divisor (∫ of the raw function for mollifiers, 1 otherwise).
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_mollifier(&self) -> bool {
        self.mollifier
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `{"name": "mollifier", "center", "radius"}` or
    /// `{"name": "expr", "expr", "support": [lo, hi], "normalize"}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match v.get(k) {
                Some(x) => x.as_f64().ok_or_else(|| Error::Invalid(format!("'{k}' must be a number"))),
                None => default.ok_or_else(|| Error::Invalid(format!("missing '{k}'"))),
            }
        };
        match v.get("name").and_then(Value::as_str) {
            Some("mollifier") => Self::mollifier(num("center", Some(0.0))?, num("radius", Some(1.0))?),
            Some("expr") => {
                let src = v
                    .get("expr")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Invalid("missing 'expr'".into()))?;
                let (lo, hi): (f64, f64) = serde_json::from_value(
                    v.get("support").cloned().ok_or_else(|| Error::Invalid("missing 'support'".into()))?,
                )?;
                let normalize = v.get("normalize").and_then(Value::as_bool).unwrap_or(false);
                Self::from_expr(src, lo, hi, normalize)
            }
            other => Err(Error::Invalid(format!(
                "unknown test function {other:?} (expected mollifier or expr)"
            ))),
        }
    }
}

/// `ev_f(A) = ∫_A f dλ` for a one-dimensional `A`, integrating over each
/// canonical interval clipped to the support of `f`.
pub fn ev(f: &TestFunction, a: &RegionSet) -> Result<f64> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a.dim() });
    }
    let (s0, s1) = f.support;
    let pieces: Vec<(f64, f64)> = a
        .boxes()
        .iter()
        .map(|b| (b.side(0).lo().max(s0), b.side(0).hi().min(s1)))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    let tol = EV_TOLERANCE / pieces.len().max(1) as f64;
    let mut total = 0.0;
    for (lo, hi) in pieces {
        total += integrate_with_breaks(|x| f.eval(x), lo, hi, &f.breaks, tol)?.value;
    }
    Ok(total)
}
