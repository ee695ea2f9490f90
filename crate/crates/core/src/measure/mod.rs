//! Product measures with per-axis densities, evaluated exactly on
//! [`RegionSet`]s, and integration of compactly supported test functions.

mod quadrature;
mod testfn;

pub use quadrature::{integrate, integrate_with_breaks, Quadrature};
pub use testfn::{ev, TestFunction, EV_TOLERANCE};

use serde::Deserialize;
use serde_json::Value;
use libm::erfc;

use crate::error::{Error, Result};
use crate::setrep::{Interval, RegionSet};

/// One-dimensional factor of a product measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Gaussian { mean: f64, sd: f64 },
    /// Probability measure with constant density on `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// Length restricted to `[lo, hi]`; either end may be infinite.
    Lebesgue { lo: f64, hi: f64 },
}

/// `Φ(x) = ½ erfc(−x/√2)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Φ(b) − Φ(a)`, taken from the upper tail when both ends are positive so
/// that small masses keep their relative accuracy.
fn std_normal_mass(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        std_normal_cdf(-a) - std_normal_cdf(-b)
    } else {
        std_normal_cdf(b) - std_normal_cdf(a)
    }
}

impl Density {
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !sd.is_finite() || !mean.is_finite() {
            return Err(Error::Invalid(format!("gaussian needs finite mean and sd > 0, got ({mean}, {sd})")));
        }
        Ok(Density::Gaussian { mean, sd })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid(format!("uniform needs finite a < b, got [{a}, {b}]")));
        }
        Ok(Density::Uniform { a, b })
    }

    pub fn lebesgue(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Invalid(format!("lebesgue support needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Density::Lebesgue { lo, hi })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Density::Gaussian { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Density::Uniform { a, b } => {
                if a <= x && x <= b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Density::Lebesgue { lo, hi } => {
                if lo <= x && x <= hi {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `μ((−∞, x])`; infinite for Lebesgue with an unbounded lower end.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Density::Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
            Density::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Density::Lebesgue { lo, hi } => {
                if x <= lo {
                    0.0
                } else {
                    x.min(hi) - lo
                }
            }
        }
    }

    /// Mass of an interval. Endpoint flags do not matter for these densities.
    pub fn mass(&self, iv: &Interval) -> f64 {
        let (a, b) = (iv.lo(), iv.hi());
        match *self {
            Density::Gaussian { mean, sd } => std_normal_mass((a - mean) / sd, (b - mean) / sd),
            Density::Uniform { a: u, b: w } => {
                let (lo, hi) = (a.max(u), b.min(w));
                if lo >= hi {
                    0.0
                } else {
                    (hi - lo) / (w - u)
                }
            }
            Density::Lebesgue { lo, hi } => {
                let (p, q) = (a.max(lo), b.min(hi));
                if p >= q {
                    0.0
                } else {
                    q - p
                }
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass(&Interval::full())
    }
}

/// Product measure `μ = μ₁ ⊗ … ⊗ μ_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureModel {
    axes: Vec<Density>,
}

impl MeasureModel {
    pub fn new(axes: Vec<Density>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Invalid("measure needs at least one axis".into()));
        }
        Ok(MeasureModel { axes })
    }

    pub fn gaussian(dim: usize) -> Self {
        MeasureModel {
            axes: vec![Density::Gaussian { mean: 0.0, sd: 1.0 }; dim.max(1)],
        }
    }

    pub fn lebesgue(dim: usize) -> Self {
        MeasureModel {
            axes: vec![
                Density::Lebesgue {
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY
                };
                dim.max(1)
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Density] {
        &self.axes
    }

    /// `μ(A)` as a sum of products of per-axis masses over the canonical
    /// (pairwise disjoint) boxes of `A`.
    pub fn mu(&self, a: &RegionSet) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        let mut total = 0.0;
        for b in a.boxes() {
            let masses: Vec<f64> = self.axes.iter().zip(b.sides()).map(|(d, s)| d.mass(s)).collect();
            if masses.contains(&0.0) {
                continue;
            }
            if masses.iter().any(|m| m.is_infinite()) {
                return Err(Error::Unbounded(format!("set {b} has infinite measure")));
            }
            total += masses.iter().product::<f64>();
        }
        Ok(total)
    }

    /// `B ↦ μ(B ∩ A)`, defined when `0 < μ(A) < ∞`.
    pub fn restricted(&self, a: &RegionSet) -> Result<RestrictedMeasure> {
        let mass = match self.mu(a) {
            Ok(m) => m,
            Err(Error::Unbounded(_)) => return Err(Error::DegenerateMeasure(f64::INFINITY)),
            Err(e) => return Err(e),
        };
        if mass == 0.0 {
            return Err(Error::DegenerateMeasure(0.0));
        }
        Ok(RestrictedMeasure {
            model: self.clone(),
            base: a.clone(),
            mass,
        })
    }
}

/// `μ_A = μ(· ∩ A)`.
#[derive(Clone, Debug)]
pub struct RestrictedMeasure {
    model: MeasureModel,
    base: RegionSet,
    mass: f64,
}

impl RestrictedMeasure {
    pub fn base(&self) -> &RegionSet {
        &self.base
    }

    /// `μ(A)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn eval(&self, b: &RegionSet) -> Result<f64> {
        self.model.mu(&b.intersect(&self.base)?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Param {
    Scalar(f64),
    Vector(Vec<f64>),
}

fn broadcast(p: Option<Param>, default: f64, dim: usize, name: &str) -> Result<Vec<f64>> {
    match p {
        None => Ok(vec![default; dim]),
        Some(Param::Scalar(x)) => Ok(vec![x; dim]),
        Some(Param::Vector(v)) if v.len() == dim => Ok(v),
        Some(Param::Vector(v)) => Err(Error::Invalid(format!(
            "measure parameter '{name}' has {} entries for dimension {dim}",
            v.len()
        ))),
    }
}

#[derive(Deserialize)]
struct MeasureDoc {
    measure: String,
    #[serde(default)]
    params: Value,
}

fn json_bound(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Invalid("bad number".into())),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        other => Err(Error::Invalid(format!("expected a bound, got {other}"))),
    }
}

fn take(params: &Value, key: &str, dim: usize, default: f64) -> Result<Vec<f64>> {
    let p = match params.get(key) {
        None => None,
        Some(Value::Array(xs)) => Some(Param::Vector(xs.iter().map(json_bound).collect::<Result<_>>()?)),
        Some(x) => Some(Param::Scalar(json_bound(x)?)),
    };
    broadcast(p, default, dim, key)
}

/// `{"measure": "gaussian"|"lebesgue"|"uniform", "params": {...}}`.
///
/// Parameters: `dim` (default 1); gaussian `mean`, `sd`; uniform `a`, `b`;
/// lebesgue `lo`, `hi` (default unbounded). Each may be a scalar applied to
/// every axis or a per-axis array.
pub fn measure_from_json(v: &Value) -> Result<MeasureModel> {
    let doc: MeasureDoc = serde_json::from_value(v.clone())?;
    let p = &doc.params;
    let dim = match p.get("dim") {
        None => {
            // infer from the first array parameter
            ["mean", "sd", "a", "b", "lo", "hi"]
                .iter()
                .find_map(|k| p.get(*k).and_then(Value::as_array).map(Vec::len))
                .unwrap_or(1)
        }
        Some(d) => d
            .as_u64()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Invalid("measure 'dim' must be a positive integer".into()))?
            as usize,
    };
    let axes = match doc.measure.as_str() {
        "gaussian" => {
            let (m, s) = (take(p, "mean", dim, 0.0)?, take(p, "sd", dim, 1.0)?);
            m.into_iter().zip(s).map(|(m, s)| Density::gaussian(m, s)).collect::<Result<_>>()?
        }
        "uniform" => {
            let (a, b) = (take(p, "a", dim, 0.0)?, take(p, "b", dim, 1.0)?);
            a.into_iter().zip(b).map(|(a, b)| Density::uniform(a, b)).collect::<Result<_>>()?
        }
        "lebesgue" => {
            let lo = take(p, "lo", dim, f64::NEG_INFINITY)?;
            let hi = take(p, "hi", dim, f64::INFINITY)?;
            lo.into_iter().zip(hi).map(|(a, b)| Density::lebesgue(a, b)).collect::<Result<_>>()?
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown measure '{other}' (expected gaussian, lebesgue, uniform)"
            )))
        }
    };
    MeasureModel::new(axes)
}
