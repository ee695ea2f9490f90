use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Vector field `V: ℝ^d → ℝ^d`.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    eval: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    label: String,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl VectorField {
    pub fn new(dim: usize, label: impl Into<String>, eval: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>) -> Self {
        VectorField {
            dim,
            eval,
            label: label.into(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::new(dim, "0", Arc::new(move |_| vec![0.0; dim]))
    }

    /// `V(x) = x`.
    pub fn radial(dim: usize) -> Self {
        VectorField::new(dim, "x", Arc::new(|x| x.to_vec()))
    }

    /// `V(x, y) = (−y, x)`.
    pub fn rotation() -> Self {
        VectorField::new(2, "(-y, x)", Arc::new(|x| vec![-x[1], x[0]]))
    }

    /// `V(x) = Mx + b` with `M` row-major.
    pub fn affine(m: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let d = b.len();
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: m.len() });
        }
        let label = format!("{m:?}x + {b:?}");
        Ok(VectorField::new(
            d,
            label,
            Arc::new(move |x| (0..d).map(|i| b[i] + (0..d).map(|j| m[i][j] * x[j]).sum::<f64>()).collect()),
        ))
    }

    /// Componentwise expressions in `x, y, z` (or `x1 … xd`).
    pub fn from_exprs(components: &[&str]) -> Result<Self> {
        let d = components.len();
        if d == 0 {
            return Err(Error::Invalid("vector field needs at least one component".into()));
        }
        let aliases = ["x", "y", "z"];
        let mut names: Vec<String> = aliases.iter().take(d).map(|s| s.to_string()).collect();
        let k = names.len();
        names.extend((1..=d).map(|i| format!("x{i}")));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let exprs = components
            .iter()
            .map(|c| Expr::parse(c, &refs))
            .collect::<Result<Vec<_>>>()?;
        let label = format!("({})", components.join(", "));
        Ok(VectorField::new(
            d,
            label,
            Arc::new(move |x| {
                let mut args = Vec::with_capacity(k + d);
                args.extend_from_slice(&x[..k]);
                args.extend_from_slice(x);
                exprs.iter().map(|e| e.eval(&args)).collect()
            }),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// `aV + bW`.
    pub fn combine(&self, a: f64, other: &VectorField, b: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (v, w) = (self.eval.clone(), other.eval.clone());
        let label = format!("{a}·{} + {b}·{}", self.label, other.label);
        Ok(VectorField::new(
            self.dim,
            label,
            Arc::new(move |x| v(x).iter().zip(w(x)).map(|(p, q)| a * p + b * q).collect()),
        ))
    }

    /// Largest difference ratio `|V(p) − V(q)|/|p − q|` over pairs of
    /// neighbouring nodes (axis and diagonal) of an `n`-per-axis grid on the
    /// box `[lo, hi]`.
    pub fn lipschitz_estimate(&self, lo: &[f64], hi: &[f64], n: usize) -> f64 {
        let d = self.dim;
        let n = n.max(2);
        let total = n.pow(d as u32);
        let node = |flat: usize| -> Vec<f64> {
            let mut rest = flat;
            (0..d)
                .map(|k| {
                    let i = rest % n;
                    rest /= n;
                    lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64
                })
                .collect()
        };
        let offsets: Vec<Vec<i64>> = (1..3usize.pow(d as u32))
            .map(|mut c| {
                (0..d)
                    .map(|_| {
                        let o = (c % 3) as i64 - 1;
                        c /= 3;
                        o
                    })
                    .collect()
            })
            .filter(|o: &Vec<i64>| o.iter().find(|&&x| x != 0) == Some(&1))
            .collect();
        let mut lip: f64 = 0.0;
        for flat in 0..total {
            let idx: Vec<i64> = {
                let mut rest = flat;
                (0..d)
                    .map(|_| {
                        let i = (rest % n) as i64;
                        rest /= n;
                        i
                    })
                    .collect()
            };
            let p = node(flat);
            let vp = self.eval(&p);
            for o in &offsets {
                let j: Vec<i64> = idx.iter().zip(o).map(|(a, b)| a + b).collect();
                if j.iter().any(|&x| x < 0 || x >= n as i64) {
                    continue;
                }
                let qflat = j.iter().rev().fold(0usize, |acc, &x| acc * n + x as usize);
                let q = node(qflat);
                let vq = self.eval(&q);
                let num = vp.iter().zip(&vq).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let den = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                if den > 0.0 {
                    lip = lip.max(num / den);
                }
            }
        }
        lip
    }
}

/// `F_t(x) = x + tV(x)`.
#[derive(Clone, Debug)]
pub struct FlowMap {
    pub field: VectorField,
    pub t: f64,
    pub lipschitz: f64,
    /// Set when `|t|·Lip(V) ≥ 1`, where injectivity is no longer implied.
    pub warning: bool,
}

impl FlowMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        if self.t == 0.0 {
            return x.to_vec();
        }
        let v = self.field.eval(x);
        x.iter().zip(v).map(|(a, b)| a + self.t * b).collect()
    }
}

pub fn flow_map(field: &VectorField, t: f64, lipschitz: f64) -> FlowMap {
    FlowMap {
        field: field.clone(),
        t,
        lipschitz,
        warning: t.abs() * lipschitz >= 1.0,
    }
}
