//! Derivatives along paths: one-sided difference quotients with Richardson
//! extrapolation, adherence sets of quotient sequences, Fomin directional
//! derivatives of measures, and translated set paths `t ↦ A + f(t)v`.

mod adherence;
mod fomin;
mod richardson;
pub mod spec;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub use adherence::{adherence_derivative, cluster, AdherenceReport, Cluster, PathAdherence};
pub use fomin::{fomin_derivative, FominReport};
pub use richardson::{richardson, Richardson};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::setrep::RegionSet;

/// Default relative tolerance for clustering and convergence.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-3;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-6;

/// How the step sizes `t_k → 0⁺` are generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepRule {
    /// `t = 1/n` for `n = n0..=n_max`.
    Harmonic { n0: usize, n_max: usize },
    /// `t = h·2^{−k}` for `k = 0..levels`.
    Geometric { h: f64, levels: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiffSchedule {
    pub rule: StepRule,
    /// Relative cluster radius `ε_cl` (scaled by `max(1, |value|)`).
    pub cluster_tol: f64,
    /// Relative bound on `|T_{n,n} − T_{n−1,n−1}|` below which the
    /// extrapolation counts as converged.
    pub convergence_tol: f64,
}

impl Default for DiffSchedule {
    fn default() -> Self {
        DiffSchedule {
            rule: StepRule::Harmonic { n0: 4, n_max: 64 },
            cluster_tol: DEFAULT_CLUSTER_TOL,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
        }
    }
}

impl fmt::Display for DiffSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            StepRule::Harmonic { n0, n_max } => write!(f, "{n0}:{n_max}"),
            StepRule::Geometric { h, levels } => write!(f, "{h:?}:{levels}"),
        }
    }
}

/// `"n0:N"` (both integers) for harmonic steps, `"h:levels"` with a
/// fractional `h` for geometric ones.
impl FromStr for DiffSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSchedule(format!("expected 'n0:N' or 'h:levels', got '{s}'"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = (a.trim(), b.trim());
        let rule = match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(n0), Ok(n_max)) => StepRule::Harmonic { n0, n_max },
            (Err(_), Ok(levels)) => StepRule::Geometric {
                h: a.parse().map_err(|_| bad())?,
                levels,
            },
            _ => return Err(bad()),
        };
        DiffSchedule::new(rule)
    }
}

impl DiffSchedule {
    pub fn new(rule: StepRule) -> Result<Self> {
        let s = DiffSchedule {
            rule,
            ..Default::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn harmonic(n0: usize, n_max: usize) -> Result<Self> {
        Self::new(StepRule::Harmonic { n0, n_max })
    }

    pub fn geometric(h: f64, levels: usize) -> Result<Self> {
        Self::new(StepRule::Geometric { h, levels })
    }

    pub fn with_cluster_tol(mut self, tol: f64) -> Result<Self> {
        self.cluster_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_convergence_tol(mut self, tol: f64) -> Result<Self> {
        self.convergence_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            StepRule::Harmonic { n0, n_max } => {
                if n0 == 0 || n_max < 2 * n0 {
                    return Err(Error::InvalidSchedule(format!(
                        "harmonic schedule needs 1 ≤ n0 and N ≥ 2·n0, got {n0}:{n_max}"
                    )));
                }
            }
            StepRule::Geometric { h, levels } => {
                if !(h > 0.0) || !h.is_finite() || levels < 2 {
                    return Err(Error::InvalidSchedule(format!(
                        "geometric schedule needs h > 0 and at least 2 levels, got {h}:{levels}"
                    )));
                }
            }
        }
        if !(self.cluster_tol > 0.0) || !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidSchedule("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// All steps, decreasing.
    pub fn steps(&self) -> Vec<f64> {
        match self.rule {
            StepRule::Harmonic { n0, n_max } => (n0..=n_max).map(|n| 1.0 / n as f64).collect(),
            StepRule::Geometric { h, levels } => (0..levels).map(|k| h / 2f64.powi(k as i32)).collect(),
        }
    }

    /// Steps fed to the extrapolation: the doubling subsequence
    /// `n0, 2n0, 4n0, … ≤ N` for harmonic schedules, all steps otherwise.
    pub fn extrapolation_steps(&self) -> Vec<f64> {
        match self.rule {
            StepRule::Harmonic { n0, n_max } => std::iter::successors(Some(n0), |n| Some(n * 2))
                .take_while(|&n| n <= n_max)
                .map(|n| 1.0 / n as f64)
                .collect(),
            StepRule::Geometric { .. } => self.steps(),
        }
    }

    pub fn t_max(&self) -> f64 {
        self.steps()[0]
    }

    fn scaled(&self, tol: f64, value: f64) -> f64 {
        tol * value.abs().max(1.0)
    }
}

/// Which limit a difference quotient approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `(g(t) − g(0))/t`, `t → 0⁺`.
    Right,
    /// `(g(−t) − g(0))/(−t)`, `t → 0⁺`.
    Left,
    /// `(g(t) − g(−t))/(2t)`.
    Central,
}

/// Extrapolated difference quotient with its raw data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffReport {
    pub side: Side,
    pub estimate: f64,
    pub error_estimate: f64,
    /// `estimate − last raw quotient`.
    pub correction: f64,
    pub converged: bool,
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    pub table: Vec<Vec<f64>>,
    pub flags: Vec<String>,
}

impl DiffReport {
    /// `t,quotient` rows.
    pub fn quotients_csv(&self) -> String {
        let mut out = String::from("t,quotient\n");
        for (t, q) in self.steps.iter().zip(&self.quotients) {
            out.push_str(&format!("{t:?},{q:?}\n"));
        }
        out
    }
}

fn eval_at<G: Fn(f64) -> Result<f64>>(g: &G, t: f64) -> Result<f64> {
    match g(t) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::UndefinedAlongPath { t }),
        Err(e) => Err(e),
    }
}

/// Difference quotients of a scalar function of `t` at `0` on the
/// extrapolation steps of `sched`, extrapolated in `t` (one-sided) or `t²`
/// (central).
pub fn scalar_diff<G: Fn(f64) -> Result<f64>>(g: G, side: Side, sched: &DiffSchedule) -> Result<DiffReport> {
    sched.validate()?;
    let g0 = eval_at(&g, 0.0)?;
    let steps = sched.extrapolation_steps();
    let mut quotients = Vec::with_capacity(steps.len());
    for &t in &steps {
        let q = match side {
            Side::Right => (eval_at(&g, t)? - g0) / t,
            Side::Left => (eval_at(&g, -t)? - g0) / -t,
            Side::Central => (eval_at(&g, t)? - eval_at(&g, -t)?) / (2.0 * t),
        };
        quotients.push(q);
    }
    let p = if side == Side::Central { 2 } else { 1 };
    let r = richardson(&quotients, &steps, p)?;
    let converged = r.error <= sched.scaled(sched.convergence_tol, r.estimate);
    let mut flags = Vec::new();
    if !converged {
        flags.push("non_convergent".to_string());
    }
    Ok(DiffReport {
        side,
        estimate: r.estimate,
        error_estimate: r.error,
        correction: r.estimate - quotients[quotients.len() - 1],
        converged,
        steps,
        quotients,
        table: r.table,
        flags,
    })
}

/// `t ↦ c(t)` with a declared basepoint `c(0)`.
#[derive(Clone)]
pub struct Path<T> {
    eval: Arc<dyn Fn(f64) -> T + Send + Sync>,
    base: T,
    label: String,
}

impl<T: fmt::Debug> fmt::Debug for Path<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Path")
            .field("label", &self.label)
            .field("base", &self.base)
            .finish()
    }
}

impl<T: Clone + PartialEq> Path<T> {
    /// Basepoint taken as `c(0)`.
    pub fn new(label: impl Into<String>, eval: Arc<dyn Fn(f64) -> T + Send + Sync>) -> Self {
        let base = eval(0.0);
        Path {
            eval,
            base,
            label: label.into(),
        }
    }

    /// Fails unless `c(0)` equals the declared basepoint.
    pub fn with_base(label: impl Into<String>, base: T, eval: Arc<dyn Fn(f64) -> T + Send + Sync>) -> Result<Self> {
        let label = label.into();
        if eval(0.0) != base {
            return Err(Error::Invalid(format!("path '{label}' does not start at its basepoint")));
        }
        Ok(Path { eval, base, label })
    }

    pub fn at(&self, t: f64) -> T {
        if t == 0.0 {
            return self.base.clone();
        }
        (self.eval)(t)
    }

    pub fn base(&self) -> &T {
        &self.base
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `c ∘ ρ` for a reparametrization with `ρ(0) = 0`.
    pub fn reparametrized(&self, rho: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Self
    where
        T: Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Path {
            eval: Arc::new(move |t| inner(rho(t))),
            base: self.base.clone(),
            label: format!("{}∘ρ", self.label),
        }
    }
}

impl Path<Vec<f64>> {
    /// Componentwise catalog expressions in `t`.
    pub fn from_exprs(label: impl Into<String>, components: &[&str]) -> Result<Self> {
        let exprs = components
            .iter()
            .map(|s| Expr::parse(s, &["t"]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Path::new(label, Arc::new(move |t| exprs.iter().map(|e| e.eval1(t)).collect())))
    }
}

/// Paths declared to share a germ at `0`.
#[derive(Clone, Debug)]
pub struct PathFamily<T> {
    pub label: String,
    paths: Vec<Path<T>>,
}

impl<T: Clone + PartialEq + fmt::Debug> PathFamily<T> {
    pub fn new(label: impl Into<String>, paths: Vec<Path<T>>) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::Empty("path family has no paths".into()))?;
        if let Some(p) = paths.iter().find(|p| p.base != first.base) {
            return Err(Error::Invalid(format!(
                "path '{}' starts at {:?}, not {:?}",
                p.label, p.base, first.base
            )));
        }
        Ok(PathFamily {
            label: label.into(),
            paths,
        })
    }

    pub fn paths(&self) -> &[Path<T>] {
        &self.paths
    }
}

/// `D_{x,c}Φ = lim_{t→0⁺} (Φ(c(t)) − Φ(x))/t`.
pub fn path_diff<T, F>(phi: F, c: &Path<T>, sched: &DiffSchedule) -> Result<DiffReport>
where
    T: Clone + PartialEq,
    F: Fn(&T) -> Result<f64>,
{
    scalar_diff(|t| phi(&c.at(t)), Side::Right, sched)
}

/// `t ↦ A + f(t)·v`.
#[derive(Clone)]
pub struct DirectionalSetPath {
    base: RegionSet,
    direction: Vec<f64>,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl fmt::Debug for DirectionalSetPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectionalSetPath")
            .field("label", &self.label)
            .field("direction", &self.direction)
            .finish()
    }
}

pub fn directional_path(
    base: RegionSet,
    direction: Vec<f64>,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
) -> Result<DirectionalSetPath> {
    if direction.len() != base.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            found: direction.len(),
        });
    }
    Ok(DirectionalSetPath {
        base,
        direction,
        profile,
        label: "A + f(t)v".into(),
    })
}

impl DirectionalSetPath {
    pub fn from_expr(base: RegionSet, direction: Vec<f64>, profile: &str) -> Result<Self> {
        let e = Expr::parse(profile, &["t"])?;
        let mut p = directional_path(base, direction, Arc::new(move |t| e.eval1(t)))?;
        p.label = format!("A + ({profile})v");
        Ok(p)
    }

    pub fn at(&self, t: f64) -> RegionSet {
        self.base
            .translate(&self.direction, (self.profile)(t))
            .expect("direction dimension checked at construction")
    }

    pub fn base(&self) -> &RegionSet {
        &self.base
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// Same set and direction with profile `f ∘ g`.
    pub fn compose(&self, g: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Self {
        let f = self.profile.clone();
        DirectionalSetPath {
            base: self.base.clone(),
            direction: self.direction.clone(),
            profile: Arc::new(move |s| f(g(s))),
            label: format!("{}∘g", self.label),
        }
    }

    pub fn as_path(&self) -> Path<RegionSet> {
        let me = self.clone();
        Path::new(self.label.clone(), Arc::new(move |t| me.at(t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_multi(p: &Vec<f64>) -> Result<f64> {
        let (x, y) = (p[0], p[1]);
        Ok(if y == 0.0 { 0.0 } else { x * (y / y.abs()) })
    }

    #[test]
    fn schedule_parsing() {
        let s: DiffSchedule = "4:64".parse().unwrap();
        assert_eq!(s, DiffSchedule::default());
        assert_eq!(s.steps().len(), 61);
        assert_eq!(s.extrapolation_steps(), vec![0.25, 0.125, 0.0625, 0.03125, 0.015625]);
        let g: DiffSchedule = "0.1:5".parse().unwrap();
        assert_eq!(g.rule, StepRule::Geometric { h: 0.1, levels: 5 });
        assert_eq!(g.to_string(), "0.1:5");
        assert!("8:4".parse::<DiffSchedule>().is_err());
        assert!("0.1:1".parse::<DiffSchedule>().is_err());
        assert!("abc".parse::<DiffSchedule>().is_err());
        assert!(DiffSchedule::default().with_cluster_tol(0.0).is_err());
    }

    #[test]
    fn multideriv_branch() {
        let c = Path::from_exprs("c", &["t", "t^2"]).unwrap();
        let r = path_diff(phi_multi, &c, &DiffSchedule::default()).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.correction, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn constant_functional() {
        let c = Path::from_exprs("c", &["sin(t)"]).unwrap();
        let r = path_diff(|_: &Vec<f64>| Ok(7.0), &c, &DiffSchedule::default()).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn volume_of_growing_interval() {
        let c: Path<RegionSet> = Path::new(
            "[0, 1+t]",
            Arc::new(|t| RegionSet::intervals(&[(0.0, 1.0 + t)]).unwrap()),
        );
        let r = path_diff(|a: &RegionSet| a.volume(), &c, &DiffSchedule::default()).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reparametrization_invariance() {
        let c = Path::from_exprs("c", &["t", "exp(t)"]).unwrap();
        let phi = |p: &Vec<f64>| Ok(p[0].sin() + p[1] * p[1]);
        let sched = DiffSchedule::default();
        let a = path_diff(phi, &c, &sched).unwrap();
        let b = path_diff(phi, &c.reparametrized(Arc::new(|t| t + t * t * t)), &sched).unwrap();
        assert!((a.estimate - 3.0).abs() < 1e-6);
        assert!((a.estimate - b.estimate).abs() <= (a.error_estimate + b.error_estimate).max(1e-9));
    }

    #[test]
    fn undefined_functional_is_an_error() {
        let c = Path::from_exprs("c", &["t"]).unwrap();
        let r = path_diff(|p: &Vec<f64>| Ok((p[0] - 0.1).ln()), &c, &DiffSchedule::default());
        assert!(matches!(r, Err(Error::UndefinedAlongPath { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        // quotient sin(1/t): oscillates without a limit
        let g = |t: f64| Ok(if t == 0.0 { 0.0 } else { t * (1.0 / t).sin() });
        let r = scalar_diff(g, Side::Right, &DiffSchedule::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.flags, vec!["non_convergent".to_string()]);
    }

    #[test]
    fn directional_path_examples() {
        let a = RegionSet::intervals(&[(0.0, 1.0)]).unwrap();
        let id = DirectionalSetPath::from_expr(a.clone(), vec![1.0], "t").unwrap();
        assert_eq!(id.at(0.5), a.translate(&[1.0], 0.5).unwrap());
        let s = DirectionalSetPath::from_expr(a.clone(), vec![2.0], "sin(t)").unwrap();
        let at_pi = s.at(std::f64::consts::PI);
        // sin(π) is 1.2e-16 in floating point, so the shift is tiny but nonzero
        assert!(at_pi.boxes()[0].side(0).lo().abs() < 1e-15);
        let zero = DirectionalSetPath::from_expr(a.clone(), vec![2.0], "sin(t) - sin(t)").unwrap();
        assert_eq!(zero.at(std::f64::consts::PI), a);
    }

    #[test]
    fn directional_composition_law() {
        let a = RegionSet::from_boxes(
            vec![crate::AxisBox::closed(&[(0.0, 1.0), (0.0, 0.5)]).unwrap()],
            2,
        )
        .unwrap();
        let f = DirectionalSetPath::from_expr(a.clone(), vec![1.0, -0.5], "t^2").unwrap();
        let g: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(|s: f64| s.cos());
        let fg = f.compose(g.clone());
        for k in 0..20 {
            let s = -1.0 + 0.1 * k as f64;
            assert_eq!(f.at(g(s)), fg.at(s));
        }
    }

    #[test]
    fn family_requires_common_base() {
        let a = Path::from_exprs("a", &["t"]).unwrap();
        let b = Path::from_exprs("b", &["t + 1"]).unwrap();
        assert!(PathFamily::new("bad", vec![a.clone(), b]).is_err());
        assert!(PathFamily::<Vec<f64>>::new("empty", vec![]).is_err());
        assert!(PathFamily::new("ok", vec![a]).is_ok());
    }
}
