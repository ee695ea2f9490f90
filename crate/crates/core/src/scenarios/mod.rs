//! Named experiments with structured verdicts.
//!
//! Each scenario assembles inputs from the other modules, runs them, and
//! compares the results with a list of stated expectations. A verdict is a
//! pure function of its [`ScenarioConfig`], so its JSON is reproducible bit
//! for bit.

mod runs;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::svdiff::DiffSchedule;

pub use runs::{
    run_disk_dilation, run_gaussian_fomin, run_interval_selection, run_mollifier_union, run_multideriv_family,
    run_singleton_intersection, run_traveling_interval,
};

/// Where a target value comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Provenance {
    /// A claim stated in the source text, quoted.
    Quoted(String),
    /// An independent computation (closed form or oracle), described.
    Computed(String),
    /// Immediate from the definitions.
    Immediate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub expectation: String,
    pub provenance: Provenance,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub measured: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

/// A swept quantity, written as an XY file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn to_xy(&self) -> String {
        let mut out = format!("# {} {}\n", self.x, self.y);
        for (x, y) in &self.points {
            out.push_str(&format!("{x:?} {y:?}\n"));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.x, self.y);
        for (x, y) in &self.points {
            out.push_str(&format!("{x:?},{y:?}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub scenario: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub measured: Vec<Measurement>,
    /// Expectations of the failed checks, verbatim.
    pub violated: Vec<String>,
    pub narrative: String,
    pub config: ConfigEcho,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }

    pub fn measured(&self, name: &str) -> Option<f64> {
        self.measured.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn check(&self, expectation_prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.expectation.starts_with(expectation_prefix))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub grid: usize,
    pub schedule: String,
    pub seed: u64,
    pub instances: usize,
    pub sides: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    /// Points in each `t`-sweep; odd so that `t = 0` is a node.
    pub grid: usize,
    pub schedule: DiffSchedule,
    pub seed: u64,
    /// Random instances for the selection scenario.
    pub instances: usize,
    /// Vertices of the disk polygon.
    pub sides: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            grid: 81,
            schedule: DiffSchedule::default(),
            seed: 0x5e1f_5e75,
            instances: 100,
            sides: 256,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    grid: Option<usize>,
    schedule: Option<String>,
    cluster_tol: Option<f64>,
    convergence_tol: Option<f64>,
    seed: Option<u64>,
    instances: Option<usize>,
    sides: Option<usize>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 3 || self.grid.is_multiple_of(2) {
            return Err(Error::Invalid(format!("grid must be odd and at least 3, got {}", self.grid)));
        }
        if self.instances == 0 {
            return Err(Error::Invalid("instances must be positive".into()));
        }
        if self.sides < 3 {
            return Err(Error::Invalid(format!("sides must be at least 3, got {}", self.sides)));
        }
        self.schedule.validate()
    }

    /// Missing keys keep their defaults.
    pub fn from_json(v: &Value) -> Result<Self> {
        let doc: ConfigDoc = serde_json::from_value(v.clone())?;
        let mut c = ScenarioConfig::default();
        if let Some(g) = doc.grid {
            c.grid = g;
        }
        if let Some(s) = doc.schedule {
            c.schedule = s.parse()?;
        }
        if let Some(t) = doc.cluster_tol {
            c.schedule = c.schedule.with_cluster_tol(t)?;
        }
        if let Some(t) = doc.convergence_tol {
            c.schedule = c.schedule.with_convergence_tol(t)?;
        }
        if let Some(s) = doc.seed {
            c.seed = s;
        }
        if let Some(n) = doc.instances {
            c.instances = n;
        }
        if let Some(n) = doc.sides {
            c.sides = n;
        }
        c.validate()?;
        Ok(c)
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            grid: self.grid,
            schedule: self.schedule.to_string(),
            seed: self.seed,
            instances: self.instances,
            sides: self.sides,
        }
    }
}

/// `n` points `lo + (hi − lo)·k/(n − 1)`.
pub fn sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n).map(|k| lo + (hi - lo) * k as f64 / m).collect()
}

pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub run: fn(&ScenarioConfig) -> Result<Verdict>,
}

pub static CATALOG: [Scenario; 7] = [
    Scenario {
        name: "traveling-interval",
        summary: "c(t) ∩ c(−t) for the traveling interval c(t) = [t − 1, t + 1]",
        run: run_traveling_interval,
    },
    Scenario {
        name: "mollifier-union",
        summary: "one-sided derivatives of ev_f(P₁(t) ∪ P₂(t)) at 0",
        run: run_mollifier_union,
    },
    Scenario {
        name: "singleton-intersection",
        summary: "{t} ∩ {−t} jumps from {0} to ∅",
        run: run_singleton_intersection,
    },
    Scenario {
        name: "multideriv-family",
        summary: "adherence derivative of xy/|y| along (t, αt²)",
        run: run_multideriv_family,
    },
    Scenario {
        name: "disk-dilation",
        summary: "Eulerian derivatives of volume and perimeter of the unit disk under V(x) = x",
        run: run_disk_dilation,
    },
    Scenario {
        name: "gaussian-fomin",
        summary: "Fomin derivative of the standard Gaussian at [−1, 0]",
        run: run_gaussian_fomin,
    },
    Scenario {
        name: "interval-selection",
        summary: "anchored convex selections of random interval maps",
        run: run_interval_selection,
    },
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Result<&'static Scenario> {
    CATALOG.iter().find(|s| s.name == name).ok_or_else(|| {
        Error::Invalid(format!("unknown scenario '{name}'; valid names: {}", names().join(", ")))
    })
}

pub fn run(name: &str, cfg: &ScenarioConfig) -> Result<Verdict> {
    cfg.validate()?;
    (find(name)?.run)(cfg)
}

/// Every scenario, each on its own thread, in catalog order.
pub fn run_all(cfg: &ScenarioConfig) -> Result<Vec<Verdict>> {
    cfg.validate()?;
    std::thread::scope(|s| {
        let handles: Vec<_> = CATALOG.iter().map(|sc| s.spawn(move || (sc.run)(cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    })
}

/// `scenario,passed,checks,failed` rows.
pub fn summary_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("scenario,passed,checks,failed\n");
    for v in verdicts {
        out.push_str(&format!(
            "{},{},{},{}\n",
            v.scenario,
            v.passed,
            v.checks.len(),
            v.violated.len()
        ));
    }
    out
}

/// Collects checks while a scenario runs.
pub(crate) struct Recorder {
    name: &'static str,
    cfg: ConfigEcho,
    checks: Vec<Check>,
    measured: Vec<Measurement>,
    series: Vec<Series>,
}

impl Recorder {
    pub(crate) fn new(name: &'static str, cfg: &ScenarioConfig) -> Self {
        Recorder {
            name,
            cfg: cfg.echo(),
            checks: Vec::new(),
            measured: Vec::new(),
            series: Vec::new(),
        }
    }

    pub(crate) fn holds(&mut self, expectation: impl Into<String>, provenance: Provenance, passed: bool) {
        self.checks.push(Check {
            expectation: expectation.into(),
            provenance,
            target: None,
            tolerance: None,
            measured: None,
            passed,
        });
    }

    /// `|measured − target| ≤ tol`.
    pub(crate) fn near(&mut self, expectation: impl Into<String>, provenance: Provenance, measured: f64, target: f64, tol: f64) {
        self.checks.push(Check {
            expectation: expectation.into(),
            provenance,
            target: Some(target),
            tolerance: Some(tol),
            measured: Some(measured),
            passed: (measured - target).abs() <= tol,
        });
    }

    /// `measured ≥ bound`.
    pub(crate) fn at_least(&mut self, expectation: impl Into<String>, provenance: Provenance, measured: f64, bound: f64) {
        self.checks.push(Check {
            expectation: expectation.into(),
            provenance,
            target: Some(bound),
            tolerance: None,
            measured: Some(measured),
            passed: measured >= bound,
        });
    }

    pub(crate) fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measured.push(Measurement { name: name.into(), value });
    }

    pub(crate) fn series(&mut self, name: &str, x: &str, y: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series {
            name: name.into(),
            x: x.into(),
            y: y.into(),
            points,
        });
    }

    pub(crate) fn finish(self, narrative: String) -> Verdict {
        let violated: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.expectation.clone())
            .collect();
        let narrative = if violated.is_empty() {
            narrative
        } else {
            format!("{narrative} Violated: {}.", violated.join("; "))
        };
        Verdict {
            scenario: self.name.into(),
            passed: violated.is_empty(),
            checks: self.checks,
            measured: self.measured,
            violated,
            narrative,
            config: self.cfg,
            series: self.series,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_hits_zero_and_unit_points() {
        let g = sweep(-2.0, 2.0, 81);
        assert_eq!(g[40], 0.0);
        assert_eq!(g[20], -1.0);
        assert_eq!(g[60], 1.0);
        assert_eq!(g.iter().filter(|t| t.abs() <= 1.0).count(), 41);
    }

    #[test]
    fn unknown_name_lists_catalog() {
        let err = run("nope", &ScenarioConfig::default()).unwrap_err().to_string();
        for n in names() {
            assert!(err.contains(n), "{err}");
        }
    }

    #[test]
    fn config_overrides() {
        let c = ScenarioConfig::from_json(&serde_json::json!({"grid": 21, "schedule": "0.1:6", "seed": 3})).unwrap();
        assert_eq!(c.grid, 21);
        assert_eq!(c.seed, 3);
        assert_eq!(c.schedule.to_string(), "0.1:6");
        assert!(ScenarioConfig::from_json(&serde_json::json!({"grid": 20})).is_err());
        assert!(ScenarioConfig::from_json(&serde_json::json!({"gird": 21})).is_err());
    }

    #[test]
    fn failing_verdict_quotes_expectation() {
        let mut r = Recorder::new("t", &ScenarioConfig::default());
        r.near("x equals 1 within 0.1", Provenance::Immediate, 2.0, 1.0, 0.1);
        r.holds("always", Provenance::Immediate, true);
        let v = r.finish("ran.".into());
        assert!(!v.passed);
        assert_eq!(v.violated, vec!["x equals 1 within 0.1".to_string()]);
        assert!(v.narrative.contains("x equals 1 within 0.1"));
    }
}
