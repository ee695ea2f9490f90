use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use setcalc::svdiff::DiffSchedule;

use crate::output::{Format, Sink};
use crate::Common;

const KNOWN_KEYS: &[&str] = &[
    "out",
    "grid",
    "tol",
    "schedule",
    "format",
    "seed",
    "instances",
    "sides",
    "cluster_tol",
    "convergence_tol",
    "polygon",
    "field",
    "functional",
    "max_edge",
    "two_sided",
    "measure",
    "set",
    "direction",
    "plot",
    "r0",
    "x0",
    "strategy",
    "opens",
    "depth",
    "problem",
    "family",
    "scenario",
];

/// Flags merged over the optional config file; flags win.
pub struct Config {
    pub common: Common,
    doc: Map<String, Value>,
    base: PathBuf,
}

/// Reads a JSON file, reporting syntax errors as `path:line:column`.
pub fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

impl Config {
    pub fn load(common: &Common) -> Result<Self, String> {
        let (doc, base) = match &common.config {
            None => (Map::new(), PathBuf::from(".")),
            Some(p) => {
                let v = read_json(p)?;
                let Value::Object(m) = v else {
                    return Err(format!("{}: config must be a JSON object", p.display()));
                };
                if let Some(k) = m.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
                    return Err(format!("{}: unknown config key '{k}'", p.display()));
                }
                let base = p.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
                (m, base)
            }
        };
        let mut cfg = Config {
            common: common.clone(),
            doc,
            base,
        };
        cfg.common.out = cfg.common.out.clone().or(cfg.path_key("out")?);
        cfg.common.grid = match cfg.common.grid {
            Some(g) => Some(g),
            None => cfg.usize_key("grid")?,
        };
        cfg.common.tol = match cfg.common.tol {
            Some(t) => Some(t),
            None => cfg.f64_key("tol")?,
        };
        cfg.common.schedule = cfg.common.schedule.clone().or(cfg.str_key("schedule")?);
        if cfg.common.format.is_none() {
            cfg.common.format = match cfg.str_key("format")?.as_deref() {
                None => None,
                Some("json") => Some(Format::Json),
                Some("csv") => Some(Format::Csv),
                Some("both") => Some(Format::Both),
                Some(other) => return Err(format!("format must be json, csv or both, got '{other}'")),
            };
        }
        if let Some(g) = cfg.common.grid {
            if g < 2 {
                return Err(format!("--grid must be at least 2, got {g}"));
            }
        }
        if let Some(t) = cfg.common.tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(format!("--tol must be positive and finite, got {t}"));
            }
        }
        Ok(cfg)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.doc.get(key)
    }

    pub fn str_key(&self, key: &str) -> Result<Option<String>, String> {
        match self.doc.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(format!("config key '{key}' must be a string, got {other}")),
        }
    }

    pub fn f64_key(&self, key: &str) -> Result<Option<f64>, String> {
        match self.doc.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| format!("config key '{key}' must be a number, got {v}")),
        }
    }

    pub fn usize_key(&self, key: &str) -> Result<Option<usize>, String> {
        match self.doc.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| format!("config key '{key}' must be a nonnegative integer, got {v}")),
        }
    }

    pub fn bool_key(&self, key: &str) -> Result<Option<bool>, String> {
        match self.doc.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| format!("config key '{key}' must be a boolean, got {v}")),
        }
    }

    /// A path from the config, resolved against the config file's directory.
    pub fn path_key(&self, key: &str) -> Result<Option<PathBuf>, String> {
        Ok(self.str_key(key)?.map(|s| {
            let p = PathBuf::from(s);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        }))
    }

    pub fn required_path(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf, String> {
        match flag {
            Some(p) => Ok(p),
            None => self
                .path_key(key)?
                .ok_or_else(|| format!("missing --{} (or config key '{key}')", key.replace('_', "-"))),
        }
    }

    pub fn schedule(&self) -> Result<DiffSchedule, String> {
        let mut s = match &self.common.schedule {
            Some(text) => text.parse::<DiffSchedule>().map_err(|e| format!("--schedule: {e}"))?,
            None => DiffSchedule::default(),
        };
        if let Some(t) = self.f64_key("cluster_tol")? {
            s = s.with_cluster_tol(t).map_err(|e| e.to_string())?;
        }
        if let Some(t) = self.f64_key("convergence_tol")? {
            s = s.with_convergence_tol(t).map_err(|e| e.to_string())?;
        }
        if let Some(t) = self.common.tol {
            s = s
                .with_cluster_tol(t)
                .and_then(|s| s.with_convergence_tol(t))
                .map_err(|e| format!("--tol: {e}"))?;
        }
        Ok(s)
    }

    pub fn sink(&self) -> Result<Sink, String> {
        let dir = self.common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        Sink::new(dir, self.common.format.unwrap_or_default())
    }
}
