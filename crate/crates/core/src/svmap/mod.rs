//! Set-valued maps `r ↦ P(r)` sampled over a parameter box, with selection
//! witnesses, discrete lower-semicontinuity checks, graph/relation views,
//! the union extension and the induced image map.

mod lsc;
mod relation;
mod select;
pub mod spec;

use std::fmt;
use std::sync::Arc;

pub use lsc::{lsc_check, LscReport, LscViolation, LscWitness, DEFAULT_PROBE_DEPTH};
pub use relation::{def_set, from_relation, graph, image_set, Relation};
pub use select::{select, weak_select, Selection, SelectionSample, Strategy};

use crate::error::{Error, Result};
use crate::setrep::{AxisBox, Interval, RegionSet, SampledSet};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SetFn = Arc<dyn Fn(&[f64]) -> RegionSet + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Parameter box `U ⊂ ℝ^m` with a sampling grid of pitch close to `h`.
///
/// Each axis is split into `round((hi − lo)/h)` equal steps so both bounds
/// are grid points; a degenerate axis (`lo == hi`) has a single node.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
    h: f64,
    steps: Vec<usize>,
}

impl ParamDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, h: f64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Invalid(format!("grid pitch must be positive, got {h}")));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::Invalid(format!("bad parameter bounds [{a}, {b}]")));
            }
        }
        let steps = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| if a < b { (((b - a) / h).round() as usize).max(1) } else { 0 })
            .collect();
        Ok(ParamDomain { lo, hi, h, steps })
    }

    /// One-dimensional domain `[lo, hi]` with `n` equal steps.
    pub fn interval(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("need at least one grid step".into()));
        }
        Self::new(vec![lo], vec![hi], (hi - lo) / n as f64)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    /// Actual spacing along `axis` (0 on a degenerate axis).
    pub fn axis_pitch(&self, axis: usize) -> f64 {
        match self.steps[axis] {
            0 => 0.0,
            n => (self.hi[axis] - self.lo[axis]) / n as f64,
        }
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.iter().map(|n| n + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        let n = self.steps[axis];
        if n == 0 || k == n {
            return if n == 0 { self.lo[axis] } else { self.hi[axis] };
        }
        self.lo[axis] + (self.hi[axis] - self.lo[axis]) * (k as f64) / (n as f64)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let w = self.steps[axis] + 1;
            idx[axis] = rest % w;
            rest /= w;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.steps)
            .fold(0, |acc, (&k, &n)| acc * (n + 1) + k)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &k)| self.coord(axis, k))
            .collect()
    }

    /// Grid nodes in row-major order.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Axis neighbours of a grid node.
    pub fn neighbors(&self, flat: usize) -> Vec<usize> {
        let idx = self.multi_index(flat);
        let mut out = Vec::with_capacity(2 * self.dim());
        for axis in 0..self.dim() {
            if idx[axis] > 0 {
                let mut j = idx.clone();
                j[axis] -= 1;
                out.push(self.flat_index(&j));
            }
            if idx[axis] < self.steps[axis] {
                let mut j = idx.clone();
                j[axis] += 1;
                out.push(self.flat_index(&j));
            }
        }
        out
    }

    /// Grid node closest to `r` (per-axis rounding).
    pub fn nearest_node(&self, r: &[f64]) -> usize {
        let idx: Vec<usize> = r
            .iter()
            .enumerate()
            .map(|(axis, &x)| {
                let n = self.steps[axis];
                if n == 0 {
                    return 0;
                }
                let s = (x - self.lo[axis]) / (self.hi[axis] - self.lo[axis]) * n as f64;
                s.round().clamp(0.0, n as f64) as usize
            })
            .collect();
        self.flat_index(&idx)
    }

    pub fn contains(&self, r: &[f64]) -> bool {
        r.len() == self.dim()
            && r
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Same box with pitch divided by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.lo.clone(), self.hi.clone(), self.h / factor.max(1) as f64)
    }
}

/// A parametrized family `r ↦ P(r)` of subsets of ℝ^d.
#[derive(Clone)]
pub struct SetPlot {
    domain: ParamDomain,
    dim: usize,
    eval: SetFn,
    interval: Option<(ScalarFn, ScalarFn)>,
    label: String,
}

impl fmt::Debug for SetPlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetPlot")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SetPlot {
    pub fn new(domain: ParamDomain, dim: usize, eval: SetFn) -> Self {
        SetPlot {
            domain,
            dim,
            eval,
            interval: None,
            label: "custom".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &ParamDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, r: &[f64]) -> RegionSet {
        let v = (self.eval)(r);
        debug_assert_eq!(v.dim(), self.dim);
        v
    }

    /// `(f, g)` when the plot was built by [`interval_map`].
    pub fn interval_parts(&self) -> Option<&(ScalarFn, ScalarFn)> {
        self.interval.as_ref()
    }

    /// Same evaluator over another parameter box.
    pub fn on_domain(&self, domain: ParamDomain) -> Self {
        SetPlot {
            domain,
            ..self.clone()
        }
    }

    /// `r ↦ {x₀}`-style plot with a fixed value.
    pub fn constant(domain: ParamDomain, value: RegionSet) -> Self {
        let dim = value.dim();
        SetPlot::new(domain, dim, Arc::new(move |_| value.clone())).with_label("constant")
    }

    /// `r ↦ A + profile(r)·v`.
    pub fn translate_family(
        domain: ParamDomain,
        base: RegionSet,
        direction: Vec<f64>,
        profile: ScalarFn,
    ) -> Result<Self> {
        if direction.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: direction.len(),
            });
        }
        let dim = base.dim();
        let eval: SetFn = Arc::new(move |r| {
            base.translate(&direction, profile(r))
                .expect("direction dimension checked at construction")
        });
        Ok(SetPlot::new(domain, dim, eval).with_label("translate_family"))
    }

    /// Finite union of point-valued graphs `r ↦ {s₁(r), …, s_k(r)}`.
    pub fn union_of_selections(domain: ParamDomain, dim: usize, maps: Vec<PointMap>) -> Self {
        let eval: SetFn = Arc::new(move |r| {
            let boxes = maps
                .iter()
                .map(|s| AxisBox::point(&s(r)).expect("selection values are finite"))
                .collect();
            RegionSet::from_boxes(boxes, dim).expect("selection dimension fixed")
        });
        SetPlot::new(domain, dim, eval).with_label("union_of_selections")
    }
}

/// `r ↦ [min{f(r), g(r)}, max{f(r), g(r)}]`.
pub fn interval_map(domain: ParamDomain, f: ScalarFn, g: ScalarFn) -> SetPlot {
    let (ef, eg) = (f.clone(), g.clone());
    let eval: SetFn = Arc::new(move |r| {
        let iv = Interval::hull(ef(r), eg(r)).expect("interval_map needs finite f and g");
        RegionSet::from_box(AxisBox::new(vec![iv]).expect("one axis"))
    });
    SetPlot {
        domain,
        dim: 1,
        eval,
        interval: Some((f, g)),
        label: "interval_map".into(),
    }
}

/// `⋃_{x ∈ A} φ(x)` over the pitch-`h` sample of `A`.
pub fn extend(phi: &SetPlot, a: &RegionSet, h: f64) -> Result<RegionSet> {
    if a.dim() != phi.domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.domain.dim(),
            found: a.dim(),
        });
    }
    if !a.is_bounded() {
        return Err(Error::Unbounded("extension over an unbounded set".into()));
    }
    if a.is_empty() {
        return Ok(RegionSet::empty(phi.dim));
    }
    let pts = a.sample(h)?;
    let boxes = pts
        .points()
        .iter()
        .flat_map(|x| phi.eval(x).boxes().to_vec())
        .collect();
    RegionSet::from_boxes(boxes, phi.dim)
}

/// Image `f(A)` of a sampled set.
pub fn pushforward(f: &PointMap, a: &SampledSet) -> Result<SampledSet> {
    SampledSet::new(a.points().iter().map(|p| f(p)).collect(), a.pitch())
}

/// Image of a bounded region through its pitch-`h` sample.
pub fn pushforward_region(f: &PointMap, a: &RegionSet, h: f64) -> Result<SampledSet> {
    if !a.is_bounded() {
        return Err(Error::Unbounded("image of an unbounded set".into()));
    }
    pushforward(f, &a.sample(h)?)
}

/// Plot `r ↦ f(φ(r))` with values sampled at pitch `h` and stored as points.
pub fn pushforward_plot(f: PointMap, phi: &SetPlot, target_dim: usize, h: f64) -> SetPlot {
    let inner = phi.clone();
    let eval: SetFn = Arc::new(move |r| {
        let value = inner.eval(r);
        if value.is_empty() {
            return RegionSet::empty(target_dim);
        }
        let img = pushforward_region(&f, &value, h).expect("plot values must be bounded");
        let boxes = img
            .points()
            .iter()
            .map(|p| AxisBox::point(p).expect("finite image"))
            .collect();
        RegionSet::from_boxes(boxes, target_dim).expect("image dimension")
    });
    SetPlot::new(phi.domain.clone(), target_dim, eval).with_label("pushforward")
}
