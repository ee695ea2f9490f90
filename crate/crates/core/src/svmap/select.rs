use std::collections::VecDeque;

use serde::Serialize;

use super::SetPlot;
use crate::error::{Error, Result};
use crate::setrep::{AxisBox, RegionSet};

/// How a selection is continued away from its anchor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `σ = t₀ f + (1 − t₀) g` on plots built by `interval_map`.
    Convex,
    /// Nearest point of `P(r)` to the value at the neighbouring node.
    ProjectionTracking,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Strategy::Convex),
            "tracking" | "projection-tracking" => Ok(Strategy::ProjectionTracking),
            other => Err(Error::Invalid(format!(
                "unknown strategy '{other}' (expected convex or tracking)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionSample {
    pub r: Vec<f64>,
    pub x: Vec<f64>,
    /// `dist(σ(r), P(r))`.
    pub residual: f64,
}

/// A sampled single-valued map `σ` with `σ(r) ∈ P(r)` on a neighbourhood
/// of the anchor parameter.
#[derive(Clone, Debug, Serialize)]
pub struct Selection {
    pub strategy: Option<Strategy>,
    pub anchor: Option<(Vec<f64>, Vec<f64>)>,
    /// The anchor sample (when anchored) comes first.
    pub samples: Vec<SelectionSample>,
    /// Maximum membership residual over all samples.
    pub residual: f64,
    /// Largest step `|σ(r) − σ(r′)|` between a node and the node it was
    /// continued from.
    pub max_jump: f64,
}

impl Selection {
    pub fn value_at(&self, r: &[f64]) -> Option<&[f64]> {
        self.samples
            .iter()
            .find(|s| s.r == r)
            .map(|s| s.x.as_slice())
    }

    pub fn anchor_satisfied(&self) -> bool {
        match &self.anchor {
            Some((r0, x0)) => self.value_at(r0) == Some(x0.as_slice()),
            None => true,
        }
    }

    /// CSV rows `r..., x..., residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(s) = self.samples.first() {
            let rs: Vec<String> = (0..s.r.len()).map(|i| format!("r{i}")).collect();
            let xs: Vec<String> = (0..s.x.len()).map(|i| format!("x{i}")).collect();
            out.push_str(&format!("{},{},residual\n", rs.join(","), xs.join(",")));
        }
        for s in &self.samples {
            let row: Vec<String> = s
                .r
                .iter()
                .chain(&s.x)
                .chain(std::iter::once(&s.residual))
                .map(|v| format!("{v}"))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

fn finish(strategy: Option<Strategy>, anchor: Option<(Vec<f64>, Vec<f64>)>, samples: Vec<SelectionSample>, max_jump: f64) -> Selection {
    let residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    Selection {
        strategy,
        anchor,
        samples,
        residual,
        max_jump,
    }
}

/// Anchored selection through `(r₀, x₀)`.
pub fn select(p: &SetPlot, r0: &[f64], x0: &[f64], strategy: Strategy) -> Result<Selection> {
    if r0.len() != p.domain().dim() {
        return Err(Error::DimensionMismatch {
            expected: p.domain().dim(),
            found: r0.len(),
        });
    }
    let at_anchor = p.eval(r0);
    if !at_anchor.contains(x0)? {
        return Err(Error::AnchorNotInSet);
    }
    match strategy {
        Strategy::Convex => convex(p, r0, x0),
        Strategy::ProjectionTracking => {
            track(p, r0, x0.to_vec(), Some(strategy), |value, prev| {
                value.nearest_point(prev).ok().flatten()
            })
        }
    }
}

fn convex(p: &SetPlot, r0: &[f64], x0: &[f64]) -> Result<Selection> {
    let (f, g) = p.interval_parts().ok_or(Error::NotIntervalMap)?.clone();
    let (f0, g0) = (f(r0), g(r0));
    let a0 = x0[0];
    // Rewritten around the anchor, σ(r) = a₀ + t₀(f(r) − f(r₀)) + (1 − t₀)(g(r) − g(r₀))
    // returns a₀ at r₀ without rounding.
    let sigma = |r: &[f64]| -> f64 {
        let (fr, gr) = (f(r), g(r));
        if f0 == g0 {
            return fr;
        }
        let t0 = ((a0 - g0) / (f0 - g0)).clamp(0.0, 1.0);
        let raw = a0 + t0 * (fr - f0) + (1.0 - t0) * (gr - g0);
        raw.clamp(fr.min(gr), fr.max(gr))
    };

    let mut samples = Vec::with_capacity(p.domain().len() + 1);
    let x = vec![sigma(r0)];
    samples.push(SelectionSample {
        residual: p.eval(r0).distance(&x)?,
        r: r0.to_vec(),
        x,
    });
    let mut max_jump: f64 = 0.0;
    let mut prev: Option<f64> = None;
    for r in p.domain().grid() {
        if r.as_slice() == r0 {
            continue;
        }
        let x = vec![sigma(&r)];
        if let Some(q) = prev {
            max_jump = max_jump.max((x[0] - q).abs());
        }
        prev = Some(x[0]);
        samples.push(SelectionSample {
            residual: p.eval(&r).distance(&x)?,
            r,
            x,
        });
    }
    Ok(finish(
        Some(Strategy::Convex),
        Some((r0.to_vec(), x0.to_vec())),
        samples,
        max_jump,
    ))
}

/// Breadth-first continuation over the grid from the node nearest `r₀`.
/// Nodes whose value is empty are not entered, so the selection lives on
/// the connected nonempty component around the anchor.
fn track<F>(p: &SetPlot, r0: &[f64], x0: Vec<f64>, strategy: Option<Strategy>, pick: F) -> Result<Selection>
where
    F: Fn(&RegionSet, &[f64]) -> Option<Vec<f64>>,
{
    let domain = p.domain();
    let anchored = strategy.is_some();
    let mut samples = vec![SelectionSample {
        residual: p.eval(r0).distance(&x0)?,
        r: r0.to_vec(),
        x: x0.clone(),
    }];
    let mut value_of: Vec<Option<Vec<f64>>> = vec![None; domain.len()];
    let mut queue = VecDeque::new();
    let mut max_jump: f64 = 0.0;

    let start = domain.nearest_node(r0);
    let start_r = domain.point(start);
    if start_r.as_slice() == r0 {
        value_of[start] = Some(x0.clone());
        queue.push_back(start);
    } else {
        let value = p.eval(&start_r);
        if let Some(x) = pick(&value, &x0) {
            max_jump = max_jump.max(dist(&x, &x0));
            samples.push(SelectionSample {
                residual: value.distance(&x)?,
                r: start_r,
                x: x.clone(),
            });
            value_of[start] = Some(x);
            queue.push_back(start);
        }
    }

    while let Some(node) = queue.pop_front() {
        let here = value_of[node].clone().expect("queued nodes carry a value");
        for nb in domain.neighbors(node) {
            if value_of[nb].is_some() {
                continue;
            }
            let r = domain.point(nb);
            let value = p.eval(&r);
            let Some(x) = pick(&value, &here) else {
                continue;
            };
            max_jump = max_jump.max(dist(&x, &here));
            samples.push(SelectionSample {
                residual: value.distance(&x)?,
                r,
                x: x.clone(),
            });
            value_of[nb] = Some(x);
            queue.push_back(nb);
        }
    }
    let anchor = anchored.then(|| (r0.to_vec(), x0));
    Ok(finish(strategy, anchor, samples, max_jump))
}

fn nearest_box_midpoint(value: &RegionSet, prev: &[f64]) -> Option<Vec<f64>> {
    let mut best: Option<(f64, &AxisBox)> = None;
    for b in value.boxes() {
        let d = dist(&b.clamp(prev), prev);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, b));
        }
    }
    best.map(|(_, b)| b.midpoint())
}

/// Unanchored selection: midpoint of the first box at `r₀`, then at each
/// node the midpoint of the box nearest the neighbouring value.
pub fn weak_select(p: &SetPlot, r0: &[f64]) -> Result<Selection> {
    if r0.len() != p.domain().dim() {
        return Err(Error::DimensionMismatch {
            expected: p.domain().dim(),
            found: r0.len(),
        });
    }
    let at_anchor = p.eval(r0);
    let first = at_anchor
        .boxes()
        .first()
        .ok_or_else(|| Error::Empty("plot value at r0 is empty".into()))?;
    let seed = first.midpoint();
    track(p, r0, seed, None, nearest_box_midpoint)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::svmap::{interval_map, ParamDomain, ScalarFn};

    fn dom(lo: f64, hi: f64, n: usize) -> ParamDomain {
        ParamDomain::interval(lo, hi, n).unwrap()
    }

    #[test]
    fn convex_selection_is_exact() {
        let f: ScalarFn = Arc::new(|r| -r[0].abs() - 1.0);
        let g: ScalarFn = Arc::new(|r| r[0].abs() + 1.0);
        let p = interval_map(dom(-0.1, 0.1, 2), f, g);
        let s = select(&p, &[0.0], &[0.5], Strategy::Convex).unwrap();
        assert!(s.anchor_satisfied());
        assert_eq!(s.residual, 0.0);
        // t₀ = (0.5 − 1)/(−1 − 1) = 0.25; σ(±0.1) = 0.25(−1.1) + 0.75(1.1) = 0.55
        let at = |r: f64| s.value_at(&[r]).unwrap()[0];
        assert!((at(-0.1) - 0.55).abs() < 1e-15);
        assert!((at(0.1) - 0.55).abs() < 1e-15);
        assert_eq!(at(0.0), 0.5);
    }

    #[test]
    fn convex_on_degenerate_anchor_follows_f() {
        let f: ScalarFn = Arc::new(|r| r[0]);
        let g: ScalarFn = Arc::new(|r| -r[0]);
        let p = interval_map(dom(-1.0, 1.0, 10), f, g);
        let s = select(&p, &[0.0], &[0.0], Strategy::Convex).unwrap();
        assert_eq!(s.residual, 0.0);
        assert_eq!(s.value_at(&[1.0]).unwrap()[0], 1.0);
    }

    #[test]
    fn constant_singleton_plot() {
        let p = SetPlot::constant(dom(0.0, 1.0, 10), RegionSet::point(&[3.0]).unwrap());
        let s = select(&p, &[0.5], &[3.0], Strategy::ProjectionTracking).unwrap();
        assert!(s.samples.iter().all(|x| x.x == vec![3.0]));
        assert_eq!(s.samples.len(), 11);
        assert!(s.anchor_satisfied());
    }

    #[test]
    fn anchor_outside_value_is_rejected() {
        let p = SetPlot::constant(dom(0.0, 1.0, 10), RegionSet::point(&[3.0]).unwrap());
        assert!(matches!(
            select(&p, &[0.5], &[2.0], Strategy::ProjectionTracking),
            Err(Error::AnchorNotInSet)
        ));
        assert!(matches!(
            select(&p, &[0.5], &[3.0], Strategy::Convex),
            Err(Error::NotIntervalMap)
        ));
    }

    #[test]
    fn weak_selection_of_moving_interval() {
        let p = SetPlot::new(
            dom(-1.0, 1.0, 20),
            1,
            Arc::new(|r| RegionSet::intervals(&[(r[0], r[0] + 1.0)]).unwrap()),
        );
        let s = weak_select(&p, &[0.0]).unwrap();
        assert_eq!(s.residual, 0.0);
        assert_eq!(s.samples.len(), 21);
        for smp in &s.samples {
            assert!((smp.x[0] - (smp.r[0] + 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn weak_selection_needs_nonempty_value() {
        let p = SetPlot::constant(dom(0.0, 1.0, 4), RegionSet::empty(1));
        assert!(matches!(weak_select(&p, &[0.0]), Err(Error::Empty(_))));
    }

    #[test]
    fn tracking_stops_at_empty_values() {
        let p = SetPlot::new(
            dom(-1.0, 1.0, 20),
            1,
            Arc::new(|r| {
                if r[0] > 0.5 {
                    RegionSet::empty(1)
                } else {
                    RegionSet::intervals(&[(r[0], 1.0)]).unwrap()
                }
            }),
        );
        let s = select(&p, &[0.0], &[0.2], Strategy::ProjectionTracking).unwrap();
        assert!(s.samples.iter().all(|x| x.r[0] <= 0.5));
        assert_eq!(s.residual, 0.0);
    }
}
