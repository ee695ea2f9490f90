use serde::Serialize;

use super::SetPlot;
use crate::error::{Error, Result};
use crate::setrep::AxisBox;

/// Bisection depth used when a grid neighbour misses the open set.
pub const DEFAULT_PROBE_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LscWitness {
    pub open: usize,
    pub r: Vec<f64>,
}

/// A grid point in `φ⁻¹(O)` that has a side along which `φ(r′) ∩ O = ∅`
/// for every probe `r′ = r ± (h/2^k) e_axis`, `k = 0..=depth`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LscViolation {
    pub open: usize,
    pub r: Vec<f64>,
    /// `(axis, ±1)` for each failing side.
    pub sides: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LscReport {
    pub grid_points: usize,
    pub witnesses: Vec<LscWitness>,
    pub violations: Vec<LscViolation>,
}

impl LscReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Discrete lower-semicontinuity check of `φ` against a list of open boxes
/// (each given by its closure).
///
/// For every grid point `r` with `φ(r) ∩ O ≠ ∅`, each axis neighbour at
/// pitch `h` is tested; when it misses `O`, the probe is moved halfway
/// toward `r` up to `depth` times. A side where every probe misses is
/// reported: there the preimage `{r : φ(r) ∩ O ≠ ∅}` has `r` on its
/// boundary at every resolution tried.
pub fn lsc_check(phi: &SetPlot, opens: &[AxisBox], depth: u32) -> Result<LscReport> {
    for o in opens {
        if o.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                found: o.dim(),
            });
        }
    }
    let domain = phi.domain();
    let grid = domain.grid();
    let values: Vec<_> = grid.iter().map(|r| phi.eval(r)).collect();
    let mut report = LscReport {
        grid_points: grid.len(),
        ..Default::default()
    };

    for (oi, open) in opens.iter().enumerate() {
        for (r, value) in grid.iter().zip(&values) {
            if !value.meets_open(open)? {
                continue;
            }
            report.witnesses.push(LscWitness {
                open: oi,
                r: r.clone(),
            });
            let mut sides = Vec::new();
            for axis in 0..domain.dim() {
                let h = domain.axis_pitch(axis);
                if h == 0.0 {
                    continue;
                }
                for sign in [-1i8, 1] {
                    let mut probe = r.clone();
                    probe[axis] = r[axis] + f64::from(sign) * h;
                    if !domain.contains(&probe) {
                        continue;
                    }
                    let mut hit = false;
                    for k in 0..=depth {
                        probe[axis] = r[axis] + f64::from(sign) * h / 2f64.powi(k as i32);
                        if probe[axis] == r[axis] {
                            break;
                        }
                        if phi.eval(&probe).meets_open(open)? {
                            hit = true;
                            break;
                        }
                    }
                    if !hit {
                        sides.push((axis, sign));
                    }
                }
            }
            if !sides.is_empty() {
                report.violations.push(LscViolation {
                    open: oi,
                    r: r.clone(),
                    sides,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::setrep::RegionSet;
    use crate::svmap::{interval_map, ParamDomain};

    #[test]
    fn constant_map_has_no_violations() {
        let d = ParamDomain::interval(-1.0, 1.0, 20).unwrap();
        let phi = SetPlot::constant(d, RegionSet::intervals(&[(0.0, 1.0)]).unwrap());
        let o = AxisBox::closed(&[(0.5, 2.0)]).unwrap();
        let rep = lsc_check(&phi, &[o], DEFAULT_PROBE_DEPTH).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.witnesses.len(), 21);
    }

    #[test]
    fn step_map_violates_at_zero() {
        let d = ParamDomain::interval(-1.0, 1.0, 20).unwrap();
        let phi = SetPlot::new(
            d,
            1,
            Arc::new(|r| {
                if r[0] <= 0.0 {
                    RegionSet::from_boxes(
                        vec![AxisBox::point(&[0.0]).unwrap(), AxisBox::point(&[1.0]).unwrap()],
                        1,
                    )
                    .unwrap()
                } else {
                    RegionSet::point(&[0.0]).unwrap()
                }
            }),
        );
        let o = AxisBox::closed(&[(0.5, 1.5)]).unwrap();
        let rep = lsc_check(&phi, &[o], DEFAULT_PROBE_DEPTH).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].r, vec![0.0]);
        assert_eq!(rep.violations[0].sides, vec![(0, 1)]);
    }

    #[test]
    fn interval_map_sin_cos_against_dense_grid() {
        let d = ParamDomain::interval(-3.0, 3.0, 60).unwrap();
        let phi = interval_map(d.clone(), Arc::new(|r| r[0].sin()), Arc::new(|r| r[0].cos()));
        let o = AxisBox::closed(&[(0.4, 0.6)]).unwrap();
        let rep = lsc_check(&phi, std::slice::from_ref(&o), DEFAULT_PROBE_DEPTH).unwrap();
        assert!(rep.passed());
        // dense-grid oracle at h/10: the preimage has no isolated points there either
        let dense = phi.on_domain(d.refined(10).unwrap());
        let dense_rep = lsc_check(&dense, &[o], DEFAULT_PROBE_DEPTH).unwrap();
        assert!(dense_rep.passed());
        assert!(dense_rep.witnesses.len() > rep.witnesses.len());
    }

    #[test]
    fn mismatched_open_dimension() {
        let d = ParamDomain::interval(0.0, 1.0, 2).unwrap();
        let phi = SetPlot::constant(d, RegionSet::point(&[0.0]).unwrap());
        let o = AxisBox::closed(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        assert!(lsc_check(&phi, &[o], 4).is_err());
    }
}
