use serde::Serialize;

use super::{scalar_diff, DiffReport, DiffSchedule, Side};
use crate::error::{Error, Result};
use crate::measure::MeasureModel;
use crate::setrep::RegionSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FominReport {
    /// Central-difference estimate of `d/dt μ(A + tv)` at `0`.
    pub estimate: f64,
    /// Largest error estimate among the central and the two one-sided runs.
    pub error_estimate: f64,
    /// One-sided `D_{A,v} = lim_{t→0⁺} (μ(A+tv) − μ(A))/t`.
    pub d_plus: f64,
    /// One-sided `D_{A,−v}`.
    pub d_minus: f64,
    /// `|D_{A,v} + D_{A,−v}|`.
    pub antisymmetry_residual: f64,
    pub central: DiffReport,
    pub plus: DiffReport,
    pub minus: DiffReport,
}

/// Fomin derivative of `μ` at `A` in direction `v`.
pub fn fomin_derivative(mu: &MeasureModel, a: &RegionSet, v: &[f64], sched: &DiffSchedule) -> Result<FominReport> {
    if v.len() != a.dim() || a.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: if v.len() != mu.dim() { v.len() } else { a.dim() },
        });
    }
    let g = |t: f64| mu.mu(&a.translate(v, t)?);
    let central = scalar_diff(g, Side::Central, sched)?;
    let plus = scalar_diff(g, Side::Right, sched)?;
    let left = scalar_diff(g, Side::Left, sched)?;
    // D_{A,−v} = lim (g(−t) − g(0))/t is minus the left derivative of g.
    let mut minus = left;
    minus.estimate = -minus.estimate;
    minus.quotients.iter_mut().for_each(|q| *q = -*q);
    minus.table.iter_mut().flatten().for_each(|q| *q = -*q);
    minus.correction = -minus.correction;

    let error_estimate = central
        .error_estimate
        .max(plus.error_estimate)
        .max(minus.error_estimate);
    Ok(FominReport {
        estimate: central.estimate,
        error_estimate,
        d_plus: plus.estimate,
        d_minus: minus.estimate,
        antisymmetry_residual: (plus.estimate + minus.estimate).abs(),
        central,
        plus,
        minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Density;
    use crate::AxisBox;

    const PDF0_MINUS_PDFM1: f64 = 0.156_971_555_882_289_34;

    #[test]
    fn gaussian_unit_gap() {
        let a = RegionSet::intervals(&[(-1.0, 0.0)]).unwrap();
        let r = fomin_derivative(&MeasureModel::gaussian(1), &a, &[1.0], &DiffSchedule::default()).unwrap();
        assert!((r.estimate - PDF0_MINUS_PDFM1).abs() < 1e-4, "{}", r.estimate);
        assert!(r.antisymmetry_residual <= 1e-6, "{}", r.antisymmetry_residual);
        assert!(r.antisymmetry_residual <= 10.0 * r.error_estimate.max(1e-15));
    }

    #[test]
    fn lebesgue_translation_invariance() {
        let mu = MeasureModel::new(vec![Density::lebesgue(-10.0, 10.0).unwrap(); 2]).unwrap();
        let a = RegionSet::from_box(AxisBox::closed(&[(0.0, 1.0), (-2.0, 0.5)]).unwrap());
        let r = fomin_derivative(&mu, &a, &[0.3, -1.0], &DiffSchedule::default()).unwrap();
        assert!(r.estimate.abs() < 1e-10);
        assert!(r.antisymmetry_residual < 1e-10);
    }

    #[test]
    fn symmetric_set_under_gaussian() {
        let a = RegionSet::intervals(&[(-0.7, 0.7)]).unwrap();
        let r = fomin_derivative(&MeasureModel::gaussian(1), &a, &[1.0], &DiffSchedule::default()).unwrap();
        assert!(r.estimate.abs() < 1e-12);
    }

    #[test]
    fn unbounded_lebesgue_set_is_an_error() {
        let a = RegionSet::intervals(&[(0.0, f64::INFINITY)]).unwrap();
        assert!(fomin_derivative(&MeasureModel::lebesgue(1), &a, &[1.0], &DiffSchedule::default()).is_err());
    }
}
