use serde::Serialize;

use crate::error::{Error, Result};

/// Triangular extrapolation table for `T(h) = T₀ + c₁hᵖ + c₂h²ᵖ + …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Richardson {
    /// `table[i][j]`, `j ≤ i`: extrapolant from `values[i-j..=i]`.
    pub table: Vec<Vec<f64>>,
    pub diagonal: Vec<f64>,
    pub estimate: f64,
    /// `|T_{n,n} − T_{n−1,n−1}|`.
    pub error: f64,
}

/// Polynomial extrapolation to `h = 0` in the variable `h^exponent_step`
/// (Neville's scheme), for strictly decreasing positive `steps`.
///
/// With `exponent_step = 1` this removes the `h, h², …` terms of a
/// one-sided difference quotient; with `2`, the even terms of a central one.
/// Geometric steps with ratio `q` reduce to the classical recurrence
/// `T_{i,j} = T_{i,j−1} + (T_{i,j−1} − T_{i−1,j−1})/(q^{jp} − 1)`.
pub fn richardson(values: &[f64], steps: &[f64], exponent_step: u32) -> Result<Richardson> {
    if values.len() < 2 {
        return Err(Error::InvalidSchedule(format!(
            "extrapolation needs at least 2 values, got {}",
            values.len()
        )));
    }
    if steps.len() != values.len() {
        return Err(Error::InvalidSchedule(format!(
            "{} values for {} steps",
            values.len(),
            steps.len()
        )));
    }
    if steps.iter().any(|&h| !(h > 0.0)) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("steps must be positive and strictly decreasing".into()));
    }
    let x: Vec<f64> = steps.iter().map(|h| h.powi(exponent_step.max(1) as i32)).collect();
    let n = values.len();
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        row.push(values[i]);
        for j in 1..=i {
            let cur = row[j - 1];
            let prev = table[i - 1][j - 1];
            let diff = cur - prev;
            row.push(if diff == 0.0 {
                cur
            } else {
                cur + diff * x[i] / (x[i - j] - x[i])
            });
        }
        table.push(row);
    }
    let diagonal: Vec<f64> = table.iter().enumerate().map(|(i, r)| r[i]).collect();
    let estimate = diagonal[n - 1];
    let error = (diagonal[n - 1] - diagonal[n - 2]).abs();
    Ok(Richardson {
        table,
        diagonal,
        estimate,
        error,
    })
}
