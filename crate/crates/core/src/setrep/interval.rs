use std::fmt;

use crate::error::{Error, Result};

/// An interval of the extended real line with independently open or closed
/// endpoints.
///
/// Infinite endpoints are always stored as open. A degenerate interval
/// (`lo == hi`) is a single point and must be closed on both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

// -0.0 and 0.0 compare equal but print differently; keep one spelling.
fn unsign_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        let bad = || Error::InvalidInterval {
            lo,
            hi,
            lo_open,
            hi_open,
        };
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(bad());
        }
        let lo_open = lo_open || lo == f64::NEG_INFINITY;
        let hi_open = hi_open || hi == f64::INFINITY;
        if lo == hi && (lo_open || hi_open) {
            return Err(bad());
        }
        Ok(Interval {
            lo: unsign_zero(lo),
            hi: unsign_zero(hi),
            lo_open,
            hi_open,
        })
    }

    /// Closed interval `[lo, hi]`; infinite ends become open automatically.
    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x, false, false)
    }

    /// The closed interval between two numbers given in either order.
    pub fn hull(a: f64, b: f64) -> Result<Self> {
        Self::closed(a.min(b), a.max(b))
    }

    pub fn full() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_closed(&self) -> bool {
        !self.lo_open && !self.hi_open
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = self.lo < x || (!self.lo_open && self.lo == x);
        let below = x < self.hi || (!self.hi_open && self.hi == x);
        above && below
    }

    /// Nearest point of the closure to `x`.
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    /// A point of the interval, the midpoint when bounded.
    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.clamp(0.5 * (self.lo + self.hi)),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// Does the interior-open interval `(lo, hi)` of `other` meet this interval?
    pub fn meets_open(&self, lo: f64, hi: f64) -> bool {
        if !(lo < hi) {
            return false;
        }
        let left_ok = self.hi > lo;
        let right_ok = self.lo < hi;
        left_ok && right_ok
    }

    pub fn shifted(&self, by: f64) -> Result<Self> {
        Self::new(self.lo + by, self.hi + by, self.lo_open, self.hi_open)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// A nonempty axis-aligned box: one interval per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    sides: Vec<Interval>,
}

impl AxisBox {
    pub fn new(sides: Vec<Interval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Invalid("a box needs at least one axis".into()));
        }
        Ok(AxisBox { sides })
    }

    /// Closed box from `[lo, hi]` pairs.
    pub fn closed(bounds: &[(f64, f64)]) -> Result<Self> {
        let sides = bounds
            .iter()
            .map(|&(lo, hi)| Interval::closed(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sides)
    }

    /// Degenerate box holding the single point `x`.
    pub fn point(x: &[f64]) -> Result<Self> {
        let sides = x.iter().map(|&c| Interval::point(c)).collect::<Result<_>>()?;
        Self::new(sides)
    }

    pub fn full(dim: usize) -> Self {
        AxisBox {
            sides: vec![Interval::full(); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn side(&self, axis: usize) -> &Interval {
        &self.sides[axis]
    }

    pub fn is_bounded(&self) -> bool {
        self.sides.iter().all(Interval::is_bounded)
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().map(Interval::length).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.sides.iter().zip(x).all(|(s, &c)| s.contains(c))
    }

    /// Nearest point of the closure of the box.
    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        self.sides.iter().zip(x).map(|(s, &c)| s.clamp(c)).collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.sides.iter().map(Interval::midpoint).collect()
    }

    /// Does this box meet the open box with the given closure?
    pub fn meets_open(&self, open: &AxisBox) -> bool {
        self.sides
            .iter()
            .zip(&open.sides)
            .all(|(s, o)| s.meets_open(o.lo, o.hi))
    }

    pub fn translated(&self, v: &[f64], t: f64) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let sides = self
            .sides
            .iter()
            .zip(v)
            .map(|(s, &vi)| s.shifted(t * vi))
            .collect::<Result<_>>()?;
        Ok(AxisBox { sides })
    }
}

impl fmt::Display for AxisBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sides.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_and_open_points() {
        assert!(Interval::closed(1.0, 0.0).is_err());
        assert!(Interval::new(0.0, 0.0, true, false).is_err());
        assert!(Interval::closed(f64::NAN, 1.0).is_err());
        assert!(Interval::point(0.0).is_ok());
    }

    #[test]
    fn infinite_ends_are_open() {
        let iv = Interval::closed(f64::NEG_INFINITY, 0.5).unwrap();
        assert!(iv.lo_open());
        assert!(!iv.hi_open());
        assert!(iv.contains(-1e300));
        assert!(iv.contains(0.5));
    }

    #[test]
    fn membership_respects_endpoint_kind() {
        let iv = Interval::new(0.0, 1.0, true, false).unwrap();
        assert!(!iv.contains(0.0));
        assert!(iv.contains(1.0));
        assert!(iv.contains(0.5));
    }

    #[test]
    fn negative_zero_is_normalized() {
        let iv = Interval::point(-0.0).unwrap();
        assert!(iv.lo().is_sign_positive());
    }

    #[test]
    fn open_meeting() {
        let p = Interval::point(1.0).unwrap();
        assert!(!p.meets_open(1.0, 2.0));
        assert!(p.meets_open(0.5, 1.5));
    }
}
