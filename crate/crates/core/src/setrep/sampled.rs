use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A finite point cloud standing in for a set that has no exact box
/// representation, together with the pitch it was sampled at.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    h: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

impl SampledSet {
    pub fn new(points: Vec<Vec<f64>>, h: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("sampled set needs at least one point".into()));
        }
        if !(h > 0.0) {
            return Err(Error::Invalid(format!("sampling pitch must be positive, got {h}")));
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        Ok(SampledSet { dim, points, h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pitch(&self) -> f64 {
        self.h
    }

    /// Sorted, deduplicated copy of the points: the point set itself.
    pub fn point_set(&self) -> Vec<Vec<f64>> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts.dedup();
        pts
    }

    /// Same points regardless of order or multiplicity.
    pub fn same_points(&self, other: &SampledSet) -> bool {
        self.point_set() == other.point_set()
    }

    pub fn union(&self, other: &SampledSet) -> Result<SampledSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        SampledSet::new(pts, self.h.max(other.h))
    }

    /// Coordinate-wise bounds `(min, max)` of the cloud.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[k]), hi.max(p[k]))
                })
            })
            .collect()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// `max_{a ∈ A} min_{b ∈ B} |a − b|`.
///
/// `B` is sorted along its first coordinate and scanned outward from the
/// insertion point of each `a` until the axis gap alone exceeds the best
/// distance found, so the result is the same number a full double loop
/// would give.
pub fn directed_hausdorff(a: &SampledSet, b: &SampledSet) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let mut sorted: Vec<&[f64]> = b.points.iter().map(Vec::as_slice).collect();
    sorted.sort_by(|p, q| p[0].total_cmp(&q[0]));

    let mut worst = 0.0_f64;
    for p in &a.points {
        let start = sorted.partition_point(|q| q[0] < p[0]);
        let mut best = f64::INFINITY;
        for q in sorted[start..].iter() {
            let gap = q[0] - p[0];
            if gap * gap > best {
                break;
            }
            best = best.min(sq_dist(p, q));
        }
        for q in sorted[..start].iter().rev() {
            let gap = p[0] - q[0];
            if gap * gap > best {
                break;
            }
            best = best.min(sq_dist(p, q));
        }
        worst = worst.max(best);
        if worst.is_infinite() {
            break;
        }
    }
    Ok(worst.sqrt())
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff(a: &SampledSet, b: &SampledSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
