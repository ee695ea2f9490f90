use std::cmp::Ordering;

use super::interval::{AxisBox, Interval};
use super::sampled::SampledSet;
use crate::error::{Error, Result};

/// A finite union of axis-aligned boxes in canonical form.
///
/// The canonical form is a recursive slab decomposition: axis 0 is cut at
/// every box endpoint, each elementary slab (a breakpoint or the open gap
/// between two breakpoints) carries the canonical cross-section of the
/// remaining axes, and maximal runs of slabs with equal cross-sections are
/// merged. The result depends only on the point set, so `==` decides set
/// equality. The universe is metadata for `complement` and does not take
/// part in equality.
#[derive(Clone, Debug)]
pub struct RegionSet {
    dim: usize,
    boxes: Vec<AxisBox>,
    universe: Option<AxisBox>,
}

impl PartialEq for RegionSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.boxes == other.boxes
    }
}

type Tail<'a> = &'a [Interval];

fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).expect("interval endpoints are never NaN")
}

/// Index range `[start, end]` of elementary pieces covered by `iv`.
///
/// With sorted breakpoints `b_0 < … < b_{n-1}`, piece `2k+1` is `{b_k}` and
/// piece `2k` is the open gap below `b_k` (piece `2n` is the gap above the
/// last breakpoint).
fn piece_range(iv: &Interval, breaks: &[f64]) -> (usize, usize) {
    let idx = |x: f64| {
        breaks
            .binary_search_by(|b| cmp_f64(b, &x))
            .expect("endpoint registered as breakpoint")
    };
    let start = if iv.lo() == f64::NEG_INFINITY {
        0
    } else {
        2 * idx(iv.lo()) + 1 + usize::from(iv.lo_open())
    };
    let end = if iv.hi() == f64::INFINITY {
        2 * breaks.len()
    } else {
        2 * idx(iv.hi()) + 1 - usize::from(iv.hi_open())
    };
    (start, end)
}

fn run_interval(start: usize, end: usize, breaks: &[f64]) -> Interval {
    let n = breaks.len();
    let (lo, lo_open) = if start == 0 {
        (f64::NEG_INFINITY, true)
    } else if start % 2 == 1 {
        (breaks[(start - 1) / 2], false)
    } else {
        (breaks[start / 2 - 1], true)
    };
    let (hi, hi_open) = if end == 2 * n {
        (f64::INFINITY, true)
    } else if end % 2 == 1 {
        (breaks[(end - 1) / 2], false)
    } else {
        (breaks[end / 2], true)
    };
    Interval::new(lo, hi, lo_open, hi_open).expect("runs of pieces form valid intervals")
}

fn full_tails(depth: usize) -> Vec<Vec<Interval>> {
    vec![vec![Interval::full(); depth]]
}

/// Canonical decomposition of `op(a, b)` over the remaining `depth` axes.
fn combine(a: &[Tail], b: &[Tail], depth: usize, op: &dyn Fn(bool, bool) -> bool) -> Vec<Vec<Interval>> {
    if depth == 0 {
        return if op(!a.is_empty(), !b.is_empty()) {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    if a.is_empty() && b.is_empty() {
        return if op(false, false) {
            full_tails(depth)
        } else {
            Vec::new()
        };
    }

    let mut breaks: Vec<f64> = a
        .iter()
        .chain(b)
        .flat_map(|t| [t[0].lo(), t[0].hi()])
        .filter(|x| x.is_finite())
        .collect();
    breaks.sort_by(cmp_f64);
    breaks.dedup();

    let ranges_a: Vec<_> = a.iter().map(|t| piece_range(&t[0], &breaks)).collect();
    let ranges_b: Vec<_> = b.iter().map(|t| piece_range(&t[0], &breaks)).collect();

    let npieces = 2 * breaks.len() + 1;
    let mut runs: Vec<(usize, usize, Vec<Vec<Interval>>)> = Vec::new();
    let mut prev_cover: Option<(Vec<usize>, Vec<usize>)> = None;
    let mut prev_sub: Vec<Vec<Interval>> = Vec::new();

    for p in 0..npieces {
        let cover_a: Vec<usize> = (0..a.len())
            .filter(|&i| ranges_a[i].0 <= p && p <= ranges_a[i].1)
            .collect();
        let cover_b: Vec<usize> = (0..b.len())
            .filter(|&i| ranges_b[i].0 <= p && p <= ranges_b[i].1)
            .collect();
        let sub = match &prev_cover {
            Some((pa, pb)) if *pa == cover_a && *pb == cover_b => prev_sub.clone(),
            _ => {
                let ta: Vec<Tail> = cover_a.iter().map(|&i| &a[i][1..]).collect();
                let tb: Vec<Tail> = cover_b.iter().map(|&i| &b[i][1..]).collect();
                combine(&ta, &tb, depth - 1, op)
            }
        };
        prev_cover = Some((cover_a, cover_b));
        prev_sub = sub.clone();

        if sub.is_empty() {
            continue;
        }
        match runs.last_mut() {
            Some((_, end, s)) if *end + 1 == p && *s == sub => *end = p,
            _ => runs.push((p, p, sub)),
        }
    }

    let mut out = Vec::new();
    for (start, end, sub) in runs {
        let head = run_interval(start, end, &breaks);
        for tail in sub {
            let mut row = Vec::with_capacity(depth);
            row.push(head);
            row.extend(tail);
            out.push(row);
        }
    }
    out
}

impl RegionSet {
    pub fn empty(dim: usize) -> Self {
        RegionSet {
            dim,
            boxes: Vec::new(),
            universe: None,
        }
    }

    /// Canonicalize an arbitrary list of boxes of dimension `dim`.
    pub fn from_boxes(boxes: Vec<AxisBox>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
        }
        let tails: Vec<Tail> = boxes.iter().map(AxisBox::sides).collect();
        let rows = combine(&tails, &[], dim, &|a, _| a);
        Ok(Self::from_rows(rows, dim, None))
    }

    fn from_rows(rows: Vec<Vec<Interval>>, dim: usize, universe: Option<AxisBox>) -> Self {
        let boxes = rows
            .into_iter()
            .map(|r| AxisBox::new(r).expect("canonical rows are nonempty"))
            .collect();
        RegionSet {
            dim,
            boxes,
            universe,
        }
    }

    pub fn from_box(b: AxisBox) -> Self {
        let dim = b.dim();
        Self::from_boxes(vec![b], dim).expect("single box has consistent dimension")
    }

    /// One-dimensional set from closed `[lo, hi]` pairs.
    pub fn intervals(pairs: &[(f64, f64)]) -> Result<Self> {
        let boxes = pairs
            .iter()
            .map(|&p| AxisBox::closed(&[p]))
            .collect::<Result<_>>()?;
        Self::from_boxes(boxes, 1)
    }

    pub fn point(x: &[f64]) -> Result<Self> {
        Ok(Self::from_box(AxisBox::point(x)?))
    }

    pub fn with_universe(mut self, universe: AxisBox) -> Result<Self> {
        if universe.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: universe.dim(),
            });
        }
        self.universe = Some(universe);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn universe(&self) -> Option<&AxisBox> {
        self.universe.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.boxes.iter().all(AxisBox::is_bounded)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    fn joint_universe(&self, other: &Self) -> Result<Option<AxisBox>> {
        match (&self.universe, &other.universe) {
            (Some(u), Some(v)) if u != v => Err(Error::UniverseMismatch),
            (Some(u), _) | (None, Some(u)) => Ok(Some(u.clone())),
            (None, None) => Ok(None),
        }
    }

    fn binary(&self, other: &Self, op: &dyn Fn(bool, bool) -> bool) -> Result<Self> {
        self.check_dim(other.dim)?;
        let universe = self.joint_universe(other)?;
        let ta: Vec<Tail> = self.boxes.iter().map(AxisBox::sides).collect();
        let tb: Vec<Tail> = other.boxes.iter().map(AxisBox::sides).collect();
        Ok(Self::from_rows(combine(&ta, &tb, self.dim, op), self.dim, universe))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.binary(other, &|a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.binary(other, &|a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.binary(other, &|a, b| a && !b)
    }

    pub fn symm_diff(&self, other: &Self) -> Result<Self> {
        self.binary(other, &|a, b| a != b)
    }

    /// `U ∖ A` for the universe `U` attached to this set.
    pub fn complement(&self) -> Result<Self> {
        let u = self.universe.clone().ok_or(Error::MissingUniverse)?;
        let ta: Vec<Tail> = self.boxes.iter().map(AxisBox::sides).collect();
        let tu = [u.sides()];
        let rows = combine(&ta, &tu, self.dim, &|a, inside| inside && !a);
        Ok(Self::from_rows(rows, self.dim, Some(u)))
    }

    /// `A + t·v`.
    pub fn translate(&self, v: &[f64], t: f64) -> Result<Self> {
        self.check_dim(v.len())?;
        let moved = self
            .boxes
            .iter()
            .map(|b| b.translated(v, t))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::from_boxes(moved, self.dim)?;
        out.universe = self.universe.clone();
        Ok(out)
    }

    /// Image under `x ↦ scale ⊙ x + offset` (diagonal affine map), exact on boxes.
    pub fn affine_diag(&self, scale: &[f64], offset: &[f64]) -> Result<Self> {
        self.check_dim(scale.len())?;
        self.check_dim(offset.len())?;
        let mapped = self
            .boxes
            .iter()
            .map(|b| {
                let sides = b
                    .sides()
                    .iter()
                    .zip(scale.iter().zip(offset))
                    .map(|(s, (&k, &c))| {
                        let (p, q) = (k * s.lo() + c, k * s.hi() + c);
                        if k > 0.0 {
                            Interval::new(p, q, s.lo_open(), s.hi_open())
                        } else if k < 0.0 {
                            Interval::new(q, p, s.hi_open(), s.lo_open())
                        } else {
                            Interval::point(c)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                AxisBox::new(sides)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_boxes(mapped, self.dim)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.boxes.iter().any(|b| b.contains(x)))
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> Result<f64> {
        if !self.is_bounded() {
            return Err(Error::Unbounded("volume of an unbounded set".into()));
        }
        Ok(self.boxes.iter().map(AxisBox::volume).sum())
    }

    /// Size of the topological boundary: the number of boundary points for
    /// `d = 1`, the boundary length for `d = 2`.
    pub fn perimeter(&self) -> Result<f64> {
        if !self.is_bounded() {
            return Err(Error::Unbounded("perimeter of an unbounded set".into()));
        }
        match self.dim {
            1 => Ok(boundary_point_count(&self.boxes) as f64),
            2 => Ok(self.boundary_length_2d()),
            d => Err(Error::Unsupported(format!("perimeter in dimension {d}"))),
        }
    }

    fn boundary_length_2d(&self) -> f64 {
        let mut breaks: Vec<f64> = self
            .boxes
            .iter()
            .flat_map(|b| [b.side(0).lo(), b.side(0).hi()])
            .collect();
        breaks.sort_by(cmp_f64);
        breaks.dedup();
        let npieces = 2 * breaks.len() + 1;
        let ranges: Vec<_> = self
            .boxes
            .iter()
            .map(|b| piece_range(b.side(0), &breaks))
            .collect();
        let section = |p: usize| -> RegionSet {
            let rows: Vec<AxisBox> = self
                .boxes
                .iter()
                .zip(&ranges)
                .filter(|(_, r)| r.0 <= p && p <= r.1)
                .map(|(b, _)| AxisBox::new(vec![*b.side(1)]).expect("1-d side"))
                .collect();
            RegionSet::from_boxes(rows, 1).expect("1-d sections")
        };
        let sections: Vec<RegionSet> = (0..npieces).map(section).collect();

        let mut total = 0.0;
        // Vertical boundary at each breakpoint: heights seen from some side
        // but not from all three.
        for k in 0..breaks.len() {
            let (l, c, r) = (&sections[2 * k], &sections[2 * k + 1], &sections[2 * k + 2]);
            let any = l.union(c).and_then(|s| s.union(r)).expect("same dim");
            let all = l.intersect(c).and_then(|s| s.intersect(r)).expect("same dim");
            total += any.volume().unwrap_or(0.0) - all.volume().unwrap_or(0.0);
        }
        // Horizontal boundary inside each open gap.
        for k in 1..breaks.len() {
            let gap = &sections[2 * k];
            let width = breaks[k] - breaks[k - 1];
            total += width * boundary_point_count(&gap.boxes) as f64;
        }
        total
    }

    /// Nearest point of the closure to `x`; ties go to the lexicographically
    /// smallest candidate. `None` for the empty set.
    pub fn nearest_point(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        self.check_dim(x.len())?;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for b in &self.boxes {
            let p = b.clamp(x);
            let d2 = dist2(&p, x);
            let better = match &best {
                None => true,
                Some((bd, bp)) => d2 < *bd || (d2 == *bd && lex_less(&p, bp)),
            };
            if better {
                best = Some((d2, p));
            }
        }
        Ok(best.map(|(_, p)| p))
    }

    /// Euclidean distance from `x` to the set (`+∞` for the empty set).
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(match self.nearest_point(x)? {
            Some(p) => dist2(&p, x).sqrt(),
            None => f64::INFINITY,
        })
    }

    /// Does the set meet the open box whose closure is `open`?
    pub fn meets_open(&self, open: &AxisBox) -> Result<bool> {
        self.check_dim(open.dim())?;
        Ok(self.boxes.iter().any(|b| b.meets_open(open)))
    }

    /// Grid sample of the set at pitch `h`.
    pub fn sample(&self, h: f64) -> Result<SampledSet> {
        if !(h > 0.0) {
            return Err(Error::Invalid(format!("sampling pitch must be positive, got {h}")));
        }
        if !self.is_bounded() {
            return Err(Error::Unbounded("cannot sample an unbounded set".into()));
        }
        if self.is_empty() {
            return Err(Error::Empty("cannot sample the empty set".into()));
        }
        let mut points: Vec<Vec<f64>> = Vec::new();
        for b in &self.boxes {
            let axes: Vec<Vec<f64>> = b.sides().iter().map(|s| sample_axis(s, h)).collect();
            let mut acc: Vec<Vec<f64>> = vec![Vec::new()];
            for axis in &axes {
                acc = acc
                    .into_iter()
                    .flat_map(|p| {
                        axis.iter().map(move |&c| {
                            let mut q = p.clone();
                            q.push(c);
                            q
                        })
                    })
                    .collect();
            }
            points.extend(acc);
        }
        SampledSet::new(points, h)
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (p, q) in a.iter().zip(b) {
        match p.total_cmp(q) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}

fn boundary_point_count(boxes: &[AxisBox]) -> usize {
    let mut ends: Vec<f64> = boxes
        .iter()
        .flat_map(|b| [b.side(0).lo(), b.side(0).hi()])
        .filter(|x| x.is_finite())
        .collect();
    ends.sort_by(cmp_f64);
    ends.dedup();
    ends.len()
}

fn sample_axis(s: &Interval, h: f64) -> Vec<f64> {
    if s.is_degenerate() {
        return vec![s.lo()];
    }
    let n = (s.length() / h).ceil().max(1.0) as usize;
    let pts: Vec<f64> = (0..=n)
        .filter(|&k| !(k == 0 && s.lo_open()) && !(k == n && s.hi_open()))
        .map(|k| {
            if k == n {
                s.hi()
            } else {
                s.lo() + s.length() * (k as f64) / (n as f64)
            }
        })
        .collect();
    if pts.is_empty() {
        vec![s.midpoint()]
    } else {
        pts
    }
}
