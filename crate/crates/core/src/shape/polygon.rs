use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::setrep::{AxisBox, RegionSet, SampledSet};

pub type Point = [f64; 2];

/// Default refinement budget as a fraction of the diameter.
pub const DEFAULT_EDGE_FRACTION: f64 = 2.0 * std::f64::consts::PI / 256.0;

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test.
fn segments_meet(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

/// Edges `b→a` and `b→d` leave their shared vertex along the same ray.
fn folds_back(a: Point, b: Point, d: Point) -> bool {
    cross(b, a, d) == 0.0 && (a[0] - b[0]) * (d[0] - b[0]) + (a[1] - b[1]) * (d[1] - b[1]) > 0.0
}

/// First pair of edges `(i, j)`, `i < j`, that meet anywhere other than a
/// shared endpoint. Edge `i` joins vertex `i` to vertex `i + 1`.
pub fn first_crossing(v: &[Point]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let hit = if j == i + 1 {
                folds_back(a, b, d)
            } else if i == 0 && j == n - 1 {
                folds_back(c, a, b)
            } else {
                segments_meet(a, b, c, d)
            };
            if hit {
                return Some((i, j));
            }
        }
    }
    None
}

/// `½ Σ (x_i y_{i+1} − x_{i+1} y_i)`.
pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

/// Simple counterclockwise polygon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polygon {
    vertices: Vec<Point>,
    max_edge: f64,
}

#[derive(Deserialize)]
struct PolygonDoc {
    vertices: Vec<Point>,
    #[serde(default)]
    max_edge: Option<f64>,
}

impl Polygon {
    /// Validates vertex count, simplicity, then orientation. A clockwise
    /// chain is rejected rather than reversed.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("polygon vertices must be finite".into()));
        }
        if let Some((i, j)) = first_crossing(&vertices) {
            return Err(Error::SelfIntersection(i, j));
        }
        let area = signed_area(&vertices);
        if !(area > 0.0) {
            return Err(Error::Orientation(area));
        }
        let mut p = Polygon {
            vertices,
            max_edge: 0.0,
        };
        p.max_edge = DEFAULT_EDGE_FRACTION * p.diameter();
        Ok(p)
    }

    pub fn with_max_edge(mut self, max_edge: f64) -> Result<Self> {
        if !(max_edge > 0.0) {
            return Err(Error::Invalid(format!("max edge length must be positive, got {max_edge}")));
        }
        self.max_edge = max_edge;
        Ok(self)
    }

    /// Regular `n`-gon inscribed in the circle of given center and radius,
    /// first vertex on the positive x-axis.
    pub fn regular(n: usize, center: Point, radius: f64) -> Result<Self> {
        let verts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Polygon::new(verts)
    }

    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        Polygon::new(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_edge(&self) -> f64 {
        self.max_edge
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])).sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((b[0] - a[0]).hypot(b[1] - a[1]));
            }
        }
        d
    }

    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Even–odd ray test; boundary points may land on either side.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Union of the `h × h` grid cells whose centers lie inside.
    pub fn to_region(&self, h: f64) -> Result<RegionSet> {
        if !(h > 0.0) {
            return Err(Error::Invalid(format!("cell size must be positive, got {h}")));
        }
        let (lo, hi) = self.bounds();
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize;
        let mut boxes = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                let x0 = lo[0] + h * i as f64;
                let y0 = lo[1] + h * j as f64;
                if self.contains([x0 + 0.5 * h, y0 + 0.5 * h]) {
                    boxes.push(AxisBox::closed(&[(x0, x0 + h), (y0, y0 + h)])?);
                }
            }
        }
        RegionSet::from_boxes(boxes, 2)
    }

    pub fn vertex_set(&self) -> SampledSet {
        let h = self.edges().map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])).fold(0.0, f64::max);
        SampledSet::new(self.vertices.iter().map(|v| v.to_vec()).collect(), h.max(f64::MIN_POSITIVE))
            .expect("polygon has vertices")
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({"vertices": self.vertices, "max_edge": self.max_edge})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let doc: PolygonDoc = serde_json::from_value(v.clone())?;
        let p = Polygon::new(doc.vertices)?;
        match doc.max_edge {
            Some(m) => p.with_max_edge(m),
            None => Ok(p),
        }
    }

    /// Two space-separated columns, one vertex per line, first vertex repeated
    /// at the end to close the curve.
    pub fn to_xy(&self) -> String {
        let mut out = String::new();
        for v in self.vertices.iter().chain(std::iter::once(&self.vertices[0])) {
            out.push_str(&format!("{:?} {:?}\n", v[0], v[1]));
        }
        out
    }
}
