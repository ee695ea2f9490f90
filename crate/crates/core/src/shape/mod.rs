//! Eulerian shape derivatives along `F_t = id + tV`.
//!
//! Shapes are simple counterclockwise polygons in the plane or interval
//! unions on the line. Deformation maps vertices (endpoints) through `F_t`,
//! subdividing polygon edges whose image bends away from the chord.

mod field;
mod polygon;

use serde::Serialize;
use serde_json::Value;

pub use field::{flow_map, FlowMap, VectorField};
pub use polygon::{first_crossing, signed_area, Point, Polygon, DEFAULT_EDGE_FRACTION};

use crate::error::{Error, Result};
use crate::measure::integrate_with_breaks;
use crate::setrep::{AxisBox, Interval, RegionSet};
use crate::svdiff::{scalar_diff, DiffReport, DiffSchedule, Side};

/// Grid nodes per axis for the sampled Lipschitz bound.
pub const LIPSCHITZ_GRID: usize = 33;
const MAX_SPLIT_DEPTH: u32 = 16;
const TRIANGLE_DEPTH: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Polygon(Polygon),
    Intervals(RegionSet),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Polygon(_) => 2,
            Shape::Intervals(r) => r.dim(),
        }
    }

    /// Bounding box enlarged by a quarter of its extent on each side.
    fn hold_all(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = match self {
            Shape::Polygon(p) => {
                let (lo, hi) = p.bounds();
                (lo.to_vec(), hi.to_vec())
            }
            Shape::Intervals(r) => {
                if r.is_empty() || !r.is_bounded() {
                    return Err(Error::Unbounded("interval shape must be bounded and nonempty".into()));
                }
                let b = r.boxes();
                let lo = b.iter().map(|x| x.side(0).lo()).fold(f64::INFINITY, f64::min);
                let hi = b.iter().map(|x| x.side(0).hi()).fold(f64::NEG_INFINITY, f64::max);
                (vec![lo], vec![hi])
            }
        };
        let pad: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a).max(1e-3)).collect();
        Ok((
            lo.iter().zip(&pad).map(|(a, p)| a - p).collect(),
            hi.iter().zip(&pad).map(|(b, p)| b + p).collect(),
        ))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if v.get("vertices").is_some() {
            Ok(Shape::Polygon(Polygon::from_json(v)?))
        } else {
            let r = crate::setrep::json::region_from_json(v)?;
            if r.dim() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: r.dim() });
            }
            Ok(Shape::Intervals(r))
        }
    }
}

/// `F_t(Ω)` with the flow diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Deformed {
    pub shape: Shape,
    pub t: f64,
    pub lipschitz: f64,
    /// `|t|·Lip(V) ≥ 1`.
    pub warning: bool,
    /// Vertices added by edge subdivision.
    pub inserted: usize,
}

pub fn lipschitz_bound(omega: &Shape, v: &VectorField) -> Result<f64> {
    if v.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: v.dim(),
        });
    }
    let (lo, hi) = omega.hold_all()?;
    Ok(v.lipschitz_estimate(&lo, &hi, LIPSCHITZ_GRID))
}

pub fn deform(omega: &Shape, v: &VectorField, t: f64) -> Result<Deformed> {
    let lip = lipschitz_bound(omega, v)?;
    deform_with(omega, &flow_map(v, t, lip))
}

/// Deformation under an already-built flow map.
pub fn deform_with(omega: &Shape, f: &FlowMap) -> Result<Deformed> {
    let (shape, inserted) = match omega {
        Shape::Polygon(p) => {
            let (q, k) = deform_polygon(p, f)?;
            (Shape::Polygon(q), k)
        }
        Shape::Intervals(r) => (Shape::Intervals(deform_intervals(r, f)?), 0),
    };
    Ok(Deformed {
        shape,
        t: f.t,
        lipschitz: f.lipschitz,
        warning: f.warning,
        inserted,
    })
}

fn apply2(f: &FlowMap, p: Point) -> Point {
    let q = f.apply(&p);
    [q[0], q[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// The image of segment `[a, b]` is straight to rounding at its midpoint and
/// quarter points.
fn image_is_straight(f: &FlowMap, a: Point, b: Point, fa: Point, fb: Point) -> bool {
    let scale = fa[0].abs().max(fa[1].abs()).max(fb[0].abs()).max(fb[1].abs()).max(1.0);
    [0.25, 0.5, 0.75]
        .iter()
        .all(|&s| dist(apply2(f, lerp(a, b, s)), lerp(fa, fb, s)) <= 1e-12 * scale)
}

fn push_edge(f: &FlowMap, max_edge: f64, a: Point, b: Point, fa: Point, fb: Point, depth: u32, out: &mut Vec<Point>) {
    if depth < MAX_SPLIT_DEPTH && dist(fa, fb) > max_edge && !image_is_straight(f, a, b, fa, fb) {
        let m = lerp(a, b, 0.5);
        let fm = apply2(f, m);
        push_edge(f, max_edge, a, m, fa, fm, depth + 1, out);
        push_edge(f, max_edge, m, b, fm, fb, depth + 1, out);
    } else {
        out.push(fa);
    }
}

fn deform_polygon(p: &Polygon, f: &FlowMap) -> Result<(Polygon, usize)> {
    if f.field.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: f.field.dim(),
        });
    }
    if f.t == 0.0 {
        return Ok((p.clone(), 0));
    }
    let images: Vec<Point> = p.vertices().iter().map(|&x| apply2(f, x)).collect();
    let n = images.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        push_edge(f, p.max_edge(), p.vertices()[i], p.vertices()[j], images[i], images[j], 0, &mut out);
    }
    let inserted = out.len() - n;
    let q = Polygon::new(out)?.with_max_edge(p.max_edge())?;
    Ok((q, inserted))
}

fn deform_intervals(r: &RegionSet, f: &FlowMap) -> Result<RegionSet> {
    if f.field.dim() != 1 || r.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.field.dim().max(r.dim()),
        });
    }
    if f.t == 0.0 {
        return Ok(r.clone());
    }
    let mut boxes = Vec::with_capacity(r.boxes().len());
    let mut prev = f64::NEG_INFINITY;
    for b in r.boxes() {
        let s = b.side(0);
        let lo = f.apply(&[s.lo()])[0];
        let hi = f.apply(&[s.hi()])[0];
        // canonical boxes are sorted; the image order must be kept
        if hi < lo || lo < prev {
            return Err(Error::Invalid(format!(
                "flow at t = {:?} does not preserve the order of [{:?}, {:?}]",
                f.t,
                s.lo(),
                s.hi()
            )));
        }
        prev = hi;
        boxes.push(AxisBox::new(vec![Interval::new(lo, hi, s.lo_open(), s.hi_open())?])?);
    }
    RegionSet::from_boxes(boxes, 1)
}

/// Shape functional `J`.
#[derive(Clone, Debug)]
pub enum ShapeFunctional {
    Volume,
    Perimeter,
    /// `∫_Ω f`.
    Integral(Integrand),
}

/// Scalar integrand `f: ℝ^d → ℝ`.
#[derive(Clone, Debug)]
pub struct Integrand {
    source: String,
    field: VectorField,
}

impl Integrand {
    /// Expression in `x, y` (or `x1, x2`).
    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        let mut comps = vec!["0"; dim];
        comps[0] = src;
        Ok(Integrand {
            source: src.to_string(),
            field: VectorField::from_exprs(&comps)?,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.field.eval(x)[0]
    }
}

impl ShapeFunctional {
    pub fn integral(src: &str, dim: usize) -> Result<Self> {
        Ok(ShapeFunctional::Integral(Integrand::parse(src, dim)?))
    }

    pub fn label(&self) -> String {
        match self {
            ShapeFunctional::Volume => "volume".into(),
            ShapeFunctional::Perimeter => "perimeter".into(),
            ShapeFunctional::Integral(f) => format!("integral:{}", f.source()),
        }
    }

    /// `volume`, `perimeter`, or `integral:<expr>`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        match s.trim() {
            "volume" => Ok(ShapeFunctional::Volume),
            "perimeter" => Ok(ShapeFunctional::Perimeter),
            other => match other.strip_prefix("integral:") {
                Some(src) => ShapeFunctional::integral(src, dim),
                None => Err(Error::Invalid(format!(
                    "unknown functional '{other}' (expected volume, perimeter, integral:<expr>)"
                ))),
            },
        }
    }

    pub fn evaluate(&self, omega: &Shape) -> Result<f64> {
        match omega {
            Shape::Polygon(p) => Ok(self.evaluate_polygon(p)),
            Shape::Intervals(r) => self.evaluate_intervals(r),
        }
    }

    pub fn evaluate_polygon(&self, p: &Polygon) -> f64 {
        match self {
            ShapeFunctional::Volume => p.area(),
            ShapeFunctional::Perimeter => p.perimeter(),
            ShapeFunctional::Integral(f) => polygon_integral(p, |x| f.eval(&x)),
        }
    }

    pub fn evaluate_intervals(&self, r: &RegionSet) -> Result<f64> {
        match self {
            ShapeFunctional::Volume => r.volume(),
            ShapeFunctional::Perimeter => r.perimeter(),
            ShapeFunctional::Integral(f) => {
                if !r.is_bounded() {
                    return Err(Error::Unbounded("integral over an unbounded interval set".into()));
                }
                let mut total = 0.0;
                for b in r.boxes() {
                    let s = b.side(0);
                    if s.lo() < s.hi() {
                        total += integrate_with_breaks(|x| f.eval(&[x]), s.lo(), s.hi(), &[], 1e-12)?.value;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Edge-midpoint rule on a triangle; exact for quadratics.
fn triangle_rule<F: Fn(Point) -> f64>(f: &F, a: Point, b: Point, c: Point) -> f64 {
    let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    area * (f(lerp(a, b, 0.5)) + f(lerp(b, c, 0.5)) + f(lerp(c, a, 0.5))) / 3.0
}

fn triangle_adaptive<F: Fn(Point) -> f64>(f: &F, a: Point, b: Point, c: Point, coarse: f64, tol: f64, depth: u32) -> f64 {
    let (ab, bc, ca) = (lerp(a, b, 0.5), lerp(b, c, 0.5), lerp(c, a, 0.5));
    let kids = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (bc, ca, ab)];
    let vals: Vec<f64> = kids.iter().map(|&(p, q, r)| triangle_rule(f, p, q, r)).collect();
    let fine: f64 = vals.iter().sum();
    if depth >= TRIANGLE_DEPTH || (fine - coarse).abs() <= tol {
        return fine;
    }
    kids.iter()
        .zip(&vals)
        .map(|(&(p, q, r), &v)| triangle_adaptive(f, p, q, r, v, 0.25 * tol, depth + 1))
        .sum()
}

/// `∫_Ω f` by a signed fan from vertex 0, which covers any simple polygon
/// with winding number one.
pub fn polygon_integral<F: Fn(Point) -> f64>(p: &Polygon, f: F) -> f64 {
    let v = p.vertices();
    let tol = 1e-12 * p.area().max(1e-300);
    let mut total = 0.0;
    for i in 1..v.len() - 1 {
        let coarse = triangle_rule(&f, v[0], v[i], v[i + 1]);
        total += triangle_adaptive(&f, v[0], v[i], v[i + 1], coarse, tol, 0);
    }
    total
}

/// `D_V J(Ω) = lim_{t→0⁺} (J(Ω_t) − J(Ω))/t`; `two_sided` uses the central
/// quotient instead.
pub fn eulerian_derivative(
    j: &ShapeFunctional,
    omega: &Shape,
    v: &VectorField,
    sched: &DiffSchedule,
    two_sided: bool,
) -> Result<EulerianReport> {
    let lip = lipschitz_bound(omega, v)?;
    let side = if two_sided { Side::Central } else { Side::Right };
    let g = |t: f64| {
        let d = deform_with(omega, &flow_map(v, t, lip))?;
        j.evaluate(&d.shape)
    };
    let values: Vec<(f64, f64)> = std::iter::once(0.0)
        .chain(sched.extrapolation_steps())
        .map(|t| g(t).map(|y| (t, y)))
        .collect::<Result<_>>()?;
    let report = scalar_diff(g, side, sched)?;
    let mut flags = report.flags.clone();
    if sched.t_max() * lip >= 1.0 {
        flags.push("injectivity_bound_exceeded".into());
    }
    Ok(EulerianReport {
        functional: j.label(),
        field: v.label().to_string(),
        estimate: report.estimate,
        error_estimate: report.error_estimate,
        lipschitz: lip,
        values,
        flags,
        diff: report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerianReport {
    pub functional: String,
    pub field: String,
    pub estimate: f64,
    pub error_estimate: f64,
    pub lipschitz: f64,
    /// `(t, J(Ω_t))` at `t = 0` and the extrapolation steps.
    pub values: Vec<(f64, f64)>,
    pub flags: Vec<String>,
    pub diff: DiffReport,
}

impl EulerianReport {
    /// `t J` lines for plotting.
    pub fn to_xy(&self) -> String {
        self.values.iter().map(|(t, y)| format!("{t:?} {y:?}\n")).collect()
    }
}

/// `∫_∂Ω V·n` by the edge-midpoint rule, `n` the outward normal of the
/// counterclockwise boundary.
pub fn hadamard_boundary_integral(omega: &Polygon, v: &VectorField) -> Result<f64> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: v.dim() });
    }
    Ok(omega
        .edges()
        .map(|(a, b)| {
            let m = v.eval(&lerp(a, b, 0.5));
            // (dy, −dx) is |e|·n
            m[0] * (b[1] - a[1]) - m[1] * (b[0] - a[0])
        })
        .sum())
}

/// 1-D counterpart: `Σ ±V` over the finite endpoints.
pub fn hadamard_endpoint_sum(omega: &RegionSet, v: &VectorField) -> Result<f64> {
    if v.dim() != 1 || omega.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: v.dim().max(omega.dim()),
        });
    }
    Ok(omega
        .boxes()
        .iter()
        .map(|b| {
            let s = b.side(0);
            let hi = if s.hi().is_finite() { v.eval(&[s.hi()])[0] } else { 0.0 };
            let lo = if s.lo().is_finite() { v.eval(&[s.lo()])[0] } else { 0.0 };
            hi - lo
        })
        .sum())
}
