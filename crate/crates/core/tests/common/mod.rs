//! Oracles and generators shared by the property suites and the acceptance target.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use setcalc::setrep::json::region_to_json;
use setcalc::svmap::{lsc_check, pushforward, PointMap, ParamDomain, SetPlot, DEFAULT_PROBE_DEPTH};
use setcalc::{AxisBox, Interval, RegionSet, SampledSet};

/// One side of a generated box: endpoints in quarter units and open flags.
pub type SideSpec = (i8, i8, bool, bool);
pub type BoxSpec = [SideSpec; 2];

pub const UNIVERSE: f64 = 2.5;

fn side(s: SideSpec) -> Interval {
    let (p, q, lo_open, hi_open) = s;
    let (lo, hi) = (p.min(q) as f64 / 4.0, p.max(q) as f64 / 4.0);
    if lo == hi {
        Interval::point(lo).unwrap()
    } else {
        Interval::new(lo, hi, lo_open, hi_open).unwrap()
    }
}

pub fn universe() -> AxisBox {
    AxisBox::closed(&[(-UNIVERSE, UNIVERSE), (-UNIVERSE, UNIVERSE)]).unwrap()
}

pub fn region(spec: &[BoxSpec]) -> RegionSet {
    let boxes = spec
        .iter()
        .map(|b| AxisBox::new(vec![side(b[0]), side(b[1])]).unwrap())
        .collect();
    RegionSet::from_boxes(boxes, 2).unwrap().with_universe(universe()).unwrap()
}

pub fn random_spec<R: Rng>(rng: &mut R) -> Vec<BoxSpec> {
    let n = rng.gen_range(0..=3);
    (0..n)
        .map(|_| {
            let mut s = || (rng.gen_range(-8..=8), rng.gen_range(-8..=8), rng.gen(), rng.gen());
            [s(), s()]
        })
        .collect()
}

/// 100 × 100 membership grid; every quarter-unit endpoint in `[-2, 2]` is a node.
pub fn oracle_grid() -> Vec<[f64; 2]> {
    let axis: Vec<f64> = (0..100).map(|k| (k as f64 - 50.0) / 20.0).collect();
    axis.iter().flat_map(|&x| axis.iter().map(move |&y| [x, y])).collect()
}

fn show(a: &RegionSet) -> String {
    region_to_json(a).to_string()
}

/// Pointwise and structural Boolean laws for one triple, volume inclusion–exclusion within 1e-12.
pub fn boolean_laws(a: &RegionSet, b: &RegionSet, c: &RegionSet, grid: &[[f64; 2]]) -> Result<(), String> {
    let union = a.union(b).unwrap();
    let inter = a.intersect(b).unwrap();
    let diff = a.difference(b).unwrap();
    let sym = a.symm_diff(b).unwrap();
    let comp = a.complement().unwrap();
    for p in grid {
        let (x, y) = (a.contains(p).unwrap(), b.contains(p).unwrap());
        let got = [
            union.contains(p).unwrap(),
            inter.contains(p).unwrap(),
            diff.contains(p).unwrap(),
            sym.contains(p).unwrap(),
            comp.contains(p).unwrap(),
        ];
        if got != [x || y, x && y, x && !y, x != y, !x] {
            return Err(format!("membership mismatch at {p:?} for A={} B={}", show(a), show(b)));
        }
    }
    let eq = |name: &str, l: RegionSet, r: RegionSet| {
        if l == r {
            Ok(())
        } else {
            Err(format!("{name} fails for A={} B={} C={}", show(a), show(b), show(c)))
        }
    };
    let (ac, bc) = (a.complement().unwrap(), b.complement().unwrap());
    eq("De Morgan (union)", union.complement().unwrap(), ac.intersect(&bc).unwrap())?;
    eq("De Morgan (intersection)", inter.complement().unwrap(), ac.union(&bc).unwrap())?;
    eq(
        "distributivity of ∩ over ∪",
        a.intersect(&b.union(c).unwrap()).unwrap(),
        inter.union(&a.intersect(c).unwrap()).unwrap(),
    )?;
    eq(
        "distributivity of ∪ over ∩",
        a.union(&b.intersect(c).unwrap()).unwrap(),
        union.intersect(&a.union(c).unwrap()).unwrap(),
    )?;
    eq("AΔB = (A∖B)∪(B∖A)", sym.clone(), diff.union(&b.difference(a).unwrap()).unwrap())?;
    eq("AΔB = (A∪B)∖(A∩B)", sym.clone(), union.difference(&inter).unwrap())?;
    eq("(AΔB)ΔB = A", sym.symm_diff(b).unwrap(), a.clone())?;
    if !a.symm_diff(a).unwrap().is_empty() {
        return Err(format!("AΔA is not empty for A={}", show(a)));
    }
    let gap = union.volume().unwrap() + inter.volume().unwrap() - a.volume().unwrap() - b.volume().unwrap();
    if gap.abs() > 1e-12 {
        return Err(format!("inclusion–exclusion off by {gap:e}"));
    }
    Ok(())
}

/// Catalog of smooth point maps `R² → R²` used for functor laws.
pub fn point_map(k: usize) -> PointMap {
    match k % 5 {
        0 => Arc::new(|p: &[f64]| vec![p[0] + 0.5 * p[1], p[1] - 0.25]),
        1 => Arc::new(|p: &[f64]| vec![p[0].sin(), p[0] * p[1]]),
        2 => Arc::new(|p: &[f64]| vec![p[1], p[0]]),
        3 => Arc::new(|p: &[f64]| vec![p[0] * p[0] - p[1], (0.3 * p[1]).exp()]),
        _ => Arc::new(|p: &[f64]| vec![p[0].cos() + p[1], p[1].tanh()]),
    }
}

pub fn random_sampled<R: Rng>(rng: &mut R) -> SampledSet {
    let n = rng.gen_range(1..=40);
    let pts = (0..n).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
    SampledSet::new(pts, 0.05).unwrap()
}

/// Identity, composition and union preservation of the pushforward, compared exactly as point sets.
pub fn functor_laws(a: &SampledSet, b: &SampledSet, f: &PointMap, g: &PointMap) -> Result<(), String> {
    let id: PointMap = Arc::new(|p: &[f64]| p.to_vec());
    if !pushforward(&id, a).unwrap().same_points(a) {
        return Err("identity law fails".into());
    }
    let (f2, g2) = (f.clone(), g.clone());
    let gf: PointMap = Arc::new(move |p: &[f64]| g2(&f2(p)));
    let lhs = pushforward(&gf, a).unwrap();
    let rhs = pushforward(g, &pushforward(f, a).unwrap()).unwrap();
    if !lhs.same_points(&rhs) {
        return Err("composition law fails".into());
    }
    let ab = a.union(b).unwrap();
    let lhs = pushforward(f, &ab).unwrap();
    let rhs = pushforward(f, a).unwrap().union(&pushforward(f, b).unwrap()).unwrap();
    if !lhs.same_points(&rhs) {
        return Err("union preservation fails".into());
    }
    Ok(())
}

/// Smooth scalar selections `r ↦ s(r)` with coefficient `c`.
pub fn selection(k: usize, c: f64) -> PointMap {
    match k % 4 {
        0 => Arc::new(move |r: &[f64]| vec![c * r[0]]),
        1 => Arc::new(move |r: &[f64]| vec![(c * r[0]).sin()]),
        2 => Arc::new(move |r: &[f64]| vec![c + r[0] * r[0]]),
        _ => Arc::new(move |r: &[f64]| vec![(r[0] - c).tanh()]),
    }
}

/// The union of selection graphs passes the lower-semicontinuity check
/// against every open box in `opens`.
pub fn selection_union_passes(maps: Vec<PointMap>, opens: &[AxisBox]) -> Result<(), String> {
    let d = ParamDomain::interval(-1.0, 1.0, 40).unwrap();
    let phi = SetPlot::union_of_selections(d, 1, maps);
    let rep = lsc_check(&phi, opens, DEFAULT_PROBE_DEPTH).unwrap();
    if rep.passed() {
        Ok(())
    } else {
        Err(format!("{} violation(s), first at r = {:?}", rep.violations.len(), rep.violations[0].r))
    }
}

/// `φ(r) = {0, 1}` for `r ≤ 0`, `{0}` for `r > 0`.
pub fn step_map() -> SetPlot {
    let d = ParamDomain::interval(-1.0, 1.0, 40).unwrap();
    SetPlot::new(
        d,
        1,
        Arc::new(|r| {
            if r[0] <= 0.0 {
                RegionSet::from_boxes(vec![AxisBox::point(&[0.0]).unwrap(), AxisBox::point(&[1.0]).unwrap()], 1)
                    .unwrap()
            } else {
                RegionSet::point(&[0.0]).unwrap()
            }
        }),
    )
}

/// Star-shaped counterclockwise polygon with `n` vertices around `center`.
pub fn star_polygon<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let phase: f64 = rng.gen_range(0.0..1.0);
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * (k as f64 + phase * 0.5) / n as f64;
            let r = rng.gen_range(0.5..1.5);
            [c[0] + r * a.cos(), c[1] + r * a.sin()]
        })
        .collect()
}
