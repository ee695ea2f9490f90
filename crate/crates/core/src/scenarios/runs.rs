use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sweep, Provenance, Recorder, ScenarioConfig, Verdict};
use crate::error::Result;
use crate::expr::Expr;
use crate::measure::{ev, std_normal_pdf, MeasureModel, TestFunction};
use crate::setrep::{AxisBox, Interval, RegionSet};
use crate::shape::{
    deform, eulerian_derivative, hadamard_boundary_integral, Polygon, Shape, ShapeFunctional, VectorField,
};
use crate::svdiff::{adherence_derivative, fomin_derivative, scalar_diff, Path, PathFamily, Side};
use crate::svmap::{interval_map, select, ParamDomain, Strategy};

fn quoted(s: &str) -> Provenance {
    Provenance::Quoted(s.into())
}

fn computed(s: &str) -> Provenance {
    Provenance::Computed(s.into())
}

pub fn run_traveling_interval(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("traveling-interval", cfg);
    let c = |t: f64| RegionSet::intervals(&[(t - 1.0, t + 1.0)]);
    let ts = sweep(-2.0, 2.0, cfg.grid);
    let (mut inside, mut inside_ok, mut outside, mut outside_ok) = (0usize, 0usize, 0usize, 0usize);
    let mut lengths = Vec::with_capacity(ts.len());
    for &t in &ts {
        let gamma = c(t)?.intersect(&c(-t)?)?;
        lengths.push((t, if gamma.is_empty() { 0.0 } else { gamma.volume()? }));
        if t.abs() <= 1.0 {
            inside += 1;
            let expect = RegionSet::intervals(&[(t.abs() - 1.0, 1.0 - t.abs())])?;
            inside_ok += usize::from(gamma == expect);
        } else {
            outside += 1;
            outside_ok += usize::from(gamma.is_empty());
        }
    }
    rec.holds(
        format!("γ(t) = [|t| − 1, 1 − |t|] exactly at all {inside} grid points with |t| ≤ 1"),
        Provenance::Computed("interval intersection arithmetic".into()),
        inside_ok == inside,
    );
    rec.holds(
        format!("γ(t) = ∅ at all {outside} grid points with |t| > 1"),
        quoted("γ(t) = ∅ if t ∉ [−1,1]"),
        outside_ok == outside,
    );
    let g0 = c(0.0)?.intersect(&c(0.0)?)?;
    rec.holds("γ(0) = [−1, 1]", quoted("c(0) ∩ c(0) = c(0)"), g0 == RegionSet::intervals(&[(-1.0, 1.0)])?);
    let g2 = c(2.0)?.intersect(&c(-2.0)?)?;
    rec.holds("γ(2) = ∅", quoted("γ(t) = ∅ if t ∉ [−1,1]"), g2.is_empty());
    let gh = c(0.5)?.intersect(&c(-0.5)?)?;
    rec.holds("γ(0.5) = [−0.5, 0.5]", computed("interval intersection arithmetic"), gh == RegionSet::intervals(&[(-0.5, 0.5)])?);
    rec.measure("points_inside", inside as f64);
    rec.measure("points_outside", outside as f64);
    rec.series("length", "t", "length", lengths);
    Ok(rec.finish(format!(
        "Intersected c(t) = [t − 1, t + 1] with c(−t) on {} points of [−2, 2]: \
         {inside_ok}/{inside} matched [|t| − 1, 1 − |t|] and {outside_ok}/{outside} were empty.",
        ts.len()
    )))
}

/// `P₁(t) ∪ P₂(t) = (−∞, t + ½) ∪ (½ − t, ∞)`.
fn mollifier_union_set(t: f64) -> Result<RegionSet> {
    let p1 = RegionSet::from_box(AxisBox::new(vec![Interval::new(f64::NEG_INFINITY, t + 0.5, true, true)?])?);
    let p2 = RegionSet::from_box(AxisBox::new(vec![Interval::new(0.5 - t, f64::INFINITY, true, true)?])?);
    p1.union(&p2)
}

pub fn run_mollifier_union(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("mollifier-union", cfg);
    let f = TestFunction::mollifier(0.0, 1.0)?;
    let g = |t: f64| ev(&f, &mollifier_union_set(t)?);
    let ts = sweep(-0.2, 0.2, cfg.grid);
    let values: Vec<(f64, f64)> = ts.iter().map(|&t| g(t).map(|v| (t, v))).collect::<Result<_>>()?;
    let worst = values
        .iter()
        .filter(|(t, _)| *t > 0.0)
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    rec.near(
        "g(t) = ev_f(ℝ) = 1 for every grid t > 0, within 1e-8",
        quoted("if t>0, ev_f(P₁(t)∪P₂(t)) = ev_f(ℝ)=1"),
        worst,
        0.0,
        1e-8,
    );
    let g01 = g(0.1)?;
    rec.near("g(0.1) = 1 within 1e-8", quoted("ev_f(ℝ)=1"), g01, 1.0, 1e-8);

    let right = scalar_diff(g, Side::Right, &cfg.schedule)?;
    let left = scalar_diff(g, Side::Left, &cfg.schedule)?;
    let f_half = f.eval(0.5);
    rec.near(
        "right derivative of g at 0 is 0 within 1e-6",
        Provenance::Immediate,
        right.estimate,
        0.0,
        1e-6,
    );
    rec.at_least(
        "left derivative of g at 0 is at least f(0.5) > 0",
        computed("f(0.5) = exp(−4/3)/Z with Z the quadrature normalization of the bump"),
        left.estimate,
        f_half,
    );
    rec.holds("f(0.5) > 0", Provenance::Immediate, f_half > 0.0);
    rec.measure("f(0.5)", f_half);
    rec.measure("right_derivative", right.estimate);
    rec.measure("left_derivative", left.estimate);
    rec.measure("left_derivative/f(0.5)", left.estimate / f_half);
    rec.measure("left_error_estimate", left.error_estimate);
    rec.series("g", "t", "ev_f", values);
    Ok(rec.finish(format!(
        "g(t) = ev_f(P₁(t) ∪ P₂(t)) is 1 for t > 0 (max deviation {worst:.3e}) and drops for t < 0. \
         The right derivative at 0 is {:.3e}; the left derivative is {:.12} = {:.6}·f(0.5), \
         so the union is not differentiable at t = 0. The measured ratio is reported, not adjudicated.",
        right.estimate,
        left.estimate,
        left.estimate / f_half
    )))
}

pub fn run_singleton_intersection(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("singleton-intersection", cfg);
    let meet = |t: f64| RegionSet::point(&[t])?.intersect(&RegionSet::point(&[-t])?);
    let ts = sweep(-1.0, 1.0, cfg.grid);
    let mut indicator = Vec::with_capacity(ts.len());
    let (mut nonzero, mut empty_ok) = (0usize, 0usize);
    for &t in &ts {
        let m = meet(t)?;
        indicator.push((t, if m.is_empty() { 1.0 } else { 0.0 }));
        if t != 0.0 {
            nonzero += 1;
            empty_ok += usize::from(m.is_empty());
        }
    }
    rec.holds(
        format!("{{t}} ∩ {{−t}} = ∅ at all {nonzero} nonzero grid points"),
        quoted("∅ if t ≠ 0"),
        empty_ok == nonzero,
    );
    rec.holds("{0} ∩ {0} = {0}", quoted("{0} if t = 0"), meet(0.0)? == RegionSet::point(&[0.0])?);
    rec.holds("{1e-6} ∩ {−1e-6} = ∅", quoted("∅ if t ≠ 0"), meet(1e-6)?.is_empty());
    rec.measure("nonzero_points", nonzero as f64);
    rec.series("is_empty", "t", "is_empty", indicator);
    Ok(rec.finish(format!(
        "P₁(t) ∩ P₂(t) with P₁(t) = {{t}}, P₂(t) = {{−t}} is {{0}} at t = 0 and empty at the other \
         {nonzero} grid points. The nonempty value at 0 is isolated, so t ↦ P₁(t) ∩ P₂(t) jumps \
         there although both arguments move smoothly."
    )))
}

fn multideriv_phi(p: &Vec<f64>) -> Result<f64> {
    // xy/|y| written as x·(y/|y|) so that each quotient is exactly ±1 or 0
    Ok(if p[1] == 0.0 { 0.0 } else { p[0] * (p[1] / p[1].abs()) })
}

pub fn run_multideriv_family(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("multideriv-family", cfg);
    let paths = [-2i32, -1, 0, 1, 2]
        .iter()
        .map(|&a| {
            let alpha = a as f64;
            Path::with_base(format!("alpha={a}"), vec![0.0, 0.0], Arc::new(move |t| vec![t, alpha * t * t]))
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = PathFamily::new("c_alpha", paths)?;
    let r = adherence_derivative(multideriv_phi, &fam, &cfg.schedule)?;
    let values = r.values();
    rec.holds(
        "clusters are exactly {−1, 0, 1}",
        quoted("D_{0,c_α}Φ ∈ {−1,0,1} depending on the value of α"),
        values == vec![-1.0, 0.0, 1.0],
    );
    rec.near("cluster radius ≤ 1e-9", Provenance::Immediate, r.max_radius(), 0.0, 1e-9);
    rec.holds("no path diverges", Provenance::Immediate, r.divergent_paths().is_empty());
    for p in &r.paths {
        rec.measure(format!("{}.cluster", p.label), p.clusters.first().map_or(f64::NAN, |c| c.value));
        rec.series(
            &format!("quotients_{}", p.label),
            "t",
            "quotient",
            p.steps.iter().copied().zip(p.quotients.iter().copied()).collect(),
        );
    }
    rec.measure("max_radius", r.max_radius());
    Ok(rec.finish(format!(
        "Along c_α(t) = (t, αt²) the quotients of Φ(x, y) = xy/|y| are constant: sign(α) for α ≠ 0 \
         and 0 for α = 0. The adherence set over the family is {values:?}."
    )))
}

pub fn run_disk_dilation(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("disk-dilation", cfg);
    let two_pi = 2.0 * std::f64::consts::PI;
    let disk = Polygon::regular(cfg.sides, [0.0, 0.0], 1.0)?;
    let omega = Shape::Polygon(disk.clone());
    let v = VectorField::radial(2);
    let vol = eulerian_derivative(&ShapeFunctional::Volume, &omega, &v, &cfg.schedule, false)?;
    let per = eulerian_derivative(&ShapeFunctional::Perimeter, &omega, &v, &cfg.schedule, false)?;
    let hadamard = hadamard_boundary_integral(&disk, &v)?;
    let dilation = computed("Vol(Ω_t) = π(1 + t)², Per(Ω_t) = 2π(1 + t) for the dilated unit disk");
    rec.near(
        "D_V Vol within 1% of 2π",
        dilation.clone(),
        vol.estimate,
        two_pi,
        0.01 * two_pi,
    );
    rec.near("D_V Per within 1% of 2π", dilation, per.estimate, two_pi, 0.01 * two_pi);
    rec.near(
        "D_V Vol within 0.5% of the boundary integral ∫ V·n",
        computed("edge-midpoint quadrature of ∫_∂Ω V·n"),
        vol.estimate,
        hadamard,
        0.005 * hadamard.abs(),
    );
    let ts = sweep(0.0, cfg.schedule.t_max(), cfg.grid);
    let mut vols = Vec::with_capacity(ts.len());
    let mut pers = Vec::with_capacity(ts.len());
    for &t in &ts {
        let d = deform(&omega, &v, t)?;
        vols.push((t, ShapeFunctional::Volume.evaluate(&d.shape)?));
        pers.push((t, ShapeFunctional::Perimeter.evaluate(&d.shape)?));
    }
    rec.measure("volume_derivative", vol.estimate);
    rec.measure("volume_error_estimate", vol.error_estimate);
    rec.measure("perimeter_derivative", per.estimate);
    rec.measure("perimeter_error_estimate", per.error_estimate);
    rec.measure("hadamard", hadamard);
    rec.measure("polygon_area", disk.area());
    rec.series("volume", "t", "volume", vols);
    rec.series("perimeter", "t", "perimeter", pers);
    Ok(rec.finish(format!(
        "On the {}-gon inscribed in the unit circle, dilation F_t(x) = (1 + t)x gives D_V Vol = {:.9} \
         and D_V Per = {:.9} against 2π = {two_pi:.9}; the boundary integral is {hadamard:.9}.",
        cfg.sides, vol.estimate, per.estimate
    )))
}

/// `pdf(0) − pdf(−1)`, evaluated independently to 21 digits.
pub(crate) const GAUSSIAN_UNIT_GAP: f64 = 0.156_971_555_882_289_34;

pub fn run_gaussian_fomin(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("gaussian-fomin", cfg);
    let a = RegionSet::intervals(&[(-1.0, 0.0)])?;
    let g = fomin_derivative(&MeasureModel::gaussian(1), &a, &[1.0], &cfg.schedule)?;
    rec.near(
        "Fomin derivative matches pdf(0) − pdf(−1) within 1e-4",
        computed("pdf(0) − pdf(−1) = (1 − e^{−1/2})/√(2π), evaluated in 40-digit arithmetic"),
        g.estimate,
        GAUSSIAN_UNIT_GAP,
        1e-4,
    );
    rec.near(
        "antisymmetry residual |D_{A,v} + D_{A,−v}| ≤ 1e-6",
        Provenance::Immediate,
        g.antisymmetry_residual,
        0.0,
        1e-6,
    );
    let leb = fomin_derivative(&MeasureModel::lebesgue(1), &a, &[1.0], &cfg.schedule)?;
    rec.near(
        "Lebesgue measure is translation invariant: derivative 0 within 1e-10",
        Provenance::Immediate,
        leb.estimate,
        0.0,
        1e-10,
    );
    let oracle = std_normal_pdf(0.0) - std_normal_pdf(-1.0);
    rec.measure("estimate", g.estimate);
    rec.measure("error_estimate", g.error_estimate);
    rec.measure("d_plus", g.d_plus);
    rec.measure("d_minus", g.d_minus);
    rec.measure("antisymmetry_residual", g.antisymmetry_residual);
    rec.measure("closed_form_in_f64", oracle);
    rec.measure("lebesgue_estimate", leb.estimate);
    let ts = sweep(-cfg.schedule.t_max(), cfg.schedule.t_max(), cfg.grid);
    let mu = MeasureModel::gaussian(1);
    let masses = ts
        .iter()
        .map(|&t| Ok((t, mu.mu(&a.translate(&[1.0], t)?)?)))
        .collect::<Result<Vec<_>>>()?;
    rec.series("mass", "t", "mu", masses);
    Ok(rec.finish(format!(
        "μ([−1, 0] + t) for the standard Gaussian has derivative {:.12} at t = 0 against \
         pdf(0) − pdf(−1) = {GAUSSIAN_UNIT_GAP:.12}; one-sided derivatives {:.12} and {:.12} sum to {:.3e}.",
        g.estimate, g.d_plus, g.d_minus, g.antisymmetry_residual
    )))
}

fn fmt_coef(c: f64) -> String {
    format!("({c:?})")
}

/// A random pair of catalog expressions in `r`.
fn random_pair(rng: &mut ChaCha8Rng) -> (String, String) {
    let a = fmt_coef(rng.gen_range(-2.0..2.0));
    let b = fmt_coef(rng.gen_range(-1.5..1.5));
    let c = fmt_coef(rng.gen_range(0.5..3.0));
    let d = fmt_coef(rng.gen_range(-1.0..1.0));
    let w = fmt_coef(rng.gen_range(0.0..2.0));
    let e = fmt_coef(rng.gen_range(0.5..2.5));
    let f = match rng.gen_range(0..3) {
        0 => format!("{a} + {b}*sin({c}*r + {d})"),
        1 => format!("{a} + {b}*r^2 + {d}*r"),
        _ => format!("{a}*exp({d}*r) + {b}*cos({c}*r)"),
    };
    let g = match rng.gen_range(0..3) {
        0 => format!("{f} + {w}*(1 + cos({e}*r)^2)"),
        1 => format!("{b}*sin({e}*r) + {w}*r"),
        _ => format!("{f} - {w}*abs(sin({e}*r))"),
    };
    (f, g)
}

pub fn run_interval_selection(cfg: &ScenarioConfig) -> Result<Verdict> {
    let mut rec = Recorder::new("interval-selection", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_steps = cfg.grid - 1;
    let (mut residual_ok, mut anchor_ok) = (0usize, 0usize);
    let mut worst_residual: f64 = 0.0;
    let mut nodes = 0usize;
    let mut first_failure: Option<String> = None;
    let mut per_instance = Vec::with_capacity(cfg.instances);
    for i in 0..cfg.instances {
        let (fs, gs) = random_pair(&mut rng);
        let fe = Arc::new(Expr::parse(&fs, &["r"])?);
        let ge = Arc::new(Expr::parse(&gs, &["r"])?);
        let domain = ParamDomain::interval(-1.0, 1.0, n_steps)?;
        let phi = interval_map(
            domain,
            Arc::new(move |r: &[f64]| fe.eval(r)),
            Arc::new(move |r: &[f64]| ge.eval(r)),
        );
        let r0 = rng.gen_range(-1.0..1.0);
        let value = phi.eval(&[r0]);
        let side = *value.boxes()[0].side(0);
        let u: f64 = rng.gen_range(0.0..=1.0);
        let x0 = (side.lo() + u * (side.hi() - side.lo())).clamp(side.lo(), side.hi());
        let s = select(&phi, &[r0], &[x0], Strategy::Convex)?;
        nodes += s.samples.len();
        worst_residual = worst_residual.max(s.residual);
        per_instance.push((i as f64, s.residual));
        let res = s.residual == 0.0;
        let anc = s.anchor_satisfied();
        residual_ok += usize::from(res);
        anchor_ok += usize::from(anc);
        if (!res || !anc) && first_failure.is_none() {
            first_failure = Some(format!("instance {i}: f = {fs}, g = {gs}, r0 = {r0:?}, x0 = {x0:?}"));
        }
    }
    let n = cfg.instances;
    rec.holds(
        format!("membership residual is exactly 0 at every grid point for all {n} instances"),
        quoted("σ(r)=(t₀)f∘P(r)+(1−t₀)g∘P(r)"),
        residual_ok == n,
    );
    rec.holds(
        format!("σ(r₀) = x₀ exactly for all {n} instances"),
        Provenance::Immediate,
        anchor_ok == n,
    );
    rec.measure("instances", n as f64);
    rec.measure("samples", nodes as f64);
    rec.measure("max_residual", worst_residual);
    rec.series("residual", "instance", "max_residual", per_instance);
    let mut narrative = format!(
        "Built {n} random interval maps r ↦ [f(r), g(r)] on [−1, 1] from catalog expressions and \
         anchored a convex selection at a random (r₀, x₀): {residual_ok}/{n} had zero residual and \
         {anchor_ok}/{n} reproduced the anchor exactly."
    );
    if let Some(f) = first_failure {
        narrative.push_str(&format!(" First failing {f}."));
    }
    Ok(rec.finish(narrative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_passes_with_defaults() {
        let cfg = ScenarioConfig::default();
        for v in super::super::run_all(&cfg).unwrap() {
            assert!(v.passed, "{}: {:?} {}", v.scenario, v.violated, v.narrative);
            assert!(!v.series.is_empty(), "{}", v.scenario);
        }
    }

    #[test]
    fn verdicts_are_reproducible() {
        let cfg = ScenarioConfig::default();
        let a = run_interval_selection(&cfg).unwrap().to_json();
        let b = run_interval_selection(&cfg).unwrap().to_json();
        assert_eq!(a, b);
        let other = ScenarioConfig { seed: 7, ..cfg };
        assert_ne!(a, run_interval_selection(&other).unwrap().to_json());
    }

    #[test]
    fn union_set_shapes() {
        assert_eq!(mollifier_union_set(0.1).unwrap(), RegionSet::intervals(&[(f64::NEG_INFINITY, f64::INFINITY)]).unwrap());
        assert!(!mollifier_union_set(0.0).unwrap().contains(&[0.5]).unwrap());
        assert!(!mollifier_union_set(-0.1).unwrap().contains(&[0.45]).unwrap());
    }

    #[test]
    fn the_multideriv_branch_values() {
        let c = [(1.0, 1e-4), (1.0, -1e-4), (0.25, 0.0)];
        let v: Vec<f64> = c.iter().map(|&(x, y)| multideriv_phi(&vec![x, y]).unwrap()).collect();
        assert_eq!(v, vec![1.0, -1.0, 0.0]);
    }
}
