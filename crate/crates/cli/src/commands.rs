use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

use setcalc::measure::measure_from_json;
use setcalc::scenarios::{self, ScenarioConfig, Verdict};
use setcalc::setrep::json::{box_from_json, region_from_json};
use setcalc::shape::{
    deform, eulerian_derivative, hadamard_boundary_integral, hadamard_endpoint_sum, Shape, ShapeFunctional,
    VectorField,
};
use setcalc::svdiff::spec::{family_from_json, functional_from_str, problem_from_json};
use setcalc::svdiff::{adherence_derivative, fomin_derivative};
use setcalc::svmap::spec::plot_from_json;
use setcalc::svmap::{lsc_check, select as select_map, weak_select, ParamDomain, SetPlot, Strategy, DEFAULT_PROBE_DEPTH};
use setcalc::AxisBox;

use crate::config::{read_json, Config};

fn at(path: &Path) -> impl Fn(setcalc::Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out
}

fn parse_vector(flag: &str, s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("--{flag}: '{p}' is not a number")))
        .collect()
}

fn vector_arg(cfg: &Config, flag: Option<String>, key: &str) -> Result<Option<Vec<f64>>, String> {
    if let Some(s) = flag {
        return parse_vector(key, &s).map(Some);
    }
    match cfg.raw(key) {
        None => Ok(None),
        Some(Value::String(s)) => parse_vector(key, s).map(Some),
        Some(Value::Number(n)) => Ok(Some(vec![n.as_f64().unwrap_or(f64::NAN)])),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| format!("config key '{key}': {e}")),
    }
}

/// `x`, `radial`, `rotation`, `zero`, or components such as `(-y, x)`,
/// optionally written `V(x)=...`.
pub fn parse_field(spec: &str, dim: usize) -> Result<VectorField, String> {
    let mut s = spec.trim();
    if let Some((lhs, rhs)) = s.split_once('=') {
        if lhs.trim_start().starts_with('V') {
            s = rhs.trim();
        }
    }
    match s {
        "x" | "radial" => return Ok(VectorField::radial(dim)),
        "zero" | "0" => return Ok(VectorField::zero(dim)),
        "rotation" if dim == 2 => return Ok(VectorField::rotation()),
        _ => {}
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .or_else(|| s.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
        .unwrap_or(s);
    let comps = split_top(inner);
    if comps.len() != dim {
        return Err(format!(
            "--field: '{spec}' has {} components, the shape lives in dimension {dim}",
            comps.len()
        ));
    }
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    VectorField::from_exprs(&refs).map_err(|e| format!("--field '{spec}': {e}"))
}

fn regrid(p: SetPlot, grid: Option<usize>) -> Result<SetPlot, String> {
    let Some(n) = grid else { return Ok(p) };
    let d = p.domain();
    let steps = n - 1;
    let domain = if d.dim() == 1 {
        ParamDomain::interval(d.lo()[0], d.hi()[0], steps)
    } else {
        let h = d
            .lo()
            .iter()
            .zip(d.hi())
            .map(|(a, b)| b - a)
            .filter(|e| *e > 0.0)
            .fold(f64::INFINITY, f64::min)
            / steps as f64;
        ParamDomain::new(d.lo().to_vec(), d.hi().to_vec(), h)
    }
    .map_err(|e| format!("--grid: {e}"))?;
    Ok(p.on_domain(domain))
}

/// Keeps `[A-Za-z0-9._-]`, maps the rest to `_`.
fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

fn echo_written(sink: &crate::output::Sink) {
    for p in sink.written() {
        println!("  wrote {}", p.display());
    }
}

pub fn scenario(cfg: &Config, name: Option<String>, seed: Option<u64>) -> Result<bool, String> {
    let mut sc = ScenarioConfig::default();
    let mut keys = serde_json::Map::new();
    for k in ["grid", "schedule", "cluster_tol", "convergence_tol", "seed", "instances", "sides"] {
        if let Some(v) = cfg.raw(k) {
            keys.insert(k.into(), v.clone());
        }
    }
    if !keys.is_empty() {
        sc = ScenarioConfig::from_json(&Value::Object(keys)).map_err(|e| format!("config: {e}"))?;
    }
    if let Some(g) = cfg.common.grid {
        sc.grid = g;
    }
    if cfg.common.schedule.is_some() || cfg.common.tol.is_some() {
        sc.schedule = cfg.schedule()?;
    }
    if let Some(s) = seed {
        sc.seed = s;
    }
    sc.validate().map_err(|e| e.to_string())?;

    let name = name.or(cfg.str_key("scenario").ok().flatten()).unwrap_or_else(|| "all".into());
    let verdicts: Vec<Verdict> = if name == "all" {
        scenarios::run_all(&sc).map_err(|e| e.to_string())?
    } else {
        vec![scenarios::run(&name, &sc).map_err(|e| e.to_string())?]
    };
    let mut sink = cfg.sink()?;
    println!("{:<24} {:<6} checks", "scenario", "result");
    for v in &verdicts {
        println!(
            "{:<24} {:<6} {}/{}",
            v.scenario,
            if v.passed { "pass" } else { "FAIL" },
            v.checks.len() - v.violated.len(),
            v.checks.len()
        );
        for failed in &v.violated {
            println!("    violated: {failed}");
        }
        sink.json(&format!("{}.json", v.scenario), v)?;
        for s in &v.series {
            let stem = format!("{}.{}", v.scenario, file_stem(&s.name));
            sink.write(&format!("{stem}.xy"), &s.to_xy())?;
            sink.csv(&format!("{stem}.csv"), &s.to_csv())?;
        }
    }
    sink.csv("summary.csv", &scenarios::summary_csv(&verdicts))?;
    let summary: Vec<Value> = verdicts
        .iter()
        .map(|v| json!({"scenario": v.scenario, "passed": v.passed, "checks": v.checks.len(), "failed": v.violated.len()}))
        .collect();
    sink.json("summary.json", &summary)?;
    echo_written(&sink);
    Ok(verdicts.iter().all(|v| v.passed))
}

#[derive(Args)]
pub struct ShapeDerivArgs {
    /// Polygon `{"vertices": ...}` or one-dimensional region document.
    #[arg(long)]
    polygon: Option<PathBuf>,
    /// Vector field: `x`, `rotation`, `zero`, or `(expr, expr)`.
    #[arg(long)]
    field: Option<String>,
    /// `volume`, `perimeter`, or `integral:<expr>`.
    #[arg(long)]
    functional: Option<String>,
    /// Refinement threshold for deformed polygon edges.
    #[arg(long)]
    max_edge: Option<f64>,
    /// Central quotient instead of the one-sided limit.
    #[arg(long)]
    two_sided: bool,
}

pub fn shape_deriv(cfg: &Config, a: ShapeDerivArgs) -> Result<bool, String> {
    let path = cfg.required_path(a.polygon, "polygon")?;
    let mut shape = Shape::from_json(&read_json(&path)?).map_err(at(&path))?;
    let max_edge = match a.max_edge {
        Some(m) => Some(m),
        None => cfg.f64_key("max_edge")?,
    };
    if let (Some(m), Shape::Polygon(p)) = (max_edge, &shape) {
        shape = Shape::Polygon(p.clone().with_max_edge(m).map_err(|e| format!("--max-edge: {e}"))?);
    }
    let field_spec = a.field.or(cfg.str_key("field")?).unwrap_or_else(|| "x".into());
    let v = parse_field(&field_spec, shape.dim())?;
    let jname = a.functional.or(cfg.str_key("functional")?).unwrap_or_else(|| "volume".into());
    let j = ShapeFunctional::parse(&jname, shape.dim()).map_err(|e| format!("--functional: {e}"))?;
    let two_sided = a.two_sided || cfg.bool_key("two_sided")?.unwrap_or(false);
    let sched = cfg.schedule()?;

    let report = eulerian_derivative(&j, &shape, &v, &sched, two_sided).map_err(|e| e.to_string())?;
    let hadamard = match &shape {
        Shape::Polygon(p) => hadamard_boundary_integral(p, &v),
        Shape::Intervals(r) => hadamard_endpoint_sum(r, &v),
    }
    .map_err(|e| e.to_string())?;
    let n = cfg.common.grid.unwrap_or(81);
    let t_max = sched.t_max();
    let mut sweep = String::new();
    for k in 0..n {
        let t = t_max * k as f64 / (n - 1) as f64;
        let d = deform(&shape, &v, t).map_err(|e| format!("deform at t = {t:?}: {e}"))?;
        let y = j.evaluate(&d.shape).map_err(|e| e.to_string())?;
        sweep.push_str(&format!("{t:?} {y:?}\n"));
    }

    println!("functional      {}", report.functional);
    println!("field           {}", report.field);
    println!("estimate        {:.12}", report.estimate);
    println!("error estimate  {:.3e}", report.error_estimate);
    println!("boundary ∫V·n   {hadamard:.12}");
    println!("lipschitz       {:.6}", report.lipschitz);
    println!("flags           {}", if report.flags.is_empty() { "none".into() } else { report.flags.join(", ") });

    let mut sink = cfg.sink()?;
    sink.json(
        "shape_deriv.json",
        &json!({
            "input": path.display().to_string(),
            "schedule": sched.to_string(),
            "two_sided": two_sided,
            "hadamard_boundary_integral": hadamard,
            "report": report,
        }),
    )?;
    sink.csv("shape_deriv.csv", &report.diff.quotients_csv())?;
    sink.write("shape_deriv.xy", &sweep)?;
    echo_written(&sink);
    Ok(report.flags.is_empty())
}

#[derive(Args)]
pub struct FominArgs {
    /// Measure document `{"measure": ..., "params": ...}`.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Region document for `A`.
    #[arg(long)]
    set: Option<PathBuf>,
    /// Direction `v`, comma-separated.
    #[arg(long)]
    direction: Option<String>,
}

pub fn fomin(cfg: &Config, a: FominArgs) -> Result<bool, String> {
    let mpath = cfg.required_path(a.measure, "measure")?;
    let mu = measure_from_json(&read_json(&mpath)?).map_err(at(&mpath))?;
    let spath = cfg.required_path(a.set, "set")?;
    let set = region_from_json(&read_json(&spath)?).map_err(at(&spath))?;
    let v = vector_arg(cfg, a.direction, "direction")?.ok_or("missing --direction (or config key 'direction')")?;
    let sched = cfg.schedule()?;
    let r = fomin_derivative(&mu, &set, &v, &sched).map_err(|e| e.to_string())?;
    println!("estimate        {:.12}", r.estimate);
    println!("error estimate  {:.3e}", r.error_estimate);
    println!("D_(A,v)         {:.12}", r.d_plus);
    println!("D_(A,-v)        {:.12}", r.d_minus);
    println!("antisymmetry    {:.3e}", r.antisymmetry_residual);
    let converged = r.central.converged && r.plus.converged && r.minus.converged;
    let mut csv = String::from("run,t,quotient\n");
    for (label, d) in [("central", &r.central), ("plus", &r.plus), ("minus", &r.minus)] {
        for (t, q) in d.steps.iter().zip(&d.quotients) {
            csv.push_str(&format!("{label},{t:?},{q:?}\n"));
        }
    }
    let mut sink = cfg.sink()?;
    sink.json(
        "fomin.json",
        &json!({"measure": mpath.display().to_string(), "set": spath.display().to_string(),
                "direction": v, "schedule": sched.to_string(), "converged": converged, "report": r}),
    )?;
    sink.csv("fomin.csv", &csv)?;
    echo_written(&sink);
    Ok(converged)
}

#[derive(Args)]
pub struct SelectArgs {
    /// Plot document.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Anchor parameter `r₀`, comma-separated.
    #[arg(long)]
    r0: Option<String>,
    /// Anchor value `x₀`, comma-separated; not used by `weak`.
    #[arg(long)]
    x0: Option<String>,
    /// `convex`, `tracking`, or `weak`.
    #[arg(long)]
    strategy: Option<String>,
}

pub fn select(cfg: &Config, a: SelectArgs) -> Result<bool, String> {
    let path = cfg.required_path(a.plot, "plot")?;
    let phi = regrid(plot_from_json(&read_json(&path)?).map_err(at(&path))?, cfg.common.grid)?;
    let r0 = vector_arg(cfg, a.r0, "r0")?.ok_or("missing --r0 (or config key 'r0')")?;
    let strategy = a.strategy.or(cfg.str_key("strategy")?).unwrap_or_else(|| "convex".into());
    let sel = if strategy == "weak" {
        weak_select(&phi, &r0)
    } else {
        let s: Strategy = strategy.parse().map_err(|e| format!("--strategy: {e}"))?;
        let x0 = vector_arg(cfg, a.x0, "x0")?.ok_or("missing --x0 (or config key 'x0')")?;
        select_map(&phi, &r0, &x0, s)
    }
    .map_err(|e| e.to_string())?;
    let ok = sel.residual == 0.0 && sel.anchor_satisfied();
    println!("strategy        {strategy}");
    println!("samples         {}", sel.samples.len());
    println!("max residual    {:e}", sel.residual);
    println!("max jump        {:e}", sel.max_jump);
    println!("anchor          {}", if sel.anchor_satisfied() { "satisfied" } else { "MISSED" });
    let mut sink = cfg.sink()?;
    sink.write("selection.csv", &sel.to_csv())?;
    sink.json("selection.json", &sel)?;
    echo_written(&sink);
    Ok(ok)
}

#[derive(Args)]
pub struct LscArgs {
    /// Plot document.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// JSON list of boxes (or `{"opens": [...]}`) given by their closures.
    #[arg(long)]
    opens: Option<PathBuf>,
    /// Bisection depth of the boundary probe.
    #[arg(long)]
    depth: Option<u32>,
}

pub fn lsc(cfg: &Config, a: LscArgs) -> Result<bool, String> {
    let path = cfg.required_path(a.plot, "plot")?;
    let phi = regrid(plot_from_json(&read_json(&path)?).map_err(at(&path))?, cfg.common.grid)?;
    let opath = cfg.required_path(a.opens, "opens")?;
    let doc = read_json(&opath)?;
    let list = doc.get("opens").unwrap_or(&doc);
    let opens: Vec<AxisBox> = list
        .as_array()
        .ok_or_else(|| format!("{}: expected a list of boxes", opath.display()))?
        .iter()
        .map(box_from_json)
        .collect::<Result<_, _>>()
        .map_err(at(&opath))?;
    let depth = match a.depth {
        Some(d) => d,
        None => cfg.usize_key("depth")?.map_or(DEFAULT_PROBE_DEPTH, |d| d as u32),
    };
    let rep = lsc_check(&phi, &opens, depth).map_err(|e| e.to_string())?;
    println!("grid points     {}", rep.grid_points);
    println!("witnesses       {}", rep.witnesses.len());
    println!("violations      {}", rep.violations.len());
    let mut csv = String::from("open,r,sides\n");
    for v in &rep.violations {
        let r: Vec<String> = v.r.iter().map(|x| format!("{x:?}")).collect();
        let sides: Vec<String> = v.sides.iter().map(|(a, s)| format!("{a}{}", if *s > 0 { "+" } else { "-" })).collect();
        println!("  open {} at r = ({}) sides {}", v.open, r.join(", "), sides.join(" "));
        csv.push_str(&format!("{},{},{}\n", v.open, r.join(" "), sides.join(" ")));
    }
    let mut sink = cfg.sink()?;
    sink.json("lsc.json", &json!({"plot": path.display().to_string(), "depth": depth, "passed": rep.passed(), "report": rep}))?;
    sink.csv("lsc.csv", &csv)?;
    echo_written(&sink);
    Ok(rep.passed())
}

#[derive(Args)]
pub struct SvdiffArgs {
    /// Problem document `{"functional": ..., "family": ...}`.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Functional expression in `x, y, z` or `x1 … xm`; overrides the problem's.
    #[arg(long)]
    functional: Option<String>,
    /// Path-family document; overrides the problem's.
    #[arg(long)]
    family: Option<PathBuf>,
}

pub fn svdiff(cfg: &Config, a: SvdiffArgs) -> Result<bool, String> {
    let problem = match a.problem.or(cfg.path_key("problem")?) {
        Some(p) => Some((read_json(&p)?, p)),
        None => None,
    };
    let family = match a.family.or(cfg.path_key("family")?) {
        Some(p) => family_from_json(&read_json(&p)?).map_err(at(&p))?,
        None => {
            let (doc, p) = problem.as_ref().ok_or("missing --problem or --family")?;
            let fam = doc.get("family").ok_or_else(|| format!("{}: missing 'family'", p.display()))?;
            family_from_json(fam).map_err(at(p))?
        }
    };
    let m = family.paths()[0].base().len();
    let src = match a.functional.or(cfg.str_key("functional")?) {
        Some(s) => s,
        None => {
            let (doc, p) = problem.as_ref().ok_or("missing --functional")?;
            // validates the whole document the same way library callers do
            problem_from_json(doc).map_err(at(p))?;
            doc["functional"].as_str().unwrap_or_default().to_string()
        }
    };
    let phi = functional_from_str(&src, m).map_err(|e| format!("--functional '{src}': {e}"))?;
    let sched = cfg.schedule()?;
    let r = adherence_derivative(|p| phi(p), &family, &sched).map_err(|e| e.to_string())?;
    println!("functional      {src}");
    println!("family          {} ({} paths)", r.family, r.paths.len());
    println!("{:<10} {:>22} {:>12} {:>6}", "cluster", "value", "radius", "count");
    for (i, c) in r.clusters.iter().enumerate() {
        println!("{i:<10} {:>22.15} {:>12.3e} {:>6}", c.value, c.radius, c.count);
    }
    for p in r.divergent_paths() {
        println!("  divergent: {p}");
    }
    let mut sink = cfg.sink()?;
    sink.json(
        "svdiff.json",
        &json!({"functional": src, "schedule": sched.to_string(), "report": r}),
    )?;
    sink.csv("svdiff.csv", &r.quotients_csv())?;
    echo_written(&sink);
    Ok(r.divergent_paths().is_empty() && !r.clusters.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs() {
        let v = parse_field("V(x)=x", 2).unwrap();
        assert_eq!(v.eval(&[2.0, 3.0]), vec![2.0, 3.0]);
        let r = parse_field("(-y, max(x, y))", 2).unwrap();
        assert_eq!(r.eval(&[1.0, 2.0]), vec![-2.0, 2.0]);
        assert!(parse_field("(x, y, x)", 2).is_err());
        assert!(parse_field("(x +, y)", 2).is_err());
    }

    #[test]
    fn top_level_split() {
        assert_eq!(split_top("a, f(b, c) ,d"), vec!["a", "f(b, c)", "d"]);
    }
}
