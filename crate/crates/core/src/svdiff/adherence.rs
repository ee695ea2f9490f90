use std::fmt;

use serde::Serialize;

use super::{richardson, DiffSchedule, PathFamily};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    /// Limit estimate for the subsequence in the cluster: its members
    /// extrapolated to `t = 0`, or their common value when all are equal.
    pub value: f64,
    /// Largest distance from `value` to a member.
    pub radius: f64,
    pub count: usize,
    /// Member at the smallest step.
    pub last: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathAdherence {
    pub label: String,
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    pub clusters: Vec<Cluster>,
    /// Why the sequence was judged unbounded, if it was.
    pub divergent: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdherenceReport {
    pub family: String,
    /// Union of the per-path clusters, merged within the cluster tolerance.
    pub clusters: Vec<Cluster>,
    pub paths: Vec<PathAdherence>,
}

impl AdherenceReport {
    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn divergent_paths(&self) -> Vec<&str> {
        self.paths
            .iter()
            .filter(|p| p.divergent.is_some())
            .map(|p| p.label.as_str())
            .collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.clusters.iter().map(|c| c.radius).fold(0.0, f64::max)
    }

    /// `path,t,quotient` rows.
    pub fn quotients_csv(&self) -> String {
        let mut out = String::from("path,t,quotient\n");
        for p in &self.paths {
            for (t, q) in p.steps.iter().zip(&p.quotients) {
                out.push_str(&format!("{},{t:?},{q:?}\n", p.label));
            }
        }
        out
    }
}

fn scale(tol: f64, v: f64) -> f64 {
    tol * v.abs().max(1.0)
}

/// Limit of a cluster's members `(t, q)`, taken in sequence order.
///
/// Three members (first, middle, last) are extrapolated linearly in `t`;
/// if that lands more than four spreads away from the members, the last
/// member is used instead.
fn cluster_limit(members: &mut [(f64, f64)]) -> f64 {
    members.sort_by(|x, y| y.0.total_cmp(&x.0));
    let last = members[members.len() - 1].1;
    if members.iter().all(|m| m.1 == last) || members.len() < 2 {
        return last;
    }
    let picks: Vec<(f64, f64)> = if members.len() == 2 {
        members.to_vec()
    } else {
        vec![members[0], members[members.len() / 2], members[members.len() - 1]]
    };
    let steps: Vec<f64> = picks.iter().map(|p| p.0).collect();
    let values: Vec<f64> = picks.iter().map(|p| p.1).collect();
    let (lo, hi) = members
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), m| (a.min(m.1), b.max(m.1)));
    match richardson(&values, &steps, 1) {
        Ok(r) if r.estimate.is_finite() && r.estimate >= lo - 4.0 * (hi - lo) && r.estimate <= hi + 4.0 * (hi - lo) => r.estimate,
        _ => last,
    }
}

/// Largest residual of the least-squares fit `q ≈ a + bt + ct²` (linear
/// below four members).
fn smooth_fit_residual(members: &[(f64, f64)]) -> f64 {
    let t_max = members.iter().map(|m| m.0.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let k = if members.len() >= 4 { 3 } else { members.len().min(2) };
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &(t, q) in members {
        let u = t / t_max;
        let row = [1.0, u, u * u];
        for i in 0..k {
            atb[i] += row[i] * q;
            for j in 0..k {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let Some(coef) = solve(&ata, &atb, k) else {
        return f64::INFINITY;
    };
    members
        .iter()
        .map(|&(t, q)| {
            let u = t / t_max;
            let fit: f64 = [1.0, u, u * u].iter().zip(&coef).take(k).map(|(r, c)| r * c).sum();
            (q - fit).abs()
        })
        .fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting on the leading `k × k` block.
fn solve(a: &[[f64; 3]; 3], b: &[f64; 3], k: usize) -> Option<[f64; 3]> {
    let mut m = *a;
    let mut r = *b;
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for i in c + 1..k {
            let f = m[i][c] / m[c][c];
            for j in c..k {
                m[i][j] -= f * m[c][j];
            }
            r[i] -= f * r[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| m[c][j] * x[j]).sum();
        x[c] = (r[c] - s) / m[c][c];
    }
    Some(x)
}

/// Groups `(t, q)` pairs by `q`, splitting wherever consecutive sorted
/// values differ by more than `rel_tol · max(1, |q|)`. Neighbouring groups
/// are then joined when their union is a smooth function of `t` up to the
/// same tolerance, so a single convergent branch with a first-order drift
/// stays one cluster.
pub fn cluster(points: &[(f64, f64)], rel_tol: f64) -> Vec<Cluster> {
    let mut v: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1.is_finite()).collect();
    v.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || v[i].1 - v[i - 1].1 > scale(rel_tol, v[i - 1].1) {
            if start < i {
                groups.push(v[start..i].to_vec());
            }
            start = i;
        }
    }
    let smooth = |m: &[(f64, f64)]| {
        let mid = m.iter().map(|p| p.1).sum::<f64>() / m.len() as f64;
        smooth_fit_residual(m) <= scale(rel_tol, mid)
    };
    let mut joined: Vec<Vec<(f64, f64)>> = Vec::new();
    for (k, g) in groups.iter().enumerate() {
        if let Some(prev) = joined.last_mut() {
            let mut both = prev.clone();
            both.extend_from_slice(g);
            // two points always fit a line; decide with the next group too
            let ok = if both.len() >= 3 {
                smooth(&both)
            } else {
                groups.get(k + 1).is_some_and(|next| {
                    let mut three = both.clone();
                    three.extend_from_slice(next);
                    smooth(&three)
                })
            };
            if ok {
                *prev = both;
                continue;
            }
        }
        joined.push(g.clone());
    }
    joined
        .into_iter()
        .map(|mut group| {
            let value = cluster_limit(&mut group);
            let radius = group.iter().map(|m| (m.1 - value).abs()).fold(0.0, f64::max);
            Cluster {
                value,
                radius,
                count: group.len(),
                last: group[group.len() - 1].1,
            }
        })
        .collect()
}

fn merge(mut all: Vec<Cluster>, rel_tol: f64) -> Vec<Cluster> {
    all.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Cluster> = Vec::new();
    for c in all {
        match out.last_mut() {
            Some(last) if (c.value - last.value).abs() <= scale(rel_tol, last.value) => {
                let (keep, other) = if c.count > last.count { (c.clone(), last.clone()) } else { (last.clone(), c) };
                *last = Cluster {
                    radius: keep.radius.max((other.value - keep.value).abs() + other.radius),
                    count: keep.count + other.count,
                    ..keep
                };
            }
            _ => out.push(c),
        }
    }
    out
}

/// Growth test on the tail: non-finite quotients, or `|q|` nondecreasing
/// with log-log slope at least 1/4 against `1/t`.
fn divergence(steps: &[f64], tail: &[f64]) -> Option<String> {
    if let Some(i) = tail.iter().position(|q| !q.is_finite()) {
        return Some(format!("non-finite quotient at t = {:?}", steps[steps.len() - tail.len() + i]));
    }
    let first = tail.first()?.abs();
    let last = tail.last()?.abs();
    let monotone = tail.windows(2).all(|w| w[1].abs() >= w[0].abs());
    if !monotone || first == 0.0 || tail.len() < 2 {
        return None;
    }
    let t0 = steps[steps.len() - tail.len()];
    let t1 = steps[steps.len() - 1];
    let slope = (last / first).ln() / (t0 / t1).ln();
    (slope >= 0.25).then(|| format!("|quotient| grows like t^-{slope:.3}"))
}

/// `D_uΦ(x) = ⋃_c Adh(Φ(c(t)) − Φ(x))/t` over the family, with `t`
/// running over the schedule.
///
/// The adherence set is estimated from the second half of each quotient
/// sequence (the smallest steps); earlier terms are kept in the report.
pub fn adherence_derivative<T, F>(phi: F, fam: &PathFamily<T>, sched: &DiffSchedule) -> Result<AdherenceReport>
where
    T: Clone + PartialEq + fmt::Debug,
    F: Fn(&T) -> Result<f64>,
{
    sched.validate()?;
    let steps = sched.steps();
    let mut paths = Vec::with_capacity(fam.paths().len());
    let mut all = Vec::new();
    for c in fam.paths() {
        let v0 = phi(c.base())?;
        if !v0.is_finite() {
            return Err(Error::UndefinedAlongPath { t: 0.0 });
        }
        let mut quotients = Vec::with_capacity(steps.len());
        for &t in &steps {
            quotients.push((phi(&c.at(t))? - v0) / t);
        }
        let half = quotients.len() / 2;
        let tail = &quotients[half..];
        let divergent = divergence(&steps, tail);
        let clusters = if divergent.is_some() {
            Vec::new()
        } else {
            let pts: Vec<(f64, f64)> = steps[half..].iter().copied().zip(tail.iter().copied()).collect();
            cluster(&pts, sched.cluster_tol)
        };
        all.extend(clusters.iter().cloned());
        paths.push(PathAdherence {
            label: c.label().to_string(),
            steps: steps.clone(),
            quotients,
            clusters,
            divergent,
        });
    }
    Ok(AdherenceReport {
        family: fam.label.clone(),
        clusters: merge(all, sched.cluster_tol),
        paths,
    })
}
