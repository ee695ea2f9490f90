use std::sync::Arc;

use super::{ParamDomain, SetPlot};
use crate::error::{Error, Result};
use crate::setrep::{AxisBox, RegionSet, SampledSet};

/// A relation `R ⊂ X × Y`, either as sampled pairs or as the graph of a
/// set-valued map stored slice by slice over a parameter grid.
#[derive(Clone, Debug)]
pub enum Relation {
    Pairs(Vec<(Vec<f64>, Vec<f64>)>),
    Slices {
        domain: ParamDomain,
        target_dim: usize,
        /// `slices[i]` is `{y : (x_i, y) ∈ R}` at grid node `i`.
        slices: Vec<RegionSet>,
    },
}

/// `Graph(φ) = {(x, y) : y ∈ φ(x)}` at the grid nodes of φ's domain.
pub fn graph(phi: &SetPlot) -> Relation {
    let domain = phi.domain().clone();
    let slices = domain.grid().iter().map(|r| phi.eval(r)).collect();
    Relation::Slices {
        domain,
        target_dim: phi.dim(),
        slices,
    }
}

fn pair_dims(pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<(usize, usize)> {
    let (x, y) = pairs
        .first()
        .ok_or_else(|| Error::Empty("relation has no pairs".into()))?;
    for (a, b) in pairs {
        if a.len() != x.len() || b.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len() + y.len(),
                found: a.len() + b.len(),
            });
        }
    }
    Ok((x.len(), y.len()))
}

/// The set-valued map `x ↦ {y : (x, y) ∈ R}`, evaluated at the nearest
/// sampled `x`.
pub fn from_relation(rel: &Relation) -> Result<SetPlot> {
    match rel {
        Relation::Slices {
            domain,
            target_dim,
            slices,
        } => {
            if slices.len() != domain.len() {
                return Err(Error::Invalid(format!(
                    "relation has {} slices for {} grid nodes",
                    slices.len(),
                    domain.len()
                )));
            }
            let d = domain.clone();
            let slices = slices.clone();
            let eval = Arc::new(move |r: &[f64]| slices[d.nearest_node(r)].clone());
            Ok(SetPlot::new(domain.clone(), *target_dim, eval).with_label("from_relation"))
        }
        Relation::Pairs(pairs) => {
            let (m, d) = pair_dims(pairs)?;
            let mut xs: Vec<Vec<f64>> = pairs.iter().map(|(x, _)| x.clone()).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
            xs.dedup();
            let groups: Vec<(Vec<f64>, RegionSet)> = xs
                .into_iter()
                .map(|x| {
                    let boxes = pairs
                        .iter()
                        .filter(|(a, _)| *a == x)
                        .map(|(_, y)| AxisBox::point(y))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((x, RegionSet::from_boxes(boxes, d)?))
                })
                .collect::<Result<_>>()?;

            let lo: Vec<f64> = (0..m)
                .map(|k| groups.iter().map(|g| g.0[k]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi: Vec<f64> = (0..m)
                .map(|k| groups.iter().map(|g| g.0[k]).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            let pitch = min_spacing(&groups).unwrap_or(1.0);
            let domain = ParamDomain::new(lo, hi, pitch)?;
            let eval = Arc::new(move |r: &[f64]| {
                let mut best = (f64::INFINITY, 0);
                for (i, (x, _)) in groups.iter().enumerate() {
                    let d2: f64 = x.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < best.0 {
                        best = (d2, i);
                    }
                }
                groups[best.1].1.clone()
            });
            Ok(SetPlot::new(domain, d, eval).with_label("from_relation"))
        }
    }
}

fn min_spacing(groups: &[(Vec<f64>, RegionSet)]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, (a, _)) in groups.iter().enumerate() {
        for (b, _) in &groups[i + 1..] {
            let d = a
                .iter()
                .zip(b)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            if d > 0.0 && best.is_none_or(|x| d < x) {
                best = Some(d);
            }
        }
    }
    best
}

/// Projection of `R` onto its first factor.
pub fn def_set(rel: &Relation) -> Result<SampledSet> {
    match rel {
        Relation::Pairs(pairs) => {
            pair_dims(pairs)?;
            let h = pitch_of_pairs(pairs);
            SampledSet::new(pairs.iter().map(|(x, _)| x.clone()).collect(), h)
        }
        Relation::Slices { domain, slices, .. } => {
            let pts: Vec<Vec<f64>> = slices
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(|(i, _)| domain.point(i))
                .collect();
            if pts.is_empty() {
                return Err(Error::Empty("relation has no nonempty slice".into()));
            }
            SampledSet::new(pts, domain.pitch())
        }
    }
}

/// Projection of `R` onto its second factor.
pub fn image_set(rel: &Relation) -> Result<SampledSet> {
    match rel {
        Relation::Pairs(pairs) => {
            pair_dims(pairs)?;
            let h = pitch_of_pairs(pairs);
            SampledSet::new(pairs.iter().map(|(_, y)| y.clone()).collect(), h)
        }
        Relation::Slices { domain, slices, .. } => {
            let mut pts = Vec::new();
            for s in slices.iter().filter(|s| !s.is_empty()) {
                pts.extend(s.sample(domain.pitch())?.points().iter().cloned());
            }
            if pts.is_empty() {
                return Err(Error::Empty("relation has no nonempty slice".into()));
            }
            SampledSet::new(pts, domain.pitch())
        }
    }
}

fn pitch_of_pairs(pairs: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let groups: Vec<(Vec<f64>, RegionSet)> = pairs
        .iter()
        .map(|(x, _)| (x.clone(), RegionSet::empty(1)))
        .collect();
    min_spacing(&groups).unwrap_or(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setrep::hausdorff;
    use crate::svmap::interval_map;

    #[test]
    fn graph_of_constant_zero() {
        let d = ParamDomain::interval(0.0, 1.0, 4).unwrap();
        let phi = SetPlot::constant(d, RegionSet::point(&[0.0]).unwrap());
        match graph(&phi) {
            Relation::Slices { slices, .. } => {
                assert_eq!(slices.len(), 5);
                assert!(slices.iter().all(|s| *s == RegionSet::point(&[0.0]).unwrap()));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn diagonal_is_singleton_valued() {
        let pairs: Vec<_> = (0..=10).map(|i| (vec![i as f64 / 10.0], vec![i as f64 / 10.0])).collect();
        let rel = Relation::Pairs(pairs);
        let plot = from_relation(&rel).unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert_eq!(plot.eval(&[x]), RegionSet::point(&[x]).unwrap());
        }
        let def = def_set(&rel).unwrap();
        let img = image_set(&rel).unwrap();
        assert!(def.same_points(&img));
        let unit = RegionSet::intervals(&[(0.0, 1.0)]).unwrap().sample(0.1).unwrap();
        assert!(hausdorff(&def, &unit).unwrap() <= 0.1);
    }

    #[test]
    fn single_pair_projections() {
        let rel = Relation::Pairs(vec![(vec![2.0], vec![-3.0])]);
        assert_eq!(def_set(&rel).unwrap().points(), &[vec![2.0]]);
        assert_eq!(image_set(&rel).unwrap().points(), &[vec![-3.0]]);
    }

    #[test]
    fn empty_relation_errors() {
        let rel = Relation::Pairs(vec![]);
        assert!(def_set(&rel).is_err());
        assert!(image_set(&rel).is_err());
        assert!(from_relation(&rel).is_err());
    }

    #[test]
    fn graph_of_zero_to_identity_has_unit_image() {
        let d = ParamDomain::interval(0.0, 1.0, 20).unwrap();
        let phi = interval_map(d, Arc::new(|_| 0.0), Arc::new(|r| r[0]));
        let img = image_set(&graph(&phi)).unwrap();
        let (lo, hi) = img.bounds()[0];
        assert_eq!((lo, hi), (0.0, 1.0));
        let unit = RegionSet::intervals(&[(0.0, 1.0)]).unwrap().sample(0.05).unwrap();
        assert!(hausdorff(&img, &unit).unwrap() <= 0.05);
    }
}
