mod common;

use common::star_polygon;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use setcalc::setrep::hausdorff;
use setcalc::shape::{
    eulerian_derivative, flow_map, hadamard_boundary_integral, lipschitz_bound, Polygon, Shape, ShapeFunctional,
    VectorField,
};
use setcalc::svdiff::DiffSchedule;
use setcalc::SampledSet;

fn affine<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, VectorField) {
    let mut e = || rng.gen_range(-0.5..0.5);
    let m = vec![vec![e(), e()], vec![e(), e()]];
    let b = vec![e(), e()];
    (m.clone(), VectorField::affine(m, b).unwrap())
}

fn volume_rate(p: &Polygon, v: &VectorField) -> f64 {
    eulerian_derivative(&ShapeFunctional::Volume, &Shape::Polygon(p.clone()), v, &DiffSchedule::default(), false)
        .unwrap()
        .estimate
}

#[test]
fn affine_fields_match_hadamard_on_random_polygons() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..50 {
        let n = rng.gen_range(5..16);
        let p = Polygon::new(star_polygon(&mut rng, n)).unwrap();
        let (m, v) = affine(&mut rng);
        let div = (m[0][0] + m[1][1]) * p.area();
        let hadamard = hadamard_boundary_integral(&p, &v).unwrap();
        assert!((hadamard - div).abs() <= 1e-12 * (1.0 + div.abs()), "case {case}: {hadamard} vs {div}");
        let est = volume_rate(&p, &v);
        assert!((est - hadamard).abs() <= 1e-8 * (1.0 + hadamard.abs()), "case {case}: {est} vs {hadamard}");
    }
}

#[test]
fn unit_integrand_gives_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let one = ShapeFunctional::integral("1", 2).unwrap();
    for _ in 0..20 {
        let n = rng.gen_range(3..40);
        let p = Polygon::new(star_polygon(&mut rng, n)).unwrap();
        assert!((one.evaluate_polygon(&p) - p.area()).abs() <= 1e-12 * p.area().max(1.0));
    }
}

#[test]
fn clockwise_polygons_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let mut v = star_polygon(&mut rng, 9);
        assert!(Polygon::new(v.clone()).is_ok());
        v.reverse();
        let err = Polygon::new(v).unwrap_err().to_string();
        assert!(err.contains("counterclockwise"), "{err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn derivative_is_linear_in_the_field(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Polygon::new(star_polygon(&mut rng, 10)).unwrap();
        let (_, v) = affine(&mut rng);
        let w = VectorField::from_exprs(&["0.2*sin(y)", "0.1*x*x"]).unwrap();
        let lhs = volume_rate(&p, &v.combine(a, &w, b).unwrap());
        let rhs = a * volume_rate(&p, &v) + b * volume_rate(&p, &w);
        // each field gets its own edge refinement, so agreement is up to chord error
        prop_assert!((lhs - rhs).abs() <= 1e-4 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    /// `|F_t(F_s(x)) − F_{s+t}(x)| = |t|·|V(F_s x) − V(x)| ≤ |t|·|s|·Lip·|V(x)|`.
    #[test]
    fn flow_composition_stays_within_the_lipschitz_bound(seed in any::<u64>(), s in -0.3f64..0.3, t in -0.3f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Polygon::new(star_polygon(&mut rng, 24)).unwrap();
        let v = VectorField::from_exprs(&["0.3*sin(x+y)", "0.2*cos(2*x)"]).unwrap();
        let lip = lipschitz_bound(&Shape::Polygon(p.clone()), &v).unwrap();
        let (fs, ft, fst) = (flow_map(&v, s, lip), flow_map(&v, t, lip), flow_map(&v, s + t, lip));
        let xs: Vec<Vec<f64>> = p.vertices().iter().map(|x| x.to_vec()).collect();
        let composed: Vec<Vec<f64>> = xs.iter().map(|x| ft.apply(&fs.apply(x))).collect();
        let direct: Vec<Vec<f64>> = xs.iter().map(|x| fst.apply(x)).collect();
        let vmax = xs.iter().map(|x| v.eval(x).iter().map(|c| c * c).sum::<f64>().sqrt()).fold(0.0, f64::max);
        // the sampled Lipschitz constant may undershoot the true one slightly
        let bound = 1.05 * t.abs() * s.abs() * lip * vmax + 1e-15;
        let h = hausdorff(&SampledSet::new(composed, 0.01).unwrap(), &SampledSet::new(direct, 0.01).unwrap()).unwrap();
        prop_assert!(h <= bound, "{h} > {bound}");
    }
}
