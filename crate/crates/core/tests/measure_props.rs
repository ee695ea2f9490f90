mod common;

use common::region;
use proptest::prelude::*;
use setcalc::measure::{integrate, std_normal_cdf, MeasureModel, TestFunction};
use setcalc::svdiff::{fomin_derivative, DiffSchedule};
use setcalc::RegionSet;

// mpmath at 30 digits.
const CDF: [(f64, f64); 7] = [
    (-3.0, 0.001_349_898_031_630_094_6),
    (-1.5, 0.066_807_201_268_858_07),
    (-0.25, 0.401_293_674_317_076_3),
    (0.0, 0.5),
    (0.7, 0.758_036_347_776_927),
    (2.0, 0.977_249_868_051_820_8),
    (4.5, 0.999_996_602_326_875_3),
];
const GAUSS_ON_UNIT: f64 = 0.746_824_132_812_427;
const SQRT_ON_0_2: f64 = 1.885_618_083_164_126_7;
const MOLLIFIER_AT_HALF: f64 = 0.593_695_516_732_014;

#[test]
fn normal_cdf_matches_reference() {
    for (x, want) in CDF {
        assert!((std_normal_cdf(x) - want).abs() <= 1e-10, "Φ({x})");
    }
}

#[test]
fn quadrature_matches_reference() {
    let q = integrate(|x| (-x * x).exp(), 0.0, 1.0, 1e-13).unwrap();
    assert!((q.value - GAUSS_ON_UNIT).abs() < 1e-12);
    let q = integrate(f64::sqrt, 0.0, 2.0, 1e-12).unwrap();
    assert!((q.value - SQRT_ON_0_2).abs() < 1e-9);
    let f = TestFunction::mollifier(0.0, 1.0).unwrap();
    assert!((f.eval(0.5) - MOLLIFIER_AT_HALF).abs() < 1e-11);
}

fn side() -> impl Strategy<Value = (i8, i8, bool, bool)> {
    (-8i8..=8, -8i8..=8, any::<bool>(), any::<bool>())
}

fn spec() -> impl Strategy<Value = Vec<[(i8, i8, bool, bool); 2]>> {
    prop::collection::vec([side(), side()], 0..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gaussian_measure_is_additive(a in spec(), b in spec()) {
        let mu = MeasureModel::gaussian(2);
        let (a, b) = (region(&a), region(&b));
        let lhs = mu.mu(&a.union(&b).unwrap()).unwrap() + mu.mu(&a.intersect(&b).unwrap()).unwrap();
        let rhs = mu.mu(&a).unwrap() + mu.mu(&b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!(mu.mu(&a).unwrap() <= mu.mu(&a.union(&b).unwrap()).unwrap() + 1e-15);
    }

    #[test]
    fn fomin_is_antisymmetric(lo in -2.0f64..1.0, w in 0.1f64..2.0, v in -1.5f64..1.5) {
        let mu = MeasureModel::gaussian(1);
        let a = RegionSet::intervals(&[(lo, lo + w)]).unwrap();
        let rep = fomin_derivative(&mu, &a, &[v], &DiffSchedule::default()).unwrap();
        prop_assert!(rep.antisymmetry_residual <= 1e-6, "residual {}", rep.antisymmetry_residual);
        let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let exact = v * (pdf(lo + w) - pdf(lo));
        prop_assert!((rep.estimate - exact).abs() < 1e-6, "{} vs {exact}", rep.estimate);
    }
}

#[test]
fn lebesgue_is_translation_invariant() {
    let mu = MeasureModel::lebesgue(2);
    let a = region(&[[(-4, 4, false, true), (0, 2, true, false)]]);
    let rep = fomin_derivative(&mu, &a, &[1.0, -0.5], &DiffSchedule::default()).unwrap();
    assert!(rep.estimate.abs() <= 1e-10);
}
