mod common;

use common::*;
use proptest::prelude::*;
use shallowdirac::functionals::{f1, f21, f22, f31, f32, f_of_k, moment};
use shallowdirac::{Component, Family, FunctionalSet, PotentialSpec, Profile, QuadratureSettings};

fn settings() -> QuadratureSettings {
    QuadratureSettings::default()
}

#[test]
fn gaussian_closed_forms() {
    for (name, spec) in gaussian_grid() {
        let fs = FunctionalSet::compute(&spec, &settings()).unwrap();
        let Family::Gaussian { alpha, gamma } = *spec.family() else {
            unreachable!()
        };
        let exact = gaussian_closed_form(alpha, gamma);
        for (i, (got, want)) in fs.values().iter().zip(exact).enumerate() {
            let err = (got - want).abs();
            assert!(
                err <= 1e-9 * want.abs().max(1.0),
                "{name} F[{i}]: {got} vs {want}"
            );
        }
    }
}

#[test]
fn gaussian_1_1_printed_values() {
    let fs = FunctionalSet::compute(&gaussian(1.0, 1.0), &settings()).unwrap();
    let [a, b, c, d, e] = fs.values();
    assert!((a + 3.544_907_7).abs() < 1e-7);
    assert!((b - 10.026_513_1).abs() < 1e-7);
    assert!((c - 12.566_370_6).abs() < 1e-7);
    assert!((d + 31.984_278_3).abs() < 1e-6);
    assert_eq!(e, 0.0);
}

#[test]
fn simple_examples() {
    let d = PotentialSpec::delta_pair(1.0).unwrap();
    let fs = FunctionalSet::compute(&d, &settings()).unwrap();
    assert_eq!(fs.values(), [-2.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(f_of_k(&d, 1.0, 2.0, &settings()).unwrap(), -3.0);

    let sq = PotentialSpec::square_well(1.0, 1.0).unwrap();
    assert!((f1(&sq, &settings()).unwrap().value + 2.0).abs() < 1e-12);
    // ∫∫|x−y| over the box is 8a³/3
    assert!((f21(&sq, &settings()).unwrap().value - 8.0 / 3.0).abs() < 1e-9);

    let g = gaussian(1.0, 0.0);
    let k = 2f64.sqrt();
    let want = -std::f64::consts::PI.sqrt();
    assert!((f_of_k(&g, 1.0, k, &settings()).unwrap() - want).abs() < 1e-11);
}

#[test]
fn two_dimensional_oracle() {
    let mut specs = gaussian_grid();
    specs.push(("sech2".into(), sech2()));
    for (name, spec) in specs {
        let got21 = f21(&spec, &settings()).unwrap().value;
        let got22 = f22(&spec, &settings()).unwrap().value;
        let want21 = double_integral_rotated(&spec, 1);
        let want22 = double_integral_rotated(&spec, 2);
        assert!(rel_diff(got21, want21) < 1e-8, "{name} F21 {got21} vs {want21}");
        assert!(rel_diff(got22, want22) < 1e-8, "{name} F22 {got22} vs {want22}");
    }
}

#[test]
fn three_dimensional_oracle() {
    let mut specs = gaussian_grid();
    specs.push(("sech2".into(), sech2()));
    for (name, spec) in specs {
        let got31 = f31(&spec, &settings()).unwrap().value;
        let got32 = f32(&spec, &settings()).unwrap().value;
        let (want31, want32) = triple_integrals(&spec, 24);
        assert!(rel_diff(got31, want31) < 1e-5, "{name} F31 {got31} vs {want31}");
        let scale = want31.abs();
        assert!(
            (got32 - want32).abs() < 1e-5 * scale,
            "{name} F32 {got32} vs {want32}"
        );
    }
}

#[test]
fn monte_carlo_f32() {
    for (alpha, gamma) in [(1.0, 0.0), (0.5, 0.5), (2.0, -0.5)] {
        let spec = gaussian(alpha, gamma);
        let got = f32(&spec, &settings()).unwrap().value;
        let (mean, se) = f32_monte_carlo(alpha, gamma, 400_000, 7);
        assert!(
            (got - mean).abs() < 3.0 * se,
            "({alpha}, {gamma}): {got} vs {mean} ± {se}"
        );
    }
}

#[test]
fn f22_moment_identity() {
    for (name, spec) in corpus() {
        let tol = settings().tol_1d;
        let m0 = moment(&spec, Component::V, 0, tol).unwrap().value;
        let m1 = moment(&spec, Component::V, 1, tol).unwrap().value;
        let m2 = moment(&spec, Component::V, 2, tol).unwrap().value;
        let got = f22(&spec, &settings()).unwrap().value;
        let want = 2.0 * (m0 * m2 - m1 * m1);
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{name}: {got} vs {want}"
        );
    }
}

#[test]
fn f_of_m_equals_m_f1() {
    for (name, spec) in corpus() {
        let v1 = f1(&spec, &settings()).unwrap().value;
        for m in [0.1, 1.0, 3.0] {
            let fm = f_of_k(&spec, m, m, &settings()).unwrap();
            assert!((fm - m * v1).abs() <= 1e-12 * (m * v1).abs(), "{name}");
        }
    }
}

#[test]
fn tightened_tolerances_agree() {
    let spec = gaussian(1.0, 1.0);
    let a = FunctionalSet::compute(&spec, &settings()).unwrap();
    let b = FunctionalSet::compute(&spec, &settings().tightened(100.0)).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0));
    }
}

#[test]
fn asymmetric_f32_keeps_argument_order() {
    // off-centre U: the printed ordering puts U on the shared variable
    let base = gaussian(1.0, 1.0);
    let spec = base
        .with_u(Profile::custom(|x| -(-(x - 0.7) * (x - 0.7)).exp(), false, vec![]))
        .unwrap();
    let got = f32(&spec, &settings()).unwrap().value;
    let (_, want) = triple_integrals(&spec, 24);
    assert!(rel_diff(got, want) < 1e-6, "{got} vs {want}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_laws(c in 0.2..3.0f64, alpha in 0.5..2.0f64, gamma in -0.9..0.9f64) {
        let base = gaussian(alpha, gamma);
        let scaled = base.scaled(c, c).unwrap();
        let a = FunctionalSet::compute(&base, &settings()).unwrap().values();
        let b = FunctionalSet::compute(&scaled, &settings()).unwrap().values();
        let powers = [1, 2, 2, 3, 3];
        for i in 0..5 {
            let want = a[i] * c.powi(powers[i]);
            prop_assert!((b[i] - want).abs() <= 1e-8 * want.abs().max(1.0),
                "F[{}]: {} vs {}", i, b[i], want);
        }
    }
}
