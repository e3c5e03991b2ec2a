#![allow(clippy::single_range_in_vec_init)]

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use approx::assert_abs_diff_eq;
use lpc_core::catalog::unit_curve;
use lpc_core::characterize::*;
use lpc_core::direction::*;
use lpc_core::frenet::{frenet_apparatus, FrenetApparatus};
use lpc_core::{GeometryError, Tolerances};
use proptest::prelude::*;

fn app(name: &str, params: &[(&str, f64)], n: usize) -> FrenetApparatus {
    let tol = Tolerances::default();
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    frenet_apparatus(&unit_curve(name, &p, n, &tol).unwrap(), &tol).unwrap()
}

fn flat(kappa: Vec<f64>, tau: Vec<f64>, h: f64) -> Curvatures {
    let n = kappa.len();
    Curvatures { h, kappa, tau, valid: vec![true; n], stride: 1 }
}

#[test]
fn helix_ratio_is_sqrt2() {
    let v = helix_invariant(&app("timelike_helix", &[], 2000), 1e-4).unwrap();
    assert!(v.is_constant);
    assert_abs_diff_eq!(v.mean, SQRT_2, epsilon = 1e-8);
    assert!(v.rel_spread < 1e-8, "{}", v.rel_spread);
}

#[test]
fn nonhelix_ratio_varies() {
    // tau/kappa = s on [0, 1.5]
    let v = helix_invariant(&app("intrinsic_nonhelix", &[], 2000), 1e-4).unwrap();
    assert!(!v.is_constant);
    assert!(v.rel_spread > 0.5, "{}", v.rel_spread);
}

#[test]
fn constancy_of_constant_and_sign_flipped_segments() {
    let c = ConstancyVerdict::over(vec![3.0; 10], &[0..10], 1e-12);
    assert_eq!(c.rel_spread, 0.0);
    assert!(c.is_constant);

    let mut vals = vec![2.0; 20];
    vals[12..].iter_mut().for_each(|v| *v = -2.0);
    let c = ConstancyVerdict::over(vals.clone(), &[0..10, 12..20], 1e-12);
    assert!(c.is_constant);
    assert_eq!(c.mean, 2.0);

    vals[12..].iter_mut().for_each(|v| *v = -2.5);
    let c = ConstancyVerdict::over(vals, &[0..10, 12..20], 1e-3);
    assert!(!c.is_constant);
    assert_abs_diff_eq!(c.rel_spread, 0.25, epsilon = 1e-12);
}

#[test]
fn constancy_with_no_nodes_is_not_constant() {
    let c = ConstancyVerdict::over(vec![1.0; 4], &[], 1.0);
    assert!(!c.is_constant);
    assert!(c.rel_spread.is_nan());
}

#[test]
fn spread_is_relative_only_above_unit_mean() {
    // mean 0.01: deviations count absolutely
    let vals = vec![0.01, 0.0101, 0.0099, 0.01];
    let c = ConstancyVerdict::over(vals, &[0..4], 1e-3);
    assert_abs_diff_eq!(c.rel_spread, 1e-4, epsilon = 1e-12);
    assert!(c.is_constant);
}

#[test]
fn slant_helix_minus_invariant_is_one() {
    // kappa = cosh, tau = sinh: kappa^2 - tau^2 = 1 and kappa^2 (tau/kappa)' = 1
    let s = slant_helix_invariant(&app("timelike_slant_helix", &[], 2000), 1e-4).unwrap();
    assert!(s.is_slant_helix);
    let m = s.variant(SlantVariant::Minus).unwrap();
    assert!(m.is_constant);
    assert_abs_diff_eq!(m.mean, 1.0, epsilon = 1e-6);
    // tau^2 - kappa^2 = -1 everywhere
    assert!(s.variant(SlantVariant::ReverseMinus).is_none());
    assert!(s.variant(SlantVariant::Plus).is_some_and(|p| !p.is_constant));
}

#[test]
fn helix_is_trivially_slant_with_zero_invariant() {
    let s = slant_helix_invariant(&app("timelike_helix", &[], 1000), 1e-4).unwrap();
    for (_, c) in &s.variants {
        assert!(c.is_constant);
        assert!(c.mean.abs() < 1e-8);
    }
}

#[test]
fn no_applicable_variant_without_nodes() {
    let mut c = flat(vec![1.0; 20], vec![0.5; 20], 0.1);
    c.valid = vec![false; 20];
    assert!(matches!(slant_helix_invariant_of(&c, 1e-4), Err(GeometryError::NoApplicableVariant)));
}

#[test]
fn zero_curvature_in_interior_is_degenerate() {
    let mut c = flat(vec![1.0; 20], vec![0.5; 20], 0.1);
    c.kappa[10] = 0.0;
    assert!(matches!(helix_invariant_of(&c, 1e-4), Err(GeometryError::DegenerateKappa { node: 10 })));
}

#[test]
fn slant_values_match_hand_computed_invariant() {
    // kappa = 1, tau = s^2: Plus invariant = 2s / (1 + s^4)^(3/2)
    let h = 0.01;
    let s: Vec<f64> = (0..=200).map(|k| k as f64 * h).collect();
    let c = flat(vec![1.0; s.len()], s.iter().map(|x| x * x).collect(), h);
    let (v, runs) = slant_values(&c, Some(SlantVariant::Plus));
    assert_eq!(runs, vec![2..199]);
    for k in runs[0].clone() {
        let x = s[k];
        assert_abs_diff_eq!(v[k], 2.0 * x / (1.0 + x.powi(4)).powf(1.5), epsilon = 1e-8);
    }
}

#[test]
fn plane_and_nonplane_donors() {
    let tol = Tolerances::default();
    assert!(is_plane_curve(&app("timelike_planar", &[], 1000), tol.tol_plane));
    assert!(is_plane_curve(&app("spacelike_planar", &[], 1000), tol.tol_plane));
    assert!(!is_plane_curve(&app("timelike_helix", &[], 1000), tol.tol_plane));
}

#[test]
fn evolute_partner_of_helix_has_plus_invariant_sqrt2() {
    let tol = Tolerances::default();
    let donor = unit_curve("timelike_helix", &BTreeMap::new(), 2000, &tol).unwrap();
    let p = construct_partner(&donor, &PartnerSpec::new(PartnerKind::Evolute, Case::I), &tol).unwrap();
    let s = slant_helix_invariant(&p.app, tol.tol_theorem).unwrap();
    let plus = s.variant(SlantVariant::Plus).unwrap();
    assert!(plus.is_constant, "{}", plus.rel_spread);
    assert_abs_diff_eq!(plus.mean.abs(), SQRT_2, epsilon = 1e-4);
}

fn suite(name: &str, spec: PartnerSpec) -> TheoremReport {
    let tol = Tolerances::default();
    let donor = unit_curve(name, &BTreeMap::new(), 2000, &tol).unwrap();
    theorem_suite(&donor, &spec, &tol).unwrap()
}

fn check<'a>(r: &'a TheoremReport, id: &str) -> &'a lpc_core::report::Check {
    r.report.get(id).unwrap_or_else(|| panic!("missing {id}"))
}

#[test]
fn theorem_suite_on_helix_chains() {
    let cases = [
        ("timelike_helix", PartnerSpec::new(PartnerKind::Evolute, Case::I), "evolute_helix_slant_helix"),
        ("timelike_helix", PartnerSpec::new(PartnerKind::Mannheim, Case::I), "mannheim_helix_slant_helix"),
        ("spacelike_helix_type2", PartnerSpec::new(PartnerKind::Mannheim, Case::Iii), "mannheim_helix_slant_helix"),
        ("timelike_helix", PartnerSpec::new(PartnerKind::Bertrand, Case::I).with_theta(0.7), "bertrand_helix_helix"),
        ("timelike_slant_helix", PartnerSpec::new(PartnerKind::Bertrand, Case::I).with_theta(0.7), "bertrand_slant_slant"),
    ];
    for (name, spec, id) in cases {
        let r = suite(name, spec);
        assert!(r.pass(), "{name} {}: {:?}", spec.label(), r.report.failures().collect::<Vec<_>>());
        for dir in ["forward", "converse"] {
            let c = check(&r, &format!("{id}.{dir}"));
            assert!(c.pass && c.max_residual < 1e-3, "{id}.{dir}: {c:?}");
        }
        assert!(check(&r, "corollary_identity").pass);
    }
}

#[test]
fn evolute_of_plane_curve_is_helix() {
    let r = suite("timelike_planar", PartnerSpec::new(PartnerKind::Evolute, Case::I).with_c0(1.0));
    assert!(r.donor.plane);
    assert!(r.partner.helix.is_constant);
    // tau_bar / kappa_bar = -tan c0 up to orientation
    assert_abs_diff_eq!(r.partner.helix.mean.abs(), 1f64.tan(), epsilon = 1e-4);
    assert!(check(&r, "evolute_plane_helix.forward").pass);
    assert!(r.pass());
}

#[test]
fn bertrand_partner_of_plane_curve_is_helix() {
    let r = suite("spacelike_planar_type2", PartnerSpec::new(PartnerKind::Bertrand, Case::I).with_theta(0.5));
    assert!(r.donor.plane);
    assert!(r.partner.helix.is_constant);
    assert!(check(&r, "bertrand_plane_helix.forward").notes.contains("holds"));
    assert!(r.pass());
}

#[test]
fn plane_bertrand_partner_of_helix() {
    // case ii: tanh(theta) = kappa / tau makes taubar vanish
    let r = suite("timelike_helix", PartnerSpec::new(PartnerKind::Bertrand, Case::Ii).with_theta(1f64.asinh()));
    assert!(r.partner.plane, "max |taubar| = {}", r.partner.max_abs_tau);
    let c = check(&r, "bertrand_plane_helix.converse");
    assert!(c.pass && c.notes.contains("holds"), "{c:?}");
    assert!(r.recovered.as_ref().unwrap().helix.is_constant);
}

#[test]
fn contrapositive_on_nonhelix_donor() {
    for spec in [
        PartnerSpec::new(PartnerKind::Evolute, Case::I),
        PartnerSpec::new(PartnerKind::Mannheim, Case::I),
        PartnerSpec::new(PartnerKind::Bertrand, Case::I).with_theta(0.7),
    ] {
        let r = suite("intrinsic_nonhelix", spec);
        assert!(!r.donor.helix.is_constant);
        match spec.kind {
            PartnerKind::Bertrand => assert!(!r.partner.helix.is_constant),
            _ => assert!(!r.partner.is_slant_helix()),
        }
        assert!(r.pass(), "{}: {:?}", spec.label(), r.report.failures().collect::<Vec<_>>());
        let fwd = r.report.checks.iter().find(|c| c.id.ends_with("helix.forward") || c.id == "bertrand_helix_helix.forward").unwrap();
        assert!(fwd.notes.contains("contrapositive holds"), "{fwd:?}");
    }
}

#[test]
fn verdicts_are_stable_under_refinement() {
    let tol = Tolerances::default();
    for name in ["timelike_helix", "spacelike_helix_type1", "timelike_planar", "intrinsic_nonhelix", "timelike_slant_helix"] {
        let a = classify(&app(name, &[], 1000), tol.tol_const, tol.tol_plane).unwrap();
        let b = classify(&app(name, &[], 2000), tol.tol_const, tol.tol_plane).unwrap();
        assert_eq!(a.helix.is_constant, b.helix.is_constant, "{name}");
        assert_eq!(a.is_slant_helix(), b.is_slant_helix(), "{name}");
        assert_eq!(a.plane, b.plane, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 12,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        rng_seed: proptest::test_runner::RngSeed::Fixed(lpc_core::config::seed_from_env()),
        ..ProptestConfig::default()
    })]

    #[test]
    fn helix_verdict_for_any_helix_parameters(a in 0.3f64..2.0, extra in 0.2f64..2.0) {
        let b = a + extra;
        let tol = Tolerances::default();
        for n in [600, 1200] {
            let v = helix_invariant(&app("timelike_helix", &[("a", a), ("b", b)], n), tol.tol_const).unwrap();
            prop_assert!(v.is_constant);
            prop_assert!((v.mean - b / a).abs() < 1e-6 * (b / a));
        }
    }

    #[test]
    fn constancy_is_scale_free_above_unit_mean(c in 1.0f64..100.0, eps in 1e-9f64..1e-5) {
        let vals = vec![c, c * (1.0 + eps), c * (1.0 - eps), c];
        let v = ConstancyVerdict::over(vals, &[0..4], 1e-4);
        prop_assert!(v.is_constant);
        prop_assert!(v.rel_spread <= eps * 1.0000001);
    }
}
