use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use lpc_core::catalog::unit_curve;
use lpc_core::direction::{construct_partner, Case, PartnerKind, PartnerSpec};
use lpc_core::export::*;
use lpc_core::frenet::frenet_apparatus;
use lpc_core::report::{Check, VerificationReport};
use lpc_core::{GeometryError, MinkVec3, Tolerances};

fn helix(n: usize) -> (lpc_core::curve::UnitSpeedCurve, lpc_core::frenet::FrenetApparatus) {
    let tol = Tolerances::default();
    let c = unit_curve("timelike_helix", &BTreeMap::new(), n, &tol).unwrap();
    let app = frenet_apparatus(&c, &tol).unwrap();
    (c, app)
}

#[test]
fn csv_file_round_trip_is_bit_exact() {
    let (c, app) = helix(100);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("helix.csv");
    export_csv(&c, &app, &path).unwrap();
    let rows = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 101);
    for (k, row) in rows.iter().enumerate() {
        let f = &app.samples[k];
        assert_eq!(row[0].to_bits(), f.s.to_bits());
        assert_eq!(row[1..4], c.positions[k].to_array());
        assert_eq!(row[4..7], f.t.to_array());
        assert_eq!(row[13].to_bits(), f.kappa.to_bits());
        assert_eq!(row[14].to_bits(), f.tau.to_bits());
        assert_eq!(row[15..18], [-1.0, 1.0, 1.0]);
    }
}

#[test]
fn csv_rejects_foreign_header_and_short_rows() {
    assert!(matches!(parse_csv("a,b,c\n1,2,3\n"), Err(GeometryError::InvalidArgument(_))));
    let short = format!("{CSV_HEADER}\n1,2,3\n");
    assert!(parse_csv(&short).is_err());
}

#[test]
fn unwritable_csv_path_is_io_error() {
    let (c, app) = helix(32);
    let dir = tempfile::tempdir().unwrap();
    let err = export_csv(&c, &app, &dir.path().join("missing/x.csv")).unwrap_err();
    assert!(matches!(err, GeometryError::Io { .. }));
    assert!(!err.is_usage());
}

#[test]
fn run_config_validation() {
    assert!(RunConfig::new("timelike_helix", 16).validate().is_ok());
    assert!(RunConfig::new("timelike_helix", 15).validate().is_err());
    let mut cfg = RunConfig::new("timelike_helix", 100);
    cfg.tolerances.tol_frenet = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn report_json_shape() {
    let mut r = VerificationReport::default();
    r.push(Check::new("b_check", "x", 1e-30, 1e-6));
    r.push(Check::new("a_check", "y", 2.0, 1.0));
    let cfg = RunConfig::new("timelike_helix", 100);
    let v = report_json(&r, &cfg);
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    assert_eq!(v["pass"], false);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["checks"][0]["max_residual"].as_f64(), Some(1e-30));
    let text = report_string(&r, &cfg);
    assert!(text.ends_with('\n'));
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, v);
}

#[test]
fn report_json_file_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let cfg = RunConfig::new("timelike_helix", 100);
    export_report_json(&VerificationReport::default(), &cfg, &path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn plane_projection() {
    let x = MinkVec3::new(1.0, 2.0, 3.0);
    assert_eq!(Plane::X1X2.project(&x), (1.0, 2.0));
    assert_eq!(Plane::X1X3.project(&x), (1.0, 3.0));
    assert_eq!("x2x3".parse::<Plane>().unwrap().project(&x), (2.0, 3.0));
    assert!(matches!("x4x1".parse::<Plane>(), Err(GeometryError::InvalidArgument(_))));
}

#[test]
fn empty_plot_is_usage_error() {
    let err = svg_string(&[], Plane::X2X3).unwrap_err();
    assert!(matches!(err, GeometryError::EmptyCurveList));
    assert!(err.is_usage());
}

#[test]
fn svg_fit_inverts_to_data_coordinates() {
    let (c, _) = helix(400);
    let tol = Tolerances::default();
    let spec = PartnerSpec::new(PartnerKind::Evolute, Case::I);
    let p = construct_partner(&c, &spec, &tol).unwrap();
    let curves = vec![
        PlotCurve { label: "donor".into(), role: Role::Donor, points: c.positions.clone() },
        PlotCurve { label: spec.label(), role: Role::Partner, points: p.curve.positions.clone() },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.svg");
    let fit = export_svg(&curves, &path, Plane::X2X3).unwrap();
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(FitTransform::from_svg(&svg), Some(fit));
    let lines = polyline_points(&svg);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].len(), c.positions.len());
    // the timelike helix projects onto the unit circle of the x2x3 plane
    for &q in &lines[0] {
        let (u, v) = fit.inverse(q);
        assert_abs_diff_eq!(u.hypot(v), 1.0, epsilon = 1e-6);
    }
    for &(px, py) in lines.iter().flatten() {
        assert!((0.0..=SVG_SIZE).contains(&px) && (0.0..=SVG_SIZE).contains(&py));
    }
}
