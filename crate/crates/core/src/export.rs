//! CSV, JSON report and SVG output.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Tolerances;
use crate::curve::UnitSpeedCurve;
use crate::direction::{Case, PartnerKind};
use crate::error::{GeometryError, Result};
use crate::frenet::FrenetApparatus;
use crate::lorentz::MinkVec3;
use crate::report::VerificationReport;

pub const CSV_HEADER: &str = "s,x1,x2,x3,T1,T2,T3,N1,N2,N3,B1,B2,B3,kappa,tau,eps_T,eps_N,eps_B";
pub const SCHEMA_VERSION: &str = "1";
pub const MIN_NODES: usize = 16;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| GeometryError::io(path, e))
}

/// Everything that determines a run, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub curve: String,
    pub params: std::collections::BTreeMap<String, f64>,
    /// Grid intervals; the grid has `n + 1` nodes.
    pub n: usize,
    pub kind: Option<PartnerKind>,
    pub case: Option<Case>,
    pub c0: f64,
    pub theta: f64,
    /// Partner starting point; defaults to the donor's first point plus e2.
    pub base: Option<[f64; 3]>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub outputs: Vec<String>,
}

impl RunConfig {
    /// Defaults for `curve` with `n` grid intervals.
    pub fn new(curve: impl Into<String>, n: usize) -> Self {
        RunConfig {
            curve: curve.into(),
            params: Default::default(),
            n,
            kind: None,
            case: None,
            c0: 0.0,
            theta: 0.0,
            base: None,
            tolerances: Tolerances::default(),
            seed: 42,
            outputs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_NODES {
            return Err(GeometryError::ParamOutOfRange {
                name: "n".into(),
                value: self.n as f64,
                reason: format!("need at least {MIN_NODES}"),
            });
        }
        let tol = serde_json::to_value(self.tolerances).expect("tolerances serialize");
        for (name, v) in tol.as_object().expect("object") {
            let v = v.as_f64().unwrap_or(f64::NAN);
            if !(v > 0.0) {
                return Err(GeometryError::ParamOutOfRange {
                    name: name.clone(),
                    value: v,
                    reason: "tolerances must be positive".into(),
                });
            }
        }
        Ok(())
    }
}

/// CSV text for a curve and its apparatus. Numbers use the shortest decimal
/// that parses back to the same `f64`.
pub fn csv_string(curve: &UnitSpeedCurve, app: &FrenetApparatus) -> Result<String> {
    if curve.positions.len() != app.len() {
        return Err(GeometryError::GridMismatch {
            left: curve.positions.len(),
            right: app.len(),
        });
    }
    let (et, en, eb) = app.curve_type.signs();
    let mut out = String::with_capacity(app.len() * 300);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (x, f) in curve.positions.iter().zip(&app.samples) {
        let (x, t, n, b) = (x.to_array(), f.t.to_array(), f.n.to_array(), f.b.to_array());
        let fields = [
            f.s, x[0], x[1], x[2], t[0], t[1], t[2], n[0], n[1], n[2], b[0], b[1], b[2], f.kappa, f.tau, et, en, eb,
        ];
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn export_csv(curve: &UnitSpeedCurve, app: &FrenetApparatus, path: &Path) -> Result<()> {
    write_file(path, &csv_string(curve, app)?)
}

/// Rows of a CSV written by [`csv_string`], one array per node in header order.
pub fn parse_csv(text: &str) -> Result<Vec<[f64; 18]>> {
    let mut lines = text.split('\n');
    if lines.next() != Some(CSV_HEADER) {
        return Err(GeometryError::InvalidArgument("CSV header does not match".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let mut row = [0.0; 18];
        let mut count = 0;
        for (j, field) in line.split(',').enumerate() {
            if j >= 18 {
                count = j + 1;
                break;
            }
            row[j] = f64::from_str(field)
                .map_err(|e| GeometryError::InvalidArgument(format!("CSV row {}: field {j}: {e}", i + 1)))?;
            count = j + 1;
        }
        if count != 18 {
            return Err(GeometryError::InvalidArgument(format!("CSV row {} has {count} fields", i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The versioned report document. `serde_json` maps keep keys sorted.
pub fn report_json(report: &VerificationReport, config: &RunConfig) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "checks": report.checks,
        "verdicts": report.verdicts,
        "pass": report.pass(),
    })
}

pub fn report_string(report: &VerificationReport, config: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(&report_json(report, config)).expect("serializable");
    s.push('\n');
    s
}

pub fn export_report_json(report: &VerificationReport, config: &RunConfig, path: &Path) -> Result<()> {
    write_file(path, &report_string(report, config))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    X1X2,
    X1X3,
    X2X3,
}

impl Plane {
    pub fn axes(self) -> (usize, usize) {
        match self {
            Plane::X1X2 => (0, 1),
            Plane::X1X3 => (0, 2),
            Plane::X2X3 => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Plane::X1X2 => "x1x2",
            Plane::X1X3 => "x1x3",
            Plane::X2X3 => "x2x3",
        }
    }

    pub fn project(self, x: &MinkVec3) -> (f64, f64) {
        let (a, b) = self.axes();
        let x = x.to_array();
        (x[a], x[b])
    }
}

impl FromStr for Plane {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1x2" => Ok(Plane::X1X2),
            "x1x3" => Ok(Plane::X1X3),
            "x2x3" => Ok(Plane::X2X3),
            _ => Err(GeometryError::InvalidArgument(format!("plane must be x1x2, x1x3 or x2x3, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Donor,
    Partner,
}

#[derive(Debug, Clone)]
pub struct PlotCurve {
    pub label: String,
    pub role: Role,
    pub points: Vec<MinkVec3>,
}

pub const SVG_SIZE: f64 = 800.0;
const MARGIN: f64 = 0.05;

/// Map from projected coordinates to SVG pixels, equal scale on both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitTransform {
    pub u0: f64,
    pub v0: f64,
    pub scale: f64,
}

impl FitTransform {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut umin, mut umax, mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (u, v) in points {
            umin = umin.min(u);
            umax = umax.max(u);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let span = (umax - umin).max(vmax - vmin);
        let scale = if span > 0.0 { SVG_SIZE * (1.0 - 2.0 * MARGIN) / span } else { 1.0 };
        FitTransform {
            u0: 0.5 * (umin + umax),
            v0: 0.5 * (vmin + vmax),
            scale,
        }
    }

    pub fn apply(&self, (u, v): (f64, f64)) -> (f64, f64) {
        let c = 0.5 * SVG_SIZE;
        (c + (u - self.u0) * self.scale, c - (v - self.v0) * self.scale)
    }

    pub fn inverse(&self, (px, py): (f64, f64)) -> (f64, f64) {
        let c = 0.5 * SVG_SIZE;
        (self.u0 + (px - c) / self.scale, self.v0 - (py - c) / self.scale)
    }

    /// Read the transform recorded on the root element of an SVG from [`svg_string`].
    pub fn from_svg(svg: &str) -> Option<Self> {
        let attr = svg.split("data-fit=\"").nth(1)?.split('"').next()?;
        let mut it = attr.split(' ').map(f64::from_str);
        let (u0, v0, scale) = (it.next()?.ok()?, it.next()?.ok()?, it.next()?.ok()?);
        Some(FitTransform { u0, v0, scale })
    }
}

/// SVG 1.1 document with one polyline per curve.
pub fn svg_string(curves: &[PlotCurve], plane: Plane) -> Result<(String, FitTransform)> {
    if curves.is_empty() {
        return Err(GeometryError::EmptyCurveList);
    }
    let fit = FitTransform::fit(curves.iter().flat_map(|c| c.points.iter().map(move |p| plane.project(p))));
    let (ua, va) = plane.axes();
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" data-plane="{}" data-fit="{} {} {}">"#,
        plane.name(),
        fit.u0,
        fit.v0,
        fit.scale
    )
    .unwrap();
    writeln!(s, "<title>projection onto the {} plane</title>", plane.name()).unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    let m = MARGIN * SVG_SIZE;
    let far = SVG_SIZE - m;
    writeln!(s, r##"<g stroke="#888888" stroke-width="1"><line x1="{m}" y1="{far}" x2="{far}" y2="{far}"/><line x1="{m}" y1="{far}" x2="{m}" y2="{m}"/></g>"##).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">x{}</text>"#,
        0.5 * SVG_SIZE,
        SVG_SIZE - 0.3 * m,
        ua + 1
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle" transform="rotate(-90 {} {})">x{}</text>"#,
        0.6 * m,
        0.5 * SVG_SIZE,
        0.6 * m,
        0.5 * SVG_SIZE,
        va + 1
    )
    .unwrap();
    for c in curves {
        let (stroke, dash) = match c.role {
            Role::Donor => ("#1f4e99", ""),
            Role::Partner => ("#c0392b", r#" stroke-dasharray="6 3""#),
        };
        let role = match c.role {
            Role::Donor => "donor",
            Role::Partner => "partner",
        };
        write!(
            s,
            r#"<polyline class="{role}" data-label="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash} points=""#,
            escape(&c.label)
        )
        .unwrap();
        for (i, p) in c.points.iter().enumerate() {
            let (x, y) = fit.apply(plane.project(p));
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{x},{y}").unwrap();
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    Ok((s, fit))
}

pub fn export_svg(curves: &[PlotCurve], path: &Path, plane: Plane) -> Result<FitTransform> {
    let (text, fit) = svg_string(curves, plane)?;
    write_file(path, &text)?;
    Ok(fit)
}

/// Pixel coordinates of every polyline in an SVG from [`svg_string`].
pub fn polyline_points(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.split("<polyline")
        .skip(1)
        .filter_map(|chunk| chunk.split("points=\"").nth(1)?.split('"').next())
        .map(|pts| {
            pts.split(' ')
                .filter_map(|pair| {
                    let (x, y) = pair.split_once(',')?;
                    Some((x.parse().ok()?, y.parse().ok()?))
                })
                .collect()
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
