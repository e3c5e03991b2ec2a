//! Built-in analytic donor curves.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use crate::config::Tolerances;
use crate::curve::{reparametrize_arclength, sample_curve, CurveSpec, Jet, UnitSpeedCurve};
use crate::error::{GeometryError, Result};
use crate::frenet::CurveType;
use crate::lorentz::MinkVec3;

/// Curvatures known in closed form.
#[derive(Debug, Clone, Copy)]
pub enum Known {
    /// Constant `(kappa, tau)`.
    Constant(f64, f64),
    /// `tau = 0`, curvature varying.
    Planar,
    /// Prescribed as functions of arc length measured from the domain start.
    Intrinsic { kappa: fn(f64) -> f64, tau: fn(f64) -> f64 },
    /// No frame (vanishing curvature).
    Degenerate,
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Parameter names with defaults.
    pub params: &'static [(&'static str, f64)],
    /// `None` for curves without a Frenet frame.
    pub expected_type: Option<CurveType>,
    build: fn(&BTreeMap<String, f64>) -> Result<(CurveSpec, Known)>,
}

impl CatalogEntry {
    /// Defaults overlaid with `overrides`.
    pub fn resolve_params(&self, overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
        let mut p: BTreeMap<String, f64> = self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            if !p.contains_key(k) {
                return Err(GeometryError::ParamOutOfRange {
                    name: k.clone(),
                    value: *v,
                    reason: format!("`{}` has no parameter `{}`", self.name, k),
                });
            }
            if !v.is_finite() {
                return Err(GeometryError::ParamOutOfRange {
                    name: k.clone(),
                    value: *v,
                    reason: "must be finite".into(),
                });
            }
            p.insert(k.clone(), *v);
        }
        Ok(p)
    }

    pub fn spec(&self, overrides: &BTreeMap<String, f64>) -> Result<CurveSpec> {
        Ok(self.spec_and_known(overrides)?.0)
    }

    pub fn known(&self, overrides: &BTreeMap<String, f64>) -> Result<Known> {
        Ok(self.spec_and_known(overrides)?.1)
    }

    pub fn spec_and_known(&self, overrides: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
        (self.build)(&self.resolve_params(overrides)?)
    }
}

fn out_of_range(name: &str, value: f64, reason: &str) -> GeometryError {
    GeometryError::ParamOutOfRange {
        name: name.into(),
        value,
        reason: reason.into(),
    }
}

fn ab(p: &BTreeMap<String, f64>) -> (f64, f64) {
    (p["a"], p["b"])
}

fn timelike_helix(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let (a, b) = ab(p);
    if a <= 0.0 {
        return Err(out_of_range("a", a, "must be positive"));
    }
    if b <= a {
        return Err(out_of_range("b", b, "must exceed a for a timelike helix"));
    }
    let c2 = b * b - a * a;
    let spec = CurveSpec::new("timelike_helix", p.clone(), (0.0, PI), move |t| {
        let (s, c) = t.sin_cos();
        Jet {
            pos: MinkVec3::new(b * t, a * c, a * s),
            d1: MinkVec3::new(b, -a * s, a * c),
            d2: MinkVec3::new(0.0, -a * c, -a * s),
            d3: MinkVec3::new(0.0, a * s, -a * c),
        }
    })?;
    Ok((spec, Known::Constant(a / c2, b / c2)))
}

fn timelike_planar(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let a = p["a"];
    if a <= 1.0 {
        return Err(out_of_range("a", a, "must exceed 1 for a timelike tangent"));
    }
    let spec = CurveSpec::new("timelike_planar", p.clone(), (-1.0, 1.0), move |t| {
        let (s, c) = (t.sinh(), t.cosh());
        Jet {
            pos: MinkVec3::new(a * s, c, 0.0),
            d1: MinkVec3::new(a * c, s, 0.0),
            d2: MinkVec3::new(a * s, c, 0.0),
            d3: MinkVec3::new(a * c, s, 0.0),
        }
    })?;
    Ok((spec, Known::Planar))
}

fn spacelike_helix_type1(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let (a, b) = ab(p);
    if a <= 0.0 {
        return Err(out_of_range("a", a, "must be positive"));
    }
    if b <= 0.0 {
        return Err(out_of_range("b", b, "must be positive"));
    }
    let c2 = a * a + b * b;
    let spec = CurveSpec::new("spacelike_helix_type1", p.clone(), (0.0, 2.0), move |t| {
        let (s, c) = (t.sinh(), t.cosh());
        Jet {
            pos: MinkVec3::new(a * c, a * s, b * t),
            d1: MinkVec3::new(a * s, a * c, b),
            d2: MinkVec3::new(a * c, a * s, 0.0),
            d3: MinkVec3::new(a * s, a * c, 0.0),
        }
    })?;
    Ok((spec, Known::Constant(a / c2, b / c2)))
}

fn spacelike_helix_type2(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let (a, b) = ab(p);
    if a <= 0.0 {
        return Err(out_of_range("a", a, "must be positive"));
    }
    if b <= a {
        return Err(out_of_range("b", b, "must exceed a for a spacelike tangent"));
    }
    let c2 = b * b - a * a;
    let spec = CurveSpec::new("spacelike_helix_type2", p.clone(), (0.0, 2.0), move |t| {
        let (s, c) = (t.sinh(), t.cosh());
        Jet {
            pos: MinkVec3::new(a * s, a * c, b * t),
            d1: MinkVec3::new(a * c, a * s, b),
            d2: MinkVec3::new(a * s, a * c, 0.0),
            d3: MinkVec3::new(a * c, a * s, 0.0),
        }
    })?;
    Ok((spec, Known::Constant(a / c2, -b / c2)))
}

fn spacelike_planar(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let a = p["a"];
    if a <= 1.0 {
        return Err(out_of_range("a", a, "must exceed 1 for a spacelike tangent"));
    }
    let spec = CurveSpec::new("spacelike_planar", p.clone(), (-1.0, 1.0), move |t| {
        let (s, c) = (t.sinh(), t.cosh());
        Jet {
            pos: MinkVec3::new(c, a * s, 0.0),
            d1: MinkVec3::new(s, a * c, 0.0),
            d2: MinkVec3::new(c, a * s, 0.0),
            d3: MinkVec3::new(s, a * c, 0.0),
        }
    })?;
    Ok((spec, Known::Planar))
}

fn spacelike_planar_type2(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let (a, b) = ab(p);
    if a <= 0.0 || b <= 0.0 {
        return Err(out_of_range(if a <= 0.0 { "a" } else { "b" }, a.min(b), "must be positive"));
    }
    let spec = CurveSpec::new("spacelike_planar_type2", p.clone(), (0.0, PI), move |t| {
        let (s, c) = t.sin_cos();
        Jet {
            pos: MinkVec3::new(0.0, a * c, b * s),
            d1: MinkVec3::new(0.0, -a * s, b * c),
            d2: MinkVec3::new(0.0, -a * c, -b * s),
            d3: MinkVec3::new(0.0, a * s, -b * c),
        }
    })?;
    Ok((spec, Known::Planar))
}

fn build_line(name: &str, dir: MinkVec3, p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    let spec = CurveSpec::new(name, p.clone(), (0.0, 1.0), move |t| Jet {
        pos: dir * t,
        d1: dir,
        ..Default::default()
    })?;
    Ok((spec, Known::Degenerate))
}

#[derive(Clone, Copy)]
struct State {
    pos: MinkVec3,
    t: MinkVec3,
    n: MinkVec3,
    b: MinkVec3,
}

impl State {
    fn axpy(self, h: f64, d: State) -> State {
        State {
            pos: self.pos + d.pos * h,
            t: self.t + d.t * h,
            n: self.n + d.n * h,
            b: self.b + d.b * h,
        }
    }
}

/// Unit-speed curve with prescribed curvature and torsion, obtained by
/// integrating the Frenet system with classical RK4.
struct Intrinsic {
    ct: CurveType,
    kappa: fn(f64) -> f64,
    dkappa: fn(f64) -> f64,
    tau: fn(f64) -> f64,
    s0: f64,
    spacing: f64,
    checkpoints: Vec<State>,
}

const SUBSTEPS: usize = 8;
const CHECKPOINTS: usize = 1024;

impl Intrinsic {
    fn new(
        ct: CurveType,
        kappa: fn(f64) -> f64,
        dkappa: fn(f64) -> f64,
        tau: fn(f64) -> f64,
        domain: (f64, f64),
        start: State,
    ) -> Self {
        let mut c = Intrinsic {
            ct,
            kappa,
            dkappa,
            tau,
            s0: domain.0,
            spacing: (domain.1 - domain.0) / CHECKPOINTS as f64,
            checkpoints: Vec::with_capacity(CHECKPOINTS + 1),
        };
        c.checkpoints.push(start);
        let mut x = start;
        for k in 0..CHECKPOINTS {
            let s = c.s0 + k as f64 * c.spacing;
            x = c.advance(x, s, c.spacing, SUBSTEPS);
            c.checkpoints.push(x);
        }
        c
    }

    fn rhs(&self, s: f64, x: &State) -> State {
        let (et, _, eb) = self.ct.signs();
        let (k, t) = ((self.kappa)(s), (self.tau)(s));
        State {
            pos: x.t,
            t: x.n * k,
            n: x.t * (eb * k) + x.b * t,
            b: x.n * (et * t),
        }
    }

    fn advance(&self, mut x: State, mut s: f64, len: f64, steps: usize) -> State {
        let h = len / steps as f64;
        for _ in 0..steps {
            let k1 = self.rhs(s, &x);
            let k2 = self.rhs(s + 0.5 * h, &x.axpy(0.5 * h, k1));
            let k3 = self.rhs(s + 0.5 * h, &x.axpy(0.5 * h, k2));
            let k4 = self.rhs(s + h, &x.axpy(h, k3));
            x = State {
                pos: x.pos + (k1.pos + k2.pos * 2.0 + k3.pos * 2.0 + k4.pos) * (h / 6.0),
                t: x.t + (k1.t + k2.t * 2.0 + k3.t * 2.0 + k4.t) * (h / 6.0),
                n: x.n + (k1.n + k2.n * 2.0 + k3.n * 2.0 + k4.n) * (h / 6.0),
                b: x.b + (k1.b + k2.b * 2.0 + k3.b * 2.0 + k4.b) * (h / 6.0),
            };
            s += h;
        }
        x
    }

    fn jet(&self, s: f64) -> Jet {
        let k = (((s - self.s0) / self.spacing).floor().max(0.0) as usize).min(CHECKPOINTS);
        let sk = self.s0 + k as f64 * self.spacing;
        let d = s - sk;
        let steps = (d.abs() / self.spacing * SUBSTEPS as f64).ceil() as usize;
        let x = if steps == 0 {
            self.checkpoints[k]
        } else {
            self.advance(self.checkpoints[k], sk, d, steps)
        };
        let (_, _, eb) = self.ct.signs();
        let (kap, tau) = ((self.kappa)(s), (self.tau)(s));
        Jet {
            pos: x.pos,
            d1: x.t,
            d2: x.n * kap,
            d3: x.n * (self.dkappa)(s) + (x.t * (eb * kap) + x.b * tau) * kap,
        }
    }
}

fn timelike_start() -> State {
    State {
        pos: MinkVec3::ZERO,
        t: MinkVec3::E1,
        n: MinkVec3::E2,
        b: MinkVec3::E3,
    }
}

fn intrinsic_spec(
    name: &str,
    p: &BTreeMap<String, f64>,
    domain: (f64, f64),
    kappa: fn(f64) -> f64,
    dkappa: fn(f64) -> f64,
    tau: fn(f64) -> f64,
) -> Result<(CurveSpec, Known)> {
    let c = Intrinsic::new(CurveType::Timelike, kappa, dkappa, tau, domain, timelike_start());
    let spec = CurveSpec::new(name, p.clone(), domain, move |t| c.jet(t))?;
    Ok((spec, Known::Intrinsic { kappa, tau }))
}

fn intrinsic_nonhelix(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    fn one(_: f64) -> f64 {
        1.0
    }
    fn zero(_: f64) -> f64 {
        0.0
    }
    fn ident(s: f64) -> f64 {
        s
    }
    intrinsic_spec("intrinsic_nonhelix", p, (0.0, 1.5), one, zero, ident)
}

fn timelike_slant_helix(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    intrinsic_spec("timelike_slant_helix", p, (-1.0, 1.0), f64::cosh, f64::sinh, f64::sinh)
}

static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "timelike_helix",
        description: "(b t, a cos t, a sin t), t in [0, pi]",
        params: &[("a", 1.0), ("b", SQRT_2)],
        expected_type: Some(CurveType::Timelike),
        build: timelike_helix,
    },
    CatalogEntry {
        name: "timelike_planar",
        description: "(a sinh t, cosh t, 0), t in [-1, 1]",
        params: &[("a", 2.0)],
        expected_type: Some(CurveType::Timelike),
        build: timelike_planar,
    },
    CatalogEntry {
        name: "spacelike_helix_type1",
        description: "(a cosh t, a sinh t, b t), t in [0, 2]",
        params: &[("a", 2.0), ("b", 1.0)],
        expected_type: Some(CurveType::SpacelikeType1),
        build: spacelike_helix_type1,
    },
    CatalogEntry {
        name: "spacelike_helix_type2",
        description: "(a sinh t, a cosh t, b t), t in [0, 2]",
        params: &[("a", 1.0), ("b", SQRT_2)],
        expected_type: Some(CurveType::SpacelikeType2),
        build: spacelike_helix_type2,
    },
    CatalogEntry {
        name: "spacelike_planar",
        description: "(cosh t, a sinh t, 0), t in [-1, 1]",
        params: &[("a", 2.0)],
        expected_type: Some(CurveType::SpacelikeType1),
        build: spacelike_planar,
    },
    CatalogEntry {
        name: "spacelike_planar_type2",
        description: "(0, a cos t, b sin t), t in [0, pi]",
        params: &[("a", 2.0), ("b", 1.0)],
        expected_type: Some(CurveType::SpacelikeType2),
        build: spacelike_planar_type2,
    },
    CatalogEntry {
        name: "intrinsic_nonhelix",
        description: "timelike, kappa = 1, tau = s, s in [0, 1.5]",
        params: &[],
        expected_type: Some(CurveType::Timelike),
        build: intrinsic_nonhelix,
    },
    CatalogEntry {
        name: "timelike_slant_helix",
        description: "timelike, kappa = cosh s, tau = sinh s, s in [-1, 1]",
        params: &[],
        expected_type: Some(CurveType::Timelike),
        build: timelike_slant_helix,
    },
    CatalogEntry {
        name: "straight_line",
        description: "(t, 0, 0), t in [0, 1]",
        params: &[],
        expected_type: None,
        build: line_timelike,
    },
    CatalogEntry {
        name: "spacelike_line",
        description: "(0, t, 0), t in [0, 1]",
        params: &[],
        expected_type: None,
        build: line_spacelike,
    },
];

fn line_timelike(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    build_line("straight_line", MinkVec3::E1, p)
}

fn line_spacelike(p: &BTreeMap<String, f64>) -> Result<(CurveSpec, Known)> {
    build_line("spacelike_line", MinkVec3::E2, p)
}

pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GeometryError::UnknownCurve(name.to_string()))
}

pub fn curve_catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<CurveSpec> {
    entry(name)?.spec(params)
}

/// Sample a catalog curve on `n + 1` nodes and reparametrize by arc length.
pub fn unit_curve(name: &str, params: &BTreeMap<String, f64>, n: usize, tol: &Tolerances) -> Result<UnitSpeedCurve> {
    let spec = curve_catalog(name, params)?;
    reparametrize_arclength(&sample_curve(&spec, n, tol)?, n, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::{classify_curve_type, frenet_apparatus};

    fn none() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn every_entry_has_its_declared_type() {
        let tol = Tolerances::default();
        for e in catalog() {
            let c = unit_curve(e.name, &none(), 400, &tol).unwrap();
            match e.expected_type {
                Some(t) => assert_eq!(classify_curve_type(&c, &tol).unwrap(), t, "{}", e.name),
                None => assert!(matches!(
                    classify_curve_type(&c, &tol),
                    Err(GeometryError::FrameUndefined { .. })
                )),
            }
        }
    }

    #[test]
    fn unknown_names_and_bad_params() {
        assert!(matches!(curve_catalog("nope", &none()), Err(GeometryError::UnknownCurve(_))));
        let p: BTreeMap<String, f64> = [("b".to_string(), 0.5)].into();
        assert!(matches!(
            curve_catalog("timelike_helix", &p),
            Err(GeometryError::ParamOutOfRange { .. })
        ));
        let p: BTreeMap<String, f64> = [("zzz".to_string(), 1.0)].into();
        assert!(matches!(
            curve_catalog("timelike_helix", &p),
            Err(GeometryError::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn closed_form_curvatures() {
        let tol = Tolerances::default();
        for e in catalog() {
            let (spec, known) = e.spec_and_known(&none()).unwrap();
            let lo = spec.domain.0;
            let Ok(app) = frenet_apparatus(&unit_curve(e.name, &none(), 2000, &tol).unwrap(), &tol) else {
                assert!(matches!(known, Known::Degenerate));
                continue;
            };
            let s0 = app.samples[0].s;
            for x in &app.samples {
                let (k, t) = match known {
                    Known::Constant(k, t) => (k, t),
                    Known::Planar => (x.kappa, 0.0),
                    Known::Intrinsic { kappa, tau } => {
                        let s = x.s - s0 + lo;
                        (kappa(s), tau(s))
                    }
                    Known::Degenerate => unreachable!(),
                };
                assert!((x.kappa - k).abs() < 1e-8, "{} kappa {} vs {}", e.name, x.kappa, k);
                assert!((x.tau - t).abs() < 1e-8, "{} tau {} vs {}", e.name, x.tau, t);
            }
        }
    }

    #[test]
    fn timelike_planar_curvature_formula() {
        // (2 sinh t, cosh t): kappa = |x1' x2'' - x2' x1''| / |<a', a'>|^(3/2) = 2 / (3 cosh^2 t + 1)^(3/2)
        let tol = Tolerances::default();
        let spec = curve_catalog("timelike_planar", &none()).unwrap();
        let sampled = sample_curve(&spec, 2000, &tol).unwrap();
        let app = frenet_apparatus(&reparametrize_arclength(&sampled, 2000, &tol).unwrap(), &tol).unwrap();
        // endpoints correspond to t = -1 and t = 1
        for (x, t) in [(&app.samples[0], -1.0f64), (&app.samples[2000], 1.0)] {
            let oracle = 2.0 / (3.0 * t.cosh().powi(2) + 1.0).powf(1.5);
            assert!((x.kappa - oracle).abs() < 1e-10);
        }
    }
}
