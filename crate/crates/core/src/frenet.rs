//! Frenet apparatus of non-lightlike curves.
//!
//! Conventions: `T' = kN`, `N' = eps_B k T + tau B`, `B' = eps_T tau N`,
//! with `B = eps_T eps_N (T x N)` and `eps_B = -eps_T eps_N`. Curvature is
//! always positive; torsion is read off the third derivative as
//! `tau = eps_B <alpha''', B> / k`, which is the value the system above
//! requires.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::curve::{Tier, UnitSpeedCurve};
use crate::error::{GeometryError, Result};
use crate::lorentz::{causal_character, CausalCharacter, MinkVec3};
use crate::numerics::derivative;
use crate::report::Check;

/// Causal type of a Frenet curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveType {
    Timelike,
    /// Spacelike with timelike principal normal.
    SpacelikeType1,
    /// Spacelike with timelike binormal.
    SpacelikeType2,
}

impl CurveType {
    /// `(eps_T, eps_N, eps_B)`.
    pub fn signs(self) -> (f64, f64, f64) {
        match self {
            CurveType::Timelike => (-1.0, 1.0, 1.0),
            CurveType::SpacelikeType1 => (1.0, -1.0, 1.0),
            CurveType::SpacelikeType2 => (1.0, 1.0, -1.0),
        }
    }

    pub fn eps_t(self) -> f64 {
        self.signs().0
    }

    pub fn eps_n(self) -> f64 {
        self.signs().1
    }

    pub fn eps_b(self) -> f64 {
        self.signs().2
    }

    /// Type from the causal characters of the tangent and principal normal.
    pub fn from_characters(tangent: CausalCharacter, normal: CausalCharacter) -> Option<Self> {
        use CausalCharacter::*;
        match (tangent, normal) {
            (Timelike, Spacelike) => Some(CurveType::Timelike),
            (Spacelike, Timelike) => Some(CurveType::SpacelikeType1),
            (Spacelike, Spacelike) => Some(CurveType::SpacelikeType2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CurveType::Timelike => "timelike",
            CurveType::SpacelikeType1 => "spacelike_type1",
            CurveType::SpacelikeType2 => "spacelike_type2",
        }
    }
}

impl fmt::Display for CurveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetSample {
    pub s: f64,
    pub t: MinkVec3,
    pub n: MinkVec3,
    pub b: MinkVec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Frame, curvature and torsion at every node of a unit-speed curve.
#[derive(Debug, Clone)]
pub struct FrenetApparatus {
    pub curve_type: CurveType,
    pub samples: Vec<FrenetSample>,
    pub h: f64,
    pub tier: Tier,
    /// Nodes whose values are trustworthy. Excised (near-zero curvature) nodes
    /// and, on difference-tier curves, the two outermost nodes of each end are false.
    pub valid: Vec<bool>,
    /// Number of nodes excised for small curvature.
    pub excised: usize,
}

impl FrenetApparatus {
    /// Build from samples with every node valid.
    pub fn from_samples(curve_type: CurveType, samples: Vec<FrenetSample>, h: f64, tier: Tier) -> Self {
        let valid = vec![true; samples.len()];
        FrenetApparatus {
            curve_type,
            samples,
            h,
            tier,
            valid,
            excised: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.samples.iter().map(|x| x.kappa).collect()
    }

    pub fn tau(&self) -> Vec<f64> {
        self.samples.iter().map(|x| x.tau).collect()
    }

    /// Maximal runs of valid nodes, each shrunk by `trim` at both ends; runs
    /// that vanish are dropped.
    pub fn segments(&self, trim: usize) -> Vec<Range<usize>> {
        valid_runs(&self.valid)
            .into_iter()
            .filter(|r| r.len() > 2 * trim)
            .map(|r| r.start + trim..r.end - trim)
            .collect()
    }

    /// Valid runs long enough for a difference stencil, untrimmed.
    pub fn stencil_segments(&self) -> Vec<Range<usize>> {
        valid_runs(&self.valid)
            .into_iter()
            .filter(|r| r.len() >= 5)
            .collect()
    }

    /// Difference-based derivative of a per-node quantity, computed
    /// separately on every stencil segment. Values outside segments are NaN.
    pub fn derivative_of<T, F>(&self, nan: T, f: F) -> Vec<T>
    where
        T: crate::numerics::Linear,
        F: Fn(&FrenetSample) -> T,
    {
        let mut out = vec![nan; self.len()];
        for r in self.stencil_segments() {
            let vals: Vec<T> = self.samples[r.clone()].iter().map(&f).collect();
            for (k, d) in derivative(&vals, self.h).into_iter().enumerate() {
                out[r.start + k] = d;
            }
        }
        out
    }

    /// Nodes where a once-differentiated quantity is fourth-order accurate.
    pub fn derivative_interior(&self) -> Vec<usize> {
        self.stencil_segments()
            .into_iter()
            .flat_map(|r| r.start + 2..r.end - 2)
            .collect()
    }

    /// Valid nodes that [`Self::derivative_interior`] leaves out.
    pub fn derivative_boundary(&self) -> Vec<usize> {
        self.stencil_segments()
            .into_iter()
            .flat_map(|r| {
                let a = r.start..(r.start + 2).min(r.end);
                let b = (r.end - 2).max(r.start + 2)..r.end;
                a.chain(b)
            })
            .collect()
    }

    pub fn valid_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.valid[k]).collect()
    }
}

pub(crate) fn valid_runs(valid: &[bool]) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (k, &v) in valid.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(k),
            (false, Some(a)) => {
                runs.push(a..k);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        runs.push(a..valid.len());
    }
    runs
}

enum NodeClass {
    Type(CurveType),
    Flat(f64),
    NullNormal,
}

fn classify_node(d1: MinkVec3, d2: MinkVec3, tol: &Tolerances) -> NodeClass {
    if d2.norm_inf() <= tol.kappa_min {
        return NodeClass::Flat(d2.norm_sq().abs().sqrt());
    }
    let tc = CausalCharacter::from_sign(d1.norm_sq());
    match causal_character(d2, tol.tol_null) {
        CausalCharacter::Lightlike => NodeClass::NullNormal,
        nc => match CurveType::from_characters(tc, nc) {
            Some(ct) => NodeClass::Type(ct),
            // two orthogonal timelike vectors cannot occur on a true curve
            None => NodeClass::NullNormal,
        },
    }
}

fn node_sample(s: f64, d1: MinkVec3, d2: MinkVec3, d3: MinkVec3, ct: CurveType) -> FrenetSample {
    let (et, en, eb) = ct.signs();
    let kappa = d2.norm_sq().abs().sqrt();
    let t = d1;
    let n = d2 / kappa;
    let b = t.cross(n) * (et * en);
    let tau = eb * d3.inner(b) / kappa;
    FrenetSample { s, t, n, b, kappa, tau }
}

/// Causal type of `c`, required to be the same at every node.
pub fn classify_curve_type(c: &UnitSpeedCurve, tol: &Tolerances) -> Result<CurveType> {
    let mut first: Option<CurveType> = None;
    for k in 0..c.len() {
        match classify_node(c.d1[k], c.d2[k], tol) {
            NodeClass::Flat(kappa) => return Err(GeometryError::FrameUndefined { node: k, kappa }),
            NodeClass::NullNormal => return Err(GeometryError::LightlikeNormal { node: k }),
            NodeClass::Type(ct) => match first {
                None => first = Some(ct),
                Some(f) if f != ct => {
                    return Err(GeometryError::MixedType {
                        node: k,
                        first: f.to_string(),
                        other: ct.to_string(),
                    })
                }
                _ => {}
            },
        }
    }
    first.ok_or(GeometryError::GridTooSmall { len: 0, min: 5 })
}

fn margin_mask(n: usize, tier: Tier) -> Vec<bool> {
    let mut valid = vec![true; n];
    if tier == Tier::FiniteDifference {
        for k in [0, 1, n - 2, n - 1] {
            valid[k] = false;
        }
    }
    valid
}

/// Frenet apparatus of a curve that must have a well-defined frame at every node.
pub fn frenet_apparatus(c: &UnitSpeedCurve, tol: &Tolerances) -> Result<FrenetApparatus> {
    let ct = classify_curve_type(c, tol)?;
    let samples = (0..c.len())
        .map(|k| node_sample(c.s[k], c.d1[k], c.d2[k], c.d3[k], ct))
        .collect();
    Ok(FrenetApparatus {
        curve_type: ct,
        samples,
        h: c.h,
        tier: c.tier,
        valid: margin_mask(c.len(), c.tier),
        excised: 0,
    })
}

/// Frenet apparatus that tolerates isolated zones of vanishing curvature.
///
/// Nodes whose curvature falls below `max(kappa_min, excise_ratio * max kappa)`
/// or whose normal is lightlike are marked invalid. Fails with
/// `DegenerateKappaBar` when fewer than 16 valid nodes remain.
pub fn frenet_apparatus_excising(c: &UnitSpeedCurve, tol: &Tolerances) -> Result<FrenetApparatus> {
    let n = c.len();
    let kappas: Vec<f64> = c.d2.iter().map(|d| d.norm_sq().abs().sqrt()).collect();
    let kmax = kappas.iter().cloned().fold(0.0, f64::max);
    let threshold = tol.kappa_min.max(tol.excise_ratio * kmax);
    let mut valid = margin_mask(n, c.tier);
    let mut excised = 0;
    let mut ct: Option<CurveType> = None;
    let mut types = vec![None; n];
    for k in 0..n {
        let class = classify_node(c.d1[k], c.d2[k], tol);
        let keep = kappas[k] >= threshold && matches!(class, NodeClass::Type(_));
        if !keep {
            excised += 1;
            valid[k] = false;
            continue;
        }
        if let NodeClass::Type(t) = class {
            types[k] = Some(t);
            if valid[k] {
                match ct {
                    None => ct = Some(t),
                    Some(f) if f != t => {
                        return Err(GeometryError::MixedType {
                            node: k,
                            first: f.to_string(),
                            other: t.to_string(),
                        })
                    }
                    _ => {}
                }
            }
        }
    }
    let valid_count = valid.iter().filter(|v| **v).count();
    let ct = match ct {
        Some(ct) if valid_count >= 16 => ct,
        _ => {
            return Err(GeometryError::DegenerateKappaBar {
                valid: valid_count,
                total: n,
            })
        }
    };
    let samples = (0..n)
        .map(|k| {
            if types[k].is_some() && kappas[k] > 0.0 {
                node_sample(c.s[k], c.d1[k], c.d2[k], c.d3[k], ct)
            } else {
                FrenetSample {
                    s: c.s[k],
                    t: c.d1[k],
                    n: MinkVec3::ZERO,
                    b: MinkVec3::ZERO,
                    kappa: kappas[k],
                    tau: 0.0,
                }
            }
        })
        .collect();
    Ok(FrenetApparatus {
        curve_type: ct,
        samples,
        h: c.h,
        tier: c.tier,
        valid,
        excised,
    })
}

/// Largest violation of the Lorentz-orthonormality relations over valid nodes.
pub fn frame_orthonormality_residual(app: &FrenetApparatus) -> f64 {
    let (et, en, eb) = app.curve_type.signs();
    app.valid_nodes()
        .into_iter()
        .map(|k| {
            let x = &app.samples[k];
            let b_cross = x.t.cross(x.n) * (et * en);
            [
                (x.t.norm_sq() - et).abs(),
                (x.n.norm_sq() - en).abs(),
                (x.b.norm_sq() - eb).abs(),
                x.t.inner(x.n).abs(),
                x.t.inner(x.b).abs(),
                x.n.inner(x.b).abs(),
                (x.b - b_cross).norm_inf(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Residual of one row of the Frenet system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResidual {
    /// Maximum over nodes with a full central stencil.
    pub max_interior: f64,
    /// Maximum over the valid nodes next to segment ends (reported only).
    pub max_boundary: f64,
    pub per_node: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetResidualReport {
    /// `T' - kN`, `N' - eps_B k T - tau B`, `B' - eps_T tau N`.
    pub rows: [RowResidual; 3],
    pub tolerance: f64,
    pub pass: bool,
}

impl FrenetResidualReport {
    pub fn max_interior(&self) -> f64 {
        self.rows.iter().map(|r| r.max_interior).fold(0.0, f64::max)
    }
}

/// Compare difference quotients of the sampled frame with the Frenet system.
pub fn check_frenet_equations(app: &FrenetApparatus, tol: f64) -> FrenetResidualReport {
    let (et, _, eb) = app.curve_type.signs();
    let nan = MinkVec3::new(f64::NAN, f64::NAN, f64::NAN);
    let dt = app.derivative_of(nan, |x| x.t);
    let dn = app.derivative_of(nan, |x| x.n);
    let db = app.derivative_of(nan, |x| x.b);
    let interior = app.derivative_interior();
    let boundary = app.derivative_boundary();
    let row = |res: &dyn Fn(usize) -> f64| {
        let mut per_node = vec![f64::NAN; app.len()];
        for &k in interior.iter().chain(&boundary) {
            per_node[k] = res(k);
        }
        let max_over = |idx: &[usize]| idx.iter().map(|&k| per_node[k]).fold(0.0, f64::max);
        RowResidual {
            max_interior: max_over(&interior),
            max_boundary: max_over(&boundary),
            per_node,
        }
    };
    let s = &app.samples;
    let rows = [
        row(&|k| (dt[k] - s[k].n * s[k].kappa).norm_inf()),
        row(&|k| (dn[k] - s[k].t * (eb * s[k].kappa) - s[k].b * s[k].tau).norm_inf()),
        row(&|k| (db[k] - s[k].n * (et * s[k].tau)).norm_inf()),
    ];
    let pass = !interior.is_empty() && rows.iter().all(|r| r.max_interior < tol);
    FrenetResidualReport {
        rows,
        tolerance: tol,
        pass,
    }
}

/// Frenet-system rows and frame orthonormality as report checks.
pub fn donor_frame_checks(app: &FrenetApparatus, tol: &Tolerances) -> Vec<Check> {
    let ftol = match app.tier {
        Tier::Analytic => tol.tol_frenet,
        Tier::FiniteDifference => tol.tol_frenet_fd,
    };
    let rep = check_frenet_equations(app, ftol);
    let mut out: Vec<Check> = rep
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Check::new(format!("frenet_eq_row{}", i + 1), "Frenet system, donor", row.max_interior, ftol)
                .note(format!("boundary max {:.3e}", row.max_boundary))
        })
        .collect();
    out.push(Check::new(
        "frame_orthonormality",
        "Lorentz-orthonormal donor frame",
        frame_orthonormality_residual(app),
        tol.tol_frame,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{reparametrize_arclength, sample_curve, CurveSpec, Jet};
    use std::collections::BTreeMap;
    use std::f64::consts::SQRT_2;

    fn unit(spec: &CurveSpec, n: usize) -> UnitSpeedCurve {
        let tol = Tolerances::default();
        reparametrize_arclength(&sample_curve(spec, n, &tol).unwrap(), n, &tol).unwrap()
    }

    fn timelike_helix() -> CurveSpec {
        CurveSpec::new("h", BTreeMap::new(), (0.0, 3.0), |t| Jet {
            pos: MinkVec3::new(SQRT_2 * t, t.cos(), t.sin()),
            d1: MinkVec3::new(SQRT_2, -t.sin(), t.cos()),
            d2: MinkVec3::new(0.0, -t.cos(), -t.sin()),
            d3: MinkVec3::new(0.0, t.sin(), -t.cos()),
        })
        .unwrap()
    }

    #[test]
    fn timelike_helix_apparatus() {
        // Oracle, by hand: T = (sqrt2, -sin, cos), N = (0, -cos, -sin),
        // B = -(T x N) = (-1, sqrt2 sin, -sqrt2 cos), B' = -sqrt2 N, so with
        // B' = eps_T tau N and eps_T = -1 the torsion is +sqrt2.
        let tol = Tolerances::default();
        let app = frenet_apparatus(&unit(&timelike_helix(), 2000), &tol).unwrap();
        assert_eq!(app.curve_type, CurveType::Timelike);
        for x in &app.samples {
            assert!((x.kappa - 1.0).abs() < 1e-12);
            assert!((x.tau - SQRT_2).abs() < 1e-12);
            let s = x.s;
            let b = MinkVec3::new(-1.0, SQRT_2 * s.sin(), -SQRT_2 * s.cos());
            assert!((x.b - b).norm_inf() < 1e-10);
        }
        assert!(frame_orthonormality_residual(&app) < 1e-12);
        let rep = check_frenet_equations(&app, 1e-6);
        assert!(rep.pass, "{:?}", rep.max_interior());
    }

    #[test]
    fn planar_curve_has_zero_torsion() {
        let spec = CurveSpec::new("p", BTreeMap::new(), (-1.0, 1.0), |t| Jet {
            pos: MinkVec3::new(2.0 * t.sinh(), t.cosh(), 0.0),
            d1: MinkVec3::new(2.0 * t.cosh(), t.sinh(), 0.0),
            d2: MinkVec3::new(2.0 * t.sinh(), t.cosh(), 0.0),
            d3: MinkVec3::new(2.0 * t.cosh(), t.sinh(), 0.0),
        })
        .unwrap();
        let tol = Tolerances::default();
        let app = frenet_apparatus(&unit(&spec, 1000), &tol).unwrap();
        assert_eq!(app.curve_type, CurveType::Timelike);
        assert!(app.samples.iter().all(|x| x.tau.abs() < 1e-8));
        assert!(check_frenet_equations(&app, 1e-6).pass);
    }

    #[test]
    fn straight_line_has_no_frame() {
        let spec = CurveSpec::new("l", BTreeMap::new(), (0.0, 1.0), |t| Jet {
            pos: MinkVec3::new(0.0, t, 0.0),
            d1: MinkVec3::E2,
            ..Default::default()
        })
        .unwrap();
        let tol = Tolerances::default();
        assert!(matches!(
            frenet_apparatus(&unit(&spec, 32), &tol),
            Err(GeometryError::FrameUndefined { node: 0, .. })
        ));
    }

    #[test]
    fn lightlike_normal_is_rejected() {
        let tol = Tolerances::default();
        let n = 20;
        let c = UnitSpeedCurve::from_parts(
            0.0,
            0.1,
            vec![MinkVec3::ZERO; n],
            vec![MinkVec3::E3; n],
            vec![MinkVec3::new(1.0, 1.0, 0.0); n],
            vec![MinkVec3::ZERO; n],
            Tier::Analytic,
            &tol,
        )
        .unwrap();
        assert!(matches!(
            frenet_apparatus(&c, &tol),
            Err(GeometryError::LightlikeNormal { node: 0 })
        ));
    }

    #[test]
    fn normal_changing_character_is_mixed() {
        // tangent e2; normal jumps from e3 (spacelike) to e1 (timelike)
        let tol = Tolerances::default();
        let n = 20;
        let d2: Vec<MinkVec3> = (0..n)
            .map(|k| if k < n / 2 { MinkVec3::E3 } else { MinkVec3::E1 })
            .collect();
        let c = UnitSpeedCurve::from_parts(
            0.0,
            0.1,
            vec![MinkVec3::ZERO; n],
            vec![MinkVec3::E2; n],
            d2,
            vec![MinkVec3::ZERO; n],
            Tier::Analytic,
            &tol,
        )
        .unwrap();
        assert!(matches!(
            classify_curve_type(&c, &tol),
            Err(GeometryError::MixedType { .. })
        ));
    }

    #[test]
    fn corrupted_frames_fail_the_check() {
        let tol = Tolerances::default();
        let app = frenet_apparatus(&unit(&timelike_helix(), 2000), &tol).unwrap();
        let mut swapped = app.clone();
        for x in &mut swapped.samples {
            std::mem::swap(&mut x.n, &mut x.b);
        }
        let rep = check_frenet_equations(&swapped, 1e-6);
        assert!(!rep.pass);
        assert!(rep.max_interior() > 0.1);

        let mut halved = app.clone();
        for x in &mut halved.samples {
            x.kappa = 0.5;
        }
        let rep = check_frenet_equations(&halved, 1e-6);
        assert!(!rep.pass);
        assert!(rep.rows[0].max_interior > 0.1);
    }

    #[test]
    fn valid_runs_and_segments() {
        let runs = valid_runs(&[false, true, true, false, true, true, true, true, true, true]);
        assert_eq!(runs, vec![1..3, 4..10]);
        let app = FrenetApparatus {
            curve_type: CurveType::Timelike,
            samples: vec![
                FrenetSample {
                    s: 0.0,
                    t: MinkVec3::E1,
                    n: MinkVec3::E2,
                    b: MinkVec3::E3,
                    kappa: 1.0,
                    tau: 0.0
                };
                10
            ],
            h: 0.1,
            tier: Tier::Analytic,
            valid: vec![false, true, true, false, true, true, true, true, true, true],
            excised: 2,
        };
        assert_eq!(app.segments(1), vec![2..2, 5..9].into_iter().filter(|r| !r.is_empty()).collect::<Vec<_>>());
        assert_eq!(app.derivative_interior(), vec![6, 7]);
        assert_eq!(app.derivative_boundary(), vec![4, 5, 8, 9]);
    }
}
