//! Curve representations, arc-length reparametrization and integral curves.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::config::Tolerances;
use crate::error::{GeometryError, Result};
use crate::lorentz::{causal_character, CausalCharacter, MinkVec3};
use crate::numerics::{
    cumulative_integral, derivative, gauss_legendre5, second_derivative, MonotoneCubic,
};
use crate::par::{self, Exec};

/// Position and the first three derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub pos: MinkVec3,
    pub d1: MinkVec3,
    pub d2: MinkVec3,
    pub d3: MinkVec3,
}

type JetFn = dyn Fn(f64) -> Jet + Send + Sync;

/// An analytic curve `t -> alpha(t)` with derivatives up to order three.
#[derive(Clone)]
pub struct CurveSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub domain: (f64, f64),
    eval: Arc<JetFn>,
}

impl fmt::Debug for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveSpec")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl CurveSpec {
    pub fn new<F>(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        domain: (f64, f64),
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Jet + Send + Sync + 'static,
    {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GeometryError::InvalidArgument(format!(
                "curve domain [{lo}, {hi}] is empty or not finite"
            )));
        }
        Ok(CurveSpec {
            name: name.into(),
            params,
            domain,
            eval: Arc::new(eval),
        })
    }

    pub fn jet(&self, t: f64) -> Jet {
        (self.eval)(t)
    }

    /// Same curve on a different parameter interval.
    pub fn with_domain(&self, domain: (f64, f64)) -> Result<Self> {
        let mut c = self.clone();
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(GeometryError::InvalidArgument(format!(
                "curve domain [{}, {}] is empty or not finite",
                domain.0, domain.1
            )));
        }
        c.domain = domain;
        Ok(c)
    }
}

/// How derivative data was obtained; decides which tolerance tier applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Tier {
    Analytic,
    FiniteDifference,
}

/// Samples of a curve on a uniform parameter grid.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub grid: Vec<f64>,
    pub jets: Vec<Jet>,
    pub tangent: CausalCharacter,
    /// The analytic curve the samples came from, when known.
    pub source: Option<CurveSpec>,
}

/// A curve sampled on a uniform arc-length grid.
#[derive(Debug, Clone)]
pub struct UnitSpeedCurve {
    pub s: Vec<f64>,
    pub h: f64,
    pub positions: Vec<MinkVec3>,
    pub d1: Vec<MinkVec3>,
    pub d2: Vec<MinkVec3>,
    pub d3: Vec<MinkVec3>,
    pub character: CausalCharacter,
    pub tier: Tier,
}

impl UnitSpeedCurve {
    /// Assemble from per-node data, checking the unit-speed and grid invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        s0: f64,
        h: f64,
        positions: Vec<MinkVec3>,
        d1: Vec<MinkVec3>,
        d2: Vec<MinkVec3>,
        d3: Vec<MinkVec3>,
        tier: Tier,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = positions.len();
        if n < 5 {
            return Err(GeometryError::GridTooSmall { len: n, min: 5 });
        }
        if d1.len() != n || d2.len() != n || d3.len() != n {
            return Err(GeometryError::InvalidArgument(
                "per-node arrays differ in length".into(),
            ));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(GeometryError::InvalidArgument(format!("grid spacing {h}")));
        }
        let character = unit_character(&d1, tol)?;
        let s = (0..n).map(|k| s0 + h * k as f64).collect();
        Ok(UnitSpeedCurve {
            s,
            h,
            positions,
            d1,
            d2,
            d3,
            character,
            tier,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.h * (self.len() - 1) as f64
    }
}

fn unit_character(d1: &[MinkVec3], tol: &Tolerances) -> Result<CausalCharacter> {
    let sign0 = d1[0].norm_sq().signum();
    for (k, v) in d1.iter().enumerate() {
        let q = v.norm_sq();
        if !v.is_finite() || (q.abs() - 1.0).abs() > tol.tol_unit || q.signum() != sign0 {
            return Err(GeometryError::NonUnitField { node: k, norm_sq: q });
        }
    }
    Ok(CausalCharacter::from_sign(sign0))
}

/// Evaluate `spec` on `n + 1` uniform parameter nodes.
pub fn sample_curve(spec: &CurveSpec, n: usize, tol: &Tolerances) -> Result<SampledCurve> {
    sample_curve_with(spec, n, tol, Exec::default())
}

pub fn sample_curve_with(
    spec: &CurveSpec,
    n: usize,
    tol: &Tolerances,
    exec: Exec,
) -> Result<SampledCurve> {
    if n < 16 {
        return Err(GeometryError::GridTooSmall { len: n, min: 16 });
    }
    let (lo, hi) = spec.domain;
    let dt = (hi - lo) / n as f64;
    let grid: Vec<f64> = (0..=n)
        .map(|k| if k == n { hi } else { lo + dt * k as f64 })
        .collect();
    let jets = par::map_range(exec, n + 1, |k| spec.jet(grid[k]));
    let mut tangent = None;
    for (k, j) in jets.iter().enumerate() {
        let finite = j.pos.is_finite() && j.d1.is_finite() && j.d2.is_finite() && j.d3.is_finite();
        if !finite {
            return Err(GeometryError::InvalidArgument(format!(
                "non-finite sample at t = {}",
                grid[k]
            )));
        }
        let c = causal_character(j.d1, tol.tol_null);
        match (c, tangent) {
            (CausalCharacter::Lightlike, _) => {
                return Err(GeometryError::LightlikeTangent { node: k, t: grid[k] })
            }
            (c, None) => tangent = Some(c),
            // a change of causal character crosses the light cone between nodes
            (c, Some(t0)) if c != t0 => {
                return Err(GeometryError::LightlikeTangent { node: k, t: grid[k] })
            }
            _ => {}
        }
    }
    Ok(SampledCurve {
        grid,
        jets,
        tangent: tangent.expect("n >= 16 nodes"),
        source: Some(spec.clone()),
    })
}

fn speed(j: &Jet) -> f64 {
    j.d1.norm_sq().abs().sqrt()
}

/// Chain rule from parameter-`t` derivatives to arc-length derivatives.
pub fn arclength_jet(j: &Jet) -> Jet {
    let eps = j.d1.norm_sq().signum();
    let sig = speed(j);
    let a12 = j.d1.inner(j.d2);
    let sig1 = eps * a12 / sig;
    let sig2 = (eps * (j.d2.norm_sq() + j.d1.inner(j.d3)) - sig1 * sig1) / sig;
    let s2 = sig * sig;
    let s3 = s2 * sig;
    let s4 = s3 * sig;
    let s5 = s4 * sig;
    Jet {
        pos: j.pos,
        d1: j.d1 / sig,
        d2: j.d2 / s2 - j.d1 * (sig1 / s3),
        d3: j.d3 / s3 - j.d2 * (3.0 * sig1 / s4) - j.d1 * (sig2 / s4)
            + j.d1 * (3.0 * sig1 * sig1 / s5),
    }
}

/// Resample on `n_out + 1` nodes uniform in arc length, starting at `s = 0`.
pub fn reparametrize_arclength(
    c: &SampledCurve,
    n_out: usize,
    tol: &Tolerances,
) -> Result<UnitSpeedCurve> {
    reparametrize_arclength_with(c, n_out, tol, Exec::default())
}

pub fn reparametrize_arclength_with(
    c: &SampledCurve,
    n_out: usize,
    tol: &Tolerances,
    exec: Exec,
) -> Result<UnitSpeedCurve> {
    let n = c.grid.len();
    if n < 4 || n_out < 4 {
        return Err(GeometryError::GridTooSmall { len: n.min(n_out + 1), min: 5 });
    }
    for (k, j) in c.jets.iter().enumerate() {
        if causal_character(j.d1, tol.tol_null) == CausalCharacter::Lightlike {
            return Err(GeometryError::LightlikeTangent { node: k, t: c.grid[k] });
        }
    }
    let dt = (c.grid[n - 1] - c.grid[0]) / (n - 1) as f64;
    let speeds: Vec<f64> = c.jets.iter().map(speed).collect();
    let arc = cumulative_integral(&speeds, dt, 0.0)?;
    if let Some(k) = (1..n).find(|&k| arc[k] <= arc[k - 1]) {
        return Err(GeometryError::NonMonotone { node: k });
    }
    let total = arc[n - 1];
    let h = total / n_out as f64;
    let inverse = MonotoneCubic::new(arc.clone(), c.grid.clone())?;
    let targets: Vec<f64> = (0..=n_out).map(|k| h * k as f64).collect();

    match &c.source {
        Some(spec) => {
            let t_of_s = |k: usize| -> f64 {
                if k == 0 {
                    return c.grid[0];
                }
                if k == n_out {
                    return c.grid[n - 1];
                }
                let target = targets[k];
                let mut t = inverse.eval(target);
                for _ in 0..12 {
                    let i = c.grid.partition_point(|&g| g <= t).clamp(1, n - 1) - 1;
                    let s_here =
                        arc[i] + gauss_legendre5(|u| speed(&spec.jet(u)), c.grid[i], t);
                    let step = (s_here - target) / speed(&spec.jet(t));
                    t = (t - step).clamp(c.grid[0], c.grid[n - 1]);
                    if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
                        break;
                    }
                }
                t
            };
            let jets = par::map_range(exec, n_out + 1, |k| arclength_jet(&spec.jet(t_of_s(k))));
            let (mut pos, mut d1, mut d2, mut d3) = (vec![], vec![], vec![], vec![]);
            for j in jets {
                pos.push(j.pos);
                d1.push(j.d1);
                d2.push(j.d2);
                d3.push(j.d3);
            }
            UnitSpeedCurve::from_parts(0.0, h, pos, d1, d2, d3, Tier::Analytic, tol)
        }
        None => {
            // Hermite interpolation of positions, then differences on the new grid.
            let pos: Vec<MinkVec3> = targets
                .iter()
                .map(|&s| {
                    let t = inverse.eval(s);
                    let i = c.grid.partition_point(|&g| g <= t).clamp(1, n - 1) - 1;
                    hermite(&c.jets[i], &c.jets[i + 1], c.grid[i], c.grid[i + 1], t)
                })
                .collect();
            let raw = derivative(&pos, h);
            let d1: Vec<MinkVec3> = raw
                .iter()
                .map(|v| *v / v.norm_sq().abs().sqrt())
                .collect();
            let d2 = derivative(&d1, h);
            let d3 = second_derivative(&d1, h);
            let loose = Tolerances {
                tol_unit: tol.tol_unit.max(1e-6),
                ..*tol
            };
            UnitSpeedCurve::from_parts(0.0, h, pos, d1, d2, d3, Tier::FiniteDifference, &loose)
        }
    }
}

fn hermite(a: &Jet, b: &Jet, ta: f64, tb: f64, t: f64) -> MinkVec3 {
    let h = tb - ta;
    let u = (t - ta) / h;
    let u2 = u * u;
    let u3 = u2 * u;
    a.pos * (2.0 * u3 - 3.0 * u2 + 1.0)
        + a.d1 * ((u3 - 2.0 * u2 + u) * h)
        + b.pos * (-2.0 * u3 + 3.0 * u2)
        + b.d1 * ((u3 - u2) * h)
}

/// The curve whose tangent is `field`, starting at `base`, on the uniform
/// arc-length grid `s0 + k h`. Higher derivatives come from differences of the field.
pub fn integral_curve(
    s0: f64,
    h: f64,
    field: &[MinkVec3],
    base: MinkVec3,
    tol: &Tolerances,
) -> Result<UnitSpeedCurve> {
    if field.len() < 5 {
        return Err(GeometryError::GridTooSmall { len: field.len(), min: 5 });
    }
    unit_character(field, tol)?;
    let positions = cumulative_integral(field, h, base)?;
    let d2 = derivative(field, h);
    let d3 = second_derivative(field, h);
    UnitSpeedCurve::from_parts(s0, h, positions, field.to_vec(), d2, d3, Tier::FiniteDifference, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn helix(a: f64, b: f64) -> CurveSpec {
        CurveSpec::new("helix", BTreeMap::new(), (0.0, 3.0), move |t| Jet {
            pos: MinkVec3::new(b * t, a * t.cos(), a * t.sin()),
            d1: MinkVec3::new(b, -a * t.sin(), a * t.cos()),
            d2: MinkVec3::new(0.0, -a * t.cos(), -a * t.sin()),
            d3: MinkVec3::new(0.0, a * t.sin(), -a * t.cos()),
        })
        .unwrap()
    }

    fn line(dir: MinkVec3) -> CurveSpec {
        CurveSpec::new("line", BTreeMap::new(), (0.0, 1.0), move |t| Jet {
            pos: dir * t,
            d1: dir,
            d2: MinkVec3::ZERO,
            d3: MinkVec3::ZERO,
        })
        .unwrap()
    }

    #[test]
    fn sampling_helix() {
        let tol = Tolerances::default();
        let c = sample_curve(&helix(1.0, SQRT_2), 200, &tol).unwrap();
        assert_eq!(c.jets.len(), 201);
        assert_eq!(c.tangent, CausalCharacter::Timelike);
        for j in &c.jets {
            assert!((j.d1.norm_sq() + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sampling_rejects_small_and_lightlike() {
        let tol = Tolerances::default();
        assert!(matches!(
            sample_curve(&line(MinkVec3::E2), 15, &tol),
            Err(GeometryError::GridTooSmall { .. })
        ));
        let c = sample_curve(&line(MinkVec3::E2), 16, &tol).unwrap();
        assert!(c.jets.iter().all(|j| j.d1 == MinkVec3::E2));
        assert!(matches!(
            sample_curve(&line(MinkVec3::new(1.0, 1.0, 0.0)), 16, &tol),
            Err(GeometryError::LightlikeTangent { node: 0, .. })
        ));
    }

    #[test]
    fn unit_speed_input_is_unchanged() {
        let tol = Tolerances::default();
        let c = sample_curve(&helix(1.0, SQRT_2), 400, &tol).unwrap();
        let u = reparametrize_arclength(&c, 400, &tol).unwrap();
        for k in 0..=400 {
            assert!((u.s[k] - c.grid[k]).abs() < 1e-10);
            assert!((u.positions[k] - c.jets[k].pos).norm_inf() < 1e-10);
        }
    }

    #[test]
    fn line_lengths() {
        let tol = Tolerances::default();
        let c = sample_curve(&line(MinkVec3::new(0.0, 2.0, 0.0)), 64, &tol).unwrap();
        let u = reparametrize_arclength(&c, 64, &tol).unwrap();
        assert!((u.length() - 2.0).abs() < 1e-10);
        let c = sample_curve(&line(MinkVec3::new(1.0, 2.0, 2.0)), 64, &tol).unwrap();
        let u = reparametrize_arclength(&c, 64, &tol).unwrap();
        assert!((u.length() - 7f64.sqrt()).abs() < 1e-8);
        assert_eq!(u.character, CausalCharacter::Spacelike);
    }

    #[test]
    fn non_unit_speed_helix_becomes_unit_speed() {
        // speed^2 = a^2 - b^2 = 3 for a spacelike circular helix
        let tol = Tolerances::default();
        let c = sample_curve(&helix(2.0, 1.0), 300, &tol).unwrap();
        let u = reparametrize_arclength(&c, 300, &tol).unwrap();
        assert!((u.length() - 3.0 * 3f64.sqrt()).abs() < 1e-10);
        for k in 0..u.len() {
            assert!((u.d1[k].norm_sq() - 1.0).abs() < 1e-12);
            assert!(u.d1[k].inner(u.d2[k]).abs() < 1e-12);
            // curvature of this helix is a / (a^2 - b^2)
            assert!((u.d2[k].norm_sq().sqrt() - 2.0 / 3.0).abs() < 1e-12);
        }
        // node positions sit at the requested arc length: t = s / sqrt(3)
        for k in [0, 17, 150, 299] {
            let t = u.s[k] / 3f64.sqrt();
            assert!((u.positions[k] - MinkVec3::new(t, 2.0 * t.cos(), 2.0 * t.sin())).norm_inf() < 1e-12);
        }
    }

    #[test]
    fn sampled_only_fallback_is_close() {
        let tol = Tolerances::default();
        let mut c = sample_curve(&helix(2.0, 1.0), 600, &tol).unwrap();
        c.source = None;
        let u = reparametrize_arclength(&c, 600, &tol).unwrap();
        assert_eq!(u.tier, Tier::FiniteDifference);
        for k in 2..u.len() - 2 {
            assert!((u.d2[k].norm_sq().sqrt() - 2.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn integral_curve_straight_line() {
        let tol = Tolerances::default();
        let field = vec![MinkVec3::E2; 21];
        let b = integral_curve(0.0, 0.1, &field, MinkVec3::ZERO, &tol).unwrap();
        assert!((b.positions[20] - MinkVec3::new(0.0, 2.0, 0.0)).norm_inf() < 1e-12);
    }

    #[test]
    fn integral_curve_of_tangent_reproduces_curve() {
        let tol = Tolerances::default();
        let n = 2000;
        let c = sample_curve(&helix(1.0, SQRT_2), n, &tol).unwrap();
        let u = reparametrize_arclength(&c, n, &tol).unwrap();
        let b = integral_curve(0.0, u.h, &u.d1, u.positions[0], &tol).unwrap();
        let bound = 5.0 * u.h.powi(4) * n as f64;
        for k in 0..=n {
            assert!((b.positions[k] - u.positions[k]).norm_inf() < bound.min(1e-8));
        }
    }

    #[test]
    fn integral_curve_rejects_non_unit() {
        let tol = Tolerances::default();
        let mut field = vec![MinkVec3::E2; 10];
        field[4] = MinkVec3::new(0.0, 1.1, 0.0);
        assert!(matches!(
            integral_curve(0.0, 0.1, &field, MinkVec3::ZERO, &tol),
            Err(GeometryError::NonUnitField { node: 4, .. })
        ));
    }
}
