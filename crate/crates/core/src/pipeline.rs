//! End-to-end runs shared by the command line, the acceptance suite and the benches.

use std::str::FromStr;

use serde_json::json;

use crate::catalog::{catalog, curve_catalog};
use crate::characterize::{classify, constancy_tol, plane_tol, theorem_suite_for};
use crate::config::Tolerances;
use crate::curve::{reparametrize_arclength_with, sample_curve_with, UnitSpeedCurve};
use crate::direction::{construct_partner, is_admissible, verify_partner_relation, Case, PartnerKind, PartnerSpec};
use crate::error::{GeometryError, Result};
use crate::export::RunConfig;
use crate::frenet::{donor_frame_checks, frenet_apparatus, FrenetApparatus};
use crate::lorentz::MinkVec3;
use crate::par::{self, Exec};
use crate::report::VerificationReport;

/// Deliberate corruption of a donor frame, for exercising the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Exchange N and B at every node.
    SwapNb,
    /// Halve the reported curvature.
    KappaHalf,
}

impl Fault {
    pub fn name(self) -> &'static str {
        match self {
            Fault::SwapNb => "swap-nb",
            Fault::KappaHalf => "kappa-half",
        }
    }
}

impl FromStr for Fault {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap-nb" => Ok(Fault::SwapNb),
            "kappa-half" => Ok(Fault::KappaHalf),
            _ => Err(GeometryError::InvalidArgument(format!(
                "unknown fault '{s}' (expected swap-nb or kappa-half)"
            ))),
        }
    }
}

pub fn inject_fault(app: &mut FrenetApparatus, fault: Fault) {
    for x in &mut app.samples {
        match fault {
            Fault::SwapNb => std::mem::swap(&mut x.n, &mut x.b),
            Fault::KappaHalf => x.kappa *= 0.5,
        }
    }
}

/// Unit-speed donor curve and its strict apparatus.
pub fn load_donor(cfg: &RunConfig) -> Result<(UnitSpeedCurve, FrenetApparatus)> {
    load_donor_with(cfg, Exec::default())
}

pub fn load_donor_with(cfg: &RunConfig, exec: Exec) -> Result<(UnitSpeedCurve, FrenetApparatus)> {
    cfg.validate()?;
    let tol = &cfg.tolerances;
    let spec = curve_catalog(&cfg.curve, &cfg.params)?;
    let curve = reparametrize_arclength_with(&sample_curve_with(&spec, cfg.n, tol, exec)?, cfg.n, tol, exec)?;
    let app = frenet_apparatus(&curve, tol)?;
    Ok((curve, app))
}

/// Partner spec from the run configuration; kind and case are required.
pub fn partner_spec(cfg: &RunConfig) -> Result<PartnerSpec> {
    let kind = cfg.kind.ok_or_else(|| GeometryError::InvalidArgument("--kind is required".into()))?;
    let case = cfg.case.ok_or_else(|| GeometryError::InvalidArgument("--case is required".into()))?;
    let spec = PartnerSpec::new(kind, case).with_c0(cfg.c0).with_theta(cfg.theta);
    Ok(match cfg.base {
        Some([a, b, c]) => spec.with_base(MinkVec3::new(a, b, c)),
        None => spec,
    })
}

/// Relation checks, donor Frenet checks and the theorem suite in one report.
pub fn run_verify(cfg: &RunConfig, fault: Option<Fault>) -> Result<VerificationReport> {
    let spec = partner_spec(cfg)?;
    let (curve, mut app) = load_donor(cfg)?;
    let tol = &cfg.tolerances;
    let partner = construct_partner(&curve, &spec, tol)?;
    if let Some(f) = fault {
        inject_fault(&mut app, f);
    }
    let mut report = verify_partner_relation(&app, &partner.app, &spec, tol)?;
    report.extend(theorem_suite_for(&partner, &spec, tol)?.report);
    if let Some(f) = fault {
        report.verdict("injected_fault", f.name());
    }
    Ok(report)
}

/// Helix, slant-helix and plane verdicts for the donor and, when a partner
/// spec is configured, for the partner.
pub fn run_classify(cfg: &RunConfig) -> Result<VerificationReport> {
    let (curve, app) = load_donor(cfg)?;
    let tol = &cfg.tolerances;
    let mut report = VerificationReport::default();
    report.checks.extend(donor_frame_checks(&app, tol));
    let dv = classify(&app, constancy_tol(&app, tol), plane_tol(&app, tol))?;
    report.verdict("donor_type", app.curve_type.to_string());
    report.verdict("donor", dv.to_json());
    if cfg.kind.is_some() {
        let spec = partner_spec(cfg)?;
        let p = construct_partner(&curve, &spec, tol)?;
        let pv = classify(&p.app, constancy_tol(&p.app, tol), plane_tol(&p.app, tol))?;
        report.verdict("partner_type", p.app.curve_type.to_string());
        report.verdict("partner", pv.to_json());
        report.verdict("excised_nodes", p.app.excised);
    }
    Ok(report)
}

/// One donor and partner spec of a catalog sweep.
#[derive(Debug, Clone)]
pub struct SweepJob {
    pub curve: &'static str,
    pub spec: PartnerSpec,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub job: SweepJob,
    /// `Ok(pass)` for a completed verification, the error text otherwise.
    pub outcome: std::result::Result<bool, String>,
}

/// Every admissible (catalog curve, kind, case) with `c0` and `theta` from the given lists.
pub fn sweep_jobs(c0s: &[f64], thetas: &[f64]) -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for e in catalog() {
        let Some(ct) = e.expected_type else { continue };
        for kind in PartnerKind::ALL {
            for case in Case::ALL {
                if !is_admissible(kind, case, ct) {
                    continue;
                }
                let specs: Vec<PartnerSpec> = match kind {
                    PartnerKind::Bertrand => thetas.iter().map(|&t| PartnerSpec::new(kind, case).with_theta(t)).collect(),
                    _ => c0s.iter().map(|&c| PartnerSpec::new(kind, case).with_c0(c)).collect(),
                };
                jobs.extend(specs.into_iter().map(|spec| SweepJob { curve: e.name, spec }));
            }
        }
    }
    jobs
}

/// Verify every job. Jobs run under `exec`; each job is sequential inside.
pub fn run_sweep(jobs: &[SweepJob], n: usize, tol: &Tolerances, exec: Exec) -> Vec<SweepRow> {
    par::map_slice(exec, jobs, |job| {
        let cfg = RunConfig {
            kind: Some(job.spec.kind),
            case: Some(job.spec.case),
            c0: job.spec.c0,
            theta: job.spec.theta,
            tolerances: *tol,
            ..RunConfig::new(job.curve, n)
        };
        let outcome = (|| {
            let (curve, app) = load_donor_with(&cfg, Exec::Sequential)?;
            let partner = construct_partner(&curve, &job.spec, tol)?;
            let mut r = verify_partner_relation(&app, &partner.app, &job.spec, tol)?;
            r.extend(theorem_suite_for(&partner, &job.spec, tol)?.report);
            Ok::<_, GeometryError>(r.pass())
        })()
        .map_err(|e| e.to_string());
        SweepRow { job: job.clone(), outcome }
    })
}

/// Compact JSON summary of a sweep.
pub fn sweep_summary(rows: &[SweepRow]) -> serde_json::Value {
    let passed = rows.iter().filter(|r| r.outcome == Ok(true)).count();
    let failed = rows.iter().filter(|r| r.outcome == Ok(false)).count();
    json!({
        "jobs": rows.len(),
        "passed": passed,
        "failed": failed,
        "errors": rows.len() - passed - failed,
    })
}
