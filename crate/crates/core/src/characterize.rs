//! Helix, slant-helix and plane-curve tests, and the partner correspondence theorems.

use std::fmt;
use std::ops::Range;

use serde::Serialize;
use serde_json::json;

use crate::config::Tolerances;
use crate::curve::{Tier, UnitSpeedCurve};
use crate::direction::{construct_partner, recover_from_values, Case, PartnerKind, PartnerSpec, Partner};
use crate::error::{GeometryError, Result};
use crate::frenet::{valid_runs, FrenetApparatus};
use crate::numerics::{measured_margin, measured_stride, ratio_wronskian};
use crate::report::{max_residual, Check, VerificationReport};

/// Curvature data on a uniform grid, detached from the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvatures {
    pub h: f64,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub valid: Vec<bool>,
    /// Stencil stride for derivatives of these values.
    pub stride: usize,
}

impl Curvatures {
    pub fn of(app: &FrenetApparatus) -> Self {
        Curvatures {
            h: app.h,
            kappa: app.kappa(),
            tau: app.tau(),
            valid: app.valid.clone(),
            stride: match app.tier {
                Tier::Analytic => 1,
                Tier::FiniteDifference => measured_stride(app.h),
            },
        }
    }

    /// Runs of valid nodes, trimmed so every stencil used on them is central.
    fn interior_runs(&self) -> Vec<Range<usize>> {
        let m = measured_margin(self.stride);
        valid_runs(&self.valid)
            .into_iter()
            .filter(|r| r.len() >= 5.max(2 * m + 1))
            .map(|r| r.start + m..r.end - m)
            .collect()
    }
}

/// Whether a per-node quantity is constant.
///
/// Values are grouped by valid segment. The reference mean comes from the
/// longest segment; other segments may carry the opposite sign, which is
/// what an unsigned curvature produces across an excised zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyVerdict {
    #[serde(skip)]
    pub values: Vec<f64>,
    pub mean: f64,
    /// `max |v - m| / max(1, |mean|)` where `m` is `±mean` per segment.
    pub rel_spread: f64,
    pub is_constant: bool,
    pub tol: f64,
    pub segments: usize,
}

impl ConstancyVerdict {
    /// Constancy of `values` over the node ranges in `segments`.
    pub fn over(values: Vec<f64>, segments: &[Range<usize>], tol: f64) -> Self {
        let Some(longest) = segments.iter().max_by_key(|r| r.len()).filter(|r| !r.is_empty()) else {
            return ConstancyVerdict {
                values,
                mean: f64::NAN,
                rel_spread: f64::NAN,
                is_constant: false,
                tol,
                segments: 0,
            };
        };
        let mean_of = |r: &Range<usize>| values[r.clone()].iter().sum::<f64>() / r.len() as f64;
        let mean = mean_of(longest);
        let scale = mean.abs().max(1.0);
        let rel_spread = max_residual(segments.iter().filter(|r| !r.is_empty()).map(|r| {
            let m = if mean_of(r) * mean < 0.0 { -mean } else { mean };
            max_residual(values[r.clone()].iter().map(|v| (v - m).abs())) / scale
        }));
        ConstancyVerdict {
            values,
            mean,
            rel_spread,
            is_constant: rel_spread < tol,
            tol,
            segments: segments.len(),
        }
    }
}

/// Constancy tolerance for an apparatus' derivative tier.
pub fn constancy_tol(app: &FrenetApparatus, tol: &Tolerances) -> f64 {
    match app.tier {
        Tier::Analytic => tol.tol_const,
        Tier::FiniteDifference => tol.tol_const_fd,
    }
}

/// `tau / kappa` over interior nodes.
pub fn helix_invariant(app: &FrenetApparatus, tol: f64) -> Result<ConstancyVerdict> {
    helix_invariant_of(&Curvatures::of(app), tol)
}

pub fn helix_invariant_of(c: &Curvatures, tol: f64) -> Result<ConstancyVerdict> {
    let runs = c.interior_runs();
    let mut values = vec![f64::NAN; c.kappa.len()];
    for k in runs.iter().flat_map(|r| r.clone()) {
        if !(c.kappa[k] > 0.0) {
            return Err(GeometryError::DegenerateKappa { node: k });
        }
        values[k] = c.tau[k] / c.kappa[k];
    }
    Ok(ConstancyVerdict::over(values, &runs, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlantVariant {
    /// `kappa^2 - tau^2`
    Minus,
    /// `tau^2 - kappa^2`
    ReverseMinus,
    /// `kappa^2 + tau^2`
    Plus,
}

impl SlantVariant {
    pub const ALL: [SlantVariant; 3] = [SlantVariant::Minus, SlantVariant::ReverseMinus, SlantVariant::Plus];

    pub fn radicand(self, kappa: f64, tau: f64) -> f64 {
        match self {
            SlantVariant::Minus => kappa * kappa - tau * tau,
            SlantVariant::ReverseMinus => tau * tau - kappa * kappa,
            SlantVariant::Plus => kappa * kappa + tau * tau,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SlantVariant::Minus => "kappa^2-tau^2",
            SlantVariant::ReverseMinus => "tau^2-kappa^2",
            SlantVariant::Plus => "kappa^2+tau^2",
        }
    }
}

impl fmt::Display for SlantVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-node `kappa^2 / radicand^(3/2) * (tau/kappa)'` for `variant`, NaN where
/// undefined. With `variant = None` the radicand is `|kappa^2 - tau^2|`.
/// Returns the values and the node ranges on which they are defined.
pub fn slant_values(c: &Curvatures, variant: Option<SlantVariant>) -> (Vec<f64>, Vec<Range<usize>>) {
    let n = c.kappa.len();
    let mut out = vec![f64::NAN; n];
    let mut runs = Vec::new();
    let m = measured_margin(c.stride);
    for r in valid_runs(&c.valid).into_iter().filter(|r| r.len() >= 5.max(2 * m + 1)) {
        let w = ratio_wronskian(&c.kappa[r.clone()], &c.tau[r.clone()], c.h, c.stride);
        for k in r.start + m..r.end - m {
            let (kap, tau) = (c.kappa[k], c.tau[k]);
            let rad = match variant {
                Some(v) => v.radicand(kap, tau),
                None => (kap * kap - tau * tau).abs(),
            };
            if rad > 0.0 {
                out[k] = w[k - r.start] / rad.powf(1.5);
            }
        }
        runs.push(r.start + m..r.end - m);
    }
    (out, runs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlantVerdict {
    /// Applicable variants (radicand positive on every interior node).
    pub variants: Vec<(SlantVariant, ConstancyVerdict)>,
    pub is_slant_helix: bool,
}

impl SlantVerdict {
    pub fn variant(&self, v: SlantVariant) -> Option<&ConstancyVerdict> {
        self.variants.iter().find(|(w, _)| *w == v).map(|(_, c)| c)
    }

    /// Smallest spread among applicable variants.
    pub fn best_spread(&self) -> f64 {
        self.variants
            .iter()
            .map(|(_, c)| c.rel_spread)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn slant_helix_invariant(app: &FrenetApparatus, tol: f64) -> Result<SlantVerdict> {
    slant_helix_invariant_of(&Curvatures::of(app), tol)
}

pub fn slant_helix_invariant_of(c: &Curvatures, tol: f64) -> Result<SlantVerdict> {
    let mut variants = Vec::new();
    for v in SlantVariant::ALL {
        let (values, runs) = slant_values(c, Some(v));
        let nodes = || runs.iter().flat_map(|r| r.clone());
        if nodes().next().is_some() && nodes().all(|k| values[k].is_finite()) {
            variants.push((v, ConstancyVerdict::over(values, &runs, tol)));
        }
    }
    if variants.is_empty() {
        return Err(GeometryError::NoApplicableVariant);
    }
    let is_slant_helix = variants.iter().any(|(_, c)| c.is_constant);
    Ok(SlantVerdict {
        variants,
        is_slant_helix,
    })
}

/// Largest `|tau|` over interior valid nodes.
pub fn max_interior_torsion(app: &FrenetApparatus) -> f64 {
    let c = Curvatures::of(app);
    max_residual(c.interior_runs().into_iter().flatten().map(|k| app.samples[k].tau.abs()))
}

pub fn is_plane_curve(app: &FrenetApparatus, tol: f64) -> bool {
    max_interior_torsion(app) < tol
}

/// Helix, slant-helix and plane verdicts of one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveVerdicts {
    pub helix: ConstancyVerdict,
    pub slant: Option<SlantVerdict>,
    pub max_abs_tau: f64,
    pub plane: bool,
}

impl CurveVerdicts {
    pub fn is_slant_helix(&self) -> bool {
        self.slant.as_ref().is_some_and(|s| s.is_slant_helix)
    }

    pub fn slant_spread(&self) -> f64 {
        self.slant.as_ref().map_or(f64::NAN, |s| s.best_spread())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "helix": self.helix.is_constant,
            "helix_ratio_mean": finite_or_null(self.helix.mean),
            "helix_rel_spread": finite_or_null(self.helix.rel_spread),
            "slant_helix": self.is_slant_helix(),
            "slant_variants": self.slant.as_ref().map(|s| s.variants.iter().map(|(v, c)| json!({
                "variant": v.name(),
                "mean": finite_or_null(c.mean),
                "rel_spread": finite_or_null(c.rel_spread),
                "constant": c.is_constant,
            })).collect::<Vec<_>>()),
            "plane": self.plane,
            "max_abs_tau": finite_or_null(self.max_abs_tau),
        })
    }
}

pub(crate) fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// Verdicts on raw curvatures with constancy tolerance `tol_const` and plane tolerance `tol_plane`.
pub fn classify_curvatures(c: &Curvatures, tol_const: f64, tol_plane: f64) -> Result<CurveVerdicts> {
    let helix = helix_invariant_of(c, tol_const)?;
    let slant = match slant_helix_invariant_of(c, tol_const) {
        Ok(s) => Some(s),
        Err(GeometryError::NoApplicableVariant) => None,
        Err(e) => return Err(e),
    };
    let max_abs_tau = max_residual(c.interior_runs().into_iter().flatten().map(|k| c.tau[k].abs()));
    Ok(CurveVerdicts {
        helix,
        slant,
        max_abs_tau,
        plane: max_abs_tau < tol_plane,
    })
}

pub fn classify(app: &FrenetApparatus, tol_const: f64, tol_plane: f64) -> Result<CurveVerdicts> {
    classify_curvatures(&Curvatures::of(app), tol_const, tol_plane)
}

/// Tolerance on `|tau|` for calling a curve planar. Partner torsion comes
/// from a second difference of the field, so its floor is set by roundoff in
/// that difference rather than by `tol_plane`.
pub fn plane_tol(app: &FrenetApparatus, tol: &Tolerances) -> f64 {
    match app.tier {
        Tier::Analytic => tol.tol_plane,
        Tier::FiniteDifference => {
            let kmax = app.kappa().into_iter().fold(0.0, f64::max);
            tol.tol_plane.max(64.0 * f64::EPSILON * kmax.max(1.0) / (app.h * app.h))
        }
    }
}

/// Result of the correspondence theorems for one donor and partner spec.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub spec: PartnerSpec,
    pub donor: CurveVerdicts,
    pub partner: CurveVerdicts,
    /// Verdicts of the donor reconstructed from the partner alone.
    pub recovered: Option<CurveVerdicts>,
    pub report: VerificationReport,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.report.pass()
    }
}

/// Which property each theorem relates.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Property {
    Helix,
    Slant,
    Plane,
}

fn holds(v: &CurveVerdicts, p: Property) -> bool {
    match p {
        Property::Helix => v.helix.is_constant,
        Property::Slant => v.is_slant_helix(),
        Property::Plane => v.plane,
    }
}

fn measure(v: &CurveVerdicts, p: Property) -> (f64, &'static str) {
    match p {
        Property::Helix => (v.helix.rel_spread, "relative spread of tau/kappa"),
        Property::Slant => (v.slant_spread(), "relative spread of the slant invariant"),
        Property::Plane => (v.max_abs_tau, "max |tau|"),
    }
}

fn prop_name(p: Property) -> &'static str {
    match p {
        Property::Helix => "helix",
        Property::Slant => "slant helix",
        Property::Plane => "plane curve",
    }
}

/// One implication `a(from) => b(to)` checked in both senses: when the
/// premise holds the conclusion's measure must be within `tol`; when it
/// fails, a biconditional also needs the conclusion to fail.
fn implication(
    id: String,
    relation: &str,
    from: &CurveVerdicts,
    p: Property,
    to: &CurveVerdicts,
    q: Property,
    tol: f64,
    biconditional: bool,
    gating: bool,
) -> Check {
    let (m, what) = measure(to, q);
    let premise = holds(from, p);
    let c = if premise {
        Check::new(id, relation, m, tol).note(format!("{} holds; conclusion {} = {:.3e}", prop_name(p), what, m))
    } else if biconditional {
        let ok = !holds(to, q);
        Check::new(id, relation, if ok { 0.0 } else { 1.0 }, 0.5).note(format!(
            "not a {}; conclusion {} = {:.3e} ({})",
            prop_name(p),
            what,
            m,
            if ok { "contrapositive holds" } else { "contrapositive violated" }
        ))
    } else {
        Check::new(id, relation, 0.0, 0.5).note(format!("not a {}; implication vacuous", prop_name(p)))
    };
    if gating {
        c
    } else {
        c.advisory().note("case hypothesis unmet")
    }
}

/// Variant whose value on the partner of an evolute or Mannheim construction
/// relates to the donor's `tau / kappa`.
pub fn corollary_variant(kind: PartnerKind, case: Case) -> Option<SlantVariant> {
    use SlantVariant::*;
    match (kind, case) {
        (PartnerKind::Evolute, Case::I) => Some(Plus),
        (PartnerKind::Evolute, Case::Ii) => Some(Minus),
        (PartnerKind::Evolute, Case::Iii) => Some(ReverseMinus),
        (PartnerKind::Mannheim, Case::I) => Some(ReverseMinus),
        (PartnerKind::Mannheim, Case::Ii) => Some(Minus),
        (PartnerKind::Mannheim, Case::Iii) => Some(Plus),
        (PartnerKind::Bertrand, Case::Iii) => Some(Plus),
        (PartnerKind::Bertrand, _) => None,
    }
}

fn corollary_check(partner: &Partner, spec: &PartnerSpec, tol: f64) -> Check {
    let d = Curvatures::of(&partner.donor);
    let p = Curvatures::of(&partner.app);
    let variant = corollary_variant(spec.kind, spec.case);
    let (pv, pruns) = slant_values(&p, variant);
    let nodes: Vec<usize> = pruns.iter().flat_map(|r| r.clone()).collect();
    let (residual, relation) = match spec.kind {
        // partner invariant = +-tau/kappa
        PartnerKind::Evolute => (
            max_residual(nodes.iter().map(|&k| {
                let r = d.tau[k] / d.kappa[k];
                (pv[k].abs() - r.abs()).abs() / r.abs().max(1.0)
            })),
            "partner slant invariant equals donor tau/kappa up to sign",
        ),
        // tau/kappa = -+1/|invariant|
        PartnerKind::Mannheim => (
            max_residual(nodes.iter().map(|&k| {
                let r = d.tau[k] / d.kappa[k];
                (r.abs() - 1.0 / pv[k].abs()).abs() / r.abs().max(1.0)
            })),
            "donor tau/kappa equals reciprocal partner slant invariant up to sign",
        ),
        // invariant preserved
        PartnerKind::Bertrand => {
            let (dv, _) = slant_values(&d, variant);
            (
                max_residual(nodes.iter().map(|&k| (pv[k].abs() - dv[k].abs()).abs() / dv[k].abs().max(1.0))),
                "slant invariant preserved up to sign",
            )
        }
    };
    let name = variant.map_or("|kappa^2-tau^2|".to_string(), |v| v.name().to_string());
    Check::new("corollary_identity", relation, residual, tol).note(format!("radicand {name}"))
}

/// Construct the partner and evaluate the correspondence theorems for `spec.kind`.
pub fn theorem_suite(donor: &UnitSpeedCurve, spec: &PartnerSpec, tol: &Tolerances) -> Result<TheoremReport> {
    let partner = construct_partner(donor, spec, tol)?;
    theorem_suite_for(&partner, spec, tol)
}

pub fn theorem_suite_for(partner: &Partner, spec: &PartnerSpec, tol: &Tolerances) -> Result<TheoremReport> {
    let t = tol.tol_theorem;
    let dv = classify(&partner.donor, t, plane_tol(&partner.donor, tol))?;
    let pv = classify(&partner.app, t, plane_tol(&partner.app, tol))?;
    let orientation: Vec<f64> = {
        let y = spec.kind.normal_source();
        let ct = partner.donor.curve_type;
        (0..partner.app.len())
            .map(|k| (partner.app.samples[k].n.inner(y.of(&partner.donor.samples[k])) * y.sign(ct)).signum())
            .collect()
    };
    let recovered = recover_from_values(
        spec,
        partner.donor.curve_type,
        partner.app.h,
        &partner.app.kappa(),
        &partner.app.tau(),
        &partner.app.valid,
        Some(&orientation),
    )
    .ok()
    .and_then(|rec| {
        let mut valid = vec![false; rec.kappa.len()];
        for &k in &rec.nodes {
            valid[k] = rec.kappa[k].is_finite() && rec.tau[k].is_finite();
        }
        let c = Curvatures {
            h: partner.app.h,
            kappa: rec.kappa,
            tau: rec.tau,
            valid,
            stride: measured_stride(partner.app.h),
        };
        classify_curvatures(&c, t, tol.tol_plane.max(tol.tol_recover_derivative)).ok()
    });

    let gating = crate::direction::case_hypothesis(&partner.donor, spec).is_none_or(|(_, h)| h);
    let mut r = VerificationReport::default();
    use Property::*;
    let rules: &[(&str, &str, Property, Property, bool)] = match spec.kind {
        PartnerKind::Evolute => &[
            ("evolute_helix_slant_helix", "donor helix iff partner slant helix", Helix, Slant, true),
            ("evolute_plane_helix", "donor plane iff partner helix", Plane, Helix, true),
        ],
        PartnerKind::Mannheim => &[(
            "mannheim_helix_slant_helix",
            "donor helix iff partner slant helix",
            Helix,
            Slant,
            true,
        )],
        PartnerKind::Bertrand => &[
            ("bertrand_helix_helix", "donor helix iff partner helix", Helix, Helix, true),
            ("bertrand_plane_helix", "plane curve on one side gives a helix on the other", Plane, Helix, false),
            ("bertrand_slant_slant", "donor slant helix iff partner slant helix", Slant, Slant, true),
        ],
    };
    for &(id, relation, p, q, bi) in rules {
        r.push(implication(format!("{id}.forward"), relation, &dv, p, &pv, q, t, bi, gating));
        let converse = format!("{id}.converse");
        match &recovered {
            // a plane partner gives a helix donor
            Some(rv) if !bi => r.push(implication(converse, relation, &pv, p, rv, q, t, false, gating)),
            // partner property read back onto the reconstructed donor
            Some(rv) => r.push(implication(converse, relation, &pv, q, rv, p, t, true, gating)),
            None => r.push(Check::new(converse, relation, f64::NAN, t).advisory().note("donor curvatures not recoverable")),
        }
    }
    r.push(corollary_check(partner, spec, t));
    r.verdict("donor", dv.to_json());
    r.verdict("partner", pv.to_json());
    if let Some(rv) = &recovered {
        r.verdict("recovered_donor", rv.to_json());
    }
    Ok(TheoremReport {
        spec: *spec,
        donor: dv,
        partner: pv,
        recovered,
        report: r,
    })
}
