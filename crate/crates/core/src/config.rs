//! Tolerances and run configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Environment variable holding a JSON object of tolerance overrides.
pub const TOL_OVERRIDE_ENV: &str = "LPC_TOL_OVERRIDE";

/// Environment variable holding the seed for randomized tests and sweeps.
pub const SEED_ENV: &str = "LPC_SEED";
pub const DEFAULT_SEED: u64 = 42;

/// [`SEED_ENV`] if set and numeric, else [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// Every numeric threshold used by construction and verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative width of the null band in causal classification.
    pub tol_null: f64,
    /// Allowed deviation of `|<T,T>|` from one on unit-speed curves.
    pub tol_unit: f64,
    /// Curvature below which the principal normal is undefined.
    pub kappa_min: f64,
    /// Lorentz-orthonormality of sampled frames.
    pub tol_frame: f64,
    /// Frenet-system residual, analytic-derivative curves.
    pub tol_frenet: f64,
    /// Frenet-system residual, curves whose derivatives come from differences.
    pub tol_frenet_fd: f64,
    /// Unit condition on direction-field coefficients.
    pub tol_unit_field: f64,
    /// Frame relations between donor and partner.
    pub tol_relation: f64,
    /// Partner curvature against its closed form (relative to max(1, |value|)).
    pub tol_kappa_bar: f64,
    /// Partner torsion magnitude against its closed form.
    pub tol_tau_bar: f64,
    /// Constancy threshold on analytic-tier curves.
    pub tol_const: f64,
    /// Constancy threshold on finite-difference-tier curves.
    pub tol_const_fd: f64,
    /// Constancy threshold for correspondence-theorem conclusions.
    pub tol_theorem: f64,
    /// Recovery of donor curvatures from formulas without derivatives.
    pub tol_recover_direct: f64,
    /// Recovery of donor curvatures from formulas with a derivative.
    pub tol_recover_derivative: f64,
    /// Planarity threshold on |tau|.
    pub tol_plane: f64,
    /// Partner nodes with kappa_bar below this fraction of its maximum are excised.
    pub excise_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_null: 1e-9,
            tol_unit: 1e-9,
            kappa_min: 1e-8,
            tol_frame: 1e-8,
            tol_frenet: 1e-6,
            tol_frenet_fd: 1e-3,
            tol_unit_field: 1e-10,
            tol_relation: 1e-5,
            tol_kappa_bar: 1e-5,
            tol_tau_bar: 1e-4,
            tol_const: 1e-4,
            tol_const_fd: 1e-2,
            tol_theorem: 1e-3,
            tol_recover_direct: 1e-6,
            tol_recover_derivative: 1e-3,
            tol_plane: 1e-8,
            excise_ratio: 0.1,
        }
    }
}

impl Tolerances {
    /// Apply a `{name: value}` map. Unknown names and non-positive values are rejected.
    pub fn apply_overrides(&mut self, overrides: &BTreeMap<String, f64>) -> Result<()> {
        let mut value = serde_json::to_value(*self).expect("tolerances serialize");
        let map = value.as_object_mut().expect("tolerances are an object");
        for (name, v) in overrides {
            if !map.contains_key(name) {
                return Err(GeometryError::InvalidArgument(format!("unknown tolerance '{name}'")));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(GeometryError::ParamOutOfRange {
                    name: name.clone(),
                    value: *v,
                    reason: "tolerances must be positive".into(),
                });
            }
            map.insert(name.clone(), serde_json::json!(v));
        }
        *self = serde_json::from_value(value).expect("round trip of known keys");
        Ok(())
    }

    /// Parse the JSON text of [`TOL_OVERRIDE_ENV`] and apply it.
    pub fn apply_override_json(&mut self, text: &str) -> Result<()> {
        let map: BTreeMap<String, f64> = serde_json::from_str(text).map_err(|e| {
            GeometryError::InvalidArgument(format!("{TOL_OVERRIDE_ENV} is not a JSON map of numbers: {e}"))
        })?;
        self.apply_overrides(&map)
    }

    /// Defaults plus whatever the environment overrides.
    pub fn from_env() -> Result<Self> {
        let mut tol = Tolerances::default();
        if let Ok(text) = std::env::var(TOL_OVERRIDE_ENV) {
            if !text.trim().is_empty() {
                tol.apply_override_json(&text)?;
            }
        }
        Ok(tol)
    }
}
