use std::path::Path;

use serde::{Deserialize, Serialize};

use super::distribution::DistributionSpec;
use super::expr::PeriodicExpr;
use super::profile::ProfileSpec;
use crate::{Error, Result};

fn default_cap() -> usize {
    4_000_000
}

/// Scalar model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Lower bound `b₀` of the field.
    pub b0: f64,
    /// Constant part `B₀` of the deterministic field.
    #[serde(rename = "B0")]
    pub field_strength: f64,
    pub mu: f64,
    pub rho: f64,
    pub c_ran: f64,
    pub k_max: usize,
    #[serde(rename = "K0")]
    pub k0: f64,
    /// Per-scale cap on the number of sampled coefficients.
    #[serde(default = "default_cap")]
    pub max_coefficients: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Fields {
    #[serde(default)]
    pub b_var: PeriodicExpr,
    #[serde(default)]
    pub v: PeriodicExpr,
}

/// Complete description of `B_ω = B₀ + B_var + μ B_ran^ω` and `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldModelConfig {
    pub model: ModelParams,
    pub profile: ProfileSpec,
    pub dist: DistributionSpec,
    #[serde(default)]
    pub fields: Fields,
}

impl FieldModelConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Rejects descriptors that cannot be evaluated at all. Violated model
    /// assumptions are left to [`super::validate_model`].
    pub fn check(&self) -> Result<()> {
        let m = &self.model;
        let finite = [m.b0, m.field_strength, m.mu, m.rho, m.c_ran, m.k0];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        if m.rho <= 0.0 {
            return Err(Error::Config(format!("rho = {} must be positive", m.rho)));
        }
        if m.c_ran < 0.0 {
            return Err(Error::Config(format!("c_ran = {} must be non-negative", m.c_ran)));
        }
        for t in self.fields.b_var.terms.iter().chain(&self.fields.v.terms) {
            if !t.amp.is_finite() {
                return Err(Error::Config("field term amplitude must be finite".into()));
            }
        }
        self.profile.check()?;
        self.dist.check()
    }

    /// `σ^(k) = C_ran e^(−ρk)`.
    pub fn sigma(&self, k: usize) -> f64 {
        self.model.c_ran * (-self.model.rho * k as f64).exp()
    }

    /// `Σ_{k > K_max} σ^(k)`, the sup-norm error of truncating the scale sum.
    pub fn truncation_bound(&self) -> f64 {
        let r = self.model.rho;
        self.model.c_ran * (-r * (self.model.k_max as f64 + 1.0)).exp() / (1.0 - (-r).exp())
    }

    /// `Σ_{k ≥ 0} σ^(k)`.
    pub fn sigma_total(&self) -> f64 {
        self.model.c_ran / (1.0 - (-self.model.rho).exp())
    }

    /// Deterministic field `B₀ + B_var`.
    pub fn b_det(&self) -> PeriodicExpr {
        let mut e = PeriodicExpr::constant(self.model.field_strength);
        e.terms.extend(self.fields.b_var.terms.iter().cloned());
        e
    }

    pub fn potential(&self) -> PeriodicExpr {
        self.fields.v.clone()
    }

    /// Support radius of `β_z^(k)` in sup norm.
    pub fn support_radius(&self, k: usize) -> f64 {
        self.profile.support_radius() * 0.5f64.powi(k as i32)
    }

    pub fn c_delta(&self) -> f64 {
        self.profile.c_delta()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_schema() {
        let s = r#"{
            "model": {"b0": 5, "B0": 10, "mu": 0.5, "rho": 1, "c_ran": 1, "k_max": 3, "K0": 4},
            "profile": {"family": "plateau", "delta": 0.25},
            "dist": {"tau": 3, "c_v": 1, "shape": "bump"},
            "fields": {"b_var": [], "v": [{"kind": "cos_x", "amp": 0.1}]}
        }"#;
        let c = FieldModelConfig::from_json_str(s).unwrap();
        assert_eq!(c.model.field_strength, 10.0);
        assert!((c.truncation_bound() - 0.028_974_9).abs() < 1e-6);
        let back = FieldModelConfig::from_json_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(FieldModelConfig::from_json_str("{}").is_err());
    }
}
