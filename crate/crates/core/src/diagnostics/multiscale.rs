//! Exponents and constants of the multiscale analysis.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleParams {
    pub xi: f64,
    pub kappa: f64,
    pub theta: f64,
    pub q: f64,
    pub alpha: f64,
    /// Decay exponent of the single-site density.
    pub tau: f64,
    pub c_inf: f64,
    pub c0: f64,
    pub c1: f64,
    pub l: f64,
}

impl MultiscaleParams {
    /// `β = ½(1 − (ξ+2)/τ)`.
    pub fn beta(&self) -> f64 {
        0.5 * (1.0 - (self.xi + 2.0) / self.tau)
    }

    /// `γ = l^(β−1)`.
    pub fn gamma(&self) -> f64 {
        self.l.powf(self.beta() - 1.0)
    }

    pub fn check(&self) -> Result<()> {
        let beta = self.beta();
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!(
                "β = {beta} from ξ = {}, τ = {} is outside (0, 1)",
                self.xi, self.tau
            )));
        }
        if !(self.l > 1.0) {
            return Err(Error::Config(format!("side {} must exceed 1", self.l)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_exponents() {
        let p = MultiscaleParams {
            xi: 1.0,
            kappa: 0.5,
            theta: 0.5,
            q: 1.0,
            alpha: 1.0,
            tau: 6.0,
            c_inf: 1.0,
            c0: 1.0,
            c1: 1.0,
            l: 16.0,
        };
        assert!((p.beta() - 0.25).abs() < 1e-15);
        assert!((p.gamma() - 16f64.powf(-0.75)).abs() < 1e-15);
        p.check().unwrap();
        assert!(MultiscaleParams { tau: 2.5, ..p }.check().is_err());
    }
}
