//! Observed order of convergence under grid refinement.

use serde::Serialize;

use super::eigen::lowest_eigenvalues;
use super::DiscreteHamiltonian;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    /// Spacings, coarse to fine.
    pub hs: Vec<f64>,
    /// `values[s][k]`: `k`-th eigenvalue at spacing `hs[s]`.
    pub values: Vec<Vec<f64>>,
    /// `orders[t][k] = log₂(|λ_h − λ_{h/2}| / |λ_{h/2} − λ_{h/4}|)` for the
    /// triple starting at `hs[t]`.
    pub orders: Vec<Vec<f64>>,
}

impl ConvergenceStudy {
    /// Median observed order of the finest triple.
    pub fn finest_order(&self) -> Option<f64> {
        let last = self.orders.last()?;
        let mut v: Vec<f64> = last.iter().cloned().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(v[v.len() / 2])
    }
}

/// Lowest `k` eigenvalues of `build(h)` for each spacing. The spacings must
/// number at least three and halve from one to the next.
pub fn convergence_study(
    hs: &[f64],
    k: usize,
    build: impl Fn(f64) -> Result<DiscreteHamiltonian>,
) -> Result<ConvergenceStudy> {
    if hs.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 spacings, got {}",
            hs.len()
        )));
    }
    let mut hs = hs.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    for w in hs.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidInput(format!("repeated spacing {}", w[0])));
        }
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "spacings {} and {} are not in ratio 2",
                w[0], w[1]
            )));
        }
    }
    let mut values = Vec::with_capacity(hs.len());
    for &h in &hs {
        let op = build(h)?;
        values.push(lowest_eigenvalues(&op, k, false)?.values);
    }
    let orders = values
        .windows(3)
        .map(|w| {
            (0..k.min(w[0].len()).min(w[1].len()).min(w[2].len()))
                .map(|i| ((w[0][i] - w[1][i]).abs() / (w[1][i] - w[2][i]).abs()).log2())
                .collect()
        })
        .collect();
    Ok(ConvergenceStudy { hs, values, orders })
}
