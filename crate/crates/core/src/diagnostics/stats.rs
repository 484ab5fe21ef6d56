//! Confidence intervals and least-squares fits.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Wilson,
    Normal,
    /// Delta method for a ratio of paired means.
    DeltaRatio,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub method: CiMethod,
    pub n: usize,
}

impl Estimate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.lo >= lo && self.hi <= hi
    }
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson(successes: usize, n: usize, z: f64) -> Estimate {
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            lo: 0.0,
            hi: 1.0,
            method: CiMethod::Wilson,
            n,
        };
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let den = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
    Estimate {
        value: p,
        lo: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
        hi: if successes == n { 1.0 } else { (centre + half).min(1.0) },
        method: CiMethod::Wilson,
        n,
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Mean with a normal-approximation interval.
pub fn normal_mean(x: &[f64], z: f64) -> Estimate {
    let n = x.len();
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            lo: f64::NAN,
            hi: f64::NAN,
            method: CiMethod::Normal,
            n,
        };
    }
    let m = mean(x);
    let half = z * (variance(x) / n as f64).sqrt();
    Estimate {
        value: m,
        lo: m - half,
        hi: m + half,
        method: CiMethod::Normal,
        n,
    }
}

/// `mean(y)/mean(x)` for paired samples with a delta-method interval.
pub fn paired_ratio(y: &[f64], x: &[f64], z: f64) -> Estimate {
    let n = y.len().min(x.len());
    let (y, x) = (&y[..n], &x[..n]);
    let (my, mx) = (mean(y), mean(x));
    let r = my / mx;
    let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - r * b).collect();
    let half = z * (variance(&d) / n as f64).sqrt() / mx.abs();
    Estimate {
        value: r,
        lo: r - half,
        hi: r + half,
        method: CiMethod::DeltaRatio,
        n,
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len().min(y.len());
    let (mx, my) = (mean(&x[..n]), mean(&y[..n]));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let slope_se = if n > 2 {
        (sse / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    LinearFit {
        slope,
        intercept,
        r2,
        slope_se,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 8 of 10, z = 1.96: (0.4902, 0.9433)
        let e = wilson(8, 10, Z95);
        assert!((e.lo - 0.4901624).abs() < 1e-6, "{}", e.lo);
        assert!((e.hi - 0.9433178).abs() < 1e-6, "{}", e.hi);
        let all = wilson(10, 10, Z95);
        assert_eq!(all.hi, 1.0);
        assert!(all.lo > 0.69 && all.lo < 0.73);
    }

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-14);
        assert!((f.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_samples_have_zero_width() {
        let e = normal_mean(&[2.0; 20], Z95);
        assert_eq!(e.width(), 0.0);
        let r = paired_ratio(&[4.0; 5], &[2.0; 5], Z95);
        assert_eq!((r.value, r.width()), (2.0, 0.0));
    }
}
