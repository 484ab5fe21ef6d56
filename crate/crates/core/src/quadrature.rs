//! One-dimensional quadrature rules.
//!
//! - fixed Gauss–Legendre rules (nodes by Newton iteration on the Legendre
//!   recurrence),
//! - adaptive Gauss–Kronrod (G7/K15) bisection,
//! - double-exponential rules: tanh-sinh on a finite interval with an
//!   integrable endpoint singularity, exp-sinh on a half line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

/// Values a quadrature rule can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Three-point Gauss–Legendre rule, used for link integrals.
pub const GAUSS3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
pub const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Cached 20-point rule.
pub fn gauss_legendre_20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Fixed-order Gauss–Legendre on `[a, b]`.
pub fn gauss_fixed<T: QuadValue>(rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::zero();
    for (x, w) in rule.0.iter().zip(&rule.1) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

const K15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_3,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * K15_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * K15_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * K15_WEIGHTS[i];
        if i % 2 == 1 {
            gauss = gauss + s * G7_WEIGHTS[i / 2];
        }
    }
    let k = kron * half;
    let g = gauss * half;
    (k, (k - g).magnitude())
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk<T: QuadValue>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.magnitude()) {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            let worst = intervals.iter().max_by(|x, y| x.3.total_cmp(&y.3)).expect("non-empty");
            return Err(Error::Quadrature {
                a: worst.0,
                b: worst.1,
                error: err,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

const DE_MAX_LEVEL: usize = 12;

/// Tanh-sinh rule on `[0, len]`.
///
/// The integrand receives the abscissa measured from the left endpoint, which
/// is computed without cancellation, so integrable singularities `t^(s-1)` at
/// `t = 0` with `Re s > 0` are handled.
pub fn tanh_sinh<T: QuadValue>(mut f: impl FnMut(f64) -> T, len: f64, tol: f64) -> Result<T> {
    const T_MAX: f64 = 4.5;
    let mut eval = |t: f64| -> Option<T> {
        let u = FRAC_PI_2 * t.sinh();
        let x = len / (1.0 + (-2.0 * u).exp());
        let cu = u.cosh();
        let w = len * 0.5 * FRAC_PI_2 * t.cosh() / (cu * cu);
        if x <= 0.0 || x >= len || w == 0.0 || !w.is_finite() {
            return None;
        }
        Some(f(x) * w)
    };
    double_exponential(&mut eval, T_MAX, T_MAX, tol, 0.0, len)
}

/// Exp-sinh rule on `[a, ∞)`; the integrand must decay at infinity.
pub fn exp_sinh<T: QuadValue>(mut f: impl FnMut(f64) -> T, a: f64, tol: f64) -> Result<T> {
    let mut eval = |t: f64| -> Option<T> {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let w = FRAC_PI_2 * t.cosh() * e;
        if e == 0.0 || !e.is_finite() || !w.is_finite() {
            return None;
        }
        let v = f(a + e);
        if !v.magnitude().is_finite() {
            return None;
        }
        Some(v * w)
    };
    double_exponential(&mut eval, 5.0, 4.5, tol, a, f64::INFINITY)
}

fn double_exponential<T: QuadValue>(
    eval: &mut impl FnMut(f64) -> Option<T>,
    t_left: f64,
    t_right: f64,
    tol: f64,
    a: f64,
    b: f64,
) -> Result<T> {
    let mut h = 0.5;
    let mut sum = eval(0.0).unwrap_or_else(T::zero);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_right {
            break;
        }
        if let Some(v) = eval(t) {
            sum = sum + v;
        }
        k += 1;
    }
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_left {
            break;
        }
        if let Some(v) = eval(-t) {
            sum = sum + v;
        }
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 1..DE_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_right {
                break;
            }
            if let Some(v) = eval(t) {
                sum = sum + v;
            }
            k += 2;
        }
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_left {
                break;
            }
            if let Some(v) = eval(-t) {
                sum = sum + v;
            }
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).magnitude();
        estimate = next;
        if diff <= tol * estimate.magnitude().max(1e-300) {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature { a, b, error: tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let v: f64 = gauss_fixed(&rule, 0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
        let (n3, w3) = gauss_legendre(3);
        for i in 0..3 {
            assert!((n3[i] - GAUSS3_NODES[i]).abs() < 1e-15);
            assert!((w3[i] - GAUSS3_WEIGHTS[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = adaptive_gk(|x: f64| x.abs(), -1.0, 2.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫₀¹ t^(-1/2) dt = 2
        let v = tanh_sinh(|t: f64| t.powf(-0.5), 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        let v = tanh_sinh(|t: f64| t.ln(), 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn exp_sinh_half_line() {
        let v = exp_sinh(|x: f64| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        // ∫₁^∞ e^{-3x}/x dx = E₁(3) = 0.013048381094197
        let v = exp_sinh(|x: f64| (-3.0 * x).exp() / x, 1.0, 1e-12).unwrap();
        assert!((v - 0.013_048_381_094_197_04).abs() < 1e-13, "{v}");
    }
}
