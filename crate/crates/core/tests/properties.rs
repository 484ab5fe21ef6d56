use std::f64::consts::PI;
use std::sync::Arc;

use maglab_core::diagnostics::stats::{linear_fit, wilson, Z95};
use maglab_core::field_model::{field_value, sample_field, FieldModelConfig};
use maglab_core::landau_resolvent::{confluent_u, gamma_fn, pole_distance};
use maglab_core::{Complex64, Rect};
use proptest::prelude::*;

fn config() -> FieldModelConfig {
    FieldModelConfig::from_json_str(
        r#"{
            "model": {"b0": 5, "B0": 10, "mu": 0.5, "rho": 1, "c_ran": 1, "k_max": 2, "K0": 4},
            "profile": {"family": "plateau", "delta": 0.25},
            "dist": {"tau": 3, "c_v": 1, "shape": "bump"}
        }"#,
    )
    .unwrap()
}

/// `L_n(x)` by the three-term recurrence.
fn laguerre(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0 - x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let k = k as f64;
        let c = ((2.0 * k + 1.0 - x) * b - k * a) / (k + 1.0);
        a = b;
        b = c;
    }
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(re in -4.5f64..6.0, im in -4.0f64..4.0) {
        let w = Complex64::new(re, im);
        prop_assume!(pole_distance(w) > 0.05);
        let lhs = gamma_fn(w + 1.0).unwrap();
        let rhs = w * gamma_fn(w).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-300), "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_reflection(re in -3.0f64..3.0, im in -2.0f64..2.0) {
        let w = Complex64::new(re, im);
        prop_assume!(pole_distance(w) > 0.05 && pole_distance(1.0 - w) > 0.05);
        let lhs = gamma_fn(w).unwrap() * gamma_fn(1.0 - w).unwrap();
        let rhs = PI / (PI * w).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn u_at_negative_integers_is_a_laguerre_polynomial(n in 0usize..5, zeta in 0.05f64..15.0) {
        let u = confluent_u(Complex64::new(-(n as f64), 0.0), zeta).unwrap();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let want = if n % 2 == 0 { fact } else { -fact } * laguerre(n, zeta);
        let scale = fact * (1.0 + zeta).powi(n as i32);
        prop_assert!((u.re - want).abs() <= 1e-9 * scale && u.im.abs() <= 1e-9 * scale, "{u} vs {want}");
    }

    #[test]
    fn wilson_interval_brackets_the_proportion(n in 1usize..500, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).round() as usize;
        let e = wilson(k, n, Z95);
        prop_assert!(0.0 <= e.lo && e.lo <= e.value && e.value <= e.hi && e.hi <= 1.0);
    }

    #[test]
    fn linear_fit_recovers_exact_lines(slope in -5.0f64..5.0, icpt in -5.0f64..5.0) {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.7 - 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| slope * v + icpt).collect();
        let f = linear_fit(&x, &y);
        prop_assert!((f.slope - slope).abs() < 1e-10 && (f.intercept - icpt).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Coefficients are counter-seeded, so the field at a point does not
    /// depend on which region was sampled around it.
    #[test]
    fn field_value_is_independent_of_the_sampled_region(
        seed in any::<u64>(), x in -0.5f64..0.5, y in -0.5f64..0.5, grow in 0.5f64..2.0,
    ) {
        let c = config();
        let small = Arc::new(sample_field(&c, Rect::new([-0.5, -0.5], [0.5, 0.5]), seed).unwrap());
        let big = Arc::new(sample_field(&c, Rect::new([-0.5 - grow, -0.5], [0.5, 0.5 + grow]), seed).unwrap());
        let a = field_value(&c, &small, [x, y]).unwrap();
        let b = field_value(&c, &big, [x, y]).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
