use std::f64::consts::PI;
use std::sync::Arc;

use maglab_core::diagnostics::{box_operator, sample_for_box, trial_state, GridOptions};
use maglab_core::field_model::{FieldModelConfig, PeriodicExpr};
use maglab_core::gauge::{symmetric_gauge, BoxSpec, PlusGradient, VectorPotential};
use maglab_core::lattice::{
    assemble, block_resolvent_norm, convergence_study, count_in, eigs_window, full_spectrum, lowest_eigenvalues,
    BlockNormOptions, DiscreteHamiltonian, Stencil, WindowOptions,
};
use maglab_core::{Complex64, Rect};

fn random_config() -> FieldModelConfig {
    FieldModelConfig::from_json_str(
        r#"{
            "model": {"b0": 5, "B0": 10, "mu": 0.5, "rho": 1, "c_ran": 1, "k_max": 3, "K0": 4},
            "profile": {"family": "plateau", "delta": 0.25},
            "dist": {"tau": 3, "c_v": 1, "shape": "bump"},
            "fields": {"v": [{"kind": "cos_x", "amp": 0.3, "m": 1}]}
        }"#,
    )
    .unwrap()
}

fn square(c: f64, half: f64) -> Rect {
    Rect::new([c - half, c - half], [c + half, c + half])
}

fn constant_box(b: f64, rect: Rect, h: f64, stencil: Stencil) -> DiscreteHamiltonian {
    assemble(rect, &symmetric_gauge(b, [0.0, 0.0]), &PeriodicExpr::zero(), h, stencil).unwrap()
}

#[test]
fn free_dirichlet_spectrum_matches_closed_form() {
    let h = 0.25;
    let op = constant_box(0.0, Rect::new([0.0, 0.0], [3.0, 2.5]), h, Stencil::Second);
    let g = op.grid.unwrap();
    let mut want = Vec::new();
    for i in 1..=g.nx {
        for j in 1..=g.ny {
            let sx = (i as f64 * PI / (g.nx + 1) as f64).cos();
            let sy = (j as f64 * PI / (g.ny + 1) as f64).cos();
            want.push((4.0 - 2.0 * sx - 2.0 * sy) / (h * h));
        }
    }
    want.sort_by(f64::total_cmp);
    let got = full_spectrum(&op, false).unwrap().values;
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-10 * b.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn window_solver_agrees_with_dense() {
    let config = random_config();
    let bx = BoxSpec::new([0.0, 0.0], 4.0);
    let sample = Arc::new(sample_for_box(&config, &bx, 7).unwrap());
    let b = box_operator(&config, &bx, sample, &GridOptions::new(1.0 / 8.0)).unwrap();
    let dense = full_spectrum(&b.op, false).unwrap().values;
    let (lo, hi) = (25.0, 40.0);
    let expected: Vec<f64> = dense.iter().cloned().filter(|&v| v >= lo && v < hi).collect();
    assert!(expected.len() > 10);
    assert_eq!(count_in(&b.op, lo, hi), expected.len());
    let opts = WindowOptions {
        dense_below: 0,
        ..Default::default()
    };
    let res = eigs_window(&b.op, lo, hi, &opts).unwrap();
    assert_eq!(res.values.len(), expected.len());
    for (a, e) in res.values.iter().zip(&expected) {
        assert!((a - e).abs() < 1e-8 * e.abs(), "{a} vs {e}");
    }
    assert!(res.max_residual() < 1e-8);
}

#[test]
fn resolvent_norm_is_inverse_distance_to_spectrum() {
    let op = constant_box(2.0, square(0.0, 1.5), 0.2, Stencil::Second);
    let spec = full_spectrum(&op, false).unwrap().values;
    let z = 0.5 * (spec[3] + spec[4]) + 0.1 * (spec[4] - spec[3]);
    let dist = spec.iter().map(|v| (v - z).abs()).fold(f64::INFINITY, f64::min);
    let all = vec![true; op.dim()];
    let opts = BlockNormOptions {
        rel_tol: 1e-12,
        max_iter: 2000,
        ..Default::default()
    };
    let n = block_resolvent_norm(&op, Complex64::new(z, 0.0), &all, &all, &opts).unwrap();
    assert!((n.norm * dist - 1.0).abs() < 1e-6, "{} vs {}", n.norm, 1.0 / dist);
}

#[test]
fn dirichlet_eigenvalues_decrease_with_the_domain() {
    // nodes of both grids coincide, so the small operator is a compression
    let small = constant_box(3.0, square(0.0, 1.0), 0.125, Stencil::Second);
    let big = constant_box(3.0, square(0.0, 1.5), 0.125, Stencil::Second);
    let s = lowest_eigenvalues(&small, 12, false).unwrap().values;
    let b = lowest_eigenvalues(&big, 12, false).unwrap().values;
    for (x, y) in b.iter().zip(&s) {
        assert!(x <= &(y + 1e-10), "{x} > {y}");
    }
}

#[test]
fn gauge_transformations_leave_the_spectrum_unchanged() {
    let b = 2.5;
    let rect = square(0.3, 1.5);
    let a: Arc<dyn VectorPotential> = Arc::new(symmetric_gauge(b, [0.4, -0.7]));
    // ∇χ for χ = sin x cos 2y + x²y
    let shifted = PlusGradient {
        inner: a.clone(),
        grad: |p: [f64; 2]| {
            [
                p[0].cos() * (2.0 * p[1]).cos() + 2.0 * p[0] * p[1],
                -2.0 * p[0].sin() * (2.0 * p[1]).sin() + p[0] * p[0],
            ]
        },
    };
    let v = PeriodicExpr::zero();
    let e0 = full_spectrum(&assemble(rect, &a, &v, 0.15, Stencil::Second).unwrap(), false)
        .unwrap()
        .values;
    let e1 = full_spectrum(&assemble(rect, &shifted, &v, 0.15, Stencil::Second).unwrap(), false)
        .unwrap()
        .values;
    let diff = e0.iter().zip(&e1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn second_order_stencil_converges_quadratically() {
    let study = convergence_study(&[0.2, 0.1, 0.05], 4, |h| {
        Ok(constant_box(1.5, Rect::new([0.0, 0.0], [2.4, 2.0]), h, Stencil::Second))
    })
    .unwrap();
    let order = study.finest_order().unwrap();
    assert!((order - 2.0).abs() < 0.3, "observed order {order}");
}

/// Largest nodal error of the free stencil on `e^(−|x−c|²)`, whose
/// Laplacian is `(4|x−c|² − 4) e^(−|x−c|²)`.
fn consistency_error(h: f64, stencil: Stencil) -> f64 {
    let op = constant_box(0.0, square(4.0, 4.0), h, stencil);
    let pts = op.grid.as_ref().unwrap().points();
    let r2: Vec<f64> = pts
        .iter()
        .map(|p| (p[0] - 4.0).powi(2) + (p[1] - 4.0).powi(2))
        .collect();
    let psi: Vec<Complex64> = r2.iter().map(|r| Complex64::new((-r).exp(), 0.0)).collect();
    let hp = op.matrix.apply(&psi);
    hp.iter()
        .zip(&r2)
        .filter(|(_, &r)| r < 4.0)
        .map(|(v, &r)| (v.re - (4.0 - 4.0 * r) * (-r).exp()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn fourth_order_stencil_is_consistent_to_fourth_order() {
    let order = |s: Stencil| (consistency_error(0.2, s) / consistency_error(0.1, s)).log2();
    let (second, fourth) = (order(Stencil::Second), order(Stencil::Fourth));
    assert!((second - 2.0).abs() < 0.2, "second-order stencil: {second}");
    assert!((fourth - 4.0).abs() < 0.3, "fourth-order stencil: {fourth}");
}

#[test]
fn trial_residual_bounds_the_distance_to_the_spectrum() {
    let b = 16.0;
    let op = constant_box(b, square(0.0, 1.5), 1.0 / 16.0, Stencil::Second);
    let spec = full_spectrum(&op, false).unwrap().values;
    for n in 0..3 {
        let psi = trial_state(&op, n, [0.0, 0.0], b).unwrap();
        let lambda = (2 * n + 1) as f64 * b;
        let r = maglab_core::diagnostics::trial::lattice_residual(&op, &psi, lambda);
        let dist = spec.iter().map(|v| (v - lambda).abs()).fold(f64::INFINITY, f64::min);
        assert!(dist <= r + 1e-12, "n={n}: dist {dist} > residual {r}");
        assert!(r < 0.2 * b, "n={n}: residual {r} too large for a Landau state");
    }
}
