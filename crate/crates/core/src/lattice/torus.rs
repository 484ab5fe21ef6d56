//! Magnetic lattice operators on a periodic square.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::CsrMatrix;
use super::{DiscreteHamiltonian, Stencil};
use crate::field_model::{PeriodicExpr, ScalarField};
use crate::quadrature::{GAUSS3_NODES, GAUSS3_WEIGHTS};
use crate::{Error, Point, Result};

/// Constant field `b0` on the torus `[0, side)²` with `m` sites per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub b0: f64,
    pub side: f64,
    pub m: usize,
}

impl TorusSpec {
    pub fn h(&self) -> f64 {
        self.side / self.m as f64
    }

    /// Number of flux quanta `b0·side²/2π`.
    pub fn flux(&self) -> f64 {
        self.b0 * self.side * self.side / (2.0 * PI)
    }

    /// Nearest admissible field strength to `b` for a torus of side `side`.
    pub fn quantized_field(b: f64, side: f64) -> f64 {
        let q = (b * side * side / (2.0 * PI)).round().max(1.0);
        2.0 * PI * q / (side * side)
    }
}

// Rows interleaved from both ends so that the wrap-around coupling stays
// within a band of width 2m.
fn fold(j: usize, m: usize) -> usize {
    if j < m.div_ceil(2) {
        2 * j
    } else {
        2 * (m - 1 - j) + 1
    }
}

/// Periodic vector potential of a mean-free periodic field:
/// `a = (−∫₀^{x₂} b_y(ξ)dξ, ∫₀^{x₁} b_x(ξ, x₂)dξ)` where `b_x` collects the
/// terms varying in `x₁` and `b_y` the remaining ones.
fn periodic_potential(b_var: &PeriodicExpr) -> Result<impl Fn(Point) -> [f64; 2] + '_> {
    let mut bx = Vec::new();
    let mut by = Vec::new();
    for t in &b_var.terms {
        if t.is_null() {
            continue;
        }
        match t.varies() {
            (true, _) => bx.push(*t),
            (false, true) => by.push(*t),
            (false, false) => {
                return Err(Error::Config(
                    "the periodic field part must have zero mean; fold constants into b0".into(),
                ))
            }
        }
    }
    let (bx, by) = (PeriodicExpr::from_terms(bx), PeriodicExpr::from_terms(by));
    Ok(move |x: Point| [-by.integral_y(x[0], 0.0, x[1]), bx.integral_x(x[1], 0.0, x[0])])
}

/// `(p − A)² + V` on the torus for the field `b0 + b_var`, in the Landau gauge
/// `A = (0, b0 x₁)` plus a periodic potential for `b_var`; the seam links
/// carry the magnetic translation phase.
pub fn torus_landau(spec: &TorusSpec, b_var: &PeriodicExpr, v: &dyn ScalarField) -> Result<DiscreteHamiltonian> {
    let m = spec.m;
    if !b_var.is_zero() && spec.side.fract() != 0.0 {
        return Err(Error::Config(format!(
            "side {} must be an integer for a periodic field",
            spec.side
        )));
    }
    let a_var = periodic_potential(b_var)?;
    let link_var = |p: Point, d: Point| -> f64 {
        let mid = [p[0] + 0.5 * d[0], p[1] + 0.5 * d[1]];
        let mut acc = 0.0;
        for (t, w) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
            let a = a_var([mid[0] + 0.5 * t * d[0], mid[1] + 0.5 * t * d[1]]);
            acc += w * (a[0] * d[0] + a[1] * d[1]);
        }
        0.5 * acc
    };
    if m < 8 {
        return Err(Error::InvalidInput(format!(
            "torus needs at least 8 sites per side, got {m}"
        )));
    }
    let q = spec.flux();
    if (q - q.round()).abs() > 1e-9 * q.abs().max(1.0) {
        return Err(Error::Config(format!(
            "flux b0·L²/2π = {q} is not an integer; use TorusSpec::quantized_field"
        )));
    }
    let h = spec.h();
    let (b, l) = (spec.b0, spec.side);
    let inv = 1.0 / (h * h);
    let idx = |i: usize, j: usize| fold(j, m) * m + i;
    let n = m * m;
    let mut sites = vec![[0.0; 2]; n];
    let mut t = Vec::with_capacity(5 * n);
    let mut link = |from: usize, to: usize, theta: f64| {
        let e = Complex64::from_polar(-inv, -theta);
        t.push((from, to, e));
        t.push((to, from, e.conj()));
    };
    for j in 0..m {
        for i in 0..m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let k = idx(i, j);
            sites[k] = [x, y];
            let right = if i + 1 < m { 0.0 } else { -b * l * y };
            link(k, idx((i + 1) % m, j), right + link_var([x, y], [h, 0.0]));
            link(k, idx(i, (j + 1) % m), b * x * h + link_var([x, y], [0.0, h]));
        }
    }
    for (k, p) in sites.iter().enumerate() {
        t.push((k, k, Complex64::new(4.0 * inv + v.value(*p), 0.0)));
    }
    let matrix = CsrMatrix::from_triplets(n, t);
    matrix.check_hermitian(1e-12 * inv)?;
    Ok(DiscreteHamiltonian {
        sites,
        h,
        matrix,
        grid: None,
        periodic: Some(l),
        stencil: Stencil::Second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_model::PeriodicExpr;
    use crate::lattice::full_spectrum;

    #[test]
    fn plaquette_flux_is_uniform() {
        let spec = TorusSpec {
            b0: TorusSpec::quantized_field(3.0, 4.0),
            side: 4.0,
            m: 10,
        };
        let op = torus_landau(&spec, &PeriodicExpr::zero(), &PeriodicExpr::zero()).unwrap();
        let m = spec.m;
        let hop = |a: (usize, usize), b: (usize, usize)| op.matrix.get(fold(a.1, m) * m + a.0, fold(b.1, m) * m + b.0);
        let want = spec.b0 * spec.h() * spec.h();
        for j in 0..m {
            for i in 0..m {
                let (i1, j1) = ((i + 1) % m, (j + 1) % m);
                // product of hoppings around the plaquette carries e^{-i·flux}
                let w = hop((i, j), (i1, j)) * hop((i1, j), (i1, j1)) * hop((i1, j1), (i, j1)) * hop((i, j1), (i, j));
                let phase = -w.arg();
                let d = (phase - want).rem_euclid(2.0 * PI);
                assert!(d.min(2.0 * PI - d) < 1e-9, "plaquette ({i},{j}): {phase} vs {want}");
            }
        }
    }

    #[test]
    fn periodic_part_adds_its_plaquette_flux() {
        use crate::field_model::{Term, TermKind};
        use crate::quadrature::gauss_legendre;
        let spec = TorusSpec {
            b0: TorusSpec::quantized_field(6.0, 2.0),
            side: 2.0,
            m: 12,
        };
        let bv = PeriodicExpr::from_terms(vec![
            Term::new(TermKind::SinCos, 0.7, 1, 1),
            Term::new(TermKind::CosY, -0.4, 0, 2),
        ]);
        let op = torus_landau(&spec, &bv, &PeriodicExpr::zero()).unwrap();
        let (m, h) = (spec.m, spec.h());
        let hop = |a: (usize, usize), b: (usize, usize)| op.matrix.get(fold(a.1, m) * m + a.0, fold(b.1, m) * m + b.0);
        let (x, w) = gauss_legendre(12);
        for (i, j) in [(0, 0), (3, 7), (11, 11), (5, 11)] {
            let (i1, j1) = ((i + 1) % m, (j + 1) % m);
            let prod = hop((i, j), (i1, j)) * hop((i1, j), (i1, j1)) * hop((i1, j1), (i, j1)) * hop((i, j1), (i, j));
            let mut want = spec.b0 * h * h;
            for (xa, wa) in x.iter().zip(&w) {
                for (xb, wb) in x.iter().zip(&w) {
                    let p = [(i as f64 + 0.5 + 0.5 * xa) * h, (j as f64 + 0.5 + 0.5 * xb) * h];
                    want += 0.25 * h * h * wa * wb * bv.value(p);
                }
            }
            let d = (-prod.arg() - want).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-8, "plaquette ({i},{j})");
        }
        assert!(torus_landau(&spec, &PeriodicExpr::constant(0.3), &PeriodicExpr::zero()).is_err());
    }

    #[test]
    fn zero_field_spectrum_is_free() {
        let spec = TorusSpec {
            b0: 0.0,
            side: 1.0,
            m: 8,
        };
        let op = torus_landau(&spec, &PeriodicExpr::zero(), &PeriodicExpr::zero()).unwrap();
        let ev = full_spectrum(&op, false).unwrap().values;
        let h = spec.h();
        let mut want: Vec<f64> = (0..8)
            .flat_map(|a| (0..8).map(move |b| (a, b)))
            .map(|(a, b)| {
                let k = |q: usize| (2.0 - 2.0 * (2.0 * PI * q as f64 / 8.0).cos()) / (h * h);
                k(a) + k(b)
            })
            .collect();
        want.sort_by(f64::total_cmp);
        for (x, y) in ev.iter().zip(&want) {
            assert!((x - y).abs() < 1e-9 * y.max(1.0));
        }
    }

    #[test]
    fn rejects_fractional_flux() {
        let spec = TorusSpec {
            b0: 1.0,
            side: 3.0,
            m: 9,
        };
        assert!(torus_landau(&spec, &PeriodicExpr::zero(), &PeriodicExpr::zero()).is_err());
    }
}
