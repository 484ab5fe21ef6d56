use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::Grid;
use super::sparse::CsrMatrix;
use super::{DiscreteHamiltonian, Stencil};
use crate::field_model::ScalarField;
use crate::gauge::{peierls_link_phase, VectorPotential};
use crate::{Rect, Result};

/// Largest `B₀h²` for which the lowest Landau clusters are resolved.
pub const MAX_B0_H2: f64 = 0.3;

/// Warning text when `B₀h²` exceeds [`MAX_B0_H2`].
pub fn resolution_warning(b0: f64, h: f64) -> Option<String> {
    let r = b0 * h * h;
    (r > MAX_B0_H2).then(|| format!("B0 h^2 = {r:.3} exceeds {MAX_B0_H2}; Landau clusters are under-resolved"))
}

/// Dirichlet Hamiltonian `(p − A)² + V` on the interior nodes of `rect`:
/// `(Hψ)_j = h⁻² Σ_e (ψ_j − e^(−iθ_{j,e}) ψ_{j+e}) + V_j ψ_j` with
/// `θ_{j,e} = ∫ A·dl` along the link (second order), or the five-point
/// `(−1, 16, −30, 16, −1)/12` version with links of length `h` and `2h`
/// (fourth order). Neighbours outside the box are dropped.
pub fn assemble(
    rect: Rect,
    a: &dyn VectorPotential,
    v: &dyn ScalarField,
    h: f64,
    stencil: Stencil,
) -> Result<DiscreteHamiltonian> {
    let grid = Grid::new(rect, h)?;
    let (nx, ny) = (grid.nx, grid.ny);
    // θ of the links (i,j)→(i+1,j) and (i,j)→(i,j+1)
    let hx: Vec<f64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..nx.saturating_sub(1)).map(move |i| peierls_link_phase(a, grid.point(i, j), grid.point(i + 1, j)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let hy: Vec<f64> = (0..ny.saturating_sub(1))
        .into_par_iter()
        .flat_map_iter(|j| (0..nx).map(move |i| peierls_link_phase(a, grid.point(i, j), grid.point(i, j + 1))))
        .collect::<Result<Vec<f64>>>()?;
    let theta_x = |i: usize, j: usize| hx[j * (nx - 1) + i];
    let theta_y = |i: usize, j: usize| hy[j * nx + i];

    let inv = 1.0 / (h * h);
    let mut t: Vec<(usize, usize, Complex64)> = Vec::with_capacity(grid.len() * 9);
    let mut push_link = |from: usize, to: usize, coef: f64, theta: f64| {
        let e = Complex64::from_polar(coef, -theta);
        t.push((from, to, e));
        t.push((to, from, e.conj()));
    };
    let (c1, c2, cdiag) = match stencil {
        Stencil::Second => (-inv, 0.0, 4.0 * inv),
        Stencil::Fourth => (-16.0 / 12.0 * inv, 1.0 / 12.0 * inv, 60.0 / 12.0 * inv),
    };
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            if i + 1 < nx {
                push_link(k, grid.index(i + 1, j), c1, theta_x(i, j));
            }
            if j + 1 < ny {
                push_link(k, grid.index(i, j + 1), c1, theta_y(i, j));
            }
            if c2 != 0.0 {
                if i + 2 < nx {
                    push_link(k, grid.index(i + 2, j), c2, theta_x(i, j) + theta_x(i + 1, j));
                }
                if j + 2 < ny {
                    push_link(k, grid.index(i, j + 2), c2, theta_y(i, j) + theta_y(i, j + 1));
                }
            }
        }
    }
    let points = grid.points();
    for (k, p) in points.iter().enumerate() {
        t.push((k, k, Complex64::new(cdiag + v.value(*p), 0.0)));
    }
    let matrix = CsrMatrix::from_triplets(grid.len(), t);
    matrix.check_hermitian(1e-12 * inv)?;
    Ok(DiscreteHamiltonian {
        sites: points,
        h,
        matrix,
        grid: Some(grid),
        periodic: None,
        stencil,
    })
}
