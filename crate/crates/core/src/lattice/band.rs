//! Banded factorizations without pivoting.
//!
//! [`BandLdlt`] factors a Hermitian `A − σ` (real `σ`) as `L D Lᴴ`; the signs
//! of `D` give the inertia (Sylvester), i.e. the number of eigenvalues below
//! `σ`. [`BandLu`] handles complex shifts.

use num_complex::Complex64;

use super::sparse::CsrMatrix;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    // Σ a_k conj(b_k)
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.im * y.re - x.re * y.im;
    }
    Complex64::new(re, im)
}

/// `L D Lᴴ` of a Hermitian band matrix with half bandwidth `p`.
#[derive(Debug, Clone)]
pub struct BandLdlt {
    pub n: usize,
    pub p: usize,
    /// Row `i` holds `L[i, i−p..i]` in slots `0..p`; slot `p` is unused.
    l: Vec<Complex64>,
    pub d: Vec<f64>,
    /// Pivots that had to be nudged away from zero.
    pub jittered: usize,
}

impl BandLdlt {
    /// Factors `A − σ I`.
    pub fn factor(a: &CsrMatrix, sigma: f64) -> Self {
        let n = a.n;
        let p = a.bandwidth();
        let w = p + 1;
        let mut l = vec![ZERO; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i && i - j <= p {
                    l[i * w + (j + p - i)] = v;
                }
            }
            l[i * w + p] -= sigma;
        }
        let (lo, hi) = a.gershgorin();
        let scale = (hi - sigma).abs().max((lo - sigma).abs()).max(1.0);
        let tiny = 1e-14 * scale;
        let mut d = vec![0.0; n];
        let mut jittered = 0;
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            // slots of row i hold W[i,k] = L[i,k] d_k until the row is finished
            for j in j0..i {
                let len = j - j0;
                let (head, tail) = l.split_at_mut(i * w);
                let row_j = &head[j * w..j * w + w];
                let row_i = &mut tail[..w];
                let ai = j0 + p - i;
                let aj = j0 + p - j;
                let s = dot_conj(&row_i[ai..ai + len], &row_j[aj..aj + len]);
                row_i[j + p - i] -= s;
            }
            let row_i = &mut l[i * w..i * w + w];
            let mut di = row_i[p].re;
            for k in j0..i {
                let wk = row_i[k + p - i];
                di -= wk.norm_sqr() / d[k];
                row_i[k + p - i] = wk / d[k];
            }
            if di.abs() < tiny {
                di = if di < 0.0 { -tiny } else { tiny };
                jittered += 1;
            }
            row_i[p] = Complex64::new(di, 0.0);
            d[i] = di;
        }
        Self { n, p, l, d, jittered }
    }

    /// Number of negative pivots = number of eigenvalues below `σ`.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn min_abs_pivot(&self) -> f64 {
        self.d.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let (n, p, w) = (self.n, self.p, self.p + 1);
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            let row = &self.l[i * w..i * w + w];
            let mut s = ZERO;
            for k in j0..i {
                s += row[k + p - i] * x[k];
            }
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for r in (0..n).rev() {
            let xr = x[r];
            let j0 = r.saturating_sub(p);
            let row = &self.l[r * w..r * w + w];
            for k in j0..r {
                x[k] -= row[k + p - r].conj() * xr;
            }
        }
    }
}

impl BandLdlt {
    /// Solves for `m` right-hand sides stored row-major (`x[i·m + c]`).
    pub fn solve_block_in_place(&self, x: &mut [Complex64], m: usize) {
        let (n, p, w) = (self.n, self.p, self.p + 1);
        debug_assert_eq!(x.len(), n * m);
        let mut acc = vec![ZERO; m];
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            let row = &self.l[i * w..i * w + w];
            acc.fill(ZERO);
            for k in j0..i {
                let lik = row[k + p - i];
                for (a, xk) in acc.iter_mut().zip(&x[k * m..k * m + m]) {
                    *a += lik * xk;
                }
            }
            for (xi, a) in x[i * m..i * m + m].iter_mut().zip(&acc) {
                *xi -= a;
            }
        }
        for (i, d) in self.d.iter().enumerate() {
            for xi in &mut x[i * m..i * m + m] {
                *xi /= d;
            }
        }
        for r in (0..n).rev() {
            let j0 = r.saturating_sub(p);
            let row = &self.l[r * w..r * w + w];
            let (head, tail) = x.split_at_mut(r * m);
            let xr = &tail[..m];
            for k in j0..r {
                let lrk = row[k + p - r].conj();
                for (xk, v) in head[k * m..k * m + m].iter_mut().zip(xr) {
                    *xk -= lrk * v;
                }
            }
        }
    }
}

/// `L U` of a general band matrix (half bandwidth `p`), no pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    pub n: usize,
    pub p: usize,
    /// Row `i` holds columns `i−p..=i+p` in slots `0..2p+1`.
    a: Vec<Complex64>,
}

impl BandLu {
    /// Factors `A − z I`.
    pub fn factor(m: &CsrMatrix, z: Complex64) -> Self {
        let n = m.n;
        let p = m.bandwidth();
        let w = 2 * p + 1;
        let mut a = vec![ZERO; n * w];
        for i in 0..n {
            for (j, v) in m.row(i) {
                a[i * w + (j + p - i)] = v;
            }
            a[i * w + p] -= z;
        }
        for k in 0..n {
            let pivot = a[k * w + p];
            let end = (k + p + 1).min(n);
            for i in k + 1..end {
                let mult = a[i * w + (k + p - i)] / pivot;
                a[i * w + (k + p - i)] = mult;
                let cols = (k + p + 1).min(n) - (k + 1);
                for c in 0..cols {
                    let j = k + 1 + c;
                    let ukj = a[k * w + (j + p - k)];
                    a[i * w + (j + p - i)] -= mult * ukj;
                }
            }
        }
        Self { n, p, a }
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let (n, p, w) = (self.n, self.p, 2 * self.p + 1);
        for i in 0..n {
            let j0 = i.saturating_sub(p);
            let mut s = ZERO;
            for k in j0..i {
                s += self.a[i * w + (k + p - i)] * x[k];
            }
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let end = (i + p + 1).min(n);
            let mut s = x[i];
            for k in i + 1..end {
                s -= self.a[i * w + (k + p - i)] * x[k];
            }
            x[i] = s / self.a[i * w + p];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(2.0 + 0.1 * i as f64, 0.0)));
            if i + 1 < n {
                let e = Complex64::from_polar(1.0, 0.3 * i as f64);
                t.push((i, i + 1, e));
                t.push((i + 1, i, e.conj()));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn block_solve_matches_single_solves() {
        let a = tridiagonal(12);
        let f = BandLdlt::factor(&a, 1.7);
        let m = 3;
        let cols: Vec<Vec<Complex64>> = (0..m)
            .map(|c| {
                (0..12)
                    .map(|i| Complex64::new((i * (c + 1)) as f64, 1.0 - c as f64))
                    .collect()
            })
            .collect();
        let mut block = vec![ZERO; 12 * m];
        for (c, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                block[i * m + c] = *v;
            }
        }
        f.solve_block_in_place(&mut block, m);
        for (c, col) in cols.iter().enumerate() {
            let mut x = col.clone();
            f.solve_in_place(&mut x);
            let back = a.apply(&x);
            for i in 0..12 {
                assert!((block[i * m + c] - x[i]).norm() < 1e-12);
                assert!((back[i] - 1.7 * x[i] - col[i]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // diagonal entries 2.0 .. 3.1 with off-diagonals: compare with LU solve consistency
        let a = tridiagonal(12);
        let below = BandLdlt::factor(&a, -10.0).negative_count();
        let above = BandLdlt::factor(&a, 10.0).negative_count();
        assert_eq!((below, above), (0, 12));
        let lu = BandLu::factor(&a, Complex64::new(1.0, 0.5));
        let rhs: Vec<Complex64> = (0..12).map(|i| Complex64::new(1.0, i as f64)).collect();
        let mut x = rhs.clone();
        lu.solve_in_place(&mut x);
        let back = a.apply(&x);
        for i in 0..12 {
            assert!((back[i] - Complex64::new(1.0, 0.5) * x[i] - rhs[i]).norm() < 1e-10);
        }
    }
}
