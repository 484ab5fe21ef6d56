//! Dense and windowed Hermitian eigensolvers.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::band::BandLdlt;
use super::DiscreteHamiltonian;
use crate::{Error, Result};

/// Default largest dimension accepted by [`full_spectrum`].
pub const DENSE_CAP: usize = 8100;

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, when requested.
    pub vectors: Option<Mat<Complex64>>,
    /// `‖Hv − λv‖` per pair (empty without vectors).
    pub residuals: Vec<f64>,
    pub method: &'static str,
    pub iterations: usize,
}

impl EigenResult {
    fn empty(method: &'static str) -> Self {
        Self {
            values: Vec::new(),
            vectors: None,
            residuals: Vec::new(),
            method,
            iterations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Option<&[Complex64]> {
        self.vectors.as_ref().map(|v| v.col_as_slice(k))
    }

    /// Fraction of `|v_k|²` on the sites where `mask` is true.
    pub fn mass_fraction(&self, k: usize, mask: &[bool]) -> Option<f64> {
        let v = self.vector(k)?;
        let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let part: f64 = v.iter().zip(mask).filter(|(_, &m)| m).map(|(c, _)| c.norm_sqr()).sum();
        Some(part / total)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

fn residual(h: &DiscreteHamiltonian, lambda: f64, v: &[Complex64]) -> f64 {
    let hv = h.matrix.apply(v);
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Rayleigh quotient of `v` and the residual norm at that value.
fn rayleigh_residual(h: &DiscreteHamiltonian, v: &[Complex64]) -> (f64, f64) {
    let hv = h.matrix.apply(v);
    let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let lam = hv.iter().zip(v).map(|(a, b)| (b.conj() * a).re).sum::<f64>() / nn;
    let r = hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lam * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (lam, r / nn.sqrt())
}

/// All eigenvalues (and optionally eigenvectors) by a dense solve.
pub fn full_spectrum(h: &DiscreteHamiltonian, vectors: bool) -> Result<EigenResult> {
    full_spectrum_capped(h, vectors, DENSE_CAP)
}

pub fn full_spectrum_capped(h: &DiscreteHamiltonian, vectors: bool, cap: usize) -> Result<EigenResult> {
    let n = h.dim();
    if n > cap {
        return Err(Error::DenseCap { dim: n, cap });
    }
    let dense = h.matrix.to_dense();
    if !vectors {
        let values = dense
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
        return Ok(EigenResult {
            values,
            vectors: None,
            residuals: Vec::new(),
            method: "dense",
            iterations: 1,
        });
    }
    let evd = dense
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
    drop(dense);
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let u = evd.U().to_owned();
    let residuals = (0..n).map(|k| residual(h, values[k], u.col_as_slice(k))).collect();
    Ok(EigenResult {
        values,
        vectors: Some(u),
        residuals,
        method: "dense",
        iterations: 1,
    })
}

/// Number of eigenvalues strictly below `sigma` (Sylvester inertia).
pub fn count_below(h: &DiscreteHamiltonian, sigma: f64) -> usize {
    BandLdlt::factor(&h.matrix, sigma).negative_count()
}

/// Number of eigenvalues in `[a, b)`.
pub fn count_in(h: &DiscreteHamiltonian, a: f64, b: f64) -> usize {
    count_below(h, b).saturating_sub(count_below(h, a))
}

#[derive(Debug, Clone, Copy)]
pub struct WindowOptions {
    /// Refuse windows holding more eigenvalues than this.
    pub max_count: usize,
    /// Residual tolerance relative to `max(1, |λ|)`.
    pub tol: f64,
    pub vectors: bool,
    /// Use the dense solver at or below this dimension.
    pub dense_below: usize,
    pub seed: u64,
    pub max_restarts: usize,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            max_count: 2000,
            tol: 1e-9,
            vectors: true,
            dense_below: 1200,
            seed: 0x5eed,
            max_restarts: 8,
        }
    }
}

fn restrict_dense(h: &DiscreteHamiltonian, a: f64, b: f64, vectors: bool) -> Result<EigenResult> {
    let full = full_spectrum_capped(h, vectors, usize::MAX)?;
    let idx: Vec<usize> = (0..full.values.len())
        .filter(|&i| full.values[i] >= a && full.values[i] < b)
        .collect();
    let values = idx.iter().map(|&i| full.values[i]).collect();
    let (vecs, residuals) = match &full.vectors {
        Some(u) => {
            let m = Mat::from_fn(u.nrows(), idx.len(), |r, c| u[(r, idx[c])]);
            (Some(m), idx.iter().map(|&i| full.residuals[i]).collect())
        }
        None => (None, Vec::new()),
    };
    Ok(EigenResult {
        values,
        vectors: vecs,
        residuals,
        method: "dense-window",
        iterations: 1,
    })
}

fn orthonormalize_against(q: &Mat<Complex64>, k: usize, w: &mut Mat<Complex64>) {
    if k > 0 {
        let qk = q.subcols(0, k);
        for _ in 0..2 {
            let c = qk.adjoint() * &*w;
            *w -= qk * &c;
        }
    }
}

fn random_block(n: usize, b: usize, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    Mat::from_fn(n, b, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Eigenpairs with eigenvalues in `[a, b)`.
///
/// The count comes from two inertia computations; the pairs from a
/// shift-invert block Lanczos iteration about the window centre with full
/// reorthogonalization and thick restarts. Small problems go to the dense
/// solver.
pub fn eigs_window(h: &DiscreteHamiltonian, a: f64, b: f64, opts: &WindowOptions) -> Result<EigenResult> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!("window [{a}, {b}) is empty")));
    }
    let n = h.dim();
    let count = count_in(h, a, b);
    if count == 0 {
        return Ok(EigenResult::empty("inertia"));
    }
    if count > opts.max_count {
        return Err(Error::InvalidInput(format!(
            "window [{a}, {b}) holds {count} eigenvalues, above the limit {}",
            opts.max_count
        )));
    }
    if n <= opts.dense_below || 4 * count > n {
        return restrict_dense(h, a, b, opts.vectors);
    }

    // the window centre often sits on an eigenvalue for symmetric windows;
    // a shift that close makes the solves useless for everything else
    let (glo, ghi) = h.matrix.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(1.0);
    let width = b - a;
    let mut last_err = None;
    for offset in SHIFT_OFFSETS {
        let sigma = a + offset * width;
        let fact = BandLdlt::factor(&h.matrix, sigma);
        if fact.jittered > 0 || fact.min_abs_pivot() <= 1e-8 * scale {
            continue;
        }
        match lanczos_window(h, a, b, count, sigma, &fact, (glo, ghi), opts)? {
            Lanczos::Done(res) => return Ok(res),
            Lanczos::ShiftOnSpectrum(lam) => {
                last_err = Some(format!(
                    "shift {sigma} within {:e} of eigenvalue {lam}",
                    (lam - sigma).abs()
                ))
            }
            Lanczos::Stalled(msg) => return Err(Error::NoConvergence(msg)),
        }
    }
    Err(Error::NoConvergence(
        last_err.unwrap_or_else(|| format!("no usable shift in [{a}, {b})")),
    ))
}

/// Relative positions in the window tried as shifts, in order.
const SHIFT_OFFSETS: [f64; 5] = [0.5382, 0.4417, 0.6271, 0.3593, 0.7126];

enum Lanczos {
    Done(EigenResult),
    ShiftOnSpectrum(f64),
    Stalled(String),
}

#[allow(clippy::too_many_arguments)]
fn lanczos_window(
    h: &DiscreteHamiltonian,
    a: f64,
    b: f64,
    count: usize,
    sigma: f64,
    fact: &BandLdlt,
    (glo, ghi): (f64, f64),
    opts: &WindowOptions,
) -> Result<Lanczos> {
    let n = h.dim();
    // (H − σ)⁻¹ on a block of columns, with one step of iterative refinement
    let solve_block = |xb: &Mat<Complex64>, out: &mut Mat<Complex64>, at: usize| {
        let m = xb.ncols();
        let mut y = vec![Complex64::new(0.0, 0.0); n * m];
        for c in 0..m {
            for (i, v) in xb.col_as_slice(c).iter().enumerate() {
                y[i * m + c] = *v;
            }
        }
        fact.solve_block_in_place(&mut y, m);
        let mut r = vec![Complex64::new(0.0, 0.0); n * m];
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        let mut hy = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..m {
            for i in 0..n {
                col[i] = y[i * m + c];
            }
            h.matrix.matvec(&col, &mut hy);
            for (i, x) in xb.col_as_slice(c).iter().enumerate() {
                r[i * m + c] = x - (hy[i] - sigma * col[i]);
            }
        }
        fact.solve_block_in_place(&mut r, m);
        for c in 0..m {
            let dst = out.col_as_slice_mut(at + c);
            for i in 0..n {
                dst[i] = y[i * m + c] + r[i * m + c];
            }
        }
    };

    let op_norm = (ghi - sigma).abs().max((glo - sigma).abs());
    let block = (count + 8).min(64).min(n);
    let max_dim = (3 * count + 4 * block).max(8 * block).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut iterations = 0;
    let mut restarts = 0;
    let in_window = |th: f64| {
        th != 0.0 && {
            let lam = sigma + 1.0 / th;
            lam >= a && lam < b
        }
    };

    let mut q = Mat::<Complex64>::zeros(n, max_dim);
    let mut y = Mat::<Complex64>::zeros(n, max_dim);
    let mut t = Mat::<Complex64>::zeros(max_dim, max_dim);
    let mut k = 0;
    let mut w = random_block(n, block, &mut rng);
    // Ritz data of the previous step: (θ, coefficient vectors, block start)
    let mut pending: Option<(Vec<f64>, Mat<Complex64>, usize)> = None;
    loop {
        orthonormalize_against(&q, k, &mut w);
        let qr = w.qr();
        let mut qb = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();

        if let Some((theta, s, last)) = pending.take() {
            // ‖Op x − θx‖ = ‖R s_last‖ for the Ritz vector x = Q s
            let bl = k - last;
            let sel: Vec<usize> = (0..theta.len()).filter(|&i| in_window(theta[i])).collect();
            let est: Vec<f64> = sel
                .iter()
                .map(|&i| {
                    let mut acc = 0.0;
                    for rr in 0..r.nrows() {
                        let mut v = Complex64::new(0.0, 0.0);
                        for c in 0..bl.min(r.ncols()) {
                            v += r[(rr, c)] * s[(last + c, i)];
                        }
                        acc += v.norm_sqr();
                    }
                    acc.sqrt()
                })
                .collect();
            // ‖(H − λ)x‖ = ‖(H − σ)r‖/|θ| ≤ ‖H − σ‖·est/|θ|, loosened since the
            // bound is pessimistic for smooth residuals
            let gate = sel
                .iter()
                .zip(&est)
                .filter(|(&i, &e)| {
                    let lam = sigma + 1.0 / theta[i];
                    op_norm * e / theta[i].abs() <= 100.0 * opts.tol * lam.abs().max(1.0)
                })
                .count();
            if sel.len() >= count && gate >= count {
                // Rayleigh–Ritz with H itself: the shift-invert Ritz vectors of
                // eigenvalues far from σ carry the solve error amplified by 1/|θ|
                let qk = q.subcols(0, k);
                let mut hq = Mat::<Complex64>::zeros(n, k);
                for c in 0..k {
                    h.matrix.matvec(q.col_as_slice(c), hq.col_as_slice_mut(c));
                }
                let g = qk.adjoint() * &hq;
                let g = Mat::from_fn(k, k, |i, j| 0.5 * (g[(i, j)] + g[(j, i)].conj()));
                let evd = g
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
                let sv = evd.S().column_vector();
                let inside: Vec<usize> = (0..k).filter(|&i| sv[i].re >= a && sv[i].re < b).collect();
                let u = evd.U();
                let s_sel = Mat::from_fn(k, inside.len(), |i, j| u[(i, inside[j])]);
                let x = qk * &s_sel;
                let mut pairs: Vec<(f64, f64, usize)> = (0..inside.len())
                    .map(|c| {
                        let (lam, res) = rayleigh_residual(h, x.col_as_slice(c));
                        (lam, res, c)
                    })
                    .collect();
                let ok = pairs.iter().filter(|p| p.1 <= opts.tol * p.0.abs().max(1.0)).count();
                if ok >= count {
                    pairs.sort_by(|p, q| p.1.total_cmp(&q.1));
                    pairs.truncate(count);
                    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
                    let values = pairs.iter().map(|p| p.0).collect();
                    let residuals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                    let vectors = Mat::from_fn(n, count, |rr, c| x[(rr, pairs[c].2)]);
                    return Ok(Lanczos::Done(EigenResult {
                        values,
                        vectors: opts.vectors.then_some(vectors),
                        residuals: if opts.vectors { residuals } else { Vec::new() },
                        method: "shift-invert-block-lanczos",
                        iterations,
                    }));
                }
                if let Some(p) = pairs
                    .iter()
                    .min_by(|p, q| (p.0 - sigma).abs().total_cmp(&(q.0 - sigma).abs()))
                {
                    if (p.0 - sigma).abs() < 1e-4 * (b - a) {
                        return Ok(Lanczos::ShiftOnSpectrum(p.0));
                    }
                }
            }
            if k + qb.ncols() > max_dim {
                // thick restart: keep the dominant Ritz vectors; the new
                // block is already orthogonal to all of them
                restarts += 1;
                if restarts > opts.max_restarts {
                    break;
                }
                let keep = (count + block).min(max_dim / 2).min(k);
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by(|&i, &j| theta[j].abs().total_cmp(&theta[i].abs()));
                let s_keep = Mat::from_fn(k, keep, |i, j| s[(i, order[j])]);
                let qn = q.subcols(0, k) * &s_keep;
                let yn = y.subcols(0, k) * &s_keep;
                for c in 0..keep {
                    q.col_as_slice_mut(c).copy_from_slice(qn.col_as_slice(c));
                    y.col_as_slice_mut(c).copy_from_slice(yn.col_as_slice(c));
                }
                t.fill(Complex64::new(0.0, 0.0));
                for (c, &i) in order[..keep].iter().enumerate() {
                    t[(c, c)] = Complex64::new(theta[i], 0.0);
                }
                k = keep;
            }
        }

        // replace directions lost to deflation
        let scale = (0..r.ncols()).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
        let lost: Vec<usize> = (0..r.ncols())
            .filter(|&i| r[(i, i)].norm() < 1e-10 * scale.max(1e-300))
            .collect();
        if !lost.is_empty() {
            let mut fresh = random_block(n, qb.ncols(), &mut rng);
            orthonormalize_against(&q, k, &mut fresh);
            let fresh = fresh.qr().compute_thin_Q();
            for &c in &lost {
                for rr in 0..n {
                    qb[(rr, c)] = fresh[(rr, c)];
                }
            }
            let mut tmp = qb.clone();
            orthonormalize_against(&q, k, &mut tmp);
            qb = tmp.qr().compute_thin_Q();
        }
        let bsz = qb.ncols();
        if k + bsz > max_dim {
            break;
        }
        for c in 0..bsz {
            q.col_as_slice_mut(k + c).copy_from_slice(qb.col_as_slice(c));
        }
        solve_block(&qb, &mut y, k);
        iterations += 1;
        let k_new = k + bsz;
        let tc = q.subcols(0, k_new).adjoint() * y.subcols(k, bsz);
        for i in 0..k_new {
            for c in 0..bsz {
                t[(i, k + c)] = tc[(i, c)];
                t[(k + c, i)] = tc[(i, c)].conj();
            }
        }
        let last = k;
        k = k_new;

        // Rayleigh–Ritz on the projected shift-inverted operator
        let tk = Mat::from_fn(k, k, |i, j| 0.5 * (t[(i, j)] + t[(j, i)].conj()));
        let evd = tk
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::NoConvergence(format!("{e:?}")))?;
        let sv = evd.S().column_vector();
        let theta: Vec<f64> = (0..k).map(|i| sv[i].re).collect();
        pending = Some((theta, evd.U().to_owned(), last));

        let mut next = Mat::<Complex64>::zeros(n, bsz);
        for c in 0..bsz {
            next.col_as_slice_mut(c).copy_from_slice(y.col_as_slice(last + c));
        }
        w = next;
    }
    Ok(Lanczos::Stalled(format!(
        "window [{a}, {b}) with {count} eigenvalues after {iterations} block steps"
    )))
}

/// The `k` lowest eigenvalues.
pub fn lowest_eigenvalues(h: &DiscreteHamiltonian, k: usize, vectors: bool) -> Result<EigenResult> {
    let n = h.dim();
    let k = k.min(n);
    if n <= 1200 {
        let mut r = full_spectrum_capped(h, vectors, usize::MAX)?;
        r.values.truncate(k);
        if let Some(u) = &r.vectors {
            r.vectors = Some(Mat::from_fn(n, k, |i, j| u[(i, j)]));
            r.residuals.truncate(k);
        }
        return Ok(r);
    }
    let (lo, hi) = h.matrix.gershgorin();
    let a = lo - 1.0;
    let mut b_lo = lo;
    let mut b_hi = hi + 1.0;
    // bisection on the counting function for an upper edge just above λ_k
    for _ in 0..200 {
        let mid = 0.5 * (b_lo + b_hi);
        if count_below(h, mid) >= k {
            b_hi = mid;
        } else {
            b_lo = mid;
        }
        if b_hi - b_lo < 1e-10 * b_hi.abs().max(1.0) {
            break;
        }
    }
    let opts = WindowOptions {
        vectors,
        ..WindowOptions::default()
    };
    let mut r = eigs_window(h, a, b_hi, &opts)?;
    r.values.truncate(k);
    Ok(r)
}
