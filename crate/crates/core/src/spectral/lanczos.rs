//! Restarted Lanczos with full reorthogonalization and explicit locking.
//!
//! Each requested eigenpair is found in the orthogonal complement of the pairs
//! already locked, so degenerate eigenvalues (a yes-instance kernel, for
//! instance) show up with their multiplicity instead of once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, C64, ZERO};
use crate::tensorspace::SparseOperator;

use super::dense::tridiagonal_ql;
use super::{EigResult, SpectralError};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub max_krylov: usize,
    /// Restart cycles allowed per eigenpair before giving up.
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_krylov: 160, max_restarts: 400 }
    }
}

/// The `count` smallest eigenvalues of a Hermitian operator, each with residual
/// `‖Hx - θx‖ ≤ tol` when its `converged` flag is set.
pub fn lowest_eigs(
    op: &SparseOperator,
    count: usize,
    tol: f64,
    seed: u64,
) -> Result<EigResult, SpectralError> {
    lowest_eigs_with(op, count, tol, seed, &LanczosOptions::default())
}

pub fn lowest_eigs_with(
    op: &SparseOperator,
    count: usize,
    tol: f64,
    seed: u64,
    options: &LanczosOptions,
) -> Result<EigResult, SpectralError> {
    let n = op.dim();
    if count > n {
        return Err(SpectralError::CountTooLarge { requested: count, dim: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locked: Vec<Vec<C64>> = Vec::with_capacity(count);
    let mut found: Vec<(f64, f64, bool)> = Vec::with_capacity(count);

    for _ in 0..count {
        let mut start: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        orthogonalize(&mut start, &locked);
        normalize(&mut start);

        let mut best: Option<(Vec<C64>, f64, f64)> = None;
        for _ in 0..options.max_restarts {
            let (x, theta, residual) = lanczos_cycle(op, &start, &locked, options.max_krylov);
            let done = residual <= tol;
            start = x.clone();
            best = Some((x, theta, residual));
            if done {
                break;
            }
        }
        let (x, theta, residual) = best.expect("at least one restart cycle");
        found.push((theta, residual, residual <= tol));
        locked.push(x);
    }

    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| found[a].0.total_cmp(&found[b].0));
    Ok(EigResult {
        values: order.iter().map(|&i| found[i].0).collect(),
        vectors: None,
        residuals: order.iter().map(|&i| found[i].1).collect(),
        converged: order.iter().map(|&i| found[i].2).collect(),
    })
}

/// One Krylov cycle from `start`; returns the lowest Ritz pair and its residual.
fn lanczos_cycle(
    op: &SparseOperator,
    start: &[C64],
    locked: &[Vec<C64>],
    max_krylov: usize,
) -> (Vec<C64>, f64, f64) {
    let n = op.dim();
    let m = max_krylov.min(n - locked.len()).max(1);
    let mut basis: Vec<Vec<C64>> = vec![start.to_vec()];
    let mut alphas = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![ZERO; n];

    for j in 0..m {
        op.apply_into(&basis[j], &mut w);
        let alpha = linalg::inner(&basis[j], &w).re;
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * alpha;
        }
        if j > 0 {
            let beta = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * beta;
            }
        }
        // two passes of classical Gram-Schmidt against everything kept
        for _ in 0..2 {
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
        }
        let beta = linalg::vec_norm(&w);
        let scale = alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
        if j + 1 == m || beta <= 1e-12 * scale {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }

    let k = alphas.len();
    let (values, vectors) = tridiagonal_ql(&alphas, &betas[..k - 1], true)
        .expect("Lanczos tridiagonal matrices are well conditioned");
    let s = &vectors.expect("vectors requested")[..k];
    let mut x = vec![ZERO; n];
    for (coef, v) in s.iter().zip(&basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += vi * *coef;
        }
    }
    orthogonalize(&mut x, locked);
    normalize(&mut x);
    let hx = op.apply_slice(&x);
    let theta = linalg::inner(&x, &hx).re;
    let residual = hx
        .iter()
        .zip(&x)
        .map(|(h, v)| (h - v * theta).norm_sqr())
        .sum::<f64>()
        .sqrt();
    debug_assert!((theta - values[0]).abs() <= 1e-6 * (1.0 + theta.abs()) || residual > 1e-6);
    (x, theta, residual)
}

fn orthogonalize(v: &mut [C64], against: &[Vec<C64>]) {
    for u in against {
        let proj = linalg::inner(u, v);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= ui * proj;
        }
    }
}

fn normalize(v: &mut [C64]) {
    let norm = linalg::vec_norm(v);
    for x in v.iter_mut() {
        *x /= norm;
    }
}
