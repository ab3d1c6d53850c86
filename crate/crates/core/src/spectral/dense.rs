//! Dense Hermitian eigensolvers.
//!
//! Large matrices go through a complex Householder reduction to a real
//! symmetric tridiagonal matrix followed by implicit-shift QL. Small ones
//! (the gadget blocks) use cyclic complex Jacobi rotations, which keep
//! eigenvalues sharp to a few ulps.

use crate::linalg::{self, DenseMatrix, C64, ONE, ZERO};

use super::SpectralError;

/// Blocks at or below this dimension are diagonalized by Jacobi rotations.
pub const JACOBI_MAX_DIM: usize = 64;

const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITERATIONS: usize = 60;

/// Unitary reduction `A = Q T Q†` with `T` real symmetric tridiagonal.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i] = T[i+1][i]`, nonnegative.
    pub off: Vec<f64>,
    /// Row-major `n x n`, present when vectors were requested.
    pub q: Option<Vec<C64>>,
}

/// Householder reduction of a Hermitian matrix.
pub(crate) fn tridiagonalize(matrix: &DenseMatrix, want_q: bool) -> Tridiagonal {
    let n = matrix.nrows();
    // row-major working copy
    let mut a: Vec<C64> = (0..n * n).map(|k| matrix[(k / n, k % n)]).collect();
    let mut q: Option<Vec<C64>> = want_q.then(|| {
        let mut id = vec![ZERO; n * n];
        for i in 0..n {
            id[i * n + i] = ONE;
        }
        id
    });
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let xnorm = (start..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[start * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        for i in start..n {
            v[i] = a[i * n + k];
        }
        v[start] -= alpha;
        let vnorm2: f64 = (start..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // p = tau * A v restricted to the trailing block
        for i in start..n {
            let row = &a[i * n..(i + 1) * n];
            let mut acc = ZERO;
            for j in start..n {
                acc += row[j] * v[j];
            }
            p[i] = acc * tau;
        }
        let kappa = 0.5 * tau * (start..n).map(|i| v[i].conj() * p[i]).sum::<C64>();
        for i in start..n {
            p[i] -= kappa * v[i];
        }
        // A <- A - v p† - p v† on the trailing block
        for i in start..n {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in start..n {
                row[j] -= vi * p[j].conj() + pi * v[j].conj();
            }
        }
        // column k below the diagonal becomes (alpha, 0, ...)
        a[start * n + k] = alpha;
        a[k * n + start] = alpha.conj();
        for i in start + 1..n {
            a[i * n + k] = ZERO;
            a[k * n + i] = ZERO;
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v†)
            for r in 0..n {
                let row = &mut q[r * n..(r + 1) * n];
                let mut w = ZERO;
                for j in start..n {
                    w += row[j] * v[j];
                }
                w *= tau;
                for j in start..n {
                    row[j] -= w * v[j].conj();
                }
            }
        }
    }

    // Diagonal phase change making the subdiagonal real and nonnegative.
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut phases = vec![ONE; n];
    for i in 0..n {
        diag.push(a[i * n + i].re);
        if i + 1 < n {
            let sub = a[(i + 1) * n + i];
            let r = sub.norm();
            off.push(r);
            phases[i + 1] = if r > 0.0 { phases[i] * (sub / r) } else { phases[i] };
        }
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for j in 0..n {
                q[r * n + j] *= phases[j];
            }
        }
    }
    Tridiagonal { diag, off, q }
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix.
///
/// Returns ascending eigenvalues and, when `want_vectors`, the eigenvectors of
/// the tridiagonal matrix as rows (`z[i * n + k]` is component `k` of vector `i`).
pub(crate) fn tridiagonal_ql(
    diag: &[f64],
    off: &[f64],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>), SpectralError> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z: Option<Vec<f64>> = want_vectors.then(|| {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    });

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        let m = m.min(n - 1);
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > QL_MAX_ITERATIONS {
                    return Err(SpectralError::NotConverged { iterations, residual: e[l].abs() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let t = zi1[k];
                            zi1[k] = s * zi[k] + c * t;
                            zi[k] = c * zi[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut sorted = vec![0.0; n * n];
        for (dst, &src) in order.iter().enumerate() {
            sorted[dst * n..(dst + 1) * n].copy_from_slice(&z[src * n..(src + 1) * n]);
        }
        sorted
    });
    Ok((values, vectors))
}

/// Householder + QL. Returns ascending values and eigenvectors as columns.
pub fn eig_householder_ql(
    matrix: &DenseMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<DenseMatrix>), SpectralError> {
    let n = matrix.nrows();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| linalg::zeros(0))));
    }
    let tri = tridiagonalize(matrix, want_vectors);
    let (values, z) = tridiagonal_ql(&tri.diag, &tri.off, want_vectors)?;
    let vectors = match (tri.q, z) {
        (Some(q), Some(z)) => {
            // V[:, i] = Q z_i
            let mut v = linalg::zeros(n);
            for r in 0..n {
                let qrow = &q[r * n..(r + 1) * n];
                for i in 0..n {
                    let zi = &z[i * n..(i + 1) * n];
                    let mut acc = ZERO;
                    for k in 0..n {
                        acc += qrow[k] * zi[k];
                    }
                    v[(r, i)] = acc;
                }
            }
            Some(v)
        }
        _ => None,
    };
    Ok((values, vectors))
}

/// Cyclic complex Jacobi. Returns ascending values and eigenvectors as columns.
pub fn eig_jacobi(matrix: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix), SpectralError> {
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut v = linalg::identity(n);
    let scale = linalg::frobenius(matrix).max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let phase = apq / b;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + tau.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if !converged {
        return Err(SpectralError::NotConverged { iterations: JACOBI_MAX_SWEEPS, residual: f64::NAN });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    Ok((values, vectors))
}
