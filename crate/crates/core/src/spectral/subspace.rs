use crate::linalg::{self, DenseMatrix, C64};
use crate::tensorspace::{SparseOperator, StateVector, TensorError};

use super::SpectralError;

/// Maximum entrywise Gram deviation accepted as orthonormal.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

fn check_basis(op: &SparseOperator, basis: &[StateVector]) -> Result<(), SpectralError> {
    if let Some(b) = basis.iter().find(|b| b.shape() != op.shape()) {
        return Err(TensorError::ShapeMismatch { expected: op.dim(), got: b.shape().total_dim() }.into());
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((a.inner(b) - target).norm());
        }
    }
    if deviation > ORTHONORMAL_TOLERANCE {
        return Err(SpectralError::NotOrthonormal { deviation });
    }
    Ok(())
}

/// Matrix of `⟨b_i|H|b_j⟩`.
pub fn restrict(op: &SparseOperator, basis: &[StateVector]) -> Result<DenseMatrix, SpectralError> {
    check_basis(op, basis)?;
    let images: Vec<Vec<C64>> = basis.iter().map(|b| op.apply_slice(b.amplitudes())).collect();
    let k = basis.len();
    let mut m = DenseMatrix::from_fn(k, k, |i, j| linalg::inner(basis[i].amplitudes(), &images[j]));
    // symmetrize away rounding so downstream dense solvers see an exact Hermitian matrix
    for i in 0..k {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..k {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    Ok(m)
}

/// Frobenius norm of `(I - Π) H Π` for the projector `Π` onto `span(basis)`.
pub fn subspace_residual(op: &SparseOperator, basis: &[StateVector]) -> Result<f64, SpectralError> {
    check_basis(op, basis)?;
    let mut total = 0.0;
    for b in basis {
        let mut r = op.apply_slice(b.amplitudes());
        for u in basis {
            let proj = linalg::inner(u.amplitudes(), &r);
            for (ri, ui) in r.iter_mut().zip(u.amplitudes()) {
                *ri -= ui * proj;
            }
        }
        total += r.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(total.sqrt())
}
