//! Eigensolvers and subspace restriction.

mod dense;
mod lanczos;
mod subspace;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, DenseMatrix};
use crate::tensorspace::TensorError;

pub use dense::{eig_householder_ql, eig_jacobi, JACOBI_MAX_DIM};
pub use lanczos::{lowest_eigs, lowest_eigs_with, LanczosOptions};
pub use subspace::{restrict, subspace_residual, ORTHONORMAL_TOLERANCE};

/// Input to the dense solver must be Hermitian to this entrywise tolerance.
pub const DENSE_HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest matrix the dense solver accepts.
pub const DENSE_MAX_DIM: usize = 4096;

/// Eigenvalues closer than this are reported as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix deviates from Hermitian by {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("dimension {dim} exceeds the dense solver limit of {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("basis is not orthonormal: Gram deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },
    #[error("requested {requested} eigenvalues of a {dim}-dimensional operator")]
    CountTooLarge { requested: usize, dim: usize },
    #[error("eigenvalue iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("operator has eigenvalue {0:e} below zero")]
    NegativeEigenvalue(f64),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Ascending eigenpairs with per-pair residuals `‖Hv - λv‖`.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns (dense mode only).
    pub vectors: Option<DenseMatrix>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
}

impl EigResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// Full spectrum and eigenvectors of a dense Hermitian matrix.
pub fn eig_dense(matrix: &DenseMatrix) -> Result<EigResult, SpectralError> {
    check_dense_input(matrix)?;
    let n = matrix.nrows();
    let (values, vectors) = if n <= JACOBI_MAX_DIM {
        eig_jacobi(matrix)?
    } else {
        let (values, vectors) = eig_householder_ql(matrix, true)?;
        (values, vectors.expect("vectors requested"))
    };
    let residuals = (0..n)
        .map(|i| {
            let v = vectors.column(i);
            (matrix * v - v * linalg::c(values[i])).norm()
        })
        .collect();
    Ok(EigResult { values, vectors: Some(vectors), residuals, converged: vec![true; n] })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_dense(matrix: &DenseMatrix) -> Result<Vec<f64>, SpectralError> {
    check_dense_input(matrix)?;
    if matrix.nrows() <= JACOBI_MAX_DIM {
        Ok(eig_jacobi(matrix)?.0)
    } else {
        Ok(eig_householder_ql(matrix, false)?.0)
    }
}

fn check_dense_input(matrix: &DenseMatrix) -> Result<(), SpectralError> {
    let n = matrix.nrows();
    if n > DENSE_MAX_DIM {
        return Err(SpectralError::TooLarge { dim: n, limit: DENSE_MAX_DIM });
    }
    let deviation = linalg::hermitian_deviation(matrix);
    if deviation > DENSE_HERMITIAN_TOLERANCE * linalg::max_abs(matrix).max(1.0) {
        return Err(SpectralError::NotHermitian { deviation });
    }
    Ok(())
}

/// A group of (numerically) equal eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigenvalue multiset with explicit rounding: consecutive ascending values
/// closer than `gap` share a cluster, represented by their mean.
pub fn cluster_values(values: &[f64], gap: f64) -> Vec<Cluster> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, usize, f64)> = Vec::new();
    for v in sorted {
        match clusters.last_mut() {
            Some((sum, count, last)) if v - *last < gap => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => clusters.push((v, 1, v)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, count, _)| Cluster { value: sum / count as f64, multiplicity: count })
        .collect()
}

/// `{0:7,1:4,...}` with values rounded to the nearest integer when within
/// `1e-10` of one.
pub struct Multiset<'a>(pub &'a [Cluster]);

impl fmt::Display for Multiset<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let rounded = c.value.round();
            if (c.value - rounded).abs() <= 1e-10 {
                write!(f, "{}:{}", rounded as i64, c.multiplicity)?;
            } else {
                write!(f, "{:.12}:{}", c.value, c.multiplicity)?;
            }
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, C64};
    use proptest::prelude::*;

    #[test]
    fn diagonal_example() {
        let r = eig_dense(&linalg::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(r.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rank_one_projector_example() {
        let mut m = linalg::zeros(2);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        m[(0, 1)] = c(-0.5);
        m[(1, 0)] = c(-0.5);
        let r = eig_dense(&m).unwrap();
        assert!(r.values[0].abs() < 1e-15);
        assert!((r.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = linalg::unit(2, 0, 1);
        assert!(matches!(eig_dense(&m), Err(SpectralError::NotHermitian { .. })));
    }

    #[test]
    fn clusters_and_multiset_format() {
        let values = [0.0, 1e-12, 1.0, 1.0 + 1e-11, 2.0, 3.0, 3.0];
        let clusters = cluster_values(&values, CLUSTER_GAP);
        assert_eq!(Multiset(&clusters).to_string(), "{0:2,1:2,2:1,3:2}");
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> DenseMatrix {
        let mut k = 0;
        let mut next = || {
            k += 1;
            entries[k % entries.len()] * ((k * 7919) as f64).sin()
        };
        let mut m = linalg::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(next());
            for j in i + 1..n {
                let z = C64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reconstruction_and_orthonormality(n in 1usize..160, entries in prop::collection::vec(-2.0f64..2.0, 16)) {
            let m = random_hermitian(n, &entries);
            let r = eig_dense(&m).unwrap();
            let v = r.vectors.as_ref().unwrap();
            let lambda = linalg::diag(&r.values);
            let recon = linalg::frobenius(&(&m - v * lambda * v.adjoint()));
            prop_assert!(recon <= 1e-9 * linalg::frobenius(&m).max(1e-300));
            let gram = v.adjoint() * v;
            prop_assert!(linalg::max_abs_diff(&gram, &linalg::identity(n)) <= 1e-10);
            prop_assert!(r.values.windows(2).all(|w| w[0] <= w[1]));
            let norm = r.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
            prop_assert!(r.residuals.iter().all(|&res| res <= 1e-10 * norm.max(1.0)));
        }
    }

    #[test]
    fn reconstruction_at_dimension_512() {
        let entries: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).cos()).collect();
        let m = random_hermitian(512, &entries);
        let r = eig_dense(&m).unwrap();
        let v = r.vectors.as_ref().unwrap();
        let recon = linalg::frobenius(&(&m - v * linalg::diag(&r.values) * v.adjoint()));
        assert!(recon <= 1e-9 * linalg::frobenius(&m));
        assert!(linalg::max_abs_diff(&(v.adjoint() * v), &linalg::identity(512)) <= 1e-10);
    }
}
