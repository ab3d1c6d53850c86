//! Small dense helpers shared by the term builders and the audits.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type DenseMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> DenseMatrix {
    DenseMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> DenseMatrix {
    DenseMatrix::zeros(dim, dim)
}

/// Kronecker product with the left factor most significant.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.kronecker(b)
}

pub fn kron_all(factors: &[DenseMatrix]) -> DenseMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Column vector with a single one at `index`.
pub fn ket(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Computational-basis ket of a bit string such as `"01"`.
pub fn ket_bits(bits: &str) -> Vec<C64> {
    let index = usize::from_str_radix(bits, 2).expect("bit string");
    ket(1 << bits.len(), index)
}

/// `|a⟩⟨b|`.
pub fn outer(a: &[C64], b: &[C64]) -> DenseMatrix {
    DenseMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

pub fn projector(v: &[C64]) -> DenseMatrix {
    outer(v, v)
}

/// `|i⟩⟨j|` on a `dim`-level particle.
pub fn unit(dim: usize, i: usize, j: usize) -> DenseMatrix {
    let mut m = zeros(dim);
    m[(i, j)] = ONE;
    m
}

pub fn basis_projector(dim: usize, i: usize) -> DenseMatrix {
    unit(dim, i, i)
}

pub fn diag(entries: &[f64]) -> DenseMatrix {
    let mut m = zeros(entries.len());
    for (i, &e) in entries.iter().enumerate() {
        m[(i, i)] = c(e);
    }
    m
}

pub fn pauli_z() -> DenseMatrix {
    diag(&[1.0, -1.0])
}

pub fn scale(m: &DenseMatrix, s: f64) -> DenseMatrix {
    m.map(|z| z * s)
}

pub fn combine(a: &[C64], sa: f64, b: &[C64], sb: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * sa + y * sb).collect()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &DenseMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_deviation(m: &DenseMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of `P^2 - P`.
pub fn idempotency_residual(p: &DenseMatrix) -> f64 {
    frobenius(&(p * p - p))
}

/// `max |U†U - I|` entrywise.
pub fn unitarity_deviation(u: &DenseMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

pub fn mat_vec(m: &DenseMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Conjugates a two-qubit matrix by SWAP, exchanging which qubit is most significant.
pub fn swap_qubits(u: &DenseMatrix) -> DenseMatrix {
    assert_eq!(u.nrows(), 4);
    let perm = [0usize, 2, 1, 3];
    DenseMatrix::from_fn(4, 4, |i, j| u[(perm[i], perm[j])])
}
