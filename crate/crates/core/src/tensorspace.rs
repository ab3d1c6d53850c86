//! Mixed-radix tensor-product spaces, local terms, and sparse Hermitian operators.
//!
//! Particle 0 is the most significant digit of a basis index. A [`LocalTerm`]
//! carries a dense block on a strictly increasing list of particles; [`embed`]
//! tensors it with identities on the remaining particles and [`assemble`] sums
//! a list of terms into one canonical [`SparseOperator`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, DenseMatrix, C64, ZERO};

/// Entries with modulus below this are dropped when an operator is assembled.
pub const DROP_TOLERANCE: f64 = 1e-15;

/// Entrywise tolerance for a term block to count as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("particle dimension {0} is not supported (expected 2, 3 or 4)")]
    InvalidDimension(usize),
    #[error("expected {expected} digits, got {got}")]
    DigitCount { expected: usize, got: usize },
    #[error("digit {digit} out of range for particle {particle} of dimension {dim}")]
    DigitOutOfRange { particle: usize, digit: usize, dim: usize },
    #[error("support {support:?} is not strictly increasing and within {particles} particles")]
    InvalidSupport { support: Vec<usize>, particles: usize },
    #[error("support {0:?} is empty or not strictly increasing")]
    UnorderedSupport(Vec<usize>),
    #[error("block is {got}x{got} but the support spans dimension {expected}")]
    BlockMismatch { expected: usize, got: usize },
    #[error("block deviates from Hermitian by {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("shape mismatch: operator has dimension {expected}, vector has {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Ordered particle dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SpaceShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self, TensorError> {
        if let Some(&bad) = dims.iter().find(|d| !(2..=4).contains(*d)) {
            return Err(TensorError::InvalidDimension(bad));
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let total_dim = dims.iter().product();
        Ok(Self { dims, strides, total_dim })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_particles(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn stride(&self, particle: usize) -> usize {
        self.strides[particle]
    }

    /// Mixed-radix rank of a basis configuration.
    pub fn basis_index(&self, digits: &[usize]) -> Result<usize, TensorError> {
        if digits.len() != self.dims.len() {
            return Err(TensorError::DigitCount { expected: self.dims.len(), got: digits.len() });
        }
        let mut index = 0;
        for (particle, (&digit, &dim)) in digits.iter().zip(&self.dims).enumerate() {
            if digit >= dim {
                return Err(TensorError::DigitOutOfRange { particle, digit, dim });
            }
            index += digit * self.strides[particle];
        }
        Ok(index)
    }

    /// Inverse of [`SpaceShape::basis_index`].
    pub fn digits(&self, index: usize) -> Vec<usize> {
        assert!(index < self.total_dim, "basis index {index} out of range");
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&dim, &stride)| (index / stride) % dim)
            .collect()
    }

    pub fn support_dim(&self, support: &[usize]) -> usize {
        support.iter().map(|&p| self.dims[p]).product()
    }

    pub fn check_support(&self, support: &[usize]) -> Result<(), TensorError> {
        let increasing = support.windows(2).all(|w| w[0] < w[1]);
        let in_range = support.iter().all(|&p| p < self.dims.len());
        if support.is_empty() || !increasing || !in_range {
            return Err(TensorError::InvalidSupport {
                support: support.to_vec(),
                particles: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Shape formed by the particles in `support`, in order.
    pub fn subshape(&self, support: &[usize]) -> Result<SpaceShape, TensorError> {
        self.check_support(support)?;
        SpaceShape::new(support.iter().map(|&p| self.dims[p]).collect())
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &SpaceShape) -> SpaceShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SpaceShape::new(dims).expect("dimensions already validated")
    }
}

impl TryFrom<Vec<usize>> for SpaceShape {
    type Error = TensorError;
    fn try_from(dims: Vec<usize>) -> Result<Self, TensorError> {
        SpaceShape::new(dims)
    }
}

impl From<SpaceShape> for Vec<usize> {
    fn from(shape: SpaceShape) -> Vec<usize> {
        shape.dims
    }
}

/// Which printed Hamiltonian piece a term belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    ClockInit,
    Clock1,
    Clock2,
    H4,
    ClockProp1,
    ClockProp2,
    GateProp,
    Init,
    Out,
}

impl Family {
    /// Canonical bundle order.
    pub const ALL: [Family; 9] = [
        Family::ClockInit,
        Family::Clock1,
        Family::Clock2,
        Family::H4,
        Family::ClockProp1,
        Family::ClockProp2,
        Family::GateProp,
        Family::Init,
        Family::Out,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::ClockInit => "clockinit",
            Family::Clock1 => "clock1",
            Family::Clock2 => "clock2",
            Family::H4 => "h4",
            Family::ClockProp1 => "clockprop1",
            Family::ClockProp2 => "clockprop2",
            Family::GateProp => "gateprop",
            Family::Init => "init",
            Family::Out => "out",
        }
    }

    /// Families that only act on the clock register and are diagonal in its basis.
    pub fn is_clock_check(self) -> bool {
        matches!(self, Family::ClockInit | Family::Clock1 | Family::Clock2 | Family::H4)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown term family {s}"))
    }
}

/// Terms sharing a group id sum to one positive clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId(pub usize);

/// One interaction operator of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub support: Vec<usize>,
    pub block: DenseMatrix,
    pub family: Family,
    /// Zero-based gate / clock-site index `k - 1`.
    pub site: usize,
    pub group: GroupId,
    pub claimed_projector: bool,
}

impl LocalTerm {
    pub fn new(
        support: Vec<usize>,
        block: DenseMatrix,
        family: Family,
        site: usize,
        group: GroupId,
        claimed_projector: bool,
    ) -> Result<Self, TensorError> {
        let deviation = linalg::hermitian_deviation(&block);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(TensorError::NotHermitian { deviation });
        }
        if support.is_empty() || !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(TensorError::UnorderedSupport(support));
        }
        Ok(Self { support, block, family, site, group, claimed_projector })
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    fn check_against(&self, shape: &SpaceShape) -> Result<(), TensorError> {
        shape.check_support(&self.support)?;
        let expected = shape.support_dim(&self.support);
        if self.block.nrows() != expected {
            return Err(TensorError::BlockMismatch { expected, got: self.block.nrows() });
        }
        Ok(())
    }
}

/// Sparse operator on a [`SpaceShape`] in compressed-row form.
///
/// Rows are sorted by column and free of duplicates; both triangles are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    shape: SpaceShape,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    pub fn zero(shape: SpaceShape) -> Self {
        let n = shape.total_dim();
        Self { shape, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let n = shape.total_dim();
        Self::from_triplets(shape, (0..n).map(|i| (i, i, linalg::ONE)).collect())
    }

    /// Canonical sort, merge of duplicate coordinates, and drop of negligible entries.
    pub fn from_triplets(shape: SpaceShape, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        let n = shape.total_dim();
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 != r || c2 != c {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v.norm() >= DROP_TOLERANCE {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { shape, row_ptr, cols, vals }
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(row, col, value)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    /// `out = self * v`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim()];
        self.apply_into(v, &mut out);
        out
    }

    /// Real part of `⟨v|H|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        linalg::inner(v, &self.apply_slice(v)).re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { vals: self.vals.iter().map(|v| v * factor).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.shape, other.shape);
        let triplets = self.entries().chain(other.entries()).collect();
        Self::from_triplets(self.shape.clone(), triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = linalg::zeros(self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest `|H[r,c] - conj(H[c,r])|` over stored entries.
    pub fn hermitian_deviation(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Complex amplitudes over a [`SpaceShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    shape: SpaceShape,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(shape: SpaceShape, amplitudes: Vec<C64>) -> Result<Self, TensorError> {
        if amplitudes.len() != shape.total_dim() {
            return Err(TensorError::ShapeMismatch {
                expected: shape.total_dim(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { shape, amplitudes })
    }

    pub fn basis(shape: SpaceShape, digits: &[usize]) -> Result<Self, TensorError> {
        let index = shape.basis_index(digits)?;
        let amplitudes = linalg::ket(shape.total_dim(), index);
        Ok(Self { shape, amplitudes })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    /// `self ⊗ other` on the concatenated shape.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            shape: self.shape.concat(&other.shape),
            amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// Offsets contributed by each local configuration of `support`, and by each
/// configuration of the complementary particles.
fn split_offsets(shape: &SpaceShape, support: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut local = vec![0usize];
    for &p in support {
        local = local
            .iter()
            .flat_map(|&base| (0..shape.dims()[p]).map(move |d| base + d * shape.stride(p)))
            .collect();
    }
    let mut rest = vec![0usize];
    for p in (0..shape.num_particles()).filter(|p| !support.contains(p)) {
        rest = rest
            .iter()
            .flat_map(|&base| (0..shape.dims()[p]).map(move |d| base + d * shape.stride(p)))
            .collect();
    }
    (local, rest)
}

fn push_triplets(term: &LocalTerm, shape: &SpaceShape, out: &mut Vec<(usize, usize, C64)>) {
    let (local, rest) = split_offsets(shape, &term.support);
    let block = &term.block;
    for a in 0..block.nrows() {
        for b in 0..block.ncols() {
            let v = block[(a, b)];
            if v.norm() < DROP_TOLERANCE {
                continue;
            }
            let (ra, cb) = (local[a], local[b]);
            out.extend(rest.iter().map(|&r| (ra + r, cb + r, v)));
        }
    }
}

/// The term's block on its support, tensored with identities elsewhere.
pub fn embed(term: &LocalTerm, shape: &SpaceShape) -> Result<SparseOperator, TensorError> {
    term.check_against(shape)?;
    let mut triplets = Vec::new();
    push_triplets(term, shape, &mut triplets);
    Ok(SparseOperator::from_triplets(shape.clone(), triplets))
}

/// Sum of the embeddings of `terms`, merged at coordinate level.
pub fn assemble(terms: &[LocalTerm], shape: &SpaceShape) -> Result<SparseOperator, TensorError> {
    let mut triplets = Vec::new();
    for term in terms {
        term.check_against(shape)?;
        push_triplets(term, shape, &mut triplets);
    }
    Ok(SparseOperator::from_triplets(shape.clone(), triplets))
}

pub fn apply(op: &SparseOperator, v: &StateVector) -> Result<StateVector, TensorError> {
    if op.shape() != v.shape() {
        return Err(TensorError::ShapeMismatch { expected: op.dim(), got: v.shape().total_dim() });
    }
    Ok(StateVector { shape: v.shape.clone(), amplitudes: op.apply_slice(&v.amplitudes) })
}

/// Operator norm of a term: the largest absolute eigenvalue of its block.
pub fn term_norm(term: &LocalTerm) -> f64 {
    let values = crate::spectral::eigenvalues_dense(&term.block)
        .expect("term blocks are Hermitian by construction");
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Embeds a term on a smaller shape formed by `particles` (strictly increasing,
/// a superset of the term's support), returning the dense block there.
pub fn block_on(term: &LocalTerm, parent: &SpaceShape, particles: &[usize]) -> Result<DenseMatrix, TensorError> {
    let sub = parent.subshape(particles)?;
    let support: Option<Vec<usize>> = term
        .support
        .iter()
        .map(|p| particles.iter().position(|q| q == p))
        .collect();
    let support = support.ok_or_else(|| TensorError::InvalidSupport {
        support: term.support.clone(),
        particles: particles.len(),
    })?;
    let local = LocalTerm { support, ..term.clone() };
    Ok(embed(&local, &sub)?.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, outer, pauli_z, unit, ONE};
    use proptest::prelude::*;

    fn shape(d: &[usize]) -> SpaceShape {
        SpaceShape::new(d.to_vec()).unwrap()
    }

    fn term(support: Vec<usize>, block: DenseMatrix) -> LocalTerm {
        LocalTerm::new(support, block, Family::Clock1, 0, GroupId(0), false).unwrap()
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(shape(&[2, 2]).basis_index(&[1, 0]).unwrap(), 2);
        assert_eq!(shape(&[3]).basis_index(&[2]).unwrap(), 2);
        // lexicographic enumeration of [2,3]
        let s = shape(&[2, 3]);
        let mut enumerated = Vec::new();
        for a in 0..2 {
            for b in 0..3 {
                enumerated.push((a, b));
            }
        }
        let pos = enumerated.iter().position(|&p| p == (1, 2)).unwrap();
        assert_eq!(s.basis_index(&[1, 2]).unwrap(), pos);
        assert_eq!(pos, 5);
    }

    #[test]
    fn basis_index_rejects_out_of_range_digit() {
        let err = shape(&[2, 3]).basis_index(&[1, 3]).unwrap_err();
        assert_eq!(err, TensorError::DigitOutOfRange { particle: 1, digit: 3, dim: 3 });
        assert!(err.to_string().contains("particle 1"));
    }

    #[test]
    fn shape_rejects_unsupported_dimension() {
        assert_eq!(SpaceShape::new(vec![2, 5]).unwrap_err(), TensorError::InvalidDimension(5));
    }

    #[test]
    fn embed_identity_and_z() {
        let s = shape(&[2, 2]);
        let id = embed(&term(vec![0], identity(2)), &s).unwrap();
        assert_eq!(id.to_dense(), identity(4));
        let z = embed(&term(vec![0], pauli_z()), &s).unwrap().to_dense();
        let diag: Vec<f64> = (0..4).map(|i| z[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(linalg::max_abs(&(z.clone() - DenseMatrix::from_diagonal(&z.diagonal()))), 0.0);
    }

    #[test]
    fn embed_projector_on_mixed_shape() {
        let s = shape(&[2, 2, 3]);
        let p11 = linalg::basis_projector(4, 3);
        let op = embed(&term(vec![0, 1], p11), &s).unwrap();
        // oracle: basis states whose first two digits are (1,1)
        let expected: Vec<usize> = (0..12).filter(|&i| {
            let d = s.digits(i);
            d[0] == 1 && d[1] == 1
        }).collect();
        assert_eq!(expected, vec![9, 10, 11]);
        let got: Vec<usize> = op.entries().map(|(r, c, v)| {
            assert_eq!(r, c);
            assert_eq!(v, ONE);
            r
        }).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn embed_nnz_is_block_nnz_times_multiplicity() {
        let s = shape(&[2, 3, 4]);
        let mut block = linalg::zeros(6);
        block[(0, 0)] = ONE;
        block[(1, 4)] = C64::new(0.5, 0.5);
        block[(4, 1)] = C64::new(0.5, -0.5);
        let op = embed(&term(vec![0, 1], block), &s).unwrap();
        assert_eq!(op.nnz(), 3 * (24 / 6));
    }

    #[test]
    fn embed_rejects_block_mismatch() {
        let s = shape(&[2, 3]);
        let err = embed(&term(vec![1], identity(2)), &s).unwrap_err();
        assert_eq!(err, TensorError::BlockMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn local_term_rejects_non_hermitian_block() {
        let err = LocalTerm::new(vec![0], unit(2, 0, 1), Family::Out, 0, GroupId(0), false);
        assert!(matches!(err, Err(TensorError::NotHermitian { .. })));
    }

    #[test]
    fn assemble_empty_and_cancelling() {
        let s = shape(&[2, 3]);
        assert_eq!(assemble(&[], &s).unwrap().nnz(), 0);
        let a = term(vec![1], linalg::diag(&[1.0, 2.0, 3.0]));
        let b = term(vec![1], linalg::diag(&[-1.0, -2.0, -3.0]));
        assert_eq!(assemble(&[a, b], &s).unwrap().nnz(), 0);
    }

    #[test]
    fn apply_examples() {
        let s = shape(&[2]);
        let one = StateVector::basis(s.clone(), &[1]).unwrap();
        let id = SparseOperator::identity(s.clone());
        assert_eq!(apply(&id, &one).unwrap(), one);
        let z = embed(&term(vec![0], pauli_z()), &s).unwrap();
        let out = apply(&z, &one).unwrap();
        assert_eq!(out.amplitudes()[1], -ONE);

        let s2 = shape(&[2, 2]);
        let mut cnot = linalg::zeros(4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(i, j)] = ONE;
        }
        let op = embed(&term(vec![0, 1], cnot), &s2).unwrap();
        let ten = StateVector::basis(s2.clone(), &[1, 0]).unwrap();
        assert_eq!(apply(&op, &ten).unwrap(), StateVector::basis(s2, &[1, 1]).unwrap());
    }

    #[test]
    fn apply_rejects_shape_mismatch() {
        let op = SparseOperator::identity(shape(&[2]));
        let v = StateVector::basis(shape(&[3]), &[0]).unwrap();
        assert!(matches!(apply(&op, &v), Err(TensorError::ShapeMismatch { .. })));
    }

    #[test]
    fn term_norm_examples() {
        assert!((term_norm(&term(vec![0], linalg::basis_projector(2, 1))) - 1.0).abs() < 1e-14);
        assert_eq!(term_norm(&term(vec![0], linalg::zeros(2))), 0.0);
        let penalty = linalg::scale(&linalg::basis_projector(4, 3), 2.0);
        assert!((term_norm(&term(vec![0, 1], penalty)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn block_on_reorders_into_larger_support() {
        let s = shape(&[2, 2, 2]);
        let t = term(vec![2], pauli_z());
        let b = block_on(&t, &s, &[0, 2]).unwrap();
        assert_eq!(linalg::max_abs_diff(&b, &kron(&identity(2), &pauli_z())), 0.0);
    }

    fn random_hermitian(dim: usize, seed: &[f64]) -> DenseMatrix {
        let mut m = linalg::zeros(dim);
        let mut k = 0;
        let mut next = || {
            k += 1;
            seed[k % seed.len()] * (k as f64).sin()
        };
        for i in 0..dim {
            m[(i, i)] = C64::new(next(), 0.0);
            for j in i + 1..dim {
                let z = C64::new(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn shapes() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(2usize..=4, 2..=4).prop_filter("small", |d| d.iter().product::<usize>() <= 256)
    }

    proptest! {
        #[test]
        fn disjoint_terms_commute(dims in shapes(), seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            let s = shape(&dims);
            let a = term(vec![0], random_hermitian(dims[0], &seed));
            let last = dims.len() - 1;
            let b = term(vec![last], random_hermitian(dims[last], &seed[1..]));
            let ea = embed(&a, &s).unwrap().to_dense();
            let eb = embed(&b, &s).unwrap().to_dense();
            prop_assert!(linalg::max_abs_diff(&(&ea * &eb), &(&eb * &ea)) <= 1e-13);
        }

        #[test]
        fn apply_matches_dense_oracle(dims in shapes(), seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            let s = shape(&dims);
            let support: Vec<usize> = (0..dims.len().min(2)).collect();
            let t = term(support.clone(), random_hermitian(s.support_dim(&support), &seed));
            let op = embed(&t, &s).unwrap();
            // dense oracle built by explicit Kronecker products
            let mut dense = t.block.clone();
            for &d in &dims[support.len()..] {
                dense = kron(&dense, &identity(d));
            }
            let v: Vec<C64> = (0..s.total_dim()).map(|i| C64::new((i as f64).cos(), seed[i % 8])).collect();
            let got = op.apply_slice(&v);
            let want = linalg::mat_vec(&dense, &v);
            let dev = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-12);
        }

        #[test]
        fn embed_preserves_spectrum(dims in shapes(), seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            let s = shape(&dims);
            let p = dims.len() - 1;
            let t = term(vec![p], random_hermitian(dims[p], &seed));
            let mut local = crate::spectral::eigenvalues_dense(&t.block).unwrap();
            let reps = s.total_dim() / dims[p];
            let mut expected: Vec<f64> = local.drain(..).flat_map(|v| std::iter::repeat(v).take(reps)).collect();
            expected.sort_by(f64::total_cmp);
            let got = crate::spectral::eigenvalues_dense(&embed(&t, &s).unwrap().to_dense()).unwrap();
            for (g, e) in got.iter().zip(&expected) {
                prop_assert!((g - e).abs() <= 1e-10);
            }
        }

        #[test]
        fn digits_round_trip(dims in shapes(), raw in 0usize..256) {
            let s = shape(&dims);
            let index = raw % s.total_dim();
            prop_assert_eq!(s.basis_index(&s.digits(index)).unwrap(), index);
        }
    }

    #[test]
    fn outer_projector_is_hermitian() {
        let v = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let p = outer(&v, &v);
        assert!(linalg::hermitian_deviation(&p) < 1e-16);
    }
}
