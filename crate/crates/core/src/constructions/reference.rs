//! The effective Hamiltonian on `work ⊗ (T-level clock)` that every
//! construction should reduce to on its legal clock space.
//!
//! Basis index of `|w⟩ ⊗ |m⟩` is `w * T + m`.

use crate::circuit::Circuit;
use crate::linalg::{self, DenseMatrix};
use crate::tensorspace::Family;

use super::{ConstructionError, Schedule};

#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePiece {
    pub family: Family,
    /// Transition index for propagation pieces.
    pub step: Option<usize>,
    pub matrix: DenseMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceHamiltonian {
    pub work_dim: usize,
    pub t: usize,
    pub pieces: Vec<ReferencePiece>,
}

impl ReferenceHamiltonian {
    pub fn dim(&self) -> usize {
        self.work_dim * self.t
    }

    pub fn total(&self) -> DenseMatrix {
        self.sum_where(|_| true)
    }

    pub fn family(&self, family: Family) -> DenseMatrix {
        self.sum_where(|p| p.family == family)
    }

    /// Propagation pieces only.
    pub fn propagation(&self) -> DenseMatrix {
        self.sum_where(|p| p.step.is_some())
    }

    pub fn families(&self) -> Vec<Family> {
        let mut f: Vec<Family> = self.pieces.iter().map(|p| p.family).collect();
        f.sort();
        f.dedup();
        f
    }

    fn sum_where(&self, keep: impl Fn(&ReferencePiece) -> bool) -> DenseMatrix {
        self.pieces
            .iter()
            .filter(|p| keep(p))
            .fold(linalg::zeros(self.dim()), |acc, p| acc + &p.matrix)
    }
}

/// Clock operator `|a⟩⟨b|` on `T` levels.
fn clock_unit(t: usize, a: usize, b: usize) -> DenseMatrix {
    linalg::unit(t, a, b)
}

/// Diagonal work operator `|bit⟩⟨bit|` on qubit `q` of `work` qubits.
fn work_bit(work: usize, q: usize, bit: usize) -> DenseMatrix {
    let dim = 1usize << work;
    let entries: Vec<f64> = (0..dim)
        .map(|i| if (i >> (work - 1 - q)) & 1 == bit { 1.0 } else { 0.0 })
        .collect();
    linalg::diag(&entries)
}

/// Sum of `½(I⊗|m⟩⟨m| + I⊗|m+1⟩⟨m+1| - U⊗|m+1⟩⟨m| - U†⊗|m⟩⟨m+1|)` over the
/// schedule, plus the ancilla check at `init_step` and the output check at
/// `out_step` when given.
pub fn build_reference(
    circuit: &Circuit,
    schedule: &Schedule,
    init_step: Option<usize>,
    out_step: Option<usize>,
) -> Result<ReferenceHamiltonian, ConstructionError> {
    let t = schedule.len() + 1;
    let work = circuit.n_work();
    let work_dim = 1usize << work;
    for (name, step) in [("init", init_step), ("out", out_step)] {
        if let Some(s) = step.filter(|&s| s >= t) {
            return Err(ConstructionError::Positions(format!("{name} step {s} outside {t} clock states")));
        }
    }
    if let Some(bad) = schedule.steps.iter().filter_map(|s| s.gate).find(|&g| g >= circuit.len()) {
        return Err(ConstructionError::Positions(format!("schedule names gate {bad} of {}", circuit.len())));
    }

    let id = linalg::identity(work_dim);
    let mut pieces = Vec::new();
    for (m, (step, u)) in schedule.steps.iter().zip(schedule.unitaries(circuit)).enumerate() {
        let sum = linalg::kron(&id, &clock_unit(t, m, m)) + linalg::kron(&id, &clock_unit(t, m + 1, m + 1))
            - linalg::kron(&u, &clock_unit(t, m + 1, m))
            - linalg::kron(&u.adjoint(), &clock_unit(t, m, m + 1));
        pieces.push(ReferencePiece { family: step.driver, step: Some(m), matrix: linalg::scale(&sum, 0.5) });
    }
    if let Some(s) = init_step {
        let sum = circuit
            .ancillas()
            .fold(linalg::zeros(work_dim), |acc, n| acc + work_bit(work, n, 1));
        pieces.push(ReferencePiece { family: Family::Init, step: None, matrix: linalg::kron(&sum, &clock_unit(t, s, s)) });
    }
    if let Some(s) = out_step {
        let out = work_bit(work, circuit.output_qubit(), 0);
        pieces.push(ReferencePiece { family: Family::Out, step: None, matrix: linalg::kron(&out, &clock_unit(t, s, s)) });
    }
    Ok(ReferenceHamiltonian { work_dim, t, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::linalg::c;
    use crate::spectral::eigenvalues_dense;

    fn identity_circuit(gates: usize) -> Circuit {
        Circuit::new(1, 0, vec![Gate::named("I", vec![0]).unwrap(); gates], 0).unwrap()
    }

    #[test]
    fn two_step_identity_propagation() {
        let circuit = identity_circuit(1);
        let schedule = Schedule::from_positions(1, 2, &[0]).unwrap();
        let r = build_reference(&circuit, &schedule, None, None).unwrap();
        let mut expected = linalg::zeros(2);
        expected[(0, 0)] = c(0.5);
        expected[(1, 1)] = c(0.5);
        expected[(0, 1)] = c(-0.5);
        expected[(1, 0)] = c(-0.5);
        let expected = linalg::kron(&linalg::identity(2), &expected);
        assert!(linalg::max_abs_diff(&r.total(), &expected) == 0.0);
    }

    #[test]
    fn pure_propagation_has_path_laplacian_spectrum() {
        for t in 2..=9 {
            let circuit = identity_circuit(1);
            let schedule = Schedule::from_positions(1, t, &[0]).unwrap();
            let r = build_reference(&circuit, &schedule, None, None).unwrap();
            let values = eigenvalues_dense(&r.total()).unwrap();
            let mut expected: Vec<f64> = (0..t)
                .flat_map(|j| {
                    let v = 1.0 - (std::f64::consts::PI * j as f64 / t as f64).cos();
                    [v, v]
                })
                .collect();
            expected.sort_by(f64::total_cmp);
            for (a, b) in values.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12, "T={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_steps() {
        let circuit = identity_circuit(1);
        let schedule = Schedule::from_positions(1, 3, &[1]).unwrap();
        assert!(build_reference(&circuit, &schedule, Some(3), None).is_err());
        assert!(build_reference(&circuit, &schedule, Some(0), Some(2)).is_ok());
    }
}
