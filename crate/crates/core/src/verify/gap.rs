use serde::{Deserialize, Serialize};

use crate::constructions::HamiltonianBundle;
use crate::spectral::{cluster_values, eigenvalues_dense, lowest_eigs, restrict, CLUSTER_GAP, DENSE_MAX_DIM};

use super::{AuditOptions, CheckRecord, Expectation, VerifyError, ZERO_ENERGY_TOLERANCE};

/// Operators up to this dimension are diagonalized densely in `Auto` mode.
pub const AUTO_DENSE_MAX_DIM: usize = 2048;
/// Residual tolerance for the iterative solver.
pub const LANCZOS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lambda_min: f64,
    /// Smallest eigenvalue of the restriction to work ⊗ legal clock states.
    pub legal_lambda_min: f64,
    pub legal_kernel_dim: usize,
    /// Smallest eigenvalue cluster of the full operator above the zero tolerance.
    pub first_positive: Option<f64>,
    /// Solver actually used for the full operator (`dense` or `iterative`).
    pub method: SolverChoice,
    pub converged: bool,
    /// The eigenvalues computed for the full operator, ascending (all of them
    /// in dense mode).
    pub values: Vec<f64>,
}

/// Lowest eigenvalues of the full operator and of its legal restriction.
pub fn gap_report(bundle: &HamiltonianBundle, solver: SolverChoice, seed: u64) -> Result<GapReport, VerifyError> {
    let op = bundle.assemble();
    let legal = eigenvalues_dense(&restrict(&op, &bundle.legal_basis())?)?;
    let legal_kernel_dim = legal.iter().filter(|v| v.abs() <= ZERO_ENERGY_TOLERANCE).count();
    let method = match solver {
        SolverChoice::Auto if op.dim() <= AUTO_DENSE_MAX_DIM => SolverChoice::Dense,
        SolverChoice::Auto => SolverChoice::Iterative,
        SolverChoice::Dense if op.dim() > DENSE_MAX_DIM => {
            return Err(crate::spectral::SpectralError::TooLarge { dim: op.dim(), limit: DENSE_MAX_DIM }.into())
        }
        other => other,
    };
    let (values, converged) = if method == SolverChoice::Dense {
        (eigenvalues_dense(&op.to_dense())?, true)
    } else {
        let count = (legal_kernel_dim + 1).min(op.dim());
        let result = lowest_eigs(&op, count, LANCZOS_TOLERANCE, seed)?;
        let converged = result.all_converged();
        (result.values, converged)
    };
    let first_positive = cluster_values(&values, CLUSTER_GAP)
        .into_iter()
        .map(|c| c.value)
        .find(|&v| v > ZERO_ENERGY_TOLERANCE);
    Ok(GapReport {
        lambda_min: values[0],
        legal_lambda_min: legal[0],
        legal_kernel_dim,
        first_positive,
        method,
        converged,
        values,
    })
}

pub(super) fn gap_records(
    bundle: &HamiltonianBundle,
    expect: Expectation,
    options: &AuditOptions,
) -> Result<Vec<CheckRecord>, VerifyError> {
    let report = gap_report(bundle, options.solver, options.seed)?;
    let method = match report.method {
        SolverChoice::Dense => "dense",
        _ => "iterative",
    };
    let detail = format!(
        "{method} solver, legal lambda_min {:.16e}, legal kernel dimension {}, first positive {}",
        report.legal_lambda_min,
        report.legal_kernel_dim,
        report.first_positive.map_or("none".to_string(), |v| format!("{v:.16e}"))
    );
    let record = match expect {
        Expectation::Yes => CheckRecord::at_most("gap.lambda_min", report.lambda_min.abs(), ZERO_ENERGY_TOLERANCE)
            .require(report.legal_kernel_dim >= 1),
        Expectation::No => CheckRecord::above("gap.lambda_min", report.lambda_min, ZERO_ENERGY_TOLERANCE),
    };
    Ok(vec![record.require(report.converged).with_detail(detail)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::constructions::{build, ConstructionKind};

    #[test]
    fn yes_and_no_instances_separate() {
        let yes = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\n").unwrap();
        let no = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate H 0\n").unwrap();
        for kind in ConstructionKind::BUILDABLE {
            let y = gap_report(&build(kind, &yes).unwrap(), SolverChoice::Auto, 1).unwrap();
            assert!(y.lambda_min.abs() < 1e-8, "{kind} {}", y.lambda_min);
            assert!(y.legal_kernel_dim >= 1);
            let n = gap_report(&build(kind, &no).unwrap(), SolverChoice::Auto, 1).unwrap();
            assert!(n.lambda_min > 1e-4, "{kind} {}", n.lambda_min);
        }
    }

    #[test]
    fn iterative_matches_dense() {
        let c = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate H 0\n").unwrap();
        let b = build(ConstructionKind::Qutrit, &c).unwrap();
        let d = gap_report(&b, SolverChoice::Dense, 0).unwrap();
        let i = gap_report(&b, SolverChoice::Iterative, 0).unwrap();
        assert!(i.converged);
        assert!((d.lambda_min - i.lambda_min).abs() < 1e-8);
    }
}
