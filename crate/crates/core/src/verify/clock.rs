use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{legal_clock_basis, legal_count, ConstructionKind, HamiltonianBundle};
use crate::linalg::C64;
use crate::spectral::eig_dense;
use crate::tensorspace::{SparseOperator, StateVector};

use super::terms::subspace_distance;
use super::{CheckRecord, VerifyError, KERNEL_TOLERANCE, PENALTY_SAMPLES, ZERO_ENERGY_TOLERANCE};

/// Largest clock register enumerated configuration by configuration.
const ENUMERATION_LIMIT: usize = 1 << 16;
/// Largest clock register diagonalized densely for the kernel check.
const CLOCK_KERNEL_MAX_DIM: usize = 1024;
/// Largest gate count for which the penalty check is exhaustive.
const EXHAUSTIVE_PENALTY_GATES: usize = 2;

/// Whether a clock configuration satisfies the printed legal-state constraints.
///
/// `digits` follows the clock register order: per gate `u/a1/a2/d` (bravyi),
/// `(c, d, t)` (qutrit) or `(c, d, r, s)` (threelocal).
pub fn constraints_hold(kind: ConstructionKind, gates: usize, digits: &[usize]) -> bool {
    match kind {
        ConstructionKind::Bravyi => {
            // d…d a u…u with exactly one active site
            let active: Vec<usize> = (0..gates).filter(|&k| matches!(digits[k], 1 | 2)).collect();
            match active.as_slice() {
                [a] => (0..*a).all(|k| digits[k] == 3) && (a + 1..gates).all(|k| digits[k] == 0),
                _ => false,
            }
        }
        ConstructionKind::Qutrit => {
            let c = |k: usize| digits[3 * k] == 1;
            let d = |k: usize| digits[3 * k + 1] == 1;
            let active = |k: usize| digits[3 * k + 2] != 0;
            site_constraints(gates, c, d, active, active) && c(0) && (!d(gates - 1) || active(gates - 1))
        }
        ConstructionKind::ThreeLocal => {
            let c = |k: usize| digits[4 * k] == 1;
            let d = |k: usize| digits[4 * k + 1] == 1;
            let pair = |k: usize| (digits[4 * k + 2], digits[4 * k + 3]);
            let active = |k: usize| matches!(pair(k), (0, 1) | (1, 0));
            let alive = |k: usize| pair(k) != (0, 0);
            (0..gates).all(|k| pair(k) != (1, 1))
                && site_constraints(gates, c, d, active, alive)
                && c(0)
                && (!d(gates - 1) || alive(gates - 1))
        }
        ConstructionKind::Reference => false,
    }
}

/// Constraints shared by the qutrit and threelocal lists.
fn site_constraints(
    gates: usize,
    c: impl Fn(usize) -> bool,
    d: impl Fn(usize) -> bool,
    active: impl Fn(usize) -> bool,
    alive: impl Fn(usize) -> bool,
) -> bool {
    (0..gates).all(|k| {
        let next = if k + 1 < gates { Some(c(k + 1)) } else { None };
        (!d(k) || c(k))
            && (next != Some(true) || d(k))
            && (!active(k) || d(k))
            && (!active(k) || next != Some(true))
            && (!(d(k) && next == Some(false)) || alive(k))
    })
}

fn diagonal_energy(op: &SparseOperator, index: usize) -> f64 {
    op.get(index, index).re
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub configurations: usize,
    /// Configurations with zero clock energy.
    pub zero_energy: usize,
    /// Configurations satisfying the constraint list.
    pub satisfying: usize,
    /// Configurations where the two disagree.
    pub mismatches: usize,
    pub expected_legal: usize,
}

/// Exhaustive comparison of zero clock energy against the constraint list.
pub fn constraint_equivalence(bundle: &HamiltonianBundle) -> Result<ConstraintReport, VerifyError> {
    let layout = &bundle.layout;
    let shape = layout.clock_shape();
    let op = bundle.clock_operator();
    let configurations = shape.total_dim();
    if configurations > ENUMERATION_LIMIT {
        return Err(crate::spectral::SpectralError::TooLarge { dim: configurations, limit: ENUMERATION_LIMIT }.into());
    }
    let (mut zero_energy, mut satisfying, mut mismatches) = (0, 0, 0);
    for index in 0..configurations {
        let zero = diagonal_energy(&op, index).abs() <= ZERO_ENERGY_TOLERANCE;
        let legal = constraints_hold(layout.kind, layout.gates, &shape.digits(index));
        zero_energy += usize::from(zero);
        satisfying += usize::from(legal);
        mismatches += usize::from(zero != legal);
    }
    Ok(ConstraintReport {
        configurations,
        zero_energy,
        satisfying,
        mismatches,
        expected_legal: legal_count(layout.kind, layout.gates),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyReport {
    pub exhaustive: bool,
    /// Illegal configurations examined.
    pub examined: usize,
    pub min_energy: f64,
}

/// Smallest clock energy over illegal configurations: all of them for up to
/// two gates, otherwise `PENALTY_SAMPLES` drawn uniformly with `seed`.
pub fn illegal_penalty(bundle: &HamiltonianBundle, seed: u64) -> Result<PenaltyReport, VerifyError> {
    let layout = &bundle.layout;
    let shape = layout.clock_shape();
    let op = bundle.clock_operator();
    let illegal = |index: usize| !constraints_hold(layout.kind, layout.gates, &shape.digits(index));
    let mut min_energy = f64::INFINITY;
    let mut examined = 0;
    let exhaustive = layout.gates <= EXHAUSTIVE_PENALTY_GATES;
    if exhaustive {
        for index in (0..shape.total_dim()).filter(|&i| illegal(i)) {
            min_energy = min_energy.min(diagonal_energy(&op, index));
            examined += 1;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while examined < PENALTY_SAMPLES {
            let index = rng.random_range(0..shape.total_dim());
            if illegal(index) {
                min_energy = min_energy.min(diagonal_energy(&op, index));
                examined += 1;
            }
        }
    }
    Ok(PenaltyReport { exhaustive, examined, min_energy })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockKernel {
    pub dim: usize,
    pub expected: usize,
    /// Distance between the kernel and the span of the legal clock states.
    pub distance: f64,
}

/// Dense kernel of the clock-check terms on the clock register.
pub fn clock_kernel(bundle: &HamiltonianBundle) -> Result<ClockKernel, VerifyError> {
    let layout = &bundle.layout;
    let eig = eig_dense(&bundle.clock_operator().to_dense())?;
    let vectors = eig.vectors.expect("dense mode returns vectors");
    let kernel: Vec<Vec<C64>> = (0..eig.values.len())
        .filter(|&i| eig.values[i].abs() <= ZERO_ENERGY_TOLERANCE)
        .map(|i| vectors.column(i).iter().copied().collect())
        .collect();
    let legal: Vec<Vec<C64>> = legal_clock_basis(layout.kind, layout.gates)?
        .into_iter()
        .map(StateVector::into_amplitudes)
        .collect();
    Ok(ClockKernel {
        dim: kernel.len(),
        expected: layout.t,
        distance: subspace_distance(&kernel, &legal, vectors.nrows()),
    })
}

/// Clock energies of the configurations with no active site: every site
/// idle, and every site done.
pub fn excluded_states_energy(bundle: &HamiltonianBundle) -> Result<Vec<(String, f64)>, VerifyError> {
    let layout = &bundle.layout;
    let shape = layout.clock_shape();
    let op = bundle.clock_operator();
    let (idle, done): (&[usize], &[usize]) = match layout.kind {
        ConstructionKind::Bravyi => (&[0], &[3]),
        ConstructionKind::Qutrit => (&[0, 0, 0], &[1, 1, 0]),
        ConstructionKind::ThreeLocal => (&[0, 0, 0, 0], &[1, 1, 0, 0]),
        ConstructionKind::Reference => return Ok(Vec::new()),
    };
    [("all idle", idle), ("all done", done)]
        .into_iter()
        .map(|(label, site)| {
            let index = shape.basis_index(&site.repeat(layout.gates))?;
            Ok((label.to_string(), diagonal_energy(&op, index)))
        })
        .collect()
}

pub(super) fn clock_records(bundle: &HamiltonianBundle, seed: u64) -> Result<Vec<CheckRecord>, VerifyError> {
    let mut records = Vec::new();
    let clock_dim = bundle.layout.clock_shape().total_dim();
    if clock_dim <= ENUMERATION_LIMIT {
        let report = constraint_equivalence(bundle)?;
        records.push(
            CheckRecord::at_most("spectra.clock_constraints", report.mismatches as f64, 0.0).with_detail(format!(
                "{} configurations, {} zero-energy, {} satisfy the constraints",
                report.configurations, report.zero_energy, report.satisfying
            )),
        );
        let count_error = report.zero_energy.abs_diff(report.expected_legal) as f64;
        records.push(
            CheckRecord::at_most("spectra.legal_count", count_error, 0.0)
                .with_detail(format!("{} legal configurations, expected {}", report.zero_energy, report.expected_legal)),
        );
    }
    let penalty = illegal_penalty(bundle, seed)?;
    records.push(CheckRecord::at_least("spectra.illegal_penalty", penalty.min_energy, 1.0).with_detail(format!(
        "{} illegal configurations ({})",
        penalty.examined,
        if penalty.exhaustive { "exhaustive" } else { "sampled" }
    )));
    if clock_dim <= CLOCK_KERNEL_MAX_DIM {
        let kernel = clock_kernel(bundle)?;
        records.push(
            CheckRecord::at_most("spectra.clock_kernel", kernel.distance, KERNEL_TOLERANCE)
                .require(kernel.dim == kernel.expected)
                .with_detail(format!("kernel dimension {}, expected {}", kernel.dim, kernel.expected)),
        );
    }
    let excluded = excluded_states_energy(bundle)?;
    let min = excluded.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    let detail = excluded.iter().map(|(l, e)| format!("{l}: {e}")).collect::<Vec<_>>().join(", ");
    records.push(CheckRecord::at_least("spectra.excluded_clock_states", min, 1.0).with_detail(detail));
    Ok(records)
}
