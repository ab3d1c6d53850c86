use crate::constructions::HamiltonianBundle;
use crate::tensorspace::{embed, StateVector};

use super::{basis_witness, CheckRecord, Expectation, VerifyError, HISTORY_TOLERANCE, ZERO_ENERGY_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct HistoryEnergies {
    pub state: StateVector,
    /// `⟨ψ|term|ψ⟩` for every interaction term, in bundle order.
    pub per_term: Vec<f64>,
    /// Energies summed per clause group.
    pub per_group: Vec<f64>,
    pub total: f64,
}

/// Energies of the history state built from `witness`.
pub fn check_history(bundle: &HamiltonianBundle, witness: &StateVector) -> Result<HistoryEnergies, VerifyError> {
    let state = bundle.history_state(witness)?;
    let mut per_term = Vec::with_capacity(bundle.terms.len());
    for term in &bundle.terms {
        per_term.push(embed(term, &bundle.shape)?.expectation(state.amplitudes()));
    }
    let per_group: Vec<f64> = bundle
        .groups
        .iter()
        .map(|g| g.members.iter().map(|&m| per_term[m]).sum())
        .collect();
    let total = per_group.iter().sum();
    Ok(HistoryEnergies { state, per_term, per_group, total })
}

/// The computational-basis witness with the lowest history energy (first in
/// lexicographic order on ties) and that energy.
pub fn best_basis_witness(bundle: &HamiltonianBundle) -> Result<(StateVector, f64), VerifyError> {
    let n = bundle.circuit.n_input();
    let op = bundle.assemble();
    let mut best: Option<(StateVector, f64)> = None;
    for index in 0..1usize << n {
        let bits: Vec<usize> = (0..n).map(|q| (index >> (n - 1 - q)) & 1).collect();
        let witness = basis_witness(&bits)?;
        let energy = op.expectation(bundle.history_state(&witness)?.amplitudes());
        if best.as_ref().is_none_or(|(_, e)| energy < *e - 1e-15) {
            best = Some((witness, energy));
        }
    }
    Ok(best.expect("at least one basis witness"))
}

pub(super) fn history_records(
    bundle: &HamiltonianBundle,
    witness: &StateVector,
    expect: Expectation,
) -> Result<Vec<CheckRecord>, VerifyError> {
    let h = check_history(bundle, witness)?;
    let norm_error = (h.state.norm() - 1.0).abs();
    let worst_group = h.per_group.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let worst_term = h.per_term.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let detail = format!(
        "{} terms, {} clause groups, largest single-term |energy| {worst_term:.3e}",
        h.per_term.len(),
        h.per_group.len()
    );
    let mut records = vec![CheckRecord::at_most("history.norm_error", norm_error, 1e-12)];
    match expect {
        Expectation::Yes => {
            records.push(CheckRecord::at_most("history.max_group_energy", worst_group, HISTORY_TOLERANCE).with_detail(detail));
            records.push(CheckRecord::at_most("history.total_energy", h.total.abs(), HISTORY_TOLERANCE));
        }
        Expectation::No => {
            records.push(CheckRecord::above("history.total_energy", h.total, ZERO_ENERGY_TOLERANCE).with_detail(detail));
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::constructions::{build, history_state, ConstructionKind};

    #[test]
    fn wrong_kind_history_state_has_energy() {
        // threelocal with one gate and bravyi with two gates both have 64 states
        let one = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\n").unwrap();
        let two = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\ngate Z 1\n").unwrap();
        let witness = basis_witness(&[1]).unwrap();
        let bravyi = build(ConstructionKind::Bravyi, &two).unwrap();
        let foreign = history_state(ConstructionKind::ThreeLocal, &one, &witness).unwrap().into_amplitudes();
        let state = StateVector::new(bravyi.shape.clone(), foreign).unwrap();
        let energy = bravyi.assemble().expectation(state.amplitudes());
        assert!(energy > 1e-3, "{energy}");
        let own = check_history(&bravyi, &witness).unwrap();
        assert!(own.total.abs() < 1e-12);
    }

    #[test]
    fn best_witness_for_cnot_copy_is_one() {
        let c = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\n").unwrap();
        let b = build(ConstructionKind::Qutrit, &c).unwrap();
        let (w, e) = best_basis_witness(&b).unwrap();
        assert_eq!(w, basis_witness(&[1]).unwrap());
        assert!(e.abs() < 1e-12);
    }
}
