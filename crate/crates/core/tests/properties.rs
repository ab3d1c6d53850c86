//! Randomized structural properties over small circuits.

use clockham_core::circuit::GATE_NAMES;
use clockham_core::linalg::{self, C64};
use clockham_core::verify::{basis_witness, check_invariance, check_restriction, propagation_spectrum, Check};
use clockham_core::{
    build, lowest_eigs, restrict, run_audit, validate_for, AuditOptions, Circuit, ConstructionKind, Family, Gate,
    SpaceShape, SparseOperator,
};
use proptest::prelude::*;

fn arb_gate() -> impl Strategy<Value = Gate> {
    (0..GATE_NAMES.len(), any::<bool>()).prop_map(|(i, flip)| {
        let name = GATE_NAMES[i];
        let two = matches!(name, "CNOT" | "CZ" | "SWAP");
        let targets = match (two, flip) {
            (true, false) => vec![0, 1],
            (true, true) => vec![1, 0],
            (false, f) => vec![usize::from(f)],
        };
        Gate::named(name, targets).unwrap()
    })
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(arb_gate(), 1..=2).prop_map(|gates| Circuit::new(1, 1, gates, 1).unwrap())
}

fn arb_single_qubit_on_input() -> impl Strategy<Value = Gate> {
    prop::sample::select(vec!["I", "X", "Y", "Z", "H", "S", "T"]).prop_map(|n| Gate::named(n, vec![0]).unwrap())
}

fn random_sparse_hermitian(dims: Vec<usize>, entries: &[(usize, usize, f64, f64)]) -> SparseOperator {
    let shape = SpaceShape::new(dims).unwrap();
    let n = shape.total_dim();
    let mut triplets = Vec::new();
    for &(i, j, re, im) in entries {
        let (i, j) = (i % n, j % n);
        if i == j {
            triplets.push((i, i, C64::new(re, 0.0)));
        } else {
            triplets.push((i, j, C64::new(re, im)));
            triplets.push((j, i, C64::new(re, -im)));
        }
    }
    SparseOperator::from_triplets(shape, triplets)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_unitary_circuit_is_admissible_for_bravyi_and_qutrit(c in arb_circuit()) {
        prop_assert!(validate_for(&c, ConstructionKind::Bravyi).is_empty());
        prop_assert!(validate_for(&c, ConstructionKind::Qutrit).is_empty());
    }

    #[test]
    fn legal_subspace_is_invariant(c in arb_circuit()) {
        for kind in ConstructionKind::BUILDABLE {
            if let Ok(b) = build(kind, &c) {
                let r = check_invariance(&b).unwrap();
                prop_assert!(r <= 1e-12, "{} {}", kind, r);
            }
        }
    }

    #[test]
    fn history_state_has_no_propagation_or_clock_energy(c in arb_circuit(), bit in 0usize..2) {
        let witness = basis_witness(&[bit]).unwrap();
        for kind in ConstructionKind::BUILDABLE {
            if let Ok(b) = build(kind, &c) {
                let op = b.assemble_where(|t| !matches!(t.family, Family::Init | Family::Out));
                let psi = b.history_state(&witness).unwrap();
                prop_assert!((psi.norm() - 1.0).abs() <= 1e-12);
                let e = op.expectation(psi.amplitudes());
                prop_assert!(e.abs() <= 1e-10, "{} {}", kind, e);
            }
        }
    }

    #[test]
    fn restriction_matches_reference_family_by_family(c in arb_circuit()) {
        for kind in ConstructionKind::BUILDABLE {
            if let Ok(b) = build(kind, &c) {
                let report = check_restriction(&b, &b.reference()).unwrap();
                prop_assert!(report.fitted_deviation <= 1e-12);
                for fit in &report.fits {
                    prop_assert!(fit.deviation <= 1e-12, "{} {} {}", kind, fit.family, fit.deviation);
                }
                if kind != ConstructionKind::ThreeLocal {
                    prop_assert!(report.unit_deviation <= 1e-12);
                }
                prop_assert!(propagation_spectrum(&b, &report).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn yes_instance_history_state_is_in_the_kernel(tail in prop::collection::vec(arb_single_qubit_on_input(), 0..2)) {
        let mut gates = vec![Gate::named("CNOT", vec![0, 1]).unwrap()];
        gates.extend(tail);
        let c = Circuit::new(1, 1, gates, 1).unwrap();
        let witness = basis_witness(&[1]).unwrap();
        for kind in ConstructionKind::BUILDABLE {
            let b = build(kind, &c).unwrap();
            let op = b.assemble();
            let legal = clockham_core::spectral::eigenvalues_dense(&restrict(&op, &b.legal_basis()).unwrap()).unwrap();
            prop_assert!(legal[0].abs() <= 1e-8);
            let psi = b.history_state(&witness).unwrap();
            let residual = linalg::vec_norm(&op.apply_slice(psi.amplitudes()));
            prop_assert!(residual <= 1e-10, "{} {}", kind, residual);
        }
    }

    #[test]
    fn restriction_is_linear(c in arb_circuit()) {
        let b = build(ConstructionKind::Qutrit, &c).unwrap();
        let basis = b.legal_basis();
        let a = b.assemble_where(|t| t.family.is_clock_check());
        let rest = b.assemble_where(|t| !t.family.is_clock_check());
        let sum = restrict(&a.add(&rest), &basis).unwrap();
        let parts = restrict(&a, &basis).unwrap() + restrict(&rest, &basis).unwrap();
        prop_assert!(linalg::max_abs_diff(&sum, &parts) <= 1e-13);
    }

    #[test]
    fn lowest_eigs_is_deterministic(
        entries in prop::collection::vec((0usize..64, 0usize..64, -1.0f64..1.0, -1.0f64..1.0), 20..80),
        seed in any::<u64>(),
    ) {
        let op = random_sparse_hermitian(vec![2, 2, 2, 2, 4], &entries);
        let a = lowest_eigs(&op, 3, 1e-10, seed).unwrap();
        let b = lowest_eigs(&op, 3, 1e-10, seed).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
        prop_assert_eq!(bits(&a.residuals), bits(&b.residuals));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn audits_are_repeatable(c in arb_circuit()) {
        let options = AuditOptions {
            checks: vec![Check::History, Check::Invariance, Check::Restriction, Check::Gap],
            ..AuditOptions::default()
        };
        for kind in ConstructionKind::BUILDABLE {
            if let Ok(b) = build(kind, &c) {
                prop_assert_eq!(run_audit(&b, &options), run_audit(&b, &options));
            }
        }
    }
}
