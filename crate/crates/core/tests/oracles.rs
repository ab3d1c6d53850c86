//! Independent oracles: hand-built effective Hamiltonians diagonalized with
//! nalgebra's own symmetric eigensolver.

use clockham_core::verify::{gap_report, SolverChoice};
use clockham_core::{build, parse_circuit, ConstructionKind};
use nalgebra::DMatrix;

/// `Σ_m w_m/2 (|m⟩⟨m| + |m+1⟩⟨m+1| - |m+1⟩⟨m|⊗U_m - h.c.)` plus init and out
/// penalties, for one input qubit and one ancilla that is also the output.
fn effective(steps: &[(f64, DMatrix<f64>)], init: usize, out: usize) -> DMatrix<f64> {
    let t = steps.len() + 1;
    let n = 4 * t;
    let mut h = DMatrix::<f64>::zeros(n, n);
    let at = |m: usize, w: usize| 4 * m + w;
    for (m, (weight, u)) in steps.iter().enumerate() {
        for a in 0..4 {
            h[(at(m, a), at(m, a))] += weight / 2.0;
            h[(at(m + 1, a), at(m + 1, a))] += weight / 2.0;
            for b in 0..4 {
                h[(at(m + 1, a), at(m, b))] -= weight / 2.0 * u[(a, b)];
                h[(at(m, b), at(m + 1, a))] -= weight / 2.0 * u[(a, b)];
            }
        }
    }
    // work index = 2·input + ancilla
    for input in 0..2 {
        h[(at(init, 2 * input + 1), at(init, 2 * input + 1))] += 1.0;
        h[(at(out, 2 * input), at(out, 2 * input))] += 1.0;
    }
    h
}

fn lowest(h: DMatrix<f64>) -> f64 {
    h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn hadamard_on_input() -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
    h.kronecker(&DMatrix::identity(2, 2))
}

fn id() -> DMatrix<f64> {
    DMatrix::identity(4, 4)
}

fn construction_lambda_min(kind: ConstructionKind, gates: usize) -> f64 {
    let c = parse_circuit(&format!("inputs 1\nancillas 1\noutput 1\n{}", "gate H 0\n".repeat(gates))).unwrap();
    gap_report(&build(kind, &c).unwrap(), SolverChoice::Dense, 0).unwrap().lambda_min
}

#[test]
fn bravyi_no_instance_matches_hand_built_reference() {
    // one gate transition per gate, gate transitions joined by clock moves
    let one = effective(&[(1.0, hadamard_on_input())], 0, 1);
    assert!((construction_lambda_min(ConstructionKind::Bravyi, 1) - lowest(one)).abs() < 1e-10);
    let two = effective(&[(1.0, hadamard_on_input()), (1.0, id()), (1.0, hadamard_on_input())], 0, 3);
    assert!((construction_lambda_min(ConstructionKind::Bravyi, 2) - lowest(two)).abs() < 1e-10);
}

#[test]
fn qutrit_no_instance_matches_hand_built_reference() {
    let one = effective(&[(1.0, id()), (1.0, hadamard_on_input())], 1, 2);
    assert!((construction_lambda_min(ConstructionKind::Qutrit, 1) - lowest(one)).abs() < 1e-10);
    let h = hadamard_on_input;
    let two = effective(&[(1.0, id()), (1.0, h()), (1.0, id()), (1.0, id()), (1.0, h())], 1, 5);
    assert!((construction_lambda_min(ConstructionKind::Qutrit, 2) - lowest(two)).abs() < 1e-10);
}

#[test]
fn threelocal_no_instance_matches_weighted_reference() {
    // clock moves enter with weight two, gate moves with weight one
    let one = effective(&[(2.0, id()), (1.0, hadamard_on_input())], 1, 2);
    assert!((construction_lambda_min(ConstructionKind::ThreeLocal, 1) - lowest(one)).abs() < 1e-10);
    let h = hadamard_on_input;
    let two = effective(&[(2.0, id()), (1.0, h()), (2.0, id()), (2.0, id()), (1.0, h())], 1, 5);
    assert!((construction_lambda_min(ConstructionKind::ThreeLocal, 2) - lowest(two)).abs() < 1e-10);
}
