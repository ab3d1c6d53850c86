//! Fixtures shared by the benchmarks.

use clockham_core::{build, parse_circuit, ConstructionKind, HamiltonianBundle};

/// A yes-instance circuit with `gates` gates on one input and one ancilla.
pub fn yes_circuit_text(gates: usize) -> String {
    let cycle = ["gate CNOT 0 1", "gate Z 1", "gate X 0"];
    let mut text = String::from("inputs 1\nancillas 1\noutput 1\n");
    for g in 0..gates {
        text.push_str(cycle[g % cycle.len()]);
        text.push('\n');
    }
    text
}

pub fn yes_bundle(kind: ConstructionKind, gates: usize) -> HamiltonianBundle {
    let circuit = parse_circuit(&yes_circuit_text(gates)).expect("fixture circuit parses");
    build(kind, &circuit).expect("fixture circuit builds")
}
