//! Clock of two qubits `c_k, d_k` and one qutrit `t_k` per gate.

use crate::circuit::Circuit;
use crate::linalg::{self, basis_projector as proj, kron, kron_all};
use crate::tensorspace::Family;

use super::{gate_prop, gate_support, hop, ClockLayout, TermList};

// qutrit levels
const DEAD: usize = 0;
const A1: usize = 1;
const A2: usize = 2;

pub(super) fn push_terms(list: &mut TermList, layout: &ClockLayout, circuit: &Circuit) {
    let l = layout.gates;
    let site = |k: usize| -> (usize, usize, usize) {
        let p = layout.site_particles(k);
        (p[0], p[1], p[2])
    };
    let active = linalg::diag(&[0.0, 1.0, 1.0]);

    let (c1, _, _) = site(0);
    let (_, d_last, t_last) = site(l - 1);
    list.projector(Family::ClockInit, 0, vec![c1], proj(2, 0));
    list.projector(Family::ClockInit, l - 1, vec![d_last, t_last], kron(&proj(2, 1), &proj(3, DEAD)));

    for k in 0..l {
        let (c, d, t) = site(k);
        list.projector(Family::Clock1, k, vec![c, d], proj(4, 0b01));
        list.projector(Family::Clock1, k, vec![d, t], kron(&proj(2, 0), &active));

        // (c, d, t) index = 6c + 3d + t: |10 d⟩ <-> |11 a1⟩
        list.projector(Family::ClockProp1, k, vec![c, d, t], hop(12, 6 + DEAD, 9 + A1));

        let (support, u) = gate_support(circuit, k, &[t]);
        let block = gate_prop(&u, &linalg::ket(3, A1), &linalg::ket(3, A2));
        list.projector(Family::GateProp, k, support, block);

        if k + 1 < l {
            let (c_next, d_next, _) = site(k + 1);
            list.projector(Family::Clock2, k, vec![d, c_next], proj(4, 0b01));
            list.projector(Family::Clock2, k, vec![t, c_next], kron(&active, &proj(2, 1)));
            list.projector(Family::Clock2, k, vec![d, t, c_next], kron_all(&[proj(2, 1), proj(3, DEAD), proj(2, 0)]));
            // (t, c', d') index = 4t + 2c' + d': |a2 00⟩ <-> |d 10⟩
            list.projector(Family::ClockProp2, k, vec![t, c_next, d_next], hop(12, 4 * A2, 4 * DEAD + 2));
        }
    }

    let (_, _, t_first) = site(0);
    for n in circuit.ancillas() {
        list.projector(Family::Init, 0, vec![n, t_first], kron(&proj(2, 1), &proj(3, A1)));
    }
    list.projector(Family::Out, l - 1, vec![circuit.output_qubit(), t_last], kron(&proj(2, 0), &proj(3, A2)));
}
