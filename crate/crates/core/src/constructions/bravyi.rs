//! One four-level clock particle per gate with levels `u, a1, a2, d`.

use crate::circuit::Circuit;
use crate::linalg::{self, basis_projector as proj, kron};
use crate::tensorspace::Family;

use super::{gate_prop, gate_support, hop, ClockLayout, TermList};

const U: usize = 0;
const A1: usize = 1;
const A2: usize = 2;
const D: usize = 3;

pub(super) fn push_terms(list: &mut TermList, layout: &ClockLayout, circuit: &Circuit) {
    let l = layout.gates;
    let p = |k: usize| layout.site_particles(k)[0];

    list.projector(Family::ClockInit, 0, vec![p(0)], proj(4, U));
    list.projector(Family::ClockInit, l - 1, vec![p(l - 1)], proj(4, D));

    let active = linalg::diag(&[0.0, 1.0, 1.0, 0.0]);
    let born = linalg::diag(&[0.0, 1.0, 1.0, 1.0]);
    for k in 0..l {
        if k + 1 < l {
            let pair = vec![p(k), p(k + 1)];
            list.projector(Family::Clock1, k, pair.clone(), kron(&proj(4, D), &proj(4, U)));
            list.projector(Family::Clock1, k, pair.clone(), kron(&proj(4, U), &born));
            list.projector(Family::Clock1, k, pair.clone(), kron(&active, &born));
            // |a2 u⟩ <-> |d a1⟩ on the pair, index 4a + b
            list.projector(Family::ClockProp1, k, pair, hop(16, 4 * A2 + U, 4 * D + A1));
        }
        let (support, u) = gate_support(circuit, k, &[p(k)]);
        list.projector(Family::GateProp, k, support, gate_prop(&u, &linalg::ket(4, A1), &linalg::ket(4, A2)));
    }

    for n in circuit.ancillas() {
        list.projector(Family::Init, 0, vec![n, p(0)], kron(&proj(2, 1), &proj(4, A1)));
    }
    list.projector(Family::Out, l - 1, vec![circuit.output_qubit(), p(l - 1)], kron(&proj(2, 0), &proj(4, A2)));
}
