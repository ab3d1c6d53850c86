//! Qubit-only clock with four qubits `c_k, d_k, r_k, s_k` per gate. The pair
//! `(r_k, s_k)` encodes the qutrit levels: `|00⟩` dead, the singlet
//! `(|01⟩-|10⟩)/√2` for `a1` and the triplet `(|01⟩+|10⟩)/√2` for `a2`.
//!
//! The gadget functions below describe the four-qubit clause groups on their
//! own 16-dimensional support, local particle order as named.

use crate::circuit::Circuit;
use crate::linalg::{self, basis_projector as proj, kron, kron_all, pauli_z, DenseMatrix, C64};
use crate::tensorspace::{embed, Family, GroupId, LocalTerm, SpaceShape};

use super::{gate_prop, gate_support, ClockLayout, Part, TermList};

fn h() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// `(|01⟩-|10⟩)/√2`.
pub fn singlet() -> Vec<C64> {
    linalg::combine(&linalg::ket_bits("01"), h(), &linalg::ket_bits("10"), -h())
}

/// `(|01⟩+|10⟩)/√2`.
pub fn triplet() -> Vec<C64> {
    linalg::combine(&linalg::ket_bits("01"), h(), &linalg::ket_bits("10"), h())
}

fn hermitian_pair(m: DenseMatrix, scale: f64) -> DenseMatrix {
    linalg::scale(&(&m + m.adjoint()), scale)
}

/// Summands of the first propagation step on local qubits `(r, s, c', d')`.
pub fn prop41_parts() -> Vec<Part> {
    let down = linalg::unit(2, 0, 1);
    let raise_clock = linalg::outer(&linalg::ket_bits("10"), &linalg::ket_bits("00"));
    let hop = hermitian_pair(kron(&down, &raise_clock), -h());
    vec![
        (vec![2, 3], proj(4, 0b10), true),
        (vec![0, 1], linalg::projector(&triplet()), true),
        (vec![0, 2, 3], hop.clone(), false),
        (vec![1, 2, 3], hop, false),
        (vec![0, 1], linalg::scale(&proj(4, 0b11), 2.0), false),
    ]
}

/// Summands of the second propagation step on local qubits `(c, d, r, s)`.
pub fn prop42_parts() -> Vec<Part> {
    let advance = linalg::outer(&linalg::ket_bits("11"), &linalg::ket_bits("10"));
    let up = linalg::unit(2, 1, 0);
    vec![
        (vec![0, 1], proj(4, 0b10), true),
        (vec![2, 3], linalg::projector(&singlet()), true),
        (vec![0, 1, 2], hermitian_pair(kron(&advance, &linalg::scale(&up, -1.0)), -h()), false),
        (vec![0, 1, 3], hermitian_pair(kron(&advance, &up), -h()), false),
        (vec![2, 3], linalg::scale(&proj(4, 0b11), 2.0), false),
    ]
}

/// Summands of `h4` on local qubits `(d, r, s, c')`.
pub fn h4_parts() -> Vec<Part> {
    let half_z = linalg::scale(&pauli_z(), 0.5);
    let side = kron_all(&[proj(2, 1), half_z, proj(2, 0)]);
    vec![
        (vec![0, 1, 3], side.clone(), false),
        (vec![0, 2, 3], side, false),
        (vec![1, 2], proj(4, 0b11), true),
    ]
}

/// Sum of `parts` as a dense operator on four qubits.
pub fn gadget_block(parts: &[Part]) -> DenseMatrix {
    let shape = SpaceShape::new(vec![2; 4]).expect("qubits");
    parts.iter().fold(linalg::zeros(16), |acc, (support, block, claimed)| {
        let term = LocalTerm::new(support.clone(), block.clone(), Family::ClockProp1, 0, GroupId(0), *claimed)
            .expect("gadget summands are Hermitian");
        acc + embed(&term, &shape).expect("gadget support").to_dense()
    })
}

fn ket4(a: &[C64], b: &[C64]) -> Vec<C64> {
    linalg::kron_vec(a, b)
}

/// `α1 … α4` on `(r, s, c', d')`.
pub fn alpha_states() -> Vec<Vec<C64>> {
    let zero = linalg::ket_bits("00");
    let half_triplet: Vec<C64> = triplet().iter().map(|z| z * h()).collect();
    vec![
        ket4(&zero, &zero),
        ket4(&singlet(), &zero),
        linalg::combine(&ket4(&half_triplet, &zero), 1.0, &ket4(&zero, &linalg::ket_bits("10")), h()),
        ket4(&zero, &linalg::ket_bits("11")),
    ]
}

/// Legal clock state with incorrect pointer propagation for the first step.
pub fn alpha_perp() -> Vec<C64> {
    let zero = linalg::ket_bits("00");
    let half_triplet: Vec<C64> = triplet().iter().map(|z| z * h()).collect();
    linalg::combine(&ket4(&half_triplet, &zero), 1.0, &ket4(&zero, &linalg::ket_bits("10")), -h())
}

/// Illegal clock states in the kernel of the first step.
pub fn alpha_illegal_kernel() -> Vec<Vec<C64>> {
    vec![
        ket4(&linalg::ket_bits("00"), &linalg::ket_bits("01")),
        ket4(&singlet(), &linalg::ket_bits("01")),
        ket4(&singlet(), &linalg::ket_bits("11")),
    ]
}

/// `β1 … β4` on `(c, d, r, s)`.
pub fn beta_states() -> Vec<Vec<C64>> {
    let zero = linalg::ket_bits("00");
    let half_singlet: Vec<C64> = singlet().iter().map(|z| z * h()).collect();
    vec![
        ket4(&zero, &zero),
        linalg::combine(&ket4(&linalg::ket_bits("10"), &zero), h(), &ket4(&linalg::ket_bits("11"), &half_singlet), 1.0),
        ket4(&linalg::ket_bits("11"), &triplet()),
        ket4(&linalg::ket_bits("11"), &zero),
    ]
}

pub fn beta_perp() -> Vec<C64> {
    let zero = linalg::ket_bits("00");
    let half_singlet: Vec<C64> = singlet().iter().map(|z| z * h()).collect();
    linalg::combine(&ket4(&linalg::ket_bits("10"), &zero), h(), &ket4(&linalg::ket_bits("11"), &half_singlet), -1.0)
}

pub fn beta_illegal_kernel() -> Vec<Vec<C64>> {
    vec![
        ket4(&linalg::ket_bits("01"), &linalg::ket_bits("00")),
        ket4(&linalg::ket_bits("01"), &triplet()),
        ket4(&linalg::ket_bits("00"), &triplet()),
    ]
}

fn place(parts: Vec<Part>, particles: &[usize]) -> Vec<Part> {
    parts
        .into_iter()
        .map(|(support, block, claimed)| (support.iter().map(|&i| particles[i]).collect(), block, claimed))
        .collect()
}

pub(super) fn push_terms(list: &mut TermList, layout: &ClockLayout, circuit: &Circuit) {
    let l = layout.gates;
    let site = |k: usize| -> [usize; 4] {
        let p = layout.site_particles(k);
        [p[0], p[1], p[2], p[3]]
    };
    let one = proj(2, 1);
    let zero = proj(2, 0);

    let [c1, ..] = site(0);
    let [_, d_last, r_last, s_last] = site(l - 1);
    list.projector(Family::ClockInit, 0, vec![c1], zero.clone());
    list.projector(Family::ClockInit, l - 1, vec![d_last, r_last, s_last], kron(&one, &proj(4, 0b00)));

    for k in 0..l {
        let [c, d, r, s] = site(k);
        list.projector(Family::Clock1, k, vec![c, d], proj(4, 0b01));
        list.projector(Family::Clock1, k, vec![d, r], kron(&zero, &one));
        list.projector(Family::Clock1, k, vec![d, s], kron(&zero, &one));
        list.projector(Family::Clock1, k, vec![r, s], proj(4, 0b11));

        if k + 1 < l {
            let [c_next, d_next, ..] = site(k + 1);
            list.projector(Family::Clock2, k, vec![d, c_next], proj(4, 0b01));
            list.projector(Family::Clock2, k, vec![r, c_next], kron(&one, &one));
            list.projector(Family::Clock2, k, vec![s, c_next], kron(&one, &one));
            list.group(Family::H4, k, true, place(h4_parts(), &[d, r, s, c_next]));
            list.group(Family::ClockProp1, k, false, place(prop41_parts(), &[r, s, c_next, d_next]));
        }
        list.group(Family::ClockProp2, k, false, place(prop42_parts(), &[c, d, r, s]));

        let gate = &circuit.gates()[k];
        if gate.arity() == 1 {
            let (support, u) = gate_support(circuit, k, &[r, s]);
            list.projector(Family::GateProp, k, support, gate_prop(&u, &singlet(), &triplet()));
        } else {
            // U = U† lets the four-local projector split into three-local pieces
            let (targets, u) = gate_support(circuit, k, &[]);
            let z = pauli_z();
            let active = linalg::scale(&(linalg::identity(4) - kron(&z, &z)), 0.25);
            let uz = kron(&u, &linalg::scale(&z, 0.25));
            let with = |q: usize| {
                let mut sup = targets.clone();
                sup.push(q);
                sup
            };
            list.group(
                Family::GateProp,
                k,
                true,
                vec![(vec![r, s], active, false), (with(r), -uz.clone(), false), (with(s), uz, false)],
            );
        }
    }

    let [_, _, r1, s1] = site(0);
    for n in circuit.ancillas() {
        list.projector(Family::Init, 0, vec![n, r1, s1], kron(&one, &linalg::projector(&singlet())));
    }
    list.projector(
        Family::Out,
        l - 1,
        vec![circuit.output_qubit(), r_last, s_last],
        kron(&zero, &linalg::projector(&triplet())),
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{cluster_values, eigenvalues_dense, Multiset, CLUSTER_GAP};

    fn multiset(m: &DenseMatrix) -> String {
        Multiset(&cluster_values(&eigenvalues_dense(m).unwrap(), CLUSTER_GAP)).to_string()
    }

    #[test]
    fn gadget_spectra() {
        assert_eq!(multiset(&gadget_block(&prop41_parts())), "{0:7,1:4,2:3,3:2}");
        assert_eq!(multiset(&gadget_block(&prop42_parts())), "{0:7,1:4,2:3,3:2}");
        assert_eq!(multiset(&gadget_block(&h4_parts())), "{0:12,1:4}");
    }

    #[test]
    fn kernel_and_excluded_states() {
        for (parts, kernel, illegal, perp) in [
            (prop41_parts(), alpha_states(), alpha_illegal_kernel(), alpha_perp()),
            (prop42_parts(), beta_states(), beta_illegal_kernel(), beta_perp()),
        ] {
            let g = gadget_block(&parts);
            for v in kernel.iter().chain(&illegal) {
                assert!((linalg::vec_norm(v) - 1.0).abs() < 1e-15);
                assert!(linalg::vec_norm(&linalg::mat_vec(&g, v)) < 1e-15);
            }
            let e = linalg::inner(&perp, &linalg::mat_vec(&g, &perp));
            assert!((e.re - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn all_summands_are_at_most_three_local() {
        for parts in [prop41_parts(), prop42_parts(), h4_parts()] {
            assert!(parts.iter().all(|(s, _, _)| s.len() <= 3));
        }
    }
}
