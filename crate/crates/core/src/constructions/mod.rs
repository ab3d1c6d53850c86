//! Circuit-to-Hamiltonian builders for the three clock constructions, their
//! legal clock states and schedules, and the abstract reference Hamiltonian
//! on `work ⊗ (T-level clock)`.

mod bravyi;
mod qutrit;
mod reference;
pub mod threelocal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{validate_for, Circuit, Diagnostic};
use crate::linalg::{self, DenseMatrix, C64, ONE, ZERO};
use crate::tensorspace::{
    assemble, block_on, Family, GroupId, LocalTerm, SpaceShape, SparseOperator, StateVector, TensorError,
};

pub use reference::{build_reference, ReferenceHamiltonian, ReferencePiece};

/// Witness and state normalization tolerance.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    Bravyi,
    Qutrit,
    ThreeLocal,
    Reference,
}

impl ConstructionKind {
    /// Kinds with a particle-level Hamiltonian.
    pub const BUILDABLE: [ConstructionKind; 3] =
        [ConstructionKind::Bravyi, ConstructionKind::Qutrit, ConstructionKind::ThreeLocal];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::Bravyi => "bravyi",
            ConstructionKind::Qutrit => "qutrit",
            ConstructionKind::ThreeLocal => "threelocal",
            ConstructionKind::Reference => "reference",
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstructionKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [
            ConstructionKind::Bravyi,
            ConstructionKind::Qutrit,
            ConstructionKind::ThreeLocal,
            ConstructionKind::Reference,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| format!("unknown construction kind {s}"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("a construction needs at least one gate")]
    NoGates,
    #[error("circuit is not admissible: {}", join_diagnostics(.0))]
    Inadmissible(Vec<Diagnostic>),
    #[error("the reference kind has no particle layout")]
    NoParticleLayout,
    #[error("inconsistent reference positions: {0}")]
    Positions(String),
    #[error("invalid witness: {0}")]
    Witness(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.message.as_str()).collect::<Vec<_>>().join("; ")
}

/// Where the clock particles sit and how many legal states they have.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockLayout {
    pub kind: ConstructionKind,
    /// Gate count `L`.
    pub gates: usize,
    /// Number of work qubits, which occupy particles `0..work`.
    pub work: usize,
    pub clock_particles: Vec<usize>,
    pub clock_dims: Vec<usize>,
    /// Number of legal clock states.
    pub t: usize,
}

impl ClockLayout {
    fn per_site(&self) -> usize {
        self.clock_particles.len() / self.gates
    }

    /// Global particle indices of the clock particles belonging to gate `site`.
    pub fn site_particles(&self, site: usize) -> &[usize] {
        let w = self.per_site();
        &self.clock_particles[site * w..(site + 1) * w]
    }

    pub fn clock_shape(&self) -> SpaceShape {
        SpaceShape::new(self.clock_dims.clone()).expect("clock dimensions are valid")
    }

    /// Zero-based legal clock step at which ancillas are checked.
    pub fn init_step(&self) -> usize {
        match self.kind {
            ConstructionKind::Bravyi => 0,
            _ => 1,
        }
    }

    /// Zero-based legal clock step at which the output is checked.
    pub fn out_step(&self) -> usize {
        self.t - 1
    }
}

pub fn clock_dims(kind: ConstructionKind, gates: usize) -> Result<Vec<usize>, ConstructionError> {
    if gates == 0 {
        return Err(ConstructionError::NoGates);
    }
    let site: &[usize] = match kind {
        ConstructionKind::Bravyi => &[4],
        ConstructionKind::Qutrit => &[2, 2, 3],
        ConstructionKind::ThreeLocal => &[2, 2, 2, 2],
        ConstructionKind::Reference => return Err(ConstructionError::NoParticleLayout),
    };
    Ok(site.repeat(gates))
}

pub fn legal_count(kind: ConstructionKind, gates: usize) -> usize {
    match kind {
        ConstructionKind::Bravyi => 2 * gates,
        _ => 3 * gates,
    }
}

pub fn layout_for(kind: ConstructionKind, work: usize, gates: usize) -> Result<(SpaceShape, ClockLayout), ConstructionError> {
    let clock = clock_dims(kind, gates)?;
    let mut dims = vec![2; work];
    dims.extend_from_slice(&clock);
    let shape = SpaceShape::new(dims)?;
    let layout = ClockLayout {
        kind,
        gates,
        work,
        clock_particles: (work..work + clock.len()).collect(),
        clock_dims: clock,
        t: legal_count(kind, gates),
    };
    Ok((shape, layout))
}

/// Work qubits followed by the clock particles of `kind`.
pub fn layout(kind: ConstructionKind, circuit: &Circuit) -> Result<(SpaceShape, ClockLayout), ConstructionError> {
    layout_for(kind, circuit.n_work(), circuit.len())
}

/// A clock state as a superposition of clock-register configurations.
pub type ClockConfigState = Vec<(Vec<usize>, C64)>;

/// Legal clock states `C_1 … C_T` as sparse superpositions of configurations.
pub fn legal_configurations(kind: ConstructionKind, gates: usize) -> Result<Vec<ClockConfigState>, ConstructionError> {
    clock_dims(kind, gates)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let with_site = |before: &[usize], at: &[usize], after: &[usize], k: usize| -> Vec<usize> {
        let mut digits = before.repeat(k);
        digits.extend_from_slice(at);
        digits.extend(after.repeat(gates - k - 1));
        digits
    };
    let mut states = Vec::new();
    for k in 0..gates {
        match kind {
            ConstructionKind::Bravyi => {
                // u = 0, a1 = 1, a2 = 2, d = 3
                for a in [1, 2] {
                    states.push(vec![(with_site(&[3], &[a], &[0], k), ONE)]);
                }
            }
            ConstructionKind::Qutrit => {
                // (c, d, t) with t: d = 0, a1 = 1, a2 = 2
                for at in [[1, 0, 0], [1, 1, 1], [1, 1, 2]] {
                    states.push(vec![(with_site(&[1, 1, 0], &at, &[0, 0, 0], k), ONE)]);
                }
            }
            ConstructionKind::ThreeLocal => {
                let (done, idle) = ([1, 1, 0, 0], [0, 0, 0, 0]);
                states.push(vec![(with_site(&done, &[1, 0, 0, 0], &idle, k), ONE)]);
                for sign in [-1.0, 1.0] {
                    states.push(vec![
                        (with_site(&done, &[1, 1, 0, 1], &idle, k), C64::new(h, 0.0)),
                        (with_site(&done, &[1, 1, 1, 0], &idle, k), C64::new(sign * h, 0.0)),
                    ]);
                }
            }
            ConstructionKind::Reference => unreachable!(),
        }
    }
    Ok(states)
}

fn config_state(shape: &SpaceShape, parts: &ClockConfigState) -> Result<StateVector, TensorError> {
    let mut amplitudes = vec![ZERO; shape.total_dim()];
    for (digits, amp) in parts {
        amplitudes[shape.basis_index(digits)?] += amp;
    }
    StateVector::new(shape.clone(), amplitudes)
}

/// Orthonormal legal clock states on the clock register, ordered `C_1 … C_T`.
pub fn legal_clock_basis(kind: ConstructionKind, gates: usize) -> Result<Vec<StateVector>, ConstructionError> {
    let shape = SpaceShape::new(clock_dims(kind, gates)?)?;
    legal_configurations(kind, gates)?
        .iter()
        .map(|parts| config_state(&shape, parts).map_err(Into::into))
        .collect()
}

/// One clock transition `m -> m+1` and what drives it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleStep {
    /// Index of the gate applied at this transition, if any.
    pub gate: Option<usize>,
    /// Term family responsible for the transition.
    pub driver: Family,
    pub site: usize,
}

/// The padded gate sequence `Ũ` of length `T - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub steps: Vec<ScheduleStep>,
}

impl Schedule {
    pub fn for_kind(kind: ConstructionKind, gates: usize) -> Result<Schedule, ConstructionError> {
        clock_dims(kind, gates)?;
        let step = |gate, driver, site| ScheduleStep { gate, driver, site };
        let mut steps = Vec::new();
        for k in 0..gates {
            let last = k + 1 == gates;
            match kind {
                ConstructionKind::Bravyi => {
                    steps.push(step(Some(k), Family::GateProp, k));
                    if !last {
                        steps.push(step(None, Family::ClockProp1, k));
                    }
                }
                ConstructionKind::Qutrit => {
                    steps.push(step(None, Family::ClockProp1, k));
                    steps.push(step(Some(k), Family::GateProp, k));
                    if !last {
                        steps.push(step(None, Family::ClockProp2, k));
                    }
                }
                ConstructionKind::ThreeLocal => {
                    // the (c,d,r,s) step comes first, the (r,s,c',d') step after the gate
                    steps.push(step(None, Family::ClockProp2, k));
                    steps.push(step(Some(k), Family::GateProp, k));
                    if !last {
                        steps.push(step(None, Family::ClockProp1, k));
                    }
                }
                ConstructionKind::Reference => unreachable!(),
            }
        }
        Ok(Schedule { steps })
    }

    /// A schedule over `t` clock states with gate `k` at transition
    /// `positions[k]`; identity transitions are attributed to `clockprop1`.
    pub fn from_positions(gates: usize, t: usize, positions: &[usize]) -> Result<Schedule, ConstructionError> {
        if positions.len() != gates {
            return Err(ConstructionError::Positions(format!(
                "{} positions for {gates} gates",
                positions.len()
            )));
        }
        if t < 2 || positions.iter().any(|&p| p + 1 >= t) {
            return Err(ConstructionError::Positions(format!("positions {positions:?} do not fit {t} clock states")));
        }
        if !positions.windows(2).all(|w| w[0] < w[1]) {
            return Err(ConstructionError::Positions(format!("positions {positions:?} are not increasing")));
        }
        let steps = (0..t - 1)
            .map(|m| match positions.iter().position(|&p| p == m) {
                Some(k) => ScheduleStep { gate: Some(k), driver: Family::GateProp, site: k },
                None => ScheduleStep { gate: None, driver: Family::ClockProp1, site: m },
            })
            .collect();
        Ok(Schedule { steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn gate_positions(&self) -> Vec<usize> {
        self.steps.iter().enumerate().filter(|(_, s)| s.gate.is_some()).map(|(m, _)| m).collect()
    }

    /// Step unitaries on the work register (`I` for clock-only steps).
    pub fn unitaries(&self, circuit: &Circuit) -> Vec<DenseMatrix> {
        let work = circuit.n_work();
        self.steps
            .iter()
            .map(|s| match s.gate {
                Some(k) => circuit.gates()[k].on_work(work),
                None => linalg::identity(1 << work),
            })
            .collect()
    }
}

pub fn schedule(kind: ConstructionKind, circuit: &Circuit) -> Result<Schedule, ConstructionError> {
    Schedule::for_kind(kind, circuit.len())
}

/// Work-register states `φ_1 … φ_T` along the schedule.
pub fn work_trajectory(circuit: &Circuit, schedule: &Schedule, witness: &StateVector) -> Result<Vec<Vec<C64>>, ConstructionError> {
    let n = circuit.n_input();
    if witness.shape().dims() != vec![2; n].as_slice() {
        return Err(ConstructionError::Witness(format!(
            "expected a state on {n} input qubit(s), got shape {:?}",
            witness.shape().dims()
        )));
    }
    let norm = witness.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(ConstructionError::Witness(format!("witness norm is {norm:.17}, expected 1")));
    }
    let ancilla = linalg::ket(1 << circuit.n_ancilla(), 0);
    let mut phi = linalg::kron_vec(witness.amplitudes(), &ancilla);
    let mut out = vec![phi.clone()];
    for u in schedule.unitaries(circuit) {
        phi = linalg::mat_vec(&u, &phi);
        out.push(phi.clone());
    }
    Ok(out)
}

/// `(1/√T) Σ_m |φ_m⟩ ⊗ |C_m⟩` on the full space of `kind`.
pub fn history_state(kind: ConstructionKind, circuit: &Circuit, witness: &StateVector) -> Result<StateVector, ConstructionError> {
    let (shape, layout) = layout(kind, circuit)?;
    let schedule = Schedule::for_kind(kind, circuit.len())?;
    let phis = work_trajectory(circuit, &schedule, witness)?;
    let clocks = legal_clock_basis(kind, circuit.len())?;
    let weight = 1.0 / (layout.t as f64).sqrt();
    let mut amplitudes = vec![ZERO; shape.total_dim()];
    for (phi, clock) in phis.iter().zip(&clocks) {
        for (a, b) in amplitudes.iter_mut().zip(linalg::kron_vec(phi, clock.amplitudes())) {
            *a += b * weight;
        }
    }
    Ok(StateVector::new(shape, amplitudes)?)
}

/// Metadata of one clause group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupInfo {
    pub id: GroupId,
    pub family: Family,
    pub site: usize,
    /// Whether the summed group is asserted to be a projector.
    pub claimed_projector: bool,
    /// Union of member supports, increasing.
    pub support: Vec<usize>,
    pub members: Vec<usize>,
}

/// A construction's full term list with its layout and circuit.
#[derive(Clone, Debug)]
pub struct HamiltonianBundle {
    pub shape: SpaceShape,
    pub layout: ClockLayout,
    pub terms: Vec<LocalTerm>,
    pub groups: Vec<GroupInfo>,
    pub circuit: Circuit,
}

impl HamiltonianBundle {
    pub fn kind(&self) -> ConstructionKind {
        self.layout.kind
    }

    pub fn assemble(&self) -> SparseOperator {
        assemble(&self.terms, &self.shape).expect("bundle terms fit their shape")
    }

    /// Sum of the terms accepted by `keep`.
    pub fn assemble_where(&self, keep: impl Fn(&LocalTerm) -> bool) -> SparseOperator {
        let terms: Vec<LocalTerm> = self.terms.iter().filter(|t| keep(t)).cloned().collect();
        assemble(&terms, &self.shape).expect("bundle terms fit their shape")
    }

    pub fn group(&self, id: GroupId) -> &GroupInfo {
        &self.groups[id.0]
    }

    pub fn group_terms(&self, id: GroupId) -> impl Iterator<Item = &LocalTerm> {
        self.groups[id.0].members.iter().map(|&i| &self.terms[i])
    }

    /// Dense operator of a clause group on the union of its supports.
    pub fn group_block(&self, id: GroupId) -> DenseMatrix {
        let info = &self.groups[id.0];
        let dim = self.shape.support_dim(&info.support);
        self.group_terms(id).fold(linalg::zeros(dim), |acc, t| {
            acc + block_on(t, &self.shape, &info.support).expect("member support lies in group support")
        })
    }

    pub fn groups_of(&self, family: Family) -> impl Iterator<Item = &GroupInfo> {
        self.groups.iter().filter(move |g| g.family == family)
    }

    /// Clock-check terms (`clockinit`, `clock1`, `clock2`, `h4`) on the clock register alone.
    pub fn clock_operator(&self) -> SparseOperator {
        let offset = self.layout.work;
        let terms: Vec<LocalTerm> = self
            .terms
            .iter()
            .filter(|t| t.family.is_clock_check())
            .map(|t| LocalTerm { support: t.support.iter().map(|p| p - offset).collect(), ..t.clone() })
            .collect();
        assemble(&terms, &self.layout.clock_shape()).expect("clock terms act on clock particles only")
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::for_kind(self.kind(), self.layout.gates).expect("bundle kinds have schedules")
    }

    /// `|w⟩ ⊗ |C_m⟩` for every work basis state `w` (outer) and legal step `m` (inner).
    pub fn legal_basis(&self) -> Vec<StateVector> {
        let clocks = legal_clock_basis(self.kind(), self.layout.gates).expect("bundle kinds have clocks");
        let work_dim = 1usize << self.layout.work;
        let mut out = Vec::with_capacity(work_dim * clocks.len());
        for w in 0..work_dim {
            let ket = linalg::ket(work_dim, w);
            for clock in &clocks {
                let amplitudes = linalg::kron_vec(&ket, clock.amplitudes());
                out.push(StateVector::new(self.shape.clone(), amplitudes).expect("dimensions agree"));
            }
        }
        out
    }

    pub fn history_state(&self, witness: &StateVector) -> Result<StateVector, ConstructionError> {
        history_state(self.kind(), &self.circuit, witness)
    }

    /// Reference Hamiltonian with this bundle's schedule and init/out steps.
    pub fn reference(&self) -> ReferenceHamiltonian {
        build_reference(
            &self.circuit,
            &self.schedule(),
            Some(self.layout.init_step()),
            Some(self.layout.out_step()),
        )
        .expect("bundle schedules are consistent")
    }
}

/// Compiles `circuit` into the Hamiltonian of `kind`.
pub fn build(kind: ConstructionKind, circuit: &Circuit) -> Result<HamiltonianBundle, ConstructionError> {
    if kind == ConstructionKind::Reference {
        return Err(ConstructionError::NoParticleLayout);
    }
    let diagnostics = validate_for(circuit, kind);
    if !diagnostics.is_empty() {
        return Err(ConstructionError::Inadmissible(diagnostics));
    }
    let (shape, layout) = layout(kind, circuit)?;
    let mut list = TermList::default();
    match kind {
        ConstructionKind::Bravyi => bravyi::push_terms(&mut list, &layout, circuit),
        ConstructionKind::Qutrit => qutrit::push_terms(&mut list, &layout, circuit),
        ConstructionKind::ThreeLocal => threelocal::push_terms(&mut list, &layout, circuit),
        ConstructionKind::Reference => unreachable!(),
    }
    let (terms, groups) = list.finish(&shape)?;
    Ok(HamiltonianBundle { shape, layout, terms, groups, circuit: circuit.clone() })
}

/// One printed summand before validation: support, block, term-level projector claim.
pub(crate) type Part = (Vec<usize>, DenseMatrix, bool);

struct PendingGroup {
    family: Family,
    site: usize,
    claimed: bool,
    parts: Vec<Part>,
}

#[derive(Default)]
pub(crate) struct TermList {
    groups: Vec<PendingGroup>,
}

impl TermList {
    /// A clause made of a single projector term.
    pub(crate) fn projector(&mut self, family: Family, site: usize, support: Vec<usize>, block: DenseMatrix) {
        self.group(family, site, true, vec![(support, block, true)]);
    }

    pub(crate) fn group(&mut self, family: Family, site: usize, claimed: bool, parts: Vec<Part>) {
        self.groups.push(PendingGroup { family, site, claimed, parts });
    }

    /// Orders groups canonically (family, then site) and numbers them.
    fn finish(mut self, shape: &SpaceShape) -> Result<(Vec<LocalTerm>, Vec<GroupInfo>), ConstructionError> {
        self.groups.sort_by_key(|g| (g.family, g.site));
        let mut terms = Vec::new();
        let mut infos = Vec::new();
        for (gi, g) in self.groups.into_iter().enumerate() {
            let mut support: Vec<usize> = Vec::new();
            let mut members = Vec::new();
            for (sup, block, claimed) in g.parts {
                let term = LocalTerm::new(sup, block, g.family, g.site, GroupId(gi), claimed)?;
                let expected = shape.support_dim(&term.support);
                shape.check_support(&term.support)?;
                if term.block.nrows() != expected {
                    return Err(TensorError::BlockMismatch { expected, got: term.block.nrows() }.into());
                }
                support.extend_from_slice(&term.support);
                members.push(terms.len());
                terms.push(term);
            }
            support.sort_unstable();
            support.dedup();
            infos.push(GroupInfo { id: GroupId(gi), family: g.family, site: g.site, claimed_projector: g.claimed, support, members });
        }
        Ok((terms, infos))
    }
}

/// `½(|x⟩⟨x| + |y⟩⟨y| - |y⟩⟨x| - |x⟩⟨y|)` on a `dim`-level space.
pub(crate) fn hop(dim: usize, x: usize, y: usize) -> DenseMatrix {
    let (a, b) = (linalg::ket(dim, x), linalg::ket(dim, y));
    hop_states(&a, &b)
}

pub(crate) fn hop_states(x: &[C64], y: &[C64]) -> DenseMatrix {
    linalg::scale(
        &(linalg::outer(x, x) + linalg::outer(y, y) - linalg::outer(y, x) - linalg::outer(x, y)),
        0.5,
    )
}

/// `½(I⊗|x⟩⟨x| + I⊗|y⟩⟨y| - U⊗|y⟩⟨x| - U†⊗|x⟩⟨y|)`.
pub(crate) fn gate_prop(u: &DenseMatrix, x: &[C64], y: &[C64]) -> DenseMatrix {
    let id = linalg::identity(u.nrows());
    let sum = linalg::kron(&id, &linalg::outer(x, x)) + linalg::kron(&id, &linalg::outer(y, y))
        - linalg::kron(u, &linalg::outer(y, x))
        - linalg::kron(&u.adjoint(), &linalg::outer(x, y));
    linalg::scale(&sum, 0.5)
}

/// Work targets in increasing order followed by `clock`, with the gate matrix permuted to match.
pub(crate) fn gate_support(circuit: &Circuit, gate: usize, clock: &[usize]) -> (Vec<usize>, DenseMatrix) {
    let (mut targets, u) = circuit.gates()[gate].sorted();
    targets.extend_from_slice(clock);
    (targets, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Gate};

    fn cnot() -> Circuit {
        parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\n").unwrap()
    }

    #[test]
    fn layout_examples() {
        let (s, l) = layout_for(ConstructionKind::Qutrit, 2, 1).unwrap();
        assert_eq!(s.dims(), &[2, 2, 2, 2, 3]);
        assert_eq!((s.total_dim(), l.t), (48, 3));
        let (s, l) = layout_for(ConstructionKind::ThreeLocal, 2, 2).unwrap();
        assert_eq!(s.dims(), &[2; 10]);
        assert_eq!((s.total_dim(), l.t), (1024, 6));
        let (s, l) = layout_for(ConstructionKind::Bravyi, 1, 1).unwrap();
        assert_eq!(s.dims(), &[2, 4]);
        assert_eq!((s.total_dim(), l.t), (8, 2));
        assert_eq!(layout_for(ConstructionKind::Qutrit, 2, 0).unwrap_err(), ConstructionError::NoGates);
        assert_eq!(layout_for(ConstructionKind::Reference, 2, 1).unwrap_err(), ConstructionError::NoParticleLayout);
    }

    #[test]
    fn qutrit_legal_states_for_one_gate() {
        let basis = legal_clock_basis(ConstructionKind::Qutrit, 1).unwrap();
        let shape = SpaceShape::new(vec![2, 2, 3]).unwrap();
        let expected = [[1, 0, 0], [1, 1, 1], [1, 1, 2]];
        assert_eq!(basis.len(), 3);
        for (b, digits) in basis.iter().zip(expected) {
            assert_eq!(b, &StateVector::basis(shape.clone(), &digits).unwrap());
        }
    }

    #[test]
    fn threelocal_c2_is_singlet_on_pair() {
        let basis = legal_clock_basis(ConstructionKind::ThreeLocal, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = basis[1].amplitudes();
        assert!((a[0b1101].re - h).abs() < 1e-16);
        assert!((a[0b1110].re + h).abs() < 1e-16);
        assert!((basis[1].norm() - 1.0).abs() < 1e-15);
        assert!((basis[2].amplitudes()[0b1110].re - h).abs() < 1e-16);
    }

    #[test]
    fn legal_bases_are_orthonormal() {
        for kind in ConstructionKind::BUILDABLE {
            for gates in 1..=3 {
                let basis = legal_clock_basis(kind, gates).unwrap();
                assert_eq!(basis.len(), legal_count(kind, gates));
                for (i, a) in basis.iter().enumerate() {
                    for (j, b) in basis.iter().enumerate() {
                        let target = if i == j { 1.0 } else { 0.0 };
                        assert!((a.inner(b).re - target).abs() < 1e-15 && a.inner(b).im == 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn schedules() {
        let q = Schedule::for_kind(ConstructionKind::Qutrit, 2).unwrap();
        let gates: Vec<Option<usize>> = q.steps.iter().map(|s| s.gate).collect();
        assert_eq!(gates, vec![None, Some(0), None, None, Some(1)]);
        let b = Schedule::for_kind(ConstructionKind::Bravyi, 2).unwrap();
        assert_eq!(b.steps.iter().map(|s| s.gate).collect::<Vec<_>>(), vec![Some(0), None, Some(1)]);
        for kind in ConstructionKind::BUILDABLE {
            assert_eq!(Schedule::for_kind(kind, 1).unwrap().len(), legal_count(kind, 1) - 1);
        }
        let p = Schedule::from_positions(2, 6, &[1, 4]).unwrap();
        assert_eq!(p.gate_positions(), q.gate_positions());
        assert!(p.steps.iter().filter(|s| s.gate.is_none()).all(|s| s.driver == Family::ClockProp1));
        assert!(Schedule::from_positions(2, 6, &[4, 1]).is_err());
        assert!(Schedule::from_positions(1, 3, &[2]).is_err());
    }

    #[test]
    fn history_state_of_single_x_gate() {
        let c = Circuit::new(1, 0, vec![Gate::named("X", vec![0]).unwrap()], 0).unwrap();
        let witness = StateVector::basis(SpaceShape::new(vec![2]).unwrap(), &[0]).unwrap();
        let psi = history_state(ConstructionKind::Qutrit, &c, &witness).unwrap();
        let shape = psi.shape().clone();
        let r = 1.0 / 3f64.sqrt();
        let mut expected = vec![ZERO; shape.total_dim()];
        for digits in [[0, 1, 0, 0], [0, 1, 1, 1], [1, 1, 1, 2]] {
            expected[shape.basis_index(&digits).unwrap()] = C64::new(r, 0.0);
        }
        assert!(psi.amplitudes().iter().zip(&expected).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn identity_schedule_history_is_uniform() {
        let c = Circuit::new(1, 0, vec![Gate::named("I", vec![0]).unwrap(); 2], 0).unwrap();
        let witness = StateVector::basis(SpaceShape::new(vec![2]).unwrap(), &[0]).unwrap();
        for kind in ConstructionKind::BUILDABLE {
            let psi = history_state(kind, &c, &witness).unwrap();
            let t = legal_count(kind, 2);
            let clocks = legal_clock_basis(kind, 2).unwrap();
            for clock in clocks {
                let v = linalg::kron_vec(&linalg::ket(2, 0), clock.amplitudes());
                let overlap = linalg::inner(&v, psi.amplitudes());
                assert!((overlap.re - 1.0 / (t as f64).sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn witness_must_be_normalized_and_sized() {
        let shape = SpaceShape::new(vec![2]).unwrap();
        let bad = StateVector::new(shape, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(history_state(ConstructionKind::Qutrit, &cnot(), &bad), Err(ConstructionError::Witness(_))));
        let wrong = StateVector::basis(SpaceShape::new(vec![2, 2]).unwrap(), &[0, 0]).unwrap();
        assert!(matches!(history_state(ConstructionKind::Qutrit, &cnot(), &wrong), Err(ConstructionError::Witness(_))));
    }

    #[test]
    fn build_rejects_non_symmetric_gate_for_threelocal() {
        let mut m = linalg::identity(4);
        m[(3, 3)] = C64::new(0.0, 1.0);
        let c = Circuit::new(2, 0, vec![Gate::new(vec![0, 1], m, None).unwrap()], 0).unwrap();
        let err = build(ConstructionKind::ThreeLocal, &c).unwrap_err();
        assert!(err.to_string().contains("not Hermitian"));
        assert!(build(ConstructionKind::Qutrit, &c).is_ok());
        assert!(build(ConstructionKind::Bravyi, &c).is_ok());
    }

    #[test]
    fn terms_are_in_canonical_order() {
        for kind in ConstructionKind::BUILDABLE {
            let b = build(kind, &cnot().repeated(3)).unwrap();
            let keys: Vec<(Family, usize)> = b.terms.iter().map(|t| (t.family, t.site)).collect();
            assert!(keys.windows(2).all(|w| w[0] <= w[1]), "{kind}");
            for g in &b.groups {
                assert!(g.members.iter().all(|&m| b.terms[m].group == g.id));
            }
        }
    }

    #[test]
    fn qutrit_assembles_to_layout_dimension() {
        let b = build(ConstructionKind::Qutrit, &cnot()).unwrap();
        assert_eq!(b.assemble().dim(), 4 * 12);
        assert!(b.terms.iter().all(|t| t.claimed_projector));
    }
}
