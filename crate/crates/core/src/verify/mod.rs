//! Audits that turn the structural claims about a bundle into pass/fail records.

mod clock;
mod gap;
mod history;
mod norms;
mod restriction;
mod terms;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::constructions::{ConstructionError, ConstructionKind, HamiltonianBundle};
use crate::spectral::SpectralError;
use crate::tensorspace::{Family, SpaceShape, StateVector, TensorError};

pub use clock::{
    clock_kernel, constraint_equivalence, constraints_hold, excluded_states_energy, illegal_penalty, ClockKernel,
    ConstraintReport, PenaltyReport,
};
pub use gap::{gap_report, GapReport, SolverChoice};
pub use history::{best_basis_witness, check_history, HistoryEnergies};
pub use norms::{norm_scaling, NormRow, NormTable};
pub use restriction::{check_invariance, check_restriction, propagation_spectrum, FamilyFit, RestrictionReport};
pub use terms::{
    audit_terms, gadget_audit, h4_audit, positive_to_projector, subspace_distance, GadgetAudit, GroupAudit, H4Audit,
    TermAudit, TermAuditRow,
};

pub const PROJECTOR_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-12;
pub const HISTORY_TOLERANCE: f64 = 1e-10;
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;
pub const RESTRICTION_TOLERANCE: f64 = 1e-12;
pub const UNIT_SCALAR_TOLERANCE: f64 = 1e-10;
pub const ZERO_ENERGY_TOLERANCE: f64 = 1e-8;
pub const LINEAR_FIT_TOLERANCE: f64 = 1e-9;
pub const KERNEL_TOLERANCE: f64 = 1e-10;
pub const INTEGER_TOLERANCE: f64 = 1e-10;
/// Baseline lower bound for the expectation of the excluded propagation states.
pub const EXCLUDED_STATE_BASELINE: f64 = 0.4;
/// Random illegal configurations sampled when exhaustive enumeration is too large.
pub const PENALTY_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("operator has eigenvalue {0:e} below zero")]
    NegativeEigenvalue(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Selectable audit groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    History,
    Invariance,
    Restriction,
    Spectra,
    Gap,
    Norms,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::History, Check::Invariance, Check::Restriction, Check::Spectra, Check::Gap, Check::Norms];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::History => "history",
            Check::Invariance => "invariance",
            Check::Restriction => "restriction",
            Check::Spectra => "spectra",
            Check::Gap => "gap",
            Check::Norms => "norms",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown check {s:?} (expected one of history, invariance, restriction, spectra, gap, norms)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Comparison {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Above => value > threshold,
        }
    }
}

/// One measured quantity against its threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let pass = value.is_finite() && comparison.holds(value, threshold);
        let value = if value.is_finite() { value } else { f64::MAX };
        Self { name: name.into(), value, threshold, comparison, pass, detail: None }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::AtMost, threshold)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::AtLeast, threshold)
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Comparison::Above, threshold)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Forces failure, for results that are numerically fine but otherwise wrong.
    pub fn require(mut self, ok: bool) -> Self {
        self.pass &= ok;
        self
    }

    fn failed(name: impl Into<String>, error: impl fmt::Display) -> Self {
        Self {
            name: name.into(),
            value: 0.0,
            threshold: 0.0,
            comparison: Comparison::AtMost,
            pass: false,
            detail: Some(error.to_string()),
        }
    }
}

/// Fitted restriction scalar for one family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyScalar {
    pub family: Family,
    pub scalar: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub kind: ConstructionKind,
    pub circuit_digest: String,
    pub checks: Vec<CheckRecord>,
    pub scalars: Vec<FamilyScalar>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// What the caller expects of the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Yes,
    No,
}

#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub checks: Vec<Check>,
    /// Witness on the input qubits; defaults to the best computational-basis witness.
    pub witness: Option<StateVector>,
    /// Defaults to `Yes` exactly when some basis witness has zero history energy.
    pub expect: Option<Expectation>,
    pub seed: u64,
    pub solver: SolverChoice,
    /// Largest gate count in the norm-scaling table.
    pub norm_max_gates: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            witness: None,
            expect: None,
            seed: 0,
            solver: SolverChoice::Auto,
            norm_max_gates: 6,
        }
    }
}

/// SHA-256 of the canonical circuit text.
pub fn circuit_digest(circuit: &Circuit) -> String {
    hex::encode(Sha256::digest(circuit.to_text().as_bytes()))
}

fn push_result(records: &mut Vec<CheckRecord>, name: &str, result: Result<Vec<CheckRecord>, VerifyError>) {
    match result {
        Ok(r) => records.extend(r),
        Err(e) => records.push(CheckRecord::failed(name, e)),
    }
}

/// Runs the selected checks in canonical order.
pub fn run_audit(bundle: &HamiltonianBundle, options: &AuditOptions) -> AuditReport {
    let mut checks = Vec::new();
    let mut scalars = Vec::new();
    let mut notes = Vec::new();
    let kind = bundle.kind();

    let (witness, expect) = resolve_witness(bundle, options);
    let expect = expect.unwrap_or_else(|e| {
        checks.push(CheckRecord::failed("witness", e));
        Expectation::No
    });
    let witness = witness.ok();

    let mut selected = options.checks.clone();
    selected.sort();
    selected.dedup();
    for check in selected {
        match check {
            Check::History => match &witness {
                Some(w) => push_result(&mut checks, "history", history::history_records(bundle, w, expect)),
                None => checks.push(CheckRecord::failed("history", "no valid witness")),
            },
            Check::Invariance => push_result(&mut checks, "invariance", restriction::invariance_records(bundle)),
            Check::Restriction => {
                let result = restriction::restriction_records(bundle).map(|(records, fits)| {
                    scalars = fits
                        .iter()
                        .map(|f| FamilyScalar { family: f.family, scalar: f.scalar, deviation: f.deviation })
                        .collect();
                    records
                });
                push_result(&mut checks, "restriction", result);
                if kind != ConstructionKind::ThreeLocal {
                    notes.push(
                        "restriction compared with the reference Hamiltonian of this construction's own padded \
                         schedule; qutrit and bravyi agree with it at unit weight"
                            .to_string(),
                    );
                }
            }
            Check::Spectra => push_result(&mut checks, "spectra", spectra_records(bundle, options.seed)),
            Check::Gap => push_result(&mut checks, "gap", gap::gap_records(bundle, expect, options)),
            Check::Norms => push_result(
                &mut checks,
                "norms",
                norms::norm_records(kind, &bundle.circuit, options.norm_max_gates),
            ),
        }
    }
    AuditReport { kind, circuit_digest: circuit_digest(&bundle.circuit), checks, scalars, notes }
}

fn resolve_witness(
    bundle: &HamiltonianBundle,
    options: &AuditOptions,
) -> (Result<StateVector, VerifyError>, Result<Expectation, VerifyError>) {
    let best = best_basis_witness(bundle);
    let default_expect = best.as_ref().map(|(_, energy)| {
        if *energy <= HISTORY_TOLERANCE {
            Expectation::Yes
        } else {
            Expectation::No
        }
    });
    let expect = match options.expect {
        Some(e) => Ok(e),
        None => default_expect.map_err(Clone::clone),
    };
    let witness = match &options.witness {
        Some(w) => Ok(w.clone()),
        None => best.map(|(w, _)| w),
    };
    (witness, expect)
}

fn spectra_records(bundle: &HamiltonianBundle, seed: u64) -> Result<Vec<CheckRecord>, VerifyError> {
    let mut records = terms::term_records(bundle)?;
    if bundle.kind() == ConstructionKind::ThreeLocal {
        records.extend(terms::gadget_records(bundle)?);
    }
    records.extend(clock::clock_records(bundle, seed)?);
    Ok(records)
}

/// A witness on `n` input qubits in basis state `bits` (qubit 0 first).
pub fn basis_witness(bits: &[usize]) -> Result<StateVector, TensorError> {
    StateVector::basis(SpaceShape::new(vec![2; bits.len()])?, bits)
}
