//! Verifier circuits: gates on work qubits, a line-oriented text format, and
//! per-construction admissibility checks.
//!
//! ```text
//! # comments and blank lines are ignored
//! inputs 1
//! ancillas 1
//! output 1
//! gate CNOT 0 1
//! gate INLINE2 0
//! 0.7071067811865476+0i 0.7071067811865476+0i
//! 0.7071067811865476+0i -0.7071067811865476+0i
//! ```
//!
//! Work qubits `0..inputs` hold the witness, `inputs..inputs+ancillas` the
//! ancillas. For a two-qubit gate the first listed qubit is the most
//! significant factor of the gate matrix.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::constructions::ConstructionKind;
use crate::linalg::{self, DenseMatrix, C64, ONE, ZERO};

pub const UNITARY_TOLERANCE: f64 = 1e-12;
pub const SYMMETRIC_GATE_TOLERANCE: f64 = 1e-12;

pub const GATE_NAMES: [&str; 10] = ["I", "X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("unknown gate {0}")]
    UnknownGate(String),
    #[error("gate matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("gate of dimension {dim} cannot act on {targets} qubit(s)")]
    ArityMismatch { dim: usize, targets: usize },
    #[error("gate targets must be one or two distinct qubits, got {0:?}")]
    BadTargets(Vec<usize>),
    #[error("qubit {qubit} out of range for {work} work qubits")]
    QubitOutOfRange { qubit: usize, work: usize },
    #[error("circuit has no gates")]
    NoGates,
    #[error("{0}")]
    Syntax(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: CircuitError,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    targets: Vec<usize>,
    matrix: DenseMatrix,
    name: Option<String>,
}

impl Gate {
    pub fn new(targets: Vec<usize>, matrix: DenseMatrix, name: Option<String>) -> Result<Self, CircuitError> {
        let distinct = targets.len() != 2 || targets[0] != targets[1];
        if targets.is_empty() || targets.len() > 2 || !distinct {
            return Err(CircuitError::BadTargets(targets));
        }
        if matrix.nrows() != 1 << targets.len() || !matrix.is_square() {
            return Err(CircuitError::ArityMismatch { dim: matrix.nrows(), targets: targets.len() });
        }
        let deviation = linalg::unitarity_deviation(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(CircuitError::NotUnitary { deviation });
        }
        Ok(Self { targets, matrix, name })
    }

    pub fn named(name: &str, targets: Vec<usize>) -> Result<Self, CircuitError> {
        Self::new(targets, named_gate(name)?, Some(name.to_string()))
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    /// Targets in increasing order with the matrix permuted to match.
    pub fn sorted(&self) -> (Vec<usize>, DenseMatrix) {
        if self.targets.len() == 2 && self.targets[0] > self.targets[1] {
            (vec![self.targets[1], self.targets[0]], linalg::swap_qubits(&self.matrix))
        } else {
            (self.targets.clone(), self.matrix.clone())
        }
    }

    /// The gate as an operator on `work` qubits (qubit 0 most significant).
    pub fn on_work(&self, work: usize) -> DenseMatrix {
        let (targets, matrix) = self.sorted();
        let dim = 1usize << work;
        let local_bits = |i: usize| -> usize {
            targets.iter().fold(0, |acc, &q| (acc << 1) | ((i >> (work - 1 - q)) & 1))
        };
        let mask: usize = targets.iter().map(|&q| 1usize << (work - 1 - q)).sum();
        DenseMatrix::from_fn(dim, dim, |r, c| {
            if r & !mask != c & !mask {
                ZERO
            } else {
                matrix[(local_bits(r), local_bits(c))]
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_input: usize,
    n_ancilla: usize,
    gates: Vec<Gate>,
    output_qubit: usize,
}

impl Circuit {
    pub fn new(n_input: usize, n_ancilla: usize, gates: Vec<Gate>, output_qubit: usize) -> Result<Self, CircuitError> {
        let work = n_input + n_ancilla;
        if gates.is_empty() {
            return Err(CircuitError::NoGates);
        }
        if output_qubit >= work {
            return Err(CircuitError::QubitOutOfRange { qubit: output_qubit, work });
        }
        for gate in &gates {
            if let Some(&q) = gate.targets.iter().find(|&&q| q >= work) {
                return Err(CircuitError::QubitOutOfRange { qubit: q, work });
            }
        }
        Ok(Self { n_input, n_ancilla, gates, output_qubit })
    }

    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_work(&self) -> usize {
        self.n_input + self.n_ancilla
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates `L`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }

    pub fn ancillas(&self) -> std::ops::Range<usize> {
        self.n_input..self.n_work()
    }

    /// The same registers with the gate list repeated `times` times.
    pub fn repeated(&self, times: usize) -> Circuit {
        let gates = self.gates.iter().cloned().cycle().take(self.gates.len() * times).collect();
        Circuit { gates, ..self.clone() }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "inputs {}", self.n_input).unwrap();
        writeln!(out, "ancillas {}", self.n_ancilla).unwrap();
        writeln!(out, "output {}", self.output_qubit).unwrap();
        for gate in &self.gates {
            let targets: Vec<String> = gate.targets.iter().map(|q| q.to_string()).collect();
            let named = gate
                .name
                .as_deref()
                .filter(|n| named_gate(n).is_ok_and(|m| m == gate.matrix));
            match named {
                Some(name) => writeln!(out, "gate {name} {}", targets.join(" ")).unwrap(),
                None => {
                    let d = gate.matrix.nrows();
                    writeln!(out, "gate INLINE{d} {}", targets.join(" ")).unwrap();
                    for r in 0..d {
                        let row: Vec<String> = (0..d).map(|c| format_complex(gate.matrix[(r, c)])).collect();
                        writeln!(out, "{}", row.join(" ")).unwrap();
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Standard matrix for a gate name.
pub fn named_gate(name: &str) -> Result<DenseMatrix, CircuitError> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let m2 = |a: [C64; 4]| DenseMatrix::from_row_slice(2, 2, &a);
    let perm4 = |p: [usize; 4]| {
        let mut m = linalg::zeros(4);
        for (col, &row) in p.iter().enumerate() {
            m[(row, col)] = ONE;
        }
        m
    };
    Ok(match name {
        "I" => linalg::identity(2),
        "X" => m2([ZERO, ONE, ONE, ZERO]),
        "Y" => m2([ZERO, -i, i, ZERO]),
        "Z" => linalg::diag(&[1.0, -1.0]),
        "H" => m2([C64::new(r, 0.0), C64::new(r, 0.0), C64::new(r, 0.0), C64::new(-r, 0.0)]),
        "S" => m2([ONE, ZERO, ZERO, i]),
        "T" => m2([ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
        "CNOT" => perm4([0, 1, 3, 2]),
        "CZ" => linalg::diag(&[1.0, 1.0, 1.0, -1.0]),
        "SWAP" => perm4([0, 2, 1, 3]),
        other => return Err(CircuitError::UnknownGate(other.to_string())),
    })
}

/// Problems that make a circuit inadmissible for a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub gate: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Empty iff the circuit can be compiled by `kind`. The 3-local construction
/// needs every two-qubit gate to be its own inverse (`U = U†`).
pub fn validate_for(circuit: &Circuit, kind: ConstructionKind) -> Vec<Diagnostic> {
    if kind != ConstructionKind::ThreeLocal {
        return Vec::new();
    }
    circuit
        .gates
        .iter()
        .enumerate()
        .filter(|(_, g)| g.arity() == 2)
        .filter(|(_, g)| linalg::hermitian_deviation(&g.matrix) > SYMMETRIC_GATE_TOLERANCE)
        .map(|(k, _)| Diagnostic {
            gate: k,
            message: format!("gate {k} not Hermitian: two-qubit gates must be symmetric (U = U†) for the 3-local construction"),
        })
        .collect()
}

/// Formats `a+bi` with enough digits to round-trip.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{sign}{:e}i", z.re, z.im.abs())
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (exponents allowed).
pub fn parse_complex(text: &str) -> Result<C64, CircuitError> {
    let s = text.trim();
    let bad = || CircuitError::Syntax(format!("malformed complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that does not follow an exponent marker
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |t: &str| -> Result<f64, CircuitError> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(C64::new(0.0, parse_im(body)?)),
    }
}

fn parse_usize(token: Option<&str>, what: &str) -> Result<usize, CircuitError> {
    let token = token.ok_or_else(|| CircuitError::Syntax(format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| CircuitError::Syntax(format!("expected a nonnegative integer for {what}, got {token:?}")))
}

/// Parses the circuit text format; errors carry the 1-based line number.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, kind: CircuitError| ParseError { line, kind };

    let mut header = |key: &str| -> Result<(usize, usize), ParseError> {
        let (line, content) = lines
            .next()
            .ok_or_else(|| err(text.lines().count(), CircuitError::Syntax(format!("missing `{key}` line"))))?;
        let mut tokens = content.split_whitespace();
        if tokens.next() != Some(key) {
            return Err(err(line, CircuitError::Syntax(format!("expected `{key} <n>`, got {content:?}"))));
        }
        let value = parse_usize(tokens.next(), key).map_err(|k| err(line, k))?;
        if let Some(extra) = tokens.next() {
            return Err(err(line, CircuitError::Syntax(format!("unexpected token {extra:?}"))));
        }
        Ok((line, value))
    };
    let (_, n_input) = header("inputs")?;
    let (_, n_ancilla) = header("ancillas")?;
    let (output_line, output) = header("output")?;
    let work = n_input + n_ancilla;
    if output >= work {
        return Err(err(output_line, CircuitError::QubitOutOfRange { qubit: output, work }));
    }

    let mut gates = Vec::new();
    let mut last_line = output_line;
    while let Some((line, content)) = lines.next() {
        last_line = line;
        let mut tokens = content.split_whitespace();
        if tokens.next() != Some("gate") {
            return Err(err(line, CircuitError::Syntax(format!("expected `gate ...`, got {content:?}"))));
        }
        let name = tokens
            .next()
            .ok_or_else(|| err(line, CircuitError::Syntax("missing gate name".into())))?;
        let targets = tokens
            .map(|t| parse_usize(Some(t), "qubit index"))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|k| err(line, k))?;
        if let Some(&q) = targets.iter().find(|&&q| q >= work) {
            return Err(err(line, CircuitError::QubitOutOfRange { qubit: q, work }));
        }
        let gate = if let Some(dim) = name.strip_prefix("INLINE") {
            let d: usize = dim
                .parse()
                .map_err(|_| err(line, CircuitError::Syntax(format!("bad inline dimension in {name}"))))?;
            if d != 2 && d != 4 {
                return Err(err(line, CircuitError::ArityMismatch { dim: d, targets: targets.len() }));
            }
            let mut m = linalg::zeros(d);
            for r in 0..d {
                let (row_line, row) = lines
                    .next()
                    .ok_or_else(|| err(line, CircuitError::Syntax(format!("{name} needs {d} matrix rows"))))?;
                last_line = row_line;
                let entries: Vec<&str> = row.split_whitespace().collect();
                if entries.len() != d {
                    return Err(err(
                        row_line,
                        CircuitError::Syntax(format!("expected {d} entries, got {}", entries.len())),
                    ));
                }
                for (c, e) in entries.iter().enumerate() {
                    m[(r, c)] = parse_complex(e).map_err(|k| err(row_line, k))?;
                }
            }
            Gate::new(targets, m, None).map_err(|k| err(line, k))?
        } else {
            Gate::named(name, targets).map_err(|k| err(line, k))?
        };
        gates.push(gate);
    }
    Circuit::new(n_input, n_ancilla, gates, output).map_err(|k| err(last_line, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_cnot_example() {
        let c = parse_circuit("inputs 1\nancillas 1\noutput 1\ngate CNOT 0 1\n").unwrap();
        assert_eq!((c.n_input(), c.n_ancilla(), c.len()), (1, 1, 1));
        assert_eq!(c.output_qubit(), 1);
    }

    #[test]
    fn unknown_gate_reports_line() {
        let e = parse_circuit("inputs 1\nancillas 0\noutput 0\n\ngate FOO 0\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert_eq!(e.kind.to_string(), "unknown gate FOO");
    }

    #[test]
    fn inline_hadamard() {
        let text = "# hadamard\ninputs 1\nancillas 0\noutput 0\ngate INLINE2 0\n\
                    0.7071067811865476+0i 0.7071067811865476\n0.7071067811865476 -0.7071067811865476+0i\n";
        let c = parse_circuit(text).unwrap();
        let h = named_gate("H").unwrap();
        assert!(linalg::max_abs_diff(c.gates()[0].matrix(), &h) < 1e-15);
        assert_eq!(c.gates()[0].name(), None);
    }

    #[test]
    fn rejects_non_unitary_inline_and_bad_indices() {
        let e = parse_circuit("inputs 1\nancillas 0\noutput 0\ngate INLINE2 0\n1 1\n0 1\n").unwrap_err();
        assert!(matches!(e.kind, CircuitError::NotUnitary { .. }));
        assert_eq!(e.line, 4);
        let e = parse_circuit("inputs 1\nancillas 0\noutput 0\ngate X 3\n").unwrap_err();
        assert_eq!(e.kind, CircuitError::QubitOutOfRange { qubit: 3, work: 1 });
        let e = parse_circuit("inputs 1\nancillas 0\noutput 0\n").unwrap_err();
        assert_eq!(e.kind, CircuitError::NoGates);
        let e = parse_circuit("inputs 1\nancillas 0\noutput 2\ngate X 0\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn named_gate_examples() {
        let cnot = named_gate("CNOT").unwrap();
        assert_eq!(cnot[(3, 2)], ONE);
        assert_eq!(cnot[(2, 3)], ONE);
        assert_eq!(cnot[(0, 0)], ONE);
        assert_eq!(named_gate("Z").unwrap(), linalg::diag(&[1.0, -1.0]));
        assert_eq!(named_gate("CZ").unwrap(), linalg::diag(&[1.0, 1.0, 1.0, -1.0]));
        assert!(matches!(named_gate("FOO"), Err(CircuitError::UnknownGate(_))));
    }

    #[test]
    fn named_gates_are_unitary() {
        for name in GATE_NAMES {
            assert!(linalg::unitarity_deviation(&named_gate(name).unwrap()) <= 1e-15, "{name}");
        }
    }

    #[test]
    fn three_local_admissibility() {
        let kinds = |c: &Circuit| {
            (
                validate_for(c, ConstructionKind::ThreeLocal),
                validate_for(c, ConstructionKind::Bravyi),
                validate_for(c, ConstructionKind::Qutrit),
            )
        };
        let cnot = Circuit::new(1, 1, vec![Gate::named("CNOT", vec![0, 1]).unwrap()], 1).unwrap();
        assert!(kinds(&cnot).0.is_empty());

        let cs = Gate::new(vec![0, 1], {
            let mut m = linalg::identity(4);
            m[(3, 3)] = C64::new(0.0, 1.0);
            m
        }, None)
        .unwrap();
        let c = Circuit::new(2, 0, vec![cs], 0).unwrap();
        let (three, bravyi, qutrit) = kinds(&c);
        assert_eq!(three.len(), 1);
        assert!(three[0].to_string().starts_with("gate 0 not Hermitian"));
        assert!(bravyi.is_empty() && qutrit.is_empty());

        let t = Circuit::new(1, 0, vec![Gate::named("T", vec![0]).unwrap()], 0).unwrap();
        assert!(kinds(&t).0.is_empty());
    }

    #[test]
    fn complex_parsing_forms() {
        assert_eq!(parse_complex("1").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), C64::new(0.0, -2.5));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2E+2i").unwrap(), C64::new(1e-3, -200.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), C64::new(0.5, 0.25));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn on_work_places_gate_on_targets() {
        // CNOT with control 1, target 0 on two qubits maps |01> to |11>
        let g = Gate::named("CNOT", vec![1, 0]).unwrap();
        let m = g.on_work(2);
        assert_eq!(m[(3, 1)], ONE);
        let x = Gate::named("X", vec![1]).unwrap().on_work(3);
        assert_eq!(x[(0b010, 0b000)], ONE);
    }

    fn arb_gate(work: usize) -> impl Strategy<Value = Gate> {
        (0..GATE_NAMES.len(), 0..work, 0..work, any::<bool>()).prop_filter_map("distinct", move |(n, a, b, inline)| {
            let name = GATE_NAMES[n];
            let m = named_gate(name).unwrap();
            let targets = if m.nrows() == 4 {
                if a == b {
                    return None;
                }
                vec![a, b]
            } else {
                vec![a]
            };
            if inline {
                Some(Gate::new(targets, m, None).unwrap())
            } else {
                Some(Gate::named(name, targets).unwrap())
            }
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(
            (n_input, n_ancilla, gates, out) in (1usize..3, 1usize..3).prop_flat_map(|(i, a)| {
                (Just(i), Just(a), prop::collection::vec(arb_gate(i + a), 1..6), 0..i + a)
            })
        ) {
            let c = Circuit::new(n_input, n_ancilla, gates, out).unwrap();
            let parsed = parse_circuit(&c.to_text()).unwrap();
            prop_assert_eq!(parsed, c);
        }
    }
}
