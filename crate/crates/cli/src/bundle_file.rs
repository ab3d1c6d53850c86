//! Text serialization of a compiled bundle: a header followed by one record
//! per interaction term with its block in row-major `a+bi` entries.

use std::fmt::Write as _;

use clockham_core::circuit::{format_complex, parse_complex};
use clockham_core::{ConstructionKind, DenseMatrix, Family, HamiltonianBundle};

pub const MAGIC: &str = "clockham-bundle 1";

#[derive(Clone, Debug, PartialEq)]
pub struct TermRecord {
    pub family: Family,
    pub group: usize,
    pub site: usize,
    pub support: Vec<usize>,
    pub claimed_projector: bool,
    pub block: DenseMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleFile {
    pub kind: ConstructionKind,
    pub shape: Vec<usize>,
    pub work_qubits: usize,
    pub gates: usize,
    pub legal_states: usize,
    pub circuit_digest: String,
    pub terms: Vec<TermRecord>,
}

impl BundleFile {
    pub fn from_bundle(bundle: &HamiltonianBundle, circuit_digest: &str) -> Self {
        Self {
            kind: bundle.kind(),
            shape: bundle.shape.dims().to_vec(),
            work_qubits: bundle.layout.work,
            gates: bundle.layout.gates,
            legal_states: bundle.layout.t,
            circuit_digest: circuit_digest.to_string(),
            terms: bundle
                .terms
                .iter()
                .map(|t| TermRecord {
                    family: t.family,
                    group: t.group.0,
                    site: t.site,
                    support: t.support.clone(),
                    claimed_projector: t.claimed_projector,
                    block: t.block.clone(),
                })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "kind {}", self.kind).unwrap();
        writeln!(out, "shape {}", join(&self.shape)).unwrap();
        writeln!(out, "work_qubits {}", self.work_qubits).unwrap();
        writeln!(out, "gates {}", self.gates).unwrap();
        writeln!(out, "legal_states {}", self.legal_states).unwrap();
        writeln!(out, "circuit_digest {}", self.circuit_digest).unwrap();
        writeln!(out, "terms {}", self.terms.len()).unwrap();
        for t in &self.terms {
            writeln!(
                out,
                "term family {} group {} site {} projector {} support {}",
                t.family,
                t.group,
                t.site,
                u8::from(t.claimed_projector),
                join(&t.support)
            )
            .unwrap();
            for row in t.block.row_iter() {
                let entries: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
                writeln!(out, "{}", entries.join(" ")).unwrap();
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut r = Reader { lines: text.lines().enumerate() };
        let (n, magic) = r.line("header")?;
        if magic != MAGIC {
            return Err(format!("line {n}: expected {MAGIC:?}"));
        }
        let (n, kind) = r.field("kind")?;
        let kind: ConstructionKind = kind.parse().map_err(|e| format!("line {n}: {e}"))?;
        let (n, shape) = r.field("shape")?;
        let shape = numbers(n, shape.split_whitespace())?;
        let work_qubits = r.number("work_qubits")?;
        let gates = r.number("gates")?;
        let legal_states = r.number("legal_states")?;
        let circuit_digest = r.field("circuit_digest")?.1.to_string();
        let count = r.number("terms")?;
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, header) = r.field("term")?;
            let tokens: Vec<&str> = header.split_whitespace().collect();
            let value = |key: &str| -> Result<&str, String> {
                let at = tokens.iter().position(|t| *t == key).ok_or_else(|| format!("line {n}: missing {key}"))?;
                tokens.get(at + 1).copied().ok_or_else(|| format!("line {n}: missing value for {key}"))
            };
            let int = |key: &str| value(key)?.parse::<usize>().map_err(|_| format!("line {n}: bad {key}"));
            let family: Family = value("family")?.parse().map_err(|e| format!("line {n}: {e}"))?;
            let at = tokens.iter().position(|t| *t == "support").ok_or_else(|| format!("line {n}: missing support"))?;
            let support = numbers(n, tokens[at + 1..].iter().copied())?;
            let dim = support
                .iter()
                .map(|&p| shape.get(p).copied().ok_or_else(|| format!("line {n}: support {p} outside shape")))
                .product::<Result<usize, String>>()?;
            let mut entries = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let (rn, row) = r.line("block row")?;
                let values = row
                    .split_whitespace()
                    .map(|x| parse_complex(x).map_err(|e| format!("line {rn}: {e}")))
                    .collect::<Result<Vec<_>, _>>()?;
                if values.len() != dim {
                    return Err(format!("line {rn}: expected {dim} entries, found {}", values.len()));
                }
                entries.extend(values);
            }
            terms.push(TermRecord {
                family,
                group: int("group")?,
                site: int("site")?,
                support,
                claimed_projector: value("projector")? == "1",
                block: DenseMatrix::from_row_slice(dim, dim, &entries),
            });
        }
        Ok(Self { kind, shape, work_qubits, gates, legal_states, circuit_digest, terms })
    }
}

fn numbers<'a>(line: usize, tokens: impl Iterator<Item = &'a str>) -> Result<Vec<usize>, String> {
    tokens
        .map(|x| x.parse::<usize>().map_err(|_| format!("line {line}: bad number {x:?}")))
        .collect()
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    /// Next non-blank line with its one-based number.
    fn line(&mut self, what: &str) -> Result<(usize, &'a str), String> {
        self.lines
            .find(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| format!("unexpected end of file, expected {what}"))
    }

    /// The remainder of the next line, which must start with `key`.
    fn field(&mut self, key: &str) -> Result<(usize, &'a str), String> {
        let (n, line) = self.line(key)?;
        match line.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((n, rest.trim_start())),
            _ => Err(format!("line {n}: expected {key}")),
        }
    }

    fn number(&mut self, key: &str) -> Result<usize, String> {
        let (n, value) = self.field(key)?;
        value.parse().map_err(|_| format!("line {n}: bad number {value:?}"))
    }
}
