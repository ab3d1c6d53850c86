//! Report documents and their canonical JSON form.

use std::collections::BTreeMap;
use std::io;

use clockham_core::verify::{AuditReport, GapReport, SolverChoice};
use clockham_core::ConstructionKind;
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Constants of the complexity-class definitions; recorded, never asserted.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, Deserialize)]
pub struct DefinitionConstants {
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub kind: ConstructionKind,
    /// SHA-256 of the circuit file bytes.
    pub circuit_file_digest: String,
    pub solver: SolverChoice,
    pub seed: u64,
    pub constants: DefinitionConstants,
    pub all_pass: bool,
    pub report: AuditReport,
    /// Wall-clock seconds per check; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub tool: String,
    pub version: String,
    pub kind: ConstructionKind,
    pub circuit_file_digest: String,
    pub dimension: usize,
    pub gap: GapReport,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct GroupEnergy {
    pub family: String,
    pub site: usize,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct HistorySummary {
    pub tool: String,
    pub version: String,
    pub kind: ConstructionKind,
    pub circuit_file_digest: String,
    pub dimension: usize,
    pub norm: f64,
    pub total_energy: f64,
    pub max_term_energy: f64,
    pub groups: Vec<GroupEnergy>,
}

/// Pretty JSON with every float printed to 17 significant digits.
struct CanonicalFormatter(PrettyFormatter<'static>);

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }
}

/// Canonical text of any serializable document, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("documents serialize");
    let mut text = String::from_utf8(out).expect("JSON is UTF-8");
    text.push('\n');
    text
}
