//! Witness specifications: `basis:<bits>` or a file of amplitudes.

use std::path::Path;

use clockham_core::circuit::parse_complex;
use clockham_core::{SpaceShape, StateVector, C64};

/// Allowed deviation of an amplitude file from unit norm.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Parses `spec` into a state on `n_input` qubits.
pub fn parse_witness(spec: &str, n_input: usize) -> Result<StateVector, String> {
    let shape = SpaceShape::new(vec![2; n_input]).map_err(|e| e.to_string())?;
    if let Some(bits) = spec.strip_prefix("basis:") {
        let digits = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(format!("basis witness {bits:?} must contain only 0 and 1")),
            })
            .collect::<Result<Vec<usize>, _>>()?;
        if digits.len() != n_input {
            return Err(format!("basis witness has {} bits but the circuit has {n_input} inputs", digits.len()));
        }
        return StateVector::basis(shape, &digits).map_err(|e| e.to_string());
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read witness {}: {e}", path.display()))?;
    let amplitudes = parse_amplitudes(&text)?;
    if amplitudes.len() != shape.total_dim() {
        return Err(format!(
            "witness has {} amplitudes but {n_input} input qubits need {}",
            amplitudes.len(),
            shape.total_dim()
        ));
    }
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(format!("witness is not normalized: norm {norm:.17e}"));
    }
    StateVector::new(shape, amplitudes).map_err(|e| e.to_string())
}

/// One complex amplitude per line; `#` starts a comment.
pub fn parse_amplitudes(text: &str) -> Result<Vec<C64>, String> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i + 1, body))
        })
        .map(|(n, body)| parse_complex(body).map_err(|e| format!("witness line {n}: {e}")))
        .collect()
}
