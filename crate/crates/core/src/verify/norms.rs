use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::constructions::{build, ConstructionKind};
use crate::spectral::eigenvalues_dense;
use crate::tensorspace::term_norm;

use super::{CheckRecord, VerifyError, LINEAR_FIT_TOLERANCE};

/// Operators up to this dimension get a dense `λ_max` in the norm table.
const LAMBDA_MAX_DIM: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub gates: usize,
    pub term_count: usize,
    /// Σ of operator norms over all interaction terms.
    pub sum_norm: f64,
    pub max_term_norm: f64,
    /// Largest number of terms attached to a single site.
    pub max_terms_per_site: usize,
    pub lambda_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub rows: Vec<NormRow>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of `sum_norm` from the fitted line.
    pub fit_residual: f64,
    /// `max_terms_per_site × max_term_norm` over all rows.
    pub bound_constant: f64,
    /// Whether `sum_norm ≤ bound_constant · L` holds on every row.
    pub bound_holds: bool,
}

/// The circuit whose `L` gates cycle through the gates of `template`.
fn cycled(template: &Circuit, gates: usize) -> Result<Circuit, VerifyError> {
    let list = template.gates().iter().cycle().take(gates).cloned().collect();
    Circuit::new(template.n_input(), template.n_ancilla(), list, template.output_qubit())
        .map_err(|e| crate::constructions::ConstructionError::Positions(e.to_string()).into())
}

/// Σ term_norm and related totals for `L = 1 … max_gates`, with a
/// least-squares line through `(L, Σ term_norm)`.
pub fn norm_scaling(kind: ConstructionKind, template: &Circuit, max_gates: usize) -> Result<NormTable, VerifyError> {
    let mut rows = Vec::with_capacity(max_gates);
    for gates in 1..=max_gates {
        let bundle = build(kind, &cycled(template, gates)?)?;
        let norms: Vec<f64> = bundle.terms.iter().map(term_norm).collect();
        let max_terms_per_site = (0..gates).map(|k| bundle.terms.iter().filter(|t| t.site == k).count()).max().unwrap_or(0);
        let lambda_max = if bundle.shape.total_dim() <= LAMBDA_MAX_DIM {
            eigenvalues_dense(&bundle.assemble().to_dense())?.last().copied()
        } else {
            None
        };
        rows.push(NormRow {
            gates,
            term_count: norms.len(),
            sum_norm: norms.iter().sum(),
            max_term_norm: norms.iter().copied().fold(0.0, f64::max),
            max_terms_per_site,
            lambda_max,
        });
    }
    let (slope, intercept) = linear_fit(&rows.iter().map(|r| (r.gates as f64, r.sum_norm)).collect::<Vec<_>>());
    let fit_residual = rows
        .iter()
        .map(|r| (r.sum_norm - slope * r.gates as f64 - intercept).abs())
        .fold(0.0, f64::max);
    let bound_constant = rows
        .iter()
        .map(|r| r.max_terms_per_site as f64 * r.max_term_norm)
        .fold(0.0, f64::max);
    let bound_holds = rows.iter().all(|r| r.sum_norm <= bound_constant * r.gates as f64 + 1e-9);
    Ok(NormTable { rows, slope, intercept, fit_residual, bound_constant, bound_holds })
}

/// Ordinary least squares `y = slope·x + intercept`; a single point gives slope 0.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, mean_y - slope * mean_x)
}

pub(super) fn norm_records(kind: ConstructionKind, template: &Circuit, max_gates: usize) -> Result<Vec<CheckRecord>, VerifyError> {
    let table = norm_scaling(kind, template, max_gates)?;
    let sums: Vec<String> = table.rows.iter().map(|r| format!("{}", r.sum_norm)).collect();
    Ok(vec![
        CheckRecord::at_most("norms.linear_fit_residual", table.fit_residual, LINEAR_FIT_TOLERANCE).with_detail(format!(
            "L = 1..{max_gates}, sum of term norms [{}], slope {}, intercept {}",
            sums.join(", "),
            table.slope,
            table.intercept
        )),
        CheckRecord::at_most("norms.bound", f64::from(u8::from(!table.bound_holds)), 0.0)
            .with_detail(format!("sum of term norms <= {} * L", table.bound_constant)),
    ])
}
