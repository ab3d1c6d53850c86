use crate::constructions::{ConstructionError, ConstructionKind, HamiltonianBundle, ReferenceHamiltonian};
use crate::linalg::{self, DenseMatrix};
use crate::spectral::{eigenvalues_dense, restrict, subspace_residual};
use crate::tensorspace::Family;

use super::{CheckRecord, VerifyError, INVARIANCE_TOLERANCE, RESTRICTION_TOLERANCE, UNIT_SCALAR_TOLERANCE};

/// `‖(I - Π) H Π‖_F` for the projector `Π` onto work ⊗ legal clock states.
pub fn check_invariance(bundle: &HamiltonianBundle) -> Result<f64, VerifyError> {
    Ok(subspace_residual(&bundle.assemble(), &bundle.legal_basis())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyFit {
    pub family: Family,
    /// Least-squares weight of the reference family; zero when the reference
    /// has no such family.
    pub scalar: f64,
    /// Largest entry of `restricted - scalar * reference` for this family.
    pub deviation: f64,
    pub restricted: DenseMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionReport {
    pub fits: Vec<FamilyFit>,
    /// Largest entry of `restrict(H) - Σ_f s_f R_f`.
    pub fitted_deviation: f64,
    /// Largest entry of `restrict(H) - R` with every weight one.
    pub unit_deviation: f64,
}

impl RestrictionReport {
    pub fn fit(&self, family: Family) -> Option<&FamilyFit> {
        self.fits.iter().find(|f| f.family == family)
    }
}

/// Restricts each term family to work ⊗ legal states and fits it against the
/// matching family of `reference`.
pub fn check_restriction(bundle: &HamiltonianBundle, reference: &ReferenceHamiltonian) -> Result<RestrictionReport, VerifyError> {
    let basis = bundle.legal_basis();
    if basis.len() != reference.dim() {
        return Err(ConstructionError::Positions(format!(
            "reference dimension {} does not match {} legal basis states",
            reference.dim(),
            basis.len()
        ))
        .into());
    }
    let mut fits = Vec::new();
    let mut fitted = linalg::zeros(basis.len());
    let mut restricted_total = linalg::zeros(basis.len());
    for family in Family::ALL {
        if !bundle.terms.iter().any(|t| t.family == family) {
            continue;
        }
        let restricted = restrict(&bundle.assemble_where(|t| t.family == family), &basis)?;
        let target = reference.family(family);
        let norm_sq = target.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let scalar = if norm_sq == 0.0 {
            0.0
        } else {
            target.iter().zip(restricted.iter()).map(|(r, b)| (r.conj() * b).re).sum::<f64>() / norm_sq
        };
        let model = linalg::scale(&target, scalar);
        let deviation = linalg::max_abs_diff(&restricted, &model);
        fitted += model;
        restricted_total += &restricted;
        fits.push(FamilyFit { family, scalar, deviation, restricted });
    }
    let fitted_deviation = linalg::max_abs_diff(&restricted_total, &fitted);
    let unit_deviation = linalg::max_abs_diff(&restricted_total, &reference.total());
    Ok(RestrictionReport { fits, fitted_deviation, unit_deviation })
}

/// Largest distance between the spectrum of the rescaled propagation part of
/// the restriction and `1 - cos(πj/T)` with work multiplicity.
pub fn propagation_spectrum(bundle: &HamiltonianBundle, report: &RestrictionReport) -> Result<f64, VerifyError> {
    let t = bundle.layout.t;
    let work_dim = 1usize << bundle.layout.work;
    let mut sum = linalg::zeros(work_dim * t);
    for fit in &report.fits {
        if matches!(fit.family, Family::ClockProp1 | Family::ClockProp2 | Family::GateProp) && fit.scalar > 0.0 {
            sum += linalg::scale(&fit.restricted, 1.0 / fit.scalar);
        }
    }
    let values = eigenvalues_dense(&sum)?;
    let mut expected: Vec<f64> = (0..t)
        .flat_map(|j| std::iter::repeat_n(1.0 - (std::f64::consts::PI * j as f64 / t as f64).cos(), work_dim))
        .collect();
    expected.sort_by(f64::total_cmp);
    Ok(values.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

pub(super) fn invariance_records(bundle: &HamiltonianBundle) -> Result<Vec<CheckRecord>, VerifyError> {
    let residual = check_invariance(bundle)?;
    Ok(vec![CheckRecord::at_most("invariance.residual", residual, INVARIANCE_TOLERANCE)
        .with_detail(format!("{} work x legal basis states", bundle.legal_basis().len()))])
}

pub(super) fn restriction_records(bundle: &HamiltonianBundle) -> Result<(Vec<CheckRecord>, Vec<FamilyFit>), VerifyError> {
    let report = check_restriction(bundle, &bundle.reference())?;
    let mut records = Vec::new();
    for fit in &report.fits {
        let expects_weight = !fit.family.is_clock_check();
        records.push(
            CheckRecord::at_most(format!("restriction.{}", fit.family), fit.deviation, RESTRICTION_TOLERANCE)
                .require(!expects_weight || fit.scalar > 0.0)
                .with_detail(format!("scalar {:.16e}", fit.scalar)),
        );
    }
    if bundle.kind() == ConstructionKind::ThreeLocal {
        records.push(CheckRecord::at_most("restriction.fitted", report.fitted_deviation, RESTRICTION_TOLERANCE));
    } else {
        let unit = report
            .fits
            .iter()
            .filter(|f| !f.family.is_clock_check())
            .map(|f| (f.scalar - 1.0).abs())
            .fold(0.0, f64::max);
        records.push(CheckRecord::at_most("restriction.unit_scalars", unit, UNIT_SCALAR_TOLERANCE));
        records.push(CheckRecord::at_most("restriction.entrywise", report.unit_deviation, RESTRICTION_TOLERANCE));
    }
    let spectrum = propagation_spectrum(bundle, &report)?;
    records.push(CheckRecord::at_most("restriction.propagation_spectrum", spectrum, 1e-10));
    Ok((records, report.fits))
}
