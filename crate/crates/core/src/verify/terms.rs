use crate::constructions::threelocal;
use crate::constructions::{ConstructionKind, HamiltonianBundle};
use crate::linalg::{self, DenseMatrix, C64};
use crate::spectral::{cluster_values, eig_dense, Multiset, CLUSTER_GAP};
use crate::tensorspace::{term_norm, Family, GroupId};

use super::{
    CheckRecord, VerifyError, EXCLUDED_STATE_BASELINE, INTEGER_TOLERANCE, KERNEL_TOLERANCE, PROJECTOR_TOLERANCE,
    PSD_TOLERANCE,
};

/// Eigenvalues below this count as kernel when splitting a positive operator.
const KERNEL_CUTOFF: f64 = 1e-8;

pub const GADGET_MULTISET: &str = "{0:7,1:4,2:3,3:2}";

#[derive(Clone, Debug, PartialEq)]
pub struct TermAuditRow {
    pub index: usize,
    pub family: Family,
    pub site: usize,
    pub locality: usize,
    pub claimed_projector: bool,
    /// `‖P² - P‖_F` of the block.
    pub projector_residual: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupAudit {
    pub id: GroupId,
    pub family: Family,
    pub site: usize,
    pub locality: usize,
    pub claimed_projector: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    pub projector_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermAudit {
    pub terms: Vec<TermAuditRow>,
    pub groups: Vec<GroupAudit>,
}

/// Projector residuals, norms and localities at term and clause-group level.
pub fn audit_terms(bundle: &HamiltonianBundle) -> Result<TermAudit, VerifyError> {
    let terms = bundle
        .terms
        .iter()
        .enumerate()
        .map(|(index, t)| TermAuditRow {
            index,
            family: t.family,
            site: t.site,
            locality: t.locality(),
            claimed_projector: t.claimed_projector,
            projector_residual: linalg::idempotency_residual(&t.block),
            norm: term_norm(t),
        })
        .collect();
    let mut groups = Vec::with_capacity(bundle.groups.len());
    for g in &bundle.groups {
        let block = bundle.group_block(g.id);
        let values = eig_dense(&block)?.values;
        groups.push(GroupAudit {
            id: g.id,
            family: g.family,
            site: g.site,
            locality: g.support.len(),
            claimed_projector: g.claimed_projector,
            min_eig: values[0],
            max_eig: *values.last().expect("nonempty block"),
            projector_residual: linalg::idempotency_residual(&block),
        });
    }
    Ok(TermAudit { terms, groups })
}

/// Projector onto the orthogonal complement of the kernel of a positive
/// operator, with its rank. The kernel of the result is checked to be the
/// kernel of the input.
pub fn positive_to_projector(block: &DenseMatrix) -> Result<(DenseMatrix, usize), VerifyError> {
    let eig = eig_dense(block)?;
    if eig.values[0] < -1e-10 {
        return Err(VerifyError::NegativeEigenvalue(eig.values[0]));
    }
    let vectors = eig.vectors.expect("dense solver returns vectors");
    let n = block.nrows();
    let mut projector = linalg::zeros(n);
    let mut kernel = Vec::new();
    let mut rank = 0;
    for (i, &value) in eig.values.iter().enumerate() {
        let v: Vec<C64> = vectors.column(i).iter().copied().collect();
        if value > KERNEL_CUTOFF {
            projector += linalg::projector(&v);
            rank += 1;
        } else {
            kernel.push(v);
        }
    }
    let leak = kernel
        .iter()
        .map(|v| linalg::vec_norm(&linalg::mat_vec(&projector, v)))
        .fold(0.0, f64::max);
    debug_assert!(leak < 1e-10, "kernel leaked into projector range: {leak:e}");
    Ok((projector, rank))
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt.
fn orthonormalize(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let p = linalg::inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * p;
                }
            }
        }
        let norm = linalg::vec_norm(&w);
        if norm > 1e-12 {
            out.push(w.iter().map(|x| x / norm).collect());
        }
    }
    out
}

fn span_projector(vectors: &[Vec<C64>], dim: usize) -> DenseMatrix {
    orthonormalize(vectors)
        .iter()
        .fold(linalg::zeros(dim), |acc, v| acc + linalg::projector(v))
}

/// Frobenius distance between the orthogonal projectors onto two spans.
pub fn subspace_distance(a: &[Vec<C64>], b: &[Vec<C64>], dim: usize) -> f64 {
    linalg::frobenius(&(span_projector(a, dim) - span_projector(b, dim)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadgetAudit {
    pub multiset: String,
    /// Largest distance of an eigenvalue from the nearest integer.
    pub integer_deviation: f64,
    pub kernel_distance: f64,
    pub kernel_dim: usize,
    pub excluded_energy: f64,
    pub projector_rank: usize,
}

/// Spectrum, kernel inventory and excluded-state energy of a four-qubit gadget.
pub fn gadget_audit(block: &DenseMatrix, expected_kernel: &[Vec<C64>], excluded: &[C64]) -> Result<GadgetAudit, VerifyError> {
    let eig = eig_dense(block)?;
    let clusters = cluster_values(&eig.values, CLUSTER_GAP);
    let integer_deviation = eig.values.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
    let vectors = eig.vectors.as_ref().expect("dense solver returns vectors");
    let kernel: Vec<Vec<C64>> = (0..block.nrows())
        .filter(|&i| eig.values[i].abs() <= KERNEL_CUTOFF)
        .map(|i| vectors.column(i).iter().copied().collect())
        .collect();
    let kernel_distance = subspace_distance(&kernel, expected_kernel, block.nrows());
    let excluded_energy = linalg::inner(excluded, &linalg::mat_vec(block, excluded)).re;
    let (_, projector_rank) = positive_to_projector(block)?;
    Ok(GadgetAudit {
        multiset: Multiset(&clusters).to_string(),
        integer_deviation,
        kernel_distance,
        kernel_dim: kernel.len(),
        excluded_energy,
        projector_rank,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct H4Audit {
    pub off_diagonal: f64,
    /// Largest distance of a diagonal entry from {0, 1}.
    pub integrality: f64,
    pub rank: usize,
    /// Bit strings `(d, r, s, c')` of the penalized configurations.
    pub support: Vec<String>,
}

impl H4Audit {
    pub const EXPECTED_SUPPORT: [&'static str; 4] = ["0110", "0111", "1000", "1111"];

    pub fn matches_expected(&self) -> bool {
        self.rank == 4 && self.support == Self::EXPECTED_SUPPORT
    }
}

pub fn h4_audit(block: &DenseMatrix) -> H4Audit {
    let n = block.nrows();
    let mut off_diagonal: f64 = 0.0;
    let mut integrality: f64 = 0.0;
    let mut support = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off_diagonal = off_diagonal.max(block[(i, j)].norm());
            }
        }
        let d = block[(i, i)];
        let rounded = d.re.round();
        integrality = integrality.max((d - C64::new(rounded.clamp(0.0, 1.0), 0.0)).norm());
        if (d.re - 1.0).abs() <= 1e-12 {
            support.push(format!("{i:04b}"));
        }
    }
    H4Audit { off_diagonal, integrality, rank: support.len(), support }
}

fn locality_limits(kind: ConstructionKind) -> (usize, usize) {
    match kind {
        ConstructionKind::Bravyi => (4, 4),
        ConstructionKind::Qutrit => (3, 3),
        _ => (3, 4),
    }
}

pub(super) fn term_records(bundle: &HamiltonianBundle) -> Result<Vec<CheckRecord>, VerifyError> {
    let audit = audit_terms(bundle)?;
    let kind = bundle.kind();
    let claimed: Vec<&TermAuditRow> = audit.terms.iter().filter(|t| t.claimed_projector).collect();
    let term_residual = claimed.iter().map(|t| t.projector_residual).fold(0.0, f64::max);
    let all_claimed = kind != ConstructionKind::Qutrit || claimed.len() == audit.terms.len();

    let claimed_groups: Vec<&GroupAudit> = audit.groups.iter().filter(|g| g.claimed_projector).collect();
    let group_residual = claimed_groups.iter().map(|g| g.projector_residual).fold(0.0, f64::max);
    let min_eig = audit.groups.iter().map(|g| g.min_eig).fold(f64::INFINITY, f64::min);
    let max_eig = audit.groups.iter().map(|g| g.max_eig).fold(0.0, f64::max);
    let (term_limit, group_limit) = locality_limits(kind);
    let term_locality = audit.terms.iter().map(|t| t.locality).max().unwrap_or(0);
    let group_locality = audit.groups.iter().map(|g| g.locality).max().unwrap_or(0);

    Ok(vec![
        CheckRecord::at_most("spectra.term_projectors", term_residual, PROJECTOR_TOLERANCE)
            .require(all_claimed)
            .with_detail(format!("{} of {} terms claimed as projectors", claimed.len(), audit.terms.len())),
        CheckRecord::at_most("spectra.group_projectors", group_residual, PROJECTOR_TOLERANCE)
            .with_detail(format!("{} of {} clause groups claimed as projectors", claimed_groups.len(), audit.groups.len())),
        CheckRecord::at_least("spectra.group_min_eigenvalue", min_eig, -PSD_TOLERANCE)
            .with_detail(format!("largest clause-group eigenvalue {max_eig:.12}")),
        CheckRecord::at_most("spectra.term_locality", term_locality as f64, term_limit as f64),
        CheckRecord::at_most("spectra.group_locality", group_locality as f64, group_limit as f64),
    ])
}

fn gadget_record(prefix: &str, audits: &[GadgetAudit], note: &str) -> Vec<CheckRecord> {
    let worst = |f: fn(&GadgetAudit) -> f64| audits.iter().map(f).fold(0.0, f64::max);
    let multisets_ok = audits.iter().all(|a| a.multiset == GADGET_MULTISET);
    let ranks_ok = audits.iter().all(|a| a.projector_rank == 9);
    let excluded = audits.iter().map(|a| a.excluded_energy).fold(f64::INFINITY, f64::min);
    let multiset = audits.first().map(|a| a.multiset.clone()).unwrap_or_default();
    vec![
        CheckRecord::at_most(format!("spectra.{prefix}_multiset"), worst(|a| a.integer_deviation), INTEGER_TOLERANCE)
            .require(multisets_ok)
            .with_detail(format!("{multiset} over {} group(s){note}", audits.len())),
        CheckRecord::at_most(format!("spectra.{prefix}_kernel"), worst(|a| a.kernel_distance), KERNEL_TOLERANCE)
            .with_detail(format!("kernel dimension {}", audits.first().map_or(0, |a| a.kernel_dim))),
        CheckRecord::at_least(format!("spectra.{prefix}_excluded"), excluded, EXCLUDED_STATE_BASELINE),
        CheckRecord::at_least(
            format!("spectra.{prefix}_projector_rank"),
            audits.iter().map(|a| a.projector_rank).min().unwrap_or(0) as f64,
            9.0,
        )
        .require(ranks_ok),
    ]
}

/// Clause-group blocks of `family`, or the standalone gadget if the bundle has none.
fn family_blocks(bundle: &HamiltonianBundle, family: Family, standalone: DenseMatrix) -> (Vec<DenseMatrix>, &'static str) {
    let blocks: Vec<DenseMatrix> = bundle.groups_of(family).map(|g| bundle.group_block(g.id)).collect();
    if blocks.is_empty() {
        (vec![standalone], " (standalone gadget, no instance in bundle)")
    } else {
        (blocks, "")
    }
}

pub(super) fn gadget_records(bundle: &HamiltonianBundle) -> Result<Vec<CheckRecord>, VerifyError> {
    let mut records = Vec::new();
    let specs = [
        (
            Family::ClockProp1,
            "clockprop1",
            threelocal::gadget_block(&threelocal::prop41_parts()),
            [threelocal::alpha_states(), threelocal::alpha_illegal_kernel()].concat(),
            threelocal::alpha_perp(),
        ),
        (
            Family::ClockProp2,
            "clockprop2",
            threelocal::gadget_block(&threelocal::prop42_parts()),
            [threelocal::beta_states(), threelocal::beta_illegal_kernel()].concat(),
            threelocal::beta_perp(),
        ),
    ];
    for (family, prefix, standalone, kernel, perp) in specs {
        let (blocks, note) = family_blocks(bundle, family, standalone);
        let audits = blocks
            .iter()
            .map(|b| gadget_audit(b, &kernel, &perp))
            .collect::<Result<Vec<_>, _>>()?;
        records.extend(gadget_record(prefix, &audits, note));
    }

    let (blocks, note) = family_blocks(bundle, Family::H4, threelocal::gadget_block(&threelocal::h4_parts()));
    let audits: Vec<H4Audit> = blocks.iter().map(h4_audit).collect();
    let worst = audits.iter().map(|a| a.off_diagonal.max(a.integrality)).fold(0.0, f64::max);
    let ok = audits.iter().all(H4Audit::matches_expected);
    records.push(
        CheckRecord::at_most("spectra.h4", worst, PROJECTOR_TOLERANCE)
            .require(ok)
            .with_detail(format!("rank {} on {:?}{note}", audits[0].rank, audits[0].support)),
    );
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_is_fixed_point() {
        let p = linalg::projector(&linalg::combine(&linalg::ket(2, 0), 0.6, &linalg::ket(2, 1), 0.8));
        let (q, rank) = positive_to_projector(&p).unwrap();
        assert_eq!(rank, 1);
        assert!(linalg::max_abs_diff(&p, &q) < 1e-14);
    }

    #[test]
    fn scaling_is_removed() {
        let m = linalg::scale(&linalg::basis_projector(4, 3), 2.0);
        let (q, rank) = positive_to_projector(&m).unwrap();
        assert_eq!(rank, 1);
        assert!(linalg::max_abs_diff(&q, &linalg::basis_projector(4, 3)) < 1e-14);
    }

    #[test]
    fn prop41_projector_has_rank_nine() {
        let (q, rank) = positive_to_projector(&threelocal::gadget_block(&threelocal::prop41_parts())).unwrap();
        assert_eq!(rank, 9);
        assert!(linalg::idempotency_residual(&q) < 1e-12);
    }

    #[test]
    fn negative_operator_is_rejected() {
        let m = linalg::diag(&[-1.0, 1.0]);
        assert!(matches!(positive_to_projector(&m), Err(VerifyError::NegativeEigenvalue(_))));
    }

    #[test]
    fn h4_gadget_is_rank_four_diagonal_projector() {
        let audit = h4_audit(&threelocal::gadget_block(&threelocal::h4_parts()));
        assert!(audit.matches_expected(), "{audit:?}");
        assert_eq!(audit.off_diagonal, 0.0);
    }

    #[test]
    fn subspace_distance_basics() {
        let a = vec![linalg::ket(2, 0)];
        let b = vec![linalg::combine(&linalg::ket(2, 0), 2.0, &linalg::ket(2, 1), 0.0)];
        assert!(subspace_distance(&a, &b, 2) < 1e-15);
        let d = subspace_distance(&a, &[linalg::ket(2, 1)], 2);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }
}
