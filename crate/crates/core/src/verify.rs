//! All combinatorial checks for one catalog pair, collected into a report.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::catalog::ExampleSpec;
use crate::error::{Error, Result};
use crate::permgroup::{check_crosscap_identity, kernel_is_nonorientable, sunada_check, CrosscapCheck, SunadaCertificate};
use crate::tiling::{
    build_tiling, combine, derive_minimal, norm_preserving_coefficients, norm_preserving_system, quotient_signature,
    special_value_multiplier, BoundaryCondition, NormPreservingPair, Tiling, TransplantMap,
};

#[derive(Clone, Debug, Serialize)]
pub struct SignatureCheck {
    pub left: String,
    pub right: String,
    pub expected_left: String,
    pub expected_right: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransplantCheck {
    pub bc: BoundaryCondition,
    pub seed_right_tile: usize,
    pub seed_left_label: usize,
    pub stencil: usize,
    pub seed_row: String,
    pub determinant: i128,
    pub intertwines: bool,
    pub complement_stencil: Option<usize>,
    pub complement_determinant: Option<i128>,
    pub complement_intertwines: Option<bool>,
    /// `det(a·T + b·T′)` is nonzero at a few sampled `a ≠ b`.
    pub combinations_nonsingular: bool,
    pub matrix: Vec<Vec<i64>>,
}

impl TransplantCheck {
    pub fn holds(&self) -> bool {
        self.intertwines
            && self.determinant != 0
            && self.complement_intertwines != Some(false)
            && self.complement_determinant != Some(0)
            && self.combinations_nonsingular
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientCheck {
    pub system: String,
    pub solutions: Vec<NormPreservingPair>,
    pub max_orthogonality_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinedMultiplier {
    pub a: f64,
    pub b: f64,
    /// `μ·a + μ′·b`; ±1 makes the normalized map preserve the special value.
    pub multiplier: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomophonicCheck {
    pub multiplier: i64,
    pub complement_multiplier: i64,
    pub combined: Vec<CombinedMultiplier>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub id: String,
    pub degree: usize,
    pub group_order: usize,
    pub sunada: SunadaCertificate,
    pub crosscaps: CrosscapCheck,
    pub nonorientable_kernel: bool,
    pub signatures: SignatureCheck,
    pub transplants: Vec<TransplantCheck>,
    pub coefficients: Option<CoefficientCheck>,
    pub homophonic: Option<HomophonicCheck>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Tolerance on `(aT + bT′)ᵀ(aT + bT′) = I`.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

fn nonsingular_combinations(t: &TransplantMap, c: &TransplantMap) -> bool {
    [(1.0, 2.0), (2.0, -1.0), (3.0, 1.0), (1.0, -3.0), (-2.0, 5.0)].iter().all(|&(a, b)| {
        let m: DMatrix<f64> = combine(a, t, b, c);
        m.lu().determinant().abs() > 1e-9
    })
}

fn transplant_check(left: &Tiling, right: &Tiling, bc: BoundaryCondition) -> Result<(TransplantCheck, TransplantMap, Option<TransplantMap>)> {
    let (seed, t) = derive_minimal(left, right, bc)?;
    let complement = t.complement().ok().filter(|c| c.stencil() > 0);
    let check = TransplantCheck {
        bc,
        seed_right_tile: seed.right_tile,
        seed_left_label: seed.left_label,
        stencil: t.stencil(),
        seed_row: t.row_expression(seed.right_tile),
        determinant: t.determinant(),
        intertwines: t.intertwines(left, right),
        complement_stencil: complement.as_ref().map(|c| c.stencil()),
        complement_determinant: complement.as_ref().map(|c| c.determinant()),
        complement_intertwines: complement.as_ref().map(|c| c.intertwines(left, right)),
        combinations_nonsingular: complement.as_ref().is_none_or(|c| nonsingular_combinations(&t, c)),
        matrix: t.matrix().row_iter().map(|r| r.iter().copied().collect()).collect(),
    };
    Ok((check, t, complement))
}

/// Special-value multipliers at the single six-fold interior vertex, with
/// the map oriented so that its own multiplier is positive.
fn homophonic_check(
    left: &Tiling,
    right: &Tiling,
    t: &TransplantMap,
    c: &TransplantMap,
    solutions: &[NormPreservingPair],
) -> Result<Option<HomophonicCheck>> {
    let (pl, pr) = (left.interior_cycles(), right.interior_cycles());
    if pl.len() != 1 || pr.len() != 1 {
        return Ok(None);
    }
    let mu = special_value_multiplier(t, left, right, &pl[0], &pr[0])?;
    let nu = special_value_multiplier(c, left, right, &pl[0], &pr[0])?;
    let (mu, nu) = if mu < 0 { (-mu, -nu) } else { (mu, nu) };
    let combined: Vec<CombinedMultiplier> = solutions
        .iter()
        .map(|s| CombinedMultiplier { a: s.a, b: s.b, multiplier: mu as f64 * s.a + nu as f64 * s.b })
        .collect();
    let holds = !combined.is_empty() && combined.iter().all(|m| (m.multiplier.abs() - 1.0).abs() <= 1e-12);
    Ok(Some(HomophonicCheck { multiplier: mu, complement_multiplier: nu, combined, holds }))
}

/// Runs every combinatorial check on one pair.
pub fn verify_pair(spec: &ExampleSpec) -> Result<PairReport> {
    let mut failures = Vec::new();
    let sunada = match sunada_check(&spec.left, &spec.right) {
        Ok(s) => s,
        Err(Error::NotSameGroup { word }) => return Err(Error::NotSameGroup { word }),
        Err(e) => return Err(e),
    };
    if !sunada.holds {
        failures.push("fixed-point counts differ".to_string());
    }
    let crosscaps = check_crosscap_identity(spec)?;
    if !crosscaps.kernel_identity {
        failures.push(format!(
            "|G|·χ(G₀) = {} but the tabulated ×^{} needs {}",
            crosscaps.kernel_chi, spec.crosscap_count, crosscaps.expected_kernel_chi
        ));
    }
    if !crosscaps.cover_identity {
        failures.push("n·χ(G₀) differs from the quotient characteristics".to_string());
    }
    let nonorientable_kernel = kernel_is_nonorientable(&spec.left)?;
    if !nonorientable_kernel {
        failures.push("kernel is orientable".to_string());
    }

    let left = build_tiling(&spec.left)?;
    let right = build_tiling(&spec.right)?;
    let sl = quotient_signature(&left, &spec.signature_g0)?;
    let sr = quotient_signature(&right, &spec.signature_g0)?;
    let matches = sl.equivalent(&spec.signature_a0) && sr.equivalent(&spec.signature_b0);
    if !matches {
        failures.push(format!("quotient signatures {sl}, {sr}"));
    }
    let signatures = SignatureCheck {
        left: sl.to_string(),
        right: sr.to_string(),
        expected_left: spec.signature_a0.to_string(),
        expected_right: spec.signature_b0.to_string(),
        matches,
    };

    let mut transplants = Vec::new();
    let mut dirichlet = None;
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        match transplant_check(&left, &right, bc) {
            Ok((check, t, c)) => {
                if !check.holds() {
                    failures.push(format!("{bc} transplantation check failed"));
                }
                if bc == BoundaryCondition::Dirichlet {
                    dirichlet = Some((t, c));
                }
                transplants.push(check);
            }
            Err(e) => failures.push(format!("{bc}: {e}")),
        }
    }

    let mut coefficients = None;
    let mut homophonic = None;
    if let Some((t, Some(c))) = &dirichlet {
        match norm_preserving_coefficients(t, c) {
            Ok(solutions) => {
                let max_orthogonality_error = solutions.iter().map(|s| s.orthogonality_error).fold(0.0, f64::max);
                if max_orthogonality_error > ORTHOGONALITY_TOLERANCE {
                    failures.push(format!("norm-preserving combination off by {max_orthogonality_error:e}"));
                }
                homophonic = homophonic_check(&left, &right, t, c, &solutions)?;
                if homophonic.as_ref().is_some_and(|h| !h.holds) {
                    failures.push("special values are not preserved".to_string());
                }
                coefficients = Some(CoefficientCheck {
                    system: norm_preserving_system(t, c)?.to_string(),
                    solutions,
                    max_orthogonality_error,
                });
            }
            Err(Error::NotReducible | Error::NoSolution) => {}
            Err(e) => return Err(e),
        }
    }

    Ok(PairReport {
        id: spec.id.clone(),
        degree: spec.degree,
        group_order: sunada.order,
        sunada,
        crosscaps,
        nonorientable_kernel,
        signatures,
        transplants,
        coefficients,
        homophonic,
        passed: failures.is_empty(),
        failures,
    })
}
