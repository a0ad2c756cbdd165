//! Finite-element spectra of realized domains and their discrete
//! transplantation.

mod assemble;
mod mesh;
mod solve;

use nalgebra::{DMatrix, DVector, Point2};
use serde::Serialize;

pub use assemble::{assemble, element_matrices, Assembly};
pub use mesh::{refine, refine_unchecked, Lattice, Mesh};
pub use solve::{mesh_spectrum, solve_smallest, solve_smallest_iterative, Spectrum, DEFAULT_TOLERANCE, DENSE_LIMIT};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tiling::{BoundaryCondition, TransplantMap};

/// Default relative gap separating eigenvalue clusters.
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumComparison {
    pub count: usize,
    pub gaps: Vec<f64>,
    pub max_rel_gap: f64,
    pub rel_tol: f64,
    pub passed: bool,
}

/// Relative gaps `|λᴸ − λᴿ| / max(|λᴸ|, |λᴿ|)` over the first `count`
/// eigenvalues. Magnitudes are floored at `1e-3` of the largest compared
/// eigenvalue so that a Neumann zero mode is measured against the scale of
/// the spectrum rather than against itself.
pub fn compare_spectra<R: Real>(left: &Spectrum<R>, right: &Spectrum<R>, count: usize, rel_tol: f64) -> Result<SpectrumComparison> {
    if left.bc != right.bc {
        return Err(Error::IncomparableSpectra(format!("{} vs {} conditions", left.bc, right.bc)));
    }
    if left.level != right.level {
        return Err(Error::IncomparableSpectra(format!("levels {} and {}", left.level, right.level)));
    }
    let count = count.min(left.len()).min(right.len());
    let top = left.eigenvalues[..count].iter().chain(&right.eigenvalues[..count]).map(|x| x.as_f64().abs()).fold(0.0, f64::max);
    let floor = 1e-3 * top;
    let gaps: Vec<f64> = (0..count)
        .map(|k| {
            let (a, b) = (left.eigenvalues[k].as_f64(), right.eigenvalues[k].as_f64());
            let scale = a.abs().max(b.abs()).max(floor);
            if scale > 0.0 { (a - b).abs() / scale } else { 0.0 }
        })
        .collect();
    let max_rel_gap = gaps.iter().copied().fold(0.0, f64::max);
    Ok(SpectrumComparison { count, gaps, max_rel_gap, rel_tol, passed: max_rel_gap <= rel_tol })
}

/// Carries a nodal vector on the left mesh to the right mesh: the value at a
/// lattice point of right tile `r` is `Σₗ T[r,l]` times the value at the same
/// lattice point of left tile `l`.
///
/// Nodes shared by several right tiles must receive one value, and under
/// Dirichlet conditions boundary nodes must receive zero; a mismatch beyond
/// `1e-9·max|u|` is a [`Error::SeamViolation`].
pub fn transplant_nodal<R: Real>(
    coefficients: &DMatrix<R>,
    bc: BoundaryCondition,
    left: &Mesh<R>,
    right: &Mesh<R>,
    u: &DVector<R>,
) -> Result<DVector<R>> {
    let n = coefficients.nrows();
    if left.level != right.level || left.tile_count() != n || right.tile_count() != n || coefficients.ncols() != n {
        return Err(Error::IncomparableSpectra("meshes do not match the map".into()));
    }
    let scale = u.amax();
    let tol = R::lit(1e-9).max(R::eps() * R::lit(64.0)) * scale;
    let per = left.lattice().len();
    let mut out = DVector::zeros(right.node_count());
    let mut seen = vec![false; right.node_count()];
    for r in 0..n {
        for p in 0..per {
            let mut value = R::zero();
            for l in 0..n {
                let c = coefficients[(r, l)];
                if c != R::zero() {
                    value += c * u[left.tile_nodes[l][p]];
                }
            }
            let node = right.tile_nodes[r][p];
            let pinned = bc == BoundaryCondition::Dirichlet && right.boundary[node];
            let reference = if pinned { Some(R::zero()) } else if seen[node] { Some(out[node]) } else { None };
            if let Some(expected) = reference {
                let gap = (value - expected).abs();
                if gap > tol {
                    return Err(Error::SeamViolation { node, gap: gap.as_f64() });
                }
            } else {
                out[node] = value;
            }
            seen[node] = true;
        }
    }
    Ok(out)
}

/// [`transplant_nodal`] for an integer transplantation matrix.
pub fn transplant_discrete<R: Real>(t: &TransplantMap, left: &Mesh<R>, right: &Mesh<R>, u: &DVector<R>) -> Result<DVector<R>> {
    transplant_nodal(&DMatrix::<R>::from(t), t.bc(), left, right, u)
}

/// One group of numerically equal eigenvalues and `Σ u(p)²` over it.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterMeasure {
    pub mean: f64,
    pub size: usize,
    pub measure: f64,
    /// False for the last cluster, which may continue past the computed range.
    pub complete: bool,
}

/// Index ranges of eigenvalue clusters: a new cluster starts when the
/// relative gap to its predecessor exceeds `rel_gap`.
pub fn clusters<R: Real>(eigenvalues: &[R], rel_gap: f64) -> Vec<std::ops::Range<usize>> {
    let vals: Vec<f64> = eigenvalues.iter().map(|x| x.as_f64()).collect();
    let floor = 1e-6 * vals.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=vals.len() {
        if k == vals.len() || vals[k] - vals[k - 1] > rel_gap * vals[k].abs().max(floor) {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Per-cluster sum of squared values at mesh node `node`.
pub fn point_measure<R: Real>(s: &Spectrum<R>, node: usize, rel_gap: f64) -> Result<Vec<ClusterMeasure>> {
    let vectors = s.eigenvectors.as_ref().ok_or(Error::PointNotInMesh)?;
    if node >= vectors.nrows() {
        return Err(Error::PointNotInMesh);
    }
    let groups = clusters(&s.eigenvalues, rel_gap);
    let last = groups.len().saturating_sub(1);
    Ok(groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let mean = g.clone().map(|k| s.eigenvalues[k].as_f64()).sum::<f64>() / g.len() as f64;
            let measure = g.clone().map(|k| vectors[(node, k)].as_f64().powi(2)).sum();
            ClusterMeasure { mean, size: g.len(), measure, complete: i < last }
        })
        .collect())
}

/// [`point_measure`] at the mesh vertex located at `p`.
pub fn point_measure_at<R: Real>(s: &Spectrum<R>, mesh: &Mesh<R>, p: &Point2<R>, rel_gap: f64) -> Result<Vec<ClusterMeasure>> {
    let extent = mesh.vertices.iter().fold(R::zero(), |a, v| a.max(v.coords.amax()));
    let tol = R::lit(1e-9) * (R::one() + extent);
    let node = mesh
        .vertices
        .iter()
        .position(|v| (v - p).norm() <= tol)
        .ok_or(Error::PointNotInMesh)?;
    point_measure(s, node, rel_gap)
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureComparison {
    pub clusters: usize,
    pub rel_diffs: Vec<f64>,
    pub max_rel_diff: f64,
    pub rel_tol: f64,
    pub passed: bool,
}

/// Compares the first `count` complete clusters. Measures are taken
/// relative to their size, with `1e-9` of the largest measure as a floor so
/// that clusters vanishing on both sides compare equal.
pub fn compare_point_measures(left: &[ClusterMeasure], right: &[ClusterMeasure], count: usize, rel_tol: f64) -> MeasureComparison {
    let usable = |m: &[ClusterMeasure]| m.iter().filter(|c| c.complete).count();
    let clusters = count.min(usable(left)).min(usable(right));
    let floor = 1e-9 * left.iter().chain(right).map(|c| c.measure).fold(0.0, f64::max);
    let mut rel_diffs = Vec::with_capacity(clusters);
    let mut passed = clusters == count;
    for k in 0..clusters {
        let (a, b) = (&left[k], &right[k]);
        let mean_gap = (a.mean - b.mean).abs() / a.mean.abs().max(b.mean.abs()).max(f64::MIN_POSITIVE);
        passed &= a.size == b.size && mean_gap <= 1e-6;
        let scale = a.measure.max(b.measure).max(floor);
        rel_diffs.push(if scale > 0.0 { (a.measure - b.measure).abs() / scale } else { 0.0 });
    }
    let max_rel_diff = rel_diffs.iter().copied().fold(0.0, f64::max);
    MeasureComparison { clusters, rel_diffs, max_rel_diff, rel_tol, passed: passed && max_rel_diff <= rel_tol }
}
