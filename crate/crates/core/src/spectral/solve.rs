use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CscMatrix, CsrMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::assemble::{to_dense, Assembly};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tiling::BoundaryCondition;

/// Largest dimension handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 3000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MAX_ITERATIONS: usize = 2000;

/// Smallest eigenpairs of a Laplacian pencil.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "R: Serialize"))]
pub struct Spectrum<R: Real> {
    pub eigenvalues: Vec<R>,
    pub residuals: Vec<R>,
    pub bc: BoundaryCondition,
    pub level: u32,
    /// Columns are `M`-orthonormal nodal vectors, zero on Dirichlet nodes.
    #[serde(skip)]
    pub eigenvectors: Option<DMatrix<R>>,
}

impl<R: Real> Spectrum<R> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Option<DVector<R>> {
        self.eigenvectors.as_ref().map(|v| v.column(k).into_owned())
    }

    pub fn without_vectors(mut self) -> Self {
        self.eigenvectors = None;
        self
    }
}

/// The `count` smallest eigenvalues of `K u = λ M u`, dense below
/// [`DENSE_LIMIT`] and by shift-invert subspace iteration above.
pub fn solve_smallest<R: Real>(asm: &Assembly<R>, count: usize, tol: R) -> Result<Spectrum<R>> {
    let n = asm.dim();
    let count = count.min(n);
    let (values, vectors) = if count == 0 {
        (Vec::new(), DMatrix::zeros(n, 0))
    } else if n <= DENSE_LIMIT {
        dense(&asm.stiffness, &asm.mass, count)?
    } else {
        subspace_iteration(asm, count, tol)?
    };
    let spectrum = package(asm, values, &vectors);
    if spectrum.residuals.iter().any(|&r| r > tol) {
        return Err(Error::SolverDidNotConverge { iterations: 0 });
    }
    Ok(spectrum)
}

fn package<R: Real>(asm: &Assembly<R>, values: Vec<R>, vectors: &DMatrix<R>) -> Spectrum<R> {
    let count = values.len();
    let mut eigenvectors = DMatrix::zeros(asm.node_count, count);
    let mut residuals = Vec::with_capacity(count);
    for k in 0..count {
        let full = asm.expand(&vectors.column(k).into_owned());
        residuals.push(asm.residual(&full, values[k]));
        eigenvectors.set_column(k, &full);
    }
    Spectrum { eigenvalues: values, residuals, bc: asm.bc, level: asm.level, eigenvectors: Some(eigenvectors) }
}

/// `(K, M)` reduced to a standard problem by the Cholesky factor of `M`.
fn dense<R: Real>(k: &CsrMatrix<R>, m: &CsrMatrix<R>, count: usize) -> Result<(Vec<R>, DMatrix<R>)> {
    let kd = to_dense(k);
    let md = to_dense(m);
    let (values, y, l) = reduced_eigen(kd, md)?;
    let mut x = y.columns(0, count).into_owned();
    l.tr_solve_lower_triangular_mut(&mut x);
    Ok((values[..count].to_vec(), x))
}

/// Eigen-decomposition of `L⁻¹KL⁻ᵀ`, sorted ascending, with `L`.
fn reduced_eigen<R: Real>(k: DMatrix<R>, m: DMatrix<R>) -> Result<(Vec<R>, DMatrix<R>, DMatrix<R>)> {
    let l = Cholesky::new(m).ok_or(Error::SolverDidNotConverge { iterations: 0 })?.unpack();
    let mut y = k;
    l.solve_lower_triangular_mut(&mut y);
    let mut c = y.transpose();
    l.solve_lower_triangular_mut(&mut c);
    let c = (&c + c.transpose()) * R::lit(0.5);
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok((values, vectors, l))
}

fn subspace_iteration<R: Real>(asm: &Assembly<R>, count: usize, tol: R) -> Result<(Vec<R>, DMatrix<R>)> {
    let n = asm.dim();
    let block = (2 * count).max(count + 8).min(n);
    let k = &asm.stiffness;
    let m = &asm.mass;
    // K + σM is positive definite for σ > 0, also for the Neumann kernel.
    let trace_k: R = k.diagonal_as_csr().values().iter().copied().fold(R::zero(), |a, b| a + b);
    let trace_m: R = m.diagonal_as_csr().values().iter().copied().fold(R::zero(), |a, b| a + b);
    let sigma = trace_k / trace_m * R::lit(1e-4);
    let shifted = k + &(m * sigma);
    let factor = CscCholesky::factor(&CscMatrix::from(&shifted)).map_err(|_| Error::SolverDidNotConverge { iterations: 0 })?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DMatrix::from_fn(n, block, |_, _| R::lit(rng.random::<f64>() - 0.5));
    for it in 1..=MAX_ITERATIONS {
        let mx = m * &x;
        x = factor.solve(&mx);
        for mut col in x.column_iter_mut() {
            let norm = col.norm();
            col /= norm;
        }
        let kr = x.transpose() * (k * &x);
        let mr = x.transpose() * (m * &x);
        let (values, y, l) = reduced_eigen((&kr + kr.transpose()) * R::lit(0.5), (&mr + mr.transpose()) * R::lit(0.5))?;
        let mut q = y;
        l.tr_solve_lower_triangular_mut(&mut q);
        x = &x * q;
        let kx = k * &x;
        let mx = m * &x;
        let converged = (0..count).all(|j| {
            let r = kx.column(j) - mx.column(j) * values[j];
            r.norm() <= tol * R::lit(0.1) * mx.column(j).norm()
        });
        if converged {
            return Ok((values[..count].to_vec(), x.columns(0, count).into_owned()));
        }
        if it == MAX_ITERATIONS {
            break;
        }
    }
    Err(Error::SolverDidNotConverge { iterations: MAX_ITERATIONS })
}

/// Assembles and solves in one step.
pub fn mesh_spectrum<R: Real>(mesh: &super::Mesh<R>, bc: BoundaryCondition, count: usize, tol: R) -> Result<Spectrum<R>> {
    solve_smallest(&super::assemble(mesh, bc)?, count, tol)
}

/// Forces the iterative path; for testing against the dense solver.
pub fn solve_smallest_iterative<R: Real>(asm: &Assembly<R>, count: usize, tol: R) -> Result<Spectrum<R>> {
    let count = count.min(asm.dim());
    let (values, vectors) = subspace_iteration(asm, count, tol)?;
    Ok(package(asm, values, &vectors))
}
