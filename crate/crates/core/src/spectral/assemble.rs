use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use super::Mesh;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tiling::BoundaryCondition;

/// Stiffness and mass matrices over the free nodes.
#[derive(Clone, Debug)]
pub struct Assembly<R: Real> {
    pub stiffness: CsrMatrix<R>,
    pub mass: CsrMatrix<R>,
    /// Mesh node of each degree of freedom.
    pub dofs: Vec<usize>,
    pub node_count: usize,
    pub bc: BoundaryCondition,
    pub level: u32,
}

/// Element matrices of the piecewise-linear basis on one triangle.
pub fn element_matrices<R: Real>(p: [nalgebra::Point2<R>; 3]) -> Option<([[R; 3]; 3], [[R; 3]; 3])> {
    let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
    let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
    let twice = (b[0] * c[1] - b[1] * c[0]).abs();
    let diam2 = (0..3).map(|k| (p[k] - p[(k + 1) % 3]).norm_squared()).fold(R::zero(), |a, x| a.max(x));
    if twice <= R::eps() * R::lit(16.0) * diam2 {
        return None;
    }
    let area = twice / R::lit(2.0);
    let four_area = twice + twice;
    let mut k = [[R::zero(); 3]; 3];
    let mut m = [[R::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / four_area;
            m[i][j] = area / R::lit(if i == j { 6.0 } else { 12.0 });
        }
    }
    Some((k, m))
}

/// Assembles the Laplacian pencil. Dirichlet drops the boundary nodes.
pub fn assemble<R: Real>(mesh: &Mesh<R>, bc: BoundaryCondition) -> Result<Assembly<R>> {
    let nodes = mesh.node_count();
    let mut dof_of = vec![None; nodes];
    let mut dofs = Vec::new();
    for v in 0..nodes {
        if bc == BoundaryCondition::Neumann || !mesh.boundary[v] {
            dof_of[v] = Some(dofs.len());
            dofs.push(v);
        }
    }
    let n = dofs.len();
    let mut k_coo = CooMatrix::new(n, n);
    let mut m_coo = CooMatrix::new(n, n);
    for (e, tri) in mesh.triangles.iter().enumerate() {
        let (ke, me) = element_matrices(tri.map(|v| mesh.vertices[v])).ok_or(Error::DegenerateElement(e))?;
        for i in 0..3 {
            let Some(di) = dof_of[tri[i]] else { continue };
            for j in 0..3 {
                let Some(dj) = dof_of[tri[j]] else { continue };
                k_coo.push(di, dj, ke[i][j]);
                m_coo.push(di, dj, me[i][j]);
            }
        }
    }
    Ok(Assembly {
        stiffness: CsrMatrix::from(&k_coo),
        mass: CsrMatrix::from(&m_coo),
        dofs,
        node_count: nodes,
        bc,
        level: mesh.level,
    })
}

pub(crate) fn to_dense<R: Real>(a: &CsrMatrix<R>) -> DMatrix<R> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] += *v;
    }
    d
}

pub(crate) fn spmv<R: Real>(a: &CsrMatrix<R>, x: &DVector<R>) -> DVector<R> {
    let mut y = DVector::zeros(a.nrows());
    for (i, row) in a.row_iter().enumerate() {
        let mut s = R::zero();
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            s += v * x[j];
        }
        y[i] = s;
    }
    y
}

impl<R: Real> Assembly<R> {
    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    /// Nodal vector from values on the free nodes, zero elsewhere.
    pub fn expand(&self, x: &DVector<R>) -> DVector<R> {
        let mut full = DVector::zeros(self.node_count);
        for (k, &v) in self.dofs.iter().enumerate() {
            full[v] = x[k];
        }
        full
    }

    pub fn restrict(&self, full: &DVector<R>) -> DVector<R> {
        DVector::from_iterator(self.dofs.len(), self.dofs.iter().map(|&v| full[v]))
    }

    pub fn stiffness_dense(&self) -> DMatrix<R> {
        to_dense(&self.stiffness)
    }

    pub fn mass_dense(&self) -> DMatrix<R> {
        to_dense(&self.mass)
    }

    /// `‖Ku − λMu‖₂ / ‖Mu‖₂` for a nodal vector `u`.
    pub fn residual(&self, full: &DVector<R>, lambda: R) -> R {
        let x = self.restrict(full);
        let mx = spmv(&self.mass, &x);
        let r = spmv(&self.stiffness, &x) - &mx * lambda;
        let denom = mx.norm();
        if denom > R::zero() {
            r.norm() / denom
        } else {
            r.norm()
        }
    }

    /// `uᵀMv` for nodal vectors.
    pub fn mass_inner(&self, u: &DVector<R>, v: &DVector<R>) -> R {
        spmv(&self.mass, &self.restrict(v)).dot(&self.restrict(u))
    }
}
