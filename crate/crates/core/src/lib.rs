//! Isospectral and homophonic drums built from reflected triangles.
//!
//! A pair is given by three involutions in two permutation actions of one
//! group. [`catalog`] holds the seventeen known pairs, [`permgroup`] checks the
//! group-theoretic certificate, [`tiling`] derives transplantation maps,
//! [`geometry`] lays the tilings out in the plane and [`spectral`] compares
//! finite-element spectra. [`verify`] bundles the combinatorial checks.

pub mod catalog;
pub mod error;
pub mod geometry;
pub mod permgroup;
pub mod scalar;
pub mod spectral;
pub mod tiling;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Rational, Real};

pub type Triangle = geometry::BaseTriangle<f64>;
pub type Triangle32 = geometry::BaseTriangle<f32>;
pub type Domain = geometry::PlanarDomain<f64>;
pub type Domain32 = geometry::PlanarDomain<f32>;
pub type TriMesh = spectral::Mesh<f64>;
pub type TriMesh32 = spectral::Mesh<f32>;
pub type Eigenpairs = spectral::Spectrum<f64>;
pub type Eigenpairs32 = spectral::Spectrum<f32>;
