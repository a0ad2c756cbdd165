use std::f64::consts::PI;

use drumkit::catalog::find;
use drumkit::geometry::{default_pose, realize, unit_square, warped_triangle, BaseTriangle, RigidMotion};
use drumkit::spectral::*;
use drumkit::tiling::{build_tiling, combine, derive_minimal, norm_preserving_coefficients, BoundaryCondition, Tiling};
use drumkit::{Error, TriMesh};
use nalgebra::{DMatrix, DVector, Point2, Vector2};
use proptest::prelude::*;

const D: BoundaryCondition = BoundaryCondition::Dirichlet;
const N: BoundaryCondition = BoundaryCondition::Neumann;

fn meshes(id: &str, tri: &BaseTriangle<f64>, level: u32) -> (Tiling, Tiling, TriMesh, TriMesh) {
    let ex = find(id).unwrap();
    let (l, r) = (build_tiling(&ex.left).unwrap(), build_tiling(&ex.right).unwrap());
    let ml = refine(&realize(&l, tri, &default_pose()).unwrap(), &l, level).unwrap();
    let mr = refine(&realize(&r, tri, &default_pose()).unwrap(), &r, level).unwrap();
    (l, r, ml, mr)
}

fn warped() -> BaseTriangle<f64> {
    BaseTriangle::new([0.9, 1.1, PI - 2.0], 1.0).unwrap()
}

#[test]
fn propeller_mesh_counts() {
    let (l, _, _, _) = meshes("7_1", &warped(), 0);
    let d = realize(&l, &warped(), &default_pose()).unwrap();
    let m0 = refine(&d, &l, 0).unwrap();
    assert_eq!(m0.triangles.len(), 7);
    // Euler: V − E + F = 1 for a disk; the propeller has 15 edges.
    assert_eq!(m0.edges().len(), 15);
    assert_eq!(m0.node_count(), 9);
    let mut prev = m0;
    for r in 1..=3 {
        let m = refine(&d, &l, r).unwrap();
        assert_eq!(m.triangles.len(), 7 * 4usize.pow(r));
        assert_eq!(m.node_count(), prev.node_count() + prev.edges().len());
        for (&(a, b), &count) in &m.edges() {
            let on_boundary = m.boundary[a] && m.boundary[b] && count == 1;
            assert!(count == 2 || on_boundary, "edge {a}-{b} used {count} times");
        }
        prev = m;
    }
    assert!(prev.to_off().starts_with("OFF\n"));
}

#[test]
fn overlapping_domain_is_refused() {
    let ex = find("13_6").unwrap();
    let l = build_tiling(&ex.left).unwrap();
    let d = realize(&l, &BaseTriangle::equilateral(1.0), &default_pose()).unwrap();
    assert!(matches!(refine(&d, &l, 1), Err(Error::RefusedOverlappingDomain)));
}

#[test]
fn single_element_assembly() {
    let m = Mesh::from_raw(
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        vec![[0, 1, 2]],
        vec![true; 3],
    );
    let a = assemble(&m, N).unwrap();
    let k = a.stiffness_dense();
    let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 1.0, 0.0, -1.0, 0.0, 1.0]) * 0.5;
    assert!((k - expected).amax() < 1e-15);
    assert_eq!(assemble(&m, D).unwrap().dim(), 0);
    let flat = Mesh::from_raw(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)], vec![[0, 1, 2]], vec![true; 3]);
    assert!(matches!(assemble(&flat, N), Err(Error::DegenerateElement(0))));
}

#[test]
fn mass_and_kernel() {
    let (_, _, ml, _) = meshes("7_1", &warped(), 2);
    let a = assemble(&ml, N).unwrap();
    let ones = DVector::from_element(a.dim(), 1.0);
    let total: f64 = (a.mass_dense() * &ones).sum();
    let area = 7.0 * warped().area();
    assert!((total - area).abs() < 1e-12 * area);
    assert!((a.stiffness_dense() * &ones).amax() < 1e-12);
    assert!(nalgebra::Cholesky::new(a.mass_dense()).is_some());
}

#[test]
fn unit_square_converges_from_above() {
    let (t, d) = unit_square::<f64>();
    let exact = 2.0 * PI * PI;
    let mut prev = f64::INFINITY;
    for r in 1..=4 {
        let s = mesh_spectrum(&refine(&d, &t, r).unwrap(), D, 1, 1e-9).unwrap();
        let lam = s.eigenvalues[0];
        assert!(lam > exact && lam < prev, "r={r}: {lam}");
        prev = lam;
    }
    assert!((prev - exact) / exact < 0.01);
    let s = mesh_spectrum(&refine(&d, &t, 3).unwrap(), N, 4, 1e-9).unwrap();
    assert!(s.eigenvalues[0].abs() < 1e-9);
    assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn galerkin_monotonicity_on_propeller() {
    let ex = find("7_1").unwrap();
    let l = build_tiling(&ex.left).unwrap();
    let d = realize(&l, &warped(), &default_pose()).unwrap();
    let s2 = mesh_spectrum(&refine(&d, &l, 2).unwrap(), D, 10, 1e-9).unwrap();
    let s3 = mesh_spectrum(&refine(&d, &l, 3).unwrap(), D, 10, 1e-9).unwrap();
    for (a, b) in s3.eigenvalues.iter().zip(&s2.eigenvalues) {
        assert!(a <= b);
    }
}

#[test]
fn iterative_solver_matches_dense() {
    let (_, _, ml, _) = meshes("7_1", &warped(), 3);
    for bc in [D, N] {
        let a = assemble(&ml, bc).unwrap();
        let dense = solve_smallest(&a, 12, 1e-9).unwrap();
        let iter = solve_smallest_iterative(&a, 12, 1e-9).unwrap();
        let cmp = compare_spectra(&dense, &iter, 12, 1e-8).unwrap();
        assert!(cmp.passed, "{bc}: {}", cmp.max_rel_gap);
        assert!(iter.residuals.iter().all(|&r| r <= 1e-9));
    }
}

#[test]
fn propeller_spectra_agree_and_transplant() {
    let (l, r, ml, mr) = meshes("7_1", &warped(), 3);
    for bc in [D, N] {
        let sl = mesh_spectrum(&ml, bc, 20, 1e-9).unwrap();
        let sr = mesh_spectrum(&mr, bc, 20, 1e-9).unwrap();
        let cmp = compare_spectra(&sl, &sr, 20, 1e-8).unwrap();
        assert!(cmp.passed, "{bc}: {}", cmp.max_rel_gap);
        assert_eq!(compare_spectra(&sl, &sl, 20, 0.0).unwrap().max_rel_gap, 0.0);

        let (_, t) = derive_minimal(&l, &r, bc).unwrap();
        let ar = assemble(&mr, bc).unwrap();
        let u = sl.eigenvector(0).unwrap();
        let v = transplant_discrete(&t, &ml, &mr, &u).unwrap();
        assert!(v.amax() > 0.0);
        assert!(ar.residual(&v, sl.eigenvalues[0]) <= 1e-8);
        let zero = transplant_discrete(&t, &ml, &mr, &DVector::zeros(ml.node_count())).unwrap();
        assert_eq!(zero.amax(), 0.0);

        // each transplanted cluster lies in the right eigenspace
        let vr = sr.eigenvectors.as_ref().unwrap();
        for cluster in clusters(&sl.eigenvalues, CLUSTER_GAP) {
            if cluster.end == sl.len() {
                continue;
            }
            for k in cluster.clone() {
                let v = transplant_discrete(&t, &ml, &mr, &sl.eigenvector(k).unwrap()).unwrap();
                let mut rest = v.clone();
                for j in cluster.clone() {
                    let w = vr.column(j).into_owned();
                    rest -= &w * ar.mass_inner(&w, &v);
                }
                let sin = (ar.mass_inner(&rest, &rest) / ar.mass_inner(&v, &v)).sqrt();
                assert!(sin <= 1e-6, "{bc} cluster {cluster:?}: {sin}");
            }
        }
    }
    assert!(matches!(
        compare_spectra(&mesh_spectrum(&ml, D, 3, 1e-9).unwrap(), &mesh_spectrum(&mr, N, 3, 1e-9).unwrap(), 3, 1e-8),
        Err(Error::IncomparableSpectra(_))
    ));
}

#[test]
fn broken_map_violates_seams() {
    let (l, r, ml, mr) = meshes("7_1", &warped(), 2);
    let (_, t) = derive_minimal(&l, &r, D).unwrap();
    let s = mesh_spectrum(&ml, D, 1, 1e-9).unwrap();
    let mut wrong: DMatrix<f64> = (&t).into();
    wrong[(0, 0)] += 1.0;
    let u = s.eigenvector(0).unwrap();
    assert!(matches!(transplant_nodal(&wrong, D, &ml, &mr, &u), Err(Error::SeamViolation { .. })));
}

#[test]
fn norm_preserving_combination_keeps_mass_norm() {
    let (l, r, ml, mr) = meshes("7_1", &warped(), 2);
    let (_, t3) = derive_minimal(&l, &r, D).unwrap();
    let t4 = t3.complement().unwrap();
    let s = mesh_spectrum(&ml, D, 3, 1e-9).unwrap();
    let al = assemble(&ml, D).unwrap();
    let ar = assemble(&mr, D).unwrap();
    for pair in norm_preserving_coefficients(&t3, &t4).unwrap() {
        let m = combine(pair.a, &t3, pair.b, &t4);
        for k in 0..3 {
            let u = s.eigenvector(k).unwrap();
            let v = transplant_nodal(&m, D, &ml, &mr, &u).unwrap();
            assert!((ar.mass_inner(&v, &v) - al.mass_inner(&u, &u)).abs() <= 1e-9);
        }
    }
}

#[test]
fn homophonic_point_measures_agree() {
    let tri = warped_triangle("21_1").unwrap();
    assert!((tri.angle(1) - PI / 3.0).abs() < 1e-15);
    let (_, _, ml, mr) = meshes("21_1", &tri, 3);
    let sl = mesh_spectrum(&ml, D, 24, 1e-9).unwrap();
    let sr = mesh_spectrum(&mr, D, 24, 1e-9).unwrap();
    let pl = point_measure(&sl, ml.special_nodes[0], CLUSTER_GAP).unwrap();
    let pr = point_measure(&sr, mr.special_nodes[0], CLUSTER_GAP).unwrap();
    let cmp = compare_point_measures(&pl, &pr, 10, 1e-6);
    assert!(cmp.passed, "{cmp:?}");
    let p = ml.vertices[ml.special_nodes[0]];
    let located = point_measure_at(&sl, &ml, &p, CLUSTER_GAP).unwrap();
    assert_eq!(located[0].measure, pl[0].measure);
    // simple eigenvalue: measure is u(p)²
    assert_eq!(pl[0].size, 1);
    let u0 = sl.eigenvector(0).unwrap()[ml.special_nodes[0]];
    assert!((pl[0].measure - u0 * u0).abs() < 1e-15);
    assert!(matches!(point_measure(&sl, usize::MAX, CLUSTER_GAP), Err(Error::PointNotInMesh)));
    let outside = Point2::new(-100.0, -100.0);
    assert!(matches!(point_measure_at(&sl, &ml, &outside, CLUSTER_GAP), Err(Error::PointNotInMesh)));
}

#[test]
fn measures_vanish_on_dirichlet_boundary() {
    let (_, _, ml, _) = meshes("7_1", &warped(), 2);
    let s = mesh_spectrum(&ml, D, 6, 1e-9).unwrap();
    let node = ml.boundary.iter().position(|&b| b).unwrap();
    assert!(point_measure(&s, node, CLUSTER_GAP).unwrap().iter().all(|c| c.measure == 0.0));
}

#[test]
fn single_precision_pipeline() {
    let ex = find("7_1").unwrap();
    let l = build_tiling(&ex.left).unwrap();
    let tri = BaseTriangle::<f32>::from_two_angles(0.9, 1.1, 1.0).unwrap();
    let d = realize(&l, &tri, &default_pose()).unwrap();
    let s = mesh_spectrum(&refine(&d, &l, 2).unwrap(), D, 3, 1e-2f32).unwrap();
    let tri64 = BaseTriangle::<f64>::from_two_angles(0.9, 1.1, 1.0).unwrap();
    let d64 = realize(&l, &tri64, &default_pose()).unwrap();
    let s64 = mesh_spectrum(&refine(&d64, &l, 2).unwrap(), D, 3, 1e-9).unwrap();
    for (a, b) in s.eigenvalues.iter().zip(&s64.eigenvalues) {
        assert!(((*a as f64) - b).abs() / b < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spectrum_is_rigid_motion_invariant(theta in -3.0f64..3.0, x in -4.0f64..4.0) {
        let ex = find("7_1").unwrap();
        let l = build_tiling(&ex.left).unwrap();
        let g = RigidMotion::translation(Vector2::new(x, 1.0)).compose(&RigidMotion::rotation(theta));
        let a = mesh_spectrum(&refine(&realize(&l, &warped(), &default_pose()).unwrap(), &l, 2).unwrap(), D, 8, 1e-9).unwrap();
        let b = mesh_spectrum(&refine(&realize(&l, &warped(), &g).unwrap(), &l, 2).unwrap(), D, 8, 1e-9).unwrap();
        for (p, q) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((p - q).abs() <= 1e-10 * p);
        }
    }

    #[test]
    fn eigenvalues_scale_inversely_with_area(s in 0.25f64..4.0) {
        let ex = find("7_1").unwrap();
        let l = build_tiling(&ex.left).unwrap();
        let base = mesh_spectrum(&refine(&realize(&l, &warped(), &default_pose()).unwrap(), &l, 2).unwrap(), N, 8, 1e-9).unwrap();
        let scaled = mesh_spectrum(&refine(&realize(&l, &warped().scaled(s), &default_pose()).unwrap(), &l, 2).unwrap(), N, 8, 1e6).unwrap();
        for (p, q) in base.eigenvalues.iter().zip(&scaled.eigenvalues).skip(1) {
            prop_assert!((q * s * s - p).abs() <= 1e-10 * p);
        }
    }
}
