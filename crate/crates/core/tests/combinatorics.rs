use drumkit::catalog::{find, load_catalog, Permutation};
use drumkit::permgroup::{check_crosscap_identity, generate_group, sunada_check};
use drumkit::tiling::{build_tiling, derive_all, derive_minimal, BoundaryCondition, ContinuationOperator, Tiling};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn tilings(id: &str) -> (Tiling, Tiling) {
    let ex = find(id).unwrap();
    (build_tiling(&ex.left).unwrap(), build_tiling(&ex.right).unwrap())
}

#[test]
fn catalog_actions_are_transitive_involutions() {
    for ex in load_catalog() {
        for side in [&ex.left, &ex.right] {
            assert!(side.iter().all(Permutation::is_involution));
            assert!(generate_group(side).unwrap().is_transitive(), "{}", ex.id);
        }
        for g in 0..3 {
            assert_eq!(ex.left[g].transposition_count(), ex.right[g].transposition_count());
        }
    }
}

#[test]
fn propeller_series_share_a_group() {
    let groups: Vec<_> = ["7_1", "7_2", "7_3"]
        .iter()
        .map(|id| {
            let mut e = generate_group(&find(id).unwrap().left).unwrap().elements().to_vec();
            e.sort_by(|a, b| a.images().cmp(b.images()));
            e
        })
        .collect();
    assert_eq!(groups[0].len(), 168);
    assert_eq!(groups[0], groups[1]);
    assert_eq!(groups[1], groups[2]);
}

#[test]
fn burnside_and_sunada_on_every_pair() {
    for ex in load_catalog() {
        let cert = sunada_check(&ex.left, &ex.right).unwrap();
        assert!(cert.holds, "{}", ex.id);
        // one orbit each, so the fixed points sum to |G|
        assert_eq!(cert.fixed_point_totals, (cert.order, cert.order), "{}", ex.id);
        let swapped = sunada_check(&ex.right, &ex.left).unwrap();
        assert_eq!(swapped.holds, cert.holds);
        assert_eq!(swapped.order, cert.order);
    }
}

#[test]
fn crosscap_identities() {
    for ex in load_catalog() {
        let c = check_crosscap_identity(ex).unwrap();
        assert!(c.cover_identity, "{}", ex.id);
        if ex.id == "21_1" {
            // the tabulated generators produce a group six times larger
            assert_eq!(c.group_order, 120960);
            assert!(!c.kernel_identity);
        } else {
            assert!(c.kernel_identity, "{}", ex.id);
        }
    }
}

#[test]
fn every_converging_seed_gives_a_transplantation() {
    for ex in load_catalog() {
        let (l, r) = tilings(&ex.id);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let (_, best) = derive_minimal(&l, &r, bc).unwrap();
            let k = best.stencil();
            let all = derive_all(&l, &r, 0, bc);
            assert!(!all.is_empty());
            for (seed, t) in all {
                assert!(t.stencil() == k || t.stencil() == l.n() - k, "{} {bc} {seed:?}", ex.id);
                assert!(t.intertwines(&l, &r));
                assert_ne!(t.determinant(), 0);
                let abs = t.matrix().map(|x| x.abs());
                for i in 0..l.n() {
                    assert_eq!(abs.row(i).sum(), t.stencil() as i64);
                    assert_eq!(abs.column(i).sum(), t.stencil() as i64);
                }
            }
        }
    }
}

#[test]
fn unsigned_dirichlet_maps_intertwine_neumann() {
    for ex in load_catalog() {
        let (l, r) = tilings(&ex.id);
        let (_, t) = derive_minimal(&l, &r, BoundaryCondition::Dirichlet).unwrap();
        assert!(t.to_neumann().intertwines(&l, &r), "{}", ex.id);
    }
}

fn word_operator(t: &Tiling, word: &[usize], bc: BoundaryCondition) -> DMatrix<i64> {
    word.iter().fold(DMatrix::identity(t.n(), t.n()), |acc, &c| ContinuationOperator::new(t, c, bc).matrix() * acc)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_order_does_not_matter(perm in Just([0usize, 1, 2]).prop_shuffle(), idx in 0usize..17) {
        let ex = &load_catalog()[idx];
        if ex.degree < 21 {
            let gens: Vec<Permutation> = perm.iter().map(|&i| ex.left[i].clone()).collect();
            let mut a = generate_group(&gens).unwrap().elements().to_vec();
            let mut b = generate_group(&ex.left).unwrap().elements().to_vec();
            a.sort_by(|x, y| x.images().cmp(y.images()));
            b.sort_by(|x, y| x.images().cmp(y.images()));
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn words_intertwine(word in proptest::collection::vec(0usize..3, 0..24), idx in 0usize..17, dirichlet in any::<bool>()) {
        let ex = &load_catalog()[idx];
        let bc = if dirichlet { BoundaryCondition::Dirichlet } else { BoundaryCondition::Neumann };
        let (l, r) = tilings(&ex.id);
        let (_, t) = derive_minimal(&l, &r, bc).unwrap();
        let lhs = t.matrix() * word_operator(&l, &word, bc);
        let rhs = word_operator(&r, &word, bc) * t.matrix();
        prop_assert_eq!(lhs, rhs);
    }
}
