use super::*;
use crate::group::Cardinal;
use proptest::prelude::*;

fn grp(parts: &[(u64, Cardinal)]) -> GroupRef {
    let mut g = GroupDescriptor::trivial();
    for &(n, c) in parts {
        g = g.with_cyclic_order(n, c).unwrap();
    }
    Arc::new(g)
}

fn el(text: &str) -> Element {
    text.parse().unwrap()
}

fn coset(g: &GroupRef, a: &str, n: u64) -> Coset {
    Coset::new(g.clone(), el(a), n).unwrap()
}

#[test]
fn canonicalize_drops_redundant_parts() {
    let g = grp(&[(4, Cardinal::Omega)]);
    let a = AlgebraicSet::canonicalize(
        g.clone(),
        vec![
            ElementarySet::Coset(Coset::subgroup(g.clone(), 2)),
            ElementarySet::Coset(Coset::subgroup(g.clone(), 4)),
            ElementarySet::Empty,
        ],
    )
    .unwrap();
    assert_eq!(a.parts(), &[Coset::subgroup(g.clone(), 4)]);
    assert!(AlgebraicSet::canonicalize(g, vec![ElementarySet::Empty]).unwrap().is_empty());
}

#[test]
fn canonicalize_merges_equal_cosets() {
    let g = grp(&[(12, 1.into())]);
    let parts = vec![coset(&g, "Z(12)[0]", 3), coset(&g, "4*Z(12)[0]", 3), Coset::subgroup(g.clone(), 2)];
    let a = AlgebraicSet::from_cosets(g.clone(), parts);
    // 1 + G[3] = {1,5,9}, 4 + G[3] = {0,4,8}: distinct, so both stay
    let members = |c: &Coset| (0..12).filter(|&k| c.contains(&el(&format!("{k}*Z(12)[0]")))).collect::<Vec<_>>();
    let listed: Vec<Vec<i64>> = a.parts().iter().map(members).collect();
    assert_eq!(listed.len(), 3);
    assert!(listed.contains(&vec![0, 4, 8]) && listed.contains(&vec![1, 5, 9]) && listed.contains(&vec![0, 6]));
    let dup = AlgebraicSet::from_cosets(g.clone(), vec![coset(&g, "Z(12)[0]", 3), coset(&g, "5*Z(12)[0]", 3)]);
    assert_eq!(dup.parts().len(), 1);
}

#[test]
fn mixed_groups_rejected() {
    let g = grp(&[(4, Cardinal::Omega)]);
    let h = grp(&[(6, Cardinal::Omega)]);
    let r = AlgebraicSet::canonicalize(g.clone(), vec![ElementarySet::Coset(Coset::subgroup(h.clone(), 2))]);
    assert!(matches!(r, Err(Error::MixedGroups)));
    assert!(AlgebraicSet::whole(g).union(&AlgebraicSet::whole(h)).is_err());
}

#[test]
fn lattice_operations() {
    let g = grp(&[(6, Cardinal::Omega)]);
    let e = subgroup_set(&g, &[2, 3]);
    assert_eq!(e.union(&AlgebraicSet::empty(g.clone())).unwrap(), e);
    assert_eq!(e.intersect(&subgroup_set(&g, &[6])).unwrap(), e);
    let meet = subgroup_set(&g, &[2]).intersect(&subgroup_set(&g, &[3])).unwrap();
    assert_eq!(meet, subgroup_set(&g, &[1]));
}

#[test]
fn connected_but_reducible() {
    let g = grp(&[(6, Cardinal::Omega)]);
    let e = subgroup_set(&g, &[2, 3]);
    assert_eq!(
        e.irreducible_components().unwrap(),
        vec![Coset::subgroup(g.clone(), 2), Coset::subgroup(g.clone(), 3)]
    );
    assert!(e.is_connected().unwrap());
    assert!(!e.is_irreducible().unwrap());
    let point = AlgebraicSet::from_coset(Coset::point(g.clone(), el("Z(2)[5]")).unwrap());
    assert!(point.is_connected().unwrap() && point.is_irreducible().unwrap());
}

#[test]
fn whole_group_splits_by_transversal() {
    let g = Arc::new(
        GroupDescriptor::trivial()
            .with_cyclic_order(2, Cardinal::Omega)
            .unwrap()
            .with_cyclic_order(4, 1.into())
            .unwrap(),
    );
    let comps = AlgebraicSet::whole(g.clone()).irreducible_components().unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c.order() == 2));
    // check in the truncation Z(2)^2 + Z(4): every point lies in exactly one
    let mut seen = 0;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..4 {
                let x = el(&format!("{a}*Z(2)[0] + {b}*Z(2)[1] + {c}*Z(4)[0]"));
                let hits = comps.iter().filter(|k| k.contains(&x)).count();
                assert_eq!(hits, 1);
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 16);
    let odd = coset(&g, "Z(4)[0]", 2);
    let two = AlgebraicSet::from_cosets(g.clone(), vec![Coset::subgroup(g.clone(), 2), odd]);
    assert_eq!(two.connected_components().unwrap().len(), 2);
    assert!(AlgebraicSet::whole(g.clone()).set_eq(&two).unwrap());
}

#[test]
fn finite_groups_are_discrete() {
    let g = grp(&[(12, 1.into())]);
    let comps = AlgebraicSet::whole(g.clone()).irreducible_components().unwrap();
    assert_eq!(comps.len(), 12);
    assert!(comps.iter().all(Coset::is_singleton));
    assert_eq!(AlgebraicSet::whole(g).dim().unwrap(), DimValue::Finite(0));
}

#[test]
fn transversal_cap_is_enforced() {
    let g = grp(&[(2, 20.into())]);
    let r = AlgebraicSet::whole(g).irreducible_components_capped(1000);
    assert!(matches!(r, Err(Error::TransversalTooLarge { .. })));
}

#[test]
fn dimension_examples() {
    let g = grp(&[(4, Cardinal::Omega)]);
    assert_eq!(AlgebraicSet::whole(g.clone()).dim().unwrap(), DimValue::Finite(2));
    assert_eq!(subgroup_set(&g, &[2]).dim().unwrap(), DimValue::Finite(1));
    assert_eq!(subgroup_set(&g, &[1]).dim().unwrap(), DimValue::Finite(0));
    assert_eq!(AlgebraicSet::empty(g).dim().unwrap(), DimValue::Empty);
    let z = Arc::new(GroupDescriptor::trivial().with_free(1.into()).unwrap());
    assert_eq!(AlgebraicSet::whole(z).dim().unwrap(), DimValue::Finite(1));
    let qc = Arc::new(GroupDescriptor::trivial().with_quasicyclic(2, Cardinal::Omega).unwrap());
    assert_eq!(AlgebraicSet::whole(qc.clone()).dim().unwrap(), DimValue::Infinite);
    assert_eq!(subgroup_set(&qc, &[8]).dim().unwrap(), DimValue::Finite(3));
    // Z + Z(6)^w: chains {0} < G[2] < G[6] < G
    let mixed = Arc::new(
        GroupDescriptor::trivial()
            .with_free(1.into())
            .unwrap()
            .with_cyclic_order(6, Cardinal::Omega)
            .unwrap(),
    );
    assert_eq!(AlgebraicSet::whole(mixed).dim().unwrap(), DimValue::Finite(3));
    // Z + Z(2^inf): only {0} and G are irreducible subgroups
    let prufer = Arc::new(
        GroupDescriptor::trivial()
            .with_free(1.into())
            .unwrap()
            .with_quasicyclic(2, 1.into())
            .unwrap(),
    );
    assert_eq!(AlgebraicSet::whole(prufer).dim().unwrap(), DimValue::Finite(1));
}

/// Groups `Z(p1^e1)^w + ...` together with the number of prime factors of
/// their exponent.
fn arb_omega_bounded() -> impl Strategy<Value = (GroupRef, u64)> {
    proptest::sample::subsequence(vec![(2u64, 3u32), (3, 2), (5, 1), (7, 1)], 1..=3).prop_flat_map(|ps| {
        let n = ps.len();
        (Just(ps), proptest::collection::vec(1u32..=3, n))
    })
    .prop_map(|(ps, es)| {
        let mut g = GroupDescriptor::trivial();
        let mut exponent = 1;
        for ((p, max), e) in ps.into_iter().zip(es) {
            let e = e.min(max);
            exponent *= p.pow(e);
            g = g.with_cyclic_order(p.pow(e), Cardinal::Omega).unwrap();
        }
        (Arc::new(g), exponent)
    })
}

proptest! {
    #[test]
    fn dim_counts_prime_factors((g, exp) in arb_omega_bounded()) {
        let d = AlgebraicSet::whole(g).dim().unwrap();
        prop_assert_eq!(d, DimValue::Finite(arith::big_omega(exp)));
    }

    #[test]
    fn components_idempotent_and_order_free(
        (g, exp) in arb_omega_bounded(),
        picks in proptest::collection::vec((0usize..16, 0u64..4), 1..5),
    ) {
        let ds = arith::divisors(exp);
        let parts: Vec<Coset> = picks
            .iter()
            .map(|&(i, a)| {
                let n = ds[i % ds.len()];
                let p = arith::factor(exp)[0].0;
                let anchor = el(&format!("{a}*Z({})[0]", p.pow(arith::valuation(p, exp))));
                Coset::new(g.clone(), anchor, n).unwrap()
            })
            .collect();
        let a = AlgebraicSet::from_cosets(g.clone(), parts.clone());
        let mut rev = parts;
        rev.reverse();
        let b = AlgebraicSet::from_cosets(g.clone(), rev);
        prop_assert_eq!(&a, &b);
        let comps = a.irreducible_components().unwrap();
        let again = AlgebraicSet::from_cosets(g.clone(), comps.clone()).irreducible_components().unwrap();
        prop_assert_eq!(&comps, &again);
        prop_assert!(comps.iter().all(Coset::is_irreducible));
        // monotone dimension along a sub-union
        let sub = AlgebraicSet::from_cosets(g.clone(), a.parts()[..1].to_vec());
        prop_assert!(sub.dim().unwrap() <= a.dim().unwrap());
        prop_assert!(a.set_eq(&AlgebraicSet::from_cosets(g.clone(), comps)).unwrap());
    }
}
