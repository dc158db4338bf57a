use super::*;
use crate::arith;

fn omega() -> Cardinal {
    Cardinal::Omega
}

fn cyc(n: u64, m: Cardinal) -> GroupDescriptor {
    GroupDescriptor::trivial().with_cyclic_order(n, m).unwrap()
}

/// Brute-force model of `Z(n_1) + ... + Z(n_k)` as tuples.
struct Tuples {
    moduli: Vec<u64>,
}

impl Tuples {
    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..m).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn mul(&self, k: u64, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.moduli)
            .map(|(v, m)| (v * k) % m)
            .collect()
    }

    fn is_zero(x: &[u64]) -> bool {
        x.iter().all(|v| *v == 0)
    }

    /// `d -> |H[d]|` for a subset `h` closed under addition.
    fn torsion_profile(&self, h: &[Vec<u64>], ds: &[u64]) -> Vec<usize> {
        ds.iter()
            .map(|&d| h.iter().filter(|x| Self::is_zero(&self.mul(d, x))).count())
            .collect()
    }
}

fn profile_of(g: &GroupDescriptor, ds: &[u64]) -> Vec<usize> {
    ds.iter()
        .map(|&d| g.torsion_subgroup(d).order().unwrap() as usize)
        .collect()
}

/// Invariant-factor lists `n_1 | n_2 | ...` with product at most `cap`.
fn finite_groups(cap: u64) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, prod: u64, cap: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let start = prefix.last().copied().unwrap_or(2);
        let mut n = start;
        while prod * n <= cap {
            if prefix.last().is_none_or(|l| n % l == 0) {
                prefix.push(n);
                go(prefix, prod * n, cap, out);
                prefix.pop();
            }
            n += 1;
        }
    }
    let mut out = Vec::new();
    go(&mut vec![], 1, cap, &mut out);
    out
}

#[test]
fn torsion_subgroup_examples() {
    // Z + Z(4)^w, n = 2: truncation Z(4)^3 has 8 = 2^3 elements killed by 2
    let g = GroupDescriptor::trivial()
        .with_free(1.into())
        .unwrap()
        .with_cyclic_order(4, omega())
        .unwrap();
    let t = Tuples { moduli: vec![4, 4, 4] };
    let killed = t
        .elements()
        .iter()
        .filter(|x| Tuples::is_zero(&t.mul(2, x)))
        .count();
    assert_eq!(killed, 8);
    assert_eq!(g.torsion_subgroup(2), cyc(2, omega()));
    assert_eq!(g.torsion_subgroup(0), g);

    // Z(6)^w, n = 3: in Z(6)^2 the 3-torsion has 9 elements
    let t = Tuples { moduli: vec![6, 6] };
    let killed = t
        .elements()
        .iter()
        .filter(|x| Tuples::is_zero(&t.mul(3, x)))
        .count();
    assert_eq!(killed, 9);
    assert_eq!(cyc(6, omega()).torsion_subgroup(3), cyc(3, omega()));
}

#[test]
fn multiply_group_examples() {
    // 2 * Z(4)^3 = {0,2}^3
    let t = Tuples { moduli: vec![4, 4, 4] };
    let mut img: Vec<_> = t.elements().iter().map(|x| t.mul(2, x)).collect();
    img.sort();
    img.dedup();
    assert_eq!(img.len(), 8);
    assert_eq!(cyc(4, omega()).multiply_group(2).unwrap(), cyc(2, omega()));
    assert!(cyc(8, 1.into()).multiply_group(8).unwrap().is_trivial());
    let g = GroupDescriptor::trivial()
        .with_free(1.into())
        .unwrap()
        .with_cyclic_order(9, omega())
        .unwrap();
    let expect = GroupDescriptor::trivial()
        .with_free(1.into())
        .unwrap()
        .with_cyclic_order(3, omega())
        .unwrap();
    assert_eq!(g.multiply_group(3).unwrap(), expect);
    assert_eq!(g.multiply_group(0), Err(crate::Error::ZeroMultiplier));
}

#[test]
fn exponent_examples() {
    assert_eq!(cyc(4, omega()).exponent(), 4);
    assert_eq!(GroupDescriptor::trivial().with_free(1.into()).unwrap().exponent(), 0);
    let g = cyc(2, 3.into()).with_cyclic_order(9, 1.into()).unwrap();
    let t = Tuples { moduli: vec![2, 2, 2, 9] };
    let exp = t.elements().iter().fold(1, |acc, x| {
        let ord = (1..).find(|k| Tuples::is_zero(&t.mul(*k, x))).unwrap();
        arith::lcm(acc, ord)
    });
    assert_eq!(exp, 18);
    assert_eq!(g.exponent(), 18);
    assert_eq!(GroupDescriptor::trivial().exponent(), 1);
}

#[test]
fn essential_order_examples() {
    let g = cyc(4, omega()).with_cyclic_order(2, omega()).unwrap();
    // minimality: the smallest divisor d of the exponent with dG finite
    let by_search = arith::divisors(g.exponent())
        .into_iter()
        .find(|&d| g.multiply_group(d).unwrap().is_finite())
        .unwrap();
    assert_eq!(by_search, 4);
    assert_eq!(g.essential_order(), 4);
    assert_eq!(cyc(8, 1.into()).essential_order(), 1);
    assert_eq!(GroupDescriptor::trivial().with_free(1.into()).unwrap().essential_order(), 0);
}

#[test]
fn canonical_orders() {
    assert_eq!(cyc(2, omega()).canonical_torsion_order(4), 2);
    let z = GroupDescriptor::trivial().with_free(1.into()).unwrap();
    assert_eq!(z.canonical_torsion_order(6), 1);
    assert_eq!(cyc(4, omega()).canonical_torsion_order(0), 4);
    assert_eq!(z.canonical_torsion_order(0), 0);
}

#[test]
fn irreducible_torsion_examples() {
    let c = cyc(4, omega()).is_irreducible_torsion(4).unwrap();
    assert!(c.irreducible);
    assert_eq!(c.leading, vec![(2, 2, Cardinal::Omega)]);

    let g = cyc(2, omega()).with_cyclic_order(4, 1.into()).unwrap();
    let c = g.is_irreducible_torsion(4).unwrap();
    assert!(!c.irreducible);
    assert_eq!(c.leading, vec![(2, 2, Cardinal::Fin(1))]);
    assert_eq!(g.torsion_subgroup(4).essential_order(), 2);

    let z = GroupDescriptor::trivial().with_free(1.into()).unwrap();
    let c = z.is_irreducible_torsion(0).unwrap();
    assert!(c.irreducible);
    assert_eq!(c.unbounded_witness.as_deref(), Some("Z"));

    assert!(matches!(
        cyc(2, omega()).is_irreducible_torsion(4),
        Err(crate::Error::NonCanonicalOrder { given: 4, canonical: 2 })
    ));
}

#[test]
fn cofinite_classification() {
    let z = GroupDescriptor::trivial().with_free(1.into()).unwrap();
    assert_eq!((z.is_almost_torsion_free(), z.is_cofinite_zariski()), (true, true));
    let g = cyc(3, omega());
    assert_eq!((g.is_almost_torsion_free(), g.is_cofinite_zariski()), (false, true));
    let g = cyc(4, omega());
    assert_eq!((g.is_almost_torsion_free(), g.is_cofinite_zariski()), (false, false));
    let q = GroupDescriptor::trivial().with_quasicyclic(2, 3.into()).unwrap();
    assert!(q.is_almost_torsion_free());
}

#[test]
fn finite_groups_agree_with_enumeration() {
    let groups = finite_groups(64);
    assert!(groups.len() > 100);
    for moduli in groups {
        let g = moduli
            .iter()
            .fold(GroupDescriptor::trivial(), |g, &n| {
                g.with_cyclic_order(n, 1.into()).unwrap()
            });
        let t = Tuples { moduli: moduli.clone() };
        let all = t.elements();
        let exp = moduli.iter().fold(1, |a, &b| arith::lcm(a, b));
        let ds = arith::divisors(exp);
        assert_eq!(g.exponent(), exp, "{moduli:?}");
        assert_eq!(g.order(), Some(all.len() as u64));
        for &n in &ds {
            let sub: Vec<_> = all
                .iter()
                .filter(|x| Tuples::is_zero(&t.mul(n, x)))
                .cloned()
                .collect();
            let desc = g.torsion_subgroup(n);
            assert_eq!(t.torsion_profile(&sub, &ds), profile_of(&desc, &ds), "{moduli:?}[{n}]");
            let sub_exp = sub.iter().fold(1, |acc, x| {
                let ord = (1..=exp).find(|k| Tuples::is_zero(&t.mul(*k, x))).unwrap();
                arith::lcm(acc, ord)
            });
            assert_eq!(desc.exponent(), sub_exp);

            let mut img: Vec<_> = all.iter().map(|x| t.mul(n, x)).collect();
            img.sort();
            img.dedup();
            let desc = g.multiply_group(n).unwrap();
            assert_eq!(t.torsion_profile(&img, &ds), profile_of(&desc, &ds), "{n}*{moduli:?}");
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn arb_cardinal() -> impl Strategy<Value = Cardinal> {
        prop_oneof![(0u64..3).prop_map(Cardinal::Fin), Just(Cardinal::Omega)]
    }

    pub(crate) fn arb_bounded() -> impl Strategy<Value = GroupDescriptor> {
        proptest::collection::vec(
            (prop::sample::select(vec![2u64, 3, 5]), 1u32..4, arb_cardinal()),
            0..4,
        )
        .prop_map(|parts| {
            parts.into_iter().fold(GroupDescriptor::trivial(), |g, (p, s, c)| {
                g.with(Summand::Cyclic { p, s }, c).unwrap()
            })
        })
    }

    pub(crate) fn arb_descriptor() -> impl Strategy<Value = GroupDescriptor> {
        (arb_bounded(), arb_cardinal(), arb_cardinal(), prop::option::of((prop::sample::select(vec![2u64, 3]), arb_cardinal())))
            .prop_map(|(g, f, q, pq)| {
                let mut g = g.with_free(f).unwrap().with_rational(q).unwrap();
                if let Some((p, c)) = pq {
                    g = g.with_quasicyclic(p, c).unwrap();
                }
                g
            })
    }

    proptest! {
        #[test]
        fn torsion_depends_only_on_canonical_order(g in arb_descriptor(), m in 0u64..200) {
            let n = g.canonical_torsion_order(m);
            prop_assert_eq!(g.torsion_subgroup(m), g.torsion_subgroup(n));
            prop_assert_eq!(g.torsion_subgroup(n).exponent(), n);
        }

        #[test]
        fn essential_order_divides_exponent(g in arb_bounded()) {
            prop_assert!(arith::divides(g.essential_order(), g.exponent()));
        }

        #[test]
        fn essential_order_is_stable_on_its_torsion(g in arb_descriptor()) {
            let n = g.essential_order();
            prop_assert_eq!(g.torsion_subgroup(n).essential_order(), n);
        }

        #[test]
        fn irreducible_matches_essential_order(g in arb_descriptor(), m in 0u64..100) {
            let n = g.canonical_torsion_order(m);
            let cert = g.is_irreducible_torsion(n).unwrap();
            prop_assert_eq!(cert.irreducible, g.torsion_subgroup(n).essential_order() == n);
            if n >= 2 {
                prop_assert_eq!(cert.irreducible, cert.leading.iter().all(|l| l.2.is_infinite()));
            }
        }

        #[test]
        fn json_round_trip(g in arb_descriptor()) {
            let text = serde_json::to_string(&g).unwrap();
            let back: GroupDescriptor = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}

