use super::*;
use crate::group::{Cardinal, GroupDescriptor};
use std::sync::Arc;

fn z4w() -> GroupRef {
    Arc::new(GroupDescriptor::trivial().with_cyclic_order(4, Cardinal::Omega).unwrap())
}

fn ints() -> GroupRef {
    Arc::new(GroupDescriptor::trivial().with_free(1.into()).unwrap())
}

fn el(text: &str) -> Element {
    text.parse().unwrap()
}

fn cfg() -> Config {
    Config::default()
}

fn round_atom(g: &GroupRef, base: &str, n: u64, factor: i64) -> Atom {
    let mut gen = make_round(g, n).unwrap();
    if factor != 1 {
        gen = gen.scaled(factor).unwrap();
    }
    Atom::round(el(base), gen, &cfg()).unwrap()
}

/// S ∪ 2S with S the canonical basis of Z(4)^w.
fn s_and_2s() -> DescribedSet {
    let g = z4w();
    DescribedSet::new(g.clone(), vec![round_atom(&g, "0", 4, 1), round_atom(&g, "0", 4, 2)]).unwrap()
}

/// Largest number of prefix elements in one coset of `G[d]`, counted by
/// reducing each element's residues modulo `4 / (d, 4)` directly.
fn max_trace_z4(prefix: &[Element], d: u64) -> usize {
    let keep = 4 / crate::arith::gcd(d, 4);
    let mut counts: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
    for x in prefix {
        let key: Vec<(u64, u64)> = x
            .coords()
            .filter_map(|(c, v)| match v {
                crate::group::Value::Residue(r) => Some((c.index, r % keep)),
                _ => None,
            })
            .filter(|(_, r)| *r != 0)
            .collect();
        *counts.entry(key).or_default() += 1;
    }
    counts.into_values().max().unwrap_or(0)
}

#[test]
fn m_values() {
    let g = z4w();
    let s = DescribedSet::new(g.clone(), vec![round_atom(&g, "0", 4, 1)]).unwrap();
    assert_eq!(s.little_m(), 4);
    let prefix = make_round(&g, 4).unwrap().prefix(500).unwrap();
    assert_eq!(max_trace_z4(&prefix, 1), 1);
    assert_eq!(max_trace_z4(&prefix, 2), 1);
    let f = DescribedSet::new(g.clone(), vec![Atom::Finite(vec![el("Z(4)[0]")])]).unwrap();
    assert_eq!(f.little_m(), 0);
    assert!(f.big_m().generators.is_empty());
    assert_eq!(s_and_2s().little_m(), 2);
    assert!(s_and_2s().big_m().contains(4));
    assert!(!s_and_2s().big_m().contains(3));
}

#[test]
fn coset_atoms_contribute_primes_of_infinite_rank() {
    let g = Arc::new(
        GroupDescriptor::trivial()
            .with_cyclic_order(6, Cardinal::Omega)
            .unwrap()
            .with_cyclic_order(5, 2.into())
            .unwrap(),
    );
    let x = DescribedSet::new(g.clone(), vec![Atom::Coset(Coset::subgroup(g.clone(), 30))]).unwrap();
    assert_eq!(x.big_m().generators, BTreeSet::from([2, 3]));
    let y = DescribedSet::new(g.clone(), vec![Atom::Coset(Coset::subgroup(g.clone(), 5))]).unwrap();
    assert_eq!(y.little_m(), 0);
}

#[test]
fn certification() {
    let g6 = Arc::new(GroupDescriptor::trivial().with_cyclic_order(6, Cardinal::Omega).unwrap());
    let v = certify_round(&make_round(&g6, 6).unwrap(), &cfg()).unwrap();
    let c = v.certificate().unwrap();
    assert_eq!(c.divisors, vec![1, 2, 3]);
    assert_eq!(c.max_count, 1);
    assert_eq!(c.prefix_len, 1000);

    let constant = RoundGenerator::listed(g6.clone(), 6, vec![el("Z(2)[0] + Z(3)[0]"); 5]).unwrap();
    match certify_round(&constant, &cfg()).unwrap() {
        RoundVerdict::Refuted(r) => assert_eq!((r.divisor, r.indices), (1, vec![0, 1])),
        other => panic!("constant sequence certified: {other:?}"),
    }

    let prufer = Arc::new(GroupDescriptor::trivial().with_quasicyclic(2, 1.into()).unwrap());
    let escape = make_round(&prufer, 0).unwrap();
    assert!(matches!(escape.kind(), GeneratorKind::GreedyEscape { p: 2 }));
    // k! s_k != 0 for the k-th element
    let xs = escape.prefix(12).unwrap();
    for (k, x) in xs.iter().enumerate() {
        let fact: i64 = (1..=k as i64).product();
        assert!(!x.scalar_mul(fact).is_zero());
    }
    let small = Config {
        prefix_len: 200,
        ..cfg()
    };
    assert!(certify_round(&escape, &small).unwrap().certificate().is_some());

    let outside = RoundGenerator::listed(g6.clone(), 2, vec![el("Z(3)[0]")]).unwrap();
    assert!(matches!(certify_round(&outside, &cfg()), Err(Error::OutsideTorsion { .. })));
}

#[test]
fn making_round_sets() {
    let g = z4w();
    let s = make_round(&g, 4).unwrap();
    assert!(s.prefix(50).unwrap().iter().all(|x| x.order_of() == 4));
    let z = make_round(&ints(), 0).unwrap();
    assert_eq!(z.prefix(3).unwrap(), vec![el("Z[0]"), el("2*Z[0]"), el("3*Z[0]")]);
    let mixed = Arc::new(
        GroupDescriptor::trivial()
            .with_cyclic_order(2, Cardinal::Omega)
            .unwrap()
            .with_cyclic_order(4, 1.into())
            .unwrap(),
    );
    assert!(matches!(make_round(&mixed, 4), Err(Error::NoRoundSet { order: 4, .. })));
    assert!(make_round(&mixed, 2).is_ok());
    assert!(matches!(make_round(&g, 1), Err(Error::NoRoundSet { .. })));
    assert!(matches!(make_round(&g, 0), Err(Error::NoRoundSet { .. })));
}

#[test]
fn closures() {
    let g = z4w();
    let x = s_and_2s();
    let (closed, cert) = x.closure_with(&cfg()).unwrap();
    assert!(closed.set_eq(&AlgebraicSet::whole(g.clone())).unwrap());
    assert_eq!(closed.parts().len(), 1);
    assert!(cert.isolated.is_empty());
    assert_eq!(cert.pieces.len(), 1);
    assert_eq!(cert.index_set.len(), 2);

    let pts = vec![el("Z(4)[0]"), el("2*Z(4)[3]")];
    let f = DescribedSet::new(g.clone(), vec![Atom::Finite(pts.clone())]).unwrap();
    let (fc, fcert) = f.closure_with(&cfg()).unwrap();
    assert_eq!(fc.parts().len(), 2);
    assert!(pts.iter().all(|p| fc.contains(p)));
    assert_eq!(fcert.isolated.len(), 2);

    let shifted = DescribedSet::new(g.clone(), vec![round_atom(&g, "Z(4)[0]", 2, 1)]).unwrap();
    let sc = shifted.closure().unwrap();
    assert_eq!(sc.parts(), &[Coset::new(g.clone(), el("Z(4)[0]"), 2).unwrap()]);
}

#[test]
fn density() {
    let g = z4w();
    assert!(!DescribedSet::new(g.clone(), vec![Atom::Coset(Coset::subgroup(g.clone(), 2))])
        .unwrap()
        .is_dense()
        .unwrap());
    let s = DescribedSet::new(g.clone(), vec![round_atom(&g, "0", 4, 1)]).unwrap();
    let v = s.density().unwrap();
    assert!(v.dense && v.potentially_dense && v.mx_infinite.is_none());

    let z = ints();
    for (base, factor) in [("0", 1), ("5*Z[0]", 3), ("-2*Z[0]", -7)] {
        let x = DescribedSet::new(z.clone(), vec![round_atom(&z, base, 0, factor)]).unwrap();
        let v = x.density().unwrap();
        assert!(v.dense);
        assert_eq!(v.mx_infinite, Some(true));
    }
    let evens = DescribedSet::new(z.clone(), vec![Atom::Span { offset: el("Z[0]"), generators: vec![el("2*Z[0]")] }]).unwrap();
    assert!(evens.is_dense().unwrap());
}

#[test]
fn curves_and_bases() {
    let g = z4w();
    let s = DescribedSet::new(g.clone(), vec![round_atom(&g, "0", 4, 1)]).unwrap();
    assert!(s.is_curve().unwrap());
    assert!(!s_and_2s().is_curve().unwrap());
    assert!(s.valid_round_base(&el("Z(4)[0]")).unwrap());
    assert!(!s_and_2s().valid_round_base(&el("Z(4)[0]")).unwrap());
    let f = DescribedSet::new(g.clone(), vec![Atom::Finite(vec![el("0")])]).unwrap();
    assert!(matches!(f.is_curve(), Err(Error::FiniteSet)));
    // a translated 2-round set is a curve, and only anchors in its coset work
    let t = DescribedSet::new(g.clone(), vec![round_atom(&g, "Z(4)[0]", 2, 1)]).unwrap();
    assert!(t.is_curve().unwrap());
    assert!(t.valid_round_base(&el("3*Z(4)[0]")).unwrap());
    assert!(!t.valid_round_base(&el("0")).unwrap());
}

#[test]
fn round_curve_bridge() {
    let g = z4w();
    for n in [2, 4] {
        let s = DescribedSet::new(g.clone(), vec![round_atom(&g, "0", n, 1)]).unwrap();
        assert!(s.is_curve().unwrap());
        assert_eq!(s.closure().unwrap().parts(), &[Coset::subgroup(g.clone(), n)]);
        // X - x is round for sampled x in X
        let gen = make_round(&g, n).unwrap();
        for x in gen.prefix(3).unwrap() {
            let shifted: Vec<Element> = gen.prefix(300).unwrap().iter().map(|y| y.sub(&x)).collect();
            let listed = RoundGenerator::listed(g.clone(), n, shifted).unwrap();
            let small = Config {
                prefix_len: 300,
                ..cfg()
            };
            assert!(certify_round(&listed, &small).unwrap().certificate().is_some());
        }
    }
}

#[test]
fn irreducibility_isolation_dimension() {
    assert!(s_and_2s().is_irreducible().unwrap());
    let g = Arc::new(
        GroupDescriptor::trivial()
            .with_free(1.into())
            .unwrap()
            .with_cyclic_order(4, Cardinal::Omega)
            .unwrap(),
    );
    let x = DescribedSet::new(
        g.clone(),
        vec![Atom::Finite(vec![el("Z[0]")]), round_atom(&g, "0", 4, 1)],
    )
    .unwrap();
    assert_eq!(x.isolated_points().unwrap(), vec![el("Z[0]")]);
    let comps = x.components().unwrap();
    assert_eq!(comps.len(), 2);

    let z4 = z4w();
    let s = DescribedSet::new(z4.clone(), vec![round_atom(&z4, "0", 4, 1)]).unwrap();
    assert_eq!(s.dim().unwrap(), DimValue::Finite(1));
    assert_eq!(s_and_2s().dim().unwrap(), DimValue::Finite(2));
    let empty = DescribedSet::new(z4.clone(), vec![]).unwrap();
    assert_eq!(empty.dim().unwrap(), DimValue::Empty);
    let whole = DescribedSet::new(z4.clone(), vec![Atom::Coset(Coset::whole(z4.clone()))]).unwrap();
    assert_eq!(whole.dim().unwrap(), DimValue::Finite(2));
    // a round set next to a coset of smaller order inside its closure
    let mixed = DescribedSet::new(
        z4.clone(),
        vec![round_atom(&z4, "0", 4, 1), Atom::Coset(Coset::subgroup(z4.clone(), 2))],
    )
    .unwrap();
    assert_eq!(mixed.dim().unwrap(), DimValue::Finite(2));
}

#[test]
fn translation_equivariance() {
    let g = z4w();
    let x = s_and_2s().union(&DescribedSet::new(g.clone(), vec![Atom::Finite(vec![el("Z(4)[7]")])]).unwrap()).unwrap();
    for a in ["Z(4)[0]", "3*Z(4)[2] + 2*Z(4)[9]"] {
        let a = el(a);
        let lhs = x.translate(&a).unwrap().closure().unwrap();
        let rhs = x.closure().unwrap().translate(&a).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn trimming() {
    let g = z4w();
    let s = make_round(&g, 4).unwrap();
    let (y0, y1, cert) = split_trim(&s, 100).unwrap();
    let a: HashSet<Element> = y0.prefix(100).unwrap().into_iter().collect();
    let b: HashSet<Element> = y1.prefix(100).unwrap().into_iter().collect();
    assert_eq!(a.len(), 100);
    assert!(a.is_disjoint(&b));
    assert!(cert.max_translate_overlap <= 2);
    assert_eq!(y0.order(), 4);
    assert!(certify_round(&y0, &Config { prefix_len: 100, ..cfg() }).unwrap().certificate().is_some());

    let z = make_round(&ints(), 0).unwrap();
    let (z0, z1, cert) = split_trim(&z, 60).unwrap();
    let a: HashSet<Element> = z0.prefix(60).unwrap().into_iter().collect();
    let b: HashSet<Element> = z1.prefix(60).unwrap().into_iter().collect();
    assert!(a.is_disjoint(&b));
    assert!(cert.max_translate_overlap < 60);
}
