use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use zariski::config::Config;
use zariski::oracle::random;
use zariski::sets::Atom;
use zariski::{Cardinal, GroupDescriptor, Summand};
use zariski_cli::parse::{group_ref, parse_generator, parse_group, parse_set, ParseError};

#[test]
fn group_examples() {
    let g = parse_group("Z(4)^w").unwrap();
    assert_eq!(g.multiplicity(Summand::Cyclic { p: 2, s: 2 }), Cardinal::Omega);
    assert_eq!(g.summands().count(), 1);

    let g = parse_group("Z^2 + Z(3)^5 + Zp(2,inf)^w").unwrap();
    assert_eq!(g.multiplicity(Summand::Free), Cardinal::Fin(2));
    assert_eq!(g.multiplicity(Summand::Cyclic { p: 3, s: 1 }), Cardinal::Fin(5));
    assert_eq!(g.multiplicity(Summand::Quasicyclic { p: 2 }), Cardinal::Omega);

    let g = parse_group("Z(12)^w + Q").unwrap();
    assert_eq!(g.multiplicity(Summand::Cyclic { p: 2, s: 2 }), Cardinal::Omega);
    assert_eq!(g.multiplicity(Summand::Cyclic { p: 3, s: 1 }), Cardinal::Omega);
    assert_eq!(g.multiplicity(Summand::Rational), Cardinal::Fin(1));
    assert_eq!(parse_group("0").unwrap(), GroupDescriptor::trivial());
}

#[test]
fn group_errors_are_classified() {
    for bad in ["Z(4", "Y", "Z^x", "Z +", "Zp(2,oo)"] {
        let e = parse_group(bad).unwrap_err();
        assert!(!e.is_semantic(), "{bad}: {e}");
    }
    for bad in ["Zp(4)", "Z(0)"] {
        assert!(parse_group(bad).unwrap_err().is_semantic(), "{bad}");
    }
    match parse_group("Z + Z(4").unwrap_err() {
        ParseError::Syntax { column, .. } => assert_eq!(column, 7),
        e => panic!("{e}"),
    }
}

#[test]
fn set_atoms() {
    let g = group_ref(parse_group("Z(4)^w").unwrap());
    let cfg = Config::default();
    let x = parse_set(&g, "round(4) | 2*round(4)", &cfg).unwrap();
    assert_eq!(x.atoms().len(), 2);
    assert_eq!(x.little_m(), 2);

    let x = parse_set(&g, "{Z(4)[0], 2*Z(4)[3]} | Z(4)[1] + G[2] | span(Z(4)[2])", &cfg).unwrap();
    assert!(matches!(&x.atoms()[0], Atom::Finite(v) if v.len() == 2));
    assert!(matches!(&x.atoms()[1], Atom::Coset(c) if c.order() == 2));
    assert!(matches!(&x.atoms()[2], Atom::Span { generators, .. } if generators.len() == 1));

    let x = parse_set(&g, "{Z(4)[0], Z(4)[1]} | (Z(4)[0] + G[2]) | Z(4)[2] + round(4)", &cfg).unwrap();
    assert!(matches!(&x.atoms()[1], Atom::Coset(c) if c.order() == 2));
    assert!(matches!(&x.atoms()[2], Atom::Round { .. }));

    let x = parse_set(&g, "Z(4)[0] + Z(4)[1] + trim(round(4), 1)", &cfg).unwrap();
    assert!(x.is_curve().unwrap());
}

#[test]
fn round_one_is_semantic() {
    let g = group_ref(parse_group("Z").unwrap());
    let e = parse_set(&g, "round(1)", &Config::default()).unwrap_err();
    assert!(e.is_semantic());
    assert!(parse_generator(&g, "round(1)").unwrap_err().is_semantic());
}

#[test]
fn out_of_range_coordinate_is_semantic() {
    let g = group_ref(parse_group("Z(3)^2").unwrap());
    let e = parse_set(&g, "{Z(3)[5]}", &Config::default()).unwrap_err();
    assert!(e.is_semantic(), "{e}");
    let e = parse_set(&g, "{Z(3)[0] +}", &Config::default()).unwrap_err();
    assert!(!e.is_semantic(), "{e}");
}

#[test]
fn uncertified_sequence_is_rejected() {
    let g = group_ref(parse_group("Z(2)^w").unwrap());
    let e = parse_set(&g, "seq(2; Z(2)[0], Z(2)[0], Z(2)[0])", &Config::default()).unwrap_err();
    assert!(e.is_semantic());
}

fn descriptor() -> impl Strategy<Value = GroupDescriptor> {
    let mult = prop_oneof![(1u64..6).prop_map(Cardinal::Fin), Just(Cardinal::Omega)];
    let summand = prop_oneof![
        Just(Summand::Free),
        Just(Summand::Rational),
        prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Summand::Quasicyclic { p }),
        (prop::sample::select(vec![2u64, 3, 5]), 1u32..4).prop_map(|(p, s)| Summand::Cyclic { p, s }),
    ];
    prop::collection::vec((summand, mult), 0..5).prop_map(|parts| {
        parts
            .into_iter()
            .fold(GroupDescriptor::trivial(), |g, (s, m)| g.with(s, m).unwrap())
    })
}

proptest! {
    #[test]
    fn group_round_trip(g in descriptor()) {
        let text = g.to_string();
        prop_assert_eq!(parse_group(&text).unwrap(), g, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn set_round_trip(seed in any::<u64>(), which in 0usize..7) {
        let groups = zariski::oracle::law_groups();
        let g = &groups[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random::described_set(g, &mut rng);
        let text = x.to_string();
        let cfg = Config { prefix_len: 200, ..Config::default() };
        let back = parse_set(&Arc::clone(g), &text, &cfg).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        prop_assert_eq!(back.atoms().len(), x.atoms().len());
        prop_assert_eq!(back.closure().unwrap(), x.closure().unwrap(), "{}", text);
    }
}
