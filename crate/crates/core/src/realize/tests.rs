use super::*;
use crate::group::{Cardinal, GroupDescriptor};
use crate::sets::Atom;
use std::sync::Arc;

fn z4w() -> GroupRef {
    Arc::new(GroupDescriptor::trivial().with_cyclic_order(4, Cardinal::Omega).unwrap())
}

fn el(text: &str) -> Element {
    text.parse().unwrap()
}

#[test]
fn two_element_group() {
    let g = Arc::new(GroupDescriptor::trivial().with_cyclic_order(2, 1.into()).unwrap());
    let cfg = Config {
        chars: 1,
        ..Config::default()
    };
    let (h, _) = build_characters(&g, &[], &cfg).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let x = el("Z(2)[0]");
    assert!((0..h.rows()).any(|r| h.image(&x, h.rows())[r].exact == half));
    assert!((0..h.rows()).any(|r| h.entry(r, &Coord::new(Summand::Cyclic { p: 2, s: 1 }, 0)) == TorusValue::Exact(half.clone())));
}

#[test]
fn four_round_basis_covers_grid() {
    let g = z4w();
    let cfg = Config {
        chars: 3,
        ..Config::default()
    };
    let s = make_round(&g, 4).unwrap();
    let (h, report) = build_characters(&g, &[s], &cfg).unwrap();
    assert_eq!(report.density[0].grid_size, 64);
    assert_eq!(report.density[0].covered, 64);
    assert!(h.rows() >= 64);
}

#[test]
fn weyl_on_integers() {
    let z = Arc::new(GroupDescriptor::trivial().with_free(1.into()).unwrap());
    let cfg = Config {
        chars: 1,
        realize_prefix: 10_000,
        eps: 0.01,
        ..Config::default()
    };
    let (_, report) = build_characters(&z, &[make_round(&z, 0).unwrap()], &cfg).unwrap();
    assert!(report.density[0].pass);
    assert!(report.attempts <= 3);
}

#[test]
fn degenerate_images_fail() {
    let g = z4w();
    let h = CharacterMatrix::new(g.clone(), 0, 2, 8);
    let zeros = RoundGenerator::listed(g.clone(), 4, vec![Element::zero(); 10]).unwrap();
    let r = verify_density(&h, &zeros, 10, 0.05).unwrap();
    assert!(!r.pass);
    assert_eq!(r.covered, 1);
    assert_eq!(r.covering_fraction, 1.0 / 16.0);
    assert_eq!(r.first_empty_cell.as_ref().unwrap().len(), 2);

    // a character with two values cannot be 0.2-dense
    let two = Arc::new(GroupDescriptor::trivial().with_cyclic_order(2, 1.into()).unwrap());
    let h = CharacterMatrix::new(two.clone(), 0, 1, 1);
    let alternating = RoundGenerator::listed(two, 0, vec![el("Z(2)[0]"), el("0"), el("Z(2)[0]")]).unwrap();
    assert!(!verify_density(&h, &alternating, 3, 0.2).unwrap().pass);
}

#[test]
fn rows_are_homomorphisms() {
    let g = Arc::new(
        GroupDescriptor::trivial()
            .with_free(2.into())
            .unwrap()
            .with_rational(1.into())
            .unwrap()
            .with_quasicyclic(3, Cardinal::Omega)
            .unwrap()
            .with_cyclic_order(4, Cardinal::Omega)
            .unwrap(),
    );
    let h = CharacterMatrix::new(g.clone(), 7, 3, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<(Element, Element)> = (0..20)
        .map(|_| (sample_torsion(&g, 0, 6, &mut rng), sample_torsion(&g, 0, 6, &mut rng)))
        .collect();
    assert!(h.check_homomorphism(&pairs));
    let x = el("3*Z[1]");
    let y = el("-5*Z[1] + 2/3*Q[0]");
    assert!(h.check_homomorphism(&[(x, y)]));
}

#[test]
fn completed_matrix_is_injective_on_torsion() {
    let g = Arc::new(
        GroupDescriptor::trivial()
            .with_cyclic_order(4, Cardinal::Omega)
            .unwrap()
            .with_quasicyclic(3, 2.into())
            .unwrap(),
    );
    let mut h = CharacterMatrix::new(g.clone(), 3, 2, 16);
    h.complete_kernel().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x = sample_torsion(&g, 0, 16, &mut rng);
        if x.is_zero() {
            continue;
        }
        assert!(h.image(&x, h.rows()).iter().any(|t| !t.exact.is_zero()), "{x} in kernel");
    }
}

#[test]
fn realized_closures_match() {
    let g = z4w();
    let cfg = Config::default();
    let round = |n: u64, f: i64| {
        let mut gen = make_round(&g, n).unwrap();
        if f != 1 {
            gen = gen.scaled(f).unwrap();
        }
        Atom::round(Element::zero(), gen, &cfg).unwrap()
    };
    let cases = vec![
        vec![round(4, 1)],
        vec![round(4, 1), round(4, 2)],
        vec![round(2, 1)],
        vec![Atom::Finite(vec![el("Z(4)[0]"), el("2*Z(4)[5]")])],
    ];
    for atoms in cases {
        let x = DescribedSet::new(g.clone(), atoms).unwrap();
        let v = realize_closure(&x, &cfg).unwrap();
        assert!(v.pass, "{x}: {v:?}");
    }
    let two = DescribedSet::new(g.clone(), vec![round(2, 1)]).unwrap();
    let v = realize_closure(&two, &cfg).unwrap();
    assert!(v.tight.samples > 0 && v.tight.extreme >= 0.25);
}

#[test]
fn csv_has_one_line_per_point() {
    let h = CharacterMatrix::new(z4w(), 0, 2, 4);
    let csv = h.image_csv(&[el("Z(4)[0]"), el("0")]);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("point,h0,h1"));
}
