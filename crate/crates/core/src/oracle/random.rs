//! Seeded random elements, closed sets and described sets for law checks.

use crate::arith;
use crate::closed::AlgebraicSet;
use crate::config::Config;
use crate::coset::{Coset, GroupRef};
use crate::group::{Element, Summand, Value};
use crate::sets::{make_round, Atom, DescribedSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WINDOW: u64 = 6;
const ORDERS: [u64; 9] = [0, 1, 2, 3, 4, 6, 8, 9, 12];

/// A sparse random element on the first few coordinates of each summand.
pub fn element(group: &GroupRef, rng: &mut ChaCha8Rng) -> Element {
    let coords = group.truncated_coords(WINDOW);
    if coords.is_empty() {
        return Element::zero();
    }
    let picks = rng.gen_range(0..=3);
    Element::from_coords((0..picks).map(|_| {
        let c = *coords.choose(rng).expect("nonempty");
        let v = match c.summand {
            Summand::Cyclic { .. } => Value::Residue(rng.gen_range(0..c.summand.modulus().expect("cyclic"))),
            Summand::Quasicyclic { p } => {
                let den = arith::pow(p, rng.gen_range(1..=3));
                Value::Frac(BigRational::new(BigInt::from(rng.gen_range(0..den)), BigInt::from(den)))
            }
            Summand::Free => Value::Int(BigInt::from(rng.gen_range(-9i64..=9))),
            Summand::Rational => Value::Frac(BigRational::new(
                BigInt::from(rng.gen_range(-9i64..=9)),
                BigInt::from(rng.gen_range(1i64..=4)),
            )),
        };
        (c, v)
    }))
}

pub fn coset(group: &GroupRef, rng: &mut ChaCha8Rng) -> Coset {
    let n = *ORDERS.choose(rng).expect("nonempty");
    Coset::new(group.clone(), element(group, rng), n).expect("element of the group")
}

pub fn algebraic_set(group: &GroupRef, rng: &mut ChaCha8Rng) -> AlgebraicSet {
    let k = rng.gen_range(1..=3);
    let parts = (0..k).map(|_| coset(group, rng)).collect();
    AlgebraicSet::canonicalize(
        group.clone(),
        parts_into(parts),
    )
    .expect("one group")
}

fn parts_into(parts: Vec<Coset>) -> Vec<crate::coset::ElementarySet> {
    parts.into_iter().map(Into::into).collect()
}

/// One to three random atoms. Round atoms use the standard generators of the
/// orders that admit one, sometimes scaled.
pub fn described_set(group: &GroupRef, rng: &mut ChaCha8Rng) -> DescribedSet {
    let cfg = Config {
        prefix_len: 200,
        ..Config::default()
    };
    let k = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    while atoms.len() < k {
        let atom = match rng.gen_range(0..4) {
            0 => Atom::Finite((0..rng.gen_range(1..=3)).map(|_| element(group, rng)).collect()),
            1 => Atom::Coset(coset(group, rng)),
            2 => {
                let n = group.canonical_torsion_order(*ORDERS.choose(rng).expect("nonempty"));
                let Ok(mut gen) = make_round(group, n) else { continue };
                if rng.gen_bool(0.3) {
                    gen = gen.scaled(rng.gen_range(2..=3)).expect("nonzero factor");
                }
                match Atom::round(element(group, rng), gen, &cfg) {
                    Ok(a) => a,
                    Err(_) => continue,
                }
            }
            _ => Atom::Span {
                offset: element(group, rng),
                generators: (0..rng.gen_range(1..=2)).map(|_| element(group, rng)).collect(),
            },
        };
        atoms.push(atom);
    }
    DescribedSet::new(group.clone(), atoms).expect("atoms over one group")
}
