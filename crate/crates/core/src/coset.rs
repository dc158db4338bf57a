//! Elementary algebraic sets: cosets `a + G[n]` of torsion subgroups, and the
//! empty set.
//!
//! Cosets are kept in a canonical form. The order is canonical for the group
//! (`G[n]` has exponent `n`) and the anchor is reduced coordinate-wise modulo
//! `G[n]`, so two cosets are equal as sets iff they are equal as values.

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{Coord, Element, GroupDescriptor, Summand, Value};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub type GroupRef = Arc<GroupDescriptor>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    order: u64,
    anchor: Element,
    group: GroupRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementarySet {
    Empty,
    Coset(Coset),
}

/// JSON form of a coset.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CosetJson {
    pub anchor: Element,
    pub order: u64,
}

/// Representative of `x + G[n]`, the same for every element of the coset.
pub(crate) fn reduce_mod_torsion(x: &Element, n: u64) -> Element {
    if n == 0 {
        return Element::zero();
    }
    x.map_values(|c, v| match (c.summand, v) {
        (Summand::Free, _) | (Summand::Rational, _) => Some(v.clone()),
        (Summand::Quasicyclic { p }, Value::Frac(q)) => {
            // G[n] meets this coordinate in the multiples of 1/p^t
            let t = arith::valuation(p, n);
            let scale = BigInt::from(p).pow(t);
            let scaled = q * BigRational::from(scale.clone());
            let frac = &scaled - scaled.floor();
            Some(Value::Frac(frac / BigRational::from(scale)))
        }
        (Summand::Cyclic { p, s }, Value::Residue(r)) => {
            let t = s.min(arith::valuation(p, n));
            Some(Value::Residue(r % arith::pow(p, s - t)))
        }
        _ => unreachable!("value kind matches summand"),
    })
}

impl Coset {
    /// `anchor + G[order]`, canonicalized.
    pub fn new(group: GroupRef, anchor: Element, order: u64) -> Result<Coset> {
        group.check_element(&anchor)?;
        let order = group.canonical_torsion_order(order);
        let anchor = reduce_mod_torsion(&anchor, order);
        Ok(Coset {
            order,
            anchor,
            group,
        })
    }

    pub fn subgroup(group: GroupRef, order: u64) -> Coset {
        Coset::new(group, Element::zero(), order).expect("zero lies in every group")
    }

    pub fn point(group: GroupRef, x: Element) -> Result<Coset> {
        Coset::new(group, x, 1)
    }

    pub fn whole(group: GroupRef) -> Coset {
        Coset::subgroup(group, 0)
    }

    pub fn anchor(&self) -> &Element {
        &self.anchor
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn is_singleton(&self) -> bool {
        self.order == 1
    }

    pub fn is_whole_group(&self) -> bool {
        self.order == self.group.exponent()
    }

    pub fn is_finite(&self) -> bool {
        self.group.torsion_subgroup(self.order).is_finite()
    }

    /// Number of elements when finite.
    pub fn cardinality(&self) -> Option<u64> {
        self.group.torsion_subgroup(self.order).order()
    }

    /// Whether the coset is an irreducible closed set: `eo(G[n]) = n`.
    pub fn is_irreducible(&self) -> bool {
        self.group.torsion_subgroup(self.order).essential_order() == self.order
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.group.contains(x) && x.sub(&self.anchor).in_torsion(self.order)
    }

    fn same_group(&self, other: &Coset) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(Error::MixedGroups)
        }
    }

    /// `G[self.order] ⊆ G[other.order]`.
    fn torsion_within(&self, other: &Coset) -> bool {
        self.group
            .canonical_torsion_order(arith::gcd(self.order, other.order))
            == self.order
    }

    pub fn subset_of(&self, other: &Coset) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.torsion_within(other) && self.anchor.sub(&other.anchor).in_torsion(other.order))
    }

    pub fn translate(&self, a: &Element) -> Result<Coset> {
        Coset::new(self.group.clone(), self.anchor.add(a), self.order)
    }

    pub fn negate(&self) -> Coset {
        Coset::new(self.group.clone(), self.anchor.negate(), self.order)
            .expect("negation stays in the group")
    }

    pub fn intersect(&self, other: &Coset) -> Result<ElementarySet> {
        self.same_group(other)?;
        let (n, m) = (self.order, other.order);
        if n == 0 {
            return Ok(ElementarySet::Coset(other.clone()));
        }
        if m == 0 {
            return Ok(ElementarySet::Coset(self.clone()));
        }
        let l = arith::lcm(n, m);
        let t = other.anchor.sub(&self.anchor);
        if !t.in_torsion(l) {
            return Ok(ElementarySet::Empty);
        }
        // t = u(l/n)t + v(l/m)t with the first term in G[n], the second in G[m]
        let (g, u, _) = arith::ext_gcd((l / n) as i128, (l / m) as i128);
        debug_assert_eq!(g, 1);
        let shift = BigInt::from(u) * BigInt::from(l / n);
        let z0 = self.anchor.add(&t.scalar_mul_big(&shift));
        Ok(ElementarySet::Coset(Coset::new(
            self.group.clone(),
            z0,
            arith::gcd(n, m),
        )?))
    }

    pub fn minkowski_sum(&self, other: &Coset) -> Result<Coset> {
        self.same_group(other)?;
        Coset::new(
            self.group.clone(),
            self.anchor.add(&other.anchor),
            arith::lcm(self.order, other.order),
        )
    }

    /// `{x : kx ∈ self}`.
    pub fn preimage_mul(&self, k: i64) -> Result<ElementarySet> {
        let n = self.order;
        if k == 0 {
            return Ok(if self.anchor.in_torsion(n) {
                ElementarySet::Coset(Coset::whole(self.group.clone()))
            } else {
                ElementarySet::Empty
            });
        }
        let mut x0 = Element::zero();
        for (c, v) in self.anchor.coords() {
            match solve_coordinate(c, v, k, n) {
                Some(Some(value)) => x0.set(*c, value),
                Some(None) => {}
                None => return Ok(ElementarySet::Empty),
            }
        }
        let order = if n == 0 { 0 } else { k.unsigned_abs().checked_mul(n).ok_or(Error::Overflow("preimage order"))? };
        Ok(ElementarySet::Coset(Coset::new(self.group.clone(), x0, order)?))
    }

    pub fn to_json(&self) -> CosetJson {
        CosetJson {
            anchor: self.anchor.clone(),
            order: self.order,
        }
    }
}

/// Solves `k x ≡ v` modulo the `G[n]` part of coordinate `c`.
/// `None`: no solution. `Some(None)`: solved by `x = 0`.
fn solve_coordinate(c: &Coord, v: &Value, k: i64, n: u64) -> Option<Option<Value>> {
    if n == 0 {
        return Some(None);
    }
    let kb = BigInt::from(k);
    match (c.summand, v) {
        (Summand::Free, Value::Int(a)) => {
            if a.is_multiple_of(&kb) {
                Some(Some(Value::Int(a / &kb)))
            } else {
                None
            }
        }
        (Summand::Rational, Value::Frac(q)) => {
            Some(Some(Value::Frac(q / BigRational::from(kb))))
        }
        (Summand::Quasicyclic { p }, Value::Frac(q)) => {
            let pb = BigInt::from(p);
            let w = arith::valuation_i(p, k);
            let unit = &kb / pb.pow(w);
            let den = q.denom().clone();
            let inv = unit.extended_gcd(&den).x.mod_floor(&den);
            let num = (q.numer() * inv).mod_floor(&den);
            let x = BigRational::new(num, den * pb.pow(w));
            Some(Some(Value::Frac(&x - x.floor())))
        }
        (Summand::Cyclic { p, s }, Value::Residue(a)) => {
            let t = s.min(arith::valuation(p, n));
            let modulus = arith::pow(p, s - t);
            let a = a % modulus;
            let g = arith::pow(p, arith::valuation_i(p, k).min(s - t));
            if !a.is_multiple_of(g) {
                return None;
            }
            let reduced_mod = modulus / g;
            let inv = arith::mod_inverse((k / g as i64) as i128, reduced_mod)?;
            let x = ((a / g) as u128 * inv as u128 % reduced_mod as u128) as u64;
            Some(Some(Value::Residue(x)))
        }
        _ => unreachable!("value kind matches summand"),
    }
}

impl ElementarySet {
    pub fn is_empty(&self) -> bool {
        matches!(self, ElementarySet::Empty)
    }

    pub fn as_coset(&self) -> Option<&Coset> {
        match self {
            ElementarySet::Coset(c) => Some(c),
            ElementarySet::Empty => None,
        }
    }

    pub fn subset(&self, other: &ElementarySet) -> Result<bool> {
        match (self, other) {
            (ElementarySet::Empty, _) => Ok(true),
            (_, ElementarySet::Empty) => Ok(false),
            (ElementarySet::Coset(a), ElementarySet::Coset(b)) => a.subset_of(b),
        }
    }

    pub fn equals(&self, other: &ElementarySet) -> Result<bool> {
        Ok(self.subset(other)? && other.subset(self)?)
    }

    pub fn intersect(&self, other: &ElementarySet) -> Result<ElementarySet> {
        match (self, other) {
            (ElementarySet::Coset(a), ElementarySet::Coset(b)) => a.intersect(b),
            _ => Ok(ElementarySet::Empty),
        }
    }

    pub fn minkowski_sum(&self, other: &ElementarySet) -> Result<ElementarySet> {
        match (self, other) {
            (ElementarySet::Coset(a), ElementarySet::Coset(b)) => {
                Ok(ElementarySet::Coset(a.minkowski_sum(b)?))
            }
            _ => Err(Error::EmptyOperand),
        }
    }

    pub fn translate(&self, a: &Element) -> Result<ElementarySet> {
        match self {
            ElementarySet::Coset(c) => Ok(ElementarySet::Coset(c.translate(a)?)),
            ElementarySet::Empty => Ok(ElementarySet::Empty),
        }
    }

    pub fn negate(&self) -> ElementarySet {
        match self {
            ElementarySet::Coset(c) => ElementarySet::Coset(c.negate()),
            ElementarySet::Empty => ElementarySet::Empty,
        }
    }

    pub fn preimage_mul(&self, k: i64) -> Result<ElementarySet> {
        match self {
            ElementarySet::Coset(c) => c.preimage_mul(k),
            ElementarySet::Empty => Ok(ElementarySet::Empty),
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.as_coset().is_some_and(|c| c.contains(x))
    }
}

impl From<Coset> for ElementarySet {
    fn from(c: Coset) -> Self {
        ElementarySet::Coset(c)
    }
}

impl fmt::Display for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.anchor.is_zero() {
            write!(f, "G[{}]", self.order)
        } else {
            write!(f, "{} + G[{}]", self.anchor, self.order)
        }
    }
}

impl fmt::Display for ElementarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementarySet::Empty => write!(f, "{{}}"),
            ElementarySet::Coset(c) => c.fmt(f),
        }
    }
}
