//! Explicit finite groups `Z(q1) + ... + Z(qk)` (prime powers `q_i`) with
//! elements as index-encoded residue tuples, and subsets as bitsets.

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{Cardinal, Coord, Element, GroupDescriptor, Summand, Value};

/// A subset of a finite instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn empty(size: usize) -> Self {
        Bits(vec![0; size.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.has(i))
    }
}

/// A finite abelian group in primary form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupInstance {
    moduli: Vec<u64>,
    coords: Vec<Coord>,
    order: usize,
}

impl FiniteGroupInstance {
    /// `Z(q1) + ... + Z(qk)`; each `q` must be a prime power.
    pub fn new(mut moduli: Vec<u64>) -> Result<Self> {
        moduli.sort_unstable();
        let mut next: std::collections::BTreeMap<u64, u64> = Default::default();
        let mut coords = Vec::new();
        let mut order: usize = 1;
        for &q in &moduli {
            let (p, s) = match arith::factor(q).as_slice() {
                [(p, s)] => (*p, *s),
                _ => return Err(Error::BadCyclicOrder(q)),
            };
            let idx = next.entry(q).or_default();
            coords.push(Coord::new(Summand::Cyclic { p, s }, *idx));
            *idx += 1;
            order = order.checked_mul(q as usize).ok_or(Error::Overflow("instance order"))?;
        }
        Ok(FiniteGroupInstance { moduli, coords, order })
    }

    /// The finite group obtained by replacing every omega multiplicity of a
    /// bounded descriptor by `t`.
    pub fn truncation(desc: &GroupDescriptor, t: u64) -> Result<Self> {
        let mut moduli = Vec::new();
        for (s, c) in desc.summands() {
            let q = s.modulus().ok_or_else(|| Error::Config(format!("{s} has no finite truncation")))?;
            let k = match c {
                Cardinal::Fin(k) => k,
                Cardinal::Omega => t,
            };
            moduli.extend(std::iter::repeat_n(q, k as usize));
        }
        Self::new(moduli)
    }

    /// All groups of order at most `cap`, one per isomorphism class.
    pub fn all_up_to(cap: u64) -> Vec<Self> {
        let mut powers: Vec<u64> = (2..=cap).filter(|&q| arith::factor(q).len() == 1).collect();
        powers.sort_unstable();
        let mut out = Vec::new();
        fn rec(powers: &[u64], start: usize, prod: u64, cap: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            out.push(cur.clone());
            for i in start..powers.len() {
                let q = powers[i];
                if prod * q > cap {
                    break;
                }
                cur.push(q);
                rec(powers, i, prod * q, cap, cur, out);
                cur.pop();
            }
        }
        let mut lists = Vec::new();
        rec(&powers, 0, 1, cap, &mut Vec::new(), &mut lists);
        for l in lists {
            out.push(Self::new(l).expect("prime powers"));
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1, |acc, &q| arith::lcm(acc, q))
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        let mut g = GroupDescriptor::trivial();
        let mut counts: std::collections::BTreeMap<u64, u64> = Default::default();
        for &q in &self.moduli {
            *counts.entry(q).or_default() += 1;
        }
        for (q, k) in counts {
            g = g.with_cyclic_order(q, Cardinal::Fin(k)).expect("prime power");
        }
        g
    }

    pub fn decode(&self, mut i: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&q| {
                let r = (i % q as usize) as u64;
                i /= q as usize;
                r
            })
            .collect()
    }

    pub fn encode(&self, t: &[u64]) -> usize {
        t.iter()
            .zip(&self.moduli)
            .rev()
            .fold(0, |acc, (&r, &q)| acc * q as usize + (r % q) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.decode(a), self.decode(b));
        let t: Vec<u64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        self.encode(&t)
    }

    pub fn neg(&self, a: usize) -> usize {
        let t: Vec<u64> = self.decode(a).iter().zip(&self.moduli).map(|(u, q)| (q - u) % q).collect();
        self.encode(&t)
    }

    pub fn mul(&self, a: usize, k: i64) -> usize {
        let t: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.moduli)
            .map(|(&u, &q)| (u as i128 * k as i128).rem_euclid(q as i128) as u64)
            .collect();
        self.encode(&t)
    }

    pub fn element(&self, i: usize) -> Element {
        Element::from_coords(
            self.decode(i)
                .into_iter()
                .zip(&self.coords)
                .map(|(r, c)| (*c, Value::Residue(r))),
        )
    }

    /// Index of an element supported on the instance's coordinates.
    pub fn index_of(&self, x: &Element) -> Option<usize> {
        let mut t = vec![0; self.moduli.len()];
        for (c, v) in x.coords() {
            let slot = self.coords.iter().position(|d| d == c)?;
            match v {
                Value::Residue(r) => t[slot] = *r,
                _ => return None,
            }
        }
        Some(self.encode(&t))
    }

    pub fn bits_where(&self, f: impl Fn(usize) -> bool) -> Bits {
        let mut b = Bits::empty(self.order);
        for i in (0..self.order).filter(|&i| f(i)) {
            b.insert(i);
        }
        b
    }

    /// `{x : n x = 0}`, with `n = 0` giving the whole group.
    pub fn torsion(&self, n: u64) -> Bits {
        self.bits_where(|i| self.mul(i, n as i64) == 0)
    }

    /// `a + G[n]`.
    pub fn coset(&self, a: usize, n: u64) -> Bits {
        let na = self.mul(a, n as i64);
        self.bits_where(|i| self.mul(i, n as i64) == na)
    }

    pub fn sumset(&self, a: &Bits, b: &Bits) -> Bits {
        let mut out = Bits::empty(self.order);
        for x in a.iter() {
            for y in b.iter() {
                out.insert(self.add(x, y));
            }
        }
        out
    }

    pub fn image(&self, a: &Bits, f: impl Fn(usize) -> usize) -> Bits {
        let mut out = Bits::empty(self.order);
        for x in a.iter() {
            out.insert(f(x));
        }
        out
    }
}

impl std::fmt::Display for FiniteGroupInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.moduli.iter().map(|q| format!("Z({q})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
