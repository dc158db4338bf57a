use super::cardinal::Cardinal;
use super::element::{Coord, Element, Summand};
use crate::arith;
use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Structural description of a countable abelian group as a direct sum of
/// `Z`, `Q`, `Z(p^inf)` and `Z(p^s)` summands with multiplicities.
///
/// Only nonzero multiplicities are stored and there are finitely many of them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupDescriptor {
    summands: BTreeMap<Summand, Cardinal>,
}

/// Result of [`GroupDescriptor::is_irreducible_torsion`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionIrreducibility {
    pub order: u64,
    pub irreducible: bool,
    /// `(p, s, kappa)`: the leading Ulm-Kaplansky invariant of `G[n]` at each
    /// prime `p | n`, where `s = v_p(n)`.
    pub leading: Vec<(u64, u32, Cardinal)>,
    /// For `n = 0`, a summand witnessing that `G` is unbounded.
    pub unbounded_witness: Option<String>,
}

impl GroupDescriptor {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Adds `mult` copies of `summand`, merging with existing copies.
    pub fn with(mut self, summand: Summand, mult: Cardinal) -> Result<Self> {
        match summand {
            Summand::Quasicyclic { p } | Summand::Cyclic { p, .. } if !arith::is_prime(p) => {
                return Err(Error::NotPrime(p));
            }
            Summand::Cyclic { p, s } => {
                if s == 0 {
                    return Err(Error::BadCyclicOrder(1));
                }
                // residues and sums of two residues must fit in u64 arithmetic
                match arith::checked_pow(p, s) {
                    Some(m) if m < (1 << 62) => {}
                    _ => return Err(Error::Overflow("cyclic summand order")),
                }
            }
            _ => {}
        }
        if !mult.is_zero() {
            let cur = self.summands.get(&summand).copied().unwrap_or_default();
            self.summands.insert(summand, cur + mult);
        }
        Ok(self)
    }

    pub fn with_free(self, mult: Cardinal) -> Result<Self> {
        self.with(Summand::Free, mult)
    }

    pub fn with_rational(self, mult: Cardinal) -> Result<Self> {
        self.with(Summand::Rational, mult)
    }

    pub fn with_quasicyclic(self, p: u64, mult: Cardinal) -> Result<Self> {
        self.with(Summand::Quasicyclic { p }, mult)
    }

    /// Adds `mult` copies of `Z(n)`, split into prime-power summands.
    pub fn with_cyclic_order(mut self, n: u64, mult: Cardinal) -> Result<Self> {
        if n == 0 {
            return self.with_free(mult);
        }
        for (p, s) in arith::factor(n) {
            self = self.with(Summand::Cyclic { p, s }, mult)?;
        }
        Ok(self)
    }

    pub fn multiplicity(&self, summand: Summand) -> Cardinal {
        self.summands.get(&summand).copied().unwrap_or_default()
    }

    pub fn summands(&self) -> impl Iterator<Item = (Summand, Cardinal)> + '_ {
        self.summands.iter().map(|(s, c)| (*s, *c))
    }

    pub fn is_trivial(&self) -> bool {
        self.summands.is_empty()
    }

    /// Primes carrying any torsion summand.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.summands.keys().filter_map(|s| s.prime()).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    pub fn is_bounded(&self) -> bool {
        self.summands
            .keys()
            .all(|s| matches!(s, Summand::Cyclic { .. }))
    }

    pub fn is_finite(&self) -> bool {
        self.summands
            .iter()
            .all(|(s, c)| matches!(s, Summand::Cyclic { .. }) && !c.is_infinite())
    }

    /// Number of elements of a finite group.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        let mut n: u64 = 1;
        for (s, c) in &self.summands {
            let m = s.modulus().unwrap();
            for _ in 0..c.finite().unwrap() {
                n = n.checked_mul(m)?;
            }
        }
        Some(n)
    }

    /// Checks every coordinate of `x` addresses an existing copy.
    pub fn check_element(&self, x: &Element) -> Result<()> {
        for (c, _) in x.coords() {
            let m = self.multiplicity(c.summand);
            if !m.admits_index(c.index) {
                return Err(Error::CoordinateOutOfRange {
                    coord: c.to_string(),
                    multiplicity: m.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.check_element(x).is_ok()
    }

    /// Descriptor of `G[n] = {x : nx = 0}`; `G[0] = G`.
    pub fn torsion_subgroup(&self, n: u64) -> GroupDescriptor {
        if n == 0 {
            return self.clone();
        }
        let mut out = GroupDescriptor::trivial();
        for (s, c) in &self.summands {
            let part = match *s {
                Summand::Free | Summand::Rational => None,
                Summand::Quasicyclic { p } => {
                    let t = arith::valuation(p, n);
                    (t > 0).then_some(Summand::Cyclic { p, s: t })
                }
                Summand::Cyclic { p, s } => {
                    let t = s.min(arith::valuation(p, n));
                    (t > 0).then_some(Summand::Cyclic { p, s: t })
                }
            };
            if let Some(part) = part {
                out = out.with(part, *c).expect("torsion summand stays valid");
            }
        }
        out
    }

    /// Descriptor of `nG` for `n >= 1`.
    pub fn multiply_group(&self, n: u64) -> Result<GroupDescriptor> {
        if n == 0 {
            return Err(Error::ZeroMultiplier);
        }
        let mut out = GroupDescriptor::trivial();
        for (s, c) in &self.summands {
            let part = match *s {
                Summand::Cyclic { p, s } => {
                    let v = arith::valuation(p, n);
                    (s > v).then(|| Summand::Cyclic { p, s: s - v })
                }
                other => Some(other),
            };
            if let Some(part) = part {
                out = out.with(part, *c)?;
            }
        }
        Ok(out)
    }

    /// The exponent, `0` when unbounded and `1` for the trivial group.
    pub fn exponent(&self) -> u64 {
        let mut e = 1;
        for s in self.summands.keys() {
            match s {
                Summand::Cyclic { p, s } => e = arith::lcm(e, arith::pow(*p, *s)),
                _ => return 0,
            }
        }
        e
    }

    /// Smallest `n >= 1` with `nG` finite, `0` when unbounded.
    pub fn essential_order(&self) -> u64 {
        if !self.is_bounded() {
            return 0;
        }
        let mut top: BTreeMap<u64, u32> = BTreeMap::new();
        for (s, c) in &self.summands {
            if let (Summand::Cyclic { p, s }, true) = (s, c.is_infinite()) {
                let e = top.entry(*p).or_default();
                *e = (*e).max(*s);
            }
        }
        top.into_iter().map(|(p, s)| arith::pow(p, s)).product()
    }

    /// The unique `n` with `G[m] = G[n]` and `G[n]` of exponent `n`.
    pub fn canonical_torsion_order(&self, m: u64) -> u64 {
        self.torsion_subgroup(m).exponent()
    }

    pub fn is_canonical_order(&self, n: u64) -> bool {
        self.canonical_torsion_order(n) == n
    }

    pub fn require_canonical(&self, n: u64) -> Result<()> {
        let canonical = self.canonical_torsion_order(n);
        if canonical == n {
            Ok(())
        } else {
            Err(Error::NonCanonicalOrder { given: n, canonical })
        }
    }

    /// Whether `G[n]` is irreducible of exponent `n`, i.e. `eo(G[n]) = n`.
    pub fn is_irreducible_torsion(&self, n: u64) -> Result<TorsionIrreducibility> {
        self.require_canonical(n)?;
        let sub = self.torsion_subgroup(n);
        let irreducible = sub.essential_order() == n;
        let mut leading = Vec::new();
        let mut unbounded_witness = None;
        if n == 0 {
            unbounded_witness = self
                .summands
                .keys()
                .find(|s| !matches!(s, Summand::Cyclic { .. }))
                .map(|s| s.to_string());
        } else {
            for (p, s) in arith::factor(n) {
                leading.push((p, s, sub.multiplicity(Summand::Cyclic { p, s })));
            }
        }
        Ok(TorsionIrreducibility {
            order: n,
            irreducible,
            leading,
            unbounded_witness,
        })
    }

    /// `r_p(G)`: the dimension of `G[p]` over `Z/p`.
    pub fn p_rank(&self, p: u64) -> Cardinal {
        self.summands
            .iter()
            .filter(|(s, _)| s.prime() == Some(p))
            .fold(Cardinal::ZERO, |acc, (_, c)| acc + *c)
    }

    /// Every `G[p]` is finite.
    pub fn is_almost_torsion_free(&self) -> bool {
        self.primes().into_iter().all(|p| !self.p_rank(p).is_infinite())
    }

    /// The Zariski topology is cofinite: almost torsion-free or of prime exponent.
    pub fn is_cofinite_zariski(&self) -> bool {
        self.is_almost_torsion_free() || arith::is_prime(self.exponent())
    }

    /// `G[n]` is infinite.
    pub fn torsion_is_infinite(&self, n: u64) -> bool {
        !self.torsion_subgroup(n).is_finite()
    }

    /// Coordinates of copies with index below `window` (all copies of
    /// finite-multiplicity summands below the window).
    pub fn truncated_coords(&self, window: u64) -> Vec<Coord> {
        let mut out = Vec::new();
        for (s, c) in &self.summands {
            let count = match c {
                Cardinal::Fin(k) => (*k).min(window),
                Cardinal::Omega => window,
            };
            for i in 0..count {
                out.push(Coord::new(*s, i));
            }
        }
        out
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .summands
            .iter()
            .map(|(s, c)| {
                let base = match s {
                    Summand::Quasicyclic { p } => format!("Zp({p},inf)"),
                    other => other.to_string(),
                };
                match c {
                    Cardinal::Fin(1) => base,
                    c => format!("{base}^{c}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    free: Cardinal,
    rational: Cardinal,
    quasicyclic: BTreeMap<String, Cardinal>,
    cyclic: BTreeMap<String, Cardinal>,
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut j = DescriptorJson {
            free: self.multiplicity(Summand::Free),
            rational: self.multiplicity(Summand::Rational),
            quasicyclic: BTreeMap::new(),
            cyclic: BTreeMap::new(),
        };
        for (sm, c) in &self.summands {
            match sm {
                Summand::Quasicyclic { p } => {
                    j.quasicyclic.insert(p.to_string(), *c);
                }
                Summand::Cyclic { p, s } => {
                    j.cyclic.insert(format!("{p}^{s}"), *c);
                }
                _ => {}
            }
        }
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DescriptorJson::deserialize(d)?;
        let mut g = GroupDescriptor::trivial()
            .with_free(j.free)
            .and_then(|g| g.with_rational(j.rational))
            .map_err(D::Error::custom)?;
        for (p, c) in j.quasicyclic {
            let p: u64 = p.parse().map_err(D::Error::custom)?;
            g = g.with_quasicyclic(p, c).map_err(D::Error::custom)?;
        }
        for (k, c) in j.cyclic {
            let (p, s) = k
                .split_once('^')
                .ok_or_else(|| D::Error::custom(format!("bad cyclic key {k}")))?;
            let p: u64 = p.parse().map_err(D::Error::custom)?;
            let s: u32 = s.parse().map_err(D::Error::custom)?;
            g = g.with(Summand::Cyclic { p, s }, c).map_err(D::Error::custom)?;
        }
        Ok(g)
    }
}
