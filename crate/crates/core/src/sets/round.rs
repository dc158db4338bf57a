//! Round generators: faithfully indexed sequences `S ⊆ G[n]` meeting every
//! coset of `G[d]`, `d` a proper divisor of `n`, in a finite set.

use crate::arith;
use crate::config::Config;
use crate::coset::GroupRef;
use crate::error::{Error, Result};
use crate::group::{Coord, Element, Summand, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoundGenerator {
    group: GroupRef,
    order: u64,
    kind: GeneratorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Element `k` puts `value` at index `k` of every leg summand.
    CanonicalBasis { legs: Vec<(Summand, Value)> },
    /// `(k+1) * unit` on `Z[0]` or `Q[0]`.
    CyclicMultiples { coord: Coord },
    /// `1/p^(k+1)` on `Zp(p)[0]`.
    GreedyEscape { p: u64 },
    Scaled { factor: i64, inner: Box<RoundGenerator> },
    /// Explicit user prefix.
    Listed { elements: Vec<Element> },
    /// One half of the interleaved greedy split of `inner`.
    Trimmed { inner: Box<RoundGenerator>, half: u8 },
}

impl RoundGenerator {
    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    /// The `n` of the round set.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    /// Number of elements available, `None` when unlimited.
    pub fn available(&self) -> Option<usize> {
        match &self.kind {
            GeneratorKind::Listed { elements } => Some(elements.len()),
            GeneratorKind::Scaled { inner, .. } => inner.available(),
            GeneratorKind::Trimmed { inner, .. } => inner.available().map(|n| n / 2),
            _ => None,
        }
    }

    /// A user sequence. Its order tag is checked by [`certify_round`].
    pub fn listed(group: GroupRef, order: u64, elements: Vec<Element>) -> Result<Self> {
        for x in &elements {
            group.check_element(x)?;
        }
        Ok(RoundGenerator {
            group,
            order,
            kind: GeneratorKind::Listed { elements },
        })
    }

    /// `factor * S`, tagged with the order of `factor` times an order-`n`
    /// element.
    pub fn scaled(&self, factor: i64) -> Result<Self> {
        if factor == 0 {
            return Err(Error::ZeroMultiplier);
        }
        let n = self.order;
        let order = if n == 0 {
            0
        } else {
            n / arith::gcd(n, factor.unsigned_abs())
        };
        Ok(RoundGenerator {
            group: self.group.clone(),
            order: self.group.canonical_torsion_order(order),
            kind: GeneratorKind::Scaled {
                factor,
                inner: Box::new(self.clone()),
            },
        })
    }

    /// Half `0` or `1` of the greedy split computed by [`split_trim`].
    pub fn trimmed(&self, half: u8) -> Result<Self> {
        if half > 1 {
            return Err(Error::Config(format!("trim half must be 0 or 1, got {half}")));
        }
        Ok(RoundGenerator {
            group: self.group.clone(),
            order: self.order,
            kind: GeneratorKind::Trimmed {
                inner: Box::new(self.clone()),
                half,
            },
        })
    }

    /// The first `len` elements, fewer if the generator is exhausted.
    pub fn prefix(&self, len: usize) -> Result<Vec<Element>> {
        Ok(match &self.kind {
            GeneratorKind::CanonicalBasis { legs } => (0..len as u64)
                .map(|k| Element::from_coords(legs.iter().map(|(s, v)| (Coord::new(*s, k), v.clone()))))
                .collect(),
            GeneratorKind::CyclicMultiples { coord } => (1..=len as i64)
                .map(|k| Element::generator(*coord).scalar_mul(k))
                .collect(),
            GeneratorKind::GreedyEscape { p } => {
                let coord = Coord::new(Summand::Quasicyclic { p: *p }, 0);
                let mut den = BigInt::one();
                (0..len)
                    .map(|_| {
                        den *= *p;
                        Element::unit(coord, Value::Frac(BigRational::new(BigInt::one(), den.clone())))
                    })
                    .collect()
            }
            GeneratorKind::Scaled { factor, inner } => {
                inner.prefix(len)?.iter().map(|x| x.scalar_mul(*factor)).collect()
            }
            GeneratorKind::Listed { elements } => elements.iter().take(len).cloned().collect(),
            GeneratorKind::Trimmed { inner, half } => {
                let picks = greedy_split(inner, 2 * len + 2)?;
                picks
                    .elements
                    .into_iter()
                    .skip(*half as usize)
                    .step_by(2)
                    .take(len)
                    .collect()
            }
        })
    }

    /// Fibre-size bound with a structural proof, if the kind has one.
    fn structural_bound(&self, window: u64) -> Option<usize> {
        match &self.kind {
            GeneratorKind::CanonicalBasis { .. } | GeneratorKind::CyclicMultiples { .. } => Some(1),
            // elements of order at most p^v(d) all collapse under d
            GeneratorKind::GreedyEscape { p } => {
                let mut v = 0;
                while arith::checked_pow(*p, v + 1).is_some_and(|q| q <= window) {
                    v += 1;
                }
                Some(v.max(1) as usize)
            }
            _ => None,
        }
    }

    pub fn is_structural(&self) -> bool {
        self.structural_bound(1).is_some()
    }
}

impl fmt::Display for RoundGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GeneratorKind::CanonicalBasis { .. }
            | GeneratorKind::CyclicMultiples { .. }
            | GeneratorKind::GreedyEscape { .. } => write!(f, "round({})", self.order),
            GeneratorKind::Scaled { factor, inner } => write!(f, "{factor}*{inner}"),
            GeneratorKind::Listed { elements } => {
                let items: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
                write!(f, "seq({}; {})", self.order, items.join(", "))
            }
            GeneratorKind::Trimmed { inner, half } => write!(f, "trim({inner}, {half})"),
        }
    }
}

/// The standard round set of order `n`, which exists iff `eo(G[n]) = n`.
pub fn make_round(group: &GroupRef, n: u64) -> Result<RoundGenerator> {
    let fail = |reason: String| Error::NoRoundSet { order: n, reason };
    if n == 1 {
        return Err(fail("G[1] is a single point".into()));
    }
    if n == 0 && group.is_bounded() {
        return Err(fail(format!("the group is bounded (exponent {})", group.exponent())));
    }
    group.require_canonical(n)?;
    let eo = group.torsion_subgroup(n).essential_order();
    if eo != n {
        return Err(fail(format!("eo(G[{n}]) = {eo}")));
    }
    let kind = if n == 0 {
        let has = |s: Summand| !group.multiplicity(s).is_zero();
        if has(Summand::Free) {
            GeneratorKind::CyclicMultiples {
                coord: Coord::new(Summand::Free, 0),
            }
        } else if has(Summand::Rational) {
            GeneratorKind::CyclicMultiples {
                coord: Coord::new(Summand::Rational, 0),
            }
        } else {
            let p = group
                .summands()
                .find_map(|(s, _)| match s {
                    Summand::Quasicyclic { p } => Some(p),
                    _ => None,
                })
                .expect("unbounded groups have a non-cyclic summand");
            GeneratorKind::GreedyEscape { p }
        }
    } else {
        let mut legs = Vec::new();
        for (p, e) in arith::factor(n) {
            // smallest cyclic summand of multiplicity omega reaching p^e,
            // else an omega family of Z(p^inf)
            let cyclic = group.summands().find_map(|(s, c)| match s {
                Summand::Cyclic { p: q, s } if q == p && s >= e && c.is_infinite() => Some(s),
                _ => None,
            });
            let leg = match cyclic {
                Some(s) => (Summand::Cyclic { p, s }, Value::Residue(arith::pow(p, s - e))),
                None => (
                    Summand::Quasicyclic { p },
                    Value::Frac(BigRational::new(BigInt::one(), BigInt::from(arith::pow(p, e)))),
                ),
            };
            legs.push(leg);
        }
        GeneratorKind::CanonicalBasis { legs }
    };
    Ok(RoundGenerator {
        group: group.clone(),
        order: n,
        kind,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RoundCertificate {
    pub order: u64,
    pub prefix_len: usize,
    /// The divisors `d` whose fibres were counted.
    pub divisors: Vec<u64>,
    pub max_count: usize,
    pub bound: usize,
    pub structural: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub divisor: u64,
    pub value: Element,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RoundVerdict {
    Certified(RoundCertificate),
    Refuted(Refutation),
}

impl RoundVerdict {
    pub fn certificate(&self) -> Option<&RoundCertificate> {
        match self {
            RoundVerdict::Certified(c) => Some(c),
            RoundVerdict::Refuted(_) => None,
        }
    }
}

/// Counts `|{x in prefix : d x = g}|` for every proper divisor `d` of the
/// order (for order 0, every `d` in `1..=zero_window`) and checks injectivity.
pub fn certify_round(gen: &RoundGenerator, cfg: &Config) -> Result<RoundVerdict> {
    let n = gen.order;
    let prefix = gen.prefix(cfg.prefix_len)?;
    for x in &prefix {
        if !gen.group.contains(x) || !x.in_torsion(n) {
            return Err(Error::OutsideTorsion {
                element: x.to_string(),
                order: n,
            });
        }
    }
    let mut seen: HashMap<&Element, usize> = HashMap::new();
    for (i, x) in prefix.iter().enumerate() {
        if let Some(&j) = seen.get(x) {
            return Ok(RoundVerdict::Refuted(Refutation {
                divisor: 1,
                value: x.clone(),
                indices: vec![j, i],
            }));
        }
        seen.insert(x, i);
    }
    let divisors: Vec<u64> = if n == 0 {
        (1..=cfg.zero_window).collect()
    } else {
        arith::divisors(n).into_iter().filter(|&d| d != n).collect()
    };
    let bound = gen.structural_bound(cfg.zero_window).unwrap_or(cfg.count_bound);
    let per_divisor: Vec<(usize, Option<Refutation>)> = divisors
        .par_iter()
        .map(|&d| {
            let mut fibres: HashMap<Element, Vec<usize>> = HashMap::new();
            for (i, x) in prefix.iter().enumerate() {
                fibres.entry(x.scalar_mul(d as i64)).or_default().push(i);
            }
            let max = fibres.values().map(Vec::len).max().unwrap_or(0);
            let worst = fibres
                .into_iter()
                .filter(|(_, ix)| ix.len() > bound)
                .min_by_key(|(_, ix)| ix[0])
                .map(|(value, indices)| Refutation {
                    divisor: d,
                    value,
                    indices,
                });
            (max, worst)
        })
        .collect();
    let mut max_count = 0;
    for (max, worst) in per_divisor {
        if let Some(r) = worst {
            return Ok(RoundVerdict::Refuted(r));
        }
        max_count = max_count.max(max);
    }
    Ok(RoundVerdict::Certified(RoundCertificate {
        order: n,
        prefix_len: prefix.len(),
        divisors,
        max_count,
        bound,
        structural: gen.is_structural(),
    }))
}

/// Result of the interleaved greedy construction on a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrimCertificate {
    /// Source indices picked, in order; even positions form the first half.
    pub schedule: Vec<usize>,
    /// Largest `|Y0 ∩ (a + Y1)|` over all `a`, on the computed prefixes.
    pub max_translate_overlap: usize,
    pub checked: usize,
}

struct Picks {
    elements: Vec<Element>,
    schedule: Vec<usize>,
}

/// Picks `x_k` from the source avoiding `{x_0..x_(k-1)} + (F_k ∪ -F_k)`,
/// where `F_k` lists the first `k+1` differences of source elements.
fn greedy_split(source: &RoundGenerator, picks: usize) -> Result<Picks> {
    let cap = 64 * picks + 1024;
    let mut len = (4 * picks).max(16).min(cap);
    loop {
        let xs = source.prefix(len)?;
        let exhausted = xs.len() < len;
        // F enumerates 0, x1-x0, x2-x0, x2-x1, x3-x0, ...
        let mut diffs: Vec<Element> = vec![Element::zero()];
        let mut next_pair = (1usize, 0usize);
        let mut forbidden: HashSet<Element> = HashSet::from([Element::zero()]);
        let mut chosen: Vec<Element> = Vec::new();
        let mut schedule = Vec::new();
        let mut cursor = 0;
        while chosen.len() < picks && cursor < xs.len() {
            let k = chosen.len();
            while diffs.len() < k + 1 && next_pair.0 < xs.len() {
                let (i, j) = next_pair;
                let h = xs[i].sub(&xs[j]);
                forbidden.insert(h.negate());
                forbidden.insert(h.clone());
                diffs.push(h);
                next_pair = if j + 1 < i { (i, j + 1) } else { (i + 1, 0) };
            }
            let x = &xs[cursor];
            if !chosen.iter().any(|c| forbidden.contains(&x.sub(c))) {
                chosen.push(x.clone());
                schedule.push(cursor);
            }
            cursor += 1;
        }
        if chosen.len() == picks {
            return Ok(Picks {
                elements: chosen,
                schedule,
            });
        }
        if exhausted || len >= cap {
            return Err(Error::PrefixExhausted(xs.len()));
        }
        len = (len * 2).min(cap);
    }
}

/// Splits a generator into two disjoint halves `Y0`, `Y1` such that every
/// `(a0 + Y0) ∩ (a1 + Y1)` is finite. The certificate records the pick
/// schedule and the largest translate overlap on a prefix of `len` elements.
pub fn split_trim(gen: &RoundGenerator, len: usize) -> Result<(RoundGenerator, RoundGenerator, TrimCertificate)> {
    let picks = greedy_split(gen, 2 * len)?;
    let (y0, y1): (Vec<_>, Vec<_>) = picks.elements.iter().enumerate().partition(|(i, _)| i % 2 == 0);
    let mut overlap: HashMap<Element, usize> = HashMap::new();
    for (_, a) in &y0 {
        for (_, b) in &y1 {
            *overlap.entry(a.sub(b)).or_default() += 1;
        }
    }
    let cert = TrimCertificate {
        schedule: picks.schedule,
        max_translate_overlap: overlap.values().copied().max().unwrap_or(0),
        checked: len,
    };
    Ok((gen.trimmed(0)?, gen.trimmed(1)?, cert))
}
