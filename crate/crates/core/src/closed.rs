//! Algebraic sets (the Zariski-closed sets): finite irredundant unions of
//! cosets of torsion subgroups, with irreducible and connected components and
//! combinatorial dimension.

use crate::arith;
use crate::coset::{Coset, CosetJson, ElementarySet, GroupRef};
use crate::error::{Error, Result};
use crate::group::{Element, GroupDescriptor, Summand, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_MAX_TRANSVERSAL: usize = 4096;

/// A finite union of nonempty cosets forming an antichain under inclusion,
/// sorted by order and then anchor. The empty list is the empty set.
///
/// The antichain is irredundant but a set may have several such forms (a
/// reducible coset next to its pieces); [`AlgebraicSet::set_eq`] compares
/// the underlying sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicSet {
    group: GroupRef,
    parts: Vec<Coset>,
}

/// Combinatorial dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimValue {
    /// Dimension of the empty set.
    Empty,
    Finite(u32),
    Infinite,
}

impl fmt::Display for DimValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimValue::Empty => write!(f, "-1"),
            DimValue::Finite(k) => write!(f, "{k}"),
            DimValue::Infinite => write!(f, "inf"),
        }
    }
}

impl AlgebraicSet {
    pub fn empty(group: GroupRef) -> Self {
        AlgebraicSet {
            group,
            parts: Vec::new(),
        }
    }

    pub fn whole(group: GroupRef) -> Self {
        let c = Coset::whole(group.clone());
        AlgebraicSet {
            group,
            parts: vec![c],
        }
    }

    pub fn from_coset(c: Coset) -> Self {
        AlgebraicSet {
            group: c.group().clone(),
            parts: vec![c],
        }
    }

    /// Drops empty parts and parts contained in another part.
    pub fn canonicalize(group: GroupRef, parts: Vec<ElementarySet>) -> Result<Self> {
        let mut cosets = Vec::with_capacity(parts.len());
        for p in parts {
            if let ElementarySet::Coset(c) = p {
                if c.group() != &group {
                    return Err(Error::MixedGroups);
                }
                cosets.push(c);
            }
        }
        Ok(Self::from_cosets(group, cosets))
    }

    pub(crate) fn from_cosets(group: GroupRef, mut cosets: Vec<Coset>) -> Self {
        cosets.sort();
        cosets.dedup();
        // Distinct cosets of one subgroup are disjoint, so `c` is redundant
        // iff for some larger subgroup the coset of `c`'s anchor is present.
        let mut by_order: BTreeMap<u64, HashSet<Coset>> = BTreeMap::new();
        for c in &cosets {
            by_order.entry(c.order()).or_default().insert(c.clone());
        }
        let orders: Vec<u64> = by_order.keys().copied().collect();
        let mut larger: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &a in &orders {
            let sub = group.torsion_subgroup(a);
            let above = orders
                .iter()
                .copied()
                .filter(|&b| b != a && group.torsion_subgroup(b).torsion_subgroup(a) == sub)
                .collect();
            larger.insert(a, above);
        }
        let parts = cosets
            .into_iter()
            .filter(|c| {
                !larger[&c.order()].iter().any(|&b| {
                    let up = Coset::new(group.clone(), c.anchor().clone(), b).expect("same group");
                    by_order[&b].contains(&up)
                })
            })
            .collect();
        AlgebraicSet { group, parts }
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn parts(&self) -> &[Coset] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_whole_group(&self) -> bool {
        self.parts.iter().any(Coset::is_whole_group)
            || self
                .set_eq(&AlgebraicSet::whole(self.group.clone()))
                .unwrap_or(false)
    }

    pub fn is_finite(&self) -> bool {
        self.parts.iter().all(Coset::is_finite)
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.parts.iter().any(|c| c.contains(x))
    }

    fn check_group(&self, other: &AlgebraicSet) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::MixedGroups)
        }
    }

    pub fn union(&self, other: &AlgebraicSet) -> Result<AlgebraicSet> {
        self.check_group(other)?;
        let all = self.parts.iter().chain(&other.parts).cloned().collect();
        Ok(Self::from_cosets(self.group.clone(), all))
    }

    pub fn intersect(&self, other: &AlgebraicSet) -> Result<AlgebraicSet> {
        self.check_group(other)?;
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                if let ElementarySet::Coset(c) = a.intersect(b)? {
                    out.push(c);
                }
            }
        }
        Ok(Self::from_cosets(self.group.clone(), out))
    }

    /// `A + B`, the union of pairwise coset sums; closed by construction.
    pub fn sum(&self, other: &AlgebraicSet) -> Result<AlgebraicSet> {
        self.check_group(other)?;
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                out.push(a.minkowski_sum(b)?);
            }
        }
        Ok(Self::from_cosets(self.group.clone(), out))
    }

    pub fn translate(&self, a: &Element) -> Result<AlgebraicSet> {
        let parts = self
            .parts
            .iter()
            .map(|c| c.translate(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_cosets(self.group.clone(), parts))
    }

    pub fn negate(&self) -> AlgebraicSet {
        let parts = self.parts.iter().map(Coset::negate).collect();
        Self::from_cosets(self.group.clone(), parts)
    }

    pub fn irreducible_components(&self) -> Result<Vec<Coset>> {
        self.irreducible_components_capped(DEFAULT_MAX_TRANSVERSAL)
    }

    /// The unique irredundant decomposition into irreducible closed sets.
    /// Each part `a + G[m]` splits into the cosets of `G[eo(G[m])]` it
    /// contains; the maximal ones among all parts are the components.
    pub fn irreducible_components_capped(&self, cap: usize) -> Result<Vec<Coset>> {
        let mut pieces = Vec::new();
        for part in &self.parts {
            pieces.extend(split_into_irreducible(part, cap)?);
        }
        Ok(Self::from_cosets(self.group.clone(), pieces).parts)
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        Ok(self.irreducible_components()?.len() == 1)
    }

    /// Groups irreducible components chained by nonempty intersections.
    pub fn connected_components(&self) -> Result<Vec<AlgebraicSet>> {
        let comps = self.irreducible_components()?;
        let mut parent: Vec<usize> = (0..comps.len()).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        for i in 0..comps.len() {
            for j in i + 1..comps.len() {
                if !comps[i].intersect(&comps[j])?.is_empty() {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Coset>> = BTreeMap::new();
        for (i, c) in comps.into_iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(c);
        }
        Ok(groups
            .into_values()
            .map(|cs| Self::from_cosets(self.group.clone(), cs))
            .collect())
    }

    pub fn is_connected(&self) -> Result<bool> {
        Ok(self.connected_components()?.len() <= 1)
    }

    pub fn dim(&self) -> Result<DimValue> {
        let mut best = DimValue::Empty;
        for c in self.irreducible_components()? {
            best = best.max(chain_dim(&self.group, c.order()));
        }
        Ok(best)
    }

    /// Set inclusion, decided component-wise: an irreducible set inside a
    /// finite union of closed sets lies inside one of them.
    pub fn is_subset(&self, other: &AlgebraicSet) -> Result<bool> {
        self.check_group(other)?;
        for c in self.irreducible_components()? {
            let mut inside = false;
            for d in &other.parts {
                if c.subset_of(d)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn set_eq(&self, other: &AlgebraicSet) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn to_json(&self) -> Vec<CosetJson> {
        self.parts.iter().map(Coset::to_json).collect()
    }

    pub fn from_json(group: GroupRef, parts: &[CosetJson]) -> Result<Self> {
        let cosets = parts
            .iter()
            .map(|p| Coset::new(group.clone(), p.anchor.clone(), p.order))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_cosets(group, cosets))
    }
}

impl fmt::Display for AlgebraicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let text: Vec<String> = self.parts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", text.join(" | "))
    }
}

/// Splits `a + G[m]` into the cosets of `G[eo(G[m])]` it contains.
pub(crate) fn split_into_irreducible(part: &Coset, cap: usize) -> Result<Vec<Coset>> {
    let group = part.group();
    let m = part.order();
    let n = group.torsion_subgroup(m).essential_order();
    if n == m {
        return Ok(vec![part.clone()]);
    }
    transversal(group, m, n, cap)?
        .into_iter()
        .map(|t| Coset::new(group.clone(), part.anchor().add(&t), n))
        .collect()
}

/// Coset representatives of `G[small]` in `G[big]`, where `G[small] ⊆ G[big]`
/// has finite index. Fails when the index exceeds `cap` or is infinite.
pub fn transversal(group: &GroupDescriptor, big: u64, small: u64, cap: usize) -> Result<Vec<Element>> {
    assert!(arith::divides(small, big), "G[{small}] must lie inside G[{big}]");
    let too_large = |size: String| Error::TransversalTooLarge { size, cap };
    // per-coordinate choices: (summand, index count, representative values)
    let mut axes: Vec<(Summand, u64, Vec<Value>)> = Vec::new();
    let mut total: u128 = 1;
    if big != 0 {
        for (s, mult) in group.summands() {
            let reps: Vec<Value> = match s {
                Summand::Cyclic { p, s: e } => {
                    let tb = e.min(arith::valuation(p, big));
                    let ts = e.min(arith::valuation(p, small));
                    let step = arith::pow(p, e - tb);
                    (0..arith::pow(p, tb - ts)).map(|j| Value::Residue(j * step)).collect()
                }
                Summand::Quasicyclic { p } => {
                    let vb = arith::valuation(p, big);
                    let vs = arith::valuation(p, small);
                    let den = BigInt::from(p).pow(vb);
                    (0..arith::pow(p, vb - vs))
                        .map(|j| Value::Frac(BigRational::new(BigInt::from(j), den.clone())))
                        .collect()
                }
                Summand::Free | Summand::Rational => continue,
            };
            if reps.len() <= 1 {
                continue;
            }
            let copies = match mult.finite() {
                Some(k) => k,
                None => return Err(too_large("infinite".into())),
            };
            for _ in 0..copies {
                total = total.saturating_mul(reps.len() as u128);
            }
            if total > cap as u128 {
                return Err(too_large(total.to_string()));
            }
            axes.push((s, copies, reps));
        }
    } else if small != 0 {
        return Err(too_large("infinite".into()));
    }
    let mut out = vec![Element::zero()];
    for (s, copies, reps) in &axes {
        for i in 0..*copies {
            let coord = crate::group::Coord::new(*s, i);
            out = out
                .iter()
                .flat_map(|x| {
                    reps.iter().map(move |v| {
                        let mut y = x.clone();
                        y.set(coord, v.clone());
                        y
                    })
                })
                .collect();
        }
    }
    Ok(out)
}

/// Length of the longest strictly increasing chain of irreducible closed
/// subgroups ending at `G[n]` (for canonical `n` with `G[n]` irreducible).
/// Irreducible subgroups are the `G[k]` with `k` canonical and `eo(G[k]) = k`;
/// for `n = 0` the chain may end with `G` itself.
pub fn chain_dim(group: &GroupDescriptor, n: u64) -> DimValue {
    let irreducible = |k: u64| group.is_canonical_order(k) && group.torsion_subgroup(k).essential_order() == k;
    if n != 0 {
        return DimValue::Finite(longest_chain(&arith::divisors(n), n, &irreducible));
    }
    // an infinite ladder G[p] ⊊ G[p^2] ⊊ ... exists iff some Z(p^inf) has
    // infinite multiplicity; otherwise all irreducible G[k] divide `top`
    let mut top: u64 = 1;
    for (s, mult) in group.summands() {
        match s {
            Summand::Quasicyclic { .. } if mult.is_infinite() => return DimValue::Infinite,
            Summand::Cyclic { p, s } if mult.is_infinite() => {
                let cur = arith::pow(p, arith::valuation(p, top));
                let want = arith::pow(p, s);
                if want > cur {
                    top = top / cur * want;
                }
            }
            _ => {}
        }
    }
    let ds = arith::divisors(top);
    let best = ds
        .iter()
        .filter(|&&k| irreducible(k))
        .map(|&k| longest_chain(&ds, k, &irreducible))
        .max()
        .unwrap_or(0);
    DimValue::Finite(best + 1)
}

/// Longest chain `1 = k_0 | k_1 | ... | k_j = target` of distinct candidates.
fn longest_chain(ds: &[u64], target: u64, ok: &dyn Fn(u64) -> bool) -> u32 {
    let cands: Vec<u64> = ds
        .iter()
        .copied()
        .filter(|&k| arith::divides(k, target) && ok(k))
        .collect();
    // cands ascending; longest[i] = longest chain from 1 ending at cands[i]
    let mut longest: Vec<Option<u32>> = vec![None; cands.len()];
    for i in 0..cands.len() {
        longest[i] = if cands[i] == 1 {
            Some(0)
        } else {
            (0..i)
                .filter(|&j| cands[i].is_multiple_of(cands[j]))
                .filter_map(|j| longest[j])
                .max()
                .map(|l| l + 1)
        };
    }
    cands
        .iter()
        .position(|&k| k == target)
        .and_then(|i| longest[i])
        .unwrap_or(0)
}

/// Convenience constructor used across modules.
pub fn subgroup_set(group: &GroupRef, orders: &[u64]) -> AlgebraicSet {
    AlgebraicSet::from_cosets(
        group.clone(),
        orders.iter().map(|&n| Coset::subgroup(group.clone(), n)).collect(),
    )
}

pub fn group_ref(g: GroupDescriptor) -> GroupRef {
    Arc::new(g)
}

#[cfg(test)]
mod tests;
