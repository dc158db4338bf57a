//! Described subsets of a group: finite unions of finite sets, cosets,
//! translated round sets and cosets of finitely generated subgroups. Closures,
//! `M(X)`, curves, density and dimension are computed from the atoms.

mod round;

pub use round::{
    certify_round, make_round, split_trim, GeneratorKind, Refutation, RoundCertificate, RoundGenerator,
    RoundVerdict, TrimCertificate,
};

use crate::arith;
use crate::closed::{chain_dim, AlgebraicSet, DimValue};
use crate::config::Config;
use crate::coset::{Coset, GroupRef};
use crate::error::{Error, Result};
use crate::group::Element;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Finite(Vec<Element>),
    Coset(Coset),
    Round {
        base: Element,
        gen: RoundGenerator,
        cert: RoundCertificate,
    },
    /// `offset + <generators>`.
    Span {
        offset: Element,
        generators: Vec<Element>,
    },
}

impl Atom {
    /// A translated round set; the generator must certify.
    pub fn round(base: Element, gen: RoundGenerator, cfg: &Config) -> Result<Atom> {
        gen.group().check_element(&base)?;
        match certify_round(&gen, cfg)? {
            RoundVerdict::Certified(cert) => Ok(Atom::Round { base, gen, cert }),
            RoundVerdict::Refuted(r) => Err(Error::Uncertified(format!(
                "{gen}: {} elements share the value {} under multiplication by {}",
                r.indices.len(),
                r.value,
                r.divisor
            ))),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Atom::Finite(_) => true,
            Atom::Coset(c) => c.is_finite(),
            Atom::Round { .. } => false,
            Atom::Span { generators, .. } => generators.iter().all(|g| g.order_of() != 0),
        }
    }

    fn translate(&self, a: &Element) -> Result<Atom> {
        Ok(match self {
            Atom::Finite(xs) => Atom::Finite(xs.iter().map(|x| x.add(a)).collect()),
            Atom::Coset(c) => Atom::Coset(c.translate(a)?),
            Atom::Round { base, gen, cert } => Atom::Round {
                base: base.add(a),
                gen: gen.clone(),
                cert: cert.clone(),
            },
            Atom::Span { offset, generators } => Atom::Span {
                offset: offset.add(a),
                generators: generators.clone(),
            },
        })
    }

    /// Some element of the atom.
    fn point(&self) -> Option<Element> {
        match self {
            Atom::Finite(xs) => xs.first().cloned(),
            Atom::Coset(c) => Some(c.anchor().clone()),
            Atom::Round { base, gen, .. } => gen.prefix(1).ok()?.first().map(|s| base.add(s)),
            Atom::Span { offset, .. } => Some(offset.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[Element]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Atom::Finite(xs) => write!(f, "{{{}}}", list(xs)),
            Atom::Coset(c) if c.anchor().is_zero() => write!(f, "G[{}]", c.order()),
            Atom::Coset(c) => write!(f, "{} + G[{}]", c.anchor(), c.order()),
            Atom::Round { base, gen, .. } if base.is_zero() => write!(f, "{gen}"),
            Atom::Round { base, gen, .. } => write!(f, "{base} + {gen}"),
            Atom::Span { offset, generators } if offset.is_zero() => write!(f, "span({})", list(generators)),
            Atom::Span { offset, generators } => write!(f, "{offset} + span({})", list(generators)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DescribedSet {
    group: GroupRef,
    atoms: Vec<Atom>,
}

/// The decomposition `D ∪ ⋃ (a_i + G[n_i])` of a closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureCertificate {
    pub isolated: Vec<Element>,
    pub pieces: Vec<Piece>,
    /// `(n, a)` for each round atom, coset-atom component and unbounded span.
    pub index_set: Vec<(u64, Element)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub anchor: Element,
    pub order: u64,
    /// Index of an atom whose closure contains the piece.
    pub witness: usize,
}

/// `M(X)` as the set of its divisibility-minimal members; `n ∈ M(X)` iff some
/// generator divides `n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MSet {
    pub generators: BTreeSet<u64>,
}

impl MSet {
    pub fn contains(&self, n: u64) -> bool {
        n != 0 && self.generators.iter().any(|&g| arith::divides(g, n))
    }

    /// `min M(X)`, or 0 when `M(X)` is empty.
    pub fn min(&self) -> u64 {
        self.generators.iter().next().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityVerdict {
    pub dense: bool,
    /// `mX` infinite for every `m >= 1`; only defined for unbounded groups.
    pub mx_infinite: Option<bool>,
    /// Equal to `dense`: described groups are countable.
    pub potentially_dense: bool,
}

/// One irreducible piece of the closure together with the part of `X` in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetComponent {
    pub closure: Coset,
    /// Atoms or atom pieces lying inside the component and dense in it.
    pub trace: DescribedSet,
    /// Atoms meeting the component in a finite, unlisted set.
    pub finite_traces: Vec<usize>,
}

impl DescribedSet {
    pub fn new(group: GroupRef, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            match a {
                Atom::Finite(xs) => xs.iter().try_for_each(|x| group.check_element(x))?,
                Atom::Coset(c) if c.group() != &group => return Err(Error::MixedGroups),
                Atom::Round { base, gen, .. } => {
                    if gen.group() != &group {
                        return Err(Error::MixedGroups);
                    }
                    group.check_element(base)?;
                }
                Atom::Span { offset, generators } => {
                    group.check_element(offset)?;
                    generators.iter().try_for_each(|x| group.check_element(x))?;
                }
                _ => {}
            }
        }
        Ok(DescribedSet { group, atoms })
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn union(&self, other: &DescribedSet) -> Result<DescribedSet> {
        if self.group != other.group {
            return Err(Error::MixedGroups);
        }
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(DescribedSet {
            group: self.group.clone(),
            atoms,
        })
    }

    pub fn translate(&self, a: &Element) -> Result<DescribedSet> {
        self.group.check_element(a)?;
        let atoms = self.atoms.iter().map(|x| x.translate(a)).collect::<Result<_>>()?;
        Ok(DescribedSet {
            group: self.group.clone(),
            atoms,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a, Atom::Finite(xs) if xs.is_empty()))
    }

    pub fn is_finite(&self) -> bool {
        self.atoms.iter().all(Atom::is_finite)
    }

    /// The closed cosets whose union is the closure of each atom.
    fn atom_closure(&self, atom: &Atom, cap: usize) -> Result<Vec<Coset>> {
        let g = &self.group;
        Ok(match atom {
            Atom::Finite(xs) => xs.iter().map(|x| Coset::point(g.clone(), x.clone())).collect::<Result<_>>()?,
            Atom::Coset(c) => vec![c.clone()],
            Atom::Round { base, gen, .. } => vec![Coset::new(g.clone(), base.clone(), gen.order())?],
            Atom::Span { offset, generators } => {
                if generators.iter().any(|x| x.order_of() == 0) {
                    vec![Coset::whole(g.clone())]
                } else {
                    finite_span(generators, cap)?
                        .into_iter()
                        .map(|h| Coset::point(g.clone(), offset.add(&h)))
                        .collect::<Result<_>>()?
                }
            }
        })
    }

    pub fn closure(&self) -> Result<AlgebraicSet> {
        self.closure_with(&Config::default()).map(|(a, _)| a)
    }

    /// The Zariski closure and its decomposition into isolated points and
    /// infinite irreducible pieces.
    pub fn closure_with(&self, cfg: &Config) -> Result<(AlgebraicSet, ClosureCertificate)> {
        let mut per_atom = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            per_atom.push(self.atom_closure(atom, cfg.max_transversal)?);
        }
        let all: Vec<Coset> = per_atom.iter().flatten().cloned().collect();
        let closed = AlgebraicSet::from_cosets(self.group.clone(), all);
        let comps = closed.irreducible_components_capped(cfg.max_transversal)?;
        let mut isolated = Vec::new();
        let mut pieces = Vec::new();
        for c in comps {
            if c.is_singleton() {
                isolated.push(c.anchor().clone());
                continue;
            }
            let witness = per_atom
                .iter()
                .position(|cs| cs.iter().any(|d| c.subset_of(d).unwrap_or(false)))
                .expect("every component lies in some atom closure");
            pieces.push(Piece {
                anchor: c.anchor().clone(),
                order: c.order(),
                witness,
            });
        }
        let mut index_set = Vec::new();
        for (atom, cs) in self.atoms.iter().zip(&per_atom) {
            match atom {
                Atom::Round { base, gen, .. } => index_set.push((gen.order(), base.clone())),
                Atom::Coset(c) if !c.is_finite() => {
                    for k in AlgebraicSet::from_coset(c.clone()).irreducible_components_capped(cfg.max_transversal)? {
                        index_set.push((k.order(), k.anchor().clone()));
                    }
                }
                Atom::Span { offset, .. } if cs.len() == 1 && cs[0].order() == 0 && !cs[0].is_finite() => {
                    index_set.push((0, offset.clone()))
                }
                _ => {}
            }
        }
        Ok((
            closed,
            ClosureCertificate {
                isolated,
                pieces,
                index_set,
            },
        ))
    }

    /// `M(X)`, described by its minimal generators.
    pub fn big_m(&self) -> MSet {
        let mut gens = BTreeSet::new();
        let infinite_rank = |p: u64| self.group.p_rank(p).is_infinite();
        for atom in &self.atoms {
            match atom {
                Atom::Round { gen, .. } if gen.order() >= 1 => {
                    gens.insert(gen.order());
                }
                // (b + G[m]) ∩ (a + G[n]) is empty or a coset of G[(n, m)]
                Atom::Coset(c) => {
                    for p in self.group.primes() {
                        if infinite_rank(p) && (c.order() == 0 || c.order() % p == 0) {
                            gens.insert(p);
                        }
                    }
                }
                _ => {}
            }
        }
        let minimal = gens
            .iter()
            .copied()
            .filter(|&g| !gens.iter().any(|&h| h != g && arith::divides(h, g)))
            .collect();
        MSet { generators: minimal }
    }

    /// `𝔪(X) = min M(X)`, 0 when `M(X)` is empty.
    pub fn little_m(&self) -> u64 {
        self.big_m().min()
    }

    fn some_point(&self) -> Option<Element> {
        self.atoms.iter().find_map(Atom::point)
    }

    /// `X` is a translate of a round set: `X` infinite and `X ⊆ x0 + G[𝔪(X)]`.
    pub fn is_curve(&self) -> Result<bool> {
        if self.is_finite() {
            return Err(Error::FiniteSet);
        }
        let m = self.little_m();
        let x0 = self.some_point().expect("infinite sets have points");
        let target = Coset::new(self.group.clone(), x0, m)?;
        for c in self.closure()?.parts() {
            if !c.subset_of(&target)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `X - b` is round; for a curve this is `b ∈ X + G[𝔪(X)]`.
    pub fn valid_round_base(&self, b: &Element) -> Result<bool> {
        if !self.is_curve()? {
            return Ok(false);
        }
        let x0 = self.some_point().expect("curves are infinite");
        Ok(Coset::new(self.group.clone(), x0, self.little_m())?.contains(b))
    }

    pub fn is_dense(&self) -> Result<bool> {
        self.closure()?.set_eq(&AlgebraicSet::whole(self.group.clone()))
    }

    /// Whether `mX` is infinite for every `m >= 1`. Bounded atoms die under
    /// the lcm of their orders; the others stay infinite for every `m`.
    pub fn mx_infinite(&self) -> bool {
        self.atoms.iter().any(|a| match a {
            Atom::Finite(_) => false,
            Atom::Coset(c) => c.order() == 0 && !self.group.is_bounded(),
            Atom::Round { gen, .. } => gen.order() == 0,
            Atom::Span { generators, .. } => generators.iter().any(|g| g.order_of() == 0),
        })
    }

    pub fn density(&self) -> Result<DensityVerdict> {
        let dense = self.is_dense()?;
        let mx_infinite = (!self.group.is_bounded()).then(|| self.mx_infinite());
        Ok(DensityVerdict {
            dense,
            mx_infinite,
            potentially_dense: dense,
        })
    }

    pub fn is_irreducible(&self) -> Result<bool> {
        Ok(self.closure()?.irreducible_components()?.len() == 1)
    }

    pub fn isolated_points(&self) -> Result<Vec<Element>> {
        Ok(self.closure_with(&Config::default())?.1.isolated)
    }

    /// Splits `X` along the irreducible components of its closure.
    pub fn components(&self) -> Result<Vec<SetComponent>> {
        let mut out = Vec::new();
        for comp in self.closure()?.irreducible_components()? {
            let mut atoms = Vec::new();
            let mut finite_traces = Vec::new();
            for (i, atom) in self.atoms.iter().enumerate() {
                match atom {
                    Atom::Finite(xs) => {
                        let inside: Vec<Element> = xs.iter().filter(|x| comp.contains(x)).cloned().collect();
                        if !inside.is_empty() {
                            atoms.push(Atom::Finite(inside));
                        }
                    }
                    Atom::Coset(c) => {
                        if let Some(k) = c.intersect(&comp)?.as_coset() {
                            atoms.push(Atom::Coset(k.clone()));
                        }
                    }
                    Atom::Round { base, gen, .. } => {
                        let closure = Coset::new(self.group.clone(), base.clone(), gen.order())?;
                        if closure.subset_of(&comp)? {
                            atoms.push(atom.clone());
                        } else if !closure.intersect(&comp)?.is_empty() {
                            finite_traces.push(i);
                        }
                    }
                    Atom::Span { offset, generators } => {
                        let closures = self.atom_closure(atom, crate::closed::DEFAULT_MAX_TRANSVERSAL)?;
                        if closures.iter().all(Coset::is_singleton) {
                            let inside: Vec<Element> = closures
                                .iter()
                                .map(|c| c.anchor().clone())
                                .filter(|x| comp.contains(x))
                                .collect();
                            if !inside.is_empty() {
                                atoms.push(Atom::Finite(inside));
                            }
                        } else if comp.is_whole_group() {
                            atoms.push(Atom::Span {
                                offset: offset.clone(),
                                generators: generators.clone(),
                            });
                        } else {
                            finite_traces.push(i);
                        }
                    }
                }
            }
            out.push(SetComponent {
                closure: comp,
                trace: DescribedSet {
                    group: self.group.clone(),
                    atoms,
                },
                finite_traces,
            });
        }
        Ok(out)
    }

    /// Longest chain of irreducible closed subsets of the subspace `X`.
    ///
    /// An infinite irreducible closed subset of `X` is `X ∩ C` for an
    /// irreducible coset `C` equal to the closure of `X ∩ C`; such `C` is an
    /// irreducible sub-coset of a coset atom, the closure of a round atom, or
    /// `G` for an unbounded span.
    pub fn dim(&self) -> Result<DimValue> {
        if self.is_empty() {
            return Ok(DimValue::Empty);
        }
        if self.is_finite() {
            return Ok(DimValue::Finite(0));
        }
        let g = &self.group;
        let coset_atoms: Vec<&Coset> = self
            .atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Coset(c) => Some(c),
                _ => None,
            })
            .collect();
        let mut tops: Vec<Coset> = Vec::new();
        for atom in &self.atoms {
            match atom {
                Atom::Round { base, gen, .. } => tops.push(Coset::new(g.clone(), base.clone(), gen.order())?),
                Atom::Span { generators, .. } if generators.iter().any(|x| x.order_of() == 0) => {
                    tops.push(Coset::whole(g.clone()))
                }
                _ => {}
            }
        }
        tops.sort();
        tops.dedup();
        let mut memo: HashMap<Coset, DimValue> = HashMap::new();
        let mut best = DimValue::Finite(0);
        for c in &coset_atoms {
            best = best.max(AlgebraicSet::from_coset((*c).clone()).dim()?);
        }
        for t in &tops {
            best = best.max(height(t, &tops, &coset_atoms, &mut memo)?);
        }
        Ok(best)
    }
}

/// Longest chain of dense-trace irreducible sets ending at `c`.
fn height(
    c: &Coset,
    tops: &[Coset],
    coset_atoms: &[&Coset],
    memo: &mut HashMap<Coset, DimValue>,
) -> Result<DimValue> {
    if let Some(v) = memo.get(c) {
        return Ok(*v);
    }
    let group = c.group().clone();
    // inside a coset atom every irreducible sub-coset has dense trace
    for a in coset_atoms {
        if c.subset_of(a)? {
            let v = chain_dim(&group, c.order());
            memo.insert(c.clone(), v);
            return Ok(v);
        }
    }
    let mut below = DimValue::Finite(0);
    for a in coset_atoms {
        if let Some(k) = c.intersect(a)?.as_coset() {
            for piece in AlgebraicSet::from_coset(k.clone()).irreducible_components()? {
                below = below.max(chain_dim(&group, piece.order()));
            }
        }
    }
    for t in tops {
        if t != c && t.subset_of(c)? {
            below = below.max(height(t, tops, coset_atoms, memo)?);
        }
    }
    let v = match below {
        DimValue::Finite(k) => DimValue::Finite(k + 1),
        other => other,
    };
    memo.insert(c.clone(), v);
    Ok(v)
}

/// Elements of the subgroup generated by finitely many torsion elements.
fn finite_span(generators: &[Element], cap: usize) -> Result<Vec<Element>> {
    let mut seen: HashSet<Element> = HashSet::from([Element::zero()]);
    let mut queue = VecDeque::from([Element::zero()]);
    let mut out = vec![Element::zero()];
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.add(g);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return Err(Error::SubgroupTooLarge(cap));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

impl fmt::Display for DescribedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

#[cfg(test)]
mod tests;
