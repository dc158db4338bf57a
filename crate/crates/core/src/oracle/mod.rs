//! Ground-truth checks. Set-level facts are recomputed on explicit finite
//! groups with tuple arithmetic and compared with the symbolic modules.

mod instance;
pub mod random;

pub use instance::{Bits, FiniteGroupInstance};

use crate::arith;
use crate::closed::AlgebraicSet;
use crate::config::Config;
use crate::coset::{Coset, ElementarySet, GroupRef};
use crate::error::{Error, Result};
use crate::group::{Cardinal, Element, GroupDescriptor, Summand, Value};
use crate::sets::{make_round, RoundGenerator};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Coset,
    Decomp,
    Round,
    Chain,
    Laws,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "coset" => Suite::Coset,
            "decomp" => Suite::Decomp,
            "round" => Suite::Round,
            "chain" => Suite::Chain,
            "laws" => Suite::Laws,
            other => return Err(Error::Config(format!("unknown suite {other}"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub checks: u64,
    pub mismatches: u64,
    pub first_failure: Option<String>,
    /// Suite-specific extreme value: largest fibre (round) or longest chain
    /// (chain).
    pub max_value: Option<u64>,
    pub elapsed_ms: u128,
    pub pass: bool,
}

impl OracleReport {
    fn new(suite: Suite, seed: u64) -> Self {
        OracleReport {
            suite,
            seed,
            cases: 0,
            checks: 0,
            mismatches: 0,
            first_failure: None,
            max_value: None,
            elapsed_ms: 0,
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn merge(&mut self, other: OracleReport) {
        self.cases += other.cases;
        self.checks += other.checks;
        self.mismatches += other.mismatches;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self.max_value = match (self.max_value, other.max_value) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }

    fn finish(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_millis();
        self.pass = self.pass && self.mismatches == 0;
        self
    }

    /// A one-suite JUnit document.
    pub fn to_junit(&self) -> String {
        let failure = match &self.first_failure {
            Some(f) => format!(
                "<failure message=\"{} mismatches\">{}</failure>",
                self.mismatches,
                xml_escape(f)
            ),
            None if !self.pass => "<failure message=\"suite failed\"/>".to_string(),
            None => String::new(),
        };
        format!(
            "<testsuite name=\"oracle.{:?}\" tests=\"{}\" failures=\"{}\" time=\"{:.3}\">\n  <testcase name=\"{:?}\" classname=\"oracle\">{}</testcase>\n</testsuite>\n",
            self.suite,
            self.checks,
            self.mismatches,
            self.elapsed_ms as f64 / 1000.0,
            self.suite,
            failure
        )
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn run_suite(suite: Suite, cfg: &Config) -> Result<OracleReport> {
    match suite {
        Suite::Coset => Ok(check_coset_suite(cfg.pair_cap)),
        Suite::Decomp => check_decomposition_suite(200, cfg.seed),
        Suite::Round => check_round_suite(cfg.prefix_len),
        Suite::Chain => check_chain_suite(cfg.single_cap, 200, cfg.seed),
        Suite::Laws => check_closure_laws(100, cfg.seed),
    }
}

/// Membership bitset of a symbolic elementary set.
fn bits_of(inst: &FiniteGroupInstance, elements: &[Element], e: &ElementarySet) -> Bits {
    inst.bits_where(|i| e.contains(&elements[i]))
}

/// Every elementary set of the instance, checked operation by operation
/// against set enumeration.
pub fn check_coset_lemmas(inst: &FiniteGroupInstance) -> OracleReport {
    let start = Instant::now();
    let mut report = OracleReport::new(Suite::Coset, 0);
    report.cases = 1;
    let group: GroupRef = Arc::new(inst.descriptor());
    let elements: Vec<Element> = (0..inst.order()).map(|i| inst.element(i)).collect();
    let exp = inst.exponent();

    let mut sets: Vec<(ElementarySet, Bits)> = vec![(ElementarySet::Empty, Bits::empty(inst.order()))];
    let mut seen: BTreeSet<Bits> = BTreeSet::new();
    for n in arith::divisors(exp) {
        for a in 0..inst.order() {
            let truth = inst.coset(a, n);
            if !seen.insert(truth.clone()) {
                continue;
            }
            let sym = ElementarySet::Coset(Coset::new(group.clone(), elements[a].clone(), n).expect("instance element"));
            let got = bits_of(inst, &elements, &sym);
            report.check(got == truth, || format!("{inst}: construction of {a} + G[{n}]"));
            sets.push((sym, truth));
        }
    }
    let lookup: HashMap<&ElementarySet, &Bits> = sets.iter().map(|(s, b)| (s, b)).collect();
    let mut cache: HashMap<ElementarySet, Bits> = HashMap::new();
    let mut bits = |e: &ElementarySet| -> Bits {
        if let Some(b) = lookup.get(e) {
            return (*b).clone();
        }
        cache.entry(e.clone()).or_insert_with(|| bits_of(inst, &elements, e)).clone()
    };

    for (a, ab) in &sets {
        for (b, bb) in &sets {
            report.check(a.subset(b).ok() == Some(ab.subset_of(bb)), || format!("{inst}: {a:?} subset {b:?}"));
            report.check(a.equals(b).ok() == Some(ab == bb), || format!("{inst}: {a:?} equals {b:?}"));
            let meet = a.intersect(b).map(|m| bits(&m));
            report.check(meet.as_ref().ok() == Some(&ab.and(bb)), || format!("{inst}: {a:?} meet {b:?}"));
            let sum = a.minkowski_sum(b);
            let ok = match sum {
                Ok(s) => !ab.is_empty() && !bb.is_empty() && bits(&s) == inst.sumset(ab, bb),
                Err(Error::EmptyOperand) => ab.is_empty() || bb.is_empty(),
                Err(_) => false,
            };
            report.check(ok, || format!("{inst}: {a:?} + {b:?}"));
        }
        let neg = bits(&a.negate());
        report.check(neg == inst.image(ab, |x| inst.neg(x)), || format!("{inst}: -{a:?}"));
        for t in 0..inst.order() {
            let moved = a.translate(&elements[t]).map(|m| bits(&m));
            report.check(moved.ok() == Some(inst.image(ab, |x| inst.add(x, t))), || format!("{inst}: {a:?} + {t}"));
        }
        let bound = exp as i64 + 1;
        for k in -bound..=bound {
            let pre = a.preimage_mul(k).map(|m| bits(&m));
            let truth = inst.bits_where(|x| ab.has(inst.mul(x, k)));
            report.check(pre.ok() == Some(truth), || format!("{inst}: preimage of {a:?} under {k}"));
        }
    }
    report.finish(start)
}

/// The coset suite over every group of order at most `cap`.
pub fn check_coset_suite(cap: u64) -> OracleReport {
    let start = Instant::now();
    let reports: Vec<OracleReport> = FiniteGroupInstance::all_up_to(cap)
        .par_iter()
        .map(check_coset_lemmas)
        .collect();
    let mut total = OracleReport::new(Suite::Coset, 0);
    for r in reports {
        total.merge(r);
    }
    total.finish(start)
}

/// Whether `G[k]` is irreducible, decided from element counts alone: no
/// `G[d]` with `d` a proper divisor of `k` has finite index, i.e. every index
/// `[G_t[k] : G_t[d]]` grows from truncation `t` to `t + 1`.
fn irreducible_by_index(small: &FiniteGroupInstance, large: &FiniteGroupInstance, k: u64) -> bool {
    let index = |inst: &FiniteGroupInstance, d: u64| inst.torsion(k).len() / inst.torsion(d).len();
    arith::divisors(k)
        .into_iter()
        .filter(|&d| d != k && small.torsion(d) != small.torsion(k))
        .all(|d| index(large, d) > index(small, d))
}

/// Maximal irreducible cosets inside `target`, by enumeration.
fn brute_components(inst: &FiniteGroupInstance, irreducible: &[u64], target: &Bits) -> BTreeSet<Bits> {
    let mut inside: BTreeSet<Bits> = BTreeSet::new();
    for &k in irreducible {
        for a in target.iter() {
            let c = inst.coset(a, k);
            if c.subset_of(target) {
                inside.insert(c);
            }
        }
    }
    inside
        .iter()
        .filter(|c| !inside.iter().any(|d| d != *c && c.subset_of(d)))
        .cloned()
        .collect()
}

/// Symbolic decomposition of random unions of at most four cosets, compared
/// on a truncation with the maximal irreducible cosets found by brute force.
pub fn check_decomposition(desc: &GroupDescriptor, cases: usize, seed: u64) -> Result<OracleReport> {
    const T: u64 = 3;
    let start = Instant::now();
    let mut report = OracleReport::new(Suite::Decomp, seed);
    let group: GroupRef = Arc::new(desc.clone());
    let small = FiniteGroupInstance::truncation(desc, T)?;
    let large = FiniteGroupInstance::truncation(desc, T + 1)?;
    let exp = small.exponent();
    let mut irreducible = Vec::new();
    let mut distinct: BTreeSet<Bits> = BTreeSet::new();
    for k in arith::divisors(exp) {
        if distinct.insert(small.torsion(k)) && irreducible_by_index(&small, &large, k) {
            irreducible.push(k);
        }
    }
    let elements: Vec<Element> = (0..small.order()).map(|i| small.element(i)).collect();
    let divisors = arith::divisors(exp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let parts: Vec<(usize, u64)> = (0..rng.gen_range(1..=4))
            .map(|_| (rng.gen_range(0..small.order()), divisors[rng.gen_range(0..divisors.len())]))
            .collect();
        let mut target = Bits::empty(small.order());
        let mut cosets = Vec::new();
        for &(a, n) in &parts {
            target = target.or(&small.coset(a, n));
            cosets.push(ElementarySet::Coset(Coset::new(group.clone(), elements[a].clone(), n)?));
        }
        let set = AlgebraicSet::canonicalize(group.clone(), cosets)?;
        let symbolic: BTreeSet<Bits> = set
            .irreducible_components()?
            .iter()
            .map(|c| small.bits_where(|i| c.contains(&elements[i])))
            .collect();
        let truth = brute_components(&small, &irreducible, &target);
        report.cases += 1;
        report.check(symbolic == truth, || format!("{desc}: components of {set}"));
    }
    Ok(report.finish(start))
}

/// The three reference groups `Z(6)^w`, `Z(4)^w`, `Z(2)^w + Z(4)`.
pub fn decomposition_groups() -> Vec<GroupDescriptor> {
    let g = GroupDescriptor::trivial;
    vec![
        g().with_cyclic_order(6, Cardinal::Omega).expect("valid"),
        g().with_cyclic_order(4, Cardinal::Omega).expect("valid"),
        g().with_cyclic_order(2, Cardinal::Omega)
            .and_then(|d| d.with_cyclic_order(4, 1.into()))
            .expect("valid"),
    ]
}

pub fn check_decomposition_suite(cases: usize, seed: u64) -> Result<OracleReport> {
    let start = Instant::now();
    let groups = decomposition_groups();
    let per = cases.div_ceil(groups.len());
    let mut total = OracleReport::new(Suite::Decomp, seed);
    for (i, g) in groups.iter().enumerate() {
        total.merge(check_decomposition(g, per, seed.wrapping_add(i as u64))?);
    }
    Ok(total.finish(start))
}

/// `d * v` on one coordinate, computed from the raw value.
fn scale_value(summand: Summand, v: &Value, d: u64) -> Option<Value> {
    let out = match (summand, v) {
        (Summand::Cyclic { .. }, Value::Residue(r)) => {
            let q = summand.modulus()? as u128;
            Value::Residue((*r as u128 * d as u128 % q) as u64)
        }
        (Summand::Quasicyclic { .. }, Value::Frac(x)) => {
            let y = x * BigRational::from(BigInt::from(d));
            Value::Frac(&y - y.floor())
        }
        (Summand::Free, Value::Int(m)) => Value::Int(m * d),
        (Summand::Rational, Value::Frac(x)) => Value::Frac(x * BigRational::from(BigInt::from(d))),
        _ => return None,
    };
    Some(out)
}

/// Largest `|{x in prefix : d x = g}|` over the proper divisors `d` of the
/// generator's order (`1..=window` for order 0) and all `g`, with `d = 1`
/// always included so repeated elements are caught.
pub fn check_round_prefix(gen: &RoundGenerator, len: usize, window: u64) -> Result<u64> {
    let prefix = gen.prefix(len)?;
    let n = gen.order();
    let mut ds: Vec<u64> = if n == 0 {
        (1..=window).collect()
    } else {
        arith::divisors(n).into_iter().filter(|&d| d != n).collect()
    };
    if !ds.contains(&1) {
        ds.push(1);
    }
    let mut worst = 0;
    for d in ds {
        let mut counts: HashMap<Vec<(String, Value)>, u64> = HashMap::new();
        for x in &prefix {
            let key: Vec<(String, Value)> = x
                .coords()
                .filter_map(|(c, v)| {
                    let y = scale_value(c.summand, v, d)?;
                    let zero = match &y {
                        Value::Residue(r) => *r == 0,
                        Value::Int(m) => m.is_zero(),
                        Value::Frac(q) => q.is_zero(),
                    };
                    (!zero).then(|| (c.to_string(), y))
                })
                .collect();
            let e = counts.entry(key).or_default();
            *e += 1;
            worst = worst.max(*e);
        }
    }
    Ok(worst)
}

/// Standard round generators on matching groups: all fibres have size 1.
pub fn check_round_suite(len: usize) -> Result<OracleReport> {
    let start = Instant::now();
    let mut report = OracleReport::new(Suite::Round, 0);
    let cases: Vec<(GroupDescriptor, u64)> = vec![
        (GroupDescriptor::trivial().with_free(1.into())?, 0),
        (GroupDescriptor::trivial().with_rational(1.into())?, 0),
        (GroupDescriptor::trivial().with_cyclic_order(2, Cardinal::Omega)?, 2),
        (GroupDescriptor::trivial().with_cyclic_order(3, Cardinal::Omega)?, 3),
        (GroupDescriptor::trivial().with_cyclic_order(4, Cardinal::Omega)?, 4),
        (GroupDescriptor::trivial().with_cyclic_order(6, Cardinal::Omega)?, 6),
        (GroupDescriptor::trivial().with_quasicyclic(2, Cardinal::Omega)?, 8),
        (
            GroupDescriptor::trivial()
                .with_cyclic_order(12, Cardinal::Omega)?
                .with_cyclic_order(5, 3.into())?,
            12,
        ),
    ];
    let mut max = 0;
    for (desc, n) in cases {
        let group: GroupRef = Arc::new(desc);
        let gen = make_round(&group, n)?;
        let worst = check_round_prefix(&gen, len, 64)?;
        max = max.max(worst);
        report.cases += 1;
        report.check(worst <= 1, || format!("{group}: round({n}) has a fibre of size {worst}"));
    }
    report.max_value = Some(max);
    Ok(report.finish(start))
}

/// Random strictly descending chains of nonempty elementary sets, each step
/// a random coset strictly inside the previous one (verified both
/// symbolically and by enumeration). Returns the longest chain length and
/// the number of divisors of the exponent, which bounds it.
pub fn check_chain_dcc(inst: &FiniteGroupInstance, trials: usize, seed: u64) -> (OracleReport, u64) {
    let start = Instant::now();
    let mut report = OracleReport::new(Suite::Chain, seed);
    let group: GroupRef = Arc::new(inst.descriptor());
    let exp = inst.exponent();
    let bound = arith::divisors(exp).len() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut longest = 0;
    for _ in 0..trials {
        let mut current = (0usize, exp);
        let mut bits = inst.coset(0, exp);
        let mut length = 1u64;
        loop {
            let options: Vec<(usize, u64)> = arith::divisors(exp)
                .into_iter()
                .flat_map(|d| bits.iter().map(move |a| (a, d)))
                .filter(|&(a, d)| {
                    let c = inst.coset(a, d);
                    c.subset_of(&bits) && c != bits
                })
                .collect();
            if options.is_empty() {
                break;
            }
            let next = options[rng.gen_range(0..options.len())];
            let outer = Coset::new(group.clone(), inst.element(current.0), current.1).expect("instance element");
            let inner = Coset::new(group.clone(), inst.element(next.0), next.1).expect("instance element");
            let strict = inner.subset_of(&outer).unwrap_or(false) && inner != outer;
            report.check(strict, || format!("{inst}: {inner} inside {outer}"));
            current = next;
            bits = inst.coset(next.0, next.1);
            length += 1;
        }
        longest = longest.max(length);
        report.check(length <= bound, || format!("{inst}: chain of length {length} exceeds {bound}"));
    }
    report.cases = trials;
    report.max_value = Some(longest);
    (report.finish(start), bound)
}

/// Chain trials on every group of order at most `min(cap, 64)`.
pub fn check_chain_suite(cap: u64, trials: usize, seed: u64) -> Result<OracleReport> {
    let start = Instant::now();
    let mut total = OracleReport::new(Suite::Chain, seed);
    let per = (trials / 20).max(2);
    for inst in FiniteGroupInstance::all_up_to(cap.min(64)) {
        let (r, _) = check_chain_dcc(&inst, per, seed);
        total.merge(r);
    }
    Ok(total.finish(start))
}

pub fn law_groups() -> Vec<GroupRef> {
    let g = GroupDescriptor::trivial;
    let build = |d: Result<GroupDescriptor>| Arc::new(d.expect("valid descriptor"));
    vec![
        build(g().with_free(1.into())),
        build(g().with_cyclic_order(4, Cardinal::Omega)),
        build(g().with_cyclic_order(6, Cardinal::Omega)),
        build(g().with_cyclic_order(2, Cardinal::Omega).and_then(|d| d.with_cyclic_order(4, 1.into()))),
        build(g().with_free(1.into()).and_then(|d| d.with_cyclic_order(4, Cardinal::Omega))),
        build(g().with_rational(1.into()).and_then(|d| d.with_quasicyclic(2, 2.into()))),
        build(g().with_quasicyclic(3, Cardinal::Omega)),
    ]
}

/// Translation equivariance of the closure on random described sets, and
/// the closure-of-sum law `A + B` for closed sets on finite groups.
pub fn check_closure_laws(cases: usize, seed: u64) -> Result<OracleReport> {
    let start = Instant::now();
    let mut report = OracleReport::new(Suite::Laws, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = law_groups();
    for i in 0..cases {
        let g = &groups[i % groups.len()];
        let x = random::described_set(g, &mut rng);
        let a = random::element(g, &mut rng);
        let lhs = x.translate(&a)?.closure()?;
        let rhs = x.closure()?.translate(&a)?;
        report.check(lhs == rhs, || format!("{g}: closure({a} + ({x}))"));
    }
    let finite: Vec<FiniteGroupInstance> = FiniteGroupInstance::all_up_to(64)
        .into_iter()
        .filter(|i| i.order() > 1)
        .collect();
    for _ in 0..cases {
        let inst = &finite[rng.gen_range(0..finite.len())];
        let group: GroupRef = Arc::new(inst.descriptor());
        let elements: Vec<Element> = (0..inst.order()).map(|i| inst.element(i)).collect();
        let divisors = arith::divisors(inst.exponent());
        let pick = |rng: &mut ChaCha8Rng| -> Result<(AlgebraicSet, Bits)> {
            let mut bits = Bits::empty(inst.order());
            let mut parts = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let a = rng.gen_range(0..inst.order());
                let n = divisors[rng.gen_range(0..divisors.len())];
                bits = bits.or(&inst.coset(a, n));
                parts.push(ElementarySet::Coset(Coset::new(group.clone(), elements[a].clone(), n)?));
            }
            Ok((AlgebraicSet::canonicalize(group.clone(), parts)?, bits))
        };
        let (a, ab) = pick(&mut rng)?;
        let (b, bb) = pick(&mut rng)?;
        let sum = a.sum(&b)?;
        let got = inst.bits_where(|i| sum.contains(&elements[i]));
        report.check(got == inst.sumset(&ab, &bb), || format!("{inst}: ({a}) + ({b})"));
    }
    report.cases = 2 * cases;
    Ok(report.finish(start))
}

/// `eo` of a bounded descriptor from element counts: the least divisor `m`
/// of the exponent with `|m G_t|` the same at truncations 2 and 3. The image
/// of a direct sum is the product of the coordinate images, each counted by
/// enumerating `Z(q)`.
pub fn eo_by_counting(desc: &GroupDescriptor) -> Result<u64> {
    if desc.summands().any(|(s, _)| s.modulus().is_none()) {
        return Ok(0);
    }
    let image_size = |q: u64, m: u64| (0..q).map(|x| x * m % q).collect::<BTreeSet<u64>>().len() as u128;
    let log_size = |t: u64, m: u64| -> f64 {
        desc.summands()
            .map(|(s, c)| {
                let q = s.modulus().expect("bounded");
                let copies = match c {
                    Cardinal::Fin(k) => k,
                    Cardinal::Omega => t,
                };
                copies as f64 * (image_size(q, m) as f64).ln()
            })
            .sum()
    };
    let exp = desc.exponent();
    Ok(arith::divisors(exp)
        .into_iter()
        .find(|&m| (log_size(2, m) - log_size(3, m)).abs() < 1e-9)
        .unwrap_or(exp))
}

/// Longest chain of irreducible `G[k]` below `G[n]`, with irreducibility
/// decided by [`eo_by_counting`] on each `G[k]`. Bounded descriptors only.
pub fn dim_by_chain_search(desc: &GroupDescriptor, n: u64) -> Result<u32> {
    let ks: Vec<u64> = arith::divisors(n)
        .into_iter()
        .filter(|&k| {
            let sub = desc.torsion_subgroup(k);
            sub.exponent() == k && eo_by_counting(&sub).ok() == Some(k)
        })
        .collect();
    let mut best: HashMap<u64, u32> = HashMap::new();
    for &k in &ks {
        let below = ks
            .iter()
            .filter(|&&j| j < k && k % j == 0)
            .filter_map(|j| best.get(j))
            .max()
            .map(|v| v + 1)
            .unwrap_or(0);
        best.insert(k, below);
    }
    Ok(best.get(&n).copied().unwrap_or(0))
}
