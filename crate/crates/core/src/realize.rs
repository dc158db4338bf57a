//! Numeric realization of closures by characters into the torus `T = R/Z`.
//!
//! Character values are generated lazily and deterministically from
//! `(seed, row, coordinate)`: a random `a/p^s` on `Z(p^s)`, a random p-adic
//! integer on `Z(p^inf)`, and `c * sqrt(q)` for a fresh prime `q` on `Z` and
//! `Q`. Torsion values are exact rationals; irrational values are 128-bit
//! fixed-point fractions of a turn, so rows on `Z` are exactly additive.

use crate::arith;
use crate::config::Config;
use crate::coset::{Coset, GroupRef};
use crate::error::{Error, Result};
use crate::group::{Coord, Element, Summand, Value};
use crate::sets::{make_round, Atom, DescribedSet, RoundGenerator};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::{Mutex, OnceLock};

/// Value of one character on one coordinate generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusValue {
    Exact(BigRational),
    /// `frac(multiplier * sqrt(radicand))`, stored as `approx / 2^128`.
    Irrational { multiplier: u64, radicand: u64, approx: u128 },
}

/// A point of `T`: an exact rational part plus a fixed-point part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub exact: BigRational,
    pub fixed: u128,
}

impl TorusPoint {
    pub fn zero() -> Self {
        TorusPoint {
            exact: BigRational::zero(),
            fixed: 0,
        }
    }

    pub fn add(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint {
            exact: frac(&(&self.exact + &other.exact)),
            fixed: self.fixed.wrapping_add(other.fixed),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.exact.to_f64().unwrap_or(0.0) + self.fixed as f64 / 2f64.powi(128);
        v - v.floor()
    }
}

fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Distance on the circle.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn mix(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h ^= p;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

fn coord_key(c: &Coord) -> [u64; 4] {
    match c.summand {
        Summand::Free => [1, 0, 0, c.index],
        Summand::Rational => [2, 0, 0, c.index],
        Summand::Quasicyclic { p } => [3, p, 0, c.index],
        Summand::Cyclic { p, s } => [4, p, s as u64, c.index],
    }
}

fn nth_prime(i: usize) -> u64 {
    static PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let mut primes = PRIMES.get_or_init(|| Mutex::new(vec![2])).lock().expect("prime cache");
    let mut k = *primes.last().expect("nonempty");
    while primes.len() <= i {
        k += 1;
        if arith::is_prime(k) {
            primes.push(k);
        }
    }
    primes[i]
}

/// A finite family of characters `G -> T`. The first `density_rows` rows are
/// the ones whose images are checked for density; later rows only serve to
/// make the joint map injective on the truncation.
#[derive(Clone, Debug)]
pub struct CharacterMatrix {
    group: GroupRef,
    seed: u64,
    rows: usize,
    density_rows: usize,
    truncation: u64,
}

impl CharacterMatrix {
    pub fn new(group: GroupRef, seed: u64, density_rows: usize, truncation: u64) -> Self {
        CharacterMatrix {
            group,
            seed,
            rows: density_rows,
            density_rows,
            truncation,
        }
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn density_rows(&self) -> usize {
        self.density_rows
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    fn rng(&self, row: usize, c: &Coord) -> ChaCha8Rng {
        let k = coord_key(c);
        ChaCha8Rng::seed_from_u64(mix(&[self.seed, row as u64, k[0], k[1], k[2], k[3]]))
    }

    /// `a` with row value `a/p^s` on a cyclic coordinate.
    fn cyclic_numerator(&self, row: usize, c: &Coord) -> u64 {
        let m = c.summand.modulus().expect("cyclic");
        self.rng(row, c).gen_range(0..m)
    }

    /// The p-adic integer of a quasicyclic coordinate, modulo `p^k`.
    fn padic(&self, row: usize, c: &Coord, p: u64, k: u32) -> BigInt {
        let mut rng = self.rng(row, c);
        let mut u = BigInt::zero();
        let mut place = BigInt::one();
        for _ in 0..k {
            u += &place * rng.gen_range(0..p);
            place *= p;
        }
        u
    }

    fn irrational(&self, row: usize, c: &Coord) -> (u64, u64) {
        let j = 2 * c.index as usize + usize::from(c.summand == Summand::Rational);
        let pair = (row + j) * (row + j + 1) / 2 + j;
        let multiplier = self.rng(row, c).gen_range(1..=1u64 << 16);
        (multiplier, nth_prime(pair))
    }

    /// `floor(multiplier * sqrt(radicand) * 2^bits)`.
    fn scaled_root(multiplier: u64, radicand: u64, bits: u32) -> BigInt {
        let m = BigInt::from(multiplier);
        ((m.clone() * m * BigInt::from(radicand)) << (2 * bits)).sqrt()
    }

    /// Value of row `row` on the standard generator of `c`.
    pub fn entry(&self, row: usize, c: &Coord) -> TorusValue {
        match c.summand {
            Summand::Cyclic { .. } => TorusValue::Exact(BigRational::new(
                BigInt::from(self.cyclic_numerator(row, c)),
                BigInt::from(c.summand.modulus().expect("cyclic")),
            )),
            Summand::Quasicyclic { p } => {
                TorusValue::Exact(BigRational::new(self.padic(row, c, p, 1), BigInt::from(p)))
            }
            Summand::Free | Summand::Rational => {
                let (multiplier, radicand) = self.irrational(row, c);
                let approx: BigInt = Self::scaled_root(multiplier, radicand, 128) & ((BigInt::one() << 128) - 1);
                TorusValue::Irrational {
                    multiplier,
                    radicand,
                    approx: approx.to_u128().expect("masked to 128 bits"),
                }
            }
        }
    }

    fn coord_image(&self, row: usize, c: &Coord, v: &Value) -> TorusPoint {
        let mut out = TorusPoint::zero();
        match (c.summand, v) {
            (Summand::Cyclic { .. }, Value::Residue(r)) => {
                let m = c.summand.modulus().expect("cyclic");
                let a = (self.cyclic_numerator(row, c) as u128 * *r as u128 % m as u128) as u64;
                out.exact = BigRational::new(BigInt::from(a), BigInt::from(m));
            }
            (Summand::Quasicyclic { p }, Value::Frac(q)) => {
                let den = q.denom();
                let k = arith::valuation_big(p, den);
                let u = self.padic(row, c, p, k);
                out.exact = BigRational::new((q.numer() * u).mod_floor(den), den.clone());
            }
            (Summand::Free, Value::Int(m)) => {
                let (multiplier, radicand) = self.irrational(row, c);
                let alpha = Self::scaled_root(multiplier, radicand, 128);
                let modulus = BigInt::one() << 128;
                let v = (alpha * m).mod_floor(&modulus);
                out.fixed = v.to_u128().expect("reduced mod 2^128");
            }
            (Summand::Rational, Value::Frac(q)) => {
                let (multiplier, radicand) = self.irrational(row, c);
                let beta = Self::scaled_root(multiplier, radicand, 192);
                let modulus = BigInt::one() << 192;
                let v: BigInt = (beta * q.numer()).div_floor(q.denom()).mod_floor(&modulus) >> 64;
                out.fixed = v.to_u128().expect("reduced mod 2^128");
            }
            _ => unreachable!("value kind matches summand"),
        }
        out
    }

    /// Image of `x` under rows `0..rows`.
    pub fn image(&self, x: &Element, rows: usize) -> Vec<TorusPoint> {
        (0..rows)
            .map(|r| {
                x.coords()
                    .fold(TorusPoint::zero(), |acc, (c, v)| acc.add(&self.coord_image(r, c, v)))
            })
            .collect()
    }

    pub fn image_f64(&self, x: &Element, rows: usize) -> Vec<f64> {
        self.image(x, rows).iter().map(TorusPoint::to_f64).collect()
    }

    /// Adds rows until no nonzero torsion element of the truncation lies in
    /// the joint kernel. Free and rational coordinates use distinct square
    /// roots of primes, so no kernel element has a nonzero torsion-free part.
    pub fn complete_kernel(&mut self) -> Result<()> {
        let coords: Vec<Coord> = self
            .group
            .truncated_coords(self.truncation)
            .into_iter()
            .filter(|c| c.summand.is_torsion())
            .collect();
        let mut primes: Vec<u64> = coords.iter().filter_map(|c| c.summand.prime()).collect();
        primes.sort_unstable();
        primes.dedup();
        let limit = self.density_rows + 4 * coords.len() + 64;
        for p in primes {
            let socle: Vec<&Coord> = coords.iter().filter(|c| c.summand.prime() == Some(p)).collect();
            let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
            let mut row = 0;
            while basis.len() < socle.len() {
                if row >= limit {
                    return Err(Error::RetriesExhausted {
                        attempts: row,
                        detail: format!("joint kernel stays nontrivial on the {p}-socle"),
                    });
                }
                let mut v: Vec<u64> = socle
                    .iter()
                    .map(|c| match c.summand {
                        Summand::Cyclic { .. } => self.cyclic_numerator(row, c) % p,
                        _ => self.padic(row, c, p, 1).to_u64().expect("digit below p"),
                    })
                    .collect();
                for (pivot, b) in &basis {
                    if v[*pivot] != 0 {
                        let f = v[*pivot] * arith::mod_inverse(b[*pivot] as i128, p).expect("pivot is a unit") % p;
                        for (x, y) in v.iter_mut().zip(b) {
                            *x = (*x + p - f * y % p) % p;
                        }
                    }
                }
                if let Some(pivot) = v.iter().position(|&x| x != 0) {
                    basis.push((pivot, v));
                }
                row += 1;
                self.rows = self.rows.max(row);
            }
        }
        Ok(())
    }

    /// Checks `h(x + y) = h(x) + h(y)` on every row: exactly on the rational
    /// part, within `2^-100` on the fixed-point part.
    pub fn check_homomorphism(&self, pairs: &[(Element, Element)]) -> bool {
        pairs.iter().all(|(x, y)| {
            let lhs = self.image(&x.add(y), self.rows);
            let rhs: Vec<TorusPoint> = self
                .image(x, self.rows)
                .iter()
                .zip(self.image(y, self.rows))
                .map(|(a, b)| a.add(&b))
                .collect();
            lhs.iter().zip(&rhs).all(|(a, b)| {
                let err = a.fixed.wrapping_sub(b.fixed).min(b.fixed.wrapping_sub(a.fixed));
                a.exact == b.exact && err < 1u128 << 28
            })
        })
    }

    /// CSV lines `label,row0,row1,...` of the density-row images.
    pub fn image_csv(&self, points: &[Element]) -> String {
        let mut out = String::from("point");
        for r in 0..self.density_rows {
            let _ = write!(out, ",h{r}");
        }
        out.push('\n');
        for x in points {
            let _ = write!(out, "\"{x}\"");
            for v in self.image_f64(x, self.density_rows) {
                let _ = write!(out, ",{v:.12}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub target: String,
    pub order: u64,
    pub prefix_len: usize,
    pub grid_size: u64,
    pub covered: u64,
    pub covering_fraction: f64,
    /// Lower corner of the first uncovered grid cell.
    pub first_empty_cell: Option<Vec<f64>>,
    pub pass: bool,
}

const MAX_GRID: u64 = 1 << 24;

/// For order `n >= 1`, whether the prefix image covers `T[n]^K` exactly; for
/// order 0, whether every cell of the `eps`-grid on `[0,1)^K` is hit.
pub fn verify_density(h: &CharacterMatrix, gen: &RoundGenerator, len: usize, eps: f64) -> Result<DensityReport> {
    let k = h.density_rows as u32;
    let n = gen.order();
    let side = if n == 0 { (1.0 / eps).ceil() as u64 } else { n };
    let grid_size = side.checked_pow(k).filter(|&g| g <= MAX_GRID).ok_or_else(|| {
        Error::Config(format!("density grid {side}^{k} exceeds {MAX_GRID} cells"))
    })?;
    let prefix = gen.prefix(len)?;
    let mut hit: HashSet<u64> = HashSet::new();
    for x in &prefix {
        let cell = h.image(x, h.density_rows).iter().try_fold(0u64, |acc, t| {
            let idx = if n == 0 {
                ((t.to_f64() * side as f64) as u64).min(side - 1)
            } else {
                // exact: the image lies in T[n]
                let scaled = &t.exact * BigRational::from(BigInt::from(n));
                if t.fixed != 0 || !scaled.is_integer() {
                    return None;
                }
                scaled.to_integer().to_u64()?
            };
            Some(acc * side + idx)
        });
        if let Some(c) = cell {
            hit.insert(c);
        }
    }
    let first_empty_cell = (0..grid_size).find(|c| !hit.contains(c)).map(|mut c| {
        let mut corner = vec![0.0; k as usize];
        for slot in corner.iter_mut().rev() {
            *slot = (c % side) as f64 / side as f64;
            c /= side;
        }
        corner
    });
    Ok(DensityReport {
        target: gen.to_string(),
        order: n,
        prefix_len: prefix.len(),
        grid_size,
        covered: hit.len() as u64,
        covering_fraction: hit.len() as f64 / grid_size as f64,
        pass: first_empty_cell.is_none(),
        first_empty_cell,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterReport {
    pub seed: u64,
    pub attempts: u32,
    pub rows: usize,
    pub density_rows: usize,
    pub truncation: u64,
    pub density: Vec<DensityReport>,
}

/// Draws characters until every target's image is dense, then completes the
/// matrix to an injective one on the truncation.
pub fn build_characters(
    group: &GroupRef,
    targets: &[RoundGenerator],
    cfg: &Config,
) -> Result<(CharacterMatrix, CharacterReport)> {
    cfg.validate()?;
    let mut last = String::new();
    for attempt in 0..cfg.retries {
        let seed = mix(&[cfg.seed, attempt as u64]);
        let mut h = CharacterMatrix::new(group.clone(), seed, cfg.chars, cfg.truncation);
        let mut reports = Vec::new();
        for t in targets {
            reports.push(verify_density(&h, t, cfg.realize_prefix, cfg.eps)?);
        }
        if let Some(bad) = reports.iter().find(|r| !r.pass) {
            last = format!(
                "target {} covers {:.4} of its grid ({} of {})",
                bad.target, bad.covering_fraction, bad.covered, bad.grid_size
            );
            continue;
        }
        h.complete_kernel()?;
        let report = CharacterReport {
            seed,
            attempts: attempt + 1,
            rows: h.rows,
            density_rows: h.density_rows,
            truncation: h.truncation,
            density: reports,
        };
        return Ok((h, report));
    }
    Err(Error::RetriesExhausted {
        attempts: cfg.retries as usize,
        detail: last,
    })
}

/// Random element of `G[n]` supported on the truncation.
fn sample_torsion(group: &GroupRef, n: u64, truncation: u64, rng: &mut ChaCha8Rng) -> Element {
    let mut coords = Vec::new();
    for c in group.truncated_coords(truncation) {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let v = match c.summand {
            Summand::Cyclic { p, s } => {
                let t = if n == 0 { s } else { s.min(arith::valuation(p, n)) };
                let step = arith::pow(p, s - t);
                Value::Residue(rng.gen_range(0..arith::pow(p, t)) * step)
            }
            Summand::Quasicyclic { p } => {
                let k = if n == 0 { rng.gen_range(1..=4) } else { arith::valuation(p, n) };
                let den = arith::pow(p, k);
                Value::Frac(BigRational::new(BigInt::from(rng.gen_range(0..den)), BigInt::from(den)))
            }
            Summand::Free if n == 0 => Value::Int(BigInt::from(rng.gen_range(-20i64..=20))),
            Summand::Rational if n == 0 => Value::Frac(BigRational::new(
                BigInt::from(rng.gen_range(-20i64..=20)),
                BigInt::from(rng.gen_range(1i64..=6)),
            )),
            _ => continue,
        };
        if !v.is_zero() {
            coords.push((c, v));
        }
    }
    Element::from_coords(coords)
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionCheck {
    pub samples: usize,
    pub failures: usize,
    /// Sound: largest distance to the nearest image. Tight: smallest
    /// separation from the image.
    pub extreme: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationVerdict {
    pub pass: bool,
    pub closure: String,
    pub characters: CharacterReport,
    pub skeleton_size: usize,
    pub sound: InclusionCheck,
    pub tight: InclusionCheck,
    /// All verdicts hold at the truncation scale only.
    pub truncation: u64,
}

const SAMPLES: usize = 32;

/// Compares the closure of `X` in the topology induced by the characters
/// with its Zariski closure, on samples from the truncation.
pub fn realize_closure(x: &DescribedSet, cfg: &Config) -> Result<RealizationVerdict> {
    realize(x, cfg).map(|r| r.verdict)
}

/// A realization run with the character matrix and the sampled points of
/// `X` it was judged on.
pub struct Realization {
    pub verdict: RealizationVerdict,
    pub characters: CharacterMatrix,
    pub skeleton: Vec<Element>,
}

pub fn realize(x: &DescribedSet, cfg: &Config) -> Result<Realization> {
    let group = x.group();
    let (closed, cert) = x.closure_with(cfg)?;
    let mut points: Vec<Element> = Vec::new();
    let mut targets: Vec<(Element, RoundGenerator)> = Vec::new();
    for atom in x.atoms() {
        match atom {
            Atom::Finite(xs) => points.extend(xs.iter().cloned()),
            Atom::Coset(c) => {
                for k in crate::closed::AlgebraicSet::from_coset(c.clone())
                    .irreducible_components_capped(cfg.max_transversal)?
                {
                    if k.is_singleton() {
                        points.push(k.anchor().clone());
                    } else {
                        targets.push((k.anchor().clone(), make_round(group, k.order())?));
                    }
                }
            }
            Atom::Round { base, gen, .. } => targets.push((base.clone(), gen.clone())),
            Atom::Span { offset, generators } => match generators.iter().find(|g| g.order_of() == 0) {
                Some(g) => {
                    let multiples = (1..=cfg.realize_prefix as i64).map(|k| g.scalar_mul(k)).collect();
                    targets.push((offset.clone(), RoundGenerator::listed(group.clone(), 0, multiples)?));
                }
                None => {
                    let single = DescribedSet::new(group.clone(), vec![atom.clone()])?;
                    for c in single.closure_with(cfg)?.0.parts() {
                        points.push(c.anchor().clone());
                    }
                }
            },
        }
    }
    let gens: Vec<RoundGenerator> = targets.iter().map(|(_, g)| g.clone()).collect();
    let (h, characters) = build_characters(group, &gens, cfg)?;
    for (base, gen) in &targets {
        points.extend(gen.prefix(cfg.realize_prefix)?.iter().map(|s| base.add(s)));
    }
    let k = h.density_rows();
    let all = h.rows();
    let skeleton: Vec<Vec<f64>> = points.iter().map(|p| h.image_f64(p, all)).collect();
    let sup = |a: &[f64], b: &[f64], rows: usize| {
        a.iter().zip(b).take(rows).map(|(x, y)| circle_dist(*x, *y)).fold(0.0, f64::max)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(mix(&[cfg.seed, 0x5a11]));

    let mut sound = InclusionCheck {
        samples: 0,
        failures: 0,
        extreme: 0.0,
        pass: true,
    };
    let mut closure_samples: Vec<Element> = cert.isolated.clone();
    for piece in &cert.pieces {
        for _ in 0..SAMPLES {
            closure_samples.push(piece.anchor.add(&sample_torsion(group, piece.order, h.truncation(), &mut rng)));
        }
    }
    for y in &closure_samples {
        let img = h.image_f64(y, k);
        let nearest = skeleton.iter().map(|s| sup(&img, s, k)).fold(f64::INFINITY, f64::min);
        sound.samples += 1;
        sound.extreme = sound.extreme.max(nearest);
        if nearest >= cfg.eps {
            sound.failures += 1;
        }
    }
    sound.pass = sound.failures == 0;

    let mut tight = InclusionCheck {
        samples: 0,
        failures: 0,
        extreme: f64::INFINITY,
        pass: true,
    };
    let whole = closed.set_eq(&crate::closed::AlgebraicSet::whole(group.clone()))?;
    if !whole {
        let mut tries = 0;
        while tight.samples < SAMPLES && tries < 50 * SAMPLES {
            tries += 1;
            let y = sample_torsion(group, 0, h.truncation(), &mut rng);
            if closed.contains(&y) {
                continue;
            }
            let img = h.image_f64(&y, all);
            let nearest = skeleton.iter().map(|s| sup(&img, s, all)).fold(f64::INFINITY, f64::min);
            tight.samples += 1;
            tight.extreme = tight.extreme.min(nearest);
            if nearest < cfg.eps {
                tight.failures += 1;
            }
        }
        tight.pass = tight.failures == 0;
    }
    if !tight.extreme.is_finite() {
        tight.extreme = 1.0;
    }
    let verdict = RealizationVerdict {
        pass: sound.pass && tight.pass,
        closure: closed.to_string(),
        characters,
        skeleton_size: points.len(),
        sound,
        tight,
        truncation: h.truncation(),
    };
    Ok(Realization {
        verdict,
        characters: h,
        skeleton: points,
    })
}

/// Random element of a coset, supported on the truncation.
pub fn sample_coset(c: &Coset, truncation: u64, seed: u64) -> Element {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    c.anchor().add(&sample_torsion(c.group(), c.order(), truncation, &mut rng))
}

#[cfg(test)]
mod tests;
