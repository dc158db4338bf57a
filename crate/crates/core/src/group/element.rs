use crate::arith;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// One indecomposable summand type of a countable abelian group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Summand {
    /// `Z`
    Free,
    /// `Q`
    Rational,
    /// `Z(p^inf)`
    Quasicyclic { p: u64 },
    /// `Z(p^s)`, `s >= 1`
    Cyclic { p: u64, s: u32 },
}

impl Summand {
    pub fn prime(self) -> Option<u64> {
        match self {
            Summand::Quasicyclic { p } | Summand::Cyclic { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn is_torsion(self) -> bool {
        matches!(self, Summand::Quasicyclic { .. } | Summand::Cyclic { .. })
    }

    /// Modulus `p^s` of a cyclic summand.
    pub fn modulus(self) -> Option<u64> {
        match self {
            Summand::Cyclic { p, s } => Some(arith::pow(p, s)),
            _ => None,
        }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Free => write!(f, "Z"),
            Summand::Rational => write!(f, "Q"),
            Summand::Quasicyclic { p } => write!(f, "Zp({p})"),
            Summand::Cyclic { p, s } => write!(f, "Z({})", arith::pow(*p, *s)),
        }
    }
}

impl FromStr for Summand {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::BadCoordinate(text.to_string());
        match t {
            "Z" => return Ok(Summand::Free),
            "Q" => return Ok(Summand::Rational),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("Zp(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = inner.trim().parse().map_err(|_| bad())?;
            if !arith::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            return Ok(Summand::Quasicyclic { p });
        }
        if let Some(inner) = t.strip_prefix("Z(").and_then(|r| r.strip_suffix(')')) {
            let n: u64 = inner.trim().parse().map_err(|_| bad())?;
            return match arith::factor(n.max(1)).as_slice() {
                [(p, s)] => Ok(Summand::Cyclic { p: *p, s: *s }),
                _ => Err(Error::BadCyclicOrder(n)),
            };
        }
        Err(bad())
    }
}

/// Address of one coordinate: a summand type and the copy index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub summand: Summand,
    pub index: u64,
}

impl Coord {
    pub fn new(summand: Summand, index: u64) -> Self {
        Coord { summand, index }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.summand, self.index)
    }
}

impl FromStr for Coord {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::BadCoordinate(text.to_string());
        let open = t.rfind('[').ok_or_else(bad)?;
        let index = t[open + 1..]
            .strip_suffix(']')
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        Ok(Coord::new(t[..open].parse()?, index))
    }
}

/// The value stored at one coordinate. The variant is fixed by the summand:
/// integers for `Z`, rationals for `Q`, rationals in `[0,1)` with a `p`-power
/// denominator for `Z(p^inf)`, residues in `[0, p^s)` for `Z(p^s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Frac(BigRational),
    Residue(u64),
}

fn frac_mod_one(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Int(v) => v.is_zero(),
            Value::Frac(v) => v.is_zero(),
            Value::Residue(v) => *v == 0,
        }
    }

    /// Builds a canonical value for `summand` from an integer numerator and a
    /// positive denominator. Rejects denominators the summand cannot carry.
    pub fn from_ratio(summand: Summand, num: BigInt, den: BigInt) -> Result<Value> {
        let label = format!("{num}/{den} in {summand}");
        let bad = || Error::BadCoordinate(label.clone());
        if den.is_zero() {
            return Err(bad());
        }
        match summand {
            Summand::Free => {
                if !num.is_multiple_of(&den) {
                    return Err(bad());
                }
                Ok(Value::Int(num / den))
            }
            Summand::Rational => Ok(Value::Frac(BigRational::new(num, den))),
            Summand::Quasicyclic { p } => {
                let q = BigRational::new(num, den);
                let mut d = q.denom().clone();
                let pb = BigInt::from(p);
                while d.is_multiple_of(&pb) {
                    d /= &pb;
                }
                if !d.is_one() {
                    return Err(bad());
                }
                Ok(Value::Frac(frac_mod_one(&q)))
            }
            Summand::Cyclic { p, s } => {
                let m = BigInt::from(arith::pow(p, s));
                let q = BigRational::new(num, den);
                if !q.is_integer() {
                    return Err(bad());
                }
                let r = q.to_integer().mod_floor(&m);
                Ok(Value::Residue(r.to_u64().unwrap()))
            }
        }
    }

    fn add(summand: Summand, a: &Value, b: &Value) -> Value {
        match (summand, a, b) {
            (Summand::Free, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (Summand::Rational, Value::Frac(x), Value::Frac(y)) => Value::Frac(x + y),
            (Summand::Quasicyclic { .. }, Value::Frac(x), Value::Frac(y)) => {
                Value::Frac(frac_mod_one(&(x + y)))
            }
            (Summand::Cyclic { p, s }, Value::Residue(x), Value::Residue(y)) => {
                let m = arith::pow(p, s) as u128;
                Value::Residue(((*x as u128 + *y as u128) % m) as u64)
            }
            _ => panic!("value kind does not match summand {summand}"),
        }
    }

    fn scale(summand: Summand, k: &BigInt, a: &Value) -> Value {
        match (summand, a) {
            (Summand::Free, Value::Int(x)) => Value::Int(k * x),
            (Summand::Rational, Value::Frac(x)) => Value::Frac(x * BigRational::from(k.clone())),
            (Summand::Quasicyclic { .. }, Value::Frac(x)) => {
                Value::Frac(frac_mod_one(&(x * BigRational::from(k.clone()))))
            }
            (Summand::Cyclic { p, s }, Value::Residue(x)) => {
                let m = BigInt::from(arith::pow(p, s));
                let r = (k * BigInt::from(*x)).mod_floor(&m);
                Value::Residue(r.to_u64().unwrap())
            }
            _ => panic!("value kind does not match summand {summand}"),
        }
    }

    /// Order of this coordinate value (0 for infinite order).
    fn order(summand: Summand, a: &Value) -> u64 {
        match (summand, a) {
            (_, v) if v.is_zero() => 1,
            (Summand::Free, _) | (Summand::Rational, _) => 0,
            (Summand::Quasicyclic { .. }, Value::Frac(x)) => x
                .denom()
                .to_u64()
                .expect("quasicyclic denominator exceeds u64"),
            (Summand::Cyclic { p, s }, Value::Residue(x)) => {
                arith::pow(p, s - arith::valuation(p, *x).min(s))
            }
            _ => panic!("value kind does not match summand {summand}"),
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Frac(v) => v.to_string(),
            Value::Residue(v) => v.to_string(),
        }
    }
}

/// A finitely supported element of a described group. Zero coordinates are
/// never stored, so equality is syntactic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    coords: BTreeMap<Coord, Value>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    /// The element with a single coordinate; `value` must already be canonical
    /// for the summand (see [`Value::from_ratio`]).
    pub fn unit(coord: Coord, value: Value) -> Self {
        let mut e = Element::zero();
        e.set(coord, value);
        e
    }

    /// Standard generator of a coordinate: `1` in `Z`, `Q`, `Z(p^s)` and
    /// `1/p` in `Z(p^inf)`.
    pub fn generator(coord: Coord) -> Self {
        let v = match coord.summand {
            Summand::Free => Value::Int(BigInt::one()),
            Summand::Rational => Value::Frac(BigRational::one()),
            Summand::Quasicyclic { p } => {
                Value::Frac(BigRational::new(BigInt::one(), BigInt::from(p)))
            }
            Summand::Cyclic { .. } => Value::Residue(1),
        };
        Element::unit(coord, v)
    }

    pub fn from_coords<I: IntoIterator<Item = (Coord, Value)>>(it: I) -> Self {
        let mut e = Element::zero();
        for (c, v) in it {
            let cur = e.coords.remove(&c);
            let v = match cur {
                Some(cur) => Value::add(c.summand, &cur, &v),
                None => v,
            };
            e.set(c, v);
        }
        e
    }

    pub fn set(&mut self, coord: Coord, value: Value) {
        if value.is_zero() {
            self.coords.remove(&coord);
        } else {
            self.coords.insert(coord, value);
        }
    }

    pub fn get(&self, coord: &Coord) -> Option<&Value> {
        self.coords.get(coord)
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Coord, &Value)> {
        self.coords.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (c, v) in &other.coords {
            let nv = match out.coords.get(c) {
                Some(cur) => Value::add(c.summand, cur, v),
                None => v.clone(),
            };
            out.set(*c, nv);
        }
        out
    }

    pub fn negate(&self) -> Element {
        self.scalar_mul(-1)
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.negate())
    }

    pub fn scalar_mul(&self, k: i64) -> Element {
        self.scalar_mul_big(&BigInt::from(k))
    }

    pub fn scalar_mul_big(&self, k: &BigInt) -> Element {
        let mut out = Element::zero();
        if k.is_zero() {
            return out;
        }
        for (c, v) in &self.coords {
            out.set(*c, Value::scale(c.summand, k, v));
        }
        out
    }

    /// Order of the element, `0` when infinite.
    pub fn order_of(&self) -> u64 {
        self.coords
            .iter()
            .fold(1, |acc, (c, v)| arith::lcm(acc, Value::order(c.summand, v)))
    }

    /// `n x = 0`; every element lies in `G[0] = G`.
    pub fn in_torsion(&self, n: u64) -> bool {
        n == 0 || self.scalar_mul_big(&BigInt::from(n)).is_zero()
    }

    /// Keeps only the coordinates selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Coord) -> bool) -> Element {
        Element {
            coords: self
                .coords
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, v)| (*c, v.clone()))
                .collect(),
        }
    }

    pub(crate) fn map_values(
        &self,
        mut f: impl FnMut(&Coord, &Value) -> Option<Value>,
    ) -> Element {
        let mut out = Element::zero();
        for (c, v) in &self.coords {
            if let Some(nv) = f(c, v) {
                out.set(*c, nv);
            }
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, v) in &self.coords {
            let text = v.render();
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            if text == "1" {
                write!(f, "{c}")?;
            } else {
                write!(f, "{text}*{c}")?;
            }
        }
        Ok(())
    }
}

/// Parses `0` or `c1*ADDR + c2*ADDR + ...` where a coefficient is an integer or
/// `a/b` and `ADDR` is a coordinate such as `Z(4)[3]` or `Zp(2)[0]`.
/// Addresses `Z(n)[i]` with composite `n` are split by the Chinese remainder
/// theorem into their prime-power coordinates.
impl FromStr for Element {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "0" {
            return Ok(Element::zero());
        }
        let mut out = Element::zero();
        for term in split_terms(t) {
            let term = term.trim();
            let (negative, term) = match term.strip_prefix('-') {
                Some(rest) => (true, rest.trim()),
                None => (false, term),
            };
            let (coef, addr) = match term.split_once('*') {
                Some((c, a)) => (c.trim(), a.trim()),
                None => ("1", term),
            };
            let (mut num, den) = parse_ratio(coef)?;
            if negative {
                num = -num;
            }
            for (coord, scale) in expand_address(addr)? {
                let v = Value::from_ratio(coord.summand, &num * scale, den.clone())?;
                out = out.add(&Element::unit(coord, v));
            }
        }
        Ok(out)
    }
}

fn split_terms(t: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for (i, ch) in t.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || (ch == '-' && i > 0 && !cur.trim().is_empty() && !cur.trim_end().ends_with('*'))) {
            out.push(std::mem::take(&mut cur));
            if ch == '-' {
                cur.push('-');
            }
            continue;
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

pub(crate) fn parse_ratio(text: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::BadCoordinate(text.to_string());
    match text.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            if b.is_negative() {
                Ok((-a, -b))
            } else {
                Ok((a, b))
            }
        }
        None => Ok((text.trim().parse().map_err(|_| bad())?, BigInt::one())),
    }
}

/// Splits an address into prime-power coordinates; each comes with the
/// integer the coefficient must be multiplied by (CRT idempotent).
fn expand_address(addr: &str) -> Result<Vec<(Coord, BigInt)>> {
    let bad = || Error::BadCoordinate(addr.to_string());
    if let Some(rest) = addr.strip_prefix("Z(") {
        let close = rest.find(')').ok_or_else(bad)?;
        let n: u64 = rest[..close].trim().parse().map_err(|_| bad())?;
        let tail = &rest[close + 1..];
        if n >= 2 && arith::factor(n).len() > 1 {
            let index: u64 = tail
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())?;
            // x in Z(n) maps to (x mod p^s) in each prime-power factor
            return Ok(arith::factor(n)
                .into_iter()
                .map(|(p, s)| (Coord::new(Summand::Cyclic { p, s }, index), BigInt::one()))
                .collect());
        }
    }
    Ok(vec![(addr.parse()?, BigInt::one())])
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4(i: u64) -> Coord {
        Coord::new(Summand::Cyclic { p: 2, s: 2 }, i)
    }

    #[test]
    fn disjoint_support_addition_is_union() {
        let a = Element::generator(z4(0));
        let b = Element::generator(z4(1)).scalar_mul(2);
        let s = a.add(&b);
        assert_eq!(s.support_len(), 2);
        assert_eq!(s.get(&z4(0)), Some(&Value::Residue(1)));
        assert_eq!(s.get(&z4(1)), Some(&Value::Residue(2)));
    }

    #[test]
    fn order_of_residue_two_in_z4() {
        let x = Element::generator(z4(0)).scalar_mul(2);
        assert_eq!(x.order_of(), 2);
        assert!(x.in_torsion(2));
        assert!(!x.in_torsion(1));
    }

    #[test]
    fn scalar_zero_gives_zero() {
        let x: Element = "3*Z[0] + 1/4*Zp(2)[1]".parse().unwrap();
        assert!(x.scalar_mul(0).is_zero());
        assert_eq!(x.order_of(), 0);
    }

    #[test]
    fn quasicyclic_normal_form() {
        let x: Element = "5/4*Zp(2)[0]".parse().unwrap();
        assert_eq!(x.to_string(), "1/4*Zp(2)[0]");
        assert_eq!(x.order_of(), 4);
        assert!(x.scalar_mul(4).is_zero());
        assert!("1/3*Zp(2)[0]".parse::<Element>().is_err());
    }

    #[test]
    fn crt_address() {
        let x: Element = "Z(12)[0]".parse().unwrap();
        assert_eq!(x.to_string(), "Z(4)[0] + Z(3)[0]");
        assert_eq!(x.order_of(), 12);
        let y: Element = "-1*Z(12)[0]".parse().unwrap();
        assert!(x.add(&y).is_zero());
    }

    #[test]
    fn text_round_trip() {
        for t in ["0", "-3*Z[2]", "2/3*Q[0] + 3*Z(4)[1]", "Z(2)[5] + 1/8*Zp(2)[0]"] {
            let x: Element = t.parse().unwrap();
            assert_eq!(x.to_string().parse::<Element>().unwrap(), x);
        }
    }
}
