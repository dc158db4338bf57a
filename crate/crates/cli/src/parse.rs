//! Surface syntax for groups, elements, round generators and described sets.
//!
//! ```text
//! group := term ('+' term)* | '0'
//! term  := base ('^' mult)?
//! base  := 'Z' | 'Q' | 'Z(' int ')' | 'Zp(' prime (',inf')? ')'
//! mult  := int | 'w'
//! set   := atom ('|' atom)* | '{}'
//! atom  := '{' elems? '}' | (elem '+')? tail | '(' atom ')'
//! tail  := 'G[' int ']' | gen | 'span(' elems ')'
//! elem  := '0' | (coef '*')? addr ('+' (coef '*')? addr)*
//! addr  := 'Z[' i ']' | 'Q[' i ']' | 'Z(' n ')[' i ']' | 'Zp(' p ')[' i ']'
//! gen   := int '*' gen | 'round(' int ')' | 'seq(' int ';' elems ')' | 'trim(' gen ',' int ')'
//! ```

use std::sync::Arc;
use thiserror::Error;
use zariski::coset::{Coset, GroupRef};
use zariski::sets::{make_round, Atom, DescribedSet, RoundGenerator};
use zariski::{config::Config, Cardinal, Element, GroupDescriptor};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at column {}: {message}", column + 1)]
    Syntax { column: usize, message: String },
    #[error("at column {}: {source}", column + 1)]
    Semantic {
        column: usize,
        #[source]
        source: zariski::Error,
    },
}

impl ParseError {
    fn syntax(column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            column,
            message: message.into(),
        }
    }

    fn semantic(column: usize, source: zariski::Error) -> Self {
        ParseError::Semantic { column, source }
    }

    pub fn is_semantic(&self) -> bool {
        matches!(self, ParseError::Semantic { .. })
    }
}

type PResult<T> = std::result::Result<T, ParseError>;

/// A slice of the input together with its offset in the full text.
#[derive(Clone, Copy, Debug)]
struct Span<'a> {
    text: &'a str,
    at: usize,
}

impl<'a> Span<'a> {
    fn new(text: &'a str) -> Self {
        Span { text, at: 0 }
    }

    fn trim(self) -> Self {
        let lead = self.text.len() - self.text.trim_start().len();
        Span {
            text: self.text.trim(),
            at: self.at + lead,
        }
    }

    fn sub(self, start: usize, end: usize) -> Self {
        Span {
            text: &self.text[start..end],
            at: self.at + start,
        }
    }

    /// Splits on `sep` outside brackets, braces and parentheses.
    fn split_top(self, sep: char) -> PResult<Vec<Span<'a>>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in self.text.char_indices() {
            match ch {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(ParseError::syntax(self.at + i, format!("unmatched '{ch}'")));
                    }
                }
                c if c == sep && depth == 0 => {
                    out.push(self.sub(start, i));
                    start = i + ch.len_utf8();
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(ParseError::syntax(self.at + self.text.len(), "unclosed bracket"));
        }
        out.push(self.sub(start, self.text.len()));
        Ok(out)
    }

    /// `name(` ... `)` with the inner span, if the text has that shape.
    fn call(self, name: &str) -> Option<Span<'a>> {
        let open = name.len() + 1;
        if self.text.starts_with(name) && self.text[name.len()..].starts_with('(') && self.text.ends_with(')') {
            Some(self.sub(open, self.text.len() - 1))
        } else {
            None
        }
    }
}

fn parse_uint(s: Span) -> PResult<u64> {
    let s = s.trim();
    s.text
        .parse()
        .map_err(|_| ParseError::syntax(s.at, format!("expected a non-negative integer, found '{}'", s.text)))
}

pub fn parse_group(text: &str) -> PResult<GroupDescriptor> {
    let whole = Span::new(text).trim();
    if whole.text == "0" {
        return Ok(GroupDescriptor::trivial());
    }
    if whole.text.is_empty() {
        return Err(ParseError::syntax(whole.at, "empty group expression"));
    }
    let mut g = GroupDescriptor::trivial();
    for term in whole.split_top('+')? {
        let term = term.trim();
        if term.text.is_empty() {
            return Err(ParseError::syntax(term.at, "missing summand"));
        }
        let (base, mult) = match term.text.rfind('^') {
            Some(i) => (term.sub(0, i).trim(), parse_mult(term.sub(i + 1, term.text.len()))?),
            None => (term, Cardinal::Fin(1)),
        };
        let sem = |e| ParseError::semantic(base.at, e);
        g = match base.text {
            "Z" => g.with_free(mult).map_err(sem)?,
            "Q" => g.with_rational(mult).map_err(sem)?,
            _ => {
                if let Some(inner) = base.call("Zp") {
                    let p = match inner.text.split_once(',') {
                        Some((p, rest)) if rest.trim() == "inf" => parse_uint(inner.sub(0, p.len()))?,
                        Some(_) => return Err(ParseError::syntax(inner.at, "expected 'Zp(p,inf)'")),
                        None => parse_uint(inner)?,
                    };
                    g.with_quasicyclic(p, mult).map_err(sem)?
                } else if let Some(inner) = base.call("Z") {
                    let n = parse_uint(inner)?;
                    if n == 0 {
                        return Err(ParseError::semantic(inner.at, zariski::Error::BadCyclicOrder(0)));
                    }
                    g.with_cyclic_order(n, mult).map_err(sem)?
                } else {
                    return Err(ParseError::syntax(base.at, format!("unknown summand '{}'", base.text)));
                }
            }
        };
    }
    Ok(g)
}

fn parse_mult(s: Span) -> PResult<Cardinal> {
    let s = s.trim();
    if s.text == "w" {
        Ok(Cardinal::Omega)
    } else {
        parse_uint(s).map(Cardinal::Fin)
    }
}

fn parse_element_span(group: &GroupDescriptor, s: Span) -> PResult<Element> {
    let s = s.trim();
    if let Some(empty) = s.split_top('+')?.into_iter().find(|t| t.text.trim().is_empty()) {
        return Err(ParseError::syntax(empty.at, "missing term"));
    }
    let x: Element = s.text.parse().map_err(|e| match e {
        zariski::Error::BadCoordinate(_) => ParseError::syntax(s.at, format!("malformed element '{}'", s.text)),
        other => ParseError::semantic(s.at, other),
    })?;
    group.check_element(&x).map_err(|e| ParseError::semantic(s.at, e))?;
    Ok(x)
}

pub fn parse_element(group: &GroupDescriptor, text: &str) -> PResult<Element> {
    parse_element_span(group, Span::new(text))
}

fn parse_elements(group: &GroupDescriptor, s: Span) -> PResult<Vec<Element>> {
    if s.text.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split_top(',')?.into_iter().map(|e| parse_element_span(group, e)).collect()
}

fn is_generator(s: &str) -> bool {
    let body = match s.split_once('*') {
        Some((k, rest)) if k.trim().trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) => rest.trim(),
        _ => s,
    };
    ["round(", "seq(", "trim("].iter().any(|p| body.starts_with(p))
}

fn parse_generator_span(group: &GroupRef, s: Span) -> PResult<RoundGenerator> {
    let s = s.trim();
    if let Some(inner) = s.call("round") {
        let n = parse_uint(inner)?;
        return make_round(group, n).map_err(|e| ParseError::semantic(s.at, e));
    }
    if let Some(inner) = s.call("seq") {
        let (n, rest) = inner
            .text
            .split_once(';')
            .ok_or_else(|| ParseError::syntax(inner.at, "expected 'seq(n; elements)'"))?;
        let order = parse_uint(inner.sub(0, n.len()))?;
        let xs = parse_elements(group, inner.sub(n.len() + 1, n.len() + 1 + rest.len()))?;
        return RoundGenerator::listed(group.clone(), order, xs).map_err(|e| ParseError::semantic(s.at, e));
    }
    if let Some(inner) = s.call("trim") {
        let parts = inner.split_top(',')?;
        let [g, h] = parts.as_slice() else {
            return Err(ParseError::syntax(inner.at, "expected 'trim(generator, half)'"));
        };
        let half = parse_uint(*h)?;
        let gen = parse_generator_span(group, *g)?;
        let half = u8::try_from(half).map_err(|_| ParseError::syntax(h.at, "half must be 0 or 1"))?;
        return gen.trimmed(half).map_err(|e| ParseError::semantic(h.at, e));
    }
    if let Some((k, _)) = s.text.split_once('*') {
        let factor: i64 = k
            .trim()
            .parse()
            .map_err(|_| ParseError::syntax(s.at, format!("expected an integer factor, found '{}'", k.trim())))?;
        let inner = parse_generator_span(group, s.sub(k.len() + 1, s.text.len()))?;
        return inner.scaled(factor).map_err(|e| ParseError::semantic(s.at, e));
    }
    Err(ParseError::syntax(s.at, format!("expected a round generator, found '{}'", s.text)))
}

pub fn parse_generator(group: &GroupRef, text: &str) -> PResult<RoundGenerator> {
    parse_generator_span(group, Span::new(text))
}

/// Whether the outer parentheses of `text` match each other.
fn wrapped(text: &str) -> bool {
    if !(text.starts_with('(') && text.ends_with(')')) {
        return false;
    }
    let mut depth = 0i32;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i + 1 < text.len() {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

fn parse_atom(group: &GroupRef, s: Span, cfg: &Config) -> PResult<Atom> {
    let mut s = s.trim();
    while wrapped(s.text) {
        s = s.sub(1, s.text.len() - 1).trim();
    }
    if s.text.starts_with('{') {
        if !s.text.ends_with('}') {
            return Err(ParseError::syntax(s.at + s.text.len(), "expected '}'"));
        }
        return Ok(Atom::Finite(parse_elements(group, s.sub(1, s.text.len() - 1))?));
    }
    let terms = s.split_top('+')?;
    let tail = terms.last().copied().expect("split yields one span").trim();
    let base = if terms.len() > 1 {
        let end = tail.at - s.at;
        let head = s.sub(0, end).trim();
        let head = head.sub(0, head.text.len() - 1);
        parse_element_span(group, head)?
    } else {
        Element::zero()
    };
    if tail.text.starts_with("G[") && tail.text.ends_with(']') {
        let n = parse_uint(tail.sub(2, tail.text.len() - 1))?;
        return Coset::new(group.clone(), base, n)
            .map(Atom::Coset)
            .map_err(|e| ParseError::semantic(tail.at, e));
    }
    if let Some(inner) = tail.call("span") {
        return Ok(Atom::Span {
            offset: base,
            generators: parse_elements(group, inner)?,
        });
    }
    if is_generator(tail.text) {
        let gen = parse_generator_span(group, tail)?;
        return Atom::round(base, gen, cfg).map_err(|e| ParseError::semantic(tail.at, e));
    }
    Err(ParseError::syntax(
        tail.at,
        format!("expected '{{..}}', 'G[n]', a round generator or 'span(..)', found '{}'", tail.text),
    ))
}

/// Parses a described set over `group`. Round atoms are certified with `cfg`.
pub fn parse_set(group: &GroupRef, text: &str, cfg: &Config) -> PResult<DescribedSet> {
    let whole = Span::new(text).trim();
    let atoms = if whole.text == "{}" {
        Vec::new()
    } else {
        whole
            .split_top('|')?
            .into_iter()
            .map(|a| parse_atom(group, a, cfg))
            .collect::<PResult<_>>()?
    };
    DescribedSet::new(group.clone(), atoms).map_err(|e| ParseError::semantic(whole.at, e))
}

pub fn group_ref(g: GroupDescriptor) -> GroupRef {
    Arc::new(g)
}
