//! Text grammar for polynomials: terms like `c*x^i*y^j` joined by `+`/`-`,
//! with `*` optional. Coefficients are prime-field integers or bracketed
//! polynomials in the field generator `t`, e.g. `x^3 + [t+1]*x`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(char),
    Caret,
    Star,
    Plus,
    Minus,
    LBracket,
    RBracket,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            ' ' | '\t' | '\n' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                let mut n: u64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(chars[i] as u64 - '0' as u64))
                        .ok_or_else(|| Error::parse(start, "integer literal too large"))?;
                    i += 1;
                }
                out.push((start, Tok::Num(n)));
                continue;
            }
            'a'..='z' => Tok::Ident(c),
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            other => return Err(Error::parse(i, format!("unexpected character {other:?}"))),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [&'a str],
}

type Monomial = Vec<u32>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(Tok::Caret) {
            return Ok(1);
        }
        self.bump();
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(n)) if n <= u32::MAX as u64 => Ok(n as u32),
            _ => Err(Error::parse(at, "expected an exponent after '^'")),
        }
    }

    fn sum(&mut self, inside_bracket: bool) -> Result<BTreeMap<Monomial, Elem>> {
        let f = self.field;
        let mut acc: BTreeMap<Monomial, Elem> = BTreeMap::new();
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    false
                }
                Some(Tok::Minus) => {
                    self.bump();
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let (mut c, mono) = self.term(inside_bracket)?;
            if negate {
                c = f.neg(c);
            }
            let slot = acc.entry(mono).or_insert(Elem::ZERO);
            *slot = f.add(*slot, c);
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    fn term(&mut self, inside_bracket: bool) -> Result<(Elem, Monomial)> {
        let f = self.field;
        let nvars = if inside_bracket { 1 } else { self.vars.len() };
        let mut coeff = Elem::ONE;
        let mut mono = vec![0u32; nvars];
        let mut factors = 0;
        loop {
            let at = self.here();
            match self.peek() {
                Some(Tok::Num(n)) => {
                    self.bump();
                    let e = self.exponent()?;
                    let c = f.from_int((n % f.characteristic() as u64) as i64);
                    coeff = f.mul(coeff, f.pow(c, e as u64));
                }
                Some(Tok::LBracket) if !inside_bracket => {
                    self.bump();
                    let inner = self.sum(true)?;
                    if self.bump() != Some(Tok::RBracket) {
                        return Err(Error::parse(self.here(), "expected ']'"));
                    }
                    let e = self.exponent()?;
                    let value = self.bracket_value(&inner, at)?;
                    coeff = f.mul(coeff, f.pow(value, e as u64));
                }
                Some(Tok::Ident(c)) => {
                    self.bump();
                    let e = self.exponent()?;
                    if inside_bracket {
                        if c != 't' {
                            return Err(Error::parse(at, format!("unexpected variable '{c}' inside brackets")));
                        }
                        mono[0] += e;
                    } else {
                        let idx = self.vars.iter().position(|v| v.len() == 1 && v.starts_with(c)).ok_or_else(|| {
                            Error::parse(
                                at,
                                format!("unknown variable '{c}' (expected one of {})", self.vars.join(", ")),
                            )
                        })?;
                        mono[idx] += e;
                    }
                }
                _ => {
                    if factors == 0 {
                        return Err(Error::parse(at, "expected a term"));
                    }
                    break;
                }
            }
            factors += 1;
            if self.peek() == Some(Tok::Star) {
                self.bump();
                if !matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::LBracket)) {
                    return Err(Error::parse(self.here(), "expected a factor after '*'"));
                }
            }
        }
        Ok((coeff, mono))
    }

    fn bracket_value(&self, terms: &BTreeMap<Monomial, Elem>, at: usize) -> Result<Elem> {
        let f = self.field;
        if f.degree() == 1 && terms.keys().any(|m| m[0] > 0) {
            return Err(Error::parse(at, "'t' is not defined over a prime field"));
        }
        let t = if f.degree() == 1 { Elem::ZERO } else { Elem(f.characteristic()) };
        Ok(terms.iter().fold(Elem::ZERO, |acc, (m, &c)| f.add(acc, f.mul(c, f.pow(t, m[0] as u64)))))
    }
}

/// Parses `src` as a sum of monomials in `vars`, returning the nonzero
/// coefficients keyed by exponent vector.
pub fn parse_terms(field: &Field, src: &str, vars: &[&str]) -> Result<BTreeMap<Vec<u32>, Elem>> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::parse(0, "empty polynomial"));
    }
    let mut p = Parser { field, toks, pos: 0, end: src.chars().count(), vars };
    let out = p.sum(false)?;
    if p.pos < p.toks.len() {
        return Err(Error::parse(p.here(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Renders a coefficient: integers for prime-field elements, `[...]` otherwise.
pub fn render_coeff(field: &Field, c: Elem) -> String {
    if field.in_prime_field(c) {
        c.0.to_string()
    } else {
        format!("[{}]", field.render(c))
    }
}

/// Joins already-ordered terms `(coefficient, [(var, exponent)])`.
pub(crate) fn render_terms(field: &Field, terms: &[(Elem, Vec<(&str, usize)>)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let parts: Vec<String> = terms
        .iter()
        .map(|(c, vars)| {
            let mono: Vec<String> = vars
                .iter()
                .filter(|(_, e)| *e > 0)
                .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            if mono.is_empty() {
                render_coeff(field, *c)
            } else if *c == Elem::ONE {
                mono.join("*")
            } else {
                format!("{}*{}", render_coeff(field, *c), mono.join("*"))
            }
        })
        .collect();
    parts.join(" + ")
}
