//! Surface syntax for jet polynomials and Noether operators.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | ident | '(' expr ')'
//! ident  := 'x' k | 'u' j ('_' suffix)? | 'F' i ('_' suffix)?
//! suffix := [xyz]+ | '[' integer (',' integer)* ']'
//! ```
//!
//! `F i` stands for the i-th equation; `F1_x` is its total derivative.
//! Operator expressions must be linear in the `F`s.

use std::collections::BTreeMap;

use ktforge::gca::{Poly, Rational};
use ktforge::jet::{JetContext, MultiIndex};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    /// Character offset inside the expression.
    pub offset: usize,
    pub message: String,
}

impl ExprError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ExprError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push((start, Tok::Int(text.parse().expect("digits"))));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                while i < chars.len() {
                    let ch = chars[i];
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        i += 1;
                    } else if ch == '[' {
                        // bracketed multi-index suffix
                        while i < chars.len() && chars[i] != ']' {
                            i += 1;
                        }
                        if i == chars.len() {
                            return Err(ExprError::new(start, "unterminated multi-index"));
                        }
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => return Err(ExprError::new(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Value of a subexpression: a polynomial plus a part linear in the
/// equation symbols.
#[derive(Debug, Clone, Default)]
struct Val {
    poly: Poly,
    lin: BTreeMap<(usize, MultiIndex), Poly>,
}

impl Val {
    fn poly(p: Poly) -> Self {
        Val {
            poly: p,
            lin: BTreeMap::new(),
        }
    }

    fn add(mut self, other: Val, sign: i64) -> Val {
        let s = Rational::from_integer(sign.into());
        self.poly.add_scaled(&other.poly, &s);
        for (k, g) in other.lin {
            let slot = self.lin.entry(k).or_default();
            slot.add_scaled(&g, &s);
        }
        self.lin.retain(|_, g| !g.is_zero());
        self
    }

    fn mul(self, other: Val, at: usize) -> Result<Val, ExprError> {
        if !self.lin.is_empty() && !other.lin.is_empty() {
            return Err(ExprError::new(at, "product of two equation terms"));
        }
        let mut lin = BTreeMap::new();
        for (k, g) in &self.lin {
            lin.insert(k.clone(), g.mul(&other.poly));
        }
        for (k, g) in &other.lin {
            lin.insert(k.clone(), self.poly.mul(g));
        }
        let mut v = Val {
            poly: self.poly.mul(&other.poly),
            lin,
        };
        v.lin.retain(|_, g| !g.is_zero());
        Ok(v)
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ctx: &'a JetContext,
    equations: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Val, ExprError> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.add(rhs, sign);
        }
    }

    fn term(&mut self) -> Result<Val, ExprError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(rhs, at)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Val, ExprError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(Val::default().add(v, -1));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Val, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let e = match self.toks.get(self.pos) {
                Some((_, Tok::Int(n))) => {
                    u32::try_from(n.clone()).map_err(|_| ExprError::new(self.offset(), "exponent too large"))?
                }
                _ => return Err(ExprError::new(self.offset(), "expected an integer exponent")),
            };
            self.pos += 1;
            if !base.lin.is_empty() {
                return Err(ExprError::new(at, "power of an equation term"));
            }
            return Ok(Val::poly(base.poly.pow(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Val, ExprError> {
        let at = self.offset();
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(ExprError::new(at, "unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    let d = match self.toks.get(self.pos) {
                        Some((_, Tok::Int(d))) => d.clone(),
                        _ => return Err(ExprError::new(self.offset(), "expected a denominator")),
                    };
                    if d == BigInt::from(0) {
                        return Err(ExprError::new(self.offset(), "zero denominator"));
                    }
                    self.pos += 1;
                    return Ok(Val::poly(Poly::constant(Rational::new(n, d))));
                }
                Ok(Val::poly(Poly::constant(Rational::from_integer(n))))
            }
            Tok::Ident(name) => self.ident(&name, at),
            Tok::LParen => {
                let v = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(ExprError::new(self.offset(), "expected `)`")),
                }
            }
            _ => Err(ExprError::new(at, "expected a number, a variable or `(`")),
        }
    }

    fn ident(&self, name: &str, at: usize) -> Result<Val, ExprError> {
        let (head, suffix) = match name.split_once('_') {
            Some((h, s)) => (h, Some(s)),
            None => (name, None),
        };
        let mut chars = head.chars();
        let kind = chars.next().expect("identifiers are nonempty");
        let digits: String = chars.collect();
        let index: usize = match digits.parse() {
            Ok(k) if k >= 1 => k,
            _ => return Err(ExprError::new(at, format!("unknown variable `{name}`"))),
        };
        let dim = self.ctx.base_dim();
        match kind {
            'x' => {
                if suffix.is_some() {
                    return Err(ExprError::new(at, format!("coordinate `{name}` takes no derivatives")));
                }
                if index > dim {
                    return Err(ExprError::new(
                        at,
                        format!("unknown variable `{name}`: base dimension is {dim}"),
                    ));
                }
                Ok(Val::poly(Poly::gen(self.ctx.coord(index - 1))))
            }
            'u' => {
                if index > self.ctx.fiber_rank() {
                    return Err(ExprError::new(
                        at,
                        format!("unknown variable `{name}`: fiber rank is {}", self.ctx.fiber_rank()),
                    ));
                }
                let alpha = parse_suffix(suffix, dim, at + head.len() + 1)?;
                if alpha.order() > self.ctx.jet_cap() {
                    return Err(ExprError::new(
                        at,
                        format!(
                            "`{name}` has jet order {} above the jet cap {}",
                            alpha.order(),
                            self.ctx.jet_cap()
                        ),
                    ));
                }
                let g = self
                    .ctx
                    .var(index - 1, &alpha)
                    .map_err(|e| ExprError::new(at, e.to_string()))?;
                Ok(Val::poly(Poly::gen(g)))
            }
            'F' if self.equations > 0 => {
                if index > self.equations {
                    return Err(ExprError::new(
                        at,
                        format!("`{name}` refers to equation {index} of {}", self.equations),
                    ));
                }
                let alpha = parse_suffix(suffix, dim, at + head.len() + 1)?;
                let mut v = Val::default();
                v.lin.insert((index - 1, alpha), Poly::one());
                Ok(v)
            }
            _ => Err(ExprError::new(at, format!("unknown variable `{name}`"))),
        }
    }
}

fn parse_suffix(suffix: Option<&str>, dim: usize, at: usize) -> Result<MultiIndex, ExprError> {
    let mut entries = vec![0u32; dim];
    let Some(s) = suffix else {
        return Ok(MultiIndex::new(entries));
    };
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| ExprError::new(at, "malformed multi-index"))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != dim {
            return Err(ExprError::new(
                at,
                format!("multi-index has {} entries, base dimension is {dim}", parts.len()),
            ));
        }
        for (e, p) in entries.iter_mut().zip(parts) {
            *e = p
                .parse()
                .map_err(|_| ExprError::new(at, format!("bad multi-index entry `{p}`")))?;
        }
        return Ok(MultiIndex::new(entries));
    }
    if s.is_empty() {
        return Err(ExprError::new(at, "empty derivative suffix"));
    }
    for (k, c) in s.chars().enumerate() {
        let dir = match c {
            'x' => 0,
            'y' => 1,
            'z' => 2,
            other => return Err(ExprError::new(at + k, format!("unknown direction {other}"))),
        };
        if dir >= dim {
            return Err(ExprError::new(at + k, format!("unknown direction {c}")));
        }
        entries[dir] += 1;
    }
    Ok(MultiIndex::new(entries))
}

fn run_parser(src: &str, ctx: &JetContext, equations: usize) -> Result<Val, ExprError> {
    let toks = lex(src)?;
    let end = src.chars().count();
    if toks.is_empty() {
        return Err(ExprError::new(0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        ctx,
        equations,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ExprError::new(p.offset(), "unexpected token"));
    }
    Ok(v)
}

/// Parse a jet polynomial.
pub fn parse_poly(src: &str, ctx: &JetContext) -> Result<Poly, ExprError> {
    Ok(run_parser(src, ctx, 0)?.poly)
}

/// Parse an operator `sum g * F_i_alpha` into per-equation coefficients.
pub fn parse_operator(
    src: &str,
    ctx: &JetContext,
    equations: usize,
) -> Result<Vec<BTreeMap<MultiIndex, Poly>>, ExprError> {
    let v = run_parser(src, ctx, equations.max(1))?;
    if !v.poly.is_zero() {
        return Err(ExprError::new(0, "operator has a term without an equation symbol"));
    }
    let mut out = vec![BTreeMap::new(); equations];
    for ((i, alpha), g) in v.lin {
        if i >= equations {
            return Err(ExprError::new(0, format!("no equation F{}", i + 1)));
        }
        out[i].insert(alpha, g);
    }
    Ok(out)
}
