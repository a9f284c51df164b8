//! The canonical expression grammar: parsing and printing.
//!
//! Grammar, precedence low to high:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*' | juxtaposition) factor)*
//! factor := base ('^' uint)?
//! base   := rational | var | '(' expr ')' | '-' factor
//! ```
//!
//! Juxtaposition binds like `*`, so `2x^3y` is `2*x^3*y`. Variables are
//! `x` and `y`, plus `t` and tower generators `b1, b2, ...` in the
//! contexts that allow them. Rational literals are `p/q` or integers.
//! Input accepts juxtaposition; output always uses explicit `*` so that
//! canonical forms round-trip byte-for-byte.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly2::{Monomial, Poly2};
use crate::ring::{CoeffRing, Rat, QQ};
use crate::tower::{Elem, FieldCtx};
use crate::unipoly::UniPoly;

/// Largest exponent accepted by default.
pub const DEFAULT_EXPONENT_LIMIT: u32 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    /// Positions are 1-based character offsets.
    Syntax { pos: usize, msg: String },
    ExponentOverflow { pos: usize, limit: u32 },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { pos, msg } => {
                write!(f, "syntax error at position {}: {}", pos, msg)
            }
            ParseError::ExponentOverflow { pos, limit } => {
                write!(f, "exponent at position {} exceeds the limit {}", pos, limit)
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Abstract syntax of a polynomial expression.
#[derive(Clone, Debug, PartialEq)]
pub enum PolyExpr {
    Lit(Rat),
    Var { name: String, pos: usize },
    Neg(Box<PolyExpr>),
    Add(Box<PolyExpr>, Box<PolyExpr>),
    Sub(Box<PolyExpr>, Box<PolyExpr>),
    Mul(Box<PolyExpr>, Box<PolyExpr>),
    Pow(Box<PolyExpr>, u32),
}

// ----- lexer -------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, pos));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, pos));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, pos));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, pos));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, pos));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                toks.push((Tok::Num(digits.parse().unwrap()), start + 1));
            }
            'x' | 'y' | 't' => {
                toks.push((Tok::Ident(c.to_string()), pos));
                i += 1;
            }
            'b' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start + 1 {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "generator names are b1, b2, ...".into(),
                    });
                }
                let name: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(name), pos));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos,
                    msg: format!("unexpected character '{}'", other),
                })
            }
        }
    }
    Ok(toks)
}

// ----- parser ------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end_pos: usize,
    exponent_limit: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_pos, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.at).cloned();
        self.at += t.is_some() as usize;
        t
    }

    fn expr(&mut self) -> Result<PolyExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = PolyExpr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = PolyExpr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolyExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = PolyExpr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                // Juxtaposition: a factor start directly follows.
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = PolyExpr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<PolyExpr, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some((Tok::Num(n), _)) => {
                    if n > BigInt::from(self.exponent_limit) {
                        return Err(ParseError::ExponentOverflow {
                            pos,
                            limit: self.exponent_limit,
                        });
                    }
                    let e: u32 = n.try_into().unwrap();
                    Ok(PolyExpr::Pow(Box::new(base), e))
                }
                _ => Err(ParseError::Syntax {
                    pos,
                    msg: "expected a nonnegative integer exponent".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<PolyExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some((Tok::Num(n), _)) => {
                // Rational literal p/q.
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some((Tok::Num(d), _)) => {
                            if d.is_zero() {
                                Err(ParseError::Syntax {
                                    pos: dpos,
                                    msg: "zero denominator".into(),
                                })
                            } else {
                                Ok(PolyExpr::Lit(Rat::new(n, d)))
                            }
                        }
                        _ => Err(ParseError::Syntax {
                            pos: dpos,
                            msg: "expected a denominator".into(),
                        }),
                    }
                } else {
                    Ok(PolyExpr::Lit(Rat::from_integer(n)))
                }
            }
            Some((Tok::Ident(name), p)) => Ok(PolyExpr::Var { name, pos: p }),
            Some((Tok::LParen, p)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        pos: self.end_pos.min(self.pos()),
                        msg: format!("unclosed parenthesis opened at position {}", p),
                    }),
                }
            }
            Some((Tok::Minus, _)) => Ok(PolyExpr::Neg(Box::new(self.factor()?))),
            Some((tok, p)) => Err(ParseError::Syntax {
                pos: p,
                msg: format!("unexpected token {:?}", tok),
            }),
            None => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses the grammar into an abstract expression.
pub fn parse_expr(input: &str) -> Result<PolyExpr, ParseError> {
    parse_expr_with_limit(input, DEFAULT_EXPONENT_LIMIT)
}

pub fn parse_expr_with_limit(input: &str, limit: u32) -> Result<PolyExpr, ParseError> {
    let end_pos = input.chars().count() + 1;
    let toks = lex(input)?;
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            pos: 1,
            msg: "empty input".into(),
        });
    }
    let mut p = Parser {
        toks,
        at: 0,
        end_pos,
        exponent_limit: limit,
    };
    let e = p.expr()?;
    match p.bump() {
        None => Ok(e),
        Some((tok, pos)) => Err(ParseError::Syntax {
            pos,
            msg: format!("unexpected token {:?} after expression", tok),
        }),
    }
}

// ----- lowering ----------------------------------------------------------------

/// Which variables an expression may mention when lowered over a tower.
#[derive(Clone, Debug, Default)]
pub struct VarSpec {
    /// Allow the plane variables x and y.
    pub allow_xy: bool,
    /// Name mapped to the univariate slot (rides in the x exponent).
    pub uni_var: Option<String>,
    /// Generators `b1..b{max_gen}` resolve to tower elements.
    pub max_gen: usize,
}

/// Lowers an expression to a polynomial over the tower context.
pub fn lower_in_ctx(
    ctx: &FieldCtx,
    expr: &PolyExpr,
    spec: &VarSpec,
) -> Result<Poly2<Elem>, ParseError> {
    match expr {
        PolyExpr::Lit(r) => Ok(Poly2::constant(ctx, Elem::from_rat(r.clone()))),
        PolyExpr::Var { name, pos } => {
            if spec.uni_var.as_deref() == Some(name) {
                return Ok(Poly2::var_x(ctx));
            }
            match name.as_str() {
                "x" if spec.allow_xy => Ok(Poly2::var_x(ctx)),
                "y" if spec.allow_xy => Ok(Poly2::var_y(ctx)),
                _ => {
                    if let Some(idx) = name.strip_prefix('b').and_then(|s| s.parse::<usize>().ok())
                    {
                        if idx >= 1 && idx <= spec.max_gen {
                            return Ok(Poly2::constant(ctx, ctx.gen_elem(idx - 1)));
                        }
                    }
                    Err(ParseError::Syntax {
                        pos: *pos,
                        msg: format!("unknown variable '{}' in this context", name),
                    })
                }
            }
        }
        PolyExpr::Neg(e) => Ok(lower_in_ctx(ctx, e, spec)?.neg(ctx)),
        PolyExpr::Add(a, b) => {
            Ok(lower_in_ctx(ctx, a, spec)?.add(ctx, &lower_in_ctx(ctx, b, spec)?))
        }
        PolyExpr::Sub(a, b) => {
            Ok(lower_in_ctx(ctx, a, spec)?.sub(ctx, &lower_in_ctx(ctx, b, spec)?))
        }
        PolyExpr::Mul(a, b) => {
            Ok(lower_in_ctx(ctx, a, spec)?.mul(ctx, &lower_in_ctx(ctx, b, spec)?))
        }
        PolyExpr::Pow(e, k) => Ok(lower_in_ctx(ctx, e, spec)?.pow(ctx, *k)),
    }
}

/// Parses a polynomial in x and y over the rationals.
pub fn parse_poly(input: &str) -> Result<Poly2<Rat>, ParseError> {
    parse_poly_with_limit(input, DEFAULT_EXPONENT_LIMIT)
}

pub fn parse_poly_with_limit(input: &str, limit: u32) -> Result<Poly2<Rat>, ParseError> {
    let expr = parse_expr_with_limit(input, limit)?;
    let ctx = FieldCtx::rational();
    let spec = VarSpec {
        allow_xy: true,
        ..VarSpec::default()
    };
    let p = lower_in_ctx(&ctx, &expr, &spec)?;
    Ok(p.map_coeffs(|c| c.as_rat().expect("rational context").clone()))
}

/// Parses a polynomial in x and y whose coefficients may mention the
/// generators of `ctx`.
pub fn parse_ctx_poly(ctx: &FieldCtx, input: &str) -> Result<Poly2<Elem>, ParseError> {
    let expr = parse_expr(input)?;
    let spec = VarSpec {
        allow_xy: true,
        uni_var: None,
        max_gen: ctx.height(),
    };
    lower_in_ctx(ctx, &expr, &spec)
}

/// Parses a tower element (no plane variables).
pub fn parse_elem(ctx: &FieldCtx, input: &str) -> Result<Elem, ParseError> {
    let expr = parse_expr(input)?;
    let spec = VarSpec {
        allow_xy: false,
        uni_var: None,
        max_gen: ctx.height(),
    };
    let p = lower_in_ctx(ctx, &expr, &spec)?;
    Ok(p.constant_coeff(ctx))
}

/// Parses a univariate polynomial in `var` with tower coefficients;
/// generators with index above `max_gen` are rejected.
pub fn parse_unipoly(
    ctx: &FieldCtx,
    input: &str,
    var: &str,
    max_gen: usize,
) -> Result<UniPoly<Elem>, ParseError> {
    let expr = parse_expr(input)?;
    let spec = VarSpec {
        allow_xy: false,
        uni_var: Some(var.to_string()),
        max_gen,
    };
    let p = lower_in_ctx(ctx, &expr, &spec)?;
    let deg = p
        .terms()
        .map(|(m, _)| m.ex as usize)
        .max()
        .map_or(0, |d| d + 1);
    let mut coeffs = vec![ctx.zero(); deg];
    for (m, c) in p.terms() {
        coeffs[m.ex as usize] = c.clone();
    }
    Ok(UniPoly::from_coeffs(ctx, coeffs))
}

// ----- rendering ---------------------------------------------------------------

fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A power product over the tower generators, ordered graded-lex with
/// the newest generator largest.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GenMono(Vec<(usize, u32)>);

impl GenMono {
    fn one() -> Self {
        GenMono(Vec::new())
    }

    fn total(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    fn mul_gen(&self, level: usize, e: u32) -> Self {
        let mut v = self.0.clone();
        match v.iter_mut().find(|(l, _)| *l == level) {
            Some(entry) => entry.1 += e,
            None => {
                v.push((level, e));
                v.sort_by_key(|&(l, _)| l);
            }
        }
        GenMono(v)
    }
}

impl Ord for GenMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total().cmp(&other.total()).then_with(|| {
            let key = |g: &GenMono| -> Vec<(usize, u32)> {
                g.0.iter().rev().copied().collect()
            };
            key(self).cmp(&key(other))
        })
    }
}

impl PartialOrd for GenMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Expands an element into rational multiples of generator monomials.
fn flatten_elem(e: &Elem, mono: &GenMono, out: &mut BTreeMap<GenMono, Rat>) {
    match e {
        Elem::Rat(r) => {
            if !r.is_zero() {
                let entry = out.entry(mono.clone()).or_insert_with(Rat::zero);
                *entry += r;
            }
        }
        Elem::Ext { level, poly } => {
            for (i, c) in poly.coeffs().iter().enumerate() {
                let m = if i == 0 {
                    mono.clone()
                } else {
                    mono.mul_gen(*level, i as u32)
                };
                flatten_elem(c, &m, out);
            }
        }
    }
}

fn gen_mono_str(g: &GenMono) -> String {
    g.0.iter()
        .rev()
        .map(|&(l, e)| {
            if e == 1 {
                FieldCtx::gen_name(l)
            } else {
                format!("{}^{}", FieldCtx::gen_name(l), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// One signed rendered term.
struct SignedTerm {
    neg: bool,
    body: String,
}

fn join_terms(terms: Vec<SignedTerm>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        if i == 0 {
            if t.neg {
                out.push('-');
            }
        } else if t.neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&t.body);
    }
    out
}

/// Builds `coeff*parts` with unit coefficients suppressed.
fn term_body(abs: &Rat, parts: Vec<String>) -> String {
    let mono = parts.join("*");
    if mono.is_empty() {
        rat_str(abs)
    } else if abs.is_one() {
        mono
    } else {
        format!("{}*{}", rat_str(abs), mono)
    }
}

fn xy_mono_parts(m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    if m.ex == 1 {
        parts.push("x".to_string());
    } else if m.ex > 1 {
        parts.push(format!("x^{}", m.ex));
    }
    if m.ey == 1 {
        parts.push("y".to_string());
    } else if m.ey > 1 {
        parts.push(format!("y^{}", m.ey));
    }
    parts
}

/// Canonical form of a polynomial over Q: graded-lex descending terms,
/// explicit `*`, suppressed unit exponents and coefficients.
pub fn render_poly(p: &Poly2<Rat>) -> String {
    let mut terms = Vec::new();
    for (m, c) in p.terms().rev() {
        terms.push(SignedTerm {
            neg: c.is_negative(),
            body: term_body(&c.abs(), xy_mono_parts(m)),
        });
    }
    join_terms(terms)
}

/// Canonical form of a polynomial with tower coefficients: the fully
/// distributed sum over plane monomials and generator monomials.
pub fn render_ctx_poly(p: &Poly2<Elem>) -> String {
    let mut terms = Vec::new();
    for (m, c) in p.terms().rev() {
        let mut flat = BTreeMap::new();
        flatten_elem(c, &GenMono::one(), &mut flat);
        for (g, r) in flat.iter().rev() {
            let mut parts = Vec::new();
            let gs = gen_mono_str(g);
            if !gs.is_empty() {
                parts.push(gs);
            }
            parts.extend(xy_mono_parts(m));
            terms.push(SignedTerm {
                neg: r.is_negative(),
                body: term_body(&r.abs(), parts),
            });
        }
    }
    join_terms(terms)
}

/// Canonical form of a tower element.
pub fn render_elem(e: &Elem) -> String {
    let mut flat = BTreeMap::new();
    flatten_elem(e, &GenMono::one(), &mut flat);
    let mut terms = Vec::new();
    for (g, r) in flat.iter().rev() {
        let gs = gen_mono_str(g);
        let parts = if gs.is_empty() { vec![] } else { vec![gs] };
        terms.push(SignedTerm {
            neg: r.is_negative(),
            body: term_body(&r.abs(), parts),
        });
    }
    join_terms(terms)
}

/// Canonical form of a univariate polynomial in `var` over the tower.
pub fn render_unipoly(f: &UniPoly<Elem>, var: &str) -> String {
    let mut terms = Vec::new();
    for (k, c) in f.coeffs().iter().enumerate().rev() {
        let var_part = match k {
            0 => None,
            1 => Some(var.to_string()),
            _ => Some(format!("{}^{}", var, k)),
        };
        let mut flat = BTreeMap::new();
        flatten_elem(c, &GenMono::one(), &mut flat);
        for (g, r) in flat.iter().rev() {
            let mut parts = Vec::new();
            let gs = gen_mono_str(g);
            if !gs.is_empty() {
                parts.push(gs);
            }
            parts.extend(var_part.clone());
            terms.push(SignedTerm {
                neg: r.is_negative(),
                body: term_body(&r.abs(), parts),
            });
        }
    }
    join_terms(terms)
}

/// Reads a tower polynomial back over Q when no generator occurs.
pub fn ctx_poly_to_q(p: &Poly2<Elem>) -> Option<Poly2<Rat>> {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        terms.push((*m, c.as_rat()?.clone()));
    }
    Some(Poly2::from_terms(&QQ, terms))
}
