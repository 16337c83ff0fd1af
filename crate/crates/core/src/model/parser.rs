//! Line-oriented network DSL.
//!
//! ```text
//! # comment
//! species: A, B
//! param k1 = 6
//! constraint: A + 2*B <= 10, even(A)
//! 2 A -> 3 A @ mass_action(k1)
//! 0 -> B @ 30/(1 + A^3)
//! ```
//!
//! Reactions are parsed in two passes: species are collected first, then the
//! propensity expressions are resolved against species names, `x1..xn` and
//! parameters. [`NetworkTemplate`] keeps the unresolved form so parameter
//! sweeps can re-instantiate without re-parsing.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{CmpOp, LinearCondition, ModelError, Propensity, Reaction, ReactionNetwork, StateConstraint};
use crate::polyalg::MultiIndex;
use crate::{Poly, RatFn, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Arrow,
    At,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,
    Cmp(CmpOp),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Syntax { line, col, msg: msg.into() }
}

/// Exact value of a decimal literal such as `12`, `0.25` or `5.0901e8`.
fn decimal(digits: &str, frac: &str, exp: i64) -> Rational {
    let mantissa: BigInt = format!("{digits}{frac}").parse().unwrap_or_default();
    let shift = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    if shift >= 0 {
        Rational::from_integer(mantissa * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(mantissa, num_traits::pow(ten, (-shift) as usize))
    }
}

fn lex(text: &str, line: usize) -> Result<Vec<Token>, ModelError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match (c, two.as_str()) {
            (_, "->") => (Tok::Arrow, 2),
            (_, "<=") => (Tok::Cmp(CmpOp::Le), 2),
            (_, ">=") => (Tok::Cmp(CmpOp::Ge), 2),
            (_, "==") => (Tok::Cmp(CmpOp::Eq), 2),
            ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
            ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
            ('@', _) => (Tok::At, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) | ('−', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('=', _) => (Tok::Assign, 1),
            _ if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let int: String = chars[start..j].iter().collect();
                let mut frac = String::new();
                if j < chars.len() && chars[j] == '.' {
                    j += 1;
                    let fs = j;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    frac = chars[fs..j].iter().collect();
                }
                let mut exp = 0i64;
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    let neg = matches!(chars.get(k), Some('-'));
                    if matches!(chars.get(k), Some('-') | Some('+')) {
                        k += 1;
                    }
                    if chars.get(k).is_some_and(|d| d.is_ascii_digit()) {
                        let es = k;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        let e: String = chars[es..k].iter().collect();
                        exp = e.parse::<i64>().map_err(|_| syntax(line, col, "exponent out of range"))?;
                        if neg {
                            exp = -exp;
                        }
                        j = k;
                    }
                }
                if exp.abs() > 4000 {
                    return Err(syntax(line, col, "exponent out of range"));
                }
                (Tok::Num(decimal(&int, &frac, exp)), j - start)
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[start..j].iter().collect()), j - start)
            }
            _ => return Err(syntax(line, col, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, col });
        i += len;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(Rational),
    Ident(String, usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>, usize),
    Call(String, Vec<Expr>, usize),
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], line: usize, end_col: usize) -> Self {
        Self { toks, pos: 0, line, end_col }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ModelError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> ModelError {
        syntax(self.line, self.col(), msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expr(&mut self) -> Result<Expr, ModelError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ModelError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ModelError> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ModelError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            let col = self.col();
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp), col));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ModelError> {
        let col = self.col();
        match self.next() {
            Some(Tok::Num(q)) => Ok(Expr::Num(q)),
            Some(Tok::Ident(name)) => {
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Expr::Call(name, args, col))
                } else {
                    Ok(Expr::Ident(name, col))
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.error("expected a number, identifier or `(`"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PropSyntax {
    MassAction(Expr),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
struct ReactionSyntax {
    line: usize,
    lhs: Vec<(u32, String)>,
    rhs: Vec<(u32, String)>,
    prop: PropSyntax,
    prop_col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum CondSyntax {
    Parity(bool, String, usize),
    Compare(Expr, CmpOp, Expr),
}

/// A parsed but not yet instantiated network: expressions are kept symbolic
/// so parameters can be overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTemplate {
    species: Vec<String>,
    params: Vec<(String, Expr, usize)>,
    reactions: Vec<ReactionSyntax>,
    conditions: Vec<(usize, CondSyntax)>,
}

/// Parses and instantiates with the file's own parameter values.
pub fn parse_network(text: &str) -> Result<ReactionNetwork, ModelError> {
    parse_template(text)?.instantiate(&[])
}

pub fn parse_template(text: &str) -> Result<NetworkTemplate, ModelError> {
    let mut header: Option<(usize, Vec<String>)> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut params = Vec::new();
    let mut reactions = Vec::new();
    let mut conditions = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let toks = lex(body, line)?;
        let end_col = body.chars().count() + 1;
        let mut cur = Cursor::new(&toks, line, end_col);
        let keyword = match (toks.first().map(|t| &t.tok), toks.get(1).map(|t| &t.tok)) {
            (Some(Tok::Ident(w)), Some(Tok::Colon)) if w == "species" || w == "constraint" => Some(w.clone()),
            (Some(Tok::Ident(w)), Some(Tok::Ident(_))) if w == "param" => Some(w.clone()),
            _ => None,
        };
        match keyword.as_deref() {
            Some("species") => {
                if header.is_some() {
                    return Err(syntax(line, 1, "duplicate species header"));
                }
                if !reactions.is_empty() {
                    return Err(syntax(line, 1, "species header must precede reactions"));
                }
                cur.pos = 2;
                let mut names = Vec::new();
                while !cur.at_end() {
                    let col = cur.col();
                    match cur.next() {
                        Some(Tok::Ident(name)) => {
                            if names.contains(&name) {
                                return Err(syntax(line, col, format!("species `{name}` listed twice")));
                            }
                            names.push(name);
                        }
                        _ => return Err(syntax(line, col, "expected a species name")),
                    }
                    cur.eat(&Tok::Comma);
                }
                if names.is_empty() {
                    return Err(syntax(line, end_col, "empty species list"));
                }
                header = Some((line, names));
            }
            Some("param") => {
                cur.pos = 1;
                let Some(Tok::Ident(name)) = cur.next() else { unreachable!() };
                cur.expect(&Tok::Assign, "`=`")?;
                let e = cur.expr()?;
                if !cur.at_end() {
                    return Err(cur.error("unexpected trailing input"));
                }
                if params.iter().any(|(p, _, _): &(String, Expr, usize)| *p == name) {
                    return Err(syntax(line, 7, format!("parameter `{name}` defined twice")));
                }
                params.push((name, e, line));
            }
            Some("constraint") => {
                cur.pos = 2;
                loop {
                    conditions.push((line, condition(&mut cur)?));
                    if cur.at_end() {
                        break;
                    }
                    cur.expect(&Tok::Comma, "`,`")?;
                }
            }
            _ => {
                let r = reaction(&mut cur)?;
                for (_, s) in r.lhs.iter().chain(&r.rhs) {
                    match &header {
                        Some((_, names)) => {
                            if !names.contains(s) {
                                let col = toks.iter().find(|t| t.tok == Tok::Ident(s.clone())).map_or(1, |t| t.col);
                                return Err(syntax(line, col, format!("species `{s}` not declared in header")));
                            }
                        }
                        None => {
                            if !seen.contains(s) {
                                seen.push(s.clone());
                            }
                        }
                    }
                }
                reactions.push(r);
            }
        }
    }
    if reactions.is_empty() {
        return Err(ModelError::EmptyNetwork);
    }
    let species = header.map_or(seen, |h| h.1);
    for (name, _, line) in &params {
        if species.contains(name) {
            return Err(syntax(*line, 7, format!("parameter `{name}` shadows a species")));
        }
    }
    Ok(NetworkTemplate { species, params, reactions, conditions })
}

fn side(cur: &mut Cursor<'_>, stop: &Tok) -> Result<Vec<(u32, String)>, ModelError> {
    let mut terms = Vec::new();
    if let Some(Tok::Num(q)) = cur.peek() {
        if q.is_zero() && !matches!(cur.toks.get(cur.pos + 1).map(|t| &t.tok), Some(Tok::Ident(_))) {
            cur.pos += 1;
            if cur.peek() != Some(stop) {
                return Err(cur.error("expected `->` or `@` after `0`"));
            }
            return Ok(terms);
        }
    }
    loop {
        let col = cur.col();
        if cur.peek() == Some(&Tok::Minus) {
            return Err(ModelError::NegativeStoichiometry { line: cur.line, col });
        }
        let coeff = match cur.peek() {
            Some(Tok::Num(q)) => {
                let q = q.clone();
                cur.pos += 1;
                if !q.is_integer() {
                    return Err(syntax(cur.line, col, "stoichiometric coefficient must be an integer"));
                }
                q.to_integer().to_u32().ok_or_else(|| syntax(cur.line, col, "stoichiometric coefficient out of range"))?
            }
            _ => 1,
        };
        match cur.next() {
            Some(Tok::Ident(name)) => terms.push((coeff, name)),
            _ => {
                cur.pos -= 1;
                return Err(cur.error("expected a species name"));
            }
        }
        if !cur.eat(&Tok::Plus) {
            break;
        }
    }
    if cur.peek() != Some(stop) {
        return Err(cur.error(if *stop == Tok::Arrow { "expected `->`" } else { "expected `@`" }));
    }
    Ok(terms)
}

fn reaction(cur: &mut Cursor<'_>) -> Result<ReactionSyntax, ModelError> {
    let line = cur.line;
    let lhs = side(cur, &Tok::Arrow)?;
    cur.expect(&Tok::Arrow, "`->`")?;
    let rhs = side(cur, &Tok::At)?;
    cur.expect(&Tok::At, "`@`")?;
    let prop_col = cur.col();
    if cur.at_end() {
        return Err(cur.error("missing propensity"));
    }
    let e = cur.expr()?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    let prop = match e {
        Expr::Call(name, mut args, col) if name == "mass_action" => {
            if args.len() != 1 {
                return Err(syntax(line, col, "mass_action takes one argument"));
            }
            PropSyntax::MassAction(args.pop().unwrap())
        }
        e => PropSyntax::Expr(e),
    };
    Ok(ReactionSyntax { line, lhs, rhs, prop, prop_col })
}

fn condition(cur: &mut Cursor<'_>) -> Result<CondSyntax, ModelError> {
    if let (Some(Tok::Ident(w)), Some(Tok::LParen)) = (cur.peek().cloned(), cur.toks.get(cur.pos + 1).map(|t| t.tok.clone())) {
        if w == "even" || w == "odd" {
            cur.pos += 2;
            let col = cur.col();
            let Some(Tok::Ident(v)) = cur.next() else {
                cur.pos -= 1;
                return Err(cur.error("expected a variable"));
            };
            cur.expect(&Tok::RParen, "`)`")?;
            return Ok(CondSyntax::Parity(w == "odd", v, col));
        }
    }
    let lhs = cur.expr()?;
    let op = match cur.next() {
        Some(Tok::Cmp(op)) => op,
        Some(Tok::Assign) => CmpOp::Eq,
        _ => {
            cur.pos -= 1;
            return Err(cur.error("expected a comparison"));
        }
    };
    let rhs = cur.expr()?;
    Ok(CondSyntax::Compare(lhs, op, rhs))
}

struct Scope<'a> {
    species: &'a [String],
    params: &'a [(String, Rational)],
    line: usize,
}

impl Scope<'_> {
    fn n(&self) -> usize {
        self.species.len()
    }

    /// Species names first, then `x1..xn`, then parameters.
    fn variable(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.species.iter().position(|s| s == name) {
            return Some(i);
        }
        let k = name.strip_prefix('x')?.parse::<usize>().ok()?;
        (1..=self.n()).contains(&k).then(|| k - 1)
    }

    fn eval(&self, e: &Expr) -> Result<RatFn, ModelError> {
        let n = self.n();
        Ok(match e {
            Expr::Num(q) => RatFn::constant(n, q.clone()),
            Expr::Ident(name, col) => {
                if let Some(i) = self.variable(name) {
                    RatFn::from_poly(Poly::var(n, i))
                } else if let Some((_, v)) = self.params.iter().find(|(p, _)| p == name) {
                    RatFn::constant(n, v.clone())
                } else {
                    return Err(ModelError::UnknownIdentifier { line: self.line, col: *col, name: name.clone() });
                }
            }
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b).ok_or_else(|| syntax(self.line, 1, "division by zero"))?,
                }
            }
            Expr::Pow(base, exp, col) => {
                let k = self
                    .eval(exp)?
                    .as_constant()
                    .filter(|q| q.is_integer())
                    .and_then(|q| q.to_integer().to_i64())
                    .filter(|k| k.abs() <= 64)
                    .ok_or_else(|| syntax(self.line, *col, "exponent must be a small integer constant"))?;
                self.eval(base)?.powi(k).ok_or_else(|| syntax(self.line, *col, "zero raised to a negative power"))?
            }
            Expr::Call(name, _, col) => {
                return Err(syntax(self.line, *col, format!("function `{name}` is not allowed here")));
            }
        })
    }

    fn constant(&self, e: &Expr, col: usize) -> Result<Rational, ModelError> {
        self.eval(e)?.as_constant().ok_or_else(|| syntax(self.line, col, "expected a constant"))
    }
}

impl NetworkTemplate {
    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn param_names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.0.as_str()).collect()
    }

    /// Builds the network, replacing the listed parameter values.
    pub fn instantiate(&self, overrides: &[(String, Rational)]) -> Result<ReactionNetwork, ModelError> {
        for (name, _) in overrides {
            if !self.params.iter().any(|p| &p.0 == name) {
                return Err(ModelError::Invalid(format!("unknown parameter `{name}`")));
            }
        }
        let mut values: Vec<(String, Rational)> = Vec::new();
        for (name, e, line) in &self.params {
            let v = match overrides.iter().find(|o| &o.0 == name) {
                Some(o) => o.1.clone(),
                None => Scope { species: &[], params: &values, line: *line }.constant(e, 1)?,
            };
            values.push((name.clone(), v));
        }
        let n = self.species.len();
        let index = |name: &str| self.species.iter().position(|s| s == name).expect("species collected");
        let mut reactions = Vec::new();
        for (j, r) in self.reactions.iter().enumerate() {
            let scope = Scope { species: &self.species, params: &values, line: r.line };
            let mut v_minus = vec![0u32; n];
            let mut v_plus = vec![0u32; n];
            for (c, s) in &r.lhs {
                v_minus[index(s)] += c;
            }
            for (c, s) in &r.rhs {
                v_plus[index(s)] += c;
            }
            if v_minus == v_plus {
                return Err(ModelError::ZeroNetChange { reaction: j, line: Some(r.line) });
            }
            let propensity = match &r.prop {
                PropSyntax::MassAction(e) => {
                    let k = scope.constant(e, r.prop_col)?;
                    if !k.is_positive() {
                        return Err(ModelError::NonPositiveRate { reaction: j, line: Some(r.line) });
                    }
                    Propensity::MassAction(k)
                }
                PropSyntax::Expr(e) => Propensity::Rational(scope.eval(e)?),
            };
            reactions.push(Reaction { v_minus, v_plus, propensity });
        }
        let constraint = build_constraint(&self.conditions, &self.species, &values)?;
        ReactionNetwork::new(self.species.clone(), reactions, Some(constraint))
    }
}

fn build_constraint(conditions: &[(usize, CondSyntax)], species: &[String], params: &[(String, Rational)]) -> Result<StateConstraint, ModelError> {
    let n = species.len();
    let mut out = StateConstraint::default();
    for (line, c) in conditions {
        let scope = Scope { species, params, line: *line };
        match c {
            CondSyntax::Parity(odd, v, col) => {
                let i = scope.variable(v).ok_or_else(|| ModelError::UnknownIdentifier { line: *line, col: *col, name: v.clone() })?;
                out.parity.push((i, u32::from(*odd)));
            }
            CondSyntax::Compare(a, op, b) => {
                let diff = scope.eval(a)?.sub(&scope.eval(b)?);
                if !diff.is_polynomial() || diff.numerator().degree() > 1 {
                    return Err(syntax(*line, 1, "constraints must be linear"));
                }
                let p = diff.numerator();
                let coeffs = (0..n).map(|i| p.coeff(&MultiIndex::unit(n, i))).collect();
                out.linear.push(LinearCondition { coeffs, constant: p.constant_term(), op: *op });
            }
        }
    }
    Ok(out)
}

/// Parses a constraint list such as `x1 + 2*x2 <= 10, even(x1)` against the
/// given species names.
pub(crate) fn parse_constraint(text: &str, species: &[String]) -> Result<StateConstraint, ModelError> {
    let toks = lex(text, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1);
    let mut conditions = Vec::new();
    while !cur.at_end() {
        conditions.push((1, condition(&mut cur)?));
        if !cur.at_end() {
            cur.expect(&Tok::Comma, "`,`")?;
        }
    }
    build_constraint(&conditions, species, &[])
}

/// Parses a rational expression in the species names (or `x1..xn`), as
/// used for weights and averaged functions.
pub fn parse_expression(text: &str, species: &[String]) -> Result<RatFn, ModelError> {
    let toks = lex(text, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1);
    let e = cur.expr()?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Scope { species, params: &[], line: 1 }.eval(&e)
}

/// [`parse_expression`] restricted to polynomials.
pub fn parse_polynomial(text: &str, species: &[String]) -> Result<Poly, ModelError> {
    let f = parse_expression(text, species)?;
    if !f.is_polynomial() {
        return Err(syntax(1, 1, "expected a polynomial"));
    }
    Ok(f.numerator().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn standalone_expressions() {
        let sp = vec!["A".to_string(), "B".to_string()];
        let w = parse_polynomial("(A + 2*x2)^2", &sp).unwrap();
        assert_eq!(w.eval_state(&[1, 1]), q(9, 1));
        assert!(parse_polynomial("1/(1+A)", &sp).is_err());
        assert!(parse_expression("A +", &sp).is_err());
        assert!(matches!(parse_expression("C", &sp), Err(ModelError::UnknownIdentifier { .. })));
    }

    #[test]
    fn decimal_literals_are_exact() {
        let toks = lex("5.0901e8 0.25 1e-3", 1).unwrap();
        assert_eq!(toks[0].tok, Tok::Num(q(509_010_000, 1)));
        assert_eq!(toks[1].tok, Tok::Num(q(1, 4)));
        assert_eq!(toks[2].tok, Tok::Num(q(1, 1000)));
    }

    #[test]
    fn species_auto_indexed() {
        let net = parse_network("A + B -> C @ mass_action(1)\nC -> 0 @ 2*x3").unwrap();
        assert_eq!(net.species(), &["A", "B", "C"]);
        assert_eq!(net.reactions()[0].v_minus, vec![1, 1, 0]);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_network("0 -> X @ mass_action(1)\nX -> @ 1") {
            Err(ModelError::Syntax { line: 2, col: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_network("# nothing\n"), Err(ModelError::EmptyNetwork)));
        assert!(matches!(parse_network("X -> X @ 1"), Err(ModelError::ZeroNetChange { line: Some(1), .. })));
        assert!(matches!(parse_network("0 -> X @ mass_action(0)"), Err(ModelError::NonPositiveRate { .. })));
        assert!(matches!(parse_network("-1 X -> 0 @ 1"), Err(ModelError::NegativeStoichiometry { line: 1, col: 1 })));
        assert!(matches!(parse_network("0 -> X @ y"), Err(ModelError::UnknownIdentifier { .. })));
        assert!(matches!(parse_network("0 -> X @ x2"), Err(ModelError::UnknownIdentifier { .. })));
    }

    #[test]
    fn params_and_overrides() {
        let t = parse_template("param k = 1/3\nparam k2 = 2*k\n0 -> X @ mass_action(k2)").unwrap();
        let net = t.instantiate(&[]).unwrap();
        assert_eq!(net.reactions()[0].propensity, Propensity::MassAction(q(2, 3)));
        let net = t.instantiate(&[("k".into(), q(1, 1))]).unwrap();
        assert_eq!(net.reactions()[0].propensity, Propensity::MassAction(q(2, 1)));
        assert!(t.instantiate(&[("nope".into(), q(1, 1))]).is_err());
    }

    #[test]
    fn constraints() {
        let net = parse_network("species: A, B\nconstraint: A + 2*B <= 10, even(A)\n0 -> 2 A @ 1\n2 A -> 0 @ A*(A-1)").unwrap();
        let c = net.constraint().unwrap();
        assert!(c.contains(&[4, 3]));
        assert!(!c.contains(&[4, 4]));
        assert!(!c.contains(&[3, 0]));
        let again = parse_constraint(&c.to_string_with(net.species()), net.species()).unwrap();
        assert_eq!(&again, c);
    }

    #[test]
    fn negative_exponent() {
        let net = parse_network("0 -> X @ (1 + X)^-2").unwrap();
        assert_eq!(net.propensity_eval(0, &[1]).unwrap(), q(1, 4));
        assert_eq!(net.d_o(), 2);
    }
}
