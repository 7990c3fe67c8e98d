//! Formula syntax: terms, atoms, formulas and their parser.

use crate::error::{Error, Result};
use crate::numbers::Numeration;

/// Integer linear combination of variables plus a constant. Variables are
/// kept sorted and coefficients nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinTerm<V = String> {
    pub coeffs: Vec<(V, i64)>,
    pub constant: i64,
}

impl<V: Ord + Clone> LinTerm<V> {
    pub fn constant(c: i64) -> Self {
        LinTerm {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: V) -> Self {
        LinTerm {
            coeffs: vec![(v, 1)],
            constant: 0,
        }
    }

    /// `self + sign * other`.
    pub fn plus(&self, other: &Self, sign: i64) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        for (v, a) in &other.coeffs {
            let a = a.checked_mul(sign).ok_or(Error::Overflow)?;
            match coeffs.binary_search_by(|(w, _)| w.cmp(v)) {
                Ok(i) => coeffs[i].1 = coeffs[i].1.checked_add(a).ok_or(Error::Overflow)?,
                Err(i) => coeffs.insert(i, (v.clone(), a)),
            }
        }
        coeffs.retain(|&(_, a)| a != 0);
        let constant = other
            .constant
            .checked_mul(sign)
            .and_then(|c| c.checked_add(self.constant))
            .ok_or(Error::Overflow)?;
        Ok(LinTerm { coeffs, constant })
    }

    pub fn scaled(&self, k: i64) -> Result<Self> {
        LinTerm::constant(0).plus(self, k)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The variable if the term is exactly `v`.
    pub fn as_var(&self) -> Option<&V> {
        match self.coeffs.as_slice() {
            [(v, 1)] if self.constant == 0 => Some(v),
            _ => None,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &V> {
        self.coeffs.iter().map(|(v, _)| v)
    }

    pub fn map_vars<W: Ord + Clone>(&self, mut f: impl FnMut(&V) -> W) -> LinTerm<W> {
        let mut t = LinTerm::constant(self.constant);
        for (v, a) in &self.coeffs {
            let w = LinTerm {
                coeffs: vec![(f(v), *a)],
                constant: 0,
            };
            t = t.plus(&w, 1).expect("coefficients already fit");
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn holds(self, x: i64, y: i64) -> bool {
        match self {
            RelOp::Eq => x == y,
            RelOp::Ne => x != y,
            RelOp::Lt => x < y,
            RelOp::Le => x <= y,
            RelOp::Gt => x > y,
            RelOp::Ge => x >= y,
        }
    }
}

/// An argument of an automaton call, with the annotation written inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arg<V = String> {
    pub term: LinTerm<V>,
    pub system: Option<Numeration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom<V = String> {
    /// `system` is the innermost annotation in scope, if any.
    Compare {
        lhs: LinTerm<V>,
        op: RelOp,
        rhs: LinTerm<V>,
        system: Option<Numeration>,
    },
    Call {
        name: String,
        args: Vec<Arg<V>>,
    },
    /// `seq[index] = @value`, or `!=` when `equal` is false.
    SeqIndex {
        seq: String,
        index: LinTerm<V>,
        value: u32,
        equal: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula<V = String> {
    Atom(Atom<V>),
    Not(Box<Formula<V>>),
    And(Box<Formula<V>>, Box<Formula<V>>),
    Or(Box<Formula<V>>, Box<Formula<V>>),
    Implies(Box<Formula<V>>, Box<Formula<V>>),
    Iff(Box<Formula<V>>, Box<Formula<V>>),
    Exists(Vec<V>, Box<Formula<V>>),
    Forall(Vec<V>, Box<Formula<V>>),
}

impl Formula<String> {
    pub fn parse(source: &str) -> Result<Formula> {
        parse_formula(source).map_err(|e| e.into_error(source, 1, 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    NegIdent(String),
    Int(i64),
    Annot(Numeration),
    Dollar,
    LParen,
    RParen,
    Comma,
    LBracket,
    RBracket,
    At,
    Plus,
    Minus,
    Star,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
    Rel(RelOp),
}

/// A parse failure at a byte offset of the formula text.
#[derive(Debug)]
pub(crate) struct SyntaxError {
    pub offset: usize,
    pub msg: String,
}

impl SyntaxError {
    /// Converts to an [`Error::Parse`] with the position translated into the
    /// enclosing text, where the formula starts at `line:col`.
    pub(crate) fn into_error(self, source: &str, line: usize, col: usize) -> Error {
        let before = &source[..self.offset.min(source.len())];
        let newlines = before.matches('\n').count();
        let (l, c) = if newlines == 0 {
            (line, col + before.chars().count())
        } else {
            let tail = before.rsplit('\n').next().unwrap_or("");
            (line + newlines, tail.chars().count() + 1)
        };
        Error::parse(l, c, self.msg)
    }
}

type PResult<T> = std::result::Result<T, SyntaxError>;

fn err<T>(offset: usize, msg: impl Into<String>) -> PResult<T> {
    Err(SyntaxError {
        offset,
        msg: msg.into(),
    })
}

pub(crate) fn parse_system_tag(tag: &str) -> Option<Numeration> {
    let rest = tag.strip_prefix("msd_")?;
    let (neg, digits) = match rest.strip_prefix("neg_") {
        Some(d) => (true, d),
        None => (false, rest),
    };
    let k: u32 = digits.parse().ok()?;
    if !(2..=36).contains(&k) {
        return None;
    }
    Some(if neg {
        Numeration::neg(k)
    } else {
        Numeration::msd(k)
    })
}

fn lex(src: &str) -> PResult<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let word_end = |mut j: usize| {
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &str| src[i..].starts_with(s);
        let tok = if c.is_ascii_alphabetic() {
            i = word_end(i);
            Tok::Ident(src[start..i].to_string())
        } else if c == b'_' {
            i = word_end(i + 1);
            let word = &src[start + 1..i];
            if word.is_empty() {
                return err(start, "`_` must be followed by a variable or a number");
            }
            if word.bytes().all(|b| b.is_ascii_digit()) {
                // `_5` is the constant -5
                match word.parse::<i64>() {
                    Ok(n) => Tok::Int(-n),
                    Err(_) => return err(start, "integer literal too large"),
                }
            } else if bytes[start + 1].is_ascii_alphabetic() {
                Tok::NegIdent(word.to_string())
            } else {
                return err(start, "`_` must be followed by a variable or a number");
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            match src[start..i].parse() {
                Ok(n) => Tok::Int(n),
                Err(_) => return err(start, "integer literal too large"),
            }
        } else if c == b'?' {
            i = word_end(i + 1);
            match parse_system_tag(&src[start + 1..i]) {
                Some(s) => Tok::Annot(s),
                None => return err(start, format!("unknown annotation `{}`", &src[start..i])),
            }
        } else if two("<=>") {
            i += 3;
            Tok::Iff
        } else if two("=>") {
            i += 2;
            Tok::Implies
        } else if two("<=") {
            i += 2;
            Tok::Rel(RelOp::Le)
        } else if two(">=") {
            i += 2;
            Tok::Rel(RelOp::Ge)
        } else if two("!=") {
            i += 2;
            Tok::Rel(RelOp::Ne)
        } else {
            i += 1;
            match c {
                b'$' => Tok::Dollar,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b'@' => Tok::At,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'~' => Tok::Tilde,
                b'&' => Tok::Amp,
                b'|' => Tok::Pipe,
                b'=' => Tok::Rel(RelOp::Eq),
                b'<' => Tok::Rel(RelOp::Lt),
                b'>' => Tok::Rel(RelOp::Gt),
                _ => return err(start, format!("unexpected character `{}`", c as char)),
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

pub(crate) fn parse_formula(src: &str) -> PResult<Formula> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        end: src.len(),
    };
    if p.toks.is_empty() {
        return err(0, "empty formula");
    }
    let f = p.formula(None)?;
    if p.pos < p.toks.len() {
        return err(p.offset(), "unexpected token after formula");
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            err(self.offset(), format!("expected {what}"))
        }
    }

    fn formula(&mut self, ctx: Option<Numeration>) -> PResult<Formula> {
        let lhs = self.disjunction(ctx)?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula(ctx)?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat(&Tok::Iff) {
            let rhs = self.formula(ctx)?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self, ctx: Option<Numeration>) -> PResult<Formula> {
        let mut f = self.conjunction(ctx)?;
        while self.eat(&Tok::Pipe) {
            let g = self.conjunction(ctx)?;
            f = Formula::Or(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn conjunction(&mut self, ctx: Option<Numeration>) -> PResult<Formula> {
        let mut f = self.unary(ctx)?;
        while self.eat(&Tok::Amp) {
            let g = self.unary(ctx)?;
            f = Formula::And(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    /// Tokens that can continue a term; an identifier followed by one of
    /// these is an operand, not a quantified variable.
    fn continues_term(t: Option<&Tok>) -> bool {
        matches!(
            t,
            Some(Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star | Tok::LBracket)
        )
    }

    fn unary(&mut self, ctx: Option<Numeration>) -> PResult<Formula> {
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.unary(ctx)?)))
            }
            Some(Tok::Annot(s)) => {
                self.pos += 1;
                self.unary(Some(s))
            }
            Some(Tok::Ident(w))
                if (w.starts_with('A') || w.starts_with('E'))
                    && !Self::continues_term(self.peek_at(1)) =>
            {
                self.quantifier(&w, ctx)
            }
            Some(Tok::LParen) => {
                let save = self.pos;
                if let Ok(f) = self.comparison(ctx) {
                    return Ok(f);
                }
                self.pos = save + 1;
                let f = self.formula(ctx)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Dollar) => self.call(),
            Some(Tok::Ident(_)) if self.peek_at(1) == Some(&Tok::LBracket) => self.seq_index(),
            Some(_) => self.comparison(ctx),
            None => err(self.offset(), "unexpected end of formula"),
        }
    }

    fn quantifier(&mut self, word: &str, ctx: Option<Numeration>) -> PResult<Formula> {
        let at = self.offset();
        self.pos += 1;
        let mut vars = Vec::new();
        if word.len() > 1 {
            vars.push(word[1..].to_string());
        } else {
            match self.peek().cloned() {
                Some(Tok::Ident(v)) => {
                    self.pos += 1;
                    vars.push(v);
                }
                _ => return err(self.offset(), "expected a variable after quantifier"),
            }
        }
        while self.peek() == Some(&Tok::Comma) {
            match self.peek_at(1).cloned() {
                Some(Tok::Ident(v))
                    if !vars.contains(&v) && !Self::continues_term(self.peek_at(2)) =>
                {
                    self.pos += 2;
                    vars.push(v);
                }
                _ => {
                    // a comma separating the variables from the body
                    self.pos += 1;
                    break;
                }
            }
        }
        if vars.iter().any(|v| v.is_empty()) {
            return err(at, "empty variable name");
        }
        let body = Box::new(self.formula(ctx)?);
        Ok(if word.starts_with('A') {
            Formula::Forall(vars, body)
        } else {
            Formula::Exists(vars, body)
        })
    }

    fn call(&mut self) -> PResult<Formula> {
        self.pos += 1;
        let name = match self.peek().cloned() {
            Some(Tok::Ident(n)) => n,
            _ => return err(self.offset(), "expected an automaton name after `$`"),
        };
        self.pos += 1;
        self.expect(&Tok::LParen, "`(` after automaton name")?;
        let mut args = Vec::new();
        loop {
            let mut system = None;
            let term = self.annotated_term(&mut system)?;
            args.push(Arg { term, system });
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RParen, "`,` or `)` in argument list")?;
            break;
        }
        Ok(Formula::Atom(Atom::Call { name, args }))
    }

    fn seq_index(&mut self) -> PResult<Formula> {
        let seq = match self.peek().cloned() {
            Some(Tok::Ident(n)) => n,
            _ => unreachable!("checked by caller"),
        };
        self.pos += 2;
        let mut ann = None;
        let index = self.annotated_term(&mut ann)?;
        self.expect(&Tok::RBracket, "`]`")?;
        let equal = match self.peek() {
            Some(Tok::Rel(RelOp::Eq)) => true,
            Some(Tok::Rel(RelOp::Ne)) => false,
            _ => return err(self.offset(), "expected `=` or `!=` after sequence index"),
        };
        self.pos += 1;
        self.expect(&Tok::At, "`@`")?;
        let value = match self.peek() {
            Some(&Tok::Int(v)) if (0..=u32::MAX as i64).contains(&v) => v as u32,
            _ => return err(self.offset(), "expected an output value after `@`"),
        };
        self.pos += 1;
        Ok(Formula::Atom(Atom::SeqIndex {
            seq,
            index,
            value,
            equal,
        }))
    }

    fn comparison(&mut self, ctx: Option<Numeration>) -> PResult<Formula> {
        let mut system = None;
        let lhs = self.term(&mut system)?;
        let op = match self.peek() {
            Some(&Tok::Rel(op)) => op,
            _ => return err(self.offset(), "expected a comparison operator"),
        };
        self.pos += 1;
        let rhs = self.annotated_term(&mut system)?;
        Ok(Formula::Atom(Atom::Compare {
            lhs,
            op,
            rhs,
            system: system.or(ctx),
        }))
    }

    fn note_annotation(
        &self,
        slot: &mut Option<Numeration>,
        s: Numeration,
        at: usize,
    ) -> PResult<()> {
        match slot {
            Some(t) if *t != s => err(at, format!("conflicting annotations {t} and {s}")),
            _ => {
                *slot = Some(s);
                Ok(())
            }
        }
    }

    fn annotated_term(&mut self, ann: &mut Option<Numeration>) -> PResult<LinTerm> {
        if let Some(&Tok::Annot(s)) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            self.note_annotation(ann, s, at)?;
        }
        self.term(ann)
    }

    fn term(&mut self, ann: &mut Option<Numeration>) -> PResult<LinTerm> {
        let at = self.offset();
        let mut t = if self.eat(&Tok::Minus) {
            self.product(ann)?.scaled(-1)
        } else {
            Ok(self.product(ann)?)
        }
        .or_else(|_| err(at, "arithmetic overflow"))?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(t),
            };
            let at = self.offset();
            self.pos += 1;
            let u = self.product(ann)?;
            t = t
                .plus(&u, sign)
                .or_else(|_| err(at, "arithmetic overflow"))?;
        }
    }

    fn product(&mut self, ann: &mut Option<Numeration>) -> PResult<LinTerm> {
        let mut t = self.factor(ann)?;
        while self.peek() == Some(&Tok::Star) {
            let at = self.offset();
            self.pos += 1;
            let u = self.factor(ann)?;
            t = match (t.is_constant(), u.is_constant()) {
                (true, _) => u.scaled(t.constant),
                (_, true) => t.scaled(u.constant),
                _ => return err(at, "product of two variables is not linear"),
            }
            .or_else(|_| err(at, "arithmetic overflow"))?;
        }
        Ok(t)
    }

    fn factor(&mut self, ann: &mut Option<Numeration>) -> PResult<LinTerm> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(LinTerm::constant(n))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(LinTerm::var(v))
            }
            Some(Tok::NegIdent(v)) => {
                self.pos += 1;
                Ok(LinTerm {
                    coeffs: vec![(v, -1)],
                    constant: 0,
                })
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                self.factor(ann)?
                    .scaled(-1)
                    .or_else(|_| err(at, "arithmetic overflow"))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.annotated_term(ann)?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => err(at, "expected a term"),
        }
    }
}
