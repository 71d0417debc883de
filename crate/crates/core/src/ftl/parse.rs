//! Concrete syntax:
//!
//! ```text
//! formula    ::= quantifier* tl
//! quantifier ::= ("forall" | "exists" | "∀" | "∃") binding ("," binding)* "."
//! binding    ::= var (":" | "∈") type
//! tl         ::= or ("->" tl)?
//! or         ::= and ("|" and)*
//! and        ::= until ("&" until)*
//! until      ::= unary ("U" until)?
//! unary      ::= ("!" | "X" | "F" | "G" | "Y" | "O" | "H") unary | primary
//! primary    ::= "true" | pred "(" (var ("," var)*)? ")" | "(" tl ")"
//! ```
//!
//! Unicode connectives (`¬ ∧ ∨ ⇒ → ○ ◇ □ ⊤`) are accepted as well, and a
//! predicate written `p^G` denotes the goal predicate `p_goal`.

use std::collections::BTreeMap;

use super::ast::{BinaryOp, Formula, QuantKind, Quantifier, Tl, UnaryOp};
use super::FtlError;
use crate::pddl::Domain;
use crate::preprocess::GOAL_SUFFIX;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quant(QuantKind),
    True,
    Un(UnaryOp),
    Bin(BinaryOp),
    Colon,
    Dot,
    Comma,
    LParen,
    RParen,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FtlError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| FtlError::Syntax { pos, message };
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        let single = |t: Tok| Some(t);
        let tok = match c {
            c if c.is_whitespace() => None,
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            ':' | '∈' => single(Tok::Colon),
            '.' => single(Tok::Dot),
            ',' => single(Tok::Comma),
            '!' | '¬' | '~' => single(Tok::Un(UnaryOp::Not)),
            '○' => single(Tok::Un(UnaryOp::Next)),
            '◇' => single(Tok::Un(UnaryOp::Eventually)),
            '□' => single(Tok::Un(UnaryOp::Always)),
            '&' | '∧' => single(Tok::Bin(BinaryOp::And)),
            '|' | '∨' => single(Tok::Bin(BinaryOp::Or)),
            '⇒' | '→' => single(Tok::Bin(BinaryOp::Implies)),
            '⊤' => single(Tok::True),
            '∀' => single(Tok::Quant(QuantKind::Forall)),
            '∃' => single(Tok::Quant(QuantKind::Exists)),
            '-' if next == Some('>') => {
                i += 1;
                single(Tok::Bin(BinaryOp::Implies))
            }
            c if c.is_ascii_uppercase() && !next.is_some_and(is_ident_char) => match c {
                'X' => single(Tok::Un(UnaryOp::Next)),
                'F' => single(Tok::Un(UnaryOp::Eventually)),
                'G' => single(Tok::Un(UnaryOp::Always)),
                'Y' => single(Tok::Un(UnaryOp::Yesterday)),
                'O' => single(Tok::Un(UnaryOp::Once)),
                'H' => single(Tok::Un(UnaryOp::Historically)),
                'U' => single(Tok::Bin(BinaryOp::Until)),
                _ => return Err(err(pos, format!("unknown operator `{c}`"))),
            },
            c if is_ident_char(c) => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.get(i) {
                    let arrow = c == '-' && chars.get(i + 1).map(|&(_, c)| c) == Some('>');
                    if !is_ident_char(c) || arrow {
                        break;
                    }
                    word.push(c.to_ascii_lowercase());
                    i += 1;
                }
                if chars.get(i).map(|&(_, c)| c) == Some('^')
                    && matches!(chars.get(i + 1).map(|&(_, c)| c), Some('G' | 'g'))
                {
                    word.push_str(GOAL_SUFFIX);
                    i += 2;
                }
                i -= 1;
                Some(match word.as_str() {
                    "forall" => Tok::Quant(QuantKind::Forall),
                    "exists" => Tok::Quant(QuantKind::Exists),
                    "true" => Tok::True,
                    _ => Tok::Ident(word),
                })
            }
            _ => return Err(err(pos, format!("unexpected character `{c}`"))),
        };
        if let Some(t) = tok {
            out.push((t, pos));
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(_, p)| p)
    }

    fn error(&self, message: impl Into<String>) -> FtlError {
        FtlError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FtlError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, FtlError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, FtlError> {
        let mut quantifiers = Vec::new();
        while let Some(&Tok::Quant(kind)) = self.peek() {
            self.at += 1;
            loop {
                let var = self.ident("variable")?;
                self.expect(Tok::Colon, "`:` after variable")?;
                let ty = self.ident("type")?;
                quantifiers.push(Quantifier { kind, var, ty });
                if self.peek() == Some(&Tok::Comma) {
                    self.at += 1;
                } else {
                    break;
                }
            }
            self.expect(Tok::Dot, "`.` after quantifier")?;
        }
        let core = self.tl()?;
        if self.at < self.toks.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(Formula { quantifiers, core })
    }

    fn tl(&mut self) -> Result<Tl, FtlError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Bin(BinaryOp::Implies)) {
            self.at += 1;
            let rhs = self.tl()?;
            return Ok(Tl::bin(BinaryOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn left_chain(
        &mut self,
        op: BinaryOp,
        next: fn(&mut Self) -> Result<Tl, FtlError>,
    ) -> Result<Tl, FtlError> {
        let mut lhs = next(self)?;
        while self.peek() == Some(&Tok::Bin(op)) {
            self.at += 1;
            let rhs = next(self)?;
            lhs = Tl::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Tl, FtlError> {
        self.left_chain(BinaryOp::Or, Self::and)
    }

    fn and(&mut self) -> Result<Tl, FtlError> {
        self.left_chain(BinaryOp::And, Self::until)
    }

    fn until(&mut self) -> Result<Tl, FtlError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::Bin(BinaryOp::Until)) {
            self.at += 1;
            let rhs = self.until()?;
            return Ok(Tl::bin(BinaryOp::Until, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Tl, FtlError> {
        if let Some(&Tok::Un(op)) = self.peek() {
            self.at += 1;
            return Ok(Tl::un(op, self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Tl, FtlError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.at += 1;
                Ok(Tl::True)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.tl()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Quant(_)) => Err(FtlError::NonPrenex),
            Some(Tok::Ident(pred)) => {
                self.at += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.at += 1;
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.ident("variable")?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.at += 1;
                            args.push(self.ident("variable")?);
                        }
                    }
                    self.expect(Tok::RParen, "`)` after arguments")?;
                }
                Ok(Tl::Atom(pred, args))
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}

/// Parses without looking at a domain.
pub fn parse_syntax(text: &str) -> Result<Formula, FtlError> {
    let toks = lex(text)?;
    Parser {
        toks,
        at: 0,
        end: text.len(),
    }
    .formula()
}

/// Parses and validates against `d`: known predicates and types, arities,
/// bound and distinct variables, and argument types compatible with slots.
pub fn parse_formula(text: &str, d: &Domain) -> Result<Formula, FtlError> {
    let f = parse_syntax(text)?;
    validate(&f, d, false)?;
    Ok(f)
}

pub fn validate(f: &Formula, d: &Domain, strict_types: bool) -> Result<(), FtlError> {
    let mut scope = BTreeMap::new();
    for q in &f.quantifiers {
        let ty = d
            .types
            .get(&q.ty)
            .ok_or_else(|| FtlError::UnknownType(q.ty.clone()))?;
        if scope.insert(q.var.as_str(), ty).is_some() {
            return Err(FtlError::DuplicateVariable(q.var.clone()));
        }
    }
    fn walk(
        t: &Tl,
        d: &Domain,
        scope: &BTreeMap<&str, crate::pddl::TypeId>,
        strict: bool,
    ) -> Result<(), FtlError> {
        match t {
            Tl::True => Ok(()),
            Tl::Atom(p, args) => {
                let pred = d
                    .predicate(p)
                    .ok_or_else(|| FtlError::UnknownPredicate(p.clone()))?;
                if pred.arity() != args.len() {
                    return Err(FtlError::Arity {
                        predicate: p.clone(),
                        expected: pred.arity(),
                        found: args.len(),
                    });
                }
                for (a, &slot) in args.iter().zip(&pred.arg_types) {
                    let ty = *scope
                        .get(a.as_str())
                        .ok_or_else(|| FtlError::UnboundVariable(a.clone()))?;
                    let ok = if strict {
                        ty == slot
                    } else {
                        d.types.is_subtype(ty, slot)
                    };
                    if !ok {
                        return Err(FtlError::TypeMismatch {
                            variable: a.clone(),
                            predicate: p.clone(),
                        });
                    }
                }
                Ok(())
            }
            Tl::Unary(_, a) => walk(a, d, scope, strict),
            Tl::Binary(_, a, b) => {
                walk(a, d, scope, strict)?;
                walk(b, d, scope, strict)
            }
        }
    }
    walk(&f.core, d, &scope, strict_types)
}
