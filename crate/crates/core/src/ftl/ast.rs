use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::preprocess::GOAL_SUFFIX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub var: String,
    /// Type name.
    pub ty: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryOp {
    Not,
    Next,
    Eventually,
    Always,
    Yesterday,
    Once,
    Historically,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Until,
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 7] = [
        UnaryOp::Not,
        UnaryOp::Next,
        UnaryOp::Eventually,
        UnaryOp::Always,
        UnaryOp::Yesterday,
        UnaryOp::Once,
        UnaryOp::Historically,
    ];

    pub fn ascii(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Next => "X",
            UnaryOp::Eventually => "F",
            UnaryOp::Always => "G",
            UnaryOp::Yesterday => "Y",
            UnaryOp::Once => "O",
            UnaryOp::Historically => "H",
        }
    }

    fn unicode(self) -> &'static str {
        match self {
            UnaryOp::Not => "¬",
            UnaryOp::Next => "○",
            UnaryOp::Eventually => "◇",
            UnaryOp::Always => "□",
            UnaryOp::Yesterday => "Y",
            UnaryOp::Once => "O",
            UnaryOp::Historically => "H",
        }
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 4] = [
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Implies,
        BinaryOp::Until,
    ];

    pub fn ascii(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Implies => "->",
            BinaryOp::Until => "U",
        }
    }

    fn unicode(self) -> &'static str {
        match self {
            BinaryOp::And => "∧",
            BinaryOp::Or => "∨",
            BinaryOp::Implies => "⇒",
            BinaryOp::Until => "U",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Implies => 1,
            BinaryOp::Or => 2,
            BinaryOp::And => 3,
            BinaryOp::Until => 4,
        }
    }

    pub(crate) fn right_assoc(self) -> bool {
        matches!(self, BinaryOp::Implies | BinaryOp::Until)
    }
}

pub(crate) const UNARY_PREC: u8 = 5;
const ATOM_PREC: u8 = 6;

/// Quantifier-free temporal core.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tl {
    True,
    Atom(String, Vec<String>),
    Unary(UnaryOp, Box<Tl>),
    Binary(BinaryOp, Box<Tl>, Box<Tl>),
}

impl Tl {
    pub fn atom(pred: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Tl {
        Tl::Atom(pred.into(), args.into_iter().map(Into::into).collect())
    }

    pub fn un(op: UnaryOp, a: Tl) -> Tl {
        Tl::Unary(op, Box::new(a))
    }

    pub fn bin(op: BinaryOp, a: Tl, b: Tl) -> Tl {
        Tl::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn not(a: Tl) -> Tl {
        Tl::un(UnaryOp::Not, a)
    }

    fn precedence(&self) -> u8 {
        match self {
            Tl::True | Tl::Atom(..) => ATOM_PREC,
            Tl::Unary(..) => UNARY_PREC,
            Tl::Binary(op, ..) => op.precedence(),
        }
    }

    /// Number of connectors.
    pub fn size(&self) -> usize {
        match self {
            Tl::True | Tl::Atom(..) => 0,
            Tl::Unary(_, a) => 1 + a.size(),
            Tl::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Tl::True => {}
            Tl::Atom(_, args) => out.extend(args.iter().cloned()),
            Tl::Unary(_, a) => a.variables(out),
            Tl::Binary(_, a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: &impl Fn(&str) -> String) -> Tl {
        match self {
            Tl::True => Tl::True,
            Tl::Atom(p, args) => Tl::Atom(p.clone(), args.iter().map(|a| f(a)).collect()),
            Tl::Unary(op, a) => Tl::un(*op, a.rename(f)),
            Tl::Binary(op, a, b) => Tl::bin(*op, a.rename(f), b.rename(f)),
        }
    }

    fn write(&self, out: &mut String, unicode: bool) {
        match self {
            Tl::True => out.push_str(if unicode { "⊤" } else { "true" }),
            Tl::Atom(p, args) => {
                match p.strip_suffix(GOAL_SUFFIX) {
                    Some(base) if unicode && !base.is_empty() => {
                        out.push_str(base);
                        out.push_str("^G");
                    }
                    _ => out.push_str(p),
                }
                out.push('(');
                out.push_str(&args.join(","));
                out.push(')');
            }
            Tl::Unary(op, a) => {
                out.push_str(if unicode { op.unicode() } else { op.ascii() });
                if !unicode || op.unicode().is_ascii() {
                    out.push(' ');
                }
                a.write_child(out, unicode, UNARY_PREC);
            }
            Tl::Binary(op, a, b) => {
                let p = op.precedence();
                let (lp, rp) = if op.right_assoc() {
                    (p + 1, p)
                } else {
                    (p, p + 1)
                };
                a.write_child(out, unicode, lp);
                out.push(' ');
                out.push_str(if unicode { op.unicode() } else { op.ascii() });
                out.push(' ');
                b.write_child(out, unicode, rp);
            }
        }
    }

    fn write_child(&self, out: &mut String, unicode: bool, min: u8) {
        if self.precedence() < min {
            out.push('(');
            self.write(out, unicode);
            out.push(')');
        } else {
            self.write(out, unicode);
        }
    }
}

impl fmt::Display for Tl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, false);
        f.write_str(&s)
    }
}

/// A prenex formula: quantifier block over a temporal core.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    pub quantifiers: Vec<Quantifier>,
    pub core: Tl,
}

impl Formula {
    pub fn new(quantifiers: Vec<Quantifier>, core: Tl) -> Self {
        Formula { quantifiers, core }
    }

    pub fn universals(&self) -> usize {
        self.quantifiers
            .iter()
            .take_while(|q| q.kind == QuantKind::Forall)
            .count()
    }

    /// Human-oriented rendering: unicode connectives and `p^G` for goal predicates.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for q in &self.quantifiers {
            out.push_str(match q.kind {
                QuantKind::Forall => "∀",
                QuantKind::Exists => "∃",
            });
            out.push_str(&q.var);
            out.push('∈');
            out.push_str(&q.ty);
            out.push_str(". ");
        }
        self.core.write(&mut out, true);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.quantifiers {
            let kw = match q.kind {
                QuantKind::Forall => "forall",
                QuantKind::Exists => "exists",
            };
            write!(f, "{kw} {}:{}. ", q.var, q.ty)?;
        }
        write!(f, "{}", self.core)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse::parse_syntax(&text).map_err(serde::de::Error::custom)
    }
}
