//! Minimal s-expression reader for PDDL sources.
//!
//! Symbols are lower-cased as they are read, `;` starts a line comment.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The head symbol of a list, if it has one.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|l| l.first())
            .and_then(SExpr::as_atom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

/// Reads every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, SyntaxError> {
    let mut reader = Reader {
        chars: text.chars().collect(),
        idx: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.expr()?);
    }
}

struct Reader {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<SExpr, SyntaxError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(SyntaxError {
                pos: start,
                message: "unexpected end of input".into(),
            }),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(SyntaxError {
                                pos: start,
                                message: "unclosed parenthesis".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some(')') => Err(SyntaxError {
                pos: start,
                message: "unexpected ')'".into(),
            }),
            Some(_) => {
                let mut sym = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(SExpr::Atom(sym, start))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_lowercases() {
        let exprs = read_all("(Define (Domain X) ; comment\n (:types a))").unwrap();
        assert_eq!(exprs.len(), 1);
        let top = exprs[0].as_list().unwrap();
        assert_eq!(top[0].as_atom(), Some("define"));
        assert_eq!(top[1].head(), Some("domain"));
        assert_eq!(top[2].pos(), Pos { line: 2, col: 2 });
    }

    #[test]
    fn reports_unclosed_paren_with_position() {
        let err = read_all("\n  (a (b)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_close() {
        let err = read_all("a )").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 3 });
    }
}
