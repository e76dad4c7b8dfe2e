//! Textual word syntax.
//!
//! Letters are `x<i>`, `t<s>_<i>`, `r<s>` and `q<s>(p/d)` (or `q<s>(n)`),
//! each optionally followed by `^<int>`. Juxtaposition multiplies, `( ... )`
//! groups and `e` is the identity. `*` and `·` are accepted as explicit
//! multiplication. Formula terms may also use the variables `X<i>`, `Y<i>`,
//! with bare `x` and `y` standing for `X1` and `Y1`.

use crate::error::{GroupError, Result};
use crate::word::{Letter, Rational, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    X,
    Y,
}

/// Variable `X<index+1>` or `Y<index+1>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Letter(Letter),
    Var(Var),
    Product(Vec<Term>),
    Power(Box<Term>, i64),
}

impl Term {
    pub fn identity() -> Term {
        Term::Product(Vec::new())
    }

    /// Substitute variables and multiply out.
    pub fn eval(&self, xs: &[Word], ys: &[Word]) -> Result<Word> {
        Ok(match self {
            Term::Letter(l) => Word::letter(*l),
            Term::Var(v) => {
                let pool = match v.kind {
                    VarKind::X => xs,
                    VarKind::Y => ys,
                };
                pool.get(v.index)
                    .cloned()
                    .ok_or_else(|| GroupError::Usage(format!("unbound variable {:?}", v)))?
            }
            Term::Product(ts) => {
                let words = ts.iter().map(|t| t.eval(xs, ys)).collect::<Result<Vec<_>>>()?;
                Word::concat(words.iter())
            }
            Term::Power(t, n) => t.eval(xs, ys)?.pow(*n),
        })
    }

    /// Largest variable index + 1 of each kind.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            Term::Letter(_) => (0, 0),
            Term::Var(v) => match v.kind {
                VarKind::X => (v.index + 1, 0),
                VarKind::Y => (0, v.index + 1),
            },
            Term::Product(ts) => ts
                .iter()
                .map(Term::arity)
                .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
            Term::Power(t, _) => t.arity(),
        }
    }

    pub fn letters(&self, out: &mut Vec<Letter>) {
        match self {
            Term::Letter(l) => out.push(*l),
            Term::Var(_) => {}
            Term::Product(ts) => ts.iter().for_each(|t| t.letters(out)),
            Term::Power(t, _) => t.letters(out),
        }
    }
}

/// Character cursor shared by the word and formula parsers.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Cursor<'a> {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '*' || c == '·') {
            self.bump();
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub fn error(&self, msg: impl Into<String>) -> GroupError {
        GroupError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let start = self.pos;
        let d = self.digits().ok_or_else(|| self.error(format!("expected {}", what)))?;
        d.parse().map_err(|_| GroupError::Syntax {
            pos: start,
            msg: format!("{} out of range", what),
        })
    }

    fn signed(&mut self, what: &str) -> Result<i64> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let n: i64 = self.number(what)?;
        Ok(if neg { -n } else { n })
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.bump();
        }
        &self.src[start..self.pos]
    }
}

/// Parser for terms. Variables are allowed only when `vars` is set.
pub(crate) struct TermParser<'a, 'b> {
    pub cur: &'b mut Cursor<'a>,
    pub vars: bool,
}

impl TermParser<'_, '_> {
    /// A product of factors; stops before any character that cannot start a
    /// factor.
    pub fn product(&mut self) -> Result<Term> {
        let mut factors = Vec::new();
        loop {
            self.cur.skip_ws();
            match self.cur.peek() {
                Some(c) if c == '(' || c.is_ascii_alphabetic() => factors.push(self.factor()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Term::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Term> {
        let start = self.cur.pos();
        let base = if self.cur.eat('(') {
            let inner = self.product()?;
            self.cur.skip_ws();
            if !self.cur.eat(')') {
                return Err(self.cur.error("expected `)`"));
            }
            inner
        } else {
            self.atom(start)?
        };
        if self.cur.eat('^') {
            let n = self.cur.signed("exponent")?;
            return Ok(Term::Power(Box::new(base), n));
        }
        Ok(base)
    }

    fn atom(&mut self, start: usize) -> Result<Term> {
        let c = self
            .cur
            .bump()
            .ok_or_else(|| self.cur.error("unexpected end of input"))?;
        let digit_next = matches!(self.cur.peek(), Some(d) if d.is_ascii_digit());
        match c {
            'e' if !matches!(self.cur.peek(), Some(d) if d.is_ascii_alphanumeric()) => Ok(Term::identity()),
            'x' if digit_next => {
                let i: u32 = self.cur.number("generator index")?;
                if i == 0 {
                    return Err(GroupError::UnknownLetter("x0".into()));
                }
                Ok(Term::Letter(Letter::Base(i - 1)))
            }
            't' if digit_next => {
                let stage: u32 = self.cur.number("stage")?;
                if !self.cur.eat('_') {
                    return Err(self.cur.error("expected `_` in stable letter"));
                }
                let index: u32 = self.cur.number("stable letter index")?;
                if stage < 2 {
                    return Err(GroupError::UnknownLetter(format!("t{}_{}", stage, index)));
                }
                Ok(Term::Letter(Letter::Stable { stage, index }))
            }
            'r' if digit_next => {
                let stage: u32 = self.cur.number("stage")?;
                if stage < 2 {
                    return Err(GroupError::UnknownLetter(format!("r{}", stage)));
                }
                Ok(Term::Letter(Letter::Root(stage)))
            }
            'q' if digit_next => {
                let stage: u32 = self.cur.number("stage")?;
                if !self.cur.eat('(') {
                    return Err(self.cur.error("expected `(` after rational letter"));
                }
                self.cur.skip_ws();
                let p = self.cur.signed("numerator")?;
                self.cur.skip_ws();
                let d = if self.cur.eat('/') {
                    self.cur.skip_ws();
                    self.cur.number::<i64>("denominator")?
                } else {
                    1
                };
                self.cur.skip_ws();
                if !self.cur.eat(')') {
                    return Err(self.cur.error("expected `)` after rational value"));
                }
                if p == 0 || d == 0 {
                    return Err(GroupError::Syntax {
                        pos: start,
                        msg: "rational letters need a nonzero value".into(),
                    });
                }
                Ok(Term::Letter(Letter::Rational {
                    stage,
                    value: Rational::new(p, d),
                }))
            }
            'X' | 'Y' | 'x' | 'y' if self.vars => {
                let kind = if c.eq_ignore_ascii_case(&'x') {
                    VarKind::X
                } else {
                    VarKind::Y
                };
                let index = if c.is_ascii_uppercase() && digit_next {
                    let i: usize = self.cur.number("variable index")?;
                    if i == 0 {
                        return Err(self.cur.error("variable indices start at 1"));
                    }
                    i - 1
                } else {
                    0
                };
                Ok(Term::Var(Var { kind, index }))
            }
            _ => {
                self.cur.pos = start;
                let id = self.cur.ident();
                let id = if id.is_empty() { c.to_string() } else { id.to_string() };
                Err(GroupError::UnknownLetter(id))
            }
        }
    }
}

/// Parse a word in the letter grammar.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut cur = Cursor::new(text);
    let term = TermParser {
        cur: &mut cur,
        vars: false,
    }
    .product()?;
    if !cur.at_end() {
        return Err(cur.error(format!("unexpected `{}`", cur.peek().unwrap())));
    }
    term.eval(&[], &[])
}

/// Print a word in the letter grammar; `parse_word` inverts it.
pub fn format_word(w: &Word) -> String {
    w.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_letters() {
        let w = parse_word("x1 x2^-1").unwrap();
        assert_eq!(w, Word::base(0).mul(&Word::base(1).inverse()));
        let w = parse_word("t2_0^-1 x1 t2_0").unwrap();
        assert_eq!(w.to_string(), "t2_0^-1 x1 t2_0");
        assert_eq!(parse_word("e").unwrap(), Word::identity());
        assert_eq!(parse_word("  ").unwrap(), Word::identity());
        assert_eq!(parse_word("(x1 x2)^2").unwrap().to_string(), "x1 x2 x1 x2");
        assert_eq!(parse_word("q1(1/2) q1(1/2)").unwrap().to_string(), "q1(1)");
        assert_eq!(parse_word("q1(-3/6)").unwrap().to_string(), "q1(-1/2)");
        assert_eq!(parse_word("r2^2 x1^-2").unwrap().to_string(), "r2^2 x1^-2");
        assert_eq!(parse_word("x1*x2").unwrap(), parse_word("x1 x2").unwrap());
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(parse_word("x1 ^"), Err(GroupError::Syntax { .. })));
        assert!(matches!(parse_word("x1 (x2"), Err(GroupError::Syntax { pos: 6, .. })));
        assert!(matches!(parse_word("z3"), Err(GroupError::UnknownLetter(_))));
        assert!(matches!(parse_word("x0"), Err(GroupError::UnknownLetter(_))));
        assert!(matches!(parse_word("t2"), Err(GroupError::Syntax { .. })));
        assert!(matches!(parse_word("q1(0)"), Err(GroupError::Syntax { .. })));
        assert!(matches!(parse_word("x1 )"), Err(GroupError::Syntax { pos: 3, .. })));
    }

    #[test]
    fn round_trip() {
        for s in ["x1", "x1^3 x2^-1", "t3_12 r3^-2 x2", "q1(2/3) x1 q1(-5)", "e"] {
            let w = parse_word(s).unwrap();
            assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
        }
    }
}
