//! Recursive-descent parser for the formula language.
//!
//! ```text
//! formula := quant | iff
//! quant   := ('A' | 'E') ident '.' formula
//! iff     := imp ('<->' imp)*
//! imp     := or ('->' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | quant | atom
//! atom    := '(' formula ')' | REL '(' term {',' term} ')'
//!          | term ('=' | '!=' | INFIX) term
//! term    := ident | FUN '(' term {',' term} ')'
//! ```
//!
//! Names resolve against the signature; anything else is a variable.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::signature::{Signature, SymbolKind, INFIX_RELATIONS};
use super::syntax::{Formula, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Eq,
    NotEq,
    And,
    Or,
    Imp,
    Iff,
    Infix(&'static str),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let rest = &text[i..];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == b'_' {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'\'')
                .count();
            (Tok::Ident(rest[..len].to_string()), len)
        } else if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if rest.starts_with("!=") {
            (Tok::NotEq, 2)
        } else if let Some(op) = INFIX_RELATIONS
            .iter()
            .filter(|op| rest.starts_with(**op))
            .max_by_key(|op| op.len())
        {
            (Tok::Infix(op), op.len())
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'!' => Tok::Bang,
                b'=' => Tok::Eq,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(Error::Parse {
                        position: start,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn quant_ahead(&self) -> bool {
        matches!(self.peek(), Tok::Ident(q) if q == "A" || q == "E")
            && matches!(self.peek_at(1), Tok::Ident(_))
            && *self.peek_at(2) == Tok::Dot
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.quant_ahead() {
            self.quant()
        } else {
            self.iff()
        }
    }

    fn quant(&mut self) -> Result<Formula> {
        let universal = matches!(self.bump(), Tok::Ident(q) if q == "A");
        let at = self.offset();
        let var = match self.bump() {
            Tok::Ident(v) => v,
            _ => unreachable!("quant_ahead checked the variable"),
        };
        if self.sig.kind(&var).is_some() {
            return Err(Error::Parse {
                position: at,
                message: format!("cannot quantify over signature symbol `{var}`"),
            });
        }
        self.expect(Tok::Dot, "`.` after quantified variable")?;
        let body = Box::new(self.formula()?);
        Ok(if universal {
            Formula::Forall(var, body)
        } else {
            Formula::Exists(var, body)
        })
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let right = self.imp()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let right = self.imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.quant_ahead() {
            return self.quant();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(SymbolKind::Relation(arity)) = self.sig.kind(&name) {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return self.err(format!("relation `{name}` must be applied to arguments"));
                }
                let args = self.args()?;
                if args.len() != arity {
                    return Err(Error::ArityMismatch {
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                return Ok(Formula::Rel(name, args));
            }
        }
        let at = self.offset();
        let left = self.term()?;
        match self.bump() {
            Tok::Eq => Ok(Formula::Eq(left, self.term()?)),
            Tok::NotEq => Ok(Formula::not(Formula::Eq(left, self.term()?))),
            Tok::Infix(op) => match self.sig.kind(op) {
                Some(SymbolKind::Relation(2)) => {
                    Ok(Formula::Rel(op.to_string(), alloc::vec![left, self.term()?]))
                }
                _ => Err(Error::Parse {
                    position: at,
                    message: format!("`{op}` is not a binary relation of the signature"),
                }),
            },
            _ => Err(Error::Parse {
                position: at,
                message: "expected an atom (relation application or equation)".to_string(),
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = alloc::vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term> {
        let at = self.offset();
        let name = match self.peek().clone() {
            Tok::Ident(n) => n,
            _ => return self.err("expected a term"),
        };
        self.bump();
        let applied = *self.peek() == Tok::LParen;
        let fail = |message: String| Err(Error::Parse { position: at, message });
        match (self.sig.kind(&name), applied) {
            (Some(SymbolKind::Function(arity)), true) => {
                let args = self.args()?;
                if args.len() != arity {
                    return Err(Error::ArityMismatch {
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Term::App(name, args))
            }
            (Some(SymbolKind::Function(_)), false) => {
                fail(format!("function `{name}` used without arguments"))
            }
            (Some(SymbolKind::Constant), false) => Ok(Term::Const(name)),
            (Some(SymbolKind::Constant), true) => {
                fail(format!("constant `{name}` applied to arguments"))
            }
            (Some(SymbolKind::Relation(_)), _) => {
                fail(format!("relation `{name}` used as a term"))
            }
            (None, true) => fail(format!("unknown function `{name}` applied to arguments")),
            (None, false) => Ok(Term::Var(name)),
        }
    }
}

/// Parse `text` against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sig_r2() -> Signature {
        Signature::new().with_relation("R", 2).unwrap()
    }

    #[test]
    fn asymmetry_axiom() {
        let f = parse_formula("A x. A y. (R(x,y) -> !R(y,x))", &sig_r2()).unwrap();
        let r = |a: &str, b: &str| Formula::rel("R", vec![Term::var(a), Term::var(b)]);
        let expected = Formula::forall(
            "x",
            Formula::forall("y", Formula::implies(r("x", "y"), Formula::not(r("y", "x")))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn equality_atom() {
        let f = parse_formula("x=x", &Signature::new()).unwrap();
        assert_eq!(f, Formula::eq(Term::var("x"), Term::var("x")));
    }

    #[test]
    fn quantified_conjunction_with_constant() {
        let sig = Signature::new()
            .with_relation("R", 1)
            .unwrap()
            .with_constant("c")
            .unwrap();
        let f = parse_formula("A x. (R(x) <-> (E y. E z. !(y=z) & x=c))", &sig).unwrap();
        let body = Formula::exists(
            "y",
            Formula::exists(
                "z",
                Formula::and(
                    Formula::not(Formula::eq(Term::var("y"), Term::var("z"))),
                    Formula::eq(Term::var("x"), Term::constant("c")),
                ),
            ),
        );
        let expected = Formula::forall(
            "x",
            Formula::iff(Formula::rel("R", vec![Term::var("x")]), body),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn relation_named_like_a_quantifier() {
        let sig = Signature::new()
            .with_relation("E", 2)
            .unwrap()
            .with_relation("R", 2)
            .unwrap();
        let f = parse_formula("(A x. A y. !E(x,y)) | (A x. A y. !R(x,y))", &sig).unwrap();
        assert!(matches!(f, Formula::Or(..)));
        let g = parse_formula("E x. E(x,x)", &sig).unwrap();
        assert!(matches!(g, Formula::Exists(..)));
    }

    #[test]
    fn not_equal_desugars() {
        let f = parse_formula("x != y", &Signature::new()).unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::eq(Term::var("x"), Term::var("y")))
        );
    }

    #[test]
    fn infix_relation() {
        let sig = Signature::new().with_relation("<=", 2).unwrap();
        let f = parse_formula("E y. A z. z<=y", &sig).unwrap();
        assert_eq!(f.to_string(), "E y. A z. z<=y");
        assert!(parse_formula("x <= y", &Signature::new()).is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        let sig = Signature::new()
            .with_relation("P", 1)
            .unwrap()
            .with_relation("Q", 1)
            .unwrap();
        let f = parse_formula("P(x) | Q(x) & P(y) -> Q(y) -> P(z)", &sig).unwrap();
        assert_eq!(f.to_string(), "P(x) | Q(x) & P(y) -> Q(y) -> P(z)");
        let Formula::Implies(l, r) = f else { panic!("expected implication") };
        assert!(matches!(*l, Formula::Or(..)));
        assert!(matches!(*r, Formula::Implies(..)));
    }

    #[test]
    fn errors_carry_positions() {
        let sig = sig_r2();
        match parse_formula("R(x)", &sig) {
            Err(Error::ArityMismatch { expected: 2, found: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("x = ", &sig) {
            Err(Error::Parse { position: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("x = y)", &sig).is_err());
        assert!(parse_formula("R = x", &sig).is_err());
        assert!(parse_formula("f(x) = x", &sig).is_err());
        assert!(parse_formula("x # y", &sig).is_err());
        let csig = Signature::new().with_constant("c").unwrap();
        assert!(parse_formula("c(x) = x", &csig).is_err());
        assert!(parse_formula("A c. c = c", &csig).is_err());
        let fsig = Signature::new().with_function("f", 1).unwrap();
        assert!(parse_formula("f = x", &fsig).is_err());
        assert!(parse_formula("f(x,x) = x", &fsig).is_err());
    }
}
