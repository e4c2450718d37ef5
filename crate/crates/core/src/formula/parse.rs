//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! F ::= Q | I
//! Q ::= ("forall" | "exists") var ["in" T] "." F
//! I ::= O ["->" F]
//! O ::= A {"\/" A}
//! A ::= U {"/\" U}
//! U ::= "~" U | Q | "(" F ")" | T "in" T | T "=" T | P(T, ..)
//! ```

use super::{Formula, FormulaError, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    In,
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Arrow,
    Or,
    And,
    Not,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, k) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l, col: k });
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "in" => Tok::In,
                _ => Tok::Ident(word),
            };
            push(&mut out, tok);
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, width) = match (c, two.as_str()) {
            (_, "->") => (Tok::Arrow, 2),
            (_, "\\/") => (Tok::Or, 2),
            (_, "/\\") => (Tok::And, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('=', _) => (Tok::Equals, 1),
            ('~', _) => (Tok::Not, 1),
            _ => {
                return Err(FormulaError::Syntax { line, col, message: format!("unexpected character `{c}`") });
            }
        };
        push(&mut out, tok);
        i += width;
        col += width;
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
}

/// Parses a formula. Identifiers declared in `sig` are symbols; all others are variables.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig };
    let f = p.formula()?;
    p.expect(Tok::End, "end of input")?;
    Ok(f)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        let (line, col) = self.here();
        Err(FormulaError::Syntax { line, col, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if self.sig.predicate_arity(&name).is_some() => self.predicate(name),
            Tok::Ident(_) => self.relation(),
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, FormulaError> {
        let universal = self.bump() == Tok::Forall;
        let var = match self.peek().clone() {
            Tok::Ident(name) if !self.sig.is_symbol(&name) => {
                self.bump();
                name
            }
            other => return self.error(format!("expected a variable, found {}", describe(&other))),
        };
        let bound = if *self.peek() == Tok::In {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::Dot, "`.`")?;
        if *self.peek() == Tok::End {
            return self.error("missing quantifier body");
        }
        let body = Box::new(self.formula()?);
        Ok(match (universal, bound) {
            (true, Some(t)) => Formula::BoundedForall(var, t, body),
            (false, Some(t)) => Formula::BoundedExists(var, t, body),
            (true, None) => Formula::CarrierForall(var, body),
            (false, None) => Formula::CarrierExists(var, body),
        })
    }

    fn predicate(&mut self, name: String) -> Result<Formula, FormulaError> {
        let (line, col) = self.here();
        self.bump();
        let expected = self.sig.predicate_arity(&name).unwrap_or(0);
        let args = if *self.peek() == Tok::LParen { self.arguments()? } else { Vec::new() };
        if args.len() != expected {
            return Err(FormulaError::Arity { name, expected, found: args.len(), line, col });
        }
        Ok(Formula::Pred(name, args))
    }

    fn relation(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.term()?;
        match self.bump() {
            Tok::In => Ok(Formula::Mem(lhs, self.term()?)),
            Tok::Equals => Ok(Formula::Eq(lhs, self.term()?)),
            other => {
                self.pos -= usize::from(other != Tok::End);
                self.error(format!("expected `in` or `=`, found {}", describe(&other)))
            }
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, FormulaError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.bump() {
                Tok::Comma => {}
                Tok::RParen => return Ok(args),
                other => {
                    self.pos -= usize::from(other != Tok::End);
                    return self.error(format!("expected `,` or `)`, found {}", describe(&other)));
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        let (line, col) = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(name) => name,
            other => return self.error(format!("expected a term, found {}", describe(&other))),
        };
        self.bump();
        let called = *self.peek() == Tok::LParen;
        match self.sig.function_arity(&name) {
            Some(expected) => {
                let args = if called { self.arguments()? } else { Vec::new() };
                if args.len() != expected {
                    return Err(FormulaError::Arity { name, expected, found: args.len(), line, col });
                }
                Ok(if expected == 0 { Term::Const(name) } else { Term::App(name, args) })
            }
            None if called || self.sig.predicate_arity(&name).is_some() => Err(FormulaError::UnknownSymbol { name, line, col }),
            None => Ok(Term::Var(name)),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Forall => "`forall`".into(),
        Tok::Exists => "`exists`".into(),
        Tok::In => "`in`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Equals => "`=`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Or => "`\\/`".into(),
        Tok::And => "`/\\`".into(),
        Tok::Not => "`~`".into(),
        Tok::End => "end of input".into(),
    }
}
