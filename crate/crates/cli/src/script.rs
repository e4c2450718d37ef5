//! Line-oriented script grammar: tokens and statements.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Word(String),
    /// Double-quoted text; `\"` is the only escape.
    Str(String),
    /// Balanced braces, kept verbatim including the outer pair.
    Group(String),
    Eq,
    Hat,
    Comma,
    Colon,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => write!(f, "`{w}`"),
            Token::Str(s) => write!(f, "\"{s}\""),
            Token::Group(g) => write!(f, "`{g}`"),
            Token::Eq => write!(f, "`=`"),
            Token::Hat => write!(f, "`^`"),
            Token::Comma => write!(f, "`,`"),
            Token::Colon => write!(f, "`:`"),
        }
    }
}

/// Splits one line into tokens; `#` outside quotes and braces starts a comment.
pub fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '#' => break,
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(format!("unterminated string at column {}", i + 1)),
                        Some('"') => break,
                        Some('\\') if chars.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Token::Str(s));
            }
            '{' => {
                let start = i;
                let mut depth = 0;
                loop {
                    match chars.get(i) {
                        None => return Err(format!("unbalanced `{{` at column {}", start + 1)),
                        Some('{') => depth += 1,
                        Some('}') => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
                i += 1;
                out.push(Token::Group(chars[start..i].iter().collect()));
            }
            '}' => return Err(format!("unexpected `}}` at column {}", i + 1)),
            '=' if chars.get(i + 1) == Some(&'=') => {
                out.push(Token::Word("==".into()));
                i += 2;
            }
            '=' => {
                out.push(Token::Eq);
                i += 1;
            }
            '^' => {
                out.push(Token::Hat);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            ':' => {
                out.push(Token::Colon);
                i += 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"\"{}=^,:#".contains(chars[i]) {
                    i += 1;
                }
                out.push(Token::Word(chars[start..i].iter().collect()));
            }
        }
    }
    Ok(out)
}

/// A reference to an internal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    /// A bound set name.
    Named(String),
    /// Standard name of a bound HF set.
    HatNamed(String),
    /// Standard name of an HF literal.
    HatLiteral(String),
}

/// An HF set by name or literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HfExpr {
    Named(String),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosetSpec {
    Chain(usize),
    Antichain(usize),
    Forcing { n: usize, m: usize, kappa: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Algebra { name: String, atoms: usize },
    AlgebraFrom { name: String, poset: String },
    Hf { name: String, literal: String },
    Name { name: String, set: SetExpr },
    Set { name: String, entries: Vec<(SetExpr, String)> },
    Show(SetExpr),
    Eval { formula: String, assign: Vec<(String, SetExpr)> },
    CheckLos { formula: String, assign: Vec<(String, SetExpr)> },
    CheckTransfer { formula: String, assign: Vec<(String, HfExpr)> },
    CheckValue { formula: String, assign: Vec<(String, SetExpr)>, expected: String },
    CheckRefined(String),
    Suite(String),
    Maximize { formula: String, var: String, rank: Option<usize>, assign: Vec<(String, SetExpr)> },
    Descend { set: SetExpr, rank: Option<usize> },
    Ascend { name: Option<String>, sets: Vec<SetExpr> },
    EscherCheck { rank: Option<usize>, samples: Option<usize> },
    BSetDiscrete { name: String, points: usize },
    BSetSymmdiff { name: String },
    BSystem { name: String, over: String, sig: Vec<(String, usize)>, interp: Vec<(String, String)> },
    BEval { system: String, formula: String, assign: Vec<(String, String)> },
    Poset { name: String, spec: PosetSpec },
    Complete(String),
    Refined(String),
}

impl Statement {
    /// `None` for blank and comment-only lines.
    pub fn parse(line: &str) -> Result<Option<Statement>, String> {
        let tokens = tokenize(line)?;
        if tokens.is_empty() {
            return Ok(None);
        }
        Parser { tokens, pos: 0 }.statement().map(Some)
    }

    /// Whether the statement counts toward the exit status.
    pub fn is_check(&self) -> bool {
        matches!(self, Statement::CheckLos { .. } | Statement::CheckTransfer { .. } | Statement::CheckValue { .. } | Statement::CheckRefined(_) | Statement::Suite(_) | Statement::EscherCheck { .. })
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn describe(t: Option<&Token>) -> String {
        t.map_or("end of line".to_string(), Token::to_string)
    }

    fn word(&mut self, what: &str) -> Result<String, String> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            other => Err(format!("expected {what}, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, String> {
        let w = self.word(what)?;
        let mut chars = w.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(w)
        } else {
            Err(format!("`{w}` is not a valid {what}"))
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, String> {
        let w = self.word(what)?;
        w.parse().map_err(|_| format!("expected {what}, found `{w}`"))
    }

    fn string(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Token::Str(s)) => Ok(s),
            other => Err(format!("expected a quoted formula, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn expect(&mut self, t: Token) -> Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            other => Err(format!("expected {t}, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), String> {
        match self.next() {
            Some(Token::Word(w)) if w == kw => Ok(()),
            other => Err(format!("expected `{kw}`, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn done(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("unexpected {t}")),
        }
    }

    fn set_expr(&mut self) -> Result<SetExpr, String> {
        match self.next() {
            Some(Token::Hat) => match self.next() {
                Some(Token::Word(w)) => Ok(SetExpr::HatNamed(w)),
                Some(Token::Group(g)) => Ok(SetExpr::HatLiteral(g)),
                other => Err(format!("expected an HF set after `^`, found {}", Self::describe(other.as_ref()))),
            },
            Some(Token::Word(w)) => Ok(SetExpr::Named(w)),
            Some(Token::Group(g)) => Ok(SetExpr::HatLiteral(g)),
            other => Err(format!("expected a set, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn hf_expr(&mut self) -> Result<HfExpr, String> {
        if self.peek() == Some(&Token::Hat) {
            self.pos += 1;
        }
        match self.next() {
            Some(Token::Word(w)) => Ok(HfExpr::Named(w)),
            Some(Token::Group(g)) => Ok(HfExpr::Literal(g)),
            other => Err(format!("expected an HF set, found {}", Self::describe(other.as_ref()))),
        }
    }

    fn elem_literal(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            Some(Token::Group(g)) => Ok(g),
            other => Err(format!("expected an algebra element, found {}", Self::describe(other.as_ref()))),
        }
    }

    /// `var=value` pairs up to the end of the line or a `stop` word.
    fn assignments<T>(&mut self, mut value: impl FnMut(&mut Self) -> Result<T, String>, stop: &[&str]) -> Result<Vec<(String, T)>, String> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t, Token::Word(w) if stop.contains(&w.as_str())) {
                break;
            }
            let var = self.ident("variable")?;
            self.expect(Token::Eq)?;
            out.push((var, value(self)?));
        }
        Ok(out)
    }

    fn rank_flag(&mut self, flag: &str) -> Result<Option<usize>, String> {
        if matches!(self.peek(), Some(Token::Word(w)) if w == flag) {
            self.pos += 1;
            return self.number(&format!("a number after `{flag}`")).map(Some);
        }
        Ok(None)
    }

    fn statement(&mut self) -> Result<Statement, String> {
        let verb = self.word("a statement")?;
        let st = match verb.as_str() {
            "algebra" => {
                let name = self.ident("algebra name")?;
                if matches!(self.peek(), Some(Token::Word(w)) if w == "from") {
                    self.pos += 1;
                    Statement::AlgebraFrom { name, poset: self.ident("poset name")? }
                } else {
                    Statement::Algebra { name, atoms: self.number("an atom count")? }
                }
            }
            "hf" => {
                let name = self.ident("HF set name")?;
                self.expect(Token::Eq)?;
                match self.next() {
                    Some(Token::Group(g)) => Statement::Hf { name, literal: g },
                    other => return Err(format!("expected an HF literal such as {{{{}}}}, found {}", Self::describe(other.as_ref()))),
                }
            }
            "name" => {
                let name = self.ident("set name")?;
                self.expect(Token::Eq)?;
                Statement::Name { name, set: self.set_expr()? }
            }
            "set" => {
                let name = self.ident("set name")?;
                self.expect(Token::Eq)?;
                let body = match self.next() {
                    Some(Token::Group(g)) => g,
                    other => return Err(format!("expected `{{ child : value, ... }}`, found {}", Self::describe(other.as_ref()))),
                };
                Statement::Set { name, entries: set_entries(&body)? }
            }
            "show" => Statement::Show(self.set_expr()?),
            "eval" => {
                let formula = self.string()?;
                Statement::Eval { formula, assign: self.assignments(Self::set_expr, &[])? }
            }
            "check" => self.check()?,
            "suite" => Statement::Suite(self.word("a suite name")?),
            "maximize" => {
                let formula = self.string()?;
                let var = self.ident("variable")?;
                let rank = self.rank_flag("--rank")?;
                let assign = self.assignments(Self::set_expr, &["--rank"])?;
                let rank = rank.or(self.rank_flag("--rank")?);
                Statement::Maximize { formula, var, rank, assign }
            }
            "descend" => {
                let set = self.set_expr()?;
                Statement::Descend { set, rank: self.rank_flag("--rank")? }
            }
            "ascend" => {
                let name = if matches!(self.tokens.get(self.pos + 1), Some(Token::Eq)) {
                    let n = self.ident("set name")?;
                    self.pos += 1;
                    Some(n)
                } else {
                    None
                };
                let mut sets = vec![self.set_expr()?];
                while self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    sets.push(self.set_expr()?);
                }
                Statement::Ascend { name, sets }
            }
            "escher-check" => {
                let (mut rank, mut samples) = (None, None);
                while let Some(Token::Word(w)) = self.peek().cloned() {
                    match w.as_str() {
                        "--rank" => rank = self.rank_flag("--rank")?,
                        "--samples" => samples = self.rank_flag("--samples")?,
                        _ => return Err(format!("unknown option `{w}`")),
                    }
                }
                Statement::EscherCheck { rank, samples }
            }
            "bset" => {
                let name = self.ident("B-set name")?;
                match self.word("`discrete` or `symmdiff`")?.as_str() {
                    "discrete" => Statement::BSetDiscrete { name, points: self.number("a point count")? },
                    "symmdiff" => Statement::BSetSymmdiff { name },
                    other => return Err(format!("unknown B-set kind `{other}`")),
                }
            }
            "bsystem" => {
                let name = self.ident("system name")?;
                self.keyword("over")?;
                let over = self.ident("B-set name")?;
                let mut text = self.word("a signature such as sig(le/2)")?;
                while !text.ends_with(')') && self.peek() == Some(&Token::Comma) {
                    self.pos += 1;
                    text.push(',');
                    text.push_str(&self.word("a symbol such as le/2")?);
                }
                let sig = signature(&text)?;
                let interp = self.assignments(|p| p.word("an interpretation"), &[])?;
                Statement::BSystem { name, over, sig, interp }
            }
            "beval" => {
                let system = self.ident("system name")?;
                let formula = self.string()?;
                Statement::BEval { system, formula, assign: self.assignments(Self::elem_literal, &[])? }
            }
            "poset" => {
                let name = self.ident("poset name")?;
                self.expect(Token::Eq)?;
                let spec = match self.word("`chain`, `antichain` or `forcing`")?.as_str() {
                    "chain" => PosetSpec::Chain(self.number("a length")?),
                    "antichain" => PosetSpec::Antichain(self.number("a width")?),
                    "forcing" => {
                        let n = self.number("a domain size")?;
                        let m = self.number("a value count")?;
                        let kappa = if self.peek().is_some() { Some(self.number("a domain bound")?) } else { None };
                        PosetSpec::Forcing { n, m, kappa }
                    }
                    other => return Err(format!("unknown poset kind `{other}`")),
                };
                Statement::Poset { name, spec }
            }
            "complete" => Statement::Complete(self.ident("poset name")?),
            "refined?" => Statement::Refined(self.ident("poset name")?),
            other => return Err(format!("unknown statement `{other}`")),
        };
        self.done()?;
        Ok(st)
    }

    fn check(&mut self) -> Result<Statement, String> {
        match self.peek().cloned() {
            Some(Token::Word(w)) if w == "los" => {
                self.pos += 1;
                let formula = self.string()?;
                Ok(Statement::CheckLos { formula, assign: self.assignments(Self::set_expr, &[])? })
            }
            Some(Token::Word(w)) if w == "transfer" => {
                self.pos += 1;
                let formula = self.string()?;
                Ok(Statement::CheckTransfer { formula, assign: self.assignments(Self::hf_expr, &[])? })
            }
            Some(Token::Word(w)) if w == "suite" => {
                self.pos += 1;
                Ok(Statement::Suite(self.word("a suite name")?))
            }
            Some(Token::Word(w)) if w == "refined" => {
                self.pos += 1;
                Ok(Statement::CheckRefined(self.ident("poset name")?))
            }
            Some(Token::Str(_)) => {
                let formula = self.string()?;
                let assign = self.assignments(Self::set_expr, &["=="])?;
                self.keyword("==")?;
                Ok(Statement::CheckValue { formula, assign, expected: self.elem_literal()? })
            }
            other => Err(format!("expected `los`, `transfer`, `suite`, `refined` or a quoted formula after `check`, found {}", Self::describe(other.as_ref()))),
        }
    }
}

/// `{ child : value, ... }` entries of a `set` literal.
fn set_entries(group: &str) -> Result<Vec<(SetExpr, String)>, String> {
    let inner = &group[1..group.len() - 1];
    let mut p = Parser { tokens: tokenize(inner)?, pos: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let child = p.set_expr()?;
        p.expect(Token::Colon)?;
        out.push((child, p.elem_literal()?));
        match p.next() {
            None => break,
            Some(Token::Comma) => {}
            Some(t) => return Err(format!("expected `,` between entries, found {t}")),
        }
    }
    Ok(out)
}

/// `sig(name/arity, ...)`.
fn signature(word: &str) -> Result<Vec<(String, usize)>, String> {
    let inner = word
        .strip_prefix("sig(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("expected a signature such as sig(le/2), found `{word}`"))?;
    inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| match s.split_once('/') {
            Some((name, arity)) => arity.trim().parse().map(|a| (name.trim().to_string(), a)).map_err(|_| format!("bad arity in `{word}`")),
            None => Err(format!("expected name/arity in `{word}`")),
        })
        .collect()
}
