//! First-order formulas with `∈`, `=`, signature symbols, bounded and carrier quantifiers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

mod parse;
mod print;

pub use parse::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unknown symbol `{name}` at {line}:{col}")]
    UnknownSymbol { name: String, line: usize, col: usize },
    #[error("`{name}` expects {expected} arguments, got {found} (at {line}:{col})")]
    Arity { name: String, expected: usize, found: usize, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Mem(Term, Term),
    Eq(Term, Term),
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    BoundedForall(String, Term, Box<Formula>),
    BoundedExists(String, Term, Box<Formula>),
    CarrierForall(String, Box<Formula>),
    CarrierExists(String, Box<Formula>),
}

impl Formula {
    pub fn mem(x: &str, y: &str) -> Formula {
        Formula::Mem(Term::var(x), Term::var(y))
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(Term::var(x), Term::var(y))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(Box::new(f), Box::new(g))
    }

    pub fn imp(f: Formula, g: Formula) -> Formula {
        Formula::Imp(Box::new(f), Box::new(g))
    }

    pub fn iff(f: Formula, g: Formula) -> Formula {
        Formula::and(Formula::imp(f.clone(), g.clone()), Formula::imp(g, f))
    }

    pub fn forall_in(v: &str, bound: &str, body: Formula) -> Formula {
        Formula::BoundedForall(v.to_string(), Term::var(bound), Box::new(body))
    }

    pub fn exists_in(v: &str, bound: &str, body: Formula) -> Formula {
        Formula::BoundedExists(v.to_string(), Term::var(bound), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::CarrierForall(v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::CarrierExists(v.to_string(), Box::new(body))
    }

    /// True iff every quantifier is bounded by a set.
    pub fn is_restricted(&self) -> bool {
        match self {
            Formula::Mem(..) | Formula::Eq(..) | Formula::Pred(..) => true,
            Formula::Not(f) => f.is_restricted(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => f.is_restricted() && g.is_restricted(),
            Formula::BoundedForall(_, _, f) | Formula::BoundedExists(_, _, f) => f.is_restricted(),
            Formula::CarrierForall(..) | Formula::CarrierExists(..) => false,
        }
    }

    /// True iff no `∈` atom occurs.
    pub fn is_membership_free(&self) -> bool {
        match self {
            Formula::Mem(..) => false,
            Formula::Eq(..) | Formula::Pred(..) => true,
            Formula::Not(f) => f.is_membership_free(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => f.is_membership_free() && g.is_membership_free(),
            Formula::BoundedForall(..) | Formula::BoundedExists(..) => false,
            Formula::CarrierForall(_, f) | Formula::CarrierExists(_, f) => f.is_membership_free(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Mem(a, b) | Formula::Eq(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Pred(_, args) => args.iter().for_each(|a| add_term(a, bound, out)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => {
                f.collect_free(bound, out);
                g.collect_free(bound, out);
            }
            Formula::BoundedForall(v, t, f) | Formula::BoundedExists(v, t, f) => {
                add_term(t, bound, out);
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::CarrierForall(v, f) | Formula::CarrierExists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Mem(..) | Formula::Eq(..) | Formula::Pred(..) => 0,
            Formula::Not(f)
            | Formula::BoundedForall(_, _, f)
            | Formula::BoundedExists(_, _, f)
            | Formula::CarrierForall(_, f)
            | Formula::CarrierExists(_, f) => 1 + f.depth(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => 1 + f.depth().max(g.depth()),
        }
    }
}

/// Function and predicate symbols with arities. Constants are 0-ary functions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    functions: BTreeMap<String, usize>,
    predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.to_string(), arity);
        self
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.predicates.insert(name.to_string(), arity);
        self
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.functions.contains_key(name) || self.predicates.contains_key(name)
    }
}
