//! Printer producing the minimal parenthesization accepted by the parser.

use std::fmt;

use super::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

const QUANT: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::BoundedForall(..) | Formula::BoundedExists(..) | Formula::CarrierForall(..) | Formula::CarrierExists(..) => QUANT,
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, ctx: u8) -> fmt::Result {
    let own = level(f);
    // a quantifier body runs to the right, so it must be wrapped anywhere but the top
    let wrap = if own == QUANT { ctx > QUANT } else { own < ctx };
    if wrap {
        out.write_str("(")?;
    }
    match f {
        Formula::Mem(a, b) => write!(out, "{a} in {b}")?,
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Pred(p, args) => {
            out.write_str(p)?;
            if !args.is_empty() {
                write!(out, "{}", Term::App(String::new(), args.clone()))?;
            }
        }
        Formula::Not(g) => {
            out.write_str("~")?;
            if matches!(**g, Formula::Mem(..) | Formula::Eq(..)) {
                write!(out, "({g})")?;
            } else {
                write_at(out, g, UNARY)?;
            }
        }
        Formula::And(g, h) => {
            write_at(out, g, AND)?;
            out.write_str(" /\\ ")?;
            write_at(out, h, UNARY)?;
        }
        Formula::Or(g, h) => {
            write_at(out, g, OR)?;
            out.write_str(" \\/ ")?;
            write_at(out, h, AND)?;
        }
        Formula::Imp(g, h) => {
            write_at(out, g, OR)?;
            out.write_str(" -> ")?;
            write_at(out, h, IMP)?;
        }
        Formula::BoundedForall(v, t, g) => {
            write!(out, "forall {v} in {t} . ")?;
            write_at(out, g, QUANT)?;
        }
        Formula::BoundedExists(v, t, g) => {
            write!(out, "exists {v} in {t} . ")?;
            write_at(out, g, QUANT)?;
        }
        Formula::CarrierForall(v, g) => {
            write!(out, "forall {v} . ")?;
            write_at(out, g, QUANT)?;
        }
        Formula::CarrierExists(v, g) => {
            write!(out, "exists {v} . ")?;
            write_at(out, g, QUANT)?;
        }
    }
    if wrap {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, QUANT)
    }
}
