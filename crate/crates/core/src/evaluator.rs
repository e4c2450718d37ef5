//! Boolean truth values of formulas, the classical oracle, and the checks relating them.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::balg::{BoolAlg, Elem, Hom, Partition};
use crate::formula::{parse, Formula, Signature, Term};
use crate::hf::HfSet;
use crate::universe::{SetId, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("unbounded quantifier over `{0}` needs a carrier")]
    UnboundedQuantifier(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("symbol `{0}` has no interpretation here")]
    Uninterpreted(String),
    #[error("formula is not restricted")]
    NotRestricted,
    #[error("empty fragment")]
    EmptyFragment,
}

pub type Result<T> = std::result::Result<T, EvalError>;

pub type BvAssignment = BTreeMap<String, SetId>;
pub type HfAssignment = BTreeMap<String, HfSet>;

/// Builds an assignment from `(name, value)` pairs.
pub fn assign<V: Clone>(pairs: &[(&str, V)]) -> BTreeMap<String, V> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

struct Env<'a, V> {
    base: &'a BTreeMap<String, V>,
    scope: Vec<(String, V)>,
}

impl<V: Clone> Env<'_, V> {
    fn lookup(&self, t: &Term) -> Result<V> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(k, _)| k == v)
                .map(|(_, x)| x.clone())
                .or_else(|| self.base.get(v).cloned())
                .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::Const(c) | Term::App(c, _) => Err(EvalError::Uninterpreted(c.clone())),
        }
    }
}

struct BvEval<'a> {
    u: &'a Universe,
    full: u64,
    carrier: Option<&'a [SetId]>,
}

impl BvEval<'_> {
    fn eval(&self, f: &Formula, env: &mut Env<'_, SetId>) -> Result<u64> {
        Ok(match f {
            Formula::Mem(a, b) => self.u.truth_mem(env.lookup(a)?, env.lookup(b)?)?.bits(),
            Formula::Eq(a, b) => self.u.truth_eq(env.lookup(a)?, env.lookup(b)?)?.bits(),
            Formula::Pred(p, _) => return Err(EvalError::Uninterpreted(p.clone())),
            Formula::Not(g) => !self.eval(g, env)? & self.full,
            Formula::And(g, h) => self.eval(g, env)? & self.eval(h, env)?,
            Formula::Or(g, h) => self.eval(g, env)? | self.eval(h, env)?,
            Formula::Imp(g, h) => (!self.eval(g, env)? | self.eval(h, env)?) & self.full,
            Formula::BoundedForall(v, t, g) => {
                let z = env.lookup(t)?;
                let mut acc = self.full;
                for (c, val) in self.u.entries(z)? {
                    if val.is_zero() {
                        continue;
                    }
                    acc &= !val.bits() | self.with(v, c, g, env)?;
                }
                acc & self.full
            }
            Formula::BoundedExists(v, t, g) => {
                let z = env.lookup(t)?;
                let mut acc = 0;
                for (c, val) in self.u.entries(z)? {
                    if val.is_zero() {
                        continue;
                    }
                    acc |= val.bits() & self.with(v, c, g, env)?;
                }
                acc
            }
            Formula::CarrierForall(v, g) => {
                let carrier = self.carrier.ok_or_else(|| EvalError::UnboundedQuantifier(v.clone()))?;
                let mut acc = self.full;
                for &c in carrier {
                    acc &= self.with(v, c, g, env)?;
                }
                acc
            }
            Formula::CarrierExists(v, g) => {
                let carrier = self.carrier.ok_or_else(|| EvalError::UnboundedQuantifier(v.clone()))?;
                let mut acc = 0;
                for &c in carrier {
                    acc |= self.with(v, c, g, env)?;
                }
                acc
            }
        })
    }

    fn with(&self, v: &str, x: SetId, g: &Formula, env: &mut Env<'_, SetId>) -> Result<u64> {
        env.scope.push((v.to_string(), x));
        let r = self.eval(g, env);
        env.scope.pop();
        r
    }
}

/// `[[f]]` under an assignment into the universe. Carrier quantifiers are rejected.
pub fn eval_bv(u: &Universe, f: &Formula, a: &BvAssignment) -> Result<Elem> {
    eval_bv_over(u, f, a, None)
}

/// `[[f]]` with carrier quantifiers ranging over `carrier` when it is given.
pub fn eval_bv_over(u: &Universe, f: &Formula, a: &BvAssignment, carrier: Option<&[SetId]>) -> Result<Elem> {
    let ev = BvEval { u, full: u.algebra().full_mask(), carrier };
    let bits = ev.eval(f, &mut Env { base: a, scope: Vec::new() })?;
    Ok(u.algebra().elem(bits).expect("mask within algebra"))
}

/// Tarskian satisfaction over hereditarily finite sets.
pub fn eval_classical(f: &Formula, a: &HfAssignment) -> Result<bool> {
    classical(f, &mut Env { base: a, scope: Vec::new() })
}

fn classical(f: &Formula, env: &mut Env<'_, HfSet>) -> Result<bool> {
    let with = |v: &str, x: &HfSet, g: &Formula, env: &mut Env<'_, HfSet>| {
        env.scope.push((v.to_string(), x.clone()));
        let r = classical(g, env);
        env.scope.pop();
        r
    };
    Ok(match f {
        Formula::Mem(a, b) => env.lookup(b)?.contains(&env.lookup(a)?),
        Formula::Eq(a, b) => env.lookup(a)? == env.lookup(b)?,
        Formula::Pred(p, _) => return Err(EvalError::Uninterpreted(p.clone())),
        Formula::Not(g) => !classical(g, env)?,
        Formula::And(g, h) => classical(g, env)? && classical(h, env)?,
        Formula::Or(g, h) => classical(g, env)? || classical(h, env)?,
        Formula::Imp(g, h) => !classical(g, env)? || classical(h, env)?,
        Formula::BoundedForall(v, t, g) => {
            let z = env.lookup(t)?;
            for m in z.members() {
                if !with(v, m, g, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::BoundedExists(v, t, g) => {
            let z = env.lookup(t)?;
            for m in z.members() {
                if with(v, m, g, env)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::CarrierForall(v, _) | Formula::CarrierExists(v, _) => return Err(EvalError::UnboundedQuantifier(v.clone())),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LosReport {
    /// `[[f]]` computed in the Boolean-valued universe.
    pub truth: Elem,
    /// Join of atoms at which the collapsed assignment satisfies `f` classically.
    pub oracle: Elem,
    /// Classical verdict per atom.
    pub per_atom: Vec<bool>,
    /// Atoms where the two sides disagree.
    pub violations: Vec<usize>,
}

impl LosReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The assignment collapsed at atom `q`.
pub fn collapse_assignment(u: &Universe, q: usize, a: &BvAssignment) -> Result<HfAssignment> {
    a.iter().map(|(k, &x)| Ok((k.clone(), u.collapse_at_atom(q, x)?))).collect()
}

/// Compares `[[f]]` with the join of atoms whose fiber satisfies `f` classically.
pub fn check_los(u: &Universe, f: &Formula, a: &BvAssignment) -> Result<LosReport> {
    if !f.is_restricted() {
        return Err(EvalError::NotRestricted);
    }
    let truth = eval_bv(u, f, a)?;
    let alg = u.algebra();
    let mut per_atom = Vec::with_capacity(alg.atom_count());
    for q in 0..alg.atom_count() {
        per_atom.push(eval_classical(f, &collapse_assignment(u, q, a)?)?);
    }
    let oracle = atoms_where(alg, &per_atom);
    let violations = (0..alg.atom_count()).filter(|&q| truth.has_atom(q) != per_atom[q]).collect();
    Ok(LosReport { truth, oracle, per_atom, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub classical: bool,
    pub truth: Elem,
    /// Classical truth iff `truth = 1`.
    pub holds: bool,
}

/// Checks `f(h..)` classically against `[[f(h^∧..)]] = 1`.
pub fn check_restricted_transfer(u: &Universe, f: &Formula, args: &HfAssignment) -> Result<TransferReport> {
    if !f.is_restricted() {
        return Err(EvalError::NotRestricted);
    }
    let classical = eval_classical(f, args)?;
    let named: BvAssignment = args.iter().map(|(k, h)| (k.clone(), u.canonical_name(h))).collect();
    let truth = eval_bv(u, f, &named)?;
    let holds = classical == (truth == u.algebra().one());
    Ok(TransferReport { classical, truth, holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxWitness {
    pub witness: SetId,
    /// `⋁` of `[[f(x)]]` over the fragment.
    pub value: Elem,
    /// `[[f(witness)]]`.
    pub attained: Elem,
}

/// Fragment-relative maximum principle: a single fragment element attaining `⋁_x [[f(x)]]`.
///
/// Blocks `b_i = [[f(x_i)]] ∧ ¬(b_0 ∨ .. ∨ b_{i-1})` form a partition of the value; the
/// remainder goes to the first element. The witness is the canonical form of their mix.
pub fn find_max_witness(u: &Universe, f: &Formula, var: &str, a: &BvAssignment, fragment: &[SetId]) -> Result<MaxWitness> {
    let first = *fragment.first().ok_or(EvalError::EmptyFragment)?;
    let alg = u.algebra();
    let mut env = a.clone();
    let mut blocks = Vec::new();
    let mut members = Vec::new();
    let mut covered = 0u64;
    for &x in fragment {
        env.insert(var.to_string(), x);
        let v = eval_bv(u, f, &env)?.bits() & !covered;
        if v != 0 {
            covered |= v;
            blocks.push(v);
            members.push(x);
        }
    }
    let value = alg.elem(covered).expect("mask within algebra");
    let rest = alg.full_mask() & !covered;
    if rest != 0 {
        match members.iter().position(|&m| m == first) {
            Some(i) => blocks[i] |= rest,
            None => {
                blocks.push(rest);
                members.push(first);
            }
        }
    }
    let parts = Partition::new(alg, blocks.into_iter().map(|b| alg.elem(b).expect("mask")).collect()).expect("blocks partition unity");
    let witness = u.canonical(u.mix(&parts, &members)?)?;
    env.insert(var.to_string(), witness);
    let attained = eval_bv(u, f, &env)?;
    Ok(MaxWitness { witness, value, attained })
}

/// The bounded formula `Ord(x)`: `x` is transitive and linearly ordered by `∈`.
pub fn ordinal_formula(var: &str) -> Formula {
    let text = format!(
        "(forall y in {var} . forall z in y . z in {var}) /\\ (forall u in {var} . forall v in {var} . u in v \\/ u = v \\/ v in u)"
    );
    parse(&text, &Signature::empty()).expect("fixed formula")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrdinalReport {
    pub truth: Elem,
    /// Blocks `b_k = [[x = k^∧]]` with their ordinals `k`, nonzero blocks only.
    pub decomposition: Option<(Vec<Elem>, Vec<usize>)>,
}

/// `[[Ord(x)]]` and, when it is `1`, the decomposition of `x` as a mix of standard ordinals below `rank_bound`.
pub fn ordinal_ops(u: &Universe, x: SetId, rank_bound: usize) -> Result<OrdinalReport> {
    let truth = eval_bv(u, &ordinal_formula("x"), &assign(&[("x", x)]))?;
    let alg = u.algebra();
    if truth != alg.one() {
        return Ok(OrdinalReport { truth, decomposition: None });
    }
    let mut blocks = Vec::new();
    let mut ords = Vec::new();
    let mut names = Vec::new();
    for k in 0..rank_bound {
        let name = u.canonical_name(&HfSet::nat(k));
        let b = u.truth_eq(x, name)?;
        if !b.is_zero() {
            blocks.push(b);
            ords.push(k);
            names.push(name);
        }
    }
    let parts = match Partition::new(alg, blocks.clone()) {
        Ok(p) => p,
        Err(_) => return Err(UniverseError::SearchExhausted(rank_bound).into()),
    };
    if !u.same(u.mix(&parts, &names)?, x)? {
        return Err(UniverseError::SearchExhausted(rank_bound).into());
    }
    Ok(OrdinalReport { truth, decomposition: Some((blocks, ords)) })
}

/// Bounded formula: `f` is an ultrafilter on the algebra of subsets of `top` listed in `alg`.
pub fn ultrafilter_formula(f: &str, alg: &str, top: &str) -> Formula {
    let text = format!(
        "(forall x in {f} . exists y in {alg} . x = y) /\\ {top} in {f} /\\ (forall x in {f} . exists t in x . t = t) \
         /\\ (forall x in {f} . forall y in {alg} . (forall t in x . t in y) -> y in {f}) \
         /\\ (forall x in {f} . forall y in {f} . forall z in {alg} . (forall t in z . t in x /\\ t in y) /\\ (forall t in x . t in y -> t in z) -> z in {f}) \
         /\\ (forall x in {alg} . x in {f} \\/ (exists y in {f} . forall t in {top} . (t in y -> ~(t in x)) /\\ (~(t in x) -> t in y)))"
    );
    parse(&text, &Signature::empty()).expect("fixed formula")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub psi: SetId,
    /// Elements `b` with `ρ(b) ≠ [[b^∧ ∈ ψ_ρ]]`.
    pub mismatches: Vec<Elem>,
    /// Truth value of the ultrafilter formula for `ψ_ρ` over the standard name of the algebra.
    pub ultrafilter: Elem,
}

impl PsiReport {
    pub fn holds(&self, alg: &BoolAlg) -> bool {
        self.mismatches.is_empty() && self.ultrafilter == alg.one()
    }
}

/// Checks `ρ(b) = [[b^∧ ∈ ψ_ρ]]` for every `b` and that `ψ_ρ` is internally an ultrafilter.
pub fn check_psi_rho(u: &Universe, rho: &Hom) -> Result<PsiReport> {
    let psi = u.psi_rho(rho)?;
    let alg = u.algebra();
    let mut mismatches = Vec::new();
    for b in alg.elements() {
        let name = u.canonical_name(&Universe::elem_code(b));
        if u.truth_mem(name, psi)? != rho.apply(b).map_err(UniverseError::from)? {
            mismatches.push(b);
        }
    }
    let codes = u.canonical_name(&HfSet::from_members(alg.elements().map(Universe::elem_code)));
    let top = u.canonical_name(&Universe::elem_code(alg.one()));
    let ultrafilter = eval_bv(u, &ultrafilter_formula("f", "b", "top"), &assign(&[("f", psi), ("b", codes), ("top", top)]))?;
    Ok(PsiReport { psi, mismatches, ultrafilter })
}

/// Per-atom classical verdicts as an algebra element.
pub fn atoms_where(alg: &BoolAlg, verdicts: &[bool]) -> Elem {
    alg.from_atoms(verdicts.iter().enumerate().filter(|(_, &s)| s).map(|(q, _)| q)).expect("atoms in range")
}
