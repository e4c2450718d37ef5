//! Boolean-metric sets and algebraic systems over them.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::balg::{AlgebraError, BoolAlg, Elem, Partition};
use crate::formula::{Formula, Signature, Term};
use crate::hf::HfSet;
use crate::universe::{SetId, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BSetError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error("metric axiom ({axiom}) fails at {witness:?}")]
    MetricAxiomViolation { axiom: char, witness: Vec<usize> },
    #[error("metric is {rows}x{cols} but the carrier has {len} points")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("length mismatch: {0} partition blocks but {1} points")]
    LengthMismatch(usize, usize),
    #[error("two distinct mixings found: {0} and {1}")]
    AmbiguousMixing(usize, usize),
    #[error("no interpretation for `{0}`")]
    MissingInterpretation(String),
    #[error("table for `{symbol}` has {found} entries, expected {expected}")]
    BadTable { symbol: String, expected: usize, found: usize },
    #[error("table for `{0}` is not contractive")]
    NotContractive(String),
    #[error("membership is not in the signature of an algebraic system")]
    MemNotInSignature,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("systems have different signatures")]
    SignatureMismatch,
    #[error("point index {0} out of range")]
    BadPoint(usize),
}

pub type Result<T> = std::result::Result<T, BSetError>;

/// A finite carrier with a B-valued metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSet {
    alg: BoolAlg,
    labels: Vec<String>,
    metric: Vec<u64>,
}

impl BSet {
    /// Validates `d(x,y) = 0 ⟺ x = y`, symmetry and the triangle inequality.
    pub fn new(alg: &BoolAlg, labels: Vec<String>, metric: Vec<Vec<Elem>>) -> Result<Self> {
        let n = labels.len();
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            let cols = metric.iter().map(Vec::len).find(|&c| c != n).unwrap_or(n);
            return Err(BSetError::DimensionMismatch { rows: metric.len(), cols, len: n });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &metric {
            for &e in row {
                alg.check(e)?;
                flat.push(e.bits());
            }
        }
        let x = BSet { alg: *alg, labels, metric: flat };
        x.validate()?;
        Ok(x)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if (self.dm(i, j) == 0) != (i == j) {
                    return Err(BSetError::MetricAxiomViolation { axiom: 'a', witness: vec![i, j] });
                }
                if self.dm(i, j) != self.dm(j, i) {
                    return Err(BSetError::MetricAxiomViolation { axiom: 'b', witness: vec![i, j] });
                }
                for k in 0..n {
                    if self.dm(i, j) & !(self.dm(i, k) | self.dm(k, j)) != 0 {
                        return Err(BSetError::MetricAxiomViolation { axiom: 'c', witness: vec![i, j, k] });
                    }
                }
            }
        }
        Ok(())
    }

    /// `k` points at mutual distance `1`, labelled `x1..xk`.
    pub fn discrete(alg: &BoolAlg, k: usize) -> Self {
        let full = alg.full_mask();
        let metric = (0..k * k).map(|ij| if ij / k == ij % k { 0 } else { full }).collect();
        BSet { alg: *alg, labels: (1..=k).map(|i| format!("x{i}")).collect(), metric }
    }

    /// The algebra itself with `d(a, b) = a △ b`; points are in element order.
    pub fn symmdiff(alg: &BoolAlg) -> Self {
        let elems: Vec<Elem> = alg.elements().collect();
        let metric = elems.iter().flat_map(|a| elems.iter().map(move |b| a.bits() ^ b.bits())).collect();
        BSet { alg: *alg, labels: elems.iter().map(|e| e.literal(alg)).collect(), metric }
    }

    pub fn algebra(&self) -> &BoolAlg {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn dm(&self, i: usize, j: usize) -> u64 {
        self.metric[i * self.len() + j]
    }

    pub fn d(&self, i: usize, j: usize) -> Elem {
        self.alg.zero().with_bits(self.dm(i, j))
    }

    fn check_point(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(BSetError::BadPoint(i))
        }
    }

    /// The unique `x` with `b_ξ ∧ d(x, x_ξ) = 0` for all `ξ`, if any.
    pub fn mix(&self, parts: &Partition, xs: &[usize]) -> Result<Option<usize>> {
        if parts.len() != xs.len() {
            return Err(BSetError::LengthMismatch(parts.len(), xs.len()));
        }
        if parts.algebra() != self.alg.id() {
            return Err(AlgebraError::AlgebraMismatch(self.alg.id(), parts.algebra()).into());
        }
        for &x in xs {
            self.check_point(x)?;
        }
        let blocks: Vec<(u64, usize)> = parts.blocks().iter().map(|b| b.bits()).zip(xs.iter().copied()).collect();
        self.mix_raw(&blocks)
    }

    fn mix_raw(&self, blocks: &[(u64, usize)]) -> Result<Option<usize>> {
        let mut found = None;
        for x in 0..self.len() {
            if blocks.iter().all(|&(b, xi)| b & self.dm(x, xi) == 0) {
                if let Some(prev) = found {
                    return Err(BSetError::AmbiguousMixing(prev, x));
                }
                found = Some(x);
            }
        }
        Ok(found)
    }

    /// Mixing over the atom partition of `assignment[q]` at atom `q`.
    pub fn mix_atoms(&self, assignment: &[usize]) -> Result<Option<usize>> {
        let blocks: Vec<(u64, usize)> = assignment.iter().enumerate().map(|(q, &x)| (1u64 << q, x)).collect();
        self.mix_raw(&blocks)
    }

    /// All existing mixings of families drawn from `a`.
    ///
    /// Mixing is decided atom by atom, so it suffices to range over maps from atoms to `a`.
    pub fn mix_set(&self, a: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let pool: Vec<usize> = a.iter().copied().collect();
        let mut out = BTreeSet::new();
        if pool.is_empty() {
            return Ok(out);
        }
        for_each_assignment(self.alg.atom_count(), pool.len(), |digits| {
            let assignment: Vec<usize> = digits.iter().map(|&d| pool[d]).collect();
            if let Some(m) = self.mix_atoms(&assignment)? {
                out.insert(m);
            }
            Ok::<(), BSetError>(())
        })?;
        Ok(out)
    }

    /// Least mixing-closed superset of `a`.
    pub fn cyc(&self, a: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let mut cur = a.clone();
        loop {
            let next: BTreeSet<usize> = cur.union(&self.mix_set(&cur)?).copied().collect();
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    /// Every family over every partition has a mixing.
    pub fn is_universally_complete(&self) -> Result<bool> {
        let mut ok = true;
        for_each_assignment(self.alg.atom_count(), self.len(), |digits| {
            ok &= self.mix_atoms(digits)?.is_some();
            Ok::<(), BSetError>(())
        })?;
        Ok(ok && !self.is_empty())
    }

    /// `d'(f(x), f(y)) ≤ d(x, y)` for a map `f: self → target`.
    pub fn is_contractive_map(&self, target: &BSet, table: &[usize]) -> bool {
        table.len() == self.len()
            && table.iter().all(|&t| t < target.len())
            && (0..self.len()).all(|x| (0..self.len()).all(|y| target.dm(table[x], table[y]) & !self.dm(x, y) == 0))
    }

    /// `d(f(x̄), f(ȳ)) ≤ ⋁_k d(x_k, y_k)` for an `arity`-ary operation table.
    pub fn is_contractive_op(&self, arity: usize, table: &[usize]) -> bool {
        table.len() == self.len().pow(arity as u32)
            && table.iter().all(|&t| t < self.len())
            && self.all_tuple_pairs(arity, |i, j, dist| self.dm(table[i], table[j]) & !dist == 0)
    }

    /// `p(x̄) △ p(ȳ) ≤ ⋁_k d(x_k, y_k)` for an `arity`-ary predicate table.
    pub fn is_contractive_pred(&self, arity: usize, table: &[Elem]) -> bool {
        table.len() == self.len().pow(arity as u32)
            && table.iter().all(|e| self.alg.contains(*e))
            && self.all_tuple_pairs(arity, |i, j, dist| (table[i].bits() ^ table[j].bits()) & !dist == 0)
    }

    fn all_tuple_pairs(&self, arity: usize, mut ok: impl FnMut(usize, usize, u64) -> bool) -> bool {
        let n = self.len();
        let total = n.pow(arity as u32);
        for i in 0..total {
            for j in 0..total {
                let (xi, yj) = (unrank(i, n, arity), unrank(j, n, arity));
                let dist = xi.iter().zip(&yj).fold(0, |acc, (&a, &b)| acc | self.dm(a, b));
                if !ok(i, j, dist) {
                    return false;
                }
            }
        }
        true
    }

    /// Boolean-valued realization: for each point an internal set with `d(x, y) = [[ι(x) ≠ ι(y)]]`.
    ///
    /// At atom `q` the points are grouped by `x ∼_q y ⟺ q ∉ d(x, y)`; each class is coded by
    /// the natural number of its least member, and `ι(x)` mixes the names of `x`'s codes over atoms.
    pub fn realize(&self, u: &Universe, rank_budget: usize) -> Result<Vec<SetId>> {
        let alg = u.algebra();
        if alg.id() != self.alg.id() {
            return Err(AlgebraError::AlgebraMismatch(alg.id(), self.alg.id()).into());
        }
        let codes: Vec<Vec<usize>> = (0..self.len())
            .map(|x| (0..alg.atom_count()).map(|q| (0..self.len()).find(|&y| self.dm(x, y) >> q & 1 == 0).expect("x ∼_q x")).collect())
            .collect();
        let needed = codes.iter().flatten().max().map_or(0, |&m| m + 1);
        if rank_budget < needed {
            return Err(UniverseError::RankInsufficient { needed, have: rank_budget }.into());
        }
        let mut out = Vec::with_capacity(self.len());
        for per_atom in &codes {
            let names: Vec<SetId> = per_atom.iter().map(|&c| u.canonical_name(&HfSet::nat(c))).collect();
            let m = u.mix(&Partition::atoms(alg), &names)?;
            out.push(u.canonical(m)?);
        }
        Ok(out)
    }
}

/// Row-major index of an argument tuple: `a0` is the most significant digit.
pub fn table_index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

fn unrank(mut i: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for k in (0..arity).rev() {
        out[k] = i % n;
        i /= n;
    }
    out
}

fn for_each_assignment<E>(slots: usize, radix: usize, mut f: impl FnMut(&[usize]) -> std::result::Result<(), E>) -> std::result::Result<(), E> {
    if radix == 0 && slots > 0 {
        return Ok(());
    }
    let mut digits = vec![0; slots];
    loop {
        f(&digits)?;
        let mut k = 0;
        loop {
            if k == slots {
                return Ok(());
            }
            digits[k] += 1;
            if digits[k] < radix {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// A B-set with interpretations for a finite signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSystem {
    base: BSet,
    sig: Signature,
    ops: BTreeMap<String, Vec<usize>>,
    preds: BTreeMap<String, Vec<Elem>>,
}

impl BSystem {
    /// Operation tables map argument tuples (see [`table_index`]) to points; a constant
    /// is a one-entry table. Predicate tables hold algebra elements. All must be contractive.
    pub fn new(base: BSet, sig: Signature, ops: BTreeMap<String, Vec<usize>>, preds: BTreeMap<String, Vec<Elem>>) -> Result<Self> {
        let n = base.len();
        for (name, arity) in sig.functions() {
            let table = ops.get(name).ok_or_else(|| BSetError::MissingInterpretation(name.to_string()))?;
            let expected = n.pow(arity as u32);
            if table.len() != expected {
                return Err(BSetError::BadTable { symbol: name.to_string(), expected, found: table.len() });
            }
            if !base.is_contractive_op(arity, table) {
                return Err(BSetError::NotContractive(name.to_string()));
            }
        }
        for (name, arity) in sig.predicates() {
            let table = preds.get(name).ok_or_else(|| BSetError::MissingInterpretation(name.to_string()))?;
            let expected = n.pow(arity as u32);
            if table.len() != expected {
                return Err(BSetError::BadTable { symbol: name.to_string(), expected, found: table.len() });
            }
            if !base.is_contractive_pred(arity, table) {
                return Err(BSetError::NotContractive(name.to_string()));
            }
        }
        Ok(BSystem { base, sig, ops, preds })
    }

    pub fn base(&self) -> &BSet {
        &self.base
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn op(&self, name: &str, args: &[usize]) -> usize {
        self.ops[name][table_index(args, self.base.len())]
    }

    pub fn pred(&self, name: &str, args: &[usize]) -> Elem {
        self.preds[name][table_index(args, self.base.len())]
    }

    fn term(&self, t: &Term, env: &[(String, usize)], base: &BTreeMap<String, usize>) -> Result<usize> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(k, _)| k == v)
                .map(|p| p.1)
                .or_else(|| base.get(v).copied())
                .ok_or_else(|| BSetError::UnboundVariable(v.clone())),
            Term::Const(c) => Ok(self.op(c, &[])),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.term(a, env, base)).collect::<Result<Vec<_>>>()?;
                Ok(self.op(f, &vals))
            }
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>, base: &BTreeMap<String, usize>) -> Result<u64> {
        let full = self.base.alg.full_mask();
        Ok(match f {
            Formula::Eq(a, b) => !self.base.dm(self.term(a, env, base)?, self.term(b, env, base)?) & full,
            Formula::Pred(p, args) => {
                if !self.preds.contains_key(p) {
                    return Err(BSetError::MissingInterpretation(p.clone()));
                }
                let vals = args.iter().map(|a| self.term(a, env, base)).collect::<Result<Vec<_>>>()?;
                self.pred(p, &vals).bits()
            }
            Formula::Mem(..) | Formula::BoundedForall(..) | Formula::BoundedExists(..) => return Err(BSetError::MemNotInSignature),
            Formula::Not(g) => !self.eval(g, env, base)? & full,
            Formula::And(g, h) => self.eval(g, env, base)? & self.eval(h, env, base)?,
            Formula::Or(g, h) => self.eval(g, env, base)? | self.eval(h, env, base)?,
            Formula::Imp(g, h) => (!self.eval(g, env, base)? | self.eval(h, env, base)?) & full,
            Formula::CarrierForall(v, g) | Formula::CarrierExists(v, g) => {
                let universal = matches!(f, Formula::CarrierForall(..));
                let mut acc = if universal { full } else { 0 };
                for a in 0..self.base.len() {
                    env.push((v.clone(), a));
                    let r = self.eval(g, env, base);
                    env.pop();
                    acc = if universal { acc & r? } else { acc | r? };
                }
                acc
            }
        })
    }

    /// `|f|` under an assignment of points to the free variables.
    pub fn truth(&self, f: &Formula, a: &BTreeMap<String, usize>) -> Result<Elem> {
        for &p in a.values() {
            self.base.check_point(p)?;
        }
        let bits = self.eval(f, &mut Vec::new(), a)?;
        Ok(self.base.alg.zero().with_bits(bits))
    }
}

/// `|f|^S` for an algebraic B-system.
pub fn eval_bsystem(s: &BSystem, f: &Formula, a: &BTreeMap<String, usize>) -> Result<Elem> {
    s.truth(f, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HomClass {
    None,
    Hom,
    Strong,
    Iso,
}

/// Which homomorphism conditions a point map satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomReport {
    /// `d(h(a), h(b)) ≤ d(a, b)`.
    pub contractive: bool,
    /// Constants are preserved.
    pub constants: bool,
    /// Operations commute with `h`.
    pub operations: bool,
    /// `p(ā) ≤ p(h(ā))`.
    pub predicates: bool,
    pub strong: bool,
    /// Contraction and predicate conditions hold with equality.
    pub iso: bool,
}

impl HomReport {
    pub fn is_hom(&self) -> bool {
        self.contractive && self.constants && self.operations && self.predicates
    }

    pub fn class(&self) -> HomClass {
        match (self.is_hom(), self.iso, self.strong) {
            (false, _, _) => HomClass::None,
            (true, true, _) => HomClass::Iso,
            (true, false, true) => HomClass::Strong,
            (true, false, false) => HomClass::Hom,
        }
    }
}

/// Checks the homomorphism conditions for `h: S1 → S2`.
pub fn check_homomorphism(h: &[usize], s1: &BSystem, s2: &BSystem) -> Result<HomReport> {
    if s1.sig != s2.sig {
        return Err(BSetError::SignatureMismatch);
    }
    let (a, d) = (&s1.base, &s2.base);
    if a.alg.id() != d.alg.id() {
        return Err(AlgebraError::AlgebraMismatch(a.alg.id(), d.alg.id()).into());
    }
    if h.len() != a.len() {
        return Err(BSetError::LengthMismatch(h.len(), a.len()));
    }
    for &y in h {
        d.check_point(y)?;
    }
    let (na, nd) = (a.len(), d.len());
    let mut contractive = true;
    let mut metric_equal = true;
    for x in 0..na {
        for y in 0..na {
            let (image, source) = (d.dm(h[x], h[y]), a.dm(x, y));
            contractive &= image & !source == 0;
            metric_equal &= image == source;
        }
    }
    let mut constants = true;
    let mut operations = true;
    for (name, arity) in s1.sig.functions() {
        for i in 0..na.pow(arity as u32) {
            let args = unrank(i, na, arity);
            let mapped: Vec<usize> = args.iter().map(|&x| h[x]).collect();
            let same = h[s1.op(name, &args)] == s2.op(name, &mapped);
            if arity == 0 {
                constants &= same;
            } else {
                operations &= same;
            }
        }
    }
    let mut predicates = true;
    let mut preds_equal = true;
    let mut strong = true;
    for (name, arity) in s1.sig.predicates() {
        for i in 0..na.pow(arity as u32) {
            let args = unrank(i, na, arity);
            let mapped: Vec<usize> = args.iter().map(|&x| h[x]).collect();
            let (src, img) = (s1.pred(name, &args).bits(), s2.pred(name, &mapped).bits());
            predicates &= src & !img == 0;
            preds_equal &= src == img;
        }
        if arity == 0 {
            continue;
        }
        for j in 0..nd.pow(arity as u32) {
            let ds = unrank(j, nd, arity);
            let mut bound = 0;
            for i in 0..na.pow(arity as u32) {
                let args = unrank(i, na, arity);
                let mut term = s1.pred(name, &args).bits();
                for (k, &dk) in ds.iter().enumerate() {
                    term &= !d.dm(dk, h[args[k]]);
                }
                bound |= term;
            }
            strong &= s2.pred(name, &ds).bits() & !bound & d.alg.full_mask() == 0;
        }
    }
    let iso = contractive && constants && operations && predicates && metric_equal && preds_equal;
    Ok(HomReport { contractive, constants, operations, predicates, strong, iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn b4() -> BoolAlg {
        BoolAlg::new(2).unwrap()
    }

    #[test]
    fn presets() {
        let b = b4();
        let x = BSet::discrete(&b, 3);
        assert_eq!(x.d(0, 1), b.one());
        assert_eq!(x.d(2, 2), b.zero());
        let y = BSet::symmdiff(&b);
        let (p, one) = (y.index_of("{a1}").unwrap(), y.index_of("1").unwrap());
        assert_eq!(y.d(p, one), b.atom(1));
        assert!(BSet::new(&b, y.labels().to_vec(), (0..4).map(|i| (0..4).map(|j| y.d(i, j)).collect()).collect()).is_ok());
    }

    #[test]
    fn metric_axioms_enforced() {
        let b = b4();
        let labels = vec!["u".to_string(), "v".to_string()];
        let zero = vec![vec![b.zero(), b.zero()], vec![b.zero(), b.zero()]];
        assert!(matches!(BSet::new(&b, labels.clone(), zero), Err(BSetError::MetricAxiomViolation { axiom: 'a', .. })));
        let asym = vec![vec![b.zero(), b.atom(0)], vec![b.one(), b.zero()]];
        assert!(matches!(BSet::new(&b, labels.clone(), asym), Err(BSetError::MetricAxiomViolation { axiom: 'b', .. })));
        let l3: Vec<String> = ["u", "v", "w"].iter().map(|s| s.to_string()).collect();
        let (p, q, z) = (b.atom(0), b.atom(1), b.zero());
        let tri = vec![vec![z, p, p], vec![p, z, q], vec![p, q, z]];
        assert!(matches!(BSet::new(&b, l3, tri), Err(BSetError::MetricAxiomViolation { axiom: 'c', .. })));
        assert!(matches!(BSet::new(&b, labels, vec![vec![z]]), Err(BSetError::DimensionMismatch { .. })));
    }

    #[test]
    fn mixing_examples() {
        let b = b4();
        let y = BSet::symmdiff(&b);
        let idx = |s: &str| y.index_of(s).unwrap();
        let parts = Partition::new(&b, vec![b.atom(0), b.atom(1)]).unwrap();
        assert_eq!(y.mix(&parts, &[idx("0"), idx("1")]).unwrap(), Some(idx("{a2}")));
        let whole = Partition::new(&b, vec![b.one()]).unwrap();
        assert_eq!(y.mix(&whole, &[idx("{a1}")]).unwrap(), Some(idx("{a1}")));
        let x = BSet::discrete(&b, 2);
        assert_eq!(x.mix(&parts, &[0, 1]).unwrap(), None);
        assert!(matches!(x.mix(&parts, &[0]), Err(BSetError::LengthMismatch(2, 1))));
    }

    #[test]
    fn cyclic_hulls() {
        let b = b4();
        let y = BSet::symmdiff(&b);
        assert!(y.cyc(&BTreeSet::new()).unwrap().is_empty());
        assert!(y.is_universally_complete().unwrap());
        let ends: BTreeSet<usize> = [y.index_of("0").unwrap(), y.index_of("1").unwrap()].into();
        assert_eq!(y.cyc(&ends).unwrap().len(), 4);
        assert!(!BSet::discrete(&b, 2).is_universally_complete().unwrap());
    }

    #[test]
    fn contractive_tables() {
        let b = b4();
        let y = BSet::symmdiff(&b);
        let identity: Vec<usize> = (0..4).collect();
        assert!(y.is_contractive_map(&y, &identity));
        assert!(y.is_contractive_map(&y, &[2; 4]));
        let elems: Vec<Elem> = b.elements().collect();
        let alg = &b;
        let imp: Vec<Elem> = elems.iter().flat_map(|a| elems.iter().map(move |c| a.imp(*c, alg).unwrap())).collect();
        assert!(y.is_contractive_pred(2, &imp));
        // swapping p and 1 while fixing the rest expands distances
        let bad = vec![0, 3, 2, 1];
        assert!(!y.is_contractive_map(&y, &bad));
    }

    fn implication_system(b: &BoolAlg) -> BSystem {
        let y = BSet::symmdiff(b);
        let elems: Vec<Elem> = b.elements().collect();
        let imp: Vec<Elem> = elems.iter().flat_map(|a| elems.iter().map(move |c| a.imp(*c, b).unwrap())).collect();
        let meet: Vec<usize> = elems.iter().flat_map(|a| elems.iter().map(move |c| a.meet(*c).unwrap().bits() as usize)).collect();
        let sig = Signature::empty().with_predicate("le", 2).with_function("c0", 0).with_function("f", 2);
        let ops = BTreeMap::from([("c0".to_string(), vec![0]), ("f".to_string(), meet)]);
        BSystem::new(y, sig, ops, BTreeMap::from([("le".to_string(), imp)])).unwrap()
    }

    #[test]
    fn bsystem_truth_values() {
        let b = b4();
        let s = implication_system(&b);
        let sig = s.signature().clone();
        let none = BTreeMap::new();
        assert_eq!(s.truth(&parse("forall x . le(c0, x)", &sig).unwrap(), &none).unwrap(), b.one());
        assert_eq!(s.truth(&parse("f(c0, c0) = f(c0, c0)", &sig).unwrap(), &none).unwrap(), b.one());
        let a = BTreeMap::from([("x".to_string(), 1usize)]);
        assert_eq!(s.truth(&parse("x = c0", &sig).unwrap(), &a).unwrap(), b.atom(1));
        assert_eq!(s.truth(&parse("forall y . le(f(x, y), x)", &sig).unwrap(), &a).unwrap(), b.one());
        assert_eq!(s.truth(&parse("x in x", &sig).unwrap(), &a), Err(BSetError::MemNotInSignature));
        assert_eq!(s.truth(&parse("z = z", &sig).unwrap(), &a), Err(BSetError::UnboundVariable("z".into())));
    }

    #[test]
    fn non_contractive_tables_rejected() {
        let b = b4();
        let y = BSet::symmdiff(&b);
        let sig = Signature::empty().with_function("g", 1);
        let ops = BTreeMap::from([("g".to_string(), vec![0, 3, 2, 1])]);
        assert_eq!(BSystem::new(y.clone(), sig.clone(), ops, BTreeMap::new()), Err(BSetError::NotContractive("g".into())));
        assert!(matches!(BSystem::new(y, sig, BTreeMap::new(), BTreeMap::new()), Err(BSetError::MissingInterpretation(_))));
    }

    #[test]
    fn homomorphism_classes() {
        let b = b4();
        let s = implication_system(&b);
        let id: Vec<usize> = (0..4).collect();
        let r = check_homomorphism(&id, &s, &s).unwrap();
        assert!(r.is_hom() && r.strong && r.iso);
        assert_eq!(r.class(), HomClass::Iso);

        let x = BSet::discrete(&b, 2);
        let plain = |base: BSet| BSystem::new(base, Signature::empty(), BTreeMap::new(), BTreeMap::new()).unwrap();
        // two points at distance p sent to points at distance 1
        let (p, z) = (b.atom(0), b.zero());
        let near = BSet::new(&b, vec!["u".into(), "v".into()], vec![vec![z, p], vec![p, z]]).unwrap();
        let r = check_homomorphism(&[0, 1], &plain(near.clone()), &plain(x.clone())).unwrap();
        assert_eq!(r.class(), HomClass::None);
        let r = check_homomorphism(&[0, 1], &plain(x), &plain(near)).unwrap();
        assert!(r.is_hom() && !r.iso);
    }

    #[test]
    fn realization() {
        let b = b4();
        let u = Universe::new(b);
        let x = BSet::discrete(&b, 2);
        let iota = x.realize(&u, 3).unwrap();
        assert_eq!(iota[0], u.canonical_name(&HfSet::nat(0)));
        assert_eq!(iota[1], u.canonical_name(&HfSet::nat(1)));
        let y = BSet::symmdiff(&b);
        let iota = y.realize(&u, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(u.truth_eq(iota[i], iota[j]).unwrap().complement(&b).unwrap(), y.d(i, j));
            }
        }
        assert!(matches!(BSet::discrete(&b, 4).realize(&u, 2), Err(BSetError::Universe(UniverseError::RankInsufficient { .. }))));
    }
}
