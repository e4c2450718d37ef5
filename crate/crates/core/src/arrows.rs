//! Descent and ascent between a fragment of the universe and ordinary sets of its members.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::balg::{Elem, Partition};
use crate::evaluator::{assign, eval_bv, EvalError};
use crate::formula::{parse, Formula, Signature};
use crate::hf::HfSet;
use crate::universe::{SetId, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrowError {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("map is not extensional at {0} and {1}")]
    NotExtensional(SetId, SetId),
    #[error("not an internal function: functionality holds only with value {0}")]
    NotAFunction(Elem),
    #[error("fragment too small: no value found for {0}")]
    RankInsufficient(SetId),
}

pub type Result<T> = std::result::Result<T, ArrowError>;

/// A finite map between sets of universe members, given by its graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtMap {
    pub pairs: Vec<(SetId, SetId)>,
}

impl ExtMap {
    pub fn new(pairs: Vec<(SetId, SetId)>) -> Self {
        ExtMap { pairs }
    }

    pub fn get(&self, x: SetId) -> Option<SetId> {
        self.pairs.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    pub fn domain(&self) -> Vec<SetId> {
        self.pairs.iter().map(|p| p.0).collect()
    }
}

/// `x↓`: the fragment members `y` with `[[y ∈ x]] = 1`.
pub fn descent(u: &Universe, x: SetId, fragment: &[SetId]) -> Result<Vec<SetId>> {
    let mut out = Vec::new();
    for &y in fragment {
        if u.truth_mem(y, x)? == u.algebra().one() {
            out.push(y);
        }
    }
    Ok(out)
}

/// `X↑`: the function with domain `X` and constant value `1`.
pub fn ascent(u: &Universe, xs: &[SetId]) -> Result<SetId> {
    let one = u.algebra().one();
    Ok(u.make(xs.iter().map(|&x| (x, one)))?)
}

/// Fragment members that are mixings of `xs`, i.e. `⋁_{x ∈ xs} [[m = x]] = 1`.
pub fn mix_closure(u: &Universe, xs: &[SetId], fragment: &[SetId]) -> Result<Vec<SetId>> {
    let full = u.algebra().full_mask();
    let mut out = Vec::new();
    for &m in fragment {
        let mut acc = 0;
        for &x in xs {
            acc |= u.truth_eq(m, x)?.bits();
            if acc == full {
                break;
            }
        }
        if acc == full {
            out.push(m);
        }
    }
    Ok(out)
}

/// `[[x1 = x2]] ≤ [[f(x1) = f(x2)]]` for all pairs in the domain.
pub fn is_extensional(u: &Universe, f: &ExtMap) -> Result<bool> {
    Ok(non_extensional_pair(u, f)?.is_none())
}

fn non_extensional_pair(u: &Universe, f: &ExtMap) -> Result<Option<(SetId, SetId)>> {
    for (i, &(x1, y1)) in f.pairs.iter().enumerate() {
        for &(x2, y2) in &f.pairs[i + 1..] {
            if !u.truth_eq(x1, x2)?.leq(u.truth_eq(y1, y2)?).expect("same algebra") {
                return Ok(Some((x1, x2)));
            }
        }
    }
    Ok(None)
}

/// Correspondence form: `[[x1 = x2]] ≤ ⋁_{y2 ∈ Φ(x2)} [[y1 = y2]]` for every `y1 ∈ Φ(x1)`.
pub fn is_extensional_correspondence(u: &Universe, phi: &[(SetId, Vec<SetId>)]) -> Result<bool> {
    for (x1, ys1) in phi {
        for (x2, ys2) in phi {
            let e = u.truth_eq(*x1, *x2)?.bits();
            for &y1 in ys1 {
                let mut reach = 0;
                for &y2 in ys2 {
                    reach |= u.truth_eq(y1, y2)?.bits();
                }
                if e & !reach != 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Internal Kuratowski pair `{{x}, {x, y}}` with all values `1`.
pub fn internal_pair(u: &Universe, x: SetId, y: SetId) -> Result<SetId> {
    let one = u.algebra().one();
    let single = u.make([(x, one)])?;
    let double = u.make([(x, one), (y, one)])?;
    Ok(u.make([(single, one), (double, one)])?)
}

/// Right-folded tuple of internal pairs, matching [`HfSet::tuple`].
pub fn internal_tuple(u: &Universe, xs: &[SetId]) -> Result<SetId> {
    match xs {
        [] => Ok(u.empty()),
        [x] => Ok(*x),
        [x, rest @ ..] => {
            let tail = internal_tuple(u, rest)?;
            internal_pair(u, *x, tail)
        }
    }
}

/// `f↑`: the internal graph `{(x, f(x)) ↦ 1}` of an extensional map.
pub fn ascend_function(u: &Universe, f: &ExtMap) -> Result<SetId> {
    if let Some((a, b)) = non_extensional_pair(u, f)? {
        return Err(ArrowError::NotExtensional(a, b));
    }
    let one = u.algebra().one();
    let mut entries = Vec::new();
    for &(x, y) in &f.pairs {
        entries.push((internal_pair(u, x, y)?, one));
    }
    Ok(u.make(entries)?)
}

fn singleton_test(s: &str, x: &str) -> String {
    format!("((forall t_ in {s} . t_ = {x}) /\\ {x} in {s})")
}

fn doubleton_test(s: &str, x: &str, y: &str) -> String {
    format!("((forall t_ in {s} . t_ = {x} \\/ t_ = {y}) /\\ {x} in {s} /\\ {y} in {s})")
}

fn pair_test(w: &str, x: &str, y: &str) -> String {
    let single = singleton_test("s_", x);
    let double = doubleton_test("s_", x, y);
    format!("((forall s_ in {w} . {single} \\/ {double}) /\\ (exists s_ in {w} . {single}) /\\ (exists s_ in {w} . {double}))")
}

fn pair_in(x: &str, y: &str, g: &str) -> String {
    format!("(exists w_ in {g} . {})", pair_test("w_", x, y))
}

/// Bounded formula stating that `g` is a function from `dx` to `dy`.
pub fn function_formula() -> Formula {
    let text = format!(
        "(forall w in g . exists a in dx . exists b in dy . {}) /\\ (forall a in dx . exists b in dy . {}) /\\ (forall a in dx . forall b in dy . forall c in dy . {} /\\ {} -> b = c)",
        pair_test("w", "a", "b"),
        pair_in("a", "b", "g"),
        pair_in("a", "b", "g"),
        pair_in("a", "c", "g"),
    );
    parse(&text, &Signature::empty()).expect("fixed formula")
}

/// `[[g : X → Y]]`.
pub fn function_truth(u: &Universe, g: SetId, x: SetId, y: SetId) -> Result<Elem> {
    Ok(eval_bv(u, &function_formula(), &assign(&[("g", g), ("dx", x), ("dy", y)]))?)
}

/// `g↓ : X↓ → Y↓`, sending `x` to the fragment member `z` with `[[(x, z) ∈ g]] = 1`.
pub fn descend_function(u: &Universe, g: SetId, x: SetId, y: SetId, fragment: &[SetId]) -> Result<ExtMap> {
    let truth = function_truth(u, g, x, y)?;
    if truth != u.algebra().one() {
        return Err(ArrowError::NotAFunction(truth));
    }
    let targets = descent(u, y, fragment)?;
    let mut pairs = Vec::new();
    for a in descent(u, x, fragment)? {
        pairs.push((a, apply_internal(u, g, a, &targets)?));
    }
    Ok(ExtMap { pairs })
}

/// The member `z` of `candidates` with `[[(x, z) ∈ g]] = 1`.
pub fn apply_internal(u: &Universe, g: SetId, x: SetId, candidates: &[SetId]) -> Result<SetId> {
    let one = u.algebra().one();
    for &z in candidates {
        if u.truth_mem(internal_pair(u, x, z)?, g)? == one {
            return Ok(z);
        }
    }
    Err(ArrowError::RankInsufficient(x))
}

/// Modified ascent of a map from an ordinary set: `{(a^∧, f(a)) ↦ 1}`.
pub fn ascend_modified(u: &Universe, f: &[(HfSet, SetId)]) -> Result<SetId> {
    let one = u.algebra().one();
    let mut entries = Vec::new();
    for (a, y) in f {
        entries.push((internal_pair(u, u.canonical_name(a), *y)?, one));
    }
    Ok(u.make(entries)?)
}

/// Modified descent along an ordinary domain: `a ↦` the candidate `z` with `[[g(a^∧) = z]] = 1`.
pub fn descend_modified(u: &Universe, g: SetId, domain: &[HfSet], candidates: &[SetId]) -> Result<Vec<(HfSet, SetId)>> {
    domain.iter().map(|a| Ok((a.clone(), apply_internal(u, g, u.canonical_name(a), candidates)?))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPointDescent {
    pub zero: SetId,
    pub one: SetId,
    /// `χ(b)` for every `b`, in the algebra's element order.
    pub chi: Vec<(Elem, SetId)>,
    /// The descent of the internal two-element set.
    pub descended: Vec<SetId>,
    /// `[[χ(b) = 1]] = b` and `[[χ(b) = 0]] = ¬b` for all `b`.
    pub values_ok: bool,
    /// `χ` is a bijection onto the descent.
    pub bijective: bool,
    /// `χ` commutes with the operations induced pointwise on the descent.
    pub operations_ok: bool,
}

impl TwoPointDescent {
    pub fn holds(&self) -> bool {
        self.values_ok && self.bijective && self.operations_ok
    }
}

/// Descent of the internal two-point algebra `{0, 1}` and the isomorphism `χ` onto it.
///
/// `0` and `1` are the names of the codes of `𝟘` and `𝟙`, so the fragment must have
/// rank bound at least `n + 1` for `n` atoms.
pub fn descend_two_point(u: &Universe, rank_budget: usize, cap: u64) -> Result<TwoPointDescent> {
    let alg = *u.algebra();
    let n = alg.atom_count();
    if rank_budget < n + 1 {
        return Err(UniverseError::RankInsufficient { needed: n + 1, have: rank_budget }.into());
    }
    let zero = u.canonical_name(&Universe::elem_code(alg.zero()));
    let one = u.canonical_name(&Universe::elem_code(alg.one()));
    let two = ascent(u, &[zero, one])?;
    let fragment = u.enumerate(rank_budget, cap)?;
    let descended = descent(u, two, &fragment)?;

    let mut chi = Vec::new();
    let mut values_ok = true;
    for b in alg.elements() {
        let nb = b.complement(&alg).expect("same algebra");
        let parts = Partition::new(&alg, vec![b, nb]).expect("b and ¬b partition unity");
        let c = u.canonical(u.mix(&parts, &[one, zero])?)?;
        values_ok &= u.truth_eq(c, one)? == b && u.truth_eq(c, zero)? == nb;
        chi.push((b, c));
    }
    let image: BTreeSet<SetId> = chi.iter().map(|p| p.1).collect();
    let bijective = image.len() == chi.len() && image == descended.iter().copied().collect();

    // pointwise operations on the descent, read off through [[z = 1]]
    let by_value = |v: Elem| -> Option<SetId> {
        descended.iter().copied().find(|&z| u.truth_eq(z, one).map(|t| t == v).unwrap_or(false))
    };
    let mut operations_ok = bijective;
    for &(b, cb) in &chi {
        let vb = u.truth_eq(cb, one)?;
        let neg = by_value(vb.complement(&alg).expect("same algebra"));
        operations_ok &= neg == chi.iter().find(|p| p.0 == b.complement(&alg).expect("same algebra")).map(|p| p.1);
        for &(c, cc) in &chi {
            let vc = u.truth_eq(cc, one)?;
            let join = by_value(vb.join(vc).expect("same algebra"));
            let meet = by_value(vb.meet(vc).expect("same algebra"));
            let want_join = chi.iter().find(|p| p.0 == b.join(c).expect("same algebra")).map(|p| p.1);
            let want_meet = chi.iter().find(|p| p.0 == b.meet(c).expect("same algebra")).map(|p| p.1);
            operations_ok &= join == want_join && meet == want_meet;
        }
    }
    Ok(TwoPointDescent { zero, one, chi, descended, values_ok, bijective, operations_ok })
}
