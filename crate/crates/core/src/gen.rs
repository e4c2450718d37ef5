//! Seeded random generators for formulas, sets, B-sets and posets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balg::{BoolAlg, Elem, Partition};
use crate::bsets::{BSet, BSystem};
use crate::formula::{Formula, Signature, Term};
use crate::hf::HfSet;
use crate::posets::FinPoset;
use crate::universe::{SetId, Universe};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A restricted formula of depth at most `depth` whose free variables lie in `free`.
///
/// Bound variables are named `u0, u1, ..` by nesting level.
pub fn restricted_formula<R: Rng>(rng: &mut R, depth: usize, free: &[&str]) -> Formula {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    restricted_in(rng, depth, &mut scope, 0)
}

fn restricted_in<R: Rng>(rng: &mut R, depth: usize, scope: &mut Vec<String>, bound: usize) -> Formula {
    let pick = |rng: &mut R, scope: &[String]| scope.choose(rng).expect("nonempty scope").clone();
    if depth == 0 || scope.is_empty() || rng.gen_bool(0.2) {
        let (a, b) = (pick(rng, scope), pick(rng, scope));
        return if rng.gen_bool(0.5) { Formula::mem(&a, &b) } else { Formula::eq(&a, &b) };
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(restricted_in(rng, depth - 1, scope, bound)),
        1 => Formula::and(restricted_in(rng, depth - 1, scope, bound), restricted_in(rng, depth - 1, scope, bound)),
        2 => Formula::or(restricted_in(rng, depth - 1, scope, bound), restricted_in(rng, depth - 1, scope, bound)),
        3 => Formula::imp(restricted_in(rng, depth - 1, scope, bound), restricted_in(rng, depth - 1, scope, bound)),
        k => {
            let over = pick(rng, scope);
            let v = format!("u{bound}");
            scope.push(v.clone());
            let body = restricted_in(rng, depth - 1, scope, bound + 1);
            scope.pop();
            if k == 4 {
                Formula::forall_in(&v, &over, body)
            } else {
                Formula::exists_in(&v, &over, body)
            }
        }
    }
}

/// A membership-free formula over `sig` with carrier quantifiers, depth at most `depth`.
pub fn signature_formula<R: Rng>(rng: &mut R, depth: usize, free: &[&str], sig: &Signature) -> Formula {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    signature_in(rng, depth, &mut scope, 0, sig)
}

fn random_term<R: Rng>(rng: &mut R, scope: &[String], sig: &Signature, depth: usize) -> Term {
    let funcs: Vec<(&str, usize)> = sig.functions().collect();
    let usable: Vec<(&str, usize)> = funcs.iter().copied().filter(|&(_, a)| a == 0 || depth > 0).collect();
    if !usable.is_empty() && (scope.is_empty() || rng.gen_bool(0.3)) {
        let (name, arity) = *usable.choose(rng).expect("nonempty");
        if arity == 0 {
            return Term::Const(name.to_string());
        }
        return Term::App(name.to_string(), (0..arity).map(|_| random_term(rng, scope, sig, depth - 1)).collect());
    }
    Term::Var(scope.choose(rng).expect("a variable or a constant is available").clone())
}

fn signature_atom<R: Rng>(rng: &mut R, scope: &[String], sig: &Signature) -> Formula {
    let preds: Vec<(&str, usize)> = sig.predicates().collect();
    if !preds.is_empty() && rng.gen_bool(0.6) {
        let (name, arity) = *preds.choose(rng).expect("nonempty");
        return Formula::Pred(name.to_string(), (0..arity).map(|_| random_term(rng, scope, sig, 1)).collect());
    }
    Formula::Eq(random_term(rng, scope, sig, 1), random_term(rng, scope, sig, 1))
}

fn signature_in<R: Rng>(rng: &mut R, depth: usize, scope: &mut Vec<String>, bound: usize, sig: &Signature) -> Formula {
    let has_terms = !scope.is_empty() || sig.functions().any(|(_, a)| a == 0);
    if has_terms && (depth == 0 || rng.gen_bool(0.2)) {
        return signature_atom(rng, scope, sig);
    }
    if depth == 0 {
        // no terms available: quantify first
        let v = format!("u{bound}");
        scope.push(v.clone());
        let body = signature_atom(rng, scope, sig);
        scope.pop();
        return Formula::exists(&v, body);
    }
    match rng.gen_range(if has_terms { 0 } else { 4 }..6) {
        0 => Formula::not(signature_in(rng, depth - 1, scope, bound, sig)),
        1 => Formula::and(signature_in(rng, depth - 1, scope, bound, sig), signature_in(rng, depth - 1, scope, bound, sig)),
        2 => Formula::or(signature_in(rng, depth - 1, scope, bound, sig), signature_in(rng, depth - 1, scope, bound, sig)),
        3 => Formula::imp(signature_in(rng, depth - 1, scope, bound, sig), signature_in(rng, depth - 1, scope, bound, sig)),
        k => {
            let v = format!("u{bound}");
            scope.push(v.clone());
            let body = signature_in(rng, depth - 1, scope, bound + 1, sig);
            scope.pop();
            if k == 4 {
                Formula::forall(&v, body)
            } else {
                Formula::exists(&v, body)
            }
        }
    }
}

/// A hereditarily finite set of rank at most `max_rank`; uniform when `max_rank ≤ 3`.
pub fn hf_set<R: Rng>(rng: &mut R, max_rank: usize) -> HfSet {
    if max_rank <= 3 {
        return HfSet::stage(max_rank + 1).choose(rng).expect("stage is nonempty").clone();
    }
    let count = rng.gen_range(0..=3);
    HfSet::from_members((0..count).map(|_| hf_set(rng, max_rank - 1)))
}

/// A random element of the algebra.
pub fn elem<R: Rng>(rng: &mut R, alg: &BoolAlg) -> Elem {
    alg.elem(rng.gen_range(0..=alg.full_mask())).expect("mask within algebra")
}

/// A random partition of unity with at most `max_blocks` nonzero blocks.
pub fn partition<R: Rng>(rng: &mut R, alg: &BoolAlg, max_blocks: usize) -> Partition {
    let k = max_blocks.max(1);
    let mut masks = vec![0u64; k];
    for q in 0..alg.atom_count() {
        masks[rng.gen_range(0..k)] |= 1 << q;
    }
    let blocks = masks.into_iter().filter(|&m| m != 0).map(|m| alg.elem(m).expect("mask")).collect();
    Partition::new(alg, blocks).expect("atom assignment is a partition")
}

/// An arbitrary name of rank at most `max_rank`: unnormalized, with repeats and zero values.
pub fn bv_name<R: Rng>(rng: &mut R, u: &Universe, max_rank: usize) -> SetId {
    if max_rank == 0 {
        return u.empty();
    }
    let count = rng.gen_range(0..=3);
    let entries: Vec<(SetId, Elem)> = (0..count).map(|_| (bv_name(rng, u, max_rank - 1), elem(rng, u.algebra()))).collect();
    u.make(entries).expect("entries built in this universe")
}

/// A B-set on `k` points whose metric comes from one random equivalence per atom.
///
/// Distinct points are always separated by some atom, so `d(x, y) = 0` only when `x = y`.
pub fn bset<R: Rng>(rng: &mut R, alg: &BoolAlg, k: usize) -> BSet {
    assert!(k <= 1 || alg.atom_count() > 0, "distinct points need an atom to separate them");
    loop {
        let classes: Vec<Vec<usize>> = (0..alg.atom_count()).map(|_| (0..k).map(|_| rng.gen_range(0..k.max(1))).collect()).collect();
        let metric: Vec<Vec<Elem>> = (0..k)
            .map(|x| {
                (0..k)
                    .map(|y| alg.from_atoms((0..alg.atom_count()).filter(|&q| classes[q][x] != classes[q][y])).expect("atoms in range"))
                    .collect()
            })
            .collect();
        let separated = (0..k).all(|x| (0..k).all(|y| x == y || !metric[x][y].is_zero()));
        if separated {
            let labels = (1..=k).map(|i| format!("x{i}")).collect();
            return BSet::new(alg, labels, metric).expect("pseudometric from equivalences");
        }
    }
}

/// A signature with one constant, one unary operation and predicates of arity 1 and 2.
pub fn small_signature() -> Signature {
    Signature::empty().with_function("c", 0).with_function("f", 1).with_predicate("p", 1).with_predicate("r", 2)
}

/// A discrete B-system on `k` points with classical random tables for `sig`.
pub fn classical_system<R: Rng>(rng: &mut R, alg: &BoolAlg, k: usize, sig: &Signature) -> BSystem {
    let mut ops = BTreeMap::new();
    for (name, arity) in sig.functions() {
        ops.insert(name.to_string(), (0..k.pow(arity as u32)).map(|_| rng.gen_range(0..k)).collect());
    }
    let mut preds = BTreeMap::new();
    for (name, arity) in sig.predicates() {
        let table = (0..k.pow(arity as u32)).map(|_| if rng.gen_bool(0.5) { alg.one() } else { alg.zero() }).collect();
        preds.insert(name.to_string(), table);
    }
    BSystem::new(BSet::discrete(alg, k), sig.clone(), ops, preds).expect("discrete tables are contractive")
}

/// A random poset with `n` elements, bottom included.
pub fn poset<R: Rng>(rng: &mut R, n: usize) -> FinPoset {
    let density = rng.gen_range(0.1..0.7);
    FinPoset::random(rng, n, density)
}

/// Every poset with bottom on exactly `size` elements, one per isomorphism class.
pub fn posets_up_to_iso(size: usize) -> Vec<FinPoset> {
    if size == 0 {
        return Vec::new();
    }
    // strict down-sets over the elements above the bottom
    let mut classes: BTreeSet<Vec<u32>> = BTreeSet::from([Vec::new()]);
    for k in 0..size - 1 {
        let mut next = BTreeSet::new();
        for below in &classes {
            for ideal in 0u32..1 << k {
                let closed = (0..k).filter(|&i| ideal >> i & 1 == 1).all(|i| below[i] & !ideal == 0);
                if closed {
                    let mut p = below.clone();
                    p.push(ideal);
                    next.insert(canonical_form(&p));
                }
            }
        }
        classes = next;
    }
    classes
        .into_iter()
        .map(|below| {
            let labels = std::iter::once("0".to_string()).chain((1..size).map(|i| format!("p{i}"))).collect();
            FinPoset::new(labels, |i, j| i == 0 || i == j || (i > 0 && j > 0 && below[j - 1] >> (i - 1) & 1 == 1)).expect("ideals give an order")
        })
        .collect()
}

fn canonical_form(below: &[u32]) -> Vec<u32> {
    let k = below.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<Vec<u32>> = None;
    loop {
        // element i is renamed perm[i]
        let mut relabeled = vec![0u32; k];
        for i in 0..k {
            relabeled[perm[i]] = (0..k).filter(|&j| below[i] >> j & 1 == 1).fold(0, |acc, j| acc | 1 << perm[j]);
        }
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            best = Some(relabeled);
        }
        if !next_permutation(&mut perm) {
            return best.unwrap_or_default();
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_counts_up_to_iso() {
        let counts: Vec<usize> = (1..=6).map(|n| posets_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn formulas_respect_depth_and_scope() {
        let mut r = rng(3);
        for _ in 0..200 {
            let f = restricted_formula(&mut r, 4, &["x", "y"]);
            assert!(f.depth() <= 4);
            assert!(f.is_restricted());
            assert!(f.free_vars().iter().all(|v| v == "x" || v == "y"));
        }
        let sig = small_signature();
        for _ in 0..200 {
            let f = signature_formula(&mut r, 3, &[], &sig);
            assert!(f.is_membership_free());
            assert!(f.free_vars().is_empty());
        }
    }

    #[test]
    fn random_bsets_are_separated() {
        let alg = BoolAlg::new(2).unwrap();
        let mut r = rng(1);
        for _ in 0..20 {
            let b = bset(&mut r, &alg, 4);
            for x in 0..4 {
                for y in 0..4 {
                    assert_eq!(b.d(x, y).is_zero(), x == y);
                }
            }
        }
    }

    #[test]
    fn hf_sets_respect_rank() {
        let mut r = rng(2);
        for rank in 0..6 {
            for _ in 0..20 {
                assert!(hf_set(&mut r, rank).rank() <= rank);
            }
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = restricted_formula(&mut rng(9), 4, &["x"]);
        let b = restricted_formula(&mut rng(9), 4, &["x"]);
        assert_eq!(a, b);
    }
}
