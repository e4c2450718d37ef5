//! Bounded-rank Boolean-valued sets.
//!
//! A [`Universe`] interns B-valued sets over one finite algebra. A set is a
//! finite function from previously built sets to algebra elements, so the
//! store is acyclic by construction. Truth values of `x = y` and `x ∈ y` are
//! computed by the usual mutual recursion and memoized per id pair.
//!
//! All methods take `&self`; the store and caches sit behind read-write locks
//! and are write-once per key, so a universe can be shared between threads.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::balg::{AlgebraError, BoolAlg, Elem, Hom, HomSpec, Partition};
use crate::hf::HfSet;

/// Default rank bound for fragment enumeration.
pub const DEFAULT_RANK: usize = 3;
/// Default cap on the number of fragment elements.
pub const DEFAULT_CAP: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("set {0} belongs to a different universe")]
    ForeignSet(SetId),
    #[error("length mismatch: {0} partition blocks but {1} sets")]
    LengthMismatch(usize, usize),
    #[error("not an automorphism")]
    NotAutomorphism,
    #[error("enumeration would produce {count} sets, over the cap of {cap}")]
    CapExceeded { count: u64, cap: u64 },
    #[error("no decomposition found below rank {0}")]
    SearchExhausted(usize),
    #[error("rank budget {have} is below the required {needed}")]
    RankInsufficient { needed: usize, have: usize },
}

pub type Result<T> = std::result::Result<T, UniverseError>;

static NEXT_UNIVERSE_TAG: std::sync::atomic::AtomicU32 = std::sync::atomic::AtomicU32::new(1);

/// Handle to an interned B-valued set. Only meaningful for the universe that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetId {
    tag: u32,
    idx: u32,
}

impl SetId {
    pub fn index(&self) -> u32 {
        self.idx
    }
}

impl std::fmt::Display for SetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s{}", self.idx)
    }
}

impl Serialize for SetId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

type Entries = Arc<[(u32, u64)]>;

struct Node {
    entries: Entries,
    rank: u32,
}

#[derive(Default)]
struct Store {
    nodes: Vec<Node>,
    index: HashMap<Entries, u32>,
}

pub struct Universe {
    tag: u32,
    alg: BoolAlg,
    full: u64,
    store: RwLock<Store>,
    eq_cache: RwLock<HashMap<(u32, u32), u64>>,
    mem_cache: RwLock<HashMap<(u32, u32), u64>>,
    names: RwLock<HashMap<HfSet, u32>>,
    collapses: RwLock<HashMap<(u32, usize), HfSet>>,
    canon: RwLock<HashMap<u32, u32>>,
    two: OnceLock<Box<Universe>>,
}

impl std::fmt::Debug for Universe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Universe").field("atoms", &self.alg.atom_count()).field("sets", &self.len()).finish()
    }
}

impl Universe {
    pub fn new(alg: BoolAlg) -> Self {
        let u = Universe {
            tag: NEXT_UNIVERSE_TAG.fetch_add(1, std::sync::atomic::Ordering::Relaxed),
            full: alg.full_mask(),
            alg,
            store: RwLock::new(Store::default()),
            eq_cache: RwLock::default(),
            mem_cache: RwLock::default(),
            names: RwLock::default(),
            collapses: RwLock::default(),
            canon: RwLock::default(),
            two: OnceLock::new(),
        };
        // index 0 is always the empty function
        u.intern(Vec::new());
        u
    }

    pub fn algebra(&self) -> &BoolAlg {
        &self.alg
    }

    /// Number of interned sets.
    pub fn len(&self) -> usize {
        self.store.read().nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn id(&self, idx: u32) -> SetId {
        SetId { tag: self.tag, idx }
    }

    fn own(&self, x: SetId) -> Result<u32> {
        if x.tag == self.tag {
            Ok(x.idx)
        } else {
            Err(UniverseError::ForeignSet(x))
        }
    }

    fn elem(&self, bits: u64) -> Elem {
        self.alg.zero().with_bits(bits)
    }

    fn bits(&self, e: Elem) -> Result<u64> {
        self.alg.check(e)?;
        Ok(e.bits())
    }

    /// Interns a raw function. Duplicate children are joined; zero values are kept.
    fn intern(&self, mut entries: Vec<(u32, u64)>) -> u32 {
        entries.sort_unstable_by_key(|e| e.0);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 |= b.1;
                true
            } else {
                false
            }
        });
        let key: Entries = entries.into();
        if let Some(&i) = self.store.read().index.get(&key) {
            return i;
        }
        let mut store = self.store.write();
        if let Some(&i) = store.index.get(&key) {
            return i;
        }
        let rank = key.iter().map(|&(c, _)| store.nodes[c as usize].rank + 1).max().unwrap_or(0);
        let i = store.nodes.len() as u32;
        store.nodes.push(Node { entries: key.clone(), rank });
        store.index.insert(key, i);
        i
    }

    fn entries_of(&self, x: u32) -> Entries {
        self.store.read().nodes[x as usize].entries.clone()
    }

    fn rank_of(&self, x: u32) -> u32 {
        self.store.read().nodes[x as usize].rank
    }

    /// The empty function, the internal `∅`.
    pub fn empty(&self) -> SetId {
        self.id(0)
    }

    /// Builds the set `{child ↦ value}`. Repeated children have their values joined.
    pub fn make<I: IntoIterator<Item = (SetId, Elem)>>(&self, entries: I) -> Result<SetId> {
        let mut raw = Vec::new();
        for (c, v) in entries {
            raw.push((self.own(c)?, self.bits(v)?));
        }
        Ok(self.id(self.intern(raw)))
    }

    pub fn entries(&self, x: SetId) -> Result<Vec<(SetId, Elem)>> {
        let x = self.own(x)?;
        Ok(self.entries_of(x).iter().map(|&(c, v)| (self.id(c), self.elem(v))).collect())
    }

    /// `dom(x)`.
    pub fn domain(&self, x: SetId) -> Result<Vec<SetId>> {
        let x = self.own(x)?;
        Ok(self.entries_of(x).iter().map(|&(c, _)| self.id(c)).collect())
    }

    /// `x(t)`, zero when `t ∉ dom(x)`.
    pub fn value_at(&self, x: SetId, t: SetId) -> Result<Elem> {
        let (x, t) = (self.own(x)?, self.own(t)?);
        let bits = self.entries_of(x).iter().find(|e| e.0 == t).map_or(0, |e| e.1);
        Ok(self.elem(bits))
    }

    pub fn rank(&self, x: SetId) -> Result<usize> {
        Ok(self.rank_of(self.own(x)?) as usize)
    }

    // ---- truth values -------------------------------------------------

    pub(crate) fn eq_bits(&self, x: u32, y: u32) -> u64 {
        if x == y {
            return self.full;
        }
        let key = if x < y { (x, y) } else { (y, x) };
        if let Some(&v) = self.eq_cache.read().get(&key) {
            return v;
        }
        let (ex, ey) = (self.entries_of(x), self.entries_of(y));
        let mut acc = self.full;
        for (from, into) in [(&ex, y), (&ey, x)] {
            for &(z, v) in from.iter() {
                if acc == 0 {
                    break;
                }
                if v & acc == 0 {
                    continue;
                }
                acc &= !v | self.mem_bits(z, into);
            }
        }
        acc &= self.full;
        self.eq_cache.write().insert(key, acc);
        acc
    }

    pub(crate) fn mem_bits(&self, x: u32, y: u32) -> u64 {
        if let Some(&v) = self.mem_cache.read().get(&(x, y)) {
            return v;
        }
        let mut acc = 0;
        for &(z, v) in self.entries_of(y).iter() {
            if v & !acc == 0 {
                continue;
            }
            acc |= v & self.eq_bits(z, x);
            if acc == self.full {
                break;
            }
        }
        self.mem_cache.write().insert((x, y), acc);
        acc
    }

    /// `[[x = y]]`.
    pub fn truth_eq(&self, x: SetId, y: SetId) -> Result<Elem> {
        Ok(self.elem(self.eq_bits(self.own(x)?, self.own(y)?)))
    }

    /// `[[x ∈ y]]`.
    pub fn truth_mem(&self, x: SetId, y: SetId) -> Result<Elem> {
        Ok(self.elem(self.mem_bits(self.own(x)?, self.own(y)?)))
    }

    /// `[[x = y]] = 1`.
    pub fn same(&self, x: SetId, y: SetId) -> Result<bool> {
        Ok(self.eq_bits(self.own(x)?, self.own(y)?) == self.full)
    }

    // ---- names and codes ----------------------------------------------

    /// The standard name `h^∧`.
    pub fn canonical_name(&self, h: &HfSet) -> SetId {
        self.id(self.name_idx(h))
    }

    fn name_idx(&self, h: &HfSet) -> u32 {
        if let Some(&i) = self.names.read().get(h) {
            return i;
        }
        let entries: Vec<(u32, u64)> = h.members().map(|m| (self.name_idx(m), self.full)).collect();
        let i = self.intern(entries);
        self.names.write().insert(h.clone(), i);
        i
    }

    /// HF code of an algebra element: the set of its atom indices as von Neumann naturals.
    pub fn elem_code(b: Elem) -> HfSet {
        HfSet::from_members(b.atom_indices().map(HfSet::nat))
    }

    // ---- separation ---------------------------------------------------

    /// Total structural order: rank, then entry count, then entries lexicographically.
    pub fn structural_cmp(&self, x: SetId, y: SetId) -> Result<Ordering> {
        Ok(self.scmp(self.own(x)?, self.own(y)?))
    }

    fn scmp(&self, x: u32, y: u32) -> Ordering {
        if x == y {
            return Ordering::Equal;
        }
        let (rx, ry) = (self.rank_of(x), self.rank_of(y));
        let (ex, ey) = (self.sorted_entries(x), self.sorted_entries(y));
        rx.cmp(&ry).then(ex.len().cmp(&ey.len())).then_with(|| {
            for (a, b) in ex.iter().zip(ey.iter()) {
                let o = self.scmp(a.0, b.0).then(a.1.cmp(&b.1));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }

    fn sorted_entries(&self, x: u32) -> Vec<(u32, u64)> {
        let mut e = self.entries_of(x).to_vec();
        e.sort_by(|a, b| self.scmp(a.0, b.0));
        e
    }

    /// Entries in structural order of their children.
    pub fn ordered_entries(&self, x: SetId) -> Result<Vec<(SetId, Elem)>> {
        let x = self.own(x)?;
        Ok(self.sorted_entries(x).into_iter().map(|(c, v)| (self.id(c), self.elem(v))).collect())
    }

    /// Separated form: children normalized, zero entries dropped, and children
    /// with `[[z1 = z2]] = 1` merged into the structurally least one with joined values.
    pub fn normalize(&self, x: SetId) -> Result<SetId> {
        Ok(self.id(self.normalize_idx(self.own(x)?)))
    }

    fn normalize_idx(&self, x: u32) -> u32 {
        let mut kids: Vec<(u32, u64)> = self
            .entries_of(x)
            .iter()
            .filter(|e| e.1 != 0)
            .map(|&(c, v)| (self.normalize_idx(c), v))
            .collect();
        kids.sort_by(|a, b| self.scmp(a.0, b.0));
        let mut reps: Vec<(u32, u64)> = Vec::with_capacity(kids.len());
        for (c, v) in kids {
            match reps.iter_mut().find(|r| self.eq_bits(r.0, c) == self.full) {
                Some(r) => r.1 |= v,
                None => reps.push((c, v)),
            }
        }
        self.intern(reps)
    }

    /// True if `x` has no zero entries, no two children equal with value `1`,
    /// and all children normalized.
    pub fn is_normalized(&self, x: SetId) -> Result<bool> {
        let x = self.own(x)?;
        Ok(self.normalize_idx(x) == x)
    }

    /// Class representative built from the fiber collapses:
    /// `{h^∧ ↦ ⋁{q : h ∈ collapse_q(x)}}`. Two sets are truth-equal iff their
    /// canonical forms coincide, and the canonical form never has larger rank.
    pub fn canonical(&self, x: SetId) -> Result<SetId> {
        Ok(self.id(self.canonical_idx(self.own(x)?)))
    }

    fn canonical_idx(&self, x: u32) -> u32 {
        if let Some(&c) = self.canon.read().get(&x) {
            return c;
        }
        let mut by_member: BTreeMap<HfSet, u64> = BTreeMap::new();
        for q in 0..self.alg.atom_count() {
            for m in self.collapse_direct(q, x).members() {
                *by_member.entry(m.clone()).or_insert(0) |= 1 << q;
            }
        }
        let entries = by_member.iter().map(|(h, &bits)| (self.name_idx(h), bits)).collect();
        let c = self.intern(entries);
        self.canon.write().insert(x, c);
        c
    }

    // ---- algebraic constructions --------------------------------------

    /// `b·x`: same domain, values `b ∧ x(t)`.
    pub fn scale(&self, b: Elem, x: SetId) -> Result<SetId> {
        let b = self.bits(b)?;
        let x = self.own(x)?;
        let entries = self.entries_of(x).iter().map(|&(c, v)| (c, v & b)).collect();
        Ok(self.id(self.intern(entries)))
    }

    /// Mixing `mix(b_ξ x_ξ)` built as `t ↦ ⋁_ξ b_ξ ∧ x_ξ(t)` over the union of domains.
    pub fn mix(&self, parts: &Partition, xs: &[SetId]) -> Result<SetId> {
        if parts.len() != xs.len() {
            return Err(UniverseError::LengthMismatch(parts.len(), xs.len()));
        }
        if parts.algebra() != self.alg.id() {
            return Err(AlgebraError::AlgebraMismatch(self.alg.id(), parts.algebra()).into());
        }
        let mut entries = Vec::new();
        for (b, &x) in parts.blocks().iter().zip(xs) {
            let x = self.own(x)?;
            entries.extend(self.entries_of(x).iter().map(|&(c, v)| (c, v & b.bits())));
        }
        Ok(self.id(self.intern(entries)))
    }

    /// `ψ_ρ = {(b^∧, ρ(b)) | b ∈ B}` with `b` coded by [`Universe::elem_code`].
    pub fn psi_rho(&self, rho: &Hom) -> Result<SetId> {
        if !rho.is_automorphism() || rho.source().id() != self.alg.id() {
            return Err(UniverseError::NotAutomorphism);
        }
        let mut entries = Vec::new();
        for b in self.alg.elements() {
            let name = self.name_idx(&Self::elem_code(b));
            entries.push((name, rho.apply(b)?.bits()));
        }
        Ok(self.id(self.intern(entries)))
    }

    /// `π*x` in the universe over π's target algebra.
    pub fn pi_star(&self, pi: &Hom, x: SetId, target: &Universe) -> Result<SetId> {
        if pi.source().id() != self.alg.id() {
            return Err(AlgebraError::AlgebraMismatch(self.alg.id(), pi.source().id()).into());
        }
        if pi.target().id() != target.alg.id() {
            return Err(AlgebraError::AlgebraMismatch(target.alg.id(), pi.target().id()).into());
        }
        let mut memo = HashMap::new();
        Ok(target.id(self.pi_star_idx(pi, self.own(x)?, target, &mut memo)))
    }

    fn pi_star_idx(&self, pi: &Hom, x: u32, target: &Universe, memo: &mut HashMap<u32, u32>) -> u32 {
        if let Some(&t) = memo.get(&x) {
            return t;
        }
        let entries = self
            .entries_of(x)
            .iter()
            .map(|&(c, v)| (self.pi_star_idx(pi, c, target, memo), pi.apply_mask(v)))
            .collect();
        let t = target.intern(entries);
        memo.insert(x, t);
        t
    }

    fn two_universe(&self) -> &Universe {
        self.two.get_or_init(|| Box::new(Universe::new(BoolAlg::two())))
    }

    /// Collapse at atom `q`: apply π* for the projection onto `2` at `q`, then read
    /// the resulting two-valued set as an ordinary set (members with value `1`).
    pub fn collapse_at_atom(&self, q: usize, x: SetId) -> Result<HfSet> {
        let x = self.own(x)?;
        if q >= self.alg.atom_count() {
            return Err(AlgebraError::BadSpec(format!("no atom a{}", q + 1)).into());
        }
        Ok(self.collapse_direct(q, x))
    }

    /// Reads a set over the two-point algebra as an ordinary set.
    pub fn read_two_valued(&self, x: SetId) -> Result<HfSet> {
        if self.alg.atom_count() != 1 {
            return Err(AlgebraError::BadSpec("not a two-valued universe".into()).into());
        }
        let x = self.own(x)?;
        Ok(self.read_two_idx(x))
    }

    fn read_two_idx(&self, x: u32) -> HfSet {
        HfSet::from_members(self.entries_of(x).iter().filter(|e| e.1 & 1 == 1).map(|e| self.read_two_idx(e.0)))
    }

    fn collapse_direct(&self, q: usize, x: u32) -> HfSet {
        if let Some(h) = self.collapses.read().get(&(x, q)) {
            return h.clone();
        }
        let two = self.two_universe();
        let proj = Hom::new(&self.alg, two.algebra(), HomSpec::Projection(q)).expect("atom in range");
        let mut memo = HashMap::new();
        let image = self.pi_star_idx(&proj, x, two, &mut memo);
        let h = two.read_two_idx(image);
        self.collapses.write().insert((x, q), h.clone());
        h
    }

    /// Enumerates the separated fragment `V_r`: one canonical representative for
    /// each class of sets of rank `< rank_bound`, ordered by the per-atom tuple of
    /// collapses (atom `a1` varies fastest).
    pub fn enumerate(&self, rank_bound: usize, cap: u64) -> Result<Vec<SetId>> {
        if rank_bound == 0 {
            return Ok(Vec::new());
        }
        let count = fragment_size(rank_bound, self.alg.atom_count());
        if count > cap {
            return Err(UniverseError::CapExceeded { count, cap });
        }
        let stage = HfSet::stage(rank_bound - 1);
        let member_names: Vec<u32> = stage.iter().map(|h| self.name_idx(h)).collect();
        let candidates = HfSet::stage(rank_bound);
        // membership table: candidates[i] contains stage[j]
        let contains: Vec<Vec<usize>> = candidates
            .iter()
            .map(|c| stage.iter().enumerate().filter(|(_, m)| c.contains(m)).map(|(j, _)| j).collect())
            .collect();
        let n = self.alg.atom_count();
        let mut digits = vec![0usize; n];
        let mut out = Vec::with_capacity(count as usize);
        loop {
            let mut bits = vec![0u64; stage.len()];
            for (q, &d) in digits.iter().enumerate() {
                for &j in &contains[d] {
                    bits[j] |= 1 << q;
                }
            }
            let entries = bits.iter().enumerate().filter(|(_, &b)| b != 0).map(|(j, &b)| (member_names[j], b)).collect();
            out.push(self.id(self.intern(entries)));
            // odometer, atom 0 fastest
            let mut q = 0;
            loop {
                if q == n {
                    return Ok(out);
                }
                digits[q] += 1;
                if digits[q] < candidates.len() {
                    break;
                }
                digits[q] = 0;
                q += 1;
            }
        }
    }

    /// JSON dump: `{"root": id, "sets": {id: {child-id: [atoms]}}}` over the hereditary closure.
    pub fn dump(&self, x: SetId) -> Result<Value> {
        let root = self.own(x)?;
        let mut sets = BTreeMap::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if sets.contains_key(&i) {
                continue;
            }
            let mut m = serde_json::Map::new();
            for (c, v) in self.sorted_entries(i) {
                m.insert(self.id(c).to_string(), serde_json::to_value(self.elem(v)).expect("elem"));
                stack.push(c);
            }
            sets.insert(i, Value::Object(m));
        }
        let table: serde_json::Map<String, Value> = sets.into_iter().map(|(i, v)| (self.id(i).to_string(), v)).collect();
        Ok(json!({ "root": self.id(root).to_string(), "sets": table }))
    }

    /// Human-readable form, e.g. `{s0: {a1}, s2: 1}`.
    pub fn render(&self, x: SetId) -> Result<String> {
        let parts: Vec<String> = self
            .ordered_entries(x)?
            .into_iter()
            .map(|(c, v)| format!("{c}: {}", v.literal(&self.alg)))
            .collect();
        Ok(format!("{{{}}}", parts.join(", ")))
    }
}

/// Number of sets of rank `< rank_bound` per atom, raised to the atom count; saturates at `u64::MAX`.
pub fn fragment_size(rank_bound: usize, atoms: usize) -> u64 {
    if rank_bound == 0 {
        return 0;
    }
    // number of HF sets of rank < rank_bound
    let mut s: u64 = 0;
    for _ in 0..rank_bound {
        s = if s >= 64 { u64::MAX } else { 1u64 << s };
    }
    let mut count: u64 = 1;
    for _ in 0..atoms {
        count = count.saturating_mul(s);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fx {
        b: BoolAlg,
        u: Universe,
        p: Elem,
        q: Elem,
    }

    fn fx() -> Fx {
        let b = BoolAlg::new(2).unwrap();
        let p = b.atom(0);
        let q = b.atom(1);
        Fx { u: Universe::new(b), b, p, q }
    }

    fn hf(s: &str) -> HfSet {
        HfSet::parse(s).unwrap()
    }

    #[test]
    fn names() {
        let f = fx();
        let e = f.u.canonical_name(&HfSet::empty());
        assert_eq!(e, f.u.empty());
        let one = f.u.canonical_name(&hf("{{}}"));
        assert_eq!(f.u.entries(one).unwrap(), vec![(e, f.b.one())]);
    }

    #[test]
    fn worked_truth_values() {
        let f = fx();
        let e = f.u.empty();
        assert_eq!(f.u.truth_eq(e, e).unwrap(), f.b.one());
        let y = f.u.make([(e, f.p)]).unwrap();
        assert_eq!(f.u.truth_mem(e, y).unwrap(), f.p);
        assert_eq!(f.u.truth_eq(y, e).unwrap(), f.q);
    }

    #[test]
    fn normalize_examples() {
        let f = fx();
        let e = f.u.empty();
        let vanishing = f.u.make([(e, f.b.zero())]).unwrap();
        assert_ne!(vanishing, e);
        assert_eq!(f.u.normalize(vanishing).unwrap(), e);
        let y = f.u.make([(e, f.p)]).unwrap();
        assert_eq!(f.u.normalize(y).unwrap(), y);
        // two truth-equal children merge: ∅ and the vanishing function
        let x = f.u.make([(e, f.p), (vanishing, f.q)]).unwrap();
        let n = f.u.normalize(x).unwrap();
        assert_eq!(f.u.entries(n).unwrap(), vec![(e, f.b.one())]);
        assert!(f.u.same(x, n).unwrap());
    }

    #[test]
    fn scale_examples() {
        let f = fx();
        let e = f.u.empty();
        let y = f.u.make([(e, f.p)]).unwrap();
        assert!(f.u.same(f.u.scale(f.b.one(), y).unwrap(), y).unwrap());
        assert!(f.u.same(f.u.scale(f.b.zero(), y).unwrap(), e).unwrap());
        let scaled = f.u.scale(f.q, y).unwrap();
        assert!(f.u.truth_mem(e, scaled).unwrap().is_zero());
    }

    #[test]
    fn mix_examples() {
        let f = fx();
        let e = f.u.empty();
        let one = f.u.canonical_name(&hf("{{}}"));
        let single = Partition::new(&f.b, vec![f.b.one()]).unwrap();
        assert!(f.u.same(f.u.mix(&single, &[one]).unwrap(), one).unwrap());
        let parts = Partition::new(&f.b, vec![f.p, f.q]).unwrap();
        let m = f.u.mix(&parts, &[e, one]).unwrap();
        assert!(f.p.leq(f.u.truth_eq(m, e).unwrap()).unwrap());
        // names of distinct sets are internally distinct, so the values are recovered exactly
        assert_eq!(f.u.truth_eq(m, e).unwrap(), f.p);
        assert_eq!(f.u.truth_eq(m, one).unwrap(), f.q);
        assert!(matches!(f.u.mix(&parts, &[e]), Err(UniverseError::LengthMismatch(2, 1))));
    }

    #[test]
    fn psi_rho_property_a() {
        let f = fx();
        let id = Hom::identity(&f.b);
        let psi = f.u.psi_rho(&id).unwrap();
        let pname = f.u.canonical_name(&Universe::elem_code(f.p));
        assert_eq!(f.u.truth_mem(pname, psi).unwrap(), f.p);
        let swap = Hom::new(&f.b, &f.b, HomSpec::Permutation(vec![1, 0])).unwrap();
        let psi = f.u.psi_rho(&swap).unwrap();
        assert_eq!(f.u.truth_mem(pname, psi).unwrap(), f.q);
        let two = BoolAlg::two();
        let proj = Hom::new(&f.b, &two, HomSpec::Projection(0)).unwrap();
        assert_eq!(f.u.psi_rho(&proj), Err(UniverseError::NotAutomorphism));
    }

    #[test]
    fn collapse_examples() {
        let f = fx();
        let e = f.u.empty();
        let y = f.u.make([(e, f.p)]).unwrap();
        assert_eq!(f.u.collapse_at_atom(0, y).unwrap(), hf("{{}}"));
        assert_eq!(f.u.collapse_at_atom(1, y).unwrap(), HfSet::empty());
        for h in HfSet::stage(4) {
            let n = f.u.canonical_name(&h);
            for q in 0..2 {
                assert_eq!(f.u.collapse_at_atom(q, n).unwrap(), h);
            }
        }
    }

    #[test]
    fn pi_star_by_automorphism_relabels() {
        let f = fx();
        let e = f.u.empty();
        let y = f.u.make([(e, f.p)]).unwrap();
        let swap = Hom::new(&f.b, &f.b, HomSpec::Permutation(vec![1, 0])).unwrap();
        let image = f.u.pi_star(&swap, y, &f.u).unwrap();
        assert_eq!(f.u.entries(image).unwrap(), vec![(e, f.q)]);
    }

    #[test]
    fn enumerate_small() {
        let two = Universe::new(BoolAlg::two());
        let v2 = two.enumerate(2, DEFAULT_CAP).unwrap();
        assert_eq!(v2.len(), 2);
        assert_eq!(v2[0], two.empty());
        assert_eq!(two.entries(v2[1]).unwrap(), vec![(two.empty(), two.algebra().one())]);

        let f = fx();
        let e = f.u.empty();
        let v2 = f.u.enumerate(2, DEFAULT_CAP).unwrap();
        let expected: Vec<SetId> = [f.b.zero(), f.p, f.q, f.b.one()]
            .iter()
            .map(|&b| if b.is_zero() { e } else { f.u.make([(e, b)]).unwrap() })
            .collect();
        assert_eq!(v2, expected);
        assert!(f.u.enumerate(0, DEFAULT_CAP).unwrap().is_empty());
        assert_eq!(f.u.enumerate(1, DEFAULT_CAP).unwrap(), vec![e]);
        assert_eq!(f.u.enumerate(4, DEFAULT_CAP).unwrap().len(), 256);
        assert!(matches!(f.u.enumerate(5, DEFAULT_CAP), Err(UniverseError::CapExceeded { count: 4294967296, .. })));
    }

    #[test]
    fn fragment_sizes() {
        assert_eq!(fragment_size(3, 3), 64);
        assert_eq!(fragment_size(4, 2), 256);
        assert_eq!(fragment_size(6, 1), u64::MAX);
    }

    #[test]
    fn canonical_identifies_truth_equal_sets() {
        let f = fx();
        let e = f.u.empty();
        let one = f.u.canonical_name(&hf("{{}}"));
        let parts = Partition::new(&f.b, vec![f.p, f.q]).unwrap();
        let m = f.u.mix(&parts, &[e, one]).unwrap();
        // {m ↦ 1} versus {∅ ↦ q... } style representations of the same class
        let x = f.u.make([(m, f.b.one())]).unwrap();
        let y = f.u.make([(e, f.p), (one, f.q)]).unwrap();
        assert!(f.u.same(x, y).unwrap());
        assert_ne!(f.u.normalize(x).unwrap(), f.u.normalize(y).unwrap());
        assert_eq!(f.u.canonical(x).unwrap(), f.u.canonical(y).unwrap());
        assert!(f.u.rank(f.u.canonical(x).unwrap()).unwrap() <= f.u.rank(x).unwrap());
    }

    #[test]
    fn foreign_ids_rejected() {
        let f = fx();
        let g = fx();
        assert!(matches!(f.u.truth_eq(f.u.empty(), g.u.empty()), Err(UniverseError::ForeignSet(_))));
    }

    #[test]
    fn dump_shape() {
        let f = fx();
        let e = f.u.empty();
        let y = f.u.make([(e, f.p)]).unwrap();
        let d = f.u.dump(y).unwrap();
        assert_eq!(d["root"], json!(y.to_string()));
        assert_eq!(d["sets"][y.to_string()][e.to_string()], json!(["a1"]));
        assert_eq!(d["sets"][e.to_string()], json!({}));
    }
}
