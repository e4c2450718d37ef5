//! Finite complete Boolean algebras.
//!
//! Every finite complete Boolean algebra is isomorphic to the powerset of its
//! atoms, so an algebra is just an atom count plus a unique handle, and an
//! element is a bit mask over the atoms. Atoms are the Stone points: atom `q`
//! corresponds to the principal ultrafilter `{b : q ≤ b}`.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported atom count (elements are `u64` masks).
pub const MAX_ATOMS: usize = 64;

static NEXT_ALGEBRA_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements belong to different algebras ({0} vs {1})")]
    AlgebraMismatch(AlgebraId, AlgebraId),
    #[error("atom count {0} out of range 1..={MAX_ATOMS}")]
    BadAtomCount(usize),
    #[error("bad homomorphism spec: {0}")]
    BadSpec(String),
    #[error("atom mask {mask:#x} has bits outside the {atoms} atoms")]
    BadMask { mask: u64, atoms: usize },
    #[error("cannot parse element literal `{0}`")]
    BadLiteral(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AlgebraId(u32);

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The powerset algebra of `atom_count` atoms, named `a1 .. an` in text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolAlg {
    id: AlgebraId,
    atom_count: usize,
}

impl BoolAlg {
    pub fn new(atom_count: usize) -> Result<Self> {
        if atom_count == 0 || atom_count > MAX_ATOMS {
            return Err(AlgebraError::BadAtomCount(atom_count));
        }
        let id = AlgebraId(NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed));
        Ok(BoolAlg { id, atom_count })
    }

    /// The two-point algebra.
    pub fn two() -> Self {
        Self::new(1).expect("one atom is in range")
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// Number of elements, `2^n`. Saturates for `n = 64`.
    pub fn size(&self) -> u128 {
        1u128 << self.atom_count
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.atom_count)
    }

    pub fn zero(&self) -> Elem {
        Elem { alg: self.id, bits: 0 }
    }

    pub fn one(&self) -> Elem {
        Elem { alg: self.id, bits: self.full_mask() }
    }

    pub fn atom(&self, q: usize) -> Elem {
        assert!(q < self.atom_count, "atom index {q} out of range");
        Elem { alg: self.id, bits: 1 << q }
    }

    pub fn atoms(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.atom_count).map(move |q| self.atom(q))
    }

    pub fn elem(&self, mask: u64) -> Result<Elem> {
        if mask & !self.full_mask() != 0 {
            return Err(AlgebraError::BadMask { mask, atoms: self.atom_count });
        }
        Ok(Elem { alg: self.id, bits: mask })
    }

    /// Element from a list of atom indices.
    pub fn from_atoms<I: IntoIterator<Item = usize>>(&self, atoms: I) -> Result<Elem> {
        let mut bits = 0u64;
        for q in atoms {
            if q >= self.atom_count {
                return Err(AlgebraError::BadMask { mask: 1 << q.min(63), atoms: self.atom_count });
            }
            bits |= 1 << q;
        }
        Ok(Elem { alg: self.id, bits })
    }

    /// All elements in mask order. Only sensible for small algebras.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        assert!(self.atom_count <= 20, "refusing to list 2^{} elements", self.atom_count);
        (0..(1u64 << self.atom_count)).map(move |bits| Elem { alg: self.id, bits })
    }

    pub fn contains(&self, e: Elem) -> bool {
        e.alg == self.id
    }

    pub fn check(&self, e: Elem) -> Result<()> {
        if e.alg != self.id {
            Err(AlgebraError::AlgebraMismatch(self.id, e.alg))
        } else {
            Ok(())
        }
    }

    pub fn atom_name(q: usize) -> String {
        format!("a{}", q + 1)
    }

    /// Parses `0`, `1`, or an atom list such as `{a1,a3}`.
    pub fn parse_elem(&self, text: &str) -> Result<Elem> {
        let t = text.trim();
        match t {
            "0" => return Ok(self.zero()),
            "1" => return Ok(self.one()),
            _ => {}
        }
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| AlgebraError::BadLiteral(t.to_string()))?;
        let mut bits = 0u64;
        for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let idx: usize = part
                .strip_prefix('a')
                .and_then(|n| n.parse().ok())
                .filter(|&n: &usize| n >= 1 && n <= self.atom_count)
                .ok_or_else(|| AlgebraError::BadLiteral(t.to_string()))?;
            bits |= 1 << (idx - 1);
        }
        Ok(Elem { alg: self.id, bits })
    }

    /// Big meet; the empty meet is `1`.
    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Result<Elem> {
        let mut acc = self.one();
        for x in xs {
            acc = acc.meet(x)?;
        }
        Ok(acc)
    }

    /// Big join; the empty join is `0`.
    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Result<Elem> {
        let mut acc = self.zero();
        for x in xs {
            acc = acc.join(x)?;
        }
        Ok(acc)
    }

    pub fn aggregate<I: IntoIterator<Item = Elem>>(&self, xs: I, kind: Aggregate) -> Result<Elem> {
        match kind {
            Aggregate::Meet => self.meet_all(xs),
            Aggregate::Join => self.join_all(xs),
        }
    }

    /// Pairwise disjoint blocks joining to `1`. Zero blocks are allowed.
    pub fn is_partition(&self, xs: &[Elem]) -> Result<bool> {
        let mut seen = 0u64;
        for &x in xs {
            self.check(x)?;
            if seen & x.bits != 0 {
                return Ok(false);
            }
            seen |= x.bits;
        }
        Ok(seen == self.full_mask())
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Meet,
    Join,
}

/// An element of a finite Boolean algebra, identified by `(algebra, atom set)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    alg: AlgebraId,
    bits: u64,
}

impl Elem {
    pub fn algebra(&self) -> AlgebraId {
        self.alg
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn has_atom(&self, q: usize) -> bool {
        q < 64 && self.bits >> q & 1 == 1
    }

    pub fn atom_indices(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..64).filter(move |q| bits >> q & 1 == 1)
    }

    fn same(&self, other: Elem) -> Result<()> {
        if self.alg == other.alg {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch(self.alg, other.alg))
        }
    }

    pub(crate) fn with_bits(&self, bits: u64) -> Elem {
        Elem { alg: self.alg, bits }
    }

    pub fn meet(self, other: Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    pub fn join(self, other: Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    /// Complement relative to the algebra's unit.
    pub fn complement(self, alg: &BoolAlg) -> Result<Elem> {
        alg.check(self)?;
        Ok(self.with_bits(!self.bits & alg.full_mask()))
    }

    /// `¬a ∨ b`.
    pub fn imp(self, other: Elem, alg: &BoolAlg) -> Result<Elem> {
        self.same(other)?;
        alg.check(self)?;
        Ok(self.with_bits((!self.bits | other.bits) & alg.full_mask()))
    }

    /// `(a ∧ ¬b) ∨ (b ∧ ¬a)`.
    pub fn symm_diff(self, other: Elem) -> Result<Elem> {
        self.same(other)?;
        Ok(self.with_bits(self.bits ^ other.bits))
    }

    /// `a ≤ b` iff `a ∧ b = a`.
    pub fn leq(self, other: Elem) -> Result<bool> {
        self.same(other)?;
        Ok(self.bits & other.bits == self.bits)
    }

    /// Sorted atom names, e.g. `["a1", "a3"]`.
    pub fn atom_names(&self) -> Vec<String> {
        self.atom_indices().map(BoolAlg::atom_name).collect()
    }

    /// Literal form relative to `alg`: `0`, `1`, or `{a1,a2}`.
    pub fn literal(&self, alg: &BoolAlg) -> String {
        if self.bits == 0 {
            "0".to_string()
        } else if self.bits == alg.full_mask() {
            "1".to_string()
        } else {
            format!("{{{}}}", self.atom_names().join(","))
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.atom_names().join(","))
    }
}

impl Serialize for Elem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.atom_names().serialize(s)
    }
}

/// A partition of unity; zero blocks are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    alg: AlgebraId,
    blocks: Vec<Elem>,
}

impl Partition {
    pub fn new(alg: &BoolAlg, blocks: Vec<Elem>) -> Result<Self> {
        if !alg.is_partition(&blocks)? {
            let shown: Vec<String> = blocks.iter().map(|b| b.literal(alg)).collect();
            return Err(AlgebraError::BadSpec(format!("[{}] is not a partition of unity", shown.join(", "))));
        }
        Ok(Partition { alg: alg.id(), blocks })
    }

    /// The partition into single atoms.
    pub fn atoms(alg: &BoolAlg) -> Self {
        Partition { alg: alg.id(), blocks: alg.atoms().collect() }
    }

    pub fn algebra(&self) -> AlgebraId {
        self.alg
    }

    pub fn blocks(&self) -> &[Elem] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// How to build a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomSpec {
    /// `perm[i]` is the image of source atom `i`; source and target have the same size.
    Permutation(Vec<usize>),
    /// Factor map onto a one-atom target at the principal ultrafilter of the given source atom.
    Projection(usize),
    /// `pullback[q]` is the source atom generating the ultrafilter `π⁻¹(↑q)` for target atom `q`.
    Pullback(Vec<usize>),
}

/// A (necessarily complete) homomorphism between finite algebras.
///
/// For each target atom `q` we store the source atom `s` such that
/// `q ≤ π(b)` iff `s ∈ b`; this is the principal ultrafilter pulled back along π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hom {
    source: BoolAlg,
    target: BoolAlg,
    pullback: Vec<usize>,
    is_automorphism: bool,
}

impl Hom {
    pub fn new(source: &BoolAlg, target: &BoolAlg, spec: HomSpec) -> Result<Self> {
        let pullback = match spec {
            HomSpec::Permutation(perm) => {
                if source.atom_count() != target.atom_count() || perm.len() != source.atom_count() {
                    return Err(AlgebraError::BadSpec("permutation length must match both atom counts".into()));
                }
                let mut inverse = vec![usize::MAX; perm.len()];
                for (i, &j) in perm.iter().enumerate() {
                    if j >= perm.len() || inverse[j] != usize::MAX {
                        return Err(AlgebraError::BadSpec(format!("{perm:?} is not a bijection")));
                    }
                    inverse[j] = i;
                }
                inverse
            }
            HomSpec::Projection(q) => {
                if q >= source.atom_count() {
                    return Err(AlgebraError::BadSpec(format!("no atom a{} in source", q + 1)));
                }
                if target.atom_count() != 1 {
                    return Err(AlgebraError::BadSpec("projection target must be the two-point algebra".into()));
                }
                vec![q]
            }
            HomSpec::Pullback(pb) => {
                if pb.len() != target.atom_count() || pb.iter().any(|&s| s >= source.atom_count()) {
                    return Err(AlgebraError::BadSpec(format!("bad pullback table {pb:?}")));
                }
                pb
            }
        };
        let is_automorphism = source.id() == target.id() && {
            let mut seen = vec![false; pullback.len()];
            pullback.iter().all(|&s| !std::mem::replace(&mut seen[s], true))
        };
        Ok(Hom { source: *source, target: *target, pullback, is_automorphism })
    }

    /// Identity automorphism.
    pub fn identity(alg: &BoolAlg) -> Self {
        Hom::new(alg, alg, HomSpec::Permutation((0..alg.atom_count()).collect())).expect("identity is a bijection")
    }

    pub fn source(&self) -> &BoolAlg {
        &self.source
    }

    pub fn target(&self) -> &BoolAlg {
        &self.target
    }

    pub fn is_automorphism(&self) -> bool {
        self.is_automorphism
    }

    /// Source element whose principal filter is the preimage of target atom `q`.
    pub fn pullback(&self, q: usize) -> Elem {
        self.source.atom(self.pullback[q])
    }

    pub(crate) fn apply_mask(&self, bits: u64) -> u64 {
        self.pullback
            .iter()
            .enumerate()
            .filter(|&(_, &s)| bits >> s & 1 == 1)
            .fold(0, |acc, (q, _)| acc | 1 << q)
    }

    pub fn apply(&self, b: Elem) -> Result<Elem> {
        self.source.check(b)?;
        Ok(Elem { alg: self.target.id(), bits: self.apply_mask(b.bits) })
    }
}

/// All automorphisms of `alg` (atom permutations), in lexicographic order.
pub fn automorphisms(alg: &BoolAlg) -> Vec<Hom> {
    let n = alg.atom_count();
    assert!(n <= 8, "refusing to list {n}! automorphisms");
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        out.push(Hom::new(alg, alg, HomSpec::Permutation(p.to_vec())).expect("permutation"));
    });
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}
