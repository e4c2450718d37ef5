//! Finite ordered sets with a bottom element, their polars and band algebras.
//!
//! Subsets are `u128` bitsets, which bounds posets at 128 elements.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::balg::{BoolAlg, Elem};

pub type Bits = u128;

pub const MAX_ELEMENTS: usize = 128;
/// Default cap on the number of bands enumerated.
pub const DEFAULT_BAND_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("not a partial order: {0}")]
    NotAnOrder(String),
    #[error("no least element")]
    NoBottom,
    #[error("size {count} exceeds the cap of {cap}")]
    SizeOverflow { count: usize, cap: usize },
    #[error("band lattice is not Boolean: {0}")]
    NotBoolean(String),
    #[error("band lattice has no atoms")]
    Degenerate,
    #[error("refinedness conditions disagree: {0:?}")]
    InternalInconsistency(RefinedReport),
}

pub type Result<T> = std::result::Result<T, PosetError>;

/// A finite poset with least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPoset {
    labels: Vec<String>,
    /// `down[p]`: the elements `≤ p`.
    down: Vec<Bits>,
    bottom: usize,
    /// `perp[p]`: the elements disjoint from `p`.
    perp: Vec<Bits>,
}

fn bit(i: usize) -> Bits {
    1u128 << i
}

fn members(mut s: Bits) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            return None;
        }
        let i = s.trailing_zeros() as usize;
        s &= s - 1;
        Some(i)
    })
}

impl FinPoset {
    /// Builds a poset from `leq(i, j)` and checks the order axioms and the bottom.
    pub fn new(labels: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(PosetError::NoBottom);
        }
        if n > MAX_ELEMENTS {
            return Err(PosetError::SizeOverflow { count: n, cap: MAX_ELEMENTS });
        }
        let mut down = vec![0; n];
        for (j, d) in down.iter_mut().enumerate() {
            for i in 0..n {
                if leq(i, j) {
                    *d |= bit(i);
                }
            }
        }
        for i in 0..n {
            if down[i] & bit(i) == 0 {
                return Err(PosetError::NotAnOrder(format!("{} is not below itself", labels[i])));
            }
            for j in 0..n {
                if i != j && down[j] & bit(i) != 0 && down[i] & bit(j) != 0 {
                    return Err(PosetError::NotAnOrder(format!("{} and {} are mutually below", labels[i], labels[j])));
                }
                if down[j] & bit(i) != 0 && down[i] & !down[j] != 0 {
                    return Err(PosetError::NotAnOrder(format!("transitivity fails below {}", labels[j])));
                }
            }
        }
        let bottom = (0..n).find(|&b| down.iter().all(|d| d & bit(b) != 0)).ok_or(PosetError::NoBottom)?;
        let perp = (0..n)
            .map(|p| (0..n).filter(|&q| down[p] & down[q] == bit(bottom)).fold(0, |acc, q| acc | bit(q)))
            .collect();
        Ok(FinPoset { labels, down, bottom, perp })
    }

    /// Elements `0..n` with `0` as bottom and the reflexive-transitive closure of `covers`.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Self> {
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        if let Some(bottom) = rel.first_mut() {
            bottom.fill(true);
        }
        for &(a, b) in covers {
            rel[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        let labels = (0..n).map(|i| if i == 0 { "0".to_string() } else { format!("p{i}") }).collect();
        FinPoset::new(labels, |i, j| rel[i][j])
    }

    /// `0 < c1 < .. < ck`.
    pub fn chain(k: usize) -> Self {
        let labels = std::iter::once("0".to_string()).chain((1..=k).map(|i| format!("c{i}"))).collect();
        FinPoset::new(labels, |i, j| i <= j).expect("chain is an order")
    }

    /// `k` pairwise incomparable atoms over `0`.
    pub fn antichain(k: usize) -> Self {
        let labels = std::iter::once("0".to_string()).chain((1..=k).map(|i| format!("a{i}"))).collect();
        FinPoset::new(labels, |i, j| i == 0 || i == j).expect("antichain is an order")
    }

    /// Nonzero elements of the algebra ordered by inclusion, plus its zero.
    pub fn of_algebra(alg: &BoolAlg) -> Self {
        let elems: Vec<Elem> = alg.elements().collect();
        let labels = elems.iter().map(|e| e.literal(alg)).collect();
        FinPoset::new(labels, |i, j| elems[i].leq(elems[j]).expect("same algebra")).expect("algebra is an order")
    }

    /// Partial functions from an `n`-set to an `m`-set with domain smaller than `kappa`,
    /// ordered by reverse inclusion, with a bottom adjoined.
    ///
    /// Labels: `0` is the bottom, `e` the empty function, otherwise `f` followed by the value
    /// at each point of `0..n` (`_` where undefined), e.g. `f0_` for `{0 ↦ 0}` when `n = 2`.
    pub fn forcing(n: usize, m: usize, kappa: Option<usize>, cap: usize) -> Result<Self> {
        let count = forcing_count(n, m, kappa);
        if count + 1 > cap.min(MAX_ELEMENTS) {
            return Err(PosetError::SizeOverflow { count: count + 1, cap: cap.min(MAX_ELEMENTS) });
        }
        let mut funcs: Vec<Vec<Option<usize>>> = Vec::new();
        let mut digits = vec![0usize; n];
        loop {
            let f: Vec<Option<usize>> = digits.iter().map(|&d| if d == 0 { None } else { Some(d - 1) }).collect();
            if kappa.is_none_or(|k| f.iter().flatten().count() < k) {
                funcs.push(f);
            }
            let mut k = 0;
            while k < n {
                digits[k] += 1;
                if digits[k] <= m {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        funcs.sort_by_key(|f| (f.iter().flatten().count(), f.iter().rev().map(|v| v.map_or(0, |x| x + 1)).collect::<Vec<_>>()));
        let label = |f: &Vec<Option<usize>>| {
            if f.iter().all(Option::is_none) {
                "e".to_string()
            } else {
                std::iter::once('f').chain(f.iter().map(|v| v.map_or('_', |x| char::from_digit(x as u32, 36).unwrap_or('?')))).collect()
            }
        };
        let labels = std::iter::once("0".to_string()).chain(funcs.iter().map(label)).collect();
        // g ≤ f iff g extends f
        let extends = |g: &Vec<Option<usize>>, f: &Vec<Option<usize>>| f.iter().zip(g).all(|(fv, gv)| fv.is_none() || fv == gv);
        FinPoset::new(labels, |i, j| i == 0 || (j != 0 && extends(&funcs[i - 1], &funcs[j - 1])))
    }

    /// A random poset on `n` elements (bottom included).
    pub fn random<R: Rng>(rng: &mut R, n: usize, density: f64) -> Self {
        let mut order: Vec<usize> = (1..n).collect();
        order.shuffle(rng);
        let mut covers = Vec::new();
        for a in 0..order.len() {
            for b in a + 1..order.len() {
                if rng.gen_bool(density) {
                    covers.push((order[a], order[b]));
                }
            }
        }
        FinPoset::from_covers(n, &covers).expect("random covers are acyclic")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn all(&self) -> Bits {
        if self.len() == 128 {
            Bits::MAX
        } else {
            bit(self.len()) - 1
        }
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.down[q] & bit(p) != 0
    }

    /// `[0, p]`.
    pub fn down_set(&self, p: usize) -> Bits {
        self.down[p]
    }

    /// The only common lower bound of `p` and `q` is the bottom.
    pub fn disjoint(&self, p: usize, q: usize) -> bool {
        self.perp[p] & bit(q) != 0
    }

    /// `A^⊥`.
    pub fn polar(&self, a: Bits) -> Bits {
        members(a).fold(self.all(), |acc, p| acc & self.perp[p])
    }

    pub fn double_polar(&self, a: Bits) -> Bits {
        self.polar(self.polar(a))
    }

    pub fn is_band(&self, a: Bits) -> bool {
        self.double_polar(a) == a
    }

    /// `[p] = {p}^⊥⊥`.
    pub fn band_of(&self, p: usize) -> Bits {
        self.double_polar(bit(p))
    }

    pub fn set_of(&self, labels: &[&str]) -> Option<Bits> {
        labels.iter().try_fold(0, |acc, l| self.index_of(l).map(|i| acc | bit(i)))
    }

    pub fn labels_of(&self, s: Bits) -> Vec<&str> {
        members(s).map(|i| self.labels[i].as_str()).collect()
    }

    /// Every band, enumerated as intersections of singleton polars.
    pub fn bands(&self, cap: usize) -> Result<Vec<Bits>> {
        let mut seen: HashSet<Bits> = HashSet::from([self.all()]);
        let mut queue = VecDeque::from([self.all()]);
        while let Some(k) = queue.pop_front() {
            for p in 0..self.len() {
                let next = k & self.perp[p];
                if seen.insert(next) {
                    if seen.len() > cap {
                        return Err(PosetError::SizeOverflow { count: seen.len(), cap });
                    }
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Bits> = seen.into_iter().collect();
        out.sort_by_key(|b| (b.count_ones(), *b));
        Ok(out)
    }

    /// Bands with their atoms, after checking that they form a Boolean algebra.
    pub fn band_lattice(&self, cap: usize) -> Result<BandLattice> {
        let bands = self.bands(cap)?;
        let zero = bit(self.bottom);
        let atoms: Vec<Bits> = bands
            .iter()
            .copied()
            .filter(|&k| k != zero && bands.iter().all(|&l| l == zero || l == k || l & !k != 0))
            .collect();
        if atoms.len() >= 64 || bands.len() != 1usize << atoms.len() {
            return Err(PosetError::NotBoolean(format!("{} bands over {} atoms", bands.len(), atoms.len())));
        }
        let mut masks = Vec::with_capacity(bands.len());
        for &k in &bands {
            let under: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i] & !k == 0).collect();
            let union = under.iter().fold(zero, |acc, &i| acc | atoms[i]);
            if self.double_polar(union) != k {
                return Err(PosetError::NotBoolean(format!("band {:?} is not generated by its atoms", self.labels_of(k))));
            }
            let c = self.polar(k);
            if k & c != zero || self.double_polar(k | c) != self.all() {
                return Err(PosetError::NotBoolean(format!("band {:?} has no complement", self.labels_of(k))));
            }
            masks.push(under.iter().fold(0u64, |acc, &i| acc | 1 << i));
        }
        let mut by_mask: Vec<Bits> = vec![0; bands.len()];
        for (k, &m) in bands.iter().zip(&masks) {
            by_mask[m as usize] = *k;
        }
        Ok(BandLattice { bands: by_mask, atoms })
    }

    /// The band algebra as a [`BoolAlg`] whose atoms are the atomic bands.
    pub fn completion(&self, cap: usize) -> Result<Completion> {
        let lattice = self.band_lattice(cap)?;
        if lattice.atoms.is_empty() {
            return Err(PosetError::Degenerate);
        }
        let alg = BoolAlg::new(lattice.atoms.len()).expect("atom count in range");
        let band_of = (0..self.len()).map(|p| lattice.elem_of(&alg, self.band_of(p)).expect("[p] is a band")).collect();
        Ok(Completion { alg, lattice, band_of })
    }

    /// Evaluates the four refinedness conditions.
    ///
    /// Separation, interval and dense embedding are equivalent and imply injectivity.
    /// Injectivity alone is weaker: it holds on some six-element posets that are not refined.
    /// Density is checked against every band when at most `band_cap` exist, otherwise
    /// against `samples` random intersections of singleton polars.
    pub fn is_refined<R: Rng>(&self, band_cap: usize, samples: usize, rng: &mut R) -> Result<RefinedReport> {
        let n = self.len();
        let zero = self.bottom;
        let nonzero = || (0..n).filter(move |&p| p != zero);

        let separation = (0..n).all(|p| {
            nonzero().all(|q| self.leq(q, p) || nonzero().any(|r| self.leq(r, q) && self.disjoint(p, r)))
        });
        let interval = (0..n).all(|p| self.band_of(p) == self.down[p]);
        let images: Vec<Bits> = (0..n).map(|p| self.band_of(p)).collect();
        let injective = images.iter().collect::<BTreeSet<_>>().len() == n;
        let embedding = injective && (0..n).all(|p| (0..n).all(|q| self.leq(p, q) == (images[p] & !images[q] == 0)));

        let (test_bands, density_exhaustive) = match self.bands(band_cap) {
            Ok(all) => (all, true),
            Err(PosetError::SizeOverflow { .. }) => {
                let mut sampled = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let k = rng.gen_range(1..=3.min(n));
                    let mut band = self.all();
                    for _ in 0..k {
                        band &= self.perp[rng.gen_range(0..n)];
                    }
                    sampled.push(band);
                }
                (sampled, false)
            }
            Err(e) => return Err(e),
        };
        let dense = test_bands
            .iter()
            .filter(|&&k| k != bit(zero))
            .all(|&k| nonzero().any(|p| images[p] & !k == 0));
        let report = RefinedReport { separation, interval, injective, dense_embedding: embedding && dense, density_exhaustive };
        if !report.consistent() {
            return Err(PosetError::InternalInconsistency(report));
        }
        Ok(report)
    }

    /// Hasse diagram of the band algebra in DOT.
    pub fn completion_dot(&self, cap: usize) -> Result<String> {
        let lattice = self.band_lattice(cap)?;
        let mut out = String::from("digraph bands {\n  rankdir=BT;\n");
        for (m, &k) in lattice.bands.iter().enumerate() {
            writeln!(out, "  b{m} [label=\"{{{}}}\"];", self.labels_of(k).join(",")).expect("string write");
        }
        for m in 0..lattice.bands.len() {
            for i in 0..lattice.atoms.len() {
                if m >> i & 1 == 0 {
                    writeln!(out, "  b{m} -> b{};", m | 1 << i).expect("string write");
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// `Σ_k C(n,k) m^k` over `k < kappa`.
pub fn forcing_count(n: usize, m: usize, kappa: Option<usize>) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for k in 0..=n {
        if kappa.is_none_or(|kap| k < kap) {
            total = total.saturating_add(binom.saturating_mul(m.saturating_pow(k as u32)));
        }
        binom = binom * (n - k) / (k + 1);
    }
    total
}

/// All bands indexed by the atom mask of the corresponding algebra element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandLattice {
    pub bands: Vec<Bits>,
    pub atoms: Vec<Bits>,
}

impl BandLattice {
    pub fn elem_of(&self, alg: &BoolAlg, band: Bits) -> Option<Elem> {
        let m = self.bands.iter().position(|&k| k == band)?;
        alg.elem(m as u64).ok()
    }

    pub fn band(&self, e: Elem) -> Bits {
        self.bands[e.bits() as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub alg: BoolAlg,
    pub lattice: BandLattice,
    /// `[p]` as an algebra element, per poset element.
    pub band_of: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RefinedReport {
    /// Nonzero `q ≰ p` has a nonzero part disjoint from `p`.
    pub separation: bool,
    /// `[p] = [0, p]`.
    pub interval: bool,
    /// `p ↦ [p]` is one-to-one.
    pub injective: bool,
    /// `p ↦ [p]` is an order embedding with dense image.
    pub dense_embedding: bool,
    pub density_exhaustive: bool,
}

impl RefinedReport {
    /// The equivalences that hold on every poset.
    pub fn consistent(&self) -> bool {
        self.separation == self.interval && self.interval == self.dense_embedding && (!self.separation || self.injective)
    }

    /// All four conditions agree.
    pub fn all_agree(&self) -> bool {
        self.consistent() && self.injective == self.separation
    }

    pub fn refined(&self) -> bool {
        self.separation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    #[test]
    fn polar_examples() {
        let c = FinPoset::forcing(1, 2, None, 100).unwrap();
        assert_eq!(c.labels(), ["0", "e", "f0", "f1"]);
        assert_eq!(c.polar(0), c.all());
        assert_eq!(c.polar(c.all()), c.set_of(&["0"]).unwrap());
        assert_eq!(c.polar(c.set_of(&["f0"]).unwrap()), c.set_of(&["0", "f1"]).unwrap());
    }

    #[test]
    fn completion_examples() {
        let chain = FinPoset::chain(2);
        let comp = chain.completion(100).unwrap();
        assert_eq!(comp.alg.atom_count(), 1);
        assert_eq!(comp.lattice.bands, vec![chain.set_of(&["0"]).unwrap(), chain.all()]);

        let c = FinPoset::forcing(1, 2, None, 100).unwrap();
        let comp = c.completion(100).unwrap();
        assert_eq!(comp.alg.size(), 4);
        let atoms: BTreeSet<Bits> = comp.lattice.atoms.iter().copied().collect();
        let expected: BTreeSet<Bits> = [c.band_of(c.index_of("f0").unwrap()), c.band_of(c.index_of("f1").unwrap())].into();
        assert_eq!(atoms, expected);

        for k in 1..5 {
            assert_eq!(FinPoset::antichain(k).completion(100).unwrap().alg.size(), 1 << k);
        }
        assert_eq!(FinPoset::chain(0).completion(100), Err(PosetError::Degenerate));
    }

    #[test]
    fn refined_examples() {
        let r = FinPoset::chain(2).is_refined(100, 10, &mut rng()).unwrap();
        assert!(!r.separation && !r.interval && !r.injective && !r.dense_embedding);
        assert!(FinPoset::forcing(1, 2, None, 100).unwrap().is_refined(100, 10, &mut rng()).unwrap().refined());
        for n in 1..4 {
            let alg = BoolAlg::new(n).unwrap();
            assert!(FinPoset::of_algebra(&alg).is_refined(1000, 10, &mut rng()).unwrap().refined());
        }
    }

    #[test]
    fn forcing_sizes() {
        assert_eq!(FinPoset::forcing(1, 2, None, 100).unwrap().len(), 4);
        assert_eq!(FinPoset::forcing(2, 2, None, 100).unwrap().len(), 10);
        assert_eq!(forcing_count(3, 3, None), 64);
        assert_eq!(forcing_count(3, 3, Some(2)), 10);
        assert_eq!(FinPoset::forcing(3, 3, Some(2), 100).unwrap().len(), 11);
        assert_eq!(FinPoset::forcing(3, 3, Some(9), 100).unwrap().len(), 65);
        assert!(matches!(FinPoset::forcing(3, 3, None, 20), Err(PosetError::SizeOverflow { .. })));
    }

    #[test]
    fn large_forcing_poset_is_refined_by_sampling() {
        let c = FinPoset::forcing(3, 3, None, 200).unwrap();
        let r = c.is_refined(1000, 200, &mut rng()).unwrap();
        assert!(r.refined());
        assert!(!r.density_exhaustive);
    }

    #[test]
    fn order_validation() {
        let labels = vec!["0".to_string(), "a".to_string()];
        assert!(matches!(FinPoset::new(labels.clone(), |_, _| true), Err(PosetError::NotAnOrder(_))));
        assert!(matches!(FinPoset::new(labels, |i, j| i == j), Err(PosetError::NoBottom)));
    }

    #[test]
    fn dot_output() {
        let dot = FinPoset::antichain(1).completion_dot(10).unwrap();
        assert!(dot.starts_with("digraph bands {"));
        assert!(dot.contains("b0 -> b1;"));
    }
}
