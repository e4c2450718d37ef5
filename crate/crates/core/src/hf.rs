//! Hereditarily finite sets.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad hereditarily finite set literal at offset {offset}: {message}")]
pub struct HfParseError {
    pub offset: usize,
    pub message: String,
}

/// A hereditarily finite set. Cheap to clone; ordered and hashed structurally.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HfSet(Arc<BTreeSet<HfSet>>);

impl HfSet {
    pub fn empty() -> Self {
        HfSet(Arc::new(BTreeSet::new()))
    }

    pub fn from_members<I: IntoIterator<Item = HfSet>>(members: I) -> Self {
        HfSet(Arc::new(members.into_iter().collect()))
    }

    pub fn singleton(x: HfSet) -> Self {
        Self::from_members([x])
    }

    pub fn pair_set(x: HfSet, y: HfSet) -> Self {
        Self::from_members([x, y])
    }

    /// Von Neumann natural `k = {0, .., k-1}`.
    pub fn nat(k: usize) -> Self {
        let mut acc = Vec::with_capacity(k);
        for _ in 0..k {
            let next = Self::from_members(acc.iter().cloned());
            acc.push(next);
        }
        Self::from_members(acc)
    }

    /// Kuratowski pair `{{x},{x,y}}`.
    pub fn kpair(x: &HfSet, y: &HfSet) -> Self {
        Self::pair_set(Self::singleton(x.clone()), Self::pair_set(x.clone(), y.clone()))
    }

    /// Right-folded tuple: `()` = ∅, `(x)` = x, `(x1, .., xn)` = pair(x1, (x2, .., xn)).
    pub fn tuple(xs: &[HfSet]) -> Self {
        match xs {
            [] => Self::empty(),
            [x] => x.clone(),
            [x, rest @ ..] => Self::kpair(x, &Self::tuple(rest)),
        }
    }

    pub fn members(&self) -> impl Iterator<Item = &HfSet> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.contains(x)
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// `0` for ∅, else one more than the largest member rank.
    pub fn rank(&self) -> usize {
        self.members().map(|m| m.rank() + 1).max().unwrap_or(0)
    }

    pub fn is_transitive(&self) -> bool {
        self.members().all(|m| m.is_subset(self))
    }

    pub fn is_ordinal(&self) -> bool {
        self.is_transitive()
            && self.members().all(|u| self.members().all(|v| u.contains(v) || u == v || v.contains(u)))
    }

    /// If this set is a von Neumann natural, its value.
    pub fn as_nat(&self) -> Option<usize> {
        let k = self.len();
        if *self == Self::nat(k) {
            Some(k)
        } else {
            None
        }
    }

    pub fn powerset(&self) -> Vec<HfSet> {
        let members: Vec<&HfSet> = self.members().collect();
        assert!(members.len() <= 20, "powerset of a {}-element set", members.len());
        (0u32..(1 << members.len()))
            .map(|mask| HfSet::from_members(members.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, m)| (*m).clone())))
            .collect()
    }

    /// All HF sets of rank `< level` (the stage `V_level`), sorted. Sizes 0, 1, 2, 4, 16, 65536.
    pub fn stage(level: usize) -> Vec<HfSet> {
        let mut cur: Vec<HfSet> = Vec::new();
        for _ in 0..level {
            assert!(cur.len() <= 16, "stage too large");
            cur = HfSet::from_members(cur).powerset();
            cur.sort();
        }
        cur
    }

    /// Interpreted as a set of Kuratowski pairs: the value at `x`, if unique.
    pub fn apply(&self, x: &HfSet) -> Option<HfSet> {
        let mut found = None;
        for w in self.members() {
            if let Some((a, b)) = w.as_kpair() {
                if &a == x {
                    if found.is_some() {
                        return None;
                    }
                    found = Some(b);
                }
            }
        }
        found
    }

    pub fn as_kpair(&self) -> Option<(HfSet, HfSet)> {
        let ms: Vec<&HfSet> = self.members().collect();
        match ms.as_slice() {
            [s] if s.len() == 1 => {
                let x = s.members().next().unwrap().clone();
                Some((x.clone(), x))
            }
            [a, b] => {
                let (single, double) = if a.len() == 1 { (a, b) } else { (b, a) };
                if single.len() != 1 || double.len() != 2 {
                    return None;
                }
                let x = single.members().next().unwrap();
                if !double.contains(x) {
                    return None;
                }
                let y = double.members().find(|m| *m != x).unwrap();
                Some((x.clone(), y.clone()))
            }
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Result<HfSet, HfParseError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let set = parse_set(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(HfParseError { offset: pos, message: "trailing input".into() });
        }
        Ok(set)
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_set(b: &[u8], pos: &mut usize) -> Result<HfSet, HfParseError> {
    skip_ws(b, pos);
    if *pos < b.len() && b[*pos].is_ascii_digit() {
        let start = *pos;
        while *pos < b.len() && b[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let k: usize = std::str::from_utf8(&b[start..*pos]).unwrap().parse().map_err(|_| HfParseError { offset: start, message: "bad numeral".into() })?;
        if k > 64 {
            return Err(HfParseError { offset: start, message: "numeral too large".into() });
        }
        return Ok(HfSet::nat(k));
    }
    if *pos >= b.len() || b[*pos] != b'{' {
        return Err(HfParseError { offset: *pos, message: "expected `{` or a numeral".into() });
    }
    *pos += 1;
    let mut members = Vec::new();
    skip_ws(b, pos);
    if *pos < b.len() && b[*pos] == b'}' {
        *pos += 1;
        return Ok(HfSet::empty());
    }
    loop {
        members.push(parse_set(b, pos)?);
        skip_ws(b, pos);
        match b.get(*pos) {
            Some(b',') => *pos += 1,
            Some(b'}') => {
                *pos += 1;
                return Ok(HfSet::from_members(members));
            }
            _ => return Err(HfParseError { offset: *pos, message: "expected `,` or `}`".into() }),
        }
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for HfSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
