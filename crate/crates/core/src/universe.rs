//! Binary-tree view of the ground set.
//!
//! Element `x` of `[2^b]` is the length-`b` binary string of `x`, most
//! significant bit first, so the string read left to right is the path from
//! the root to leaf `x`. A node at level `ℓ` is a length-`ℓ` string, stored as
//! its integer value.

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// Deepest tree supported; keeps `2^b` and shifted prefixes inside `u64`.
pub const MAX_LEVEL: u8 = 62;

/// A node of the perfect binary tree: a binary string of length `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixString {
    level: u8,
    bits: u64,
}

impl PrefixString {
    pub fn new(level: u8, bits: u64) -> Result<Self> {
        check_level(level)?;
        if bits >= 1u64 << level {
            return Err(Error::param(format!(
                "bits {bits} do not fit a string of length {level}"
            )));
        }
        Ok(PrefixString { level, bits })
    }

    /// The empty string `ε`, the root.
    pub fn root() -> Self {
        PrefixString { level: 0, bits: 0 }
    }

    pub fn level(self) -> u8 {
        self.level
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Prefix of length `level`.
    pub fn truncate(self, level: u8) -> Result<Self> {
        if level > self.level {
            return Err(Error::param(format!(
                "cannot truncate a length-{} string to length {level}",
                self.level
            )));
        }
        Ok(PrefixString {
            level,
            bits: self.bits >> (self.level - level),
        })
    }

    /// `self` followed by `bit`.
    pub fn child(self, bit: bool) -> Result<Self> {
        check_level(self.level + 1)?;
        Ok(PrefixString {
            level: self.level + 1,
            bits: (self.bits << 1) | bit as u64,
        })
    }
}

impl fmt::Display for PrefixString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            return f.write_str("ε");
        }
        write!(f, "{:0width$b}", self.bits, width = self.level as usize)
    }
}

/// A set of tree nodes that all sit on the same level, kept sorted.
///
/// The derived order compares the level first and then the sorted member
/// lists lexicographically. This canonical order resolves every "arbitrary"
/// choice made by the builders, so circuits come out byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    level: u8,
    members: Vec<u64>,
}

impl Subset {
    /// Builds a subset from arbitrary-order members; duplicates are merged.
    pub fn new(level: u8, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_level(level)?;
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= 1u64 << level {
                return Err(Error::param(format!(
                    "node {last} does not exist on level {level}"
                )));
            }
        }
        Ok(Subset { level, members })
    }

    pub fn empty(level: u8) -> Self {
        Subset {
            level,
            members: Vec::new(),
        }
    }

    /// Every node on `level`.
    pub fn full(level: u8) -> Result<Self> {
        check_level(level)?;
        Ok(Subset {
            level,
            members: (0..1u64 << level).collect(),
        })
    }

    /// Members must already be strictly increasing and in range.
    pub(crate) fn from_sorted(level: u8, members: Vec<u64>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&m| m < 1u64 << level));
        Subset { level, members }
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: u64) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    pub fn strings(&self) -> impl Iterator<Item = PrefixString> + '_ {
        self.members.iter().map(move |&bits| PrefixString {
            level: self.level,
            bits,
        })
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.level == other.level && self.members.iter().all(|m| other.contains(*m))
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        merge_count(&self.members, &other.members) == 0
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|m| other.contains(*m))
            .collect();
        Subset::from_sorted(self.level, members)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut members = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let next = match (self.members.get(i), other.members.get(j)) {
                (Some(&a), Some(&b)) => match a.cmp(&b) {
                    Ordering::Less => {
                        i += 1;
                        a
                    }
                    Ordering::Greater => {
                        j += 1;
                        b
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        a
                    }
                },
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            members.push(next);
        }
        Subset::from_sorted(self.level, members)
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|m| !other.contains(*m))
            .collect();
        Subset::from_sorted(self.level, members)
    }

    pub fn with(&self, node: u64) -> Subset {
        let mut members = self.members.clone();
        if let Err(pos) = members.binary_search(&node) {
            members.insert(pos, node);
        }
        Subset::from_sorted(self.level, members)
    }

    pub fn without(&self, node: u64) -> Subset {
        let members = self.members.iter().copied().filter(|&m| m != node).collect();
        Subset::from_sorted(self.level, members)
    }

    /// Members of `self` (a leaf set) lying below some node of `nodes`,
    /// i.e. `self ∩ ⟨nodes⟩`.
    pub fn restrict_to_span(&self, nodes: &Subset) -> Subset {
        debug_assert!(nodes.level <= self.level);
        let shift = self.level - nodes.level;
        let members = self
            .members
            .iter()
            .copied()
            .filter(|m| nodes.contains(m >> shift))
            .collect();
        Subset::from_sorted(self.level, members)
    }

    /// Canonical byte encoding: the level byte, then big-endian members.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 8 * self.len());
        out.push(self.level);
        for m in &self.members {
            out.extend_from_slice(&m.to_be_bytes());
        }
        out
    }

    /// Parses the text encoding (`-` or comma-separated decimal members).
    pub fn parse(text: &str, level: u8) -> Result<Self> {
        let text = text.trim();
        if text == "-" {
            return Ok(Subset::empty(level));
        }
        if text.is_empty() {
            return Err(Error::format("empty subset text (use '-' for ∅)"));
        }
        let mut members = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let m: u64 = part
                .parse()
                .map_err(|_| Error::format(format!("bad element '{part}' in subset '{text}'")))?;
            members.push(m);
        }
        let len = members.len();
        let subset = Subset::new(level, members)
            .map_err(|e| Error::format(format!("subset '{text}': {e}")))?;
        if subset.len() != len {
            return Err(Error::format(format!("repeated element in subset '{text}'")));
        }
        Ok(subset)
    }
}

/// Comma-separated decimal members, `-` for the empty set.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return f.write_str("-");
        }
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn merge_count(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

fn check_level(level: u8) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::param(format!(
            "level {level} exceeds the supported maximum {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Logical ground set `[n]` padded to `2^b` leaves.
///
/// Leaves `n..2^b` are phantoms: they take part in the tree but are never
/// named by an input or output label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Universe {
    n: u64,
    b: u8,
}

impl Universe {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("ground set must have at least one element"));
        }
        if n > 1u64 << MAX_LEVEL {
            return Err(Error::param(format!("n = {n} exceeds 2^{MAX_LEVEL}")));
        }
        let b = (64 - (n.max(2) - 1).leading_zeros()) as u8;
        Ok(Universe { n, b })
    }

    /// The unpadded universe `[2^b]`.
    pub fn with_height(b: u8) -> Result<Self> {
        check_level(b)?;
        if b == 0 {
            return Err(Error::param("tree height must be at least 1"));
        }
        Ok(Universe { n: 1u64 << b, b })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn height(&self) -> u8 {
        self.b
    }

    pub fn leaves(&self) -> u64 {
        1u64 << self.b
    }

    pub fn is_phantom(&self, leaf: u64) -> bool {
        leaf >= self.n
    }

    pub fn mentions_phantom(&self, set: &Subset) -> bool {
        set.members().last().is_some_and(|&m| m >= self.n)
    }

    /// The logical elements `[n]` as a leaf set.
    pub fn ground(&self) -> Subset {
        Subset::from_sorted(self.b, (0..self.n).collect())
    }

    /// A leaf set of logical elements; phantoms and out-of-range values fail.
    pub fn subset(&self, elements: impl IntoIterator<Item = u64>) -> Result<Subset> {
        let set = Subset::new(self.b, elements)?;
        if self.mentions_phantom(&set) {
            return Err(Error::InvalidKey(format!(
                "subset {set} names an element outside [0, {})",
                self.n
            )));
        }
        Ok(set)
    }
}

/// `X|_ℓ`: the length-`ℓ` prefixes of the members of `X`.
pub fn project(set: &Subset, level: u8) -> Result<Subset> {
    if level > set.level {
        return Err(Error::param(format!(
            "cannot project a level-{} set to level {level}",
            set.level
        )));
    }
    let shift = set.level - level;
    let mut members: Vec<u64> = set.members.iter().map(|m| m >> shift).collect();
    // shifting preserves order, so duplicates are adjacent
    members.dedup();
    Ok(Subset::from_sorted(level, members))
}

/// `⟨W⟩`: all level-`b` strings having some member of `W` as a prefix.
pub fn span(nodes: &Subset, b: u8) -> Result<Subset> {
    check_level(b)?;
    if nodes.level > b {
        return Err(Error::param(format!(
            "span of a level-{} set inside a height-{b} tree",
            nodes.level
        )));
    }
    let shift = b - nodes.level;
    let width = 1u64 << shift;
    let mut members = Vec::with_capacity(nodes.len() * width as usize);
    for &w in &nodes.members {
        let start = w << shift;
        members.extend(start..start + width);
    }
    Ok(Subset::from_sorted(b, members))
}

/// All `Z` on level `ℓ+1` with `|Z| ≤ p` and `Z|_ℓ = W`, in canonical order.
///
/// Each such `Z` keeps one or both children of every node of `W`; at most
/// `p - |W|` nodes may keep both.
pub fn child_families(parent: &Subset, p: usize) -> Result<Vec<Subset>> {
    let level = parent.level + 1;
    check_level(level)?;
    if parent.len() > p {
        return Ok(Vec::new());
    }
    let spare = p - parent.len();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(2 * parent.len());
    expand_children(&parent.members, spare, &mut current, &mut out, level);
    out.sort();
    Ok(out)
}

fn expand_children(
    rest: &[u64],
    spare: usize,
    current: &mut Vec<u64>,
    out: &mut Vec<Subset>,
    level: u8,
) {
    let Some((&w, tail)) = rest.split_first() else {
        out.push(Subset::from_sorted(level, current.clone()));
        return;
    };
    let (left, right) = (w << 1, (w << 1) | 1);
    current.push(left);
    expand_children(tail, spare, current, out, level);
    current.pop();
    current.push(right);
    expand_children(tail, spare, current, out, level);
    current.pop();
    if spare > 0 {
        current.push(left);
        current.push(right);
        expand_children(tail, spare - 1, current, out, level);
        current.pop();
        current.pop();
    }
}

/// `Σ_{k=0}^{p-i} C(i,k)·2^(i-k)`: the number of child families of an
/// `i`-element node set.
pub fn child_count(i: usize, p: usize) -> Result<u64> {
    if i > p {
        return Err(Error::param(format!("child_count needs i ≤ p, got i={i}, p={p}")));
    }
    let mut total: u64 = 0;
    for k in 0..=(p - i).min(i) {
        let term = binomial(i as u64, k as u64)?
            .checked_mul(pow2((i - k) as u32)?)
            .ok_or(Error::Overflow("child_count"))?;
        total = total.checked_add(term).ok_or(Error::Overflow("child_count"))?;
    }
    Ok(total)
}

/// Binomial coefficient with overflow checking.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow("binomial"));
        }
    }
    Ok(acc as u64)
}

/// `C(n, ↓k) = Σ_{i≤k} C(n,i)`.
pub fn binomial_down(n: u64, k: u64) -> Result<u64> {
    (0..=k).try_fold(0u64, |acc, i| {
        acc.checked_add(binomial(n, i)?)
            .ok_or(Error::Overflow("binomial_down"))
    })
}

pub(crate) fn pow2(e: u32) -> Result<u64> {
    1u64.checked_shl(e)
        .filter(|_| e < 64)
        .ok_or(Error::Overflow("power of two"))
}

/// Iterator over all subsets of `ground` with at most `size` members, in
/// canonical order, each exactly once.
pub fn subsets_up_to(ground: &Subset, size: usize) -> SubsetsUpTo {
    SubsetsUpTo {
        level: ground.level,
        ground: ground.members.clone(),
        size,
        picks: Vec::new(),
        started: false,
        done: false,
    }
}

/// See [`subsets_up_to`].
#[derive(Debug, Clone)]
pub struct SubsetsUpTo {
    level: u8,
    ground: Vec<u64>,
    size: usize,
    // indices into `ground`, strictly increasing
    picks: Vec<usize>,
    started: bool,
    done: bool,
}

impl SubsetsUpTo {
    fn current(&self) -> Subset {
        Subset::from_sorted(
            self.level,
            self.picks.iter().map(|&i| self.ground[i]).collect(),
        )
    }

    /// Lexicographic successor: extend if possible, otherwise bump the last pick.
    fn advance(&mut self) -> bool {
        let m = self.ground.len();
        if self.picks.len() < self.size {
            let next = self.picks.last().map_or(0, |&i| i + 1);
            if next < m {
                self.picks.push(next);
                return true;
            }
        }
        while let Some(last) = self.picks.pop() {
            if last + 1 < m {
                self.picks.push(last + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for SubsetsUpTo {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}
