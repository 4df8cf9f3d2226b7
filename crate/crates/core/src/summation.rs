//! Summation over a logical ground set `[n]`.
//!
//! `[n]` is padded to `2^b` leaves. Phantom leaves receive the formal
//! identity as input and outputs naming them are dropped, so callers never
//! see the padding.

use std::collections::BTreeMap;

use crate::algebra::{oplus, sum, Adjoined, Semigroup, Semiring};
use crate::builders::{build_pq, nucleate, Nucleation};
use crate::circuit::Label;
use crate::universe::{binomial_down, subsets_up_to, Subset, Universe};
use crate::{Error, Result};

/// Largest `Σ C(n,↓p)·C(n,↓q)` the brute-force oracles accept.
pub const ORACLE_LIMIT: u64 = 10_000_000;

/// Whether to build the circuit and evaluate it, or to run the same
/// recursion on values without materialising gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Circuit,
    /// Circuit mode with gates of equal depth evaluated concurrently.
    ParallelCircuit,
    Direct,
}

/// Input `g(I, X)` for intersection summation. Absent pairs are the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionInput<V> {
    universe: Universe,
    p: usize,
    q: usize,
    entries: BTreeMap<Label, V>,
}

impl<V> IntersectionInput<V> {
    pub fn new(n: u64, p: usize, q: usize) -> Result<Self> {
        Ok(IntersectionInput {
            universe: Universe::new(n)?,
            p,
            q,
            entries: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Sets `g(active, set)`; the key must satisfy `I ⊆ X`, `|X| ≤ p`,
    /// `|I| ≤ q` and name only elements of `[n]`.
    pub fn insert(&mut self, active: Subset, set: Subset, value: V) -> Result<()> {
        let u = self.universe;
        let ok = set.level() == u.height()
            && active.level() == u.height()
            && active.is_subset(&set)
            && set.len() <= self.p
            && active.len() <= self.q
            && !u.mentions_phantom(&set);
        if !ok {
            return Err(Error::InvalidKey(format!(
                "({active} | {set}) is not a valid key for n={}, p={}, q={}",
                u.n(),
                self.p,
                self.q
            )));
        }
        self.entries.insert((active, set), value);
        Ok(())
    }

    pub fn get(&self, active: &Subset, set: &Subset) -> Option<&V> {
        self.entries.get(&(active.clone(), set.clone()))
    }

    pub fn entries(&self) -> &BTreeMap<Label, V> {
        &self.entries
    }
}

/// Input `f(X)` for disjoint summation, keyed by `p`-subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointInput<V> {
    universe: Universe,
    p: usize,
    entries: BTreeMap<Subset, V>,
}

impl<V> DisjointInput<V> {
    pub fn new(n: u64, p: usize) -> Result<Self> {
        Ok(DisjointInput {
            universe: Universe::new(n)?,
            p,
            entries: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn insert(&mut self, set: Subset, value: V) -> Result<()> {
        let u = self.universe;
        if set.level() != u.height() || set.len() != self.p || u.mentions_phantom(&set) {
            return Err(Error::InvalidKey(format!(
                "{set} is not a {}-subset of [{}]",
                self.p,
                u.n()
            )));
        }
        self.entries.insert(set, value);
        Ok(())
    }

    pub fn get(&self, set: &Subset) -> Option<&V> {
        self.entries.get(set)
    }

    pub fn entries(&self) -> &BTreeMap<Subset, V> {
        &self.entries
    }
}

/// Result table; an [`Adjoined::Identity`] entry is an empty sum.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable<V> {
    entries: BTreeMap<Subset, Adjoined<V>>,
}

impl<V> OutputTable<V> {
    pub fn get(&self, label: &Subset) -> Option<&Adjoined<V>> {
        self.entries.get(label)
    }

    pub fn is_empty_sum(&self, label: &Subset) -> bool {
        self.entries.get(label).is_some_and(Adjoined::is_identity)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subset, &Adjoined<V>)> {
        self.entries.iter()
    }

    pub fn into_map(self) -> BTreeMap<Subset, Adjoined<V>> {
        self.entries
    }
}

impl<V> FromIterator<(Subset, Adjoined<V>)> for OutputTable<V> {
    fn from_iter<T: IntoIterator<Item = (Subset, Adjoined<V>)>>(iter: T) -> Self {
        OutputTable {
            entries: iter.into_iter().collect(),
        }
    }
}

struct ValueSink<'a, S: Semigroup> {
    contract: &'a S,
    input: &'a BTreeMap<Label, S::Value>,
}

impl<S: Semigroup> Nucleation for ValueSink<'_, S> {
    type Cell = Adjoined<S::Value>;

    fn leaf(&mut self, active: &Subset, set: &Subset) -> Result<Self::Cell> {
        Ok(self
            .input
            .get(&(active.clone(), set.clone()))
            .cloned()
            .into())
    }

    fn join(&mut self, left: &Self::Cell, right: &Self::Cell) -> Result<Self::Cell> {
        oplus(self.contract, left, right)
    }
}

/// `h(A) = ⊕_{|X| ≤ p} g(A ∩ X, X)` for every `A ⊆ [n]` with `|A| ≤ q`.
pub fn intersection_sum<S: Semigroup>(
    g: &IntersectionInput<S::Value>,
    contract: &S,
    mode: Mode,
) -> Result<OutputTable<S::Value>> {
    let u = g.universe;
    let (b, p, q) = (u.height(), g.p, g.q);
    let raw: BTreeMap<Subset, Adjoined<S::Value>> = match mode {
        Mode::Circuit | Mode::ParallelCircuit => {
            let circuit = build_pq(b, p, q)?;
            if mode == Mode::Circuit {
                circuit.evaluate(contract, &g.entries)?
            } else {
                circuit.evaluate_parallel(contract, &g.entries)?
            }
        }
        Mode::Direct => {
            let mut sink = ValueSink {
                contract,
                input: &g.entries,
            };
            nucleate(b, p, q, &mut sink)?.into_iter().collect()
        }
    };
    Ok(raw
        .into_iter()
        .filter(|(label, _)| !u.mentions_phantom(label))
        .collect())
}

/// `e(Y) = ⊕ f(X)` over `p`-subsets `X` disjoint from `Y`, for every
/// `q`-subset `Y ⊆ [n]`.
pub fn disjoint_sum<S: Semigroup>(
    f: &DisjointInput<S::Value>,
    q: usize,
    contract: &S,
    mode: Mode,
) -> Result<OutputTable<S::Value>> {
    let g = lift_disjoint(f, q)?;
    let h = intersection_sum(&g, contract, mode)?;
    Ok(h.entries
        .into_iter()
        .filter(|(label, _)| label.len() == q)
        .collect())
}

/// `g(∅, X) = f(X)`; every other pair is the identity.
pub fn lift_disjoint<V: Clone>(f: &DisjointInput<V>, q: usize) -> Result<IntersectionInput<V>> {
    let mut g = IntersectionInput::new(f.universe.n(), f.p, q)?;
    let empty = Subset::empty(f.universe.height());
    for (set, value) in &f.entries {
        g.insert(empty.clone(), set.clone(), value.clone())?;
    }
    Ok(g)
}

/// `⊕_{X ∩ Y = ∅} f(X) ⊙ g(Y)` over `p`-subsets `X` and `q`-subsets `Y`,
/// computed as `⊕_Y e(Y) ⊙ g(Y)`. Returns the semiring zero when nothing
/// qualifies.
pub fn pair_sum<S: Semiring>(
    f: &DisjointInput<S::Value>,
    g: &DisjointInput<S::Value>,
    semiring: &S,
    mode: Mode,
) -> Result<S::Value> {
    if f.universe != g.universe {
        return Err(Error::param("pair_sum inputs live on different ground sets"));
    }
    let e = disjoint_sum(f, g.p, semiring, mode)?;
    let mut acc = Adjoined::Identity;
    for (y, gy) in &g.entries {
        if let Some(Adjoined::Carrier(ey)) = e.get(y) {
            let term = Adjoined::Carrier(semiring.otimes(ey, gy)?);
            acc = oplus(semiring, &acc, &term)?;
        }
    }
    Ok(acc.into_carrier().unwrap_or_else(|| semiring.zero()))
}

fn oracle_guard(n: u64, p: usize, q: usize) -> Result<()> {
    let cost = binomial_down(n, p as u64)
        .and_then(|a| Ok(a.checked_mul(binomial_down(n, q as u64)?)))
        .ok()
        .flatten();
    match cost {
        Some(c) if c <= ORACLE_LIMIT => Ok(()),
        _ => Err(Error::ScaleGuard(format!(
            "oracle over n={n}, p={p}, q={q} exceeds {ORACLE_LIMIT} terms"
        ))),
    }
}

/// Brute-force `h(A)`: for every `A`, sum `g(A ∩ X, X)` over all `X` in
/// canonical order. Never touches the padded universe.
pub fn oracle_intersection<S: Semigroup>(
    g: &IntersectionInput<S::Value>,
    contract: &S,
) -> Result<OutputTable<S::Value>> {
    let u = g.universe;
    oracle_guard(u.n(), g.p, g.q)?;
    let ground = u.ground();
    let sets: Vec<Subset> = subsets_up_to(&ground, g.p).collect();
    let mut out = BTreeMap::new();
    for active in subsets_up_to(&ground, g.q) {
        let terms: Vec<Adjoined<S::Value>> = sets
            .iter()
            .map(|x| g.get(&active.intersection(x), x).cloned().into())
            .collect();
        out.insert(active, sum(contract, &terms)?);
    }
    Ok(OutputTable { entries: out })
}

/// Brute-force `e(Y)` for every `q`-subset `Y`.
pub fn oracle_disjoint<S: Semigroup>(
    f: &DisjointInput<S::Value>,
    q: usize,
    contract: &S,
) -> Result<OutputTable<S::Value>> {
    let u = f.universe;
    oracle_guard(u.n(), f.p, q)?;
    let ground = u.ground();
    let mut out = BTreeMap::new();
    for avoid in subsets_up_to(&ground, q).filter(|y| y.len() == q) {
        let terms: Vec<Adjoined<S::Value>> = f
            .entries
            .iter()
            .filter(|(x, _)| x.is_disjoint(&avoid))
            .map(|(_, v)| Adjoined::Carrier(v.clone()))
            .collect();
        out.insert(avoid, sum(contract, &terms)?);
    }
    Ok(OutputTable { entries: out })
}
