//! Circuit constructions.
//!
//! [`build_pq`] is the tree-projection circuit for `(p,q)`-intersection
//! summation. [`build_valiant`], [`build_p1`] and [`build_q1`] are the
//! specialised constructions for `p = q = 1`, `p = 1` and `q = 1`;
//! [`build_yates`] is the prefix-suffix baseline. All loop orders and fold
//! orders are canonical, so the same parameters always give the same circuit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::universe::{
    binomial, binomial_down, child_count, child_families, project, span, subsets_up_to, Subset,
    MAX_LEVEL,
};
use crate::{Error, Result};

/// Largest circuit any builder will attempt, in gates.
pub const MAX_GATES: u64 = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildParams {
    pub b: u8,
    pub p: usize,
    pub q: usize,
}

impl BuildParams {
    pub fn new(b: u8, p: usize, q: usize) -> Result<Self> {
        if b == 0 || b > MAX_LEVEL {
            return Err(Error::param(format!("tree height must be in 1..={MAX_LEVEL}, got {b}")));
        }
        Ok(BuildParams { b, p, q })
    }
}

/// Exact gate counts of [`build_pq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictedCounts {
    pub inputs: u64,
    pub adds: u64,
    pub outputs: u64,
}

/// Closed-form gate counts for `build_pq(b, p, q)`.
///
/// - inputs: `Σ_{i≤p} Σ_{j≤q} C(2^b,i)·C(i,j)`
/// - adds: `Σ_{ℓ<b} Σ_{i≤p} Σ_{j≤q} C(2^ℓ,i)·C(i·2^(b-ℓ),j)·(child_count(i,p) − 1)`
///   plus one output gate per label
/// - outputs: `Σ_{j≤q} C(2^b,j)`
pub fn predicted_gate_count(b: u8, p: usize, q: usize) -> Result<PredictedCounts> {
    BuildParams::new(b, p, q)?;
    let overflow = || Error::Overflow("predicted gate count");
    let n = 1u64 << b;
    let (p64, q64) = (p as u64, q as u64);

    let mut inputs = 0u64;
    for i in 0..=p64 {
        for j in 0..=q64.min(i) {
            let term = binomial(n, i)?
                .checked_mul(binomial(i, j)?)
                .ok_or_else(overflow)?;
            inputs = inputs.checked_add(term).ok_or_else(overflow)?;
        }
    }

    let mut adds = 0u64;
    for level in 0..b {
        let nodes = 1u64 << level;
        let width = 1u64 << (b - level);
        for i in 0..=p64.min(nodes) {
            let per_pair = child_count(i as usize, p)? - 1;
            if per_pair == 0 {
                continue;
            }
            let families = binomial(nodes, i)?;
            let span_len = i.checked_mul(width).ok_or_else(overflow)?;
            let pairs = binomial_down(span_len, q64)?;
            let term = families
                .checked_mul(pairs)
                .and_then(|t| t.checked_mul(per_pair))
                .ok_or_else(overflow)?;
            adds = adds.checked_add(term).ok_or_else(overflow)?;
        }
    }
    let outputs = binomial_down(n, q64)?;
    adds = adds.checked_add(outputs).ok_or_else(overflow)?;
    Ok(PredictedCounts {
        inputs,
        adds,
        outputs,
    })
}

/// Receiver for the tree-projection recursion: either emits gates or
/// computes values directly.
pub(crate) trait Nucleation {
    type Cell: Clone;

    fn leaf(&mut self, active: &Subset, set: &Subset) -> Result<Self::Cell>;

    fn join(&mut self, left: &Self::Cell, right: &Self::Cell) -> Result<Self::Cell>;
}

/// Runs the bottom-up recursion for `h_ℓ(A, W)` and returns `h(A)` for every
/// `A` with `|A| ≤ q`, in canonical order.
///
/// Only two levels of the `(A, W)` table are alive at any time. A cell is
/// kept only for `A ⊆ ⟨W⟩`; larger `A` are cut down to `A ∩ ⟨Z⟩` when read.
pub(crate) fn nucleate<N: Nucleation>(
    b: u8,
    p: usize,
    q: usize,
    sink: &mut N,
) -> Result<Vec<(Subset, N::Cell)>> {
    let leaves = Subset::full(b)?;
    let mut below: BTreeMap<(Subset, Subset), N::Cell> = BTreeMap::new();
    for set in subsets_up_to(&leaves, p) {
        for active in subsets_up_to(&set, q) {
            let cell = sink.leaf(&active, &set)?;
            below.insert((active, set.clone()), cell);
        }
    }

    for level in (0..b).rev() {
        let nodes = Subset::full(level)?;
        let mut here = BTreeMap::new();
        for parent in subsets_up_to(&nodes, p) {
            let children = child_families(&parent, p)?;
            let reach = span(&parent, b)?;
            for active in subsets_up_to(&reach, q) {
                let mut acc: Option<N::Cell> = None;
                for child in &children {
                    let key = (active.restrict_to_span(child), child.clone());
                    let cell = below
                        .get(&key)
                        .expect("every child cell exists on the level below");
                    acc = Some(match acc {
                        None => cell.clone(),
                        Some(left) => sink.join(&left, cell)?,
                    });
                }
                let cell = acc.expect("a node set always has a child family");
                here.insert((active, parent.clone()), cell);
            }
        }
        below = here;
    }

    let root = Subset::full(0)?;
    let none = Subset::empty(0);
    let empty_sum = below
        .get(&(Subset::empty(b), none))
        .expect("the empty family is always present")
        .clone();
    let mut outputs = Vec::new();
    for active in subsets_up_to(&leaves, q) {
        let cell = match below.get(&(active.clone(), root.clone())) {
            Some(nonempty) => sink.join(nonempty, &empty_sum)?,
            // p = 0: only X = ∅ exists
            None => empty_sum.clone(),
        };
        outputs.push((active, cell));
    }
    Ok(outputs)
}

struct GateSink<'a>(&'a mut CircuitBuilder);

impl Nucleation for GateSink<'_> {
    type Cell = GateId;

    fn leaf(&mut self, active: &Subset, set: &Subset) -> Result<GateId> {
        Ok(self.0.input(active.clone(), set.clone()))
    }

    fn join(&mut self, left: &GateId, right: &GateId) -> Result<GateId> {
        Ok(self.0.add(*left, *right))
    }
}

fn guard(what: &str, gates: u64) -> Result<()> {
    if gates > MAX_GATES {
        return Err(Error::ScaleGuard(format!(
            "{what} would need {gates} gates (limit {MAX_GATES})"
        )));
    }
    Ok(())
}

/// The tree-projection circuit for `(p,q)`-intersection summation over the
/// `2^b` leaves: output `A` computes `⊕_X g(A ∩ X, X)` over all `|X| ≤ p`.
pub fn build_pq(b: u8, p: usize, q: usize) -> Result<Circuit> {
    let predicted = match predicted_gate_count(b, p, q) {
        Ok(c) => c,
        Err(Error::Overflow(_)) => {
            return Err(Error::ScaleGuard(format!("build_pq({b},{p},{q}) is too large")))
        }
        Err(e) => return Err(e),
    };
    guard(
        "build_pq",
        predicted.inputs.saturating_add(predicted.adds),
    )?;
    let mut cb = CircuitBuilder::new(b, p, q);
    let outputs = nucleate(b, p, q, &mut GateSink(&mut cb))?;
    for (label, gate) in outputs {
        cb.output(label, gate);
    }
    Ok(cb.finish())
}

/// Inputs `(∅, {x})` for every leaf, returned per leaf.
fn singleton_inputs(cb: &mut CircuitBuilder, b: u8) -> Vec<GateId> {
    (0..1u64 << b)
        .map(|x| cb.input(Subset::empty(b), Subset::from_sorted(b, vec![x])))
        .collect()
}

/// Subtree sums `h⁺_ℓ(w)` for `ℓ = 1..=b`; index `[ℓ][w]`, level 0 unused.
fn subtree_sums(cb: &mut CircuitBuilder, b: u8, leaves: Vec<GateId>) -> Vec<Vec<GateId>> {
    let mut plus = vec![Vec::new(); b as usize + 1];
    plus[b as usize] = leaves;
    for level in (1..b as usize).rev() {
        plus[level] = (0..1usize << level)
            .map(|w| cb.add(plus[level + 1][2 * w], plus[level + 1][2 * w + 1]))
            .collect();
    }
    plus
}

/// Valiant's circuit for `p = q = 1`: output `{y}` is `⊕_{x≠y} f(x)`, using
/// exactly `3·2^b − 6` gates. Input labels are `(∅, {x})`.
pub fn build_valiant(b: u8) -> Result<Circuit> {
    BuildParams::new(b, 1, 1)?;
    if b < 2 {
        return Err(Error::param("Valiant's construction needs b ≥ 2"));
    }
    guard("build_valiant", 4u64 << b)?;
    let mut cb = CircuitBuilder::new(b, 1, 1);
    let leaves = singleton_inputs(&mut cb, b);
    let plus = subtree_sums(&mut cb, b, leaves);

    // h⁻_ℓ(u): everything outside the subtree of u
    let mut minus: Vec<GateId> = vec![plus[1][1], plus[1][0]];
    for row in &plus[2..=b as usize] {
        minus = (0..row.len())
            .map(|ui| cb.add(minus[ui >> 1], row[ui ^ 1]))
            .collect();
    }
    for (y, &gate) in minus.iter().enumerate() {
        cb.output(Subset::from_sorted(b, vec![y as u64]), gate);
    }
    Ok(cb.finish())
}

/// The `p = 1` generalisation: output `Y` (`|Y| ≤ q`) is `⊕_{x∉Y} f(x)`.
///
/// Outputs whose sum is empty (every leaf avoided) are left out; they
/// evaluate to the formal identity.
pub fn build_p1(b: u8, q: usize) -> Result<Circuit> {
    BuildParams::new(b, 1, q)?;
    if b < 2 || q < 1 {
        return Err(Error::param("the p = 1 construction needs b ≥ 2 and q ≥ 1"));
    }
    let mut estimate = 0u64;
    for level in 0..=b {
        estimate = estimate.saturating_add(binomial_down(1u64 << level, q as u64).unwrap_or(u64::MAX));
    }
    guard("build_p1", estimate.saturating_mul(q as u64 + 1))?;

    let mut cb = CircuitBuilder::new(b, 1, q);
    let leaves = singleton_inputs(&mut cb, b);
    let plus = subtree_sums(&mut cb, b, leaves);

    // h⁻_0({ε}) is the empty sum
    let mut minus: BTreeMap<Subset, Option<GateId>> = BTreeMap::new();
    minus.insert(Subset::full(0)?, None);
    minus.insert(Subset::empty(0), Some(cb.add(plus[1][0], plus[1][1])));

    for level in 1..=b {
        let nodes = Subset::full(level)?;
        let mut here = BTreeMap::new();
        for set in subsets_up_to(&nodes, q) {
            let parent = minus[&project(&set, level - 1)?];
            let hat = set
                .members()
                .iter()
                .map(|&u| u ^ 1)
                .filter(|&sib| !set.contains(sib));
            let terms: Vec<GateId> = parent
                .into_iter()
                .chain(hat.map(|x| plus[level as usize][x as usize]))
                .collect();
            let gate = cb.add_all(terms);
            here.insert(set, gate);
        }
        minus = here;
    }
    for (label, gate) in minus {
        if let Some(g) = gate {
            cb.output(label, g);
        }
    }
    Ok(cb.finish())
}

/// The `q = 1` generalisation: output `{y}` is `⊕ f(X)` over all `|X| ≤ p`
/// with `y ∉ X`, including `X = ∅`.
pub fn build_q1(b: u8, p: usize) -> Result<Circuit> {
    BuildParams::new(b, p, 1)?;
    if b < 2 || p < 1 {
        return Err(Error::param("the q = 1 construction needs b ≥ 2 and p ≥ 1"));
    }
    let inputs = binomial_down(1u64 << b, p as u64)
        .map_err(|_| Error::ScaleGuard(format!("build_q1({b},{p}) is too large")))?;
    guard("build_q1", inputs.saturating_mul(2 + p as u64 * b as u64))?;

    let mut cb = CircuitBuilder::new(b, p, 1);
    let leaves = Subset::full(b)?;
    // plus[ℓ][W] = h⁺_ℓ(W), sums over X with X|_ℓ = W; kept for ℓ = 1..=b
    let mut plus: Vec<BTreeMap<Subset, GateId>> = vec![BTreeMap::new(); b as usize + 1];
    for set in subsets_up_to(&leaves, p) {
        let g = cb.input(Subset::empty(b), set.clone());
        plus[b as usize].insert(set, g);
    }
    let empty_input = plus[b as usize][&Subset::empty(b)];
    for level in (1..b).rev() {
        let nodes = Subset::full(level)?;
        let mut here = BTreeMap::new();
        for parent in subsets_up_to(&nodes, p) {
            let terms: Vec<GateId> = child_families(&parent, p)?
                .iter()
                .map(|z| plus[level as usize + 1][z])
                .collect();
            let gate = cb.add_all(terms).expect("child family is never empty");
            here.insert(parent, gate);
        }
        plus[level as usize] = here;
    }

    // h⁻_0(ε): only X = ∅ avoids the root's span
    let mut minus: Vec<GateId> = vec![empty_input];
    for level in 1..=b {
        let mut here = Vec::with_capacity(1 << level);
        for xi in 0..1u64 << level {
            let x = xi >> 1;
            let others = Subset::full(level)?.without(2 * x).without(2 * x + 1);
            let mut terms = vec![minus[x as usize]];
            for rest in subsets_up_to(&others, p - 1) {
                terms.push(plus[level as usize][&rest.with(xi ^ 1)]);
            }
            here.push(cb.add_all(terms).expect("at least the parent term"));
        }
        minus = here;
    }
    for (y, &gate) in minus.iter().enumerate() {
        cb.output(Subset::from_sorted(b, vec![y as u64]), gate);
    }
    Ok(cb.finish())
}

/// Prefix-suffix nucleation from Yates's algorithm: output `Y` (`|Y| ≤ q`)
/// is `⊕ f(X)` over `|X| ≤ p` with `X ∩ Y = ∅`.
///
/// `a_i(Z)` collects the `X` that agree with `Z` on the first `n − i`
/// elements and avoid `Z` on the last `i`. Only `Z` with at most `p` members
/// in the first part and at most `q` in the last are materialised; any other
/// `a_i(Z)` is empty or never read.
pub fn build_yates(b: u8, p: usize, q: usize) -> Result<Circuit> {
    BuildParams::new(b, p, q)?;
    let n = 1u64 << b;
    let width = binomial_down(n, p as u64)
        .and_then(|x| Ok(x.checked_mul(binomial_down(n, q as u64)?)))
        .ok()
        .flatten()
        .and_then(|x| x.checked_mul(n + 1));
    match width {
        Some(w) => guard("build_yates", w)?,
        None => return Err(Error::ScaleGuard(format!("build_yates({b},{p},{q}) is too large"))),
    }

    let mut cb = CircuitBuilder::new(b, p, q);
    let leaves = Subset::full(b)?;
    let mut layer: BTreeMap<Subset, GateId> = BTreeMap::new();
    for set in subsets_up_to(&leaves, p) {
        let g = cb.input(Subset::empty(b), set.clone());
        layer.insert(set, g);
    }
    for step in 1..=n {
        let pivot = n - step;
        let head = Subset::from_sorted(b, (0..pivot).collect());
        let tail = Subset::from_sorted(b, (pivot..n).collect());
        let mut next = BTreeMap::new();
        for front in subsets_up_to(&head, p) {
            for back in subsets_up_to(&tail, q) {
                let z = front.union(&back);
                let gate = if z.contains(pivot) {
                    layer[&z.without(pivot)]
                } else {
                    let rest = layer[&z];
                    match layer.get(&z.with(pivot)) {
                        Some(&with) => cb.add(with, rest),
                        None => rest,
                    }
                };
                next.insert(z, gate);
            }
        }
        layer = next;
    }
    for set in subsets_up_to(&leaves, q) {
        cb.output(set.clone(), layer[&set]);
    }
    Ok(cb.finish())
}

/// Builder selection by name, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuilderKind {
    Pq,
    Valiant,
    P1,
    Q1,
    Yates,
}

impl BuilderKind {
    pub const ALL: [BuilderKind; 5] = [
        BuilderKind::Pq,
        BuilderKind::Valiant,
        BuilderKind::P1,
        BuilderKind::Q1,
        BuilderKind::Yates,
    ];

    /// Whether the builder computes intersection sums (`g(I, X)`) rather than
    /// disjoint sums (`f(X)` on labels `(∅, X)`).
    pub fn is_intersection_form(self) -> bool {
        self == BuilderKind::Pq
    }

    /// Whether this builder handles the given parameters.
    pub fn supports(self, b: u8, p: usize, q: usize) -> bool {
        match self {
            BuilderKind::Pq | BuilderKind::Yates => b >= 1,
            BuilderKind::Valiant => b >= 2 && p == 1 && q == 1,
            BuilderKind::P1 => b >= 2 && p == 1 && q >= 1,
            BuilderKind::Q1 => b >= 2 && p >= 1 && q == 1,
        }
    }

    pub fn build(self, b: u8, p: usize, q: usize) -> Result<Circuit> {
        if !self.supports(b, p, q) {
            return Err(Error::param(format!(
                "builder {self} does not support b={b}, p={p}, q={q}"
            )));
        }
        match self {
            BuilderKind::Pq => build_pq(b, p, q),
            BuilderKind::Valiant => build_valiant(b),
            BuilderKind::P1 => build_p1(b, q),
            BuilderKind::Q1 => build_q1(b, p),
            BuilderKind::Yates => build_yates(b, p, q),
        }
    }
}

impl fmt::Display for BuilderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BuilderKind::Pq => "pq",
            BuilderKind::Valiant => "valiant",
            BuilderKind::P1 => "p1",
            BuilderKind::Q1 => "q1",
            BuilderKind::Yates => "yates",
        })
    }
}

impl FromStr for BuilderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuilderKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::param(format!("unknown builder '{s}'")))
    }
}
