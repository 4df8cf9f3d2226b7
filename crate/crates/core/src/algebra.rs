//! Algebraic contracts for monotone summation.
//!
//! Summation needs nothing but an associative, commutative `⊕`. The
//! applications add a product `⊙` that distributes over `⊕`; it need not
//! commute (permanents keep factors in row order).
//!
//! Every value flowing through a circuit is wrapped in [`Adjoined`], which
//! appends a formal identity to the carrier. An empty sum is therefore always
//! representable, even for semigroups without a zero.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// A commutative semigroup `(S, ⊕)`.
pub trait Semigroup: Send + Sync {
    type Value: Clone + PartialEq + Debug + Send + Sync;

    fn name(&self) -> &'static str;

    fn oplus(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
}

/// A semiring `(S, ⊕, ⊙)` with `⊕`-identity [`zero`](Semiring::zero) and
/// `⊙`-identity [`one`](Semiring::one).
pub trait Semiring: Semigroup {
    /// Whether `⊙` is asserted to commute.
    fn commutative_product(&self) -> bool;

    fn zero(&self) -> Self::Value;

    fn one(&self) -> Self::Value;

    /// `a ⊙ b`, with `a` as the left factor.
    fn otimes(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
}

/// A carrier value or the formally appended identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Adjoined<T> {
    #[default]
    Identity,
    Carrier(T),
}

impl<T> Adjoined<T> {
    pub fn is_identity(&self) -> bool {
        matches!(self, Adjoined::Identity)
    }

    pub fn carrier(&self) -> Option<&T> {
        match self {
            Adjoined::Identity => None,
            Adjoined::Carrier(v) => Some(v),
        }
    }

    pub fn into_carrier(self) -> Option<T> {
        match self {
            Adjoined::Identity => None,
            Adjoined::Carrier(v) => Some(v),
        }
    }
}

impl<T> From<Option<T>> for Adjoined<T> {
    fn from(value: Option<T>) -> Self {
        value.map_or(Adjoined::Identity, Adjoined::Carrier)
    }
}

/// `a ⊕ b` on adjoined values. The carrier operation only runs when both
/// operands are carriers.
pub fn oplus<S: Semigroup + ?Sized>(
    contract: &S,
    a: &Adjoined<S::Value>,
    b: &Adjoined<S::Value>,
) -> Result<Adjoined<S::Value>> {
    Ok(match (a, b) {
        (Adjoined::Identity, other) | (other, Adjoined::Identity) => other.clone(),
        (Adjoined::Carrier(x), Adjoined::Carrier(y)) => Adjoined::Carrier(contract.oplus(x, y)?),
    })
}

/// Folds `values` with `⊕` left to right; an empty input gives the identity.
pub fn sum<'a, S, I>(contract: &S, values: I) -> Result<Adjoined<S::Value>>
where
    S: Semigroup + ?Sized,
    S::Value: 'a,
    I: IntoIterator<Item = &'a Adjoined<S::Value>>,
{
    values
        .into_iter()
        .try_fold(Adjoined::Identity, |acc, v| oplus(contract, &acc, v))
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// `(ℕ, +, ·)` on `u64` with checked overflow.
#[derive(Debug, Clone, Copy, Default)]
pub struct NatSum;

impl Semigroup for NatSum {
    type Value = u64;

    fn name(&self) -> &'static str {
        "nat-sum"
    }

    fn oplus(&self, a: &u64, b: &u64) -> Result<u64> {
        a.checked_add(*b).ok_or(Error::Overflow("nat-sum ⊕"))
    }
}

impl Semiring for NatSum {
    fn commutative_product(&self) -> bool {
        true
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn otimes(&self, a: &u64, b: &u64) -> Result<u64> {
        a.checked_mul(*b).ok_or(Error::Overflow("nat-sum ⊙"))
    }
}

/// `(ℝ ∪ {−∞}, max, +)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxWeight;

impl Semigroup for MaxWeight {
    type Value = f64;

    fn name(&self) -> &'static str {
        "max"
    }

    fn oplus(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a.max(*b))
    }
}

impl Semiring for MaxWeight {
    fn commutative_product(&self) -> bool {
        true
    }

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    fn otimes(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a + b)
    }
}

/// `(ℝ ∪ {+∞}, min, +)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinPlus;

impl Semigroup for MinPlus {
    type Value = f64;

    fn name(&self) -> &'static str {
        "min-plus"
    }

    fn oplus(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a.min(*b))
    }
}

impl Semiring for MinPlus {
    fn commutative_product(&self) -> bool {
        true
    }

    fn zero(&self) -> f64 {
        f64::INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    fn otimes(&self, a: &f64, b: &f64) -> Result<f64> {
        Ok(a + b)
    }
}

/// A pair of an optimum weight and the number of ways it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountWeight {
    pub count: u64,
    pub weight: f64,
}

impl CountWeight {
    pub const ZERO: CountWeight = CountWeight {
        count: 0,
        weight: f64::NEG_INFINITY,
    };
    pub const ONE: CountWeight = CountWeight {
        count: 1,
        weight: 0.0,
    };

    pub fn new(count: u64, weight: f64) -> Self {
        CountWeight { count, weight }
    }
}

impl fmt::Display for CountWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.count, self.weight)
    }
}

/// Count-weight semiring: `⊕` keeps the heavier pair and adds counts on equal
/// weights, `⊙` multiplies counts and adds weights. Weights are compared
/// exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct CountWeightSemiring;

impl Semigroup for CountWeightSemiring {
    type Value = CountWeight;

    fn name(&self) -> &'static str {
        "count-weight"
    }

    fn oplus(&self, a: &CountWeight, b: &CountWeight) -> Result<CountWeight> {
        Ok(if a.weight > b.weight {
            *a
        } else if a.weight < b.weight {
            *b
        } else {
            CountWeight {
                count: a
                    .count
                    .checked_add(b.count)
                    .ok_or(Error::Overflow("count-weight ⊕"))?,
                weight: a.weight,
            }
        })
    }
}

impl Semiring for CountWeightSemiring {
    fn commutative_product(&self) -> bool {
        true
    }

    fn zero(&self) -> CountWeight {
        CountWeight::ZERO
    }

    fn one(&self) -> CountWeight {
        CountWeight::ONE
    }

    fn otimes(&self, a: &CountWeight, b: &CountWeight) -> Result<CountWeight> {
        Ok(CountWeight {
            count: a
                .count
                .checked_mul(b.count)
                .ok_or(Error::Overflow("count-weight ⊙"))?,
            weight: a.weight + b.weight,
        })
    }
}

/// A finite multiset, stored as element → multiplicity (never zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, u64>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            counts: BTreeMap::new(),
        }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn singleton(token: T) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(token, 1);
        Multiset { counts }
    }

    pub fn from_tokens(tokens: impl IntoIterator<Item = T>) -> Self {
        let mut counts = BTreeMap::new();
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        Multiset { counts }
    }

    /// Total number of tokens, counted with multiplicity.
    pub fn len(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn multiplicity(&self, token: &T) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// True when no token occurs twice.
    pub fn is_set(&self) -> bool {
        self.counts.values().all(|&c| c == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    pub fn distinct(&self) -> impl Iterator<Item = &T> {
        self.counts.keys()
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut counts = self.counts.clone();
        for (t, &c) in &other.counts {
            let slot = counts.entry(t.clone()).or_insert(0);
            *slot = slot.checked_add(c).ok_or(Error::Overflow("multiset ⊎"))?;
        }
        Ok(Multiset { counts })
    }
}

/// Multiset union over opaque tokens: the free commutative semigroup, used to
/// see exactly which summands reach each gate.
pub struct FreeMultiset<T>(PhantomData<fn() -> T>);

impl<T> FreeMultiset<T> {
    pub fn new() -> Self {
        FreeMultiset(PhantomData)
    }
}

impl<T> Default for FreeMultiset<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for FreeMultiset<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for FreeMultiset<T> {}

impl<T> Debug for FreeMultiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FreeMultiset")
    }
}

impl<T: Ord + Clone + Debug + Send + Sync> Semigroup for FreeMultiset<T> {
    type Value = Multiset<T>;

    fn name(&self) -> &'static str {
        "multiset"
    }

    fn oplus(&self, a: &Multiset<T>, b: &Multiset<T>) -> Result<Multiset<T>> {
        a.union(b)
    }
}

/// A formal sum of words with natural-number coefficients.
pub type WordBag<L> = Multiset<Vec<L>>;

impl<L: Ord + Clone> WordBag<L> {
    pub fn word(letters: impl IntoIterator<Item = L>) -> Self {
        Multiset::singleton(letters.into_iter().collect())
    }
}

/// Formal sums of words: `⊕` adds coefficients, `⊙` concatenates every pair of
/// words (left operand first). The product does not commute, so this
/// instance detects any reordering of factors.
pub struct WordSum<L>(PhantomData<fn() -> L>);

impl<L> WordSum<L> {
    pub fn new() -> Self {
        WordSum(PhantomData)
    }
}

impl<L> Default for WordSum<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L> Clone for WordSum<L> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<L> Copy for WordSum<L> {}

impl<L> Debug for WordSum<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WordSum")
    }
}

impl<L: Ord + Clone + Debug + Send + Sync> Semigroup for WordSum<L> {
    type Value = WordBag<L>;

    fn name(&self) -> &'static str {
        "word-sum"
    }

    fn oplus(&self, a: &WordBag<L>, b: &WordBag<L>) -> Result<WordBag<L>> {
        a.union(b)
    }
}

impl<L: Ord + Clone + Debug + Send + Sync> Semiring for WordSum<L> {
    fn commutative_product(&self) -> bool {
        false
    }

    fn zero(&self) -> WordBag<L> {
        Multiset::default()
    }

    fn one(&self) -> WordBag<L> {
        Multiset::singleton(Vec::new())
    }

    fn otimes(&self, a: &WordBag<L>, b: &WordBag<L>) -> Result<WordBag<L>> {
        let mut counts = BTreeMap::new();
        for (u, cu) in a.iter() {
            for (v, cv) in b.iter() {
                let mut word = u.clone();
                word.extend(v.iter().cloned());
                let c = cu.checked_mul(cv).ok_or(Error::Overflow("word-sum ⊙"))?;
                let slot = counts.entry(word).or_insert(0u64);
                *slot = slot.checked_add(c).ok_or(Error::Overflow("word-sum ⊙"))?;
            }
        }
        Ok(Multiset { counts })
    }
}

/// A weight together with the object that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witnessed<W> {
    pub weight: f64,
    pub witness: W,
}

/// Maximum weight; ties go to the smallest witness so the result does not
/// depend on summation order. Weights must not be NaN.
pub struct WitnessMax<W>(PhantomData<fn() -> W>);

impl<W> WitnessMax<W> {
    pub fn new() -> Self {
        WitnessMax(PhantomData)
    }
}

impl<W> Default for WitnessMax<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W> Clone for WitnessMax<W> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<W> Copy for WitnessMax<W> {}

impl<W> Debug for WitnessMax<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WitnessMax")
    }
}

impl<W: Ord + Clone + Debug + Send + Sync> Semigroup for WitnessMax<W> {
    type Value = Witnessed<W>;

    fn name(&self) -> &'static str {
        "witness-max"
    }

    fn oplus(&self, a: &Witnessed<W>, b: &Witnessed<W>) -> Result<Witnessed<W>> {
        let a_wins = a.weight > b.weight || (a.weight == b.weight && a.witness <= b.witness);
        Ok(if a_wins { a.clone() } else { b.clone() })
    }
}

/// Wraps a contract and counts carrier `⊕` and `⊙` calls. Folding in the
/// formal identity never reaches the carrier and is not counted.
#[derive(Debug, Default)]
pub struct Counting<S> {
    inner: S,
    adds: AtomicU64,
    mults: AtomicU64,
}

impl<S> Counting<S> {
    pub fn new(inner: S) -> Self {
        Counting {
            inner,
            adds: AtomicU64::new(0),
            mults: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn adds(&self) -> u64 {
        self.adds.load(Ordering::Relaxed)
    }

    pub fn mults(&self) -> u64 {
        self.mults.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.adds.store(0, Ordering::Relaxed);
        self.mults.store(0, Ordering::Relaxed);
    }
}

impl<S: Semigroup> Semigroup for Counting<S> {
    type Value = S::Value;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn oplus(&self, a: &S::Value, b: &S::Value) -> Result<S::Value> {
        self.adds.fetch_add(1, Ordering::Relaxed);
        self.inner.oplus(a, b)
    }
}

impl<S: Semiring> Semiring for Counting<S> {
    fn commutative_product(&self) -> bool {
        self.inner.commutative_product()
    }

    fn zero(&self) -> S::Value {
        self.inner.zero()
    }

    fn one(&self) -> S::Value {
        self.inner.one()
    }

    fn otimes(&self, a: &S::Value, b: &S::Value) -> Result<S::Value> {
        self.mults.fetch_add(1, Ordering::Relaxed);
        self.inner.otimes(a, b)
    }
}

// ---------------------------------------------------------------------------
// Axiom checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    AddAssociative,
    AddCommutative,
    AddIdentity,
    MulAssociative,
    MulIdentity,
    LeftDistributive,
    RightDistributive,
    Annihilation,
    MulCommutative,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::AddAssociative => "⊕ associative",
            Axiom::AddCommutative => "⊕ commutative",
            Axiom::AddIdentity => "⊕ identity",
            Axiom::MulAssociative => "⊙ associative",
            Axiom::MulIdentity => "⊙ identity",
            Axiom::LeftDistributive => "⊙ left-distributes over ⊕",
            Axiom::RightDistributive => "⊙ right-distributes over ⊕",
            Axiom::Annihilation => "zero annihilates under ⊙",
            Axiom::MulCommutative => "⊙ commutative",
        })
    }
}

#[derive(Debug, Clone)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub trials: usize,
    /// First failing sample, rendered for humans.
    pub counterexample: Option<String>,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(AxiomOutcome::passed)
    }

    pub fn outcome(&self, axiom: Axiom) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| o.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            match &o.counterexample {
                None => writeln!(f, "pass  {} ({} trials)", o.axiom, o.trials)?,
                Some(c) => writeln!(f, "FAIL  {}: {c}", o.axiom)?,
            }
        }
        Ok(())
    }
}

struct Checker {
    axiom: Axiom,
    counterexample: Option<String>,
}

impl Checker {
    fn new(axiom: Axiom) -> Self {
        Checker {
            axiom,
            counterexample: None,
        }
    }

    fn record<V: Debug + PartialEq>(&mut self, lhs: Result<V>, rhs: Result<V>, inputs: &str) {
        if self.counterexample.is_some() {
            return;
        }
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            (Ok(l), Ok(r)) => {
                self.counterexample = Some(format!("{inputs}: {l:?} ≠ {r:?}"));
            }
            (Err(e), _) | (_, Err(e)) => {
                self.counterexample = Some(format!("{inputs}: {e}"));
            }
        }
    }

    fn finish(self, trials: usize) -> AxiomOutcome {
        AxiomOutcome {
            axiom: self.axiom,
            trials,
            counterexample: self.counterexample,
        }
    }
}

/// Checks associativity and commutativity of `⊕` on `trials` seeded samples.
pub fn check_semigroup_axioms<S, F>(
    contract: &S,
    mut sampler: F,
    trials: usize,
    seed: u64,
) -> AxiomReport
where
    S: Semigroup,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assoc = Checker::new(Axiom::AddAssociative);
    let mut comm = Checker::new(Axiom::AddCommutative);
    for _ in 0..trials {
        let (x, y, z) = (sampler(&mut rng), sampler(&mut rng), sampler(&mut rng));
        let inputs = format!("x={x:?}, y={y:?}, z={z:?}");
        let lhs = contract.oplus(&x, &y).and_then(|xy| contract.oplus(&xy, &z));
        let rhs = contract.oplus(&y, &z).and_then(|yz| contract.oplus(&x, &yz));
        assoc.record(lhs, rhs, &inputs);
        comm.record(contract.oplus(&x, &y), contract.oplus(&y, &x), &inputs);
    }
    AxiomReport {
        outcomes: vec![assoc.finish(trials), comm.finish(trials)],
    }
}

/// Checks every semiring law on `trials` seeded triples. `⊙`-commutativity is
/// only checked when the contract claims it.
pub fn check_axioms<S, F>(contract: &S, mut sampler: F, trials: usize, seed: u64) -> AxiomReport
where
    S: Semiring,
    F: FnMut(&mut ChaCha8Rng) -> S::Value,
{
    let mut report = check_semigroup_axioms(contract, &mut sampler, trials, seed);
    // fresh stream so the semigroup part stays comparable across contracts
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let zero = contract.zero();
    let one = contract.one();
    let mut add_id = Checker::new(Axiom::AddIdentity);
    let mut mul_assoc = Checker::new(Axiom::MulAssociative);
    let mut mul_id = Checker::new(Axiom::MulIdentity);
    let mut left = Checker::new(Axiom::LeftDistributive);
    let mut right = Checker::new(Axiom::RightDistributive);
    let mut annihilate = Checker::new(Axiom::Annihilation);
    let mut mul_comm = Checker::new(Axiom::MulCommutative);
    let s = contract;
    for _ in 0..trials {
        let (x, y, z) = (sampler(&mut rng), sampler(&mut rng), sampler(&mut rng));
        let inputs = format!("x={x:?}, y={y:?}, z={z:?}");

        add_id.record(s.oplus(&x, &zero), Ok(x.clone()), &inputs);
        add_id.record(s.oplus(&zero, &x), Ok(x.clone()), &inputs);

        mul_assoc.record(
            s.otimes(&x, &y).and_then(|xy| s.otimes(&xy, &z)),
            s.otimes(&y, &z).and_then(|yz| s.otimes(&x, &yz)),
            &inputs,
        );

        mul_id.record(s.otimes(&x, &one), Ok(x.clone()), &inputs);
        mul_id.record(s.otimes(&one, &x), Ok(x.clone()), &inputs);

        left.record(
            s.oplus(&y, &z).and_then(|yz| s.otimes(&x, &yz)),
            s.otimes(&x, &y)
                .and_then(|xy| s.otimes(&x, &z).and_then(|xz| s.oplus(&xy, &xz))),
            &inputs,
        );
        right.record(
            s.oplus(&x, &y).and_then(|xy| s.otimes(&xy, &z)),
            s.otimes(&x, &z)
                .and_then(|xz| s.otimes(&y, &z).and_then(|yz| s.oplus(&xz, &yz))),
            &inputs,
        );

        annihilate.record(s.otimes(&x, &zero), Ok(zero.clone()), &inputs);
        annihilate.record(s.otimes(&zero, &x), Ok(zero.clone()), &inputs);

        if s.commutative_product() {
            mul_comm.record(s.otimes(&x, &y), s.otimes(&y, &x), &inputs);
        }
    }
    report.outcomes.extend([
        add_id.finish(trials),
        mul_assoc.finish(trials),
        mul_id.finish(trials),
        left.finish(trials),
        right.finish(trials),
        annihilate.finish(trials),
    ]);
    if s.commutative_product() {
        report.outcomes.push(mul_comm.finish(trials));
    }
    report
}

/// Samplers that only produce values on which the instance's float arithmetic
/// is exact (small integers and infinities).
pub mod samplers {
    use super::*;

    pub fn nat(rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(0..1000)
    }

    fn small_weight(rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-8i32..=8) as f64
    }

    pub fn max_weight(rng: &mut ChaCha8Rng) -> f64 {
        if rng.gen_ratio(1, 10) {
            f64::NEG_INFINITY
        } else {
            small_weight(rng)
        }
    }

    pub fn min_plus(rng: &mut ChaCha8Rng) -> f64 {
        if rng.gen_ratio(1, 10) {
            f64::INFINITY
        } else {
            small_weight(rng)
        }
    }

    pub fn count_weight(rng: &mut ChaCha8Rng) -> CountWeight {
        match rng.gen_range(0..10) {
            0 => CountWeight::ZERO,
            1 => CountWeight::ONE,
            _ => CountWeight::new(rng.gen_range(0..50), small_weight(rng)),
        }
    }

    pub fn word_bag(rng: &mut ChaCha8Rng) -> WordBag<char> {
        let words = rng.gen_range(0..3);
        Multiset::from_tokens((0..words).map(|_| {
            let len = rng.gen_range(0..3);
            (0..len)
                .map(|_| *['a', 'b', 'c'].get(rng.gen_range(0..3)).unwrap())
                .collect::<Vec<_>>()
        }))
    }

    pub fn multiset(rng: &mut ChaCha8Rng) -> Multiset<u8> {
        let len = rng.gen_range(0..4);
        Multiset::from_tokens((0..len).map(|_| rng.gen_range(0..5)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(count: u64, weight: f64) -> CountWeight {
        CountWeight::new(count, weight)
    }

    #[test]
    fn identity_absorbs() {
        let got = oplus(&NatSum, &Adjoined::Identity, &Adjoined::Carrier(5)).unwrap();
        assert_eq!(got, Adjoined::Carrier(5));
        let got = oplus(&NatSum, &Adjoined::Identity, &Adjoined::Identity).unwrap();
        assert_eq!(got, Adjoined::Identity);
        assert_eq!(sum(&NatSum, [].iter()).unwrap(), Adjoined::Identity);
    }

    #[test]
    fn count_weight_oplus_cases() {
        let s = CountWeightSemiring;
        assert_eq!(s.oplus(&cw(2, 5.0), &cw(3, 5.0)).unwrap(), cw(5, 5.0));
        assert_eq!(s.oplus(&cw(2, 5.0), &cw(3, 7.0)).unwrap(), cw(3, 7.0));
        assert_eq!(s.oplus(&cw(3, 7.0), &cw(2, 5.0)).unwrap(), cw(3, 7.0));
        assert_eq!(s.oplus(&CountWeight::ZERO, &CountWeight::ZERO).unwrap(), CountWeight::ZERO);
    }

    #[test]
    fn count_weight_otimes_cases() {
        let s = CountWeightSemiring;
        assert_eq!(s.otimes(&cw(2, 5.0), &cw(3, 7.0)).unwrap(), cw(6, 12.0));
        assert_eq!(s.otimes(&cw(4, 9.0), &CountWeight::ZERO).unwrap(), CountWeight::ZERO);
    }

    #[test]
    fn count_overflow_is_an_error() {
        let s = CountWeightSemiring;
        let big = cw(u64::MAX, 1.0);
        assert_eq!(s.oplus(&big, &cw(1, 1.0)), Err(Error::Overflow("count-weight ⊕")));
        assert!(s.otimes(&big, &cw(2, 0.0)).is_err());
        assert!(NatSum.oplus(&u64::MAX, &1).is_err());
    }

    #[test]
    fn word_sum_concatenates_in_order() {
        let s = WordSum::<char>::new();
        let ad = WordBag::word("ad".chars());
        let bc = WordBag::word("bc".chars());
        assert_eq!(s.otimes(&ad, &bc).unwrap(), WordBag::word("adbc".chars()));
        assert_ne!(s.otimes(&ad, &bc).unwrap(), s.otimes(&bc, &ad).unwrap());
    }

    #[test]
    fn witness_max_prefers_smaller_witness_on_ties() {
        let s = WitnessMax::<u32>::new();
        let a = Witnessed { weight: 4.0, witness: 7 };
        let b = Witnessed { weight: 4.0, witness: 3 };
        let c = Witnessed { weight: 5.0, witness: 9 };
        assert_eq!(s.oplus(&a, &b).unwrap(), b);
        assert_eq!(s.oplus(&b, &a).unwrap(), b);
        assert_eq!(s.oplus(&a, &c).unwrap(), c);
    }

    #[test]
    fn multiset_union_keeps_every_token() {
        let a = Multiset::from_tokens([1, 2, 2]);
        let b = Multiset::from_tokens([2, 3]);
        let u = FreeMultiset::new().oplus(&a, &b).unwrap();
        assert_eq!(u.len(), a.len() + b.len());
        assert_eq!(u.multiplicity(&2), 3);
        assert!(!u.is_set());
    }

    #[test]
    fn count_weight_passes_all_axioms() {
        let report = check_axioms(&CountWeightSemiring, samplers::count_weight, 1000, 1);
        assert!(report.all_passed(), "{report}");
        assert!(report.outcome(Axiom::MulCommutative).is_some());
    }

    #[test]
    fn word_sum_passes_without_commutative_product() {
        let report = check_axioms(&WordSum::<char>::new(), samplers::word_bag, 1000, 2);
        assert!(report.all_passed(), "{report}");
        assert!(report.outcome(Axiom::MulCommutative).is_none());
    }

    #[test]
    fn shipped_instances_pass() {
        assert!(check_axioms(&NatSum, samplers::nat, 1000, 3).all_passed());
        assert!(check_axioms(&MaxWeight, samplers::max_weight, 1000, 4).all_passed());
        assert!(check_axioms(&MinPlus, samplers::min_plus, 1000, 5).all_passed());
        let r = check_semigroup_axioms(&FreeMultiset::<u8>::new(), samplers::multiset, 1000, 6);
        assert!(r.all_passed(), "{r}");
        let r = check_semigroup_axioms(
            &WitnessMax::<u8>::new(),
            |rng| Witnessed {
                weight: rng.gen_range(0..3) as f64,
                witness: rng.gen_range(0..4),
            },
            1000,
            7,
        );
        assert!(r.all_passed(), "{r}");
    }

    struct Subtraction;

    impl Semigroup for Subtraction {
        type Value = i64;
        fn name(&self) -> &'static str {
            "broken"
        }
        fn oplus(&self, a: &i64, b: &i64) -> Result<i64> {
            Ok(a - b)
        }
    }

    impl Semiring for Subtraction {
        fn commutative_product(&self) -> bool {
            true
        }
        fn zero(&self) -> i64 {
            0
        }
        fn one(&self) -> i64 {
            1
        }
        fn otimes(&self, a: &i64, b: &i64) -> Result<i64> {
            Ok(a * b)
        }
    }

    #[test]
    fn broken_instance_is_reported_not_raised() {
        let report = check_axioms(&Subtraction, |rng| rng.gen_range(-20..20), 200, 8);
        assert!(!report.all_passed());
        let assoc = report.outcome(Axiom::AddAssociative).unwrap();
        let comm = report.outcome(Axiom::AddCommutative).unwrap();
        assert!(assoc.counterexample.is_some() && comm.counterexample.is_some());
        assert!(report.outcome(Axiom::MulAssociative).unwrap().passed());
    }
}
