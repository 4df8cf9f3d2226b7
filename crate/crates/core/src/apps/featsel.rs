//! Best-scoring feature subsets under exclusion constraints.
//!
//! A branch-and-bound search repeatedly asks for the best subset `X` with
//! `|X| ≤ p` that avoids an excluded set `E`. One intersection summation
//! with `g(∅, X) = (score(X), X)` answers every `|E| ≤ q` at once.

use std::collections::BTreeMap;

use log::warn;

use crate::algebra::{sum, Adjoined, Counting, WitnessMax, Witnessed};
use crate::summation::{intersection_sum, IntersectionInput, Mode, OutputTable};
use crate::universe::{Subset, Universe};
use crate::{Error, Result};

/// Scores of feature subsets over `[n]`; unscored subsets are never chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    universe: Universe,
    scores: BTreeMap<Subset, f64>,
}

impl ScoreTable {
    pub fn new(n: u64) -> Result<Self> {
        Ok(ScoreTable {
            universe: Universe::new(n)?,
            scores: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn insert(&mut self, set: Subset, score: f64) -> Result<()> {
        let u = self.universe;
        if set.level() != u.height() || u.mentions_phantom(&set) {
            return Err(Error::InvalidKey(format!(
                "{set} is not a subset of [{}]",
                u.n()
            )));
        }
        if score.is_nan() {
            return Err(Error::InvalidKey(format!("score of {set} is NaN")));
        }
        self.scores.insert(set, score);
        Ok(())
    }

    pub fn get(&self, set: &Subset) -> Option<f64> {
        self.scores.get(set).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Subset, f64)> {
        self.scores.iter().map(|(s, &v)| (s, v))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.scores.keys().map(Subset::len).max().unwrap_or(0)
    }

    /// Scans every scored `X` with `X ∩ excluded = ∅`, `forced ⊆ X` and
    /// `|X| ≤ p`. Returns the best and the number of carrier `⊕` calls.
    pub fn brute_force(
        &self,
        p: usize,
        forced: &Subset,
        excluded: &Subset,
    ) -> Result<(Option<Witnessed<Subset>>, u64)> {
        let contract = Counting::new(WitnessMax::<Subset>::new());
        let terms: Vec<Adjoined<Witnessed<Subset>>> = self
            .scores
            .iter()
            .filter(|(x, _)| x.len() <= p && x.is_disjoint(excluded) && forced.is_subset(x))
            .map(|(x, &score)| {
                Adjoined::Carrier(Witnessed {
                    weight: score,
                    witness: x.clone(),
                })
            })
            .collect();
        let best = sum(&contract, &terms)?.into_carrier();
        Ok((best, contract.adds()))
    }
}

/// Answers for every excluded set of size at most `q`.
#[derive(Debug, Clone)]
pub struct FeatselTable {
    p: usize,
    q: usize,
    answers: OutputTable<Witnessed<Subset>>,
    scores: ScoreTable,
    ops: u64,
}

impl FeatselTable {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn universe(&self) -> Universe {
        self.scores.universe
    }

    pub fn scores(&self) -> &ScoreTable {
        &self.scores
    }

    /// Carrier `⊕` calls spent by the precomputation.
    pub fn ops(&self) -> u64 {
        self.ops
    }
}

/// Runs one intersection summation with `g(∅, X) = (score(X), X)`.
pub fn featsel_precompute(scores: &ScoreTable, p: usize, q: usize, mode: Mode) -> Result<FeatselTable> {
    if scores.max_size() > p {
        return Err(Error::param(format!(
            "scores include sets of size {} > p={p}",
            scores.max_size()
        )));
    }
    let u = scores.universe;
    let mut g = IntersectionInput::new(u.n(), p, q)?;
    let empty = Subset::empty(u.height());
    for (x, score) in scores.iter() {
        g.insert(
            empty.clone(),
            x.clone(),
            Witnessed {
                weight: score,
                witness: x.clone(),
            },
        )?;
    }
    let contract = Counting::new(WitnessMax::<Subset>::new());
    let answers = intersection_sum(&g, &contract, mode)?;
    Ok(FeatselTable {
        p,
        q,
        answers,
        scores: scores.clone(),
        ops: contract.adds(),
    })
}

/// Best `(score, X)` with `X ∩ excluded = ∅`; `None` when no scored set
/// qualifies.
pub fn featsel_query(table: &FeatselTable, excluded: &Subset) -> Result<Option<Witnessed<Subset>>> {
    if excluded.len() > table.q {
        return Err(Error::param(format!(
            "|E| = {} exceeds q = {}",
            excluded.len(),
            table.q
        )));
    }
    let u = table.universe();
    if excluded.level() != u.height() || u.mentions_phantom(excluded) {
        return Err(Error::InvalidKey(format!("{excluded} is not a subset of [{}]", u.n())));
    }
    Ok(table
        .answers
        .get(excluded)
        .and_then(|v| v.carrier().cloned()))
}

/// Like [`featsel_query`] but also requires `forced ⊆ X`. Forced sets are not
/// precomputed; a nonempty one is answered by scanning the scores.
pub fn featsel_query_forced(
    table: &FeatselTable,
    forced: &Subset,
    excluded: &Subset,
) -> Result<Option<Witnessed<Subset>>> {
    if forced.is_empty() {
        return featsel_query(table, excluded);
    }
    warn!("forced set {forced} is not precomputed; scanning all scores");
    Ok(table.scores.brute_force(table.p, forced, excluded)?.0)
}
