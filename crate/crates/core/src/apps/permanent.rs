//! Permanents of rectangular matrices.
//!
//! `per A = ⊕_σ a_{0σ(0)} ⊙ … ⊙ a_{k−1,σ(k−1)}` over injective
//! `σ : [k] → [n]`. The first `⌊k/2⌋` rows are tabulated per column set `X`,
//! the rest per column set `Y`, and disjoint pairs are joined by
//! [`pair_sum`]. Factors always appear in row order, so `⊙` may be
//! noncommutative.

use std::collections::BTreeMap;

use crate::algebra::{oplus, Adjoined, Semiring};
use crate::summation::{pair_sum, DisjointInput, Mode};
use crate::universe::{Subset, Universe};
use crate::{Error, Result};

/// Largest `n!/(n−k)!` the brute-force permanent accepts.
pub const ORACLE_LIMIT: u64 = 10_000_000;

/// A `k × n` matrix with `1 ≤ k ≤ n`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix<V> {
    rows: usize,
    cols: usize,
    entries: Vec<V>,
}

impl<V> RectMatrix<V> {
    pub fn new(rows: usize, cols: usize, entries: Vec<V>) -> Result<Self> {
        if rows == 0 || rows > cols {
            return Err(Error::param(format!(
                "need 1 ≤ k ≤ n, got k={rows}, n={cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::param(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RectMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<V>>) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("rows have different lengths"));
        }
        Self::new(k, n, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &V {
        &self.entries[row * self.cols + col]
    }
}

/// `T(X) = ⊕ a_{r0,σ(r0)} ⊙ … ⊙ a_{r_last,σ(r_last)}` over bijections from
/// `rows` onto `X`.
fn row_table<S: Semiring>(
    matrix: &RectMatrix<S::Value>,
    rows: std::ops::Range<usize>,
    semiring: &S,
    universe: Universe,
) -> Result<DisjointInput<S::Value>> {
    let level = universe.height();
    let mut layer: BTreeMap<Subset, Adjoined<S::Value>> = BTreeMap::new();
    layer.insert(Subset::empty(level), Adjoined::Carrier(semiring.one()));
    for r in rows.clone() {
        let mut next: BTreeMap<Subset, Adjoined<S::Value>> = BTreeMap::new();
        for (set, value) in &layer {
            let Adjoined::Carrier(prefix) = value else {
                continue;
            };
            for col in 0..matrix.cols as u64 {
                if set.contains(col) {
                    continue;
                }
                let term = Adjoined::Carrier(semiring.otimes(prefix, matrix.get(r, col as usize))?);
                let slot = next.entry(set.with(col)).or_default();
                *slot = oplus(semiring, slot, &term)?;
            }
        }
        layer = next;
    }
    let mut table = DisjointInput::new(universe.n(), rows.len())?;
    for (set, value) in layer {
        if let Adjoined::Carrier(v) = value {
            table.insert(set, v)?;
        }
    }
    Ok(table)
}

/// The permanent, by splitting the rows at `⌊k/2⌋`.
pub fn permanent<S: Semiring>(matrix: &RectMatrix<S::Value>, semiring: &S, mode: Mode) -> Result<S::Value> {
    let universe = Universe::new(matrix.cols as u64)?;
    let split = matrix.rows / 2;
    let first = row_table(matrix, 0..split, semiring, universe)?;
    let second = row_table(matrix, split..matrix.rows, semiring, universe)?;
    pair_sum(&first, &second, semiring, mode)
}

/// Sums over every injection, factors in row order.
pub fn oracle_permanent<S: Semiring>(matrix: &RectMatrix<S::Value>, semiring: &S) -> Result<S::Value> {
    let (k, n) = (matrix.rows as u64, matrix.cols as u64);
    let terms = (n - k + 1..=n).try_fold(1u64, |acc, f| acc.checked_mul(f));
    if terms.is_none_or(|t| t > ORACLE_LIMIT) {
        return Err(Error::ScaleGuard(format!(
            "{k}×{n} permanent has more than {ORACLE_LIMIT} injections"
        )));
    }
    let mut used = vec![false; matrix.cols];
    let mut total = Adjoined::Identity;
    inject(matrix, semiring, 0, None, &mut used, &mut total)?;
    Ok(total.into_carrier().unwrap_or_else(|| semiring.zero()))
}

fn inject<S: Semiring>(
    matrix: &RectMatrix<S::Value>,
    semiring: &S,
    row: usize,
    prefix: Option<&S::Value>,
    used: &mut [bool],
    total: &mut Adjoined<S::Value>,
) -> Result<()> {
    if row == matrix.rows {
        let term = Adjoined::Carrier(prefix.cloned().unwrap_or_else(|| semiring.one()));
        *total = oplus(semiring, total, &term)?;
        return Ok(());
    }
    for col in 0..matrix.cols {
        if used[col] {
            continue;
        }
        let entry = matrix.get(row, col);
        let product = match prefix {
            Some(p) => semiring.otimes(p, entry)?,
            None => entry.clone(),
        };
        used[col] = true;
        inject(matrix, semiring, row + 1, Some(&product), used, total)?;
        used[col] = false;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{NatSum, WordBag, WordSum};

    #[test]
    fn two_by_two() {
        let m = RectMatrix::from_rows(vec![vec![1u64, 2], vec![3, 4]]).unwrap();
        assert_eq!(permanent(&m, &NatSum, Mode::Circuit).unwrap(), 10);
        assert_eq!(oracle_permanent(&m, &NatSum).unwrap(), 10);
    }

    #[test]
    fn single_row_is_the_row_sum() {
        let m = RectMatrix::from_rows(vec![vec![3u64, 5, 9]]).unwrap();
        assert_eq!(permanent(&m, &NatSum, Mode::Direct).unwrap(), 17);
        assert_eq!(oracle_permanent(&m, &NatSum).unwrap(), 17);
    }

    #[test]
    fn identity_matrix() {
        let m = RectMatrix::from_rows(vec![vec![1u64, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(permanent(&m, &NatSum, Mode::Circuit).unwrap(), 1);
        assert_eq!(oracle_permanent(&m, &NatSum).unwrap(), 1);
    }

    #[test]
    fn symbolic_words_keep_row_order() {
        let w = |c: char| WordBag::word([c]);
        let m = RectMatrix::from_rows(vec![vec![w('a'), w('b')], vec![w('c'), w('d')]]).unwrap();
        let expected = WordBag::from_tokens([vec!['a', 'd'], vec!['b', 'c']]);
        let s = WordSum::new();
        assert_eq!(permanent(&m, &s, Mode::Circuit).unwrap(), expected);
        assert_eq!(oracle_permanent(&m, &s).unwrap(), expected);
    }

    #[test]
    fn shape_is_checked() {
        assert!(RectMatrix::from_rows(vec![vec![1u64], vec![2]]).is_err());
        assert!(RectMatrix::<u64>::new(0, 3, vec![]).is_err());
        assert!(RectMatrix::new(1, 3, vec![1u64, 2]).is_err());
    }

    #[test]
    fn oracle_guard() {
        let m = RectMatrix::new(9, 12, vec![1u64; 108]).unwrap();
        assert!(matches!(oracle_permanent(&m, &NatSum), Err(Error::ScaleGuard(_))));
    }
}
