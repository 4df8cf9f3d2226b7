//! Monotone arithmetic circuits for `(p,q)`-disjoint and `(p,q)`-intersection
//! summation over commutative semigroups.
//!
//! The ground set `[n]` is identified with the leaves of a perfect binary tree
//! of height `b`. Summands indexed by small subsets are assembled bottom-up by
//! disjoint unions of the families that project to the same set of tree nodes,
//! which yields a circuit of `O((n^p + n^q) log n)` gates using only `⊕`.
//!
//! Layout:
//! - [`algebra`]: semigroup and semiring contracts, shipped instances, axiom checker.
//! - [`universe`]: prefix strings, subsets, projection, span and child families.
//! - [`circuit`]: the gate DAG, evaluation, validation, serialization.
//! - [`builders`]: the tree-projection circuit and the baseline constructions.
//! - [`summation`]: user-facing summation over `[n]`, direct mode and oracles.
//! - [`apps`]: heaviest k-paths, rectangular permanents, feature selection.
//! - [`formats`]: text encodings for tables, graphs, matrices and scores.

pub mod algebra;
pub mod apps;
pub mod builders;
pub mod circuit;
mod error;
pub mod formats;
pub mod summation;
pub mod universe;

pub use error::{Error, Result};
