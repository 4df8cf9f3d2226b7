//! Applications of disjoint summation.
//!
//! - [`kpath`]: number and weight of the heaviest simple `k`-edge paths.
//! - [`permanent`]: permanents of `k × n` matrices over any semiring.
//! - [`featsel`]: best feature subsets avoiding an excluded set.

pub mod featsel;
pub mod kpath;
pub mod permanent;

pub use featsel::{featsel_precompute, featsel_query, FeatselTable, ScoreTable};
pub use kpath::{half_path_table, kpath_count, oracle_kpath, Graph};
pub use permanent::{oracle_permanent, permanent, RectMatrix};
