//! Elf range index, its search-cost model, synthetic workloads and the
//! evaluation harness that compares predicted against measured cost.

// `!(x >= lo)` rejects NaN along with small values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod costmodel;
pub mod datagen;
pub mod elf;
pub mod error;
pub mod eval;
pub mod relation;

pub use elf::{build_linear, search, LinearElf, PrefixTreeElf, SearchStats};
pub use error::{Error, Result};
pub use relation::{linear_scan, Predicate, RangeQuery, Relation, Tid, Window};
