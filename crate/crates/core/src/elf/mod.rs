//! The Elf: a fixed-height prefix tree over all attribute values of a
//! relation, its flat in-memory layout, and the instrumented range search.

mod census;
mod linear;
mod search;
mod tree;

pub use census::{structural_census, write_census_csv, CensusLevel};
pub use linear::{linearize, LinearElf};
pub use search::{search, search_into, SearchStats};
pub use tree::{Node, NodeId, PrefixTreeElf};

use crate::error::Result;
use crate::relation::Relation;

/// Builds and linearises the Elf of a relation.
pub fn build_linear(rel: &Relation) -> Result<LinearElf> {
    linearize(&PrefixTreeElf::build(rel)?)
}
