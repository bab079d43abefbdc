//! Fixtures shared by the criterion benches.

use elf_core::datagen::{domain_sizes, gen_query_batch, gen_relation, ColumnSpec, QueryBatchSpec};
use elf_core::{RangeQuery, Relation};

/// A uniform relation with `dims - 1` columns of cardinality `card` plus a key.
pub fn uniform_relation(dims: usize, card: u64, rows: usize, seed: u64) -> (Vec<ColumnSpec>, Relation) {
    let mut specs = vec![ColumnSpec::uniform(card); dims - 1];
    specs.push(ColumnSpec::UniqueKey);
    let rel = gen_relation(&specs, rows, seed).expect("valid specs");
    (specs, rel)
}

pub fn query_batch(specs: &[ColumnSpec], rows: usize, n: usize, lo: f64, hi: f64, seed: u64) -> Vec<RangeQuery> {
    let domains = domain_sizes(specs, rows).expect("valid specs");
    let spec = QueryBatchSpec::uniform(n, specs.len(), lo, hi, seed);
    gen_query_batch(&spec, &domains).expect("valid batch")
}
