//! Seeded synthetic relations and query batches.

mod columns;
mod queries;
pub mod rng;

pub use columns::{column_pmf, domain_sizes, gen_relation, validate_specs, ColumnSpec};
pub use queries::{
    gen_query_batch, read_queries_csv, window_selectivities, write_queries_csv, QueryBatchSpec,
    SelRange,
};
pub use rng::Rng;
