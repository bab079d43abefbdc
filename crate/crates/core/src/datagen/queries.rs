use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{RangeQuery, Window};

use super::rng::Rng;

/// Target selectivity interval `[lo, hi]` for one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelRange {
    pub lo: f64,
    pub hi: f64,
}

impl SelRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        SelRange { lo, hi }
    }

    pub fn fixed(s: f64) -> Self {
        SelRange { lo: s, hi: s }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryBatchSpec {
    pub n_queries: usize,
    pub sel_range: Vec<SelRange>,
    pub seed: u64,
    /// Pin the first window to start at 0.
    #[serde(default)]
    pub anchor_first: bool,
}

impl QueryBatchSpec {
    /// Same selectivity interval on every dimension.
    pub fn uniform(n_queries: usize, dims: usize, lo: f64, hi: f64, seed: u64) -> Self {
        QueryBatchSpec {
            n_queries,
            sel_range: vec![SelRange::new(lo, hi); dims],
            seed,
            anchor_first: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.sel_range.iter().enumerate() {
            if !(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "dimension {i}: selectivity range [{}, {}] not inside (0, 1]",
                    r.lo, r.hi
                )));
            }
        }
        Ok(())
    }
}

/// Random windows of target selectivity, placed uniformly inside each
/// domain `0..domains[i]`.
pub fn gen_query_batch(spec: &QueryBatchSpec, domains: &[u64]) -> Result<Vec<RangeQuery>> {
    spec.validate()?;
    if spec.sel_range.len() != domains.len() {
        return Err(Error::DimensionMismatch {
            expected: domains.len(),
            found: spec.sel_range.len(),
        });
    }
    if let Some(&d) = domains.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidCardinality(d as f64));
    }
    let mut rng = Rng::new(spec.seed);
    let mut out = Vec::with_capacity(spec.n_queries);
    for _ in 0..spec.n_queries {
        let mut windows = Vec::with_capacity(domains.len());
        for (dim, (&dom, range)) in domains.iter().zip(&spec.sel_range).enumerate() {
            let sel = rng.uniform(range.lo, range.hi);
            let width = ((sel * dom as f64).round() as u64).clamp(1, dom);
            let start = rng.below(dom - width + 1);
            let lower = if spec.anchor_first && dim == 0 { 0 } else { start };
            windows.push(Window::new(lower, lower + width - 1)?);
        }
        out.push(RangeQuery::new(windows)?);
    }
    Ok(out)
}

/// Window width over domain size, per dimension.
pub fn window_selectivities(query: &RangeQuery, domains: &[u64]) -> Vec<f64> {
    query
        .windows()
        .iter()
        .zip(domains)
        .map(|(w, &d)| (w.width() as f64 / d as f64).min(1.0))
        .collect()
}

/// One query per line: `l1,u1,l2,u2,...`.
pub fn write_queries_csv<W: Write>(queries: &[RangeQuery], writer: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).flexible(true).from_writer(writer);
    for q in queries {
        out.write_record(
            q.windows()
                .iter()
                .flat_map(|w| [w.lower.to_string(), w.upper.to_string()]),
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_queries_csv<R: Read>(reader: R) -> Result<Vec<RangeQuery>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let nums = rec
            .iter()
            .map(|f| f.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("query line {}: {e}", line + 1)))?;
        if nums.is_empty() || nums.len() % 2 != 0 {
            return Err(Error::Format(format!(
                "query line {}: expected lower,upper pairs",
                line + 1
            )));
        }
        let bounds: Vec<(u64, u64)> = nums.chunks(2).map(|p| (p[0], p[1])).collect();
        out.push(RangeQuery::from_bounds(&bounds)?);
    }
    Ok(out)
}
