//! Randomised comparison of Elf search against a linear scan.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::datagen::Rng;
use crate::elf::{build_linear, search};
use crate::error::Result;
use crate::relation::{linear_scan, RangeQuery, Relation};

const CARDS: [u64; 7] = [1, 2, 3, 8, 40, 1000, 100_000];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub relations: usize,
    pub queries: usize,
    pub matches: usize,
    /// `(relation, query)` indices whose result sets differ.
    pub mismatches: Vec<(usize, usize)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Builds `cases` random relations (2 to 10 columns, up to `max_rows`
/// distinct tuples) and checks `queries_per_case` random windows on each.
pub fn verify_oracle(
    cases: usize,
    queries_per_case: usize,
    max_rows: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let mut rng = Rng::new(seed);
    let mut report = VerifyReport {
        relations: cases,
        queries: cases * queries_per_case,
        matches: 0,
        mismatches: Vec::new(),
    };
    for case in 0..cases {
        let k = 2 + rng.below(9) as usize;
        let rows = 1 + rng.below(max_rows.max(1) as u64) as usize;
        let cards: Vec<u64> = (0..k).map(|_| CARDS[rng.below(CARDS.len() as u64) as usize]).collect();
        let distinct: HashSet<Vec<u64>> = (0..rows)
            .map(|_| cards.iter().map(|&c| rng.below(c)).collect())
            .collect();
        let mut rows: Vec<Vec<u64>> = distinct.into_iter().collect();
        rows.sort_unstable();
        rng.shuffle(&mut rows);
        let rel = Relation::new(k, &rows)?;
        let elf = build_linear(&rel)?;
        for q in 0..queries_per_case {
            let bounds: Vec<(u64, u64)> = cards
                .iter()
                .map(|&c| {
                    let (a, b) = (rng.below(c + 2), rng.below(c + 2));
                    (a.min(b), a.max(b))
                })
                .collect();
            let query = RangeQuery::from_bounds(&bounds)?;
            let (got, _) = search(&elf, &query)?;
            let want = linear_scan(&rel, &query)?;
            report.matches += want.len();
            if got != want {
                report.mismatches.push((case, q));
            }
        }
    }
    Ok(report)
}
