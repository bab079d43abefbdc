use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::relation::{RangeQuery, Tid, Window};

use super::linear::{LinearElf, FLAG, PAYLOAD};

/// Per-depth counters collected by one search. Index `i` holds depth `i + 1`;
/// the last slot is depth `k + 1`, where depth-`k` lists hand over tuple IDs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Descents into a node: dimension-list scans and monolist checks.
    pub visits: Vec<u64>,
    /// Descents that landed on a monolist.
    pub mono: Vec<u64>,
    /// Dimension-list entries read.
    pub list_entries_scanned: Vec<u64>,
}

impl SearchStats {
    pub fn new(dims: usize) -> Self {
        SearchStats {
            visits: vec![0; dims + 1],
            mono: vec![0; dims + 1],
            list_entries_scanned: vec![0; dims + 1],
        }
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().sum()
    }

    pub fn add(&mut self, other: &SearchStats) {
        for (a, b) in self.visits.iter_mut().zip(&other.visits) {
            *a += b;
        }
        for (a, b) in self.mono.iter_mut().zip(&other.mono) {
            *a += b;
        }
        for (a, b) in self
            .list_entries_scanned
            .iter_mut()
            .zip(&other.list_entries_scanned)
        {
            *a += b;
        }
    }

    pub fn reset(&mut self) {
        self.visits.fill(0);
        self.mono.fill(0);
        self.list_entries_scanned.fill(0);
    }
}

/// Depth-first range search with pruning. Returns matching TIDs in ascending
/// order together with the visit counters.
pub fn search(elf: &LinearElf, query: &RangeQuery) -> Result<(Vec<Tid>, SearchStats)> {
    let mut out = Vec::new();
    let mut stats = SearchStats::new(elf.dims());
    search_into(elf, query, &mut out, &mut stats)?;
    out.sort_unstable();
    Ok((out, stats))
}

/// Appends matches to `out` in index order and adds to `stats`.
pub fn search_into(
    elf: &LinearElf,
    query: &RangeQuery,
    out: &mut Vec<Tid>,
    stats: &mut SearchStats,
) -> Result<()> {
    query.expect_dims(elf.dims())?;
    if stats.visits.len() != elf.dims() + 1 {
        *stats = SearchStats::new(elf.dims());
    }
    let mut cx = Cursor {
        words: elf.words(),
        windows: query.windows(),
        out,
        stats,
    };
    cx.list(0, 0);
    Ok(())
}

struct Cursor<'a> {
    words: &'a [u64],
    windows: &'a [Window],
    out: &'a mut Vec<Tid>,
    stats: &'a mut SearchStats,
}

impl Cursor<'_> {
    fn list(&mut self, mut pos: usize, depth: usize) {
        self.stats.visits[depth] += 1;
        let window = self.windows[depth];
        loop {
            let word = self.words[pos];
            let value = word & PAYLOAD;
            self.stats.list_entries_scanned[depth] += 1;
            // labels are sorted, nothing further right can match
            if value > window.upper {
                return;
            }
            if value >= window.lower {
                let offset = self.words[pos + 1];
                let target = (offset & PAYLOAD) as usize;
                if offset & FLAG != 0 {
                    self.monolist(target, depth + 1);
                } else {
                    self.list(target, depth + 1);
                }
            }
            if word & FLAG != 0 {
                return;
            }
            pos += 2;
        }
    }

    fn monolist(&mut self, pos: usize, depth: usize) {
        self.stats.visits[depth] += 1;
        self.stats.mono[depth] += 1;
        let rest = &self.windows[depth.min(self.windows.len())..];
        for (i, w) in rest.iter().enumerate() {
            if !w.contains(self.words[pos + i]) {
                return;
            }
        }
        self.out.push(self.words[pos + rest.len()]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elf::{linearize, PrefixTreeElf};
    use crate::relation::{linear_scan, Relation};

    fn elf_of(rel: &Relation) -> LinearElf {
        linearize(&PrefixTreeElf::build(rel).unwrap()).unwrap()
    }

    #[test]
    fn pruned_at_root() {
        let rel = Relation::new(3, &[[5, 1, 1], [7, 2, 2], [9, 0, 0]]).unwrap();
        let elf = elf_of(&rel);
        let q = RangeQuery::from_bounds(&[(0, 4), (0, 9), (0, 9)]).unwrap();
        let (tids, stats) = search(&elf, &q).unwrap();
        assert!(tids.is_empty());
        assert_eq!(stats.visits, vec![1, 0, 0, 0]);
    }

    #[test]
    fn full_query_returns_everything() {
        let rows: Vec<[u64; 3]> = (0..50).map(|i| [i % 3, i % 7, i]).collect();
        let rel = Relation::new(3, &rows).unwrap();
        let elf = elf_of(&rel);
        let q = RangeQuery::full(&[10, 10, 100]);
        let (tids, stats) = search(&elf, &q).unwrap();
        assert_eq!(tids, (0..50).collect::<Vec<_>>());
        assert_eq!(stats.visits[0], 1);
        assert!(stats.mono.iter().zip(&stats.visits).all(|(m, v)| m <= v));
    }

    #[test]
    fn monolist_checks_every_remaining_dimension() {
        let rel = Relation::new(3, &[[1, 5, 5], [2, 5, 9]]).unwrap();
        let elf = elf_of(&rel);
        let q = RangeQuery::from_bounds(&[(0, 9), (5, 5), (0, 6)]).unwrap();
        let (tids, stats) = search(&elf, &q).unwrap();
        assert_eq!(tids, linear_scan(&rel, &q).unwrap());
        assert_eq!(tids, vec![0]);
        // both root entries lead to monolists at depth 2
        assert_eq!(stats.visits, vec![1, 2, 0, 0]);
        assert_eq!(stats.mono, vec![0, 2, 0, 0]);
    }

    #[test]
    fn dimension_mismatch() {
        let rel = Relation::new(2, &[[1, 1]]).unwrap();
        let q = RangeQuery::full(&[1]);
        assert!(search(&elf_of(&rel), &q).is_err());
    }
}
