use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::linear::{LinearElf, FLAG, PAYLOAD};

/// Structural shape of one depth of a linearised Elf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusLevel {
    pub depth: usize,
    /// Dimension lists plus monolists at this depth.
    pub nodes: usize,
    pub monolists: usize,
    /// Mean entry count of the dimension lists at this depth.
    pub mean_fanout: f64,
    /// Mean number of tuples below a dimension list at this depth.
    pub mean_avgsize: f64,
}

/// Counts nodes, monolists, list lengths and tuples-below for every depth
/// `1..=k+1` by walking the layout once.
pub fn structural_census(elf: &LinearElf) -> Vec<CensusLevel> {
    let levels = elf.dims() + 1;
    let mut acc = Acc {
        words: elf.words(),
        lists: vec![0; levels],
        monolists: vec![0; levels],
        entries: vec![0; levels],
        tuples: vec![0; levels],
    };
    acc.walk(0, 0);
    (0..levels)
        .map(|d| {
            let lists = acc.lists[d];
            let mean = |x: usize| if lists == 0 { 0.0 } else { x as f64 / lists as f64 };
            CensusLevel {
                depth: d + 1,
                nodes: lists + acc.monolists[d],
                monolists: acc.monolists[d],
                mean_fanout: mean(acc.entries[d]),
                mean_avgsize: mean(acc.tuples[d]),
            }
        })
        .collect()
}

struct Acc<'a> {
    words: &'a [u64],
    lists: Vec<usize>,
    monolists: Vec<usize>,
    entries: Vec<usize>,
    tuples: Vec<usize>,
}

impl Acc<'_> {
    fn walk(&mut self, mut pos: usize, depth: usize) -> usize {
        self.lists[depth] += 1;
        let mut below = 0;
        loop {
            let word = self.words[pos];
            let offset = self.words[pos + 1];
            self.entries[depth] += 1;
            if offset & FLAG != 0 {
                self.monolists[depth + 1] += 1;
                below += 1;
            } else {
                below += self.walk((offset & PAYLOAD) as usize, depth + 1);
            }
            if word & FLAG != 0 {
                break;
            }
            pos += 2;
        }
        self.tuples[depth] += below;
        below
    }
}

pub fn write_census_csv<W: Write>(levels: &[CensusLevel], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["depth", "nodes", "monolists", "mean_fanout", "mean_avgsize"])?;
    for l in levels {
        out.write_record([
            l.depth.to_string(),
            l.nodes.to_string(),
            l.monolists.to_string(),
            l.mean_fanout.to_string(),
            l.mean_avgsize.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
