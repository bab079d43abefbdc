//! Linearised Elf layout.
//!
//! The index is one flat `Vec<u64>`. Dimension lists are runs of
//! `(value, offset)` word pairs, written depth-first: a list is followed by
//! the blocks of its children in label order. The top bit of a value word
//! marks the last entry of its list. The top bit of an offset word marks a
//! monolist: a run of the remaining `k - d` attribute values followed by the
//! tuple ID, where `d` is the depth of the list holding the flagged entry.
//! Entries of depth-`k` lists always point at one-word monolists holding only
//! the tuple ID. The root list starts at word 0.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::relation::Tid;

use super::tree::{Node, NodeId, PrefixTreeElf};

pub const FLAG: u64 = 1 << 63;
pub const PAYLOAD: u64 = !FLAG;
const MAGIC: &[u8; 4] = b"ELF1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearElf {
    dims: usize,
    words: Vec<u64>,
    /// Monolists per encounter depth, `1..=k+1`.
    monolists: Vec<usize>,
}

impl LinearElf {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn monolists_per_depth(&self) -> &[usize] {
        &self.monolists
    }

    pub fn size_bytes(&self) -> usize {
        self.words.len() * 8
    }

    /// Recovers every stored tuple path from the layout.
    pub fn enumerate(&self) -> Vec<(Vec<u64>, Tid)> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.dims);
        self.enumerate_list(0, &mut prefix, &mut out);
        out
    }

    fn enumerate_list(&self, mut pos: usize, prefix: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, Tid)>) {
        loop {
            let value = self.words[pos];
            let offset = self.words[pos + 1];
            prefix.push(value & PAYLOAD);
            let target = (offset & PAYLOAD) as usize;
            if offset & FLAG != 0 {
                let rest = self.dims - prefix.len();
                let mut path = prefix.clone();
                path.extend_from_slice(&self.words[target..target + rest]);
                out.push((path, self.words[target + rest]));
            } else {
                self.enumerate_list(target, prefix, out);
            }
            prefix.pop();
            if value & FLAG != 0 {
                break;
            }
            pos += 2;
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.dims as u64).to_le_bytes())?;
        w.write_all(&(self.words.len() as u64).to_le_bytes())?;
        for word in &self.words {
            w.write_all(&word.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(20 + self.size_bytes());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Reads a dump and checks that the layout is well formed.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let dims = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let count = u64::from_le_bytes(word) as usize;
        if dims == 0 {
            return Err(Error::Format("zero dimensions".into()));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(Error::Format(format!(
                "header announces {count} words, found {} bytes",
                bytes.len()
            )));
        }
        let words = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut elf = LinearElf {
            dims,
            words,
            monolists: vec![0; dims + 1],
        };
        elf.monolists = elf.validate()?;
        Ok(elf)
    }

    /// Walks the whole layout, checking bounds, and returns monolist counts.
    fn validate(&self) -> Result<Vec<usize>> {
        let mut monolists = vec![0; self.dims + 1];
        let mut covered = 0usize;
        self.validate_list(0, 0, &mut monolists, &mut covered)?;
        if covered != self.words.len() {
            return Err(Error::Format(format!(
                "{} of {} words are unreachable",
                self.words.len() - covered,
                self.words.len()
            )));
        }
        Ok(monolists)
    }

    fn validate_list(
        &self,
        mut pos: usize,
        depth: usize,
        monolists: &mut [usize],
        covered: &mut usize,
    ) -> Result<()> {
        let bad = |what: &str, at: usize| Error::Format(format!("{what} at word {at}"));
        loop {
            if pos + 1 >= self.words.len() {
                return Err(bad("list runs past the end", pos));
            }
            *covered += 2;
            let value = self.words[pos];
            let offset = self.words[pos + 1];
            let target = (offset & PAYLOAD) as usize;
            if offset & FLAG != 0 {
                let len = self.dims - depth;
                if target + len > self.words.len() {
                    return Err(bad("monolist runs past the end", target));
                }
                *covered += len;
                monolists[depth + 1] += 1;
            } else {
                if depth + 1 >= self.dims || target <= pos {
                    return Err(bad("invalid list offset", pos + 1));
                }
                self.validate_list(target, depth + 1, monolists, covered)?;
            }
            if value & FLAG != 0 {
                return Ok(());
            }
            pos += 2;
        }
    }
}

/// Packs a prefix tree into the flat layout. Every child holding exactly one
/// tuple becomes a monolist; the root is always a dimension list.
pub fn linearize(tree: &PrefixTreeElf) -> Result<LinearElf> {
    let mut elf = LinearElf {
        dims: tree.dims(),
        words: Vec::new(),
        monolists: vec![0; tree.dims() + 1],
    };
    emit_list(tree, PrefixTreeElf::ROOT, 0, &mut elf)?;
    Ok(elf)
}

fn payload(value: u64) -> Result<u64> {
    if value & FLAG != 0 {
        return Err(Error::CapacityExceeded { value, bits: 63 });
    }
    Ok(value)
}

fn emit_list(tree: &PrefixTreeElf, id: NodeId, depth: usize, elf: &mut LinearElf) -> Result<usize> {
    let Node::Interior { edges, .. } = tree.node(id) else {
        unreachable!("lists are only emitted for interior nodes");
    };
    let start = elf.words.len();
    elf.words.resize(start + 2 * edges.len(), 0);
    for (j, &(label, child)) in edges.iter().enumerate() {
        let end = if j + 1 == edges.len() { FLAG } else { 0 };
        elf.words[start + 2 * j] = payload(label)? | end;
        let target = if tree.tuples_below(child) == 1 {
            let pos = elf.words.len();
            emit_monolist(tree, child, elf)?;
            elf.monolists[depth + 1] += 1;
            payload(pos as u64)? | FLAG
        } else {
            payload(emit_list(tree, child, depth + 1, elf)? as u64)?
        };
        elf.words[start + 2 * j + 1] = target;
    }
    Ok(start)
}

fn emit_monolist(tree: &PrefixTreeElf, mut id: NodeId, elf: &mut LinearElf) -> Result<()> {
    loop {
        match tree.node(id) {
            Node::Leaf(tid) => {
                elf.words.push(payload(*tid)?);
                return Ok(());
            }
            Node::Interior { edges, .. } => {
                let (label, child) = edges[0];
                elf.words.push(payload(label)?);
                id = child;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Relation;

    fn linear(dims: usize, rows: &[Vec<u64>]) -> LinearElf {
        let rel = Relation::new(dims, rows).unwrap();
        linearize(&PrefixTreeElf::build(&rel).unwrap()).unwrap()
    }

    #[test]
    fn two_tuple_layout() {
        let elf = linear(2, &[vec![1, 2], vec![1, 5]]);
        // root: (1, ->2) | depth-2 list: (2, mono), (5|end, mono) | tids
        assert_eq!(
            elf.words(),
            &[1 | FLAG, 2, 2, 6 | FLAG, 5 | FLAG, 7 | FLAG, 0, 1]
        );
        assert_eq!(elf.monolists_per_depth(), &[0, 0, 2]);
    }

    #[test]
    fn early_divergence_packs_long_monolist() {
        let elf = linear(5, &[vec![1, 2, 3, 4, 5], vec![2, 6, 7, 8, 9]]);
        assert_eq!(elf.monolists_per_depth(), &[0, 2, 0, 0, 0, 0]);
        // root has two entries, each followed by a 4-value monolist plus TID
        assert_eq!(elf.word_count(), 4 + 2 * 5);
        assert_eq!(&elf.words()[4..9], &[2, 3, 4, 5, 0]);
    }

    #[test]
    fn enumerate_recovers_tuples() {
        let rows = vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 0], vec![3, 0, 0]];
        let elf = linear(3, &rows);
        let mut got = elf.enumerate();
        got.sort_by_key(|(_, t)| *t);
        for (values, tid) in got {
            assert_eq!(values, rows[tid as usize]);
        }
    }

    #[test]
    fn dump_round_trip() {
        let elf = linear(3, &[vec![1, 1, 1], vec![1, 1, 2], vec![4, 2, 0]]);
        let bytes = elf.to_bytes();
        assert_eq!(&bytes[..4], b"ELF1");
        assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 3);
        assert_eq!(
            u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize,
            elf.word_count()
        );
        assert_eq!(LinearElf::read_from(&bytes[..]).unwrap(), elf);
    }

    #[test]
    fn corrupt_dumps_are_rejected() {
        let elf = linear(2, &[vec![1, 2], vec![1, 5]]);
        let mut bytes = elf.to_bytes();
        bytes[0] = b'X';
        assert!(matches!(LinearElf::read_from(&bytes[..]), Err(Error::Format(_))));

        let mut bytes = elf.to_bytes();
        bytes.truncate(bytes.len() - 8);
        assert!(LinearElf::read_from(&bytes[..]).is_err());

        // point the root offset past the end
        let mut bytes = elf.to_bytes();
        bytes[28..36].copy_from_slice(&1000u64.to_le_bytes());
        assert!(LinearElf::read_from(&bytes[..]).is_err());
    }

    #[test]
    fn flagged_values_exceed_capacity() {
        let rel = Relation::new(2, &[[FLAG, 1], [0, 1]]).unwrap();
        let tree = PrefixTreeElf::build(&rel).unwrap();
        assert!(matches!(
            linearize(&tree),
            Err(Error::CapacityExceeded { bits: 63, .. })
        ));
    }
}
