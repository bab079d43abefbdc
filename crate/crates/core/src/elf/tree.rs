use crate::error::{Error, Result};
use crate::relation::{Relation, Tid};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    /// Outgoing edges sorted by label, plus the number of tuples below.
    Interior {
        edges: Vec<(u64, NodeId)>,
        tuples: usize,
    },
    Leaf(Tid),
}

/// Fixed-height prefix tree with one level per attribute. Interior nodes at
/// depth `d` (1-based) branch on attribute `d`; leaves carry tuple IDs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixTreeElf {
    dims: usize,
    nodes: Vec<Node>,
}

impl PrefixTreeElf {
    pub const ROOT: NodeId = 0;

    /// Groups the relation recursively by attribute value. Rows are sorted
    /// lexicographically once; every group is then a contiguous run.
    pub fn build(rel: &Relation) -> Result<Self> {
        if rel.is_empty() {
            return Err(Error::EmptyRelation);
        }
        let order = rel.sorted_order();
        for w in order.windows(2) {
            if rel.row(w[0]) == rel.row(w[1]) {
                return Err(Error::DuplicateTuple {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        let mut tree = PrefixTreeElf {
            dims: rel.dims(),
            nodes: Vec::new(),
        };
        tree.group(rel, &order, 0);
        Ok(tree)
    }

    fn group(&mut self, rel: &Relation, rows: &[usize], dim: usize) -> NodeId {
        if dim == self.dims {
            debug_assert_eq!(rows.len(), 1);
            self.nodes.push(Node::Leaf(rows[0] as Tid));
            return self.nodes.len() - 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Interior {
            edges: Vec::new(),
            tuples: rows.len(),
        });
        let mut edges = Vec::new();
        let mut start = 0;
        while start < rows.len() {
            let label = rel.row(rows[start])[dim];
            let end = start
                + rows[start..]
                    .iter()
                    .take_while(|&&r| rel.row(r)[dim] == label)
                    .count();
            let child = self.group(rel, &rows[start..end], dim + 1);
            edges.push((label, child));
            start = end;
        }
        if let Node::Interior { edges: slot, .. } = &mut self.nodes[id] {
            *slot = edges;
        }
        id
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn tuples_below(&self, id: NodeId) -> usize {
        match &self.nodes[id] {
            Node::Interior { tuples, .. } => *tuples,
            Node::Leaf(_) => 1,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }

    /// Number of interior nodes at each depth `1..=k`.
    pub fn interior_per_depth(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dims];
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((id, d)) = stack.pop() {
            if let Node::Interior { edges, .. } = &self.nodes[id] {
                counts[d] += 1;
                stack.extend(edges.iter().map(|&(_, c)| (c, d + 1)));
            }
        }
        counts
    }

    /// All root-to-leaf paths as `(values, tid)`, in lexicographic order.
    pub fn paths(&self) -> Vec<(Vec<u64>, Tid)> {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.dims);
        self.collect_paths(Self::ROOT, &mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, id: NodeId, prefix: &mut Vec<u64>, out: &mut Vec<(Vec<u64>, Tid)>) {
        match &self.nodes[id] {
            Node::Leaf(tid) => out.push((prefix.clone(), *tid)),
            Node::Interior { edges, .. } => {
                for &(label, child) in edges {
                    prefix.push(label);
                    self.collect_paths(child, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}
