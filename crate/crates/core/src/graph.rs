//! Measurement graphs and their cuts.
//!
//! Nodes are stored by position: `0` is the trace-out node X, positions
//! `1..=n_a` are Alice's observables and `n_a+1..=n_a+n_b` are Bob's.
//! Edges are ordered X–A, X–B, A–B (lexicographic), then A–A and B–B for
//! complete graphs. Every vector, key and file format uses this order.

use std::fmt;


use crate::error::{Error, Result};
use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    X,
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
            Party::X => Party::X,
        }
    }
}

/// An observable `A_i`, `B_j`, or the trace-out node `X` (index 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub party: Party,
    pub index: usize,
}

impl NodeId {
    pub const X: NodeId = NodeId { party: Party::X, index: 0 };

    pub fn a(index: usize) -> Self {
        debug_assert!(index >= 1);
        NodeId { party: Party::A, index }
    }

    pub fn b(index: usize) -> Self {
        debug_assert!(index >= 1);
        NodeId { party: Party::B, index }
    }

    pub fn parse(token: &str) -> Option<NodeId> {
        if token == "X" {
            return Some(NodeId::X);
        }
        let (party, rest) = match token.as_bytes().first()? {
            b'A' => (Party::A, &token[1..]),
            b'B' => (Party::B, &token[1..]),
            _ => return None,
        };
        if rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let index: usize = rest.parse().ok()?;
        Some(NodeId { party, index })
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.party {
            Party::X => write!(f, "X"),
            Party::A => write!(f, "A{}", self.index),
            Party::B => write!(f, "B{}", self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphKind {
    /// All pairs of nodes are edges.
    Complete,
    /// Only X–A, X–B and A–B pairs are edges.
    Tripartite,
}

#[derive(Clone, Debug)]
pub struct Graph {
    kind: GraphKind,
    n_a: usize,
    n_b: usize,
    edges: Vec<(usize, usize)>,
    lookup: Vec<u32>,
}

const NO_EDGE: u32 = u32::MAX;

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n_a == other.n_a && self.n_b == other.n_b
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(kind: GraphKind, n_a: usize, n_b: usize) -> Result<Self> {
        if n_a + n_b == 0 {
            return Err(Error::EmptyScenario);
        }
        Ok(Self::build(kind, n_a, n_b))
    }

    pub(crate) fn build(kind: GraphKind, n_a: usize, n_b: usize) -> Self {
        let n = 1 + n_a + n_b;
        let a = 1..=n_a;
        let b = n_a + 1..=n_a + n_b;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        edges.extend(a.clone().map(|i| (0, i)));
        edges.extend(b.clone().map(|j| (0, j)));
        for i in a.clone() {
            edges.extend(b.clone().map(|j| (i, j)));
        }
        if kind == GraphKind::Complete {
            for i in a.clone() {
                edges.extend((i + 1..=n_a).map(|k| (i, k)));
            }
            for j in b.clone() {
                edges.extend((j + 1..=n_a + n_b).map(|k| (j, k)));
            }
        }
        let mut lookup = vec![NO_EDGE; n * n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            lookup[u * n + v] = e as u32;
            lookup[v * n + u] = e as u32;
        }
        Self { kind, n_a, n_b, edges, lookup }
    }

    pub fn complete(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(GraphKind::Complete, n_a, n_b)
    }

    pub fn tripartite(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(GraphKind::Tripartite, n_a, n_b)
    }

    /// The complete graph K_n with X and `n - 1` unlabelled observables.
    pub fn k(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::EmptyScenario);
        }
        Self::complete(n - 1, 0)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn scenario(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }

    pub fn node_count(&self) -> usize {
        1 + self.n_a + self.n_b
    }

    /// Number of observables, i.e. nodes other than X.
    pub fn observables(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge list as node positions, in the canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node(&self, pos: usize) -> NodeId {
        if pos == 0 {
            NodeId::X
        } else if pos <= self.n_a {
            NodeId::a(pos)
        } else {
            NodeId::b(pos - self.n_a)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(|p| self.node(p))
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        match node.party {
            Party::X => Some(0),
            Party::A if (1..=self.n_a).contains(&node.index) => Some(node.index),
            Party::B if (1..=self.n_b).contains(&node.index) => Some(self.n_a + node.index),
            _ => None,
        }
    }

    pub fn party_of(&self, pos: usize) -> Party {
        self.node(pos).party
    }

    /// Edge index for two node positions.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let n = self.node_count();
        if u >= n || v >= n {
            return None;
        }
        match self.lookup[u * n + v] {
            NO_EDGE => None,
            e => Some(e as usize),
        }
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edge_between(self.position(u)?, self.position(v)?)
    }

    pub fn edge_nodes(&self, e: usize) -> (NodeId, NodeId) {
        let (u, v) = self.edges[e];
        (self.node(u), self.node(v))
    }

    pub fn edge_label(&self, e: usize) -> String {
        let (u, v) = self.edge_nodes(e);
        format!("{u}{v}")
    }

    /// Dimension of the cut polytope, which is full-dimensional in edge space.
    pub fn polytope_dim(&self) -> usize {
        self.edge_count()
    }

    /// Enumerates all `2^(n_a + n_b)` cuts by binary counting, empty cut first.
    pub fn cuts(&self) -> Result<impl Iterator<Item = Cut>> {
        let n = self.observables();
        if n > 63 {
            return Err(Error::TooManyNodes(n));
        }
        Ok((0..1u64 << n).map(Cut))
    }

    /// Builds the cut whose members are `nodes`; X may not be a member.
    pub fn cut_of(&self, nodes: &[NodeId]) -> Result<Cut> {
        let mut bits = 0u64;
        for &node in nodes {
            match self.position(node) {
                Some(p) if p > 0 => bits |= 1 << (p - 1),
                _ => return Err(Error::ForeignNode(node)),
            }
        }
        Ok(Cut(bits))
    }

    pub fn cut_vector(&self, cut: Cut) -> Result<EdgeVector> {
        self.check_cut(cut)?;
        Ok(EdgeVector(
            self.edges
                .iter()
                .map(|&(u, v)| Rat::from_integer((cut.side(u) ^ cut.side(v)).into()))
                .collect(),
        ))
    }

    /// 0/1 entries of the cut vector, without the rational wrapper.
    pub(crate) fn cut_bits(&self, cut: Cut) -> impl Iterator<Item = u8> + '_ {
        self.edges.iter().map(move |&(u, v)| cut.side(u) ^ cut.side(v))
    }

    pub(crate) fn check_cut(&self, cut: Cut) -> Result<()> {
        let n = self.observables();
        if n < 64 && cut.0 >> n != 0 {
            let stray = 64 - cut.0.leading_zeros() as usize;
            return Err(Error::ForeignNode(NodeId::b(stray - self.n_a)));
        }
        Ok(())
    }
}

pub fn build_graph(kind: GraphKind, n_a: usize, n_b: usize) -> Result<Graph> {
    Graph::new(kind, n_a, n_b)
}

pub fn enumerate_cuts(graph: &Graph) -> Result<Vec<Cut>> {
    Ok(graph.cuts()?.collect())
}

pub fn cut_vector(graph: &Graph, cut: Cut) -> Result<EdgeVector> {
    graph.cut_vector(cut)
}

/// A set of non-X nodes. Bit `p - 1` stands for node position `p`; the
/// trace-out node is always on the 0 side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut(pub u64);

impl Cut {
    pub const EMPTY: Cut = Cut(0);

    pub fn contains(self, pos: usize) -> bool {
        pos > 0 && pos <= 64 && self.0 >> (pos - 1) & 1 == 1
    }

    /// 1 if node `pos` is in the cut, else 0.
    pub fn side(self, pos: usize) -> u8 {
        self.contains(pos) as u8
    }

    pub fn with(self, pos: usize) -> Cut {
        debug_assert!(pos > 0);
        Cut(self.0 | 1 << (pos - 1))
    }

    pub fn symmetric_difference(self, other: Cut) -> Cut {
        Cut(self.0 ^ other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn positions(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |b| self.0 >> b & 1 == 1).map(|b| b + 1)
    }

    pub fn members(self, graph: &Graph) -> Vec<NodeId> {
        self.positions().map(|p| graph.node(p)).collect()
    }
}

/// Dense vector indexed by a graph's edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeVector(pub Vec<Rat>);

impl EdgeVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &[Rat]) -> Rat {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn edge_counts() {
        assert_eq!(Graph::complete(1, 1).unwrap().edge_count(), 3);
        assert_eq!(Graph::tripartite(2, 2).unwrap().edge_count(), 8);
        let k7 = Graph::complete(3, 3).unwrap();
        assert_eq!(k7.node_count(), 7);
        assert_eq!(k7.edge_count(), 21);
        assert_eq!(Graph::new(GraphKind::Tripartite, 0, 0), Err(Error::EmptyScenario));
    }

    #[test]
    fn edge_order_is_blocked() {
        let g = Graph::complete(2, 2).unwrap();
        let labels: Vec<String> = (0..g.edge_count()).map(|e| g.edge_label(e)).collect();
        assert_eq!(
            labels,
            ["XA1", "XA2", "XB1", "XB2", "A1B1", "A1B2", "A2B1", "A2B2", "A1A2", "B1B2"]
        );
        let t = Graph::tripartite(2, 1).unwrap();
        assert!(t.edge_index(NodeId::a(1), NodeId::a(2)).is_none());
        assert_eq!(t.edge_index(NodeId::b(1), NodeId::a(2)), Some(4));
    }

    #[test]
    fn cut_enumeration() {
        let g = Graph::tripartite(1, 1).unwrap();
        let cuts = enumerate_cuts(&g).unwrap();
        assert_eq!(cuts.len(), 4);
        assert_eq!(cuts[0], Cut::EMPTY);
        assert_eq!(enumerate_cuts(&Graph::k(5).unwrap()).unwrap().len(), 16);
    }

    #[test]
    fn cut_vectors_follow_parity() {
        let g = Graph::tripartite(1, 1).unwrap();
        assert!(g.cut_vector(Cut::EMPTY).unwrap().0.iter().all(Zero::is_zero));
        let s = g.cut_of(&[NodeId::a(1)]).unwrap();
        let v: Vec<i64> = g.cut_bits(s).map(i64::from).collect();
        assert_eq!(v, [1, 0, 1]);

        let g = Graph::tripartite(2, 2).unwrap();
        let s = g.cut_of(&[NodeId::a(1), NodeId::b(2)]).unwrap();
        let v = g.cut_vector(s).unwrap();
        let at = |u, w| v.0[g.edge_index(u, w).unwrap()].clone();
        let one = Rat::from_integer(1.into());
        let zero = Rat::zero();
        assert_eq!(at(NodeId::a(1), NodeId::b(1)), one);
        assert_eq!(at(NodeId::a(1), NodeId::b(2)), zero);
        assert_eq!(at(NodeId::a(2), NodeId::b(1)), zero);
        assert_eq!(at(NodeId::a(2), NodeId::b(2)), one);
        assert_eq!(at(NodeId::X, NodeId::a(1)), one);
        assert_eq!(at(NodeId::X, NodeId::b(2)), one);
        assert_eq!(at(NodeId::X, NodeId::a(2)), zero);
        assert_eq!(at(NodeId::X, NodeId::b(1)), zero);
    }

    #[test]
    fn foreign_nodes_rejected() {
        let g = Graph::tripartite(1, 1).unwrap();
        assert!(g.cut_of(&[NodeId::X]).is_err());
        assert!(g.cut_of(&[NodeId::a(2)]).is_err());
        assert!(g.cut_vector(Cut(0b100)).is_err());
    }

    #[test]
    fn distinct_cut_vectors_on_tripartite_graphs() {
        for (a, b) in [(1, 1), (2, 1), (2, 3), (0, 3)] {
            let g = Graph::tripartite(a, b).unwrap();
            let mut seen: Vec<Vec<u8>> = g.cuts().unwrap().map(|c| g.cut_bits(c).collect()).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), 1 << (a + b));
        }
    }

    #[test]
    fn node_tokens() {
        assert_eq!(NodeId::parse("X"), Some(NodeId::X));
        assert_eq!(NodeId::parse("A12"), Some(NodeId::a(12)));
        assert_eq!(NodeId::parse("B0"), None);
        assert_eq!(NodeId::parse("C1"), None);
        assert_eq!(NodeId::a(3).to_string(), "A3");
    }
}
