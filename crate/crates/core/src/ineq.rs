//! The two inequality representations and the affine map between them.
//!
//! On the tripartite graph the cut coordinates and the Collins–Gisin
//! probabilities are related by
//! `x_XAi = q_Ai`, `x_XBj = q_Bj`, `x_AiBj = q_Ai + q_Bj - 2 q_AiBj`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph, GraphKind, NodeId, Party};
use crate::scalar::{format_rat, primitive, rat, to_i64};
use crate::Rat;

/// `a · x <= a0` over the edge coordinates of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutIneq {
    graph: Graph,
    coeffs: Vec<Rat>,
    rhs: Rat,
}

impl CutIneq {
    pub fn new(graph: Graph, coeffs: Vec<Rat>, rhs: Rat) -> Result<Self> {
        if coeffs.len() != graph.edge_count() {
            return Err(Error::DimensionMismatch { expected: graph.edge_count(), got: coeffs.len() });
        }
        Ok(Self { graph, coeffs, rhs })
    }

    pub fn zero(graph: Graph) -> Self {
        let coeffs = vec![Rat::zero(); graph.edge_count()];
        Self { graph, coeffs, rhs: Rat::zero() }
    }

    /// Builds an inequality from integer coefficients in edge order.
    pub fn from_ints(graph: Graph, coeffs: &[i64], rhs: i64) -> Result<Self> {
        Self::new(graph, coeffs.iter().map(|&v| rat(v)).collect(), rat(rhs))
    }

    /// Builds an inequality from `(edge label, coefficient)` pairs such as
    /// `("A1B2", -1)`. Repeated labels accumulate.
    pub fn from_terms(graph: Graph, terms: &[(&str, i64)], rhs: i64) -> Result<Self> {
        let mut ineq = Self::zero(graph);
        for &(label, value) in terms {
            let (u, v) = parse_edge_label(label).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("bad edge label `{label}`"),
            })?;
            let e = ineq.edge(u, v)?;
            ineq.coeffs[e] += rat(value);
        }
        ineq.rhs = rat(rhs);
        Ok(ineq)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn rhs(&self) -> &Rat {
        &self.rhs
    }

    pub fn into_parts(self) -> (Graph, Vec<Rat>, Rat) {
        (self.graph, self.coeffs, self.rhs)
    }

    fn edge(&self, u: NodeId, v: NodeId) -> Result<usize> {
        for w in [u, v] {
            if self.graph.position(w).is_none() {
                return Err(Error::ForeignNode(w));
            }
        }
        self.graph.edge_index(u, v).ok_or(Error::MissingEdge(u, v))
    }

    pub fn coeff(&self, u: NodeId, v: NodeId) -> Result<&Rat> {
        Ok(&self.coeffs[self.edge(u, v)?])
    }

    pub fn set_coeff(&mut self, u: NodeId, v: NodeId, value: Rat) -> Result<()> {
        let e = self.edge(u, v)?;
        self.coeffs[e] = value;
        Ok(())
    }

    pub fn set_rhs(&mut self, rhs: Rat) {
        self.rhs = rhs;
    }

    pub fn is_zero(&self) -> bool {
        self.rhs.is_zero() && self.coeffs.iter().all(Zero::is_zero)
    }

    /// `a · δ(S)`, summing coefficients of the edges cut by `S`.
    pub fn evaluate(&self, cut: Cut) -> Result<Rat> {
        self.graph.check_cut(cut)?;
        Ok(self
            .graph
            .cut_bits(cut)
            .zip(&self.coeffs)
            .filter(|(bit, _)| *bit == 1)
            .map(|(_, c)| c)
            .sum())
    }

    /// Positive multiple whose coefficients and rhs form a primitive integer vector.
    pub fn normalized(&self) -> Self {
        let (coeffs, rhs) = normalize(&self.coeffs, &self.rhs);
        Self { graph: self.graph.clone(), coeffs, rhs }
    }

    /// Primitive integer coefficients and rhs of the normalized form.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let mut all = self.coeffs.clone();
        all.push(self.rhs.clone());
        let (mut ints, _) = primitive(&all);
        let rhs = ints.pop().unwrap_or_default();
        (ints, rhs)
    }

    /// Like [`integer_form`](Self::integer_form) when every entry fits in `i64`.
    pub fn i64_form(&self) -> Option<(Vec<i64>, i64)> {
        let (c, r) = self.integer_form();
        let coeffs = c.iter().map(to_i64).collect::<Option<Vec<_>>>()?;
        Some((coeffs, to_i64(&r)?))
    }

    /// Nodes with at least one nonzero incident coefficient, by position.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.graph.node_count()];
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            if !self.coeffs[e].is_zero() {
                used[u] = true;
                used[v] = true;
            }
        }
        (0..used.len()).filter(|&p| used[p]).collect()
    }

    /// Same coefficients on another graph with the same node set.
    pub fn on_graph(&self, graph: Graph) -> Result<Self> {
        if graph.scenario() != self.graph.scenario() {
            return Err(Error::GraphMismatch);
        }
        let mut out = Self::zero(graph);
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            if self.coeffs[e].is_zero() {
                continue;
            }
            let f = out
                .graph
                .edge_between(u, v)
                .ok_or(Error::MissingEdge(self.graph.node(u), self.graph.node(v)))?;
            out.coeffs[f] = self.coeffs[e].clone();
        }
        out.rhs = self.rhs.clone();
        Ok(out)
    }

    /// The same inequality viewed on the complete graph.
    pub fn to_complete(&self) -> Self {
        let g = Graph::build(GraphKind::Complete, self.graph.n_a(), self.graph.n_b());
        self.on_graph(g).expect("complete graph contains every edge")
    }

    /// Whether `other` is a positive multiple of `self` on an equal graph.
    pub fn same_ray(&self, other: &Self) -> bool {
        self.graph == other.graph && self.normalized() == other.normalized()
    }
}

/// Splits a label such as `XA1`, `A1B12` or `B2B3` into its two nodes.
pub fn parse_edge_label(label: &str) -> Option<(NodeId, NodeId)> {
    let split = label
        .char_indices()
        .skip(1)
        .find(|&(_, c)| matches!(c, 'X' | 'A' | 'B'))
        .map(|(i, _)| i)?;
    let u = NodeId::parse(&label[..split])?;
    let v = NodeId::parse(&label[split..])?;
    (u != v).then_some((u, v))
}

fn normalize(coeffs: &[Rat], rhs: &Rat) -> (Vec<Rat>, Rat) {
    let mut all = coeffs.to_vec();
    all.push(rhs.clone());
    let (ints, _) = primitive(&all);
    let mut out: Vec<Rat> = ints.into_iter().map(Rat::from_integer).collect();
    let rhs = out.pop().unwrap_or_default();
    (out, rhs)
}

impl fmt::Display for CutIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = (0..self.coeffs.len())
            .filter(|&e| !self.coeffs[e].is_zero())
            .map(|e| (self.coeffs[e].clone(), format!("x_{}", self.graph.edge_label(e))));
        write_terms(f, terms)?;
        write!(f, " <= {}", format_rat(&self.rhs))
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (Rat, String)>) -> fmt::Result {
    let mut first = true;
    for (c, name) in terms {
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        let lead = match (first, c.is_negative()) {
            (true, false) => String::new(),
            (true, true) => "-".to_string(),
            (false, _) => format!(" {sign} "),
        };
        if mag.is_one() {
            write!(f, "{lead}{name}")?;
        } else {
            write!(f, "{lead}{} {name}", format_rat(&mag))?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Collins–Gisin form `Σ b_Ai q_Ai + Σ b_Bj q_Bj + Σ b_AiBj q_AiBj <= b0`.
///
/// Rows of `joint` belong to Alice, columns to Bob.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CgIneq {
    alice: Vec<Rat>,
    bob: Vec<Rat>,
    joint: Vec<Vec<Rat>>,
    rhs: Rat,
}

impl CgIneq {
    pub fn new(alice: Vec<Rat>, bob: Vec<Rat>, joint: Vec<Vec<Rat>>, rhs: Rat) -> Result<Self> {
        if joint.len() != alice.len() {
            return Err(Error::DimensionMismatch { expected: alice.len(), got: joint.len() });
        }
        if let Some(row) = joint.iter().find(|r| r.len() != bob.len()) {
            return Err(Error::DimensionMismatch { expected: bob.len(), got: row.len() });
        }
        Ok(Self { alice, bob, joint, rhs })
    }

    pub fn zero(m_a: usize, m_b: usize) -> Self {
        Self {
            alice: vec![Rat::zero(); m_a],
            bob: vec![Rat::zero(); m_b],
            joint: vec![vec![Rat::zero(); m_b]; m_a],
            rhs: Rat::zero(),
        }
    }

    pub fn from_ints<R: AsRef<[i64]>>(alice: &[i64], bob: &[i64], joint: &[R], rhs: i64) -> Result<Self> {
        Self::new(
            alice.iter().map(|&v| rat(v)).collect(),
            bob.iter().map(|&v| rat(v)).collect(),
            joint.iter().map(|r| r.as_ref().iter().map(|&v| rat(v)).collect()).collect(),
            rat(rhs),
        )
    }

    pub fn m_a(&self) -> usize {
        self.alice.len()
    }

    pub fn m_b(&self) -> usize {
        self.bob.len()
    }

    pub fn alice(&self) -> &[Rat] {
        &self.alice
    }

    pub fn bob(&self) -> &[Rat] {
        &self.bob
    }

    pub fn joint(&self) -> &[Vec<Rat>] {
        &self.joint
    }

    pub fn rhs(&self) -> &Rat {
        &self.rhs
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<Rat>, &mut Vec<Rat>, &mut Vec<Vec<Rat>>, &mut Rat) {
        (&mut self.alice, &mut self.bob, &mut self.joint, &mut self.rhs)
    }

    pub fn is_zero(&self) -> bool {
        self.rhs.is_zero()
            && self.alice.iter().chain(&self.bob).all(Zero::is_zero)
            && self.joint.iter().flatten().all(Zero::is_zero)
    }

    /// Marginal coefficient of an observable.
    pub fn marginal(&self, node: NodeId) -> Result<&Rat> {
        let list = match node.party {
            Party::A => &self.alice,
            Party::B => &self.bob,
            Party::X => return Err(Error::ForeignNode(node)),
        };
        list.get(node.index.wrapping_sub(1)).ok_or(Error::ForeignNode(node))
    }

    fn flat(&self) -> Vec<Rat> {
        let mut all: Vec<Rat> = self.alice.iter().chain(&self.bob).cloned().collect();
        all.extend(self.joint.iter().flatten().cloned());
        all.push(self.rhs.clone());
        all
    }

    fn from_flat(m_a: usize, m_b: usize, mut flat: Vec<Rat>) -> Self {
        let rhs = flat.pop().expect("rhs present");
        let joint_flat = flat.split_off(m_a + m_b);
        let bob = flat.split_off(m_a);
        let joint = joint_flat.chunks(m_b.max(1)).take(m_a).map(|c| c[..m_b].to_vec()).collect();
        let joint = if m_b == 0 { vec![Vec::new(); m_a] } else { joint };
        Self { alice: flat, bob, joint, rhs }
    }

    pub fn normalized(&self) -> Self {
        let (ints, _) = primitive(&self.flat());
        Self::from_flat(self.m_a(), self.m_b(), ints.into_iter().map(Rat::from_integer).collect())
    }

    /// Exchanges the parties: Bob's observables become Alice's.
    pub fn transpose(&self) -> Self {
        let joint = (0..self.m_b())
            .map(|j| (0..self.m_a()).map(|i| self.joint[i][j].clone()).collect())
            .collect();
        Self { alice: self.bob.clone(), bob: self.alice.clone(), joint, rhs: self.rhs.clone() }
    }

    pub fn to_cut(&self) -> CutIneq {
        convert_cg_to_cut(self)
    }

    /// Value of the left-hand side at a deterministic strategy where the
    /// observables in `cut` output 1 (positions as on the tripartite graph).
    pub fn evaluate_deterministic(&self, cut: Cut) -> Rat {
        let a = |i: usize| cut.contains(i + 1);
        let b = |j: usize| cut.contains(self.m_a() + j + 1);
        let mut v = Rat::zero();
        for i in (0..self.m_a()).filter(|&i| a(i)) {
            v += &self.alice[i];
            for j in (0..self.m_b()).filter(|&j| b(j)) {
                v += &self.joint[i][j];
            }
        }
        for j in (0..self.m_b()).filter(|&j| b(j)) {
            v += &self.bob[j];
        }
        v
    }
}

impl fmt::Display for CgIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Rat, String)> = Vec::new();
        for (i, c) in self.alice.iter().enumerate() {
            terms.push((c.clone(), format!("q_A{}", i + 1)));
        }
        for (j, c) in self.bob.iter().enumerate() {
            terms.push((c.clone(), format!("q_B{}", j + 1)));
        }
        for (i, row) in self.joint.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                terms.push((c.clone(), format!("q_A{}B{}", i + 1, j + 1)));
            }
        }
        write_terms(f, terms.into_iter().filter(|(c, _)| !c.is_zero()))?;
        write!(f, " <= {}", format_rat(&self.rhs))
    }
}

/// Either representation, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inequality {
    Cut(CutIneq),
    Cg(CgIneq),
}

impl Inequality {
    /// Cut form; CG inequalities are mapped to the tripartite graph.
    pub fn to_cut(&self) -> CutIneq {
        match self {
            Inequality::Cut(c) => c.clone(),
            Inequality::Cg(q) => convert_cg_to_cut(q),
        }
    }

    pub fn to_cg(&self) -> Result<CgIneq> {
        match self {
            Inequality::Cut(c) => convert_cut_to_cg(c),
            Inequality::Cg(q) => Ok(q.clone()),
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inequality::Cut(c) => c.fmt(f),
            Inequality::Cg(q) => q.fmt(f),
        }
    }
}

impl From<CutIneq> for Inequality {
    fn from(v: CutIneq) -> Self {
        Inequality::Cut(v)
    }
}

impl From<CgIneq> for Inequality {
    fn from(v: CgIneq) -> Self {
        Inequality::Cg(v)
    }
}

pub fn evaluate(ineq: &CutIneq, graph: &Graph, cut: Cut) -> Result<Rat> {
    if ineq.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    ineq.evaluate(cut)
}

/// Collins–Gisin form of a tripartite cut inequality, primitive-normalized.
pub fn convert_cut_to_cg(ineq: &CutIneq) -> Result<CgIneq> {
    let g = ineq.graph();
    if g.kind() != GraphKind::Tripartite {
        return Err(Error::WrongGraphKind { expected: "tripartite" });
    }
    let (m_a, m_b) = g.scenario();
    let c = |u: usize, v: usize| &ineq.coeffs[g.edge_between(u, v).expect("tripartite edge")];
    let a = |i: usize| 1 + i;
    let b = |j: usize| 1 + m_a + j;
    let mut out = CgIneq::zero(m_a, m_b);
    for i in 0..m_a {
        out.alice[i] = c(0, a(i)) + (0..m_b).map(|j| c(a(i), b(j))).sum::<Rat>();
    }
    for j in 0..m_b {
        out.bob[j] = c(0, b(j)) + (0..m_a).map(|i| c(a(i), b(j))).sum::<Rat>();
    }
    for i in 0..m_a {
        for j in 0..m_b {
            out.joint[i][j] = c(a(i), b(j)) * rat(-2);
        }
    }
    out.rhs = ineq.rhs.clone();
    Ok(out.normalized())
}

/// Tripartite cut form of a Collins–Gisin inequality, primitive-normalized.
pub fn convert_cg_to_cut(ineq: &CgIneq) -> CutIneq {
    let (m_a, m_b) = (ineq.m_a(), ineq.m_b());
    let g = Graph::build(GraphKind::Tripartite, m_a, m_b);
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let mut out = CutIneq::zero(g.clone());
    let a = |i: usize| 1 + i;
    let b = |j: usize| 1 + m_a + j;
    for i in 0..m_a {
        let row: Rat = ineq.joint[i].iter().sum();
        out.coeffs[g.edge_between(0, a(i)).unwrap()] = &ineq.alice[i] + &row * &half;
    }
    for j in 0..m_b {
        let col: Rat = ineq.joint.iter().map(|r| &r[j]).sum();
        out.coeffs[g.edge_between(0, b(j)).unwrap()] = &ineq.bob[j] + &col * &half;
    }
    for i in 0..m_a {
        for j in 0..m_b {
            out.coeffs[g.edge_between(a(i), b(j)).unwrap()] = -(&ineq.joint[i][j] * &half);
        }
    }
    out.rhs = ineq.rhs.clone();
    out.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh_cut() -> CutIneq {
        let g = Graph::tripartite(2, 2).unwrap();
        CutIneq::from_terms(g, &[("A1B1", -1), ("A1B2", -1), ("A2B1", -1), ("A2B2", 1)], 0).unwrap()
    }

    #[test]
    fn labels_split() {
        assert_eq!(parse_edge_label("XA1"), Some((NodeId::X, NodeId::a(1))));
        assert_eq!(parse_edge_label("A12B3"), Some((NodeId::a(12), NodeId::b(3))));
        assert_eq!(parse_edge_label("B1B1"), None);
        assert_eq!(parse_edge_label("A1"), None);
    }

    #[test]
    fn chsh_evaluations() {
        let f = chsh_cut();
        let g = f.graph().clone();
        assert_eq!(f.evaluate(g.cut_of(&[NodeId::a(1), NodeId::b(2)]).unwrap()).unwrap(), rat(0));
        assert_eq!(f.evaluate(g.cut_of(&[NodeId::a(1)]).unwrap()).unwrap(), rat(-2));
        assert_eq!(CutIneq::zero(g.clone()).evaluate(Cut(5)).unwrap(), rat(0));
        let other = Graph::tripartite(2, 3).unwrap();
        assert_eq!(evaluate(&f, &other, Cut::EMPTY), Err(Error::GraphMismatch));
    }

    #[test]
    fn chsh_to_cg_and_back() {
        let q = convert_cut_to_cg(&chsh_cut()).unwrap();
        let expected = CgIneq::from_ints(&[-1, 0], &[-1, 0], &[[1, 1], [1, -1]], 0).unwrap();
        assert_eq!(q, expected);
        assert_eq!(convert_cg_to_cut(&q), chsh_cut());
    }

    #[test]
    fn complete_graph_has_no_cg_image() {
        let g = Graph::complete(2, 1).unwrap();
        assert!(matches!(convert_cut_to_cg(&CutIneq::zero(g)), Err(Error::WrongGraphKind { .. })));
    }

    #[test]
    fn zero_converts_to_zero() {
        let z = CutIneq::zero(Graph::tripartite(2, 3).unwrap());
        let q = convert_cut_to_cg(&z).unwrap();
        assert!(q.is_zero());
        assert!(convert_cg_to_cut(&q).is_zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(chsh_cut().to_string(), "-x_A1B1 - x_A1B2 - x_A2B1 + x_A2B2 <= 0");
        let q = CgIneq::from_ints(&[0], &[2], &[[-3]], 1).unwrap();
        assert_eq!(q.to_string(), "2 q_B1 - 3 q_A1B1 <= 1");
    }

    #[test]
    fn deterministic_values_match_cut_form() {
        let q = CgIneq::from_ints(&[-1, 0, 2], &[1, -2], &[[1, 3], [-1, 1], [0, -2]], 0).unwrap();
        let f = convert_cg_to_cut(&q);
        let mut ratios = Vec::new();
        for s in f.graph().cuts().unwrap() {
            let x = f.evaluate(s).unwrap();
            let y = q.evaluate_deterministic(s);
            if !y.is_zero() {
                ratios.push(x / y);
            } else {
                assert!(x.is_zero());
            }
        }
        ratios.dedup();
        assert_eq!(ratios.len(), 1);
        assert!(ratios[0].is_positive());
    }
}
