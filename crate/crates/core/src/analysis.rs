//! Validity, root sets and facet certification, zero-lifting and support
//! reduction.
//!
//! Maximizing `a · δ(S)` over all cuts is done by splitting the observables
//! into a *core* and an independent set of *free* nodes in the support graph
//! of `a`. Once the core is fixed, every free node contributes independently,
//! so only the core is enumerated (Gray code order). The same decomposition
//! describes the root set as a union of blocks, each block being a base cut
//! together with every subset of its tied free nodes.
//!
//! The affine rank of a block is spanned by the base cut, single flips and
//! flips of pairs of tied nodes that share an edge, because `δ` is a
//! polynomial of degree at most two in the node indicators. Ranks are first
//! computed modulo a prime (a lower bound over the rationals) and recomputed
//! exactly only when that bound does not already reach the polytope dimension.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph, GraphKind, NodeId, Party};
use crate::ineq::{CgIneq, CutIneq};
use crate::linalg::{EchelonBasis, IntEchelon};
use crate::scalar::{primitive, Fp};
use crate::{Int, Rat};

/// Default bound on the number of enumerated core observables.
pub const DEFAULT_CORE_CAP: usize = 26;

#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    /// Largest core accepted before reporting [`Error::EnumerationCap`].
    pub core_cap: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { core_cap: DEFAULT_CORE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validity {
    pub valid: bool,
    /// Maximum of `a · δ(S)` over all cuts.
    pub max_value: Rat,
    /// A maximizing cut, reported when the inequality is violated.
    pub witness: Option<Cut>,
}

/// Facet certificate of a cut inequality.
///
/// Root data (`root_count`, `face_dim`) is only computed for valid
/// inequalities; for violated ones they are `0` and `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightnessReport {
    pub valid: bool,
    pub max_value: Rat,
    pub root_count: u128,
    pub face_dim: i64,
    pub polytope_dim: usize,
    pub is_facet: bool,
}

pub fn is_valid(ineq: &CutIneq) -> Result<Validity> {
    is_valid_with(ineq, &AnalysisOptions::default())
}

pub fn is_valid_with(ineq: &CutIneq, opts: &AnalysisOptions) -> Result<Validity> {
    let engine = Engine::new(ineq, opts)?;
    let (best, cut) = engine.maximize();
    let valid = best <= engine.rhs as i128;
    Ok(Validity {
        valid,
        max_value: engine.unscale(best),
        witness: (!valid).then_some(cut),
    })
}

pub fn tightness_report(ineq: &CutIneq) -> Result<TightnessReport> {
    tightness_report_with(ineq, &AnalysisOptions::default())
}

pub fn tightness_report_with(ineq: &CutIneq, opts: &AnalysisOptions) -> Result<TightnessReport> {
    let engine = Engine::new(ineq, opts)?;
    let dim = ineq.graph().polytope_dim();
    let (best, _) = engine.maximize();
    let rhs = engine.rhs as i128;
    let mut report = TightnessReport {
        valid: best <= rhs,
        max_value: engine.unscale(best),
        root_count: 0,
        face_dim: -1,
        polytope_dim: dim,
        is_facet: false,
    };
    if !report.valid || best < rhs {
        return Ok(report);
    }
    if engine.is_trivial() {
        // 0 <= 0: every cut is a root and they span the whole polytope
        report.root_count = 1u128 << engine.n;
        report.face_dim = dim as i64;
        return Ok(report);
    }
    let (roots, rank) = engine.root_rank(best, dim)?;
    report.root_count = roots;
    report.face_dim = rank as i64 - 1;
    report.is_facet = rank == dim;
    Ok(report)
}

/// Primitive integer form of an inequality prepared for enumeration.
struct Engine<'a> {
    graph: &'a Graph,
    n: usize,
    /// Symmetric weight matrix over node positions, `(n+1)^2` entries.
    w: Vec<i64>,
    rhs: i64,
    scale: Rat,
    core: Vec<usize>,
    free: Vec<usize>,
    /// Per core index: neighbours in core or X as `(core index or None for X, weight)`.
    core_adj: Vec<Vec<(Option<usize>, i64)>>,
    /// Per core index: free neighbours as `(free index, weight)`.
    core_free: Vec<Vec<(usize, i64)>>,
    /// Per free index: sum of incident weights.
    free_total: Vec<i128>,
}

struct State {
    mask: u64,
    base: i128,
    c0: Vec<i128>,
    sum_max: i128,
}

impl<'a> Engine<'a> {
    fn new(ineq: &'a CutIneq, opts: &AnalysisOptions) -> Result<Self> {
        let graph = ineq.graph();
        let n = graph.observables();
        if n > 63 {
            return Err(Error::TooManyNodes(n));
        }
        let mut all = ineq.coeffs().to_vec();
        all.push(ineq.rhs().clone());
        let (ints, scale) = primitive(&all);
        let ints: Vec<i64> = ints.iter().map(|v| v.to_i64().ok_or(Error::Overflow)).collect::<Result<_>>()?;
        let rhs = *ints.last().expect("rhs");
        let size = n + 1;
        let mut w = vec![0i64; size * size];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            w[u * size + v] = ints[e];
            w[v * size + u] = ints[e];
        }

        let (core, free) = split_core(n, &w);
        if core.len() > opts.core_cap {
            return Err(Error::EnumerationCap { nodes: core.len(), cap: opts.core_cap });
        }
        let mut core_index = vec![None; size];
        for (k, &p) in core.iter().enumerate() {
            core_index[p] = Some(k);
        }
        let mut free_index = vec![None; size];
        for (k, &p) in free.iter().enumerate() {
            free_index[p] = Some(k);
        }
        let mut core_adj = vec![Vec::new(); core.len()];
        let mut core_free = vec![Vec::new(); core.len()];
        for (k, &p) in core.iter().enumerate() {
            for q in 0..size {
                let wt = w[p * size + q];
                if wt == 0 || q == p {
                    continue;
                }
                if q == 0 {
                    core_adj[k].push((None, wt));
                } else if let Some(c) = core_index[q] {
                    core_adj[k].push((Some(c), wt));
                } else if let Some(f) = free_index[q] {
                    core_free[k].push((f, wt));
                }
            }
        }
        let free_total = free
            .iter()
            .map(|&p| (0..size).map(|q| w[p * size + q] as i128).sum())
            .collect();
        Ok(Self { graph, n, w, rhs, scale, core, free, core_adj, core_free, free_total })
    }

    fn is_trivial(&self) -> bool {
        self.w.iter().all(|&v| v == 0)
    }

    fn unscale(&self, v: i128) -> Rat {
        Rat::from_integer(Int::from(v)) / &self.scale
    }

    fn state(&self, mask: u64) -> State {
        let mut base = 0i128;
        let mut c0 = vec![0i128; self.free.len()];
        for k in 0..self.core.len() {
            let in_k = mask >> k & 1 == 1;
            for &(nb, wt) in &self.core_adj[k] {
                match nb {
                    None if in_k => base += wt as i128,
                    Some(c) if c > k && in_k != (mask >> c & 1 == 1) => base += wt as i128,
                    _ => {}
                }
            }
            if in_k {
                for &(f, wt) in &self.core_free[k] {
                    c0[f] += wt as i128;
                }
            }
        }
        let sum_max = c0.iter().zip(&self.free_total).map(|(&a, &t)| a.max(t - a)).sum();
        State { mask, base, c0, sum_max }
    }

    fn flip(&self, st: &mut State, k: usize) {
        let was_in = st.mask >> k & 1 == 1;
        for &(nb, wt) in &self.core_adj[k] {
            let other_in = nb.is_some_and(|c| st.mask >> c & 1 == 1);
            // the edge is cut before the flip iff the endpoints differ
            if was_in != other_in {
                st.base -= wt as i128;
            } else {
                st.base += wt as i128;
            }
        }
        for &(f, wt) in &self.core_free[k] {
            let t = self.free_total[f];
            let old = st.c0[f];
            let new = if was_in { old - wt as i128 } else { old + wt as i128 };
            st.sum_max += new.max(t - new) - old.max(t - old);
            st.c0[f] = new;
        }
        st.mask ^= 1 << k;
    }

    /// Splits the core enumeration into independent chunks of Gray codes.
    fn chunks(&self) -> (usize, usize) {
        let k = self.core.len();
        let high = if k >= 14 { 6.min(k) } else { 0 };
        (high, k - high)
    }

    /// Visits every core assignment of one chunk.
    fn walk(&self, prefix: u64, low: usize, mut visit: impl FnMut(&State) -> bool) {
        let mut st = self.state(prefix << low);
        if !visit(&st) {
            return;
        }
        for t in 1u64..1 << low {
            self.flip(&mut st, t.trailing_zeros() as usize);
            if !visit(&st) {
                return;
            }
        }
    }

    fn value(&self, st: &State) -> i128 {
        st.base + st.sum_max
    }

    /// Full cut from a core assignment, taking free nodes to their better side
    /// (ties go to the 0 side).
    fn full_cut(&self, st: &State) -> Cut {
        let mut bits = 0u64;
        for (k, &p) in self.core.iter().enumerate() {
            if st.mask >> k & 1 == 1 {
                bits |= 1 << (p - 1);
            }
        }
        for (f, &p) in self.free.iter().enumerate() {
            if self.free_total[f] - st.c0[f] > st.c0[f] {
                bits |= 1 << (p - 1);
            }
        }
        Cut(bits)
    }

    fn maximize(&self) -> (i128, Cut) {
        let (high, low) = self.chunks();
        let best: Vec<(i128, Cut)> = (0..1u64 << high)
            .into_par_iter()
            .map(|prefix| {
                let mut best = (i128::MIN, Cut::EMPTY);
                self.walk(prefix, low, |st| {
                    let v = self.value(st);
                    if v > best.0 {
                        best = (v, self.full_cut(st));
                    }
                    true
                });
                best
            })
            .collect();
        best.into_iter()
            .fold((i128::MIN, Cut::EMPTY), |acc, b| if b.0 > acc.0 { b } else { acc })
    }

    /// Tied free nodes of a block, as positions.
    fn ties(&self, st: &State) -> Vec<usize> {
        (0..self.free.len())
            .filter(|&f| 2 * st.c0[f] == self.free_total[f])
            .map(|f| self.free[f])
            .collect()
    }

    /// Augmented 0/1 rows spanning the affine hull of one root block.
    fn block_rows(&self, st: &State, mut emit: impl FnMut(Cut)) {
        let base = self.full_cut(st);
        let ties = self.ties(st);
        emit(base);
        for (i, &t) in ties.iter().enumerate() {
            emit(Cut(base.0 ^ 1 << (t - 1)));
            for &u in &ties[i + 1..] {
                if self.graph.edge_between(t, u).is_some() {
                    emit(Cut(base.0 ^ 1 << (t - 1) ^ 1 << (u - 1)));
                }
            }
        }
    }

    fn row<T>(&self, cut: Cut, conv: impl Fn(u8) -> T) -> Vec<T> {
        std::iter::once(conv(1)).chain(self.graph.cut_bits(cut).map(conv)).collect()
    }

    /// Root count and exact affine rank of the root set, given `best == rhs`.
    fn root_rank(&self, best: i128, dim: usize) -> Result<(u128, usize)> {
        let width = self.graph.edge_count() + 1;
        let (high, low) = self.chunks();
        let parts: Vec<(u128, Vec<Cut>)> = (0..1u64 << high)
            .into_par_iter()
            .map(|prefix| {
                let mut count = 0u128;
                let mut basis = EchelonBasis::<Fp>::new(width);
                let mut kept = Vec::new();
                self.walk(prefix, low, |st| {
                    if self.value(st) == best {
                        count += 1u128 << self.ties(st).len();
                        if basis.rank() < dim {
                            self.block_rows(st, |c| {
                                if basis.rank() < dim && basis.insert(self.row(c, |b| Fp::new(b as i64))) {
                                    kept.push(c);
                                }
                            });
                        }
                    }
                    true
                });
                (count, kept)
            })
            .collect();

        let roots = parts.iter().map(|p| p.0).sum();
        let mut basis = EchelonBasis::<Fp>::new(width);
        for c in parts.iter().flat_map(|p| &p.1) {
            basis.insert(self.row(*c, |b| Fp::new(b as i64)));
            if basis.rank() == dim {
                // a nonzero valid inequality has rank at most dim
                return Ok((roots, dim));
            }
        }
        let rank = match self.exact_rank::<i128>(best, width) {
            Ok(r) => r,
            Err(Error::Overflow) => self.exact_rank::<Int>(best, width)?,
            Err(e) => return Err(e),
        };
        Ok((roots, rank))
    }

    fn exact_rank<I: crate::scalar::ExactInt>(&self, best: i128, width: usize) -> Result<usize> {
        let (high, low) = self.chunks();
        let mut basis = IntEchelon::<I>::new(width);
        let mut failure = None;
        for prefix in 0..1u64 << high {
            self.walk(prefix, low, |st| {
                if self.value(st) == best {
                    self.block_rows(st, |c| {
                        if failure.is_none() {
                            if let Err(e) = basis.insert(self.row(c, |b| I::from_i64(b as i64))) {
                                failure = Some(e);
                            }
                        }
                    });
                }
                failure.is_none() && basis.rank() < width
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Ok(basis.rank())
    }
}

/// Chooses free nodes greedily by smallest support degree; the rest form the core.
fn split_core(n: usize, w: &[i64]) -> (Vec<usize>, Vec<usize>) {
    let size = n + 1;
    let adjacent = |p: usize, q: usize| w[p * size + q] != 0;
    let mut order: Vec<usize> = (1..=n).collect();
    let degree = |p: usize| (1..=n).filter(|&q| q != p && adjacent(p, q)).count();
    order.sort_by_key(|&p| (degree(p), p));
    let mut blocked = vec![false; size];
    let mut free = Vec::new();
    for p in order {
        if !blocked[p] {
            free.push(p);
            for q in 1..=n {
                if adjacent(p, q) {
                    blocked[q] = true;
                }
            }
        }
    }
    free.sort_unstable();
    let core = (1..=n).filter(|p| !free.contains(p)).collect();
    (core, free)
}

/// Scenario-level operations shared by both representations.
pub trait Scenario: Sized {
    fn scenario(&self) -> (usize, usize);

    /// Extends to a larger scenario with zero coefficients on new observables.
    fn zero_lift(&self, n_a: usize, n_b: usize) -> Result<Self>;

    /// Removes observables without nonzero coefficients.
    fn support_reduce(&self) -> Reduced<Self>;
}

/// Result of [`support_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced<T> {
    pub ineq: T,
    /// Kept observables, in their original labels, in new index order.
    pub kept: Vec<NodeId>,
    pub removed: Vec<NodeId>,
    /// Every coefficient was zero; `ineq` is the designated empty inequality.
    pub empty: bool,
}

pub fn zero_lift<T: Scenario>(ineq: &T, n_a: usize, n_b: usize) -> Result<T> {
    ineq.zero_lift(n_a, n_b)
}

pub fn support_reduce<T: Scenario>(ineq: &T) -> Reduced<T> {
    ineq.support_reduce()
}

fn check_target(from: (usize, usize), n_a: usize, n_b: usize) -> Result<()> {
    if n_a < from.0 || n_b < from.1 {
        return Err(Error::ShrinkingTarget { n_a: from.0, n_b: from.1, target_a: n_a, target_b: n_b });
    }
    Ok(())
}

impl Scenario for CutIneq {
    fn scenario(&self) -> (usize, usize) {
        self.graph().scenario()
    }

    fn zero_lift(&self, n_a: usize, n_b: usize) -> Result<Self> {
        check_target(self.scenario(), n_a, n_b)?;
        let g = Graph::new(self.graph().kind(), n_a, n_b)?;
        relabel_onto(self, g, |node| Some(node))
    }

    fn support_reduce(&self) -> Reduced<Self> {
        let g = self.graph();
        let support = self.support();
        let kept: Vec<NodeId> = support.iter().filter(|&&p| p > 0).map(|&p| g.node(p)).collect();
        let removed: Vec<NodeId> = (1..g.node_count())
            .filter(|p| !support.contains(p))
            .map(|p| g.node(p))
            .collect();
        let ka: Vec<NodeId> = kept.iter().copied().filter(|v| v.party == Party::A).collect();
        let kb: Vec<NodeId> = kept.iter().copied().filter(|v| v.party == Party::B).collect();
        let target = Graph::build(g.kind(), ka.len(), kb.len());
        let ineq = relabel_onto(self, target, |node| match node.party {
            Party::X => Some(NodeId::X),
            Party::A => ka.iter().position(|&v| v == node).map(|i| NodeId::a(i + 1)),
            Party::B => kb.iter().position(|&v| v == node).map(|j| NodeId::b(j + 1)),
        })
        .expect("support edges survive");
        let kept = ka.into_iter().chain(kb).collect();
        Reduced { empty: ineq.coeffs().is_empty() || ineq.coeffs().iter().all(Zero::is_zero), ineq, kept, removed }
    }
}

/// Copies nonzero coefficients onto `target` through a node map.
pub(crate) fn relabel_onto(
    ineq: &CutIneq,
    target: Graph,
    map: impl Fn(NodeId) -> Option<NodeId>,
) -> Result<CutIneq> {
    let mut out = CutIneq::zero(target);
    for (e, c) in ineq.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (u, v) = ineq.graph().edge_nodes(e);
        let (mu, mv) = (map(u).ok_or(Error::ForeignNode(u))?, map(v).ok_or(Error::ForeignNode(v))?);
        out.set_coeff(mu, mv, c.clone())?;
    }
    out.set_rhs(ineq.rhs().clone());
    Ok(out)
}

impl Scenario for CgIneq {
    fn scenario(&self) -> (usize, usize) {
        (self.m_a(), self.m_b())
    }

    fn zero_lift(&self, n_a: usize, n_b: usize) -> Result<Self> {
        check_target(self.scenario(), n_a, n_b)?;
        let mut out = CgIneq::zero(n_a, n_b);
        {
            let (alice, bob, joint, rhs) = out.parts_mut();
            alice[..self.m_a()].clone_from_slice(self.alice());
            bob[..self.m_b()].clone_from_slice(self.bob());
            for (i, row) in self.joint().iter().enumerate() {
                joint[i][..self.m_b()].clone_from_slice(row);
            }
            *rhs = self.rhs().clone();
        }
        Ok(out)
    }

    fn support_reduce(&self) -> Reduced<Self> {
        let a_used: Vec<usize> = (0..self.m_a())
            .filter(|&i| !self.alice()[i].is_zero() || self.joint()[i].iter().any(|v| !v.is_zero()))
            .collect();
        let b_used: Vec<usize> = (0..self.m_b())
            .filter(|&j| !self.bob()[j].is_zero() || self.joint().iter().any(|r| !r[j].is_zero()))
            .collect();
        let ineq = CgIneq::new(
            a_used.iter().map(|&i| self.alice()[i].clone()).collect(),
            b_used.iter().map(|&j| self.bob()[j].clone()).collect(),
            a_used
                .iter()
                .map(|&i| b_used.iter().map(|&j| self.joint()[i][j].clone()).collect())
                .collect(),
            self.rhs().clone(),
        )
        .expect("consistent dimensions");
        let kept = a_used
            .iter()
            .map(|&i| NodeId::a(i + 1))
            .chain(b_used.iter().map(|&j| NodeId::b(j + 1)))
            .collect();
        let removed = (0..self.m_a())
            .filter(|i| !a_used.contains(i))
            .map(|i| NodeId::a(i + 1))
            .chain((0..self.m_b()).filter(|j| !b_used.contains(j)).map(|j| NodeId::b(j + 1)))
            .collect();
        Reduced { empty: a_used.is_empty() && b_used.is_empty(), ineq, kept, removed }
    }
}

/// Moves a complete-graph inequality without intra-party terms to the
/// tripartite graph.
pub fn to_tripartite(ineq: &CutIneq) -> Result<CutIneq> {
    if ineq.graph().kind() == GraphKind::Tripartite {
        return Ok(ineq.clone());
    }
    let (n_a, n_b) = ineq.graph().scenario();
    for (e, c) in ineq.coeffs().iter().enumerate() {
        let (u, v) = ineq.graph().edge_nodes(e);
        if u.party == v.party && !c.is_zero() {
            return Err(Error::WrongGraphKind { expected: "tripartite" });
        }
    }
    ineq.on_graph(Graph::build(GraphKind::Tripartite, n_a, n_b))
}
