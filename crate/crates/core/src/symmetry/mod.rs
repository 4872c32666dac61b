//! Switching and relabelling actions, canonical forms and classification.
//!
//! Two group modes are supported. [`GroupMode::Full`] acts on complete
//! graphs by arbitrary node permutations, as for facets of `CUT_n`.
//! [`GroupMode::Party`] fixes X, keeps each party together and may exchange
//! the parties; in this mode inequalities are compared after support
//! reduction, and the parties are oriented so that Alice has at most as
//! many observables as Bob.

mod refine;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::analysis::{relabel_onto, Scenario};
use crate::error::{Error, Result};
use crate::graph::{Cut, Graph, GraphKind, NodeId, Party};
use crate::ineq::CutIneq;
use crate::scalar::{primitive, rat};
use crate::Rat;

use refine::{ParityUnionFind, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupMode {
    Full,
    Party,
}

/// Negates the coefficients of edges cut by `w` and moves the rhs to
/// `a0 - a · δ(W)`.
pub fn switch(ineq: &CutIneq, w: Cut) -> Result<CutIneq> {
    let g = ineq.graph();
    g.check_cut(w)?;
    let mut coeffs = ineq.coeffs().to_vec();
    let mut rhs = ineq.rhs().clone();
    for (c, bit) in coeffs.iter_mut().zip(g.cut_bits(w)) {
        if bit == 1 {
            rhs -= &*c;
            *c = -c.clone();
        }
    }
    CutIneq::new(g.clone(), coeffs, rhs)
}

/// Image of every node of a graph, indexed by node position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabelling {
    pub images: Vec<NodeId>,
}

impl Relabelling {
    pub fn new(images: Vec<NodeId>) -> Self {
        Self { images }
    }

    pub fn identity(graph: &Graph) -> Self {
        Self { images: graph.nodes().collect() }
    }

    /// Exchanges the labels `A_i` and `B_i`.
    pub fn party_swap(graph: &Graph) -> Self {
        let images = graph
            .nodes()
            .map(|v| NodeId { party: v.party.other(), index: v.index })
            .collect();
        Self { images }
    }

    /// Exchanges two nodes and fixes the rest.
    pub fn transposition(graph: &Graph, u: NodeId, v: NodeId) -> Self {
        let images = graph
            .nodes()
            .map(|w| if w == u { v } else if w == v { u } else { w })
            .collect();
        Self { images }
    }

    pub fn image(&self, graph: &Graph, node: NodeId) -> Option<NodeId> {
        graph.position(node).and_then(|p| self.images.get(p).copied())
    }

    /// Target graph of this relabelling under `mode`, validating legality.
    fn target(&self, graph: &Graph, mode: GroupMode) -> Result<Graph> {
        let illegal = |why: &str| Error::IllegalPermutation(why.to_string());
        if self.images.len() != graph.node_count() {
            return Err(illegal("wrong number of images"));
        }
        let mut sorted = self.images.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.images.len() {
            return Err(illegal("images are not distinct"));
        }
        match mode {
            GroupMode::Full => {
                if graph.kind() != GraphKind::Complete {
                    return Err(Error::WrongGraphKind { expected: "complete" });
                }
                if self.images.iter().any(|&v| graph.position(v).is_none()) {
                    return Err(illegal("image outside the node set"));
                }
                Ok(graph.clone())
            }
            GroupMode::Party => {
                if self.images[0] != NodeId::X {
                    return Err(illegal("X must be fixed"));
                }
                let a_img: Vec<Party> = (1..=graph.n_a()).map(|p| self.images[p].party).collect();
                let b_img: Vec<Party> = (graph.n_a() + 1..graph.node_count()).map(|p| self.images[p].party).collect();
                let swapped = match (a_img.first(), b_img.first()) {
                    (Some(Party::B), _) | (None, Some(Party::A)) => true,
                    _ => false,
                };
                let (pa, pb) = if swapped { (Party::B, Party::A) } else { (Party::A, Party::B) };
                if a_img.iter().any(|&p| p != pa) || b_img.iter().any(|&p| p != pb) {
                    return Err(illegal("parties must be kept together"));
                }
                let target = if swapped {
                    Graph::build(graph.kind(), graph.n_b(), graph.n_a())
                } else {
                    graph.clone()
                };
                if self.images.iter().any(|&v| target.position(v).is_none()) {
                    return Err(illegal("image outside the node set"));
                }
                Ok(target)
            }
        }
    }
}

/// Relabels the coefficients; the rhs is unchanged.
pub fn permute(ineq: &CutIneq, relabelling: &Relabelling, mode: GroupMode) -> Result<CutIneq> {
    let g = ineq.graph();
    let target = relabelling.target(g, mode)?;
    relabel_onto(ineq, target, |v| relabelling.image(g, v))
}

/// Canonical representative of an orbit, as a primitive integer vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub mode: GroupMode,
    pub kind: GraphKind,
    pub n_a: usize,
    pub n_b: usize,
    /// Coefficients in the edge order of the `(kind, n_a, n_b)` graph.
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl CanonicalKey {
    pub fn graph(&self) -> Graph {
        Graph::build(self.kind, self.n_a, self.n_b)
    }

    /// The representative inequality the key describes.
    pub fn to_ineq(&self) -> CutIneq {
        CutIneq::from_ints(self.graph(), &self.coeffs, self.rhs).expect("key matches its graph")
    }
}

/// Limits on the canonical search.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Party mode: observables per party after support reduction.
    pub max_side: usize,
    /// Full mode: total node count.
    pub max_full_nodes: usize,
    /// Leaves of the individualization tree, or nodes of the pairwise search.
    pub max_leaves: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_side: 12, max_full_nodes: 9, max_leaves: 1 << 21 }
    }
}

/// Maps an inequality onto a target graph: relabel, switch, scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivCertificate {
    /// Source node to target node, for every node carrying a coefficient.
    pub mapping: Vec<(NodeId, NodeId)>,
    /// Target nodes switched after relabelling.
    pub switching: Vec<NodeId>,
    /// Positive factor applied last.
    pub scale: Rat,
}

impl EquivCertificate {
    pub fn apply(&self, source: &CutIneq, target: &Graph) -> Result<CutIneq> {
        let mapped = relabel_onto(source, target.clone(), |v| {
            self.mapping.iter().find(|(s, _)| *s == v).map(|&(_, t)| t)
        })?;
        let switched = switch(&mapped, target.cut_of(&self.switching)?)?;
        let (g, coeffs, rhs) = switched.into_parts();
        CutIneq::new(g, coeffs.into_iter().map(|c| c * &self.scale).collect(), rhs * &self.scale)
    }

    /// Whether applying the certificate to `source` reproduces `target` exactly.
    pub fn verify(&self, source: &CutIneq, target: &CutIneq) -> bool {
        self.apply(source, target.graph()).is_ok_and(|h| &h == target)
    }
}

/// Canonical key together with the certificate that maps the input onto it.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: CanonicalKey,
    pub certificate: EquivCertificate,
}

/// Reduced, oriented working copy of an inequality.
struct Prepared {
    ineq: CutIneq,
    /// Original node for each position of `ineq`'s graph.
    labels: Vec<NodeId>,
}

fn prepare(ineq: &CutIneq, mode: GroupMode, budget: &Budget) -> Result<Vec<Prepared>> {
    match mode {
        GroupMode::Full => {
            let g = ineq.graph();
            if g.kind() != GraphKind::Complete {
                return Err(Error::WrongGraphKind { expected: "complete" });
            }
            if g.node_count() > budget.max_full_nodes {
                return Err(Error::BudgetExceeded(format!(
                    "{} nodes exceed the full-mode limit of {}",
                    g.node_count(),
                    budget.max_full_nodes
                )));
            }
            let flat = Graph::build(GraphKind::Complete, g.node_count() - 1, 0);
            let labels: Vec<NodeId> = g.nodes().collect();
            let moved = relabel_onto(ineq, flat.clone(), |v| g.position(v).map(|p| flat.node(p)))?;
            Ok(vec![Prepared { ineq: moved, labels }])
        }
        GroupMode::Party => {
            let red = ineq.support_reduce();
            let (a, b) = red.ineq.graph().scenario();
            if a.max(b) > budget.max_side {
                return Err(Error::BudgetExceeded(format!(
                    "scenario ({a}, {b}) exceeds {} observables per party",
                    budget.max_side
                )));
            }
            let mut labels = vec![NodeId::X];
            labels.extend(red.kept.iter().copied());
            let straight = Prepared { ineq: red.ineq.clone(), labels: labels.clone() };
            let g = red.ineq.graph();
            let swap = || -> Result<Prepared> {
                let r = Relabelling::party_swap(g);
                let swapped = permute(&red.ineq, &r, GroupMode::Party)?;
                let sg = swapped.graph().clone();
                let mut sl = vec![NodeId::X; sg.node_count()];
                for p in 0..g.node_count() {
                    sl[sg.position(r.images[p]).expect("swapped node")] = labels[p];
                }
                Ok(Prepared { ineq: swapped, labels: sl })
            };
            Ok(match a.cmp(&b) {
                std::cmp::Ordering::Less => vec![straight],
                std::cmp::Ordering::Greater => vec![swap()?],
                std::cmp::Ordering::Equal => vec![straight, swap()?],
            })
        }
    }
}

struct IntForm {
    n: usize,
    w: Vec<i64>,
    rhs: i64,
    class: Vec<u32>,
}

fn int_form(p: &Prepared, mode: GroupMode) -> Result<IntForm> {
    let g = p.ineq.graph();
    let (coeffs, rhs) = p.ineq.i64_form().ok_or(Error::Overflow)?;
    let n = g.node_count();
    let mut w = vec![0i64; n * n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        w[u * n + v] = coeffs[e];
        w[v * n + u] = coeffs[e];
    }
    let class = match mode {
        GroupMode::Full => vec![0; n],
        GroupMode::Party => (0..n)
            .map(|p| match g.party_of(p) {
                Party::X => 0,
                Party::A => 1,
                Party::B => 2,
            })
            .collect(),
    };
    Ok(IntForm { n, w, rhs, class })
}

pub fn canonical_form(ineq: &CutIneq, mode: GroupMode) -> Result<CanonicalKey> {
    Ok(canonical_with(ineq, mode, &Budget::default())?.key)
}

/// Canonical key and a certificate mapping `ineq` onto the key's representative.
pub fn canonical_with(ineq: &CutIneq, mode: GroupMode, budget: &Budget) -> Result<Canonical> {
    let mut best: Option<Canonical> = None;
    for p in prepare(ineq, mode, budget)? {
        let form = int_form(&p, mode)?;
        let g = p.ineq.graph();
        let problem = Problem {
            n: form.n,
            w: &form.w,
            rhs: form.rhs,
            class: &form.class,
            edges: g.edges(),
            max_leaves: budget.max_leaves,
        };
        let leaf = problem.canonical()?;
        let rhs = *leaf.key.last().expect("rhs");
        let key = CanonicalKey {
            mode,
            kind: g.kind(),
            n_a: g.n_a(),
            n_b: g.n_b(),
            coeffs: leaf.key[..leaf.key.len() - 1].to_vec(),
            rhs,
        };
        if best.as_ref().is_some_and(|b| b.key <= key) {
            continue;
        }
        let target = key.graph();
        let mapping = leaf
            .order
            .iter()
            .enumerate()
            .map(|(t, &src)| (p.labels[src], target.node(t)))
            .collect();
        let switching = (0..form.n).filter(|&t| leaf.switched[t]).map(|t| target.node(t)).collect();
        let certificate = EquivCertificate { mapping, switching, scale: scale_of(ineq) };
        best = Some(Canonical { key, certificate });
    }
    Ok(best.expect("at least one orientation"))
}

/// Factor turning an inequality into its primitive integer form.
fn scale_of(ineq: &CutIneq) -> Rat {
    let mut all = ineq.coeffs().to_vec();
    all.push(ineq.rhs().clone());
    primitive(&all).1
}

/// Decides equivalence under `mode` and returns a verified certificate.
pub fn equivalent(f: &CutIneq, g: &CutIneq, mode: GroupMode) -> Option<EquivCertificate> {
    equivalent_with(f, g, mode, &Budget::default())
}

pub fn equivalent_with(f: &CutIneq, g: &CutIneq, mode: GroupMode, budget: &Budget) -> Option<EquivCertificate> {
    if mode == GroupMode::Full && f.graph().node_count() != g.graph().node_count() {
        return None;
    }
    match (canonical_with(f, mode, budget), canonical_with(g, mode, budget)) {
        (Ok(cf), Ok(cg)) => {
            if cf.key != cg.key {
                return None;
            }
            let mapping = cf
                .certificate
                .mapping
                .iter()
                .filter_map(|&(src, mid)| {
                    cg.certificate.mapping.iter().find(|(_, m)| *m == mid).map(|&(dst, _)| (src, dst))
                })
                .collect();
            solve(f, g, mapping)
        }
        (Err(Error::BudgetExceeded(_)), _) | (_, Err(Error::BudgetExceeded(_))) => pairwise(f, g, mode, budget),
        _ => None,
    }
}

/// Completes a node mapping with the switching and scale that carry `f` to `g`.
fn solve(f: &CutIneq, g: &CutIneq, mapping: Vec<(NodeId, NodeId)>) -> Option<EquivCertificate> {
    let tg = g.graph();
    let h = relabel_onto(f, tg.clone(), |v| mapping.iter().find(|(s, _)| *s == v).map(|&(_, t)| t)).ok()?;
    let first = g.coeffs().iter().position(|c| !c.is_zero());
    let scale = match first {
        Some(e) if !h.coeffs()[e].is_zero() => (g.coeffs()[e].clone() / h.coeffs()[e].clone()).abs(),
        Some(_) => return None,
        None if h.coeffs().iter().all(Zero::is_zero) => {
            if g.rhs().is_zero() && h.rhs().is_zero() {
                rat(1)
            } else if h.rhs().is_zero() || g.rhs().is_zero() || (g.rhs() / h.rhs()).is_negative() {
                return None;
            } else {
                g.rhs() / h.rhs()
            }
        }
        None => return None,
    };
    let mut uf = ParityUnionFind::new(tg.node_count());
    for (e, &(u, v)) in tg.edges().iter().enumerate() {
        let (a, b) = (&h.coeffs()[e], &g.coeffs()[e]);
        if a.is_zero() != b.is_zero() {
            return None;
        }
        if !a.is_zero() {
            let scaled = a * &scale;
            let flip = if &scaled == b {
                false
            } else if &-scaled == b {
                true
            } else {
                return None;
            };
            if !uf.union(u, v, flip) {
                return None;
            }
        }
    }
    let (r0, p0) = uf.find(0);
    let switching: Vec<NodeId> = (1..tg.node_count())
        .filter(|&v| {
            let (r, p) = uf.find(v);
            if r == r0 { p ^ p0 } else { p }
        })
        .map(|v| tg.node(v))
        .collect();
    let cert = EquivCertificate { mapping, switching, scale };
    cert.verify(f, g).then_some(cert)
}

/// Direct backtracking search for a relabelling, used when canonical keys
/// are out of budget.
fn pairwise(f: &CutIneq, g: &CutIneq, mode: GroupMode, budget: &Budget) -> Option<EquivCertificate> {
    let loose = Budget { max_side: usize::MAX, max_full_nodes: usize::MAX, ..*budget };
    let targets = prepare(g, mode, &loose).ok()?;
    let target = targets.first()?;
    let tf = int_form(target, mode).ok()?;
    let tp = Problem { n: tf.n, w: &tf.w, rhs: tf.rhs, class: &tf.class, edges: target.ineq.graph().edges(), max_leaves: 0 };
    let tcol = tp.stable_colours();
    for src in prepare(f, mode, &loose).ok()? {
        if src.ineq.graph() != target.ineq.graph() {
            continue;
        }
        let sf = int_form(&src, mode).ok()?;
        let sp = Problem { n: sf.n, w: &sf.w, rhs: sf.rhs, class: &sf.class, edges: src.ineq.graph().edges(), max_leaves: 0 };
        let scol = sp.stable_colours();
        let mut s_sorted = scol.clone();
        let mut t_sorted = tcol.clone();
        s_sorted.sort_unstable();
        t_sorted.sort_unstable();
        if s_sorted != t_sorted {
            continue;
        }
        let mut state = Backtrack {
            n: sf.n,
            sw: &sf.w,
            tw: &tf.w,
            scol: &scol,
            tcol: &tcol,
            image: vec![usize::MAX; sf.n],
            used: vec![false; sf.n],
            visits: 0,
            cap: budget.max_leaves.saturating_mul(16),
            found: None,
        };
        state.extend(0, ParityUnionFind::new(sf.n), f, g, &src, target);
        if let Some(cert) = state.found {
            return Some(cert);
        }
    }
    None
}

struct Backtrack<'a> {
    n: usize,
    sw: &'a [i64],
    tw: &'a [i64],
    scol: &'a [u32],
    tcol: &'a [u32],
    image: Vec<usize>,
    used: Vec<bool>,
    visits: u64,
    cap: u64,
    found: Option<EquivCertificate>,
}

impl Backtrack<'_> {
    fn extend(&mut self, v: usize, uf: ParityUnionFind, f: &CutIneq, g: &CutIneq, src: &Prepared, dst: &Prepared) {
        if self.found.is_some() || self.visits > self.cap {
            return;
        }
        self.visits += 1;
        if v == self.n {
            let mapping = (0..self.n).map(|s| (src.labels[s], dst.labels[self.image[s]])).collect();
            self.found = solve(f, g, mapping);
            return;
        }
        for t in 0..self.n {
            if self.used[t] || self.tcol[t] != self.scol[v] {
                continue;
            }
            let mut next = uf.clone();
            let consistent = (0..v).all(|u| {
                let a = self.sw[v * self.n + u];
                let b = self.tw[t * self.n + self.image[u]];
                a.abs() == b.abs() && (a == 0 || next.union(t, self.image[u], a != b))
            });
            if !consistent {
                continue;
            }
            self.image[v] = t;
            self.used[t] = true;
            self.extend(v + 1, next, f, g, src, dst);
            self.used[t] = false;
            self.image[v] = usize::MAX;
        }
    }
}

/// One equivalence class of a classified list.
#[derive(Clone, Debug)]
pub struct ClassReport {
    pub key: CanonicalKey,
    pub representative: CutIneq,
    /// Input indices, ascending.
    pub members: Vec<usize>,
    /// For each member, a certificate mapping it onto the representative.
    pub certificates: Vec<EquivCertificate>,
}

impl ClassReport {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// Partitions a list into classes, ordered by canonical key.
pub fn classify(list: &[CutIneq], mode: GroupMode) -> Result<Vec<ClassReport>> {
    classify_with(list, mode, &Budget::default())
}

pub fn classify_with(list: &[CutIneq], mode: GroupMode, budget: &Budget) -> Result<Vec<ClassReport>> {
    let canon: Vec<Canonical> = list
        .par_iter()
        .enumerate()
        .map(|(i, f)| canonical_with(f, mode, budget).map_err(|e| e.at(i)))
        .collect::<Result<_>>()?;
    let mut classes: BTreeMap<CanonicalKey, ClassReport> = BTreeMap::new();
    for (i, c) in canon.into_iter().enumerate() {
        let entry = classes.entry(c.key.clone()).or_insert_with(|| ClassReport {
            representative: c.key.to_ineq(),
            key: c.key,
            members: Vec::new(),
            certificates: Vec::new(),
        });
        entry.members.push(i);
        entry.certificates.push(c.certificate);
    }
    Ok(classes.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh() -> CutIneq {
        let g = Graph::tripartite(2, 2).unwrap();
        CutIneq::from_terms(g, &[("A1B1", -1), ("A1B2", -1), ("A2B1", -1), ("A2B2", 1)], 0).unwrap()
    }

    #[test]
    fn switching_example() {
        let g = Graph::tripartite(1, 1).unwrap();
        let f = CutIneq::from_terms(g.clone(), &[("A1B1", 1), ("XA1", -1), ("XB1", -1)], 0).unwrap();
        let s = switch(&f, g.cut_of(&[NodeId::a(1)]).unwrap()).unwrap();
        let expected = CutIneq::from_terms(g.clone(), &[("A1B1", -1), ("XA1", 1), ("XB1", -1)], 0).unwrap();
        assert_eq!(s, expected);
        assert_eq!(switch(&f, Cut::EMPTY).unwrap(), f);
        let w = g.cut_of(&[NodeId::b(1)]).unwrap();
        assert_eq!(switch(&switch(&f, w).unwrap(), w).unwrap(), f);
    }

    #[test]
    fn permutation_examples() {
        let f = chsh();
        let g = f.graph().clone();
        let t = Relabelling::transposition(&g, NodeId::a(1), NodeId::a(2));
        let p = permute(&f, &t, GroupMode::Party).unwrap();
        let expected = CutIneq::from_terms(g.clone(), &[("A2B1", -1), ("A2B2", -1), ("A1B1", -1), ("A1B2", 1)], 0).unwrap();
        assert_eq!(p, expected);
        assert_eq!(permute(&f, &Relabelling::identity(&g), GroupMode::Party).unwrap(), f);
        let bad = Relabelling::transposition(&g, NodeId::a(1), NodeId::b(1));
        assert!(matches!(permute(&f, &bad, GroupMode::Party), Err(Error::IllegalPermutation(_))));
        let moved_x = Relabelling::transposition(&g, NodeId::X, NodeId::a(1));
        assert!(permute(&f, &moved_x, GroupMode::Party).is_err());
    }

    #[test]
    fn party_swap_transposes_the_joint_table() {
        use crate::ineq::convert_cut_to_cg;
        let g = Graph::tripartite(2, 3).unwrap();
        let f = CutIneq::from_terms(g.clone(), &[("A1B3", 2), ("A2B1", -1), ("XB2", 1)], 0).unwrap();
        let s = permute(&f, &Relabelling::party_swap(&g), GroupMode::Party).unwrap();
        assert_eq!(s.graph().scenario(), (3, 2));
        assert_eq!(convert_cut_to_cg(&s).unwrap(), convert_cut_to_cg(&f).unwrap().transpose());
    }

    #[test]
    fn chsh_orbit_has_one_key() {
        let f = chsh();
        let k = canonical_form(&f, GroupMode::Party).unwrap();
        let g = f.graph().clone();
        let s = switch(&f, g.cut_of(&[NodeId::b(2)]).unwrap()).unwrap();
        assert_eq!(canonical_form(&s, GroupMode::Party).unwrap(), k);
        let cert = equivalent(&f, &s, GroupMode::Party).unwrap();
        assert!(cert.verify(&f, &s));
    }

    #[test]
    fn certificate_maps_onto_key() {
        let f = chsh();
        let c = canonical_with(&f, GroupMode::Party, &Budget::default()).unwrap();
        assert!(c.certificate.verify(&f, &c.key.to_ineq()));
    }

    #[test]
    fn pairwise_search_agrees() {
        let f = chsh();
        let g = f.graph().clone();
        let s = switch(&permute(&f, &Relabelling::transposition(&g, NodeId::b(1), NodeId::b(2)), GroupMode::Party).unwrap(), Cut(0b0101)).unwrap();
        let cert = pairwise(&f, &s, GroupMode::Party, &Budget::default()).unwrap();
        assert!(cert.verify(&f, &s));
        let pos = CutIneq::from_terms(g, &[("XA1", -1), ("XB1", -1), ("A1B1", 1)], 0).unwrap();
        assert!(pairwise(&f, &pos, GroupMode::Party, &Budget::default()).is_none());
    }

    #[test]
    fn singleton_list_is_one_class() {
        let r = classify(&[chsh()], GroupMode::Party).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].members, vec![0]);
    }
}
