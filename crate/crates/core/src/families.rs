//! Closed-form Bell inequality families, the named catalog and the
//! inclusion relation.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::analysis::Scenario;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Party};
use crate::ineq::{CgIneq, CutIneq, Inequality};
use crate::scalar::rat;
use crate::symmetry::{canonical_form, equivalent, CanonicalKey, EquivCertificate, GroupMode};
use crate::Rat;

/// Hypermetric weights. The weight of X is `1 - Σ alice - Σ bob` and is
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub alice: Vec<i64>,
    pub bob: Vec<i64>,
}

impl WeightVector {
    pub fn new(alice: Vec<i64>, bob: Vec<i64>) -> Self {
        Self { alice, bob }
    }

    pub fn x(&self) -> i64 {
        1 - self.alice.iter().sum::<i64>() - self.bob.iter().sum::<i64>()
    }

    /// Weights of X, the Alice nodes and the Bob nodes, in node order.
    pub fn entries(&self) -> Vec<i64> {
        let mut all = vec![self.x()];
        all.extend(&self.alice);
        all.extend(&self.bob);
        all
    }
}

/// `Σ b_u b_v x_uv <= 0` on the complete graph with `s + t + 1` nodes.
pub fn hypermetric(b: &WeightVector) -> Result<CutIneq> {
    let g = Graph::complete(b.alice.len(), b.bob.len())?;
    let w = b.entries();
    let coeffs = (0..g.edge_count())
        .map(|e| {
            let (u, v) = g.edge_nodes(e);
            rat(w[g.position(u).expect("node")] * w[g.position(v).expect("node")])
        })
        .collect();
    CutIneq::new(g, coeffs, Rat::zero())
}

/// Pairs `(i, i')`, `i < i'`, with a nonzero weight product, in lexicographic
/// order. These are the pairs that receive a fresh node.
fn product_pairs(w: &[i64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..w.len() {
        for k in i + 1..w.len() {
            if w[i] * w[k] != 0 {
                out.push((i, k));
            }
        }
    }
    out
}

fn half(v: i64) -> Rat {
    Rat::new(v.into(), 2.into())
}

/// Bell inequality obtained by triangular elimination of [`hypermetric`],
/// written directly in Collins–Gisin form.
///
/// Fresh observables are numbered as [`crate::triangular_eliminate`] numbers
/// them: one per nonzero intra-party product, in lexicographic pair order.
pub fn hypermetric_bell(b: &WeightVector) -> Result<CgIneq> {
    let (s, t) = (b.alice.len(), b.bob.len());
    let a_pairs = product_pairs(&b.alice);
    let b_pairs = product_pairs(&b.bob);
    let (m_a, m_b) = (s + b_pairs.len(), t + a_pairs.len());
    if m_a + m_b == 0 {
        return Err(Error::EmptyScenario);
    }
    let mut out = CgIneq::zero(m_a, m_b);
    let (alice, bob, joint, _) = out.parts_mut();

    // b ((1 - b)/2 - Σ of earlier weights with the same sign)
    let own = |w: &[i64], i: usize| -> Rat {
        let positive = w[i] > 0;
        let earlier: i64 = w[..i].iter().filter(|&&v| (v > 0) == positive).sum();
        rat(w[i]) * (half(1 - w[i]) - rat(earlier))
    };
    for i in 0..s {
        alice[i] = own(&b.alice, i);
    }
    for j in 0..t {
        bob[j] = own(&b.bob, j);
    }
    for i in 0..s {
        for j in 0..t {
            joint[i][j] = rat(-b.alice[i] * b.bob[j]);
        }
    }
    for (k, &(i, i2)) in a_pairs.iter().enumerate() {
        let p = b.alice[i] * b.alice[i2];
        bob[t + k] = rat(p.min(0));
        joint[i][t + k] = rat(-p);
        joint[i2][t + k] = rat(p.abs());
    }
    for (k, &(j, j2)) in b_pairs.iter().enumerate() {
        let p = b.bob[j] * b.bob[j2];
        alice[s + k] = rat(p.min(0));
        joint[s + k][j] = rat(-p);
        joint[s + k][j2] = rat(p.abs());
    }
    Ok(out)
}

/// Pure hypermetric case: the `s` Alice weights and the first `t - l` Bob
/// weights are 1, the remaining `l` Bob weights are -1.
///
/// Needs `s <= l <= t` and `s + t` equal to `2l` (weight of X is 1) or
/// `2l + 1` (weight of X is 0). `(1, 1, 1)` is a trivial inequality and
/// `(1, 1, 2)` is CHSH.
pub fn pure_hypermetric_bell(l: usize, s: usize, t: usize) -> Result<CgIneq> {
    if l == 0 || s > l || l > t || (s + t != 2 * l && s + t != 2 * l + 1) {
        return Err(Error::InvalidParameters(format!(
            "(l, s, t) = ({l}, {s}, {t}) needs s <= l <= t and s + t in {{2l, 2l + 1}}"
        )));
    }
    if s + t == 2 * l {
        return Ok(pure_display(l, s, t));
    }
    let mut bob = vec![1; t - l];
    bob.extend(vec![-1; l]);
    hypermetric_bell(&WeightVector::new(vec![1; s], bob))
}

/// Closed form of the pure case with `s + t = 2l`.
fn pure_display(l: usize, s: usize, t: usize) -> CgIneq {
    let u = l - s;
    let (m_a, m_b) = (s + t * t.saturating_sub(1) / 2, t + s * s.saturating_sub(1) / 2);
    let mut out = CgIneq::zero(m_a, m_b);
    let (alice, bob, joint, _) = out.parts_mut();
    let one = || Rat::one();
    let pair_index = |n: usize, i: usize, k: usize| i * (2 * n - i - 1) / 2 + (k - i - 1);

    for i in 0..s {
        alice[i] = -rat(i as i64);
    }
    for j in 0..t {
        bob[j] = if j < u { -rat(j as i64) } else { -rat((j + 1 - u) as i64) };
    }
    for i in 0..s {
        for j in 0..t {
            joint[i][j] = if j < u { -one() } else { one() };
        }
    }
    for i in 0..s {
        for i2 in i + 1..s {
            let fresh = t + pair_index(s, i, i2);
            joint[i][fresh] = -one();
            joint[i2][fresh] = one();
        }
    }
    for j in 0..t {
        for j2 in j + 1..t {
            let fresh = s + pair_index(t, j, j2);
            let mixed = j < u && j2 >= u;
            if mixed {
                alice[fresh] = -one();
            }
            joint[fresh][j] = if mixed { one() } else { -one() };
            joint[fresh][j2] = one();
        }
    }
    out
}

/// Which sufficient condition for tightness of [`hypermetric_bell`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TightnessCondition {
    /// `l + 1` weights equal 1, `l` equal -1, the rest 0, for some `l > 1`.
    Pure(usize),
    /// Between 3 and `n - 3` weights positive, all others -1.
    NegativeTail,
    None,
}

/// Checks the weight list including X. When both conditions hold the
/// negative-tail condition is reported.
pub fn hypermetric_tightness_condition(b: &WeightVector) -> TightnessCondition {
    let w = b.entries();
    let n = w.len();
    let positive = w.iter().filter(|&&v| v > 0).count();
    if positive >= 3 && positive + 3 <= n && w.iter().all(|&v| v > 0 || v == -1) {
        return TightnessCondition::NegativeTail;
    }
    let ones = w.iter().filter(|&&v| v == 1).count();
    let minus = w.iter().filter(|&&v| v == -1).count();
    if minus > 1 && ones == minus + 1 && ones + minus + w.iter().filter(|&&v| v == 0).count() == n {
        return TightnessCondition::Pure(minus);
    }
    TightnessCondition::None
}

/// Parameters of a pure clique-web inequality with `s >= t >= 2` and
/// `s - t = 2r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CliqueWebParams {
    pub s: usize,
    pub t: usize,
    pub r: usize,
}

impl CliqueWebParams {
    pub fn new(s: usize, t: usize, r: usize) -> Result<Self> {
        if t < 2 || s < t || s - t != 2 * r {
            return Err(Error::InvalidParameters(format!(
                "clique-web (s, t, r) = ({s}, {t}, {r}) needs s >= t >= 2 and s - t = 2r"
            )));
        }
        Ok(Self { s, t, r })
    }

    /// Alice pairs `(i, i')` (0-based) with `r + 1 <= i' - i <= s - r`.
    fn alice_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.s {
            for k in i + 1..self.s {
                if k - i > self.r && k - i <= self.s - self.r {
                    out.push((i, k));
                }
            }
        }
        out
    }
}

/// Pure clique-web inequality on `K_{s+t+1}`: weights 1 on the cycle
/// `A_1, …, A_s, X` and -1 on `B_1..B_t`, with the antiweb edges (cyclic
/// distance at most `r` on the cycle) removed.
pub fn cliqueweb(p: CliqueWebParams) -> Result<CutIneq> {
    let p = CliqueWebParams::new(p.s, p.t, p.r)?;
    let (s, t, r) = (p.s, p.t, p.r);
    let g = Graph::complete(s, t)?;
    let mut f = CutIneq::zero(g);
    // cycle position of X is s + 1
    let far = |i: usize, k: usize| {
        let d = k.abs_diff(i);
        d.min(s + 1 - d) > r
    };
    for i in 1..=s {
        if far(i, s + 1) {
            f.set_coeff(NodeId::X, NodeId::a(i), Rat::one())?;
        }
        for k in i + 1..=s {
            if far(i, k) {
                f.set_coeff(NodeId::a(i), NodeId::a(k), Rat::one())?;
            }
        }
        for j in 1..=t {
            f.set_coeff(NodeId::a(i), NodeId::b(j), -Rat::one())?;
        }
    }
    for j in 1..=t {
        f.set_coeff(NodeId::X, NodeId::b(j), -Rat::one())?;
        for k in j + 1..=t {
            f.set_coeff(NodeId::b(j), NodeId::b(k), Rat::one())?;
        }
    }
    Ok(f)
}

/// Bell inequality obtained by triangular elimination of [`cliqueweb`].
///
/// Alice marginals are 0 for `i <= r`, `-(i - r - 1)` up to `s - r` and `-t`
/// above; Bob marginals are `-(j + r)`. Fresh Bob observables exist for the
/// Alice pairs with `r + 1 <= i' - i <= s - r`, fresh Alice observables for
/// every Bob pair.
pub fn cliqueweb_bell(p: CliqueWebParams) -> Result<CgIneq> {
    let p = CliqueWebParams::new(p.s, p.t, p.r)?;
    let (s, t, r) = (p.s, p.t, p.r);
    let a_pairs = p.alice_pairs();
    let b_pairs: Vec<(usize, usize)> = (0..t).flat_map(|j| (j + 1..t).map(move |k| (j, k))).collect();
    let mut out = CgIneq::zero(s + b_pairs.len(), t + a_pairs.len());
    let (alice, bob, joint, _) = out.parts_mut();
    let one = || Rat::one();
    for (i, v) in alice.iter_mut().take(s).enumerate() {
        let i = i + 1;
        if i > s - r {
            *v = -rat(t as i64);
        } else if i > r {
            *v = -rat((i - r - 1) as i64);
        }
    }
    for (j, v) in bob.iter_mut().take(t).enumerate() {
        *v = -rat((j + 1 + r) as i64);
    }
    for row in joint.iter_mut().take(s) {
        for v in row.iter_mut().take(t) {
            *v = one();
        }
    }
    for (k, &(i, i2)) in a_pairs.iter().enumerate() {
        joint[i][t + k] = -one();
        joint[i2][t + k] = one();
    }
    for (k, &(j, j2)) in b_pairs.iter().enumerate() {
        joint[s + k][j] = -one();
        joint[s + k][j2] = one();
    }
    Ok(out)
}

/// `I_mm22` with rows for Alice: Alice marginals `(-1, 0, …, 0)`, Bob
/// marginals `(-(m-1), …, -1, 0)`, joint 1 above the anti-diagonal
/// `i + j = m + 2` and -1 on it.
pub fn immm22(m: usize) -> Result<CgIneq> {
    if m < 2 {
        return Err(Error::InvalidParameters(format!("I_mm22 needs m >= 2, got {m}")));
    }
    let mut out = CgIneq::zero(m, m);
    let (alice, bob, joint, _) = out.parts_mut();
    alice[0] = -Rat::one();
    for (j, v) in bob.iter_mut().enumerate() {
        *v = -rat((m - 1 - j) as i64);
    }
    for (i, row) in joint.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let sum = i + j + 2;
            if sum <= m + 1 {
                *v = Rat::one();
            } else if sum == m + 2 {
                *v = -Rat::one();
            }
        }
    }
    Ok(out)
}

pub const CATALOG: [&str; 9] = [
    "chsh",
    "i3322",
    "i3422_1",
    "i3422_2",
    "i3422_3",
    "pentagonal",
    "grishukhin",
    "triangle",
    "positive_probability",
];

/// Named inequalities as published.
pub fn catalog(name: &str) -> Result<Inequality> {
    let cg = |a: &[i64], b: &[i64], j: &[&[i64]], rhs| CgIneq::from_ints(a, b, j, rhs).map(Inequality::from);
    match name {
        "chsh" => cg(&[-1, 0], &[-1, 0], &[&[1, 1], &[1, -1]], 0),
        "i3322" => cg(&[-1, 0, 0], &[-2, -1, 0], &[&[1, 1, 1], &[1, 1, -1], &[1, -1, 0]], 0),
        "i3422_1" => cg(
            &[1, 0, 0, 1],
            &[1, 1, -2],
            &[&[-1, -1, 1], &[-1, 1, 1], &[1, -1, 1], &[-1, -1, -1]],
            2,
        ),
        "i3422_2" => cg(
            &[-1, 0, -1, 1],
            &[0, 1, -1],
            &[&[-1, 1, 1], &[0, -1, 1], &[1, 0, 1], &[-1, -1, 0]],
            1,
        ),
        "i3422_3" => cg(
            &[0, 0, -1, 2],
            &[1, 0, -1],
            &[&[-2, 1, 1], &[0, -1, 1], &[1, 1, 1], &[-1, -1, -1]],
            2,
        ),
        "positive_probability" => cg(&[0], &[0], &[&[-1]], 0),
        "pentagonal" => {
            let terms = [
                ("XA1", 1), ("XA2", 1), ("XB1", -1), ("XB2", -1), ("A1A2", 1),
                ("A1B1", -1), ("A1B2", -1), ("A2B1", -1), ("A2B2", -1), ("B1B2", 1),
            ];
            CutIneq::from_terms(Graph::complete(2, 2)?, &terms, 0).map(Inequality::from)
        }
        "triangle" => {
            CutIneq::from_terms(Graph::complete(2, 1)?, &[("A1A2", 1), ("A1B1", -1), ("A2B1", -1)], 0)
                .map(Inequality::from)
        }
        "grishukhin" => grishukhin().map(Inequality::from),
        _ => Err(Error::UnknownCatalogEntry(name.to_string())),
    }
}

/// Grishukhin's facet of `CUT(K_7)`, node `k` placed at position `k - 1`.
fn grishukhin() -> Result<CutIneq> {
    let g = Graph::k(7)?;
    let mut f = CutIneq::zero(g.clone());
    let mut put = |u: usize, v: usize, c: i64| f.set_coeff(g.node(u - 1), g.node(v - 1), rat(c));
    for i in 1..=4 {
        for j in i + 1..=4 {
            put(i, j, 1)?;
        }
        put(i, 5, -2)?;
    }
    for (u, v, c) in [(5, 6, 1), (5, 7, 1), (6, 7, -1), (1, 6, -1), (3, 6, -1), (2, 7, -1), (4, 7, -1)] {
        put(u, v, c)?;
    }
    Ok(f)
}

/// Fixes observables to deterministic outcomes and deletes them.
///
/// Value 0 drops the observable's terms. Value 1 moves its marginal to the
/// right-hand side and its joint terms onto the partners' marginals.
/// Remaining observables keep their relative order.
pub fn fix_observables(ineq: &CgIneq, fixes: &[(NodeId, u8)]) -> Result<CgIneq> {
    let mut alice = ineq.alice().to_vec();
    let mut bob = ineq.bob().to_vec();
    let mut rhs = ineq.rhs().clone();
    let mut drop_a = vec![false; ineq.m_a()];
    let mut drop_b = vec![false; ineq.m_b()];
    for &(node, value) in fixes {
        if value > 1 {
            return Err(Error::InvalidParameters(format!("outcome {value} for {node}; use 0 or 1")));
        }
        let idx = node.index.wrapping_sub(1);
        let slot = match node.party {
            Party::A if idx < ineq.m_a() => &mut drop_a[idx],
            Party::B if idx < ineq.m_b() => &mut drop_b[idx],
            _ => return Err(Error::ForeignNode(node)),
        };
        if std::mem::replace(slot, true) {
            return Err(Error::InvalidParameters(format!("{node} fixed twice")));
        }
    }
    for &(node, value) in fixes {
        if value == 0 {
            continue;
        }
        let idx = node.index - 1;
        match node.party {
            Party::A => {
                rhs -= &ineq.alice()[idx];
                for (j, v) in ineq.joint()[idx].iter().enumerate() {
                    bob[j] += v;
                }
            }
            _ => {
                rhs -= &ineq.bob()[idx];
                for (i, row) in ineq.joint().iter().enumerate() {
                    alice[i] += &row[idx];
                }
            }
        }
    }
    // terms between two observables fixed to 1 are constants
    for &(u, vu) in fixes.iter().filter(|f| f.0.party == Party::A) {
        for &(w, vw) in fixes.iter().filter(|f| f.0.party == Party::B) {
            if vu == 1 && vw == 1 {
                rhs -= &ineq.joint()[u.index - 1][w.index - 1];
            }
        }
    }
    let keep_a: Vec<usize> = (0..ineq.m_a()).filter(|&i| !drop_a[i]).collect();
    let keep_b: Vec<usize> = (0..ineq.m_b()).filter(|&j| !drop_b[j]).collect();
    CgIneq::new(
        keep_a.iter().map(|&i| alice[i].clone()).collect(),
        keep_b.iter().map(|&j| bob[j].clone()).collect(),
        keep_a.iter().map(|&i| keep_b.iter().map(|&j| ineq.joint()[i][j].clone()).collect()).collect(),
        rhs,
    )
}

pub fn fix_observable(ineq: &CgIneq, node: NodeId, value: u8) -> Result<CgIneq> {
    fix_observables(ineq, &[(node, value)])
}

/// Search limits for [`includes_chsh`].
#[derive(Clone, Copy, Debug)]
pub struct InclusionBudget {
    /// All fixings are tried when the scenario has at most this many
    /// observables; above it only fixings to 0.
    pub exhaustive_limit: usize,
    /// Maximum number of residual inequalities examined.
    pub max_checks: u64,
}

impl Default for InclusionBudget {
    fn default() -> Self {
        Self { exhaustive_limit: 12, max_checks: 1 << 24 }
    }
}

/// Fixing of every observable except two per party that leaves CHSH.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionCertificate {
    pub kept: [NodeId; 4],
    pub fixes: Vec<(NodeId, u8)>,
    pub residual: CgIneq,
    /// Maps the residual onto the catalog CHSH.
    pub certificate: EquivCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Found(Box<InclusionCertificate>),
    /// The whole search space was examined.
    NotFound,
    /// The budget truncated the search.
    Unknown,
}

fn chsh() -> CgIneq {
    match catalog("chsh") {
        Ok(Inequality::Cg(c)) => c,
        _ => unreachable!("catalog holds CHSH in CG form"),
    }
}

/// Searches for a fixing of all but two observables per party that turns
/// `ineq` into an inequality equivalent to CHSH.
///
/// Fixings to 0 are tried first for every choice of kept observables, then
/// the remaining fixings when the scenario is small enough. The first
/// certificate in this order is returned.
pub fn includes_chsh(ineq: &CgIneq, budget: &InclusionBudget) -> Result<Inclusion> {
    let (m_a, m_b) = ineq.scenario();
    if m_a < 2 || m_b < 2 {
        return Ok(Inclusion::NotFound);
    }
    let target = chsh().to_cut();
    let key = canonical_form(&target, GroupMode::Party)?;
    let pairs = |m: usize| -> Vec<(usize, usize)> { (0..m).flat_map(|i| (i + 1..m).map(move |k| (i, k))).collect() };
    let quads: Vec<[NodeId; 4]> = pairs(m_a)
        .into_iter()
        .flat_map(|(i, k)| {
            pairs(m_b)
                .into_iter()
                .map(move |(j, l)| [NodeId::a(i + 1), NodeId::a(k + 1), NodeId::b(j + 1), NodeId::b(l + 1)])
        })
        .collect();
    let others = m_a + m_b - 4;
    let exhaustive = m_a + m_b <= budget.exhaustive_limit;
    let masks: u64 = if exhaustive { 1u64 << others } else { 1 };
    let total = quads.len() as u64 * masks;
    let truncated = total > budget.max_checks;
    let limit = total.min(budget.max_checks);

    // index order: all quads with mask 0, then mask 1, …
    let found = (0..limit).into_par_iter().find_map_first(|n| {
        let (mask, q) = (n / quads.len() as u64, (n % quads.len() as u64) as usize);
        let fixes = fixing(ineq, &quads[q], mask);
        check_residual(ineq, &fixes, &key).map(|residual| (quads[q], fixes, residual))
    });
    match found {
        Some((kept, fixes, residual)) => {
            let certificate = equivalent(&residual.to_cut(), &target, GroupMode::Party)
                .ok_or_else(|| Error::InvalidParameters("canonical keys agree but no certificate".into()))?;
            Ok(Inclusion::Found(Box::new(InclusionCertificate { kept, fixes, residual, certificate })))
        }
        None if truncated || !exhaustive => Ok(Inclusion::Unknown),
        None => Ok(Inclusion::NotFound),
    }
}

fn fixing(ineq: &CgIneq, kept: &[NodeId; 4], mask: u64) -> Vec<(NodeId, u8)> {
    let all = (1..=ineq.m_a()).map(NodeId::a).chain((1..=ineq.m_b()).map(NodeId::b));
    all.filter(|v| !kept.contains(v))
        .enumerate()
        .map(|(k, v)| (v, (mask >> k & 1) as u8))
        .collect()
}

fn check_residual(ineq: &CgIneq, fixes: &[(NodeId, u8)], key: &CanonicalKey) -> Option<CgIneq> {
    let residual = fix_observables(ineq, fixes).ok()?;
    let r = residual.support_reduce();
    if r.ineq.scenario() != (2, 2) {
        return None;
    }
    let k = canonical_form(&residual.to_cut(), GroupMode::Party).ok()?;
    (&k == key).then_some(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::convert_cut_to_cg;

    #[test]
    fn hypermetric_examples() {
        let t = hypermetric(&WeightVector::new(vec![1], vec![-1])).unwrap();
        let expected = CutIneq::from_terms(t.graph().clone(), &[("XA1", 1), ("XB1", -1), ("A1B1", -1)], 0).unwrap();
        assert_eq!(t, expected);
        let p = hypermetric(&WeightVector::new(vec![1, 1], vec![-1, -1])).unwrap();
        assert_eq!(Inequality::from(p), catalog("pentagonal").unwrap());
    }

    #[test]
    fn pure_222_is_the_eliminated_pentagon() {
        let p = pure_hypermetric_bell(2, 2, 2).unwrap();
        let expected = CgIneq::from_ints(&[0, -1, 0], &[-1, -2, 0], &[[1, 1, -1], [1, 1, 1], [-1, 1, 0]], 0).unwrap();
        assert_eq!(p, expected);
        let te = crate::triangular_eliminate(&hypermetric(&WeightVector::new(vec![1, 1], vec![-1, -1])).unwrap()).unwrap();
        assert_eq!(convert_cut_to_cg(&te).unwrap().normalized(), expected);
    }

    #[test]
    fn cliqueweb_220_matches_pure() {
        let c = cliqueweb_bell(CliqueWebParams { s: 2, t: 2, r: 0 }).unwrap();
        assert_eq!(c, pure_hypermetric_bell(2, 2, 2).unwrap());
        assert!(CliqueWebParams::new(3, 2, 1).is_err());
    }

    #[test]
    fn conditions() {
        let pure = WeightVector::new(vec![1, 1], vec![-1, -1]);
        assert_eq!(hypermetric_tightness_condition(&pure), TightnessCondition::Pure(2));
        let tail = WeightVector::new(vec![1, 1, 1], vec![-1, -1, -1]);
        assert_eq!(tail.entries(), vec![1, 1, 1, 1, -1, -1, -1]);
        assert_eq!(hypermetric_tightness_condition(&tail), TightnessCondition::NegativeTail);
        let none = WeightVector::new(vec![2], vec![-1]);
        assert_eq!(hypermetric_tightness_condition(&none), TightnessCondition::None);
    }

    #[test]
    fn immm22_small() {
        assert_eq!(Inequality::from(immm22(2).unwrap()), catalog("chsh").unwrap());
        assert_eq!(Inequality::from(immm22(3).unwrap()), catalog("i3322").unwrap());
        assert!(immm22(1).is_err());
    }

    #[test]
    fn fixing_i3322_gives_chsh() {
        let Inequality::Cg(i) = catalog("i3322").unwrap() else { panic!() };
        let r = fix_observables(&i, &[(NodeId::a(3), 0), (NodeId::b(1), 0)]).unwrap();
        let expected = CgIneq::from_ints(&[-1, 0], &[-1, 0], &[[1, 1], [1, -1]], 0).unwrap();
        assert_eq!(r, expected);
        let all: Vec<(NodeId, u8)> = (1..=3).map(|k| (NodeId::a(k), 0)).chain((1..=3).map(|k| (NodeId::b(k), 0))).collect();
        assert!(fix_observables(&i, &all).unwrap().is_zero());
        assert!(fix_observable(&i, NodeId::a(4), 0).is_err());
    }

    #[test]
    fn fixing_to_one_moves_terms() {
        let c = CgIneq::from_ints(&[1, 2], &[3], &[[4], [5]], 7).unwrap();
        let r = fix_observable(&c, NodeId::a(1), 1).unwrap();
        assert_eq!(r, CgIneq::from_ints(&[2], &[7], &[[5]], 6).unwrap());
        let both = fix_observables(&c, &[(NodeId::a(1), 1), (NodeId::b(1), 1)]).unwrap();
        // 7 - 1 - 3 - 4
        assert_eq!(both, CgIneq::from_ints(&[7], &[], &[[0i64; 0]], -1).unwrap());
    }

    #[test]
    fn chsh_includes_itself() {
        let r = includes_chsh(&chsh(), &InclusionBudget::default()).unwrap();
        assert!(matches!(r, Inclusion::Found(_)));
    }
}
