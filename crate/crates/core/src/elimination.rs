//! Fourier–Motzkin steps with triangle inequalities and triangular
//! elimination.

use num_traits::{Signed, Zero};

use crate::analysis::to_tripartite;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, NodeId, Party};
use crate::ineq::CutIneq;
use crate::scalar::rat;

/// The four facets of the cut polytope of a triangle `u, v, h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Triangle {
    /// `x_uv - x_uh - x_vh <= 0`
    PositiveUv,
    /// `x_uh - x_uv - x_vh <= 0`
    PositiveUh,
    /// `x_vh - x_uv - x_uh <= 0`
    PositiveVh,
    /// `x_uv + x_uh + x_vh <= 2`
    Perimeter,
}

impl Triangle {
    /// Coefficients on `(uv, uh, vh)` and the rhs.
    fn terms(self) -> ([i64; 3], i64) {
        match self {
            Triangle::PositiveUv => ([1, -1, -1], 0),
            Triangle::PositiveUh => ([-1, 1, -1], 0),
            Triangle::PositiveVh => ([-1, -1, 1], 0),
            Triangle::Perimeter => ([1, 1, 1], 2),
        }
    }
}

/// Adds `|c|` times a triangle inequality on `u, v, helper` so that the
/// coefficient `c` of `uv` cancels.
///
/// A helper one past the last index of its party is created as a fresh node.
/// The result lives on the input graph (extended if needed), with a zero
/// coefficient on `uv`.
pub fn eliminate_with_triangle(
    ineq: &CutIneq,
    edge: (NodeId, NodeId),
    helper: NodeId,
    triangle: Triangle,
) -> Result<CutIneq> {
    let (u, v) = edge;
    let c = ineq.coeff(u, v)?.clone();
    if c.is_zero() {
        return Err(Error::ZeroCoefficient(u, v));
    }
    let (t, t0) = triangle.terms();
    if (t[0] > 0) == c.is_positive() {
        return Err(Error::WrongOrientation);
    }
    let g = ineq.graph();
    let base = if g.position(helper).is_some() {
        ineq.clone()
    } else {
        let (mut na, mut nb) = g.scenario();
        match helper.party {
            Party::A if helper.index == na + 1 => na += 1,
            Party::B if helper.index == nb + 1 => nb += 1,
            _ => return Err(Error::ForeignNode(helper)),
        }
        crate::analysis::relabel_onto(ineq, Graph::new(g.kind(), na, nb)?, Some)?
    };
    let mut out = base;
    let weight = c.abs();
    for ((a, b), k) in [(u, v), (u, helper), (v, helper)].into_iter().zip(t) {
        let e = out.coeff(a, b)?.clone();
        out.set_coeff(a, b, e + &weight * rat(k))?;
    }
    let rhs = out.rhs() + &weight * rat(t0);
    out.set_rhs(rhs);
    Ok(out)
}

/// Triangular elimination with a record of the fresh nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eliminated {
    pub ineq: CutIneq,
    /// Fresh Bob nodes with the Alice pair each one replaces.
    pub fresh_bob: Vec<(NodeId, (NodeId, NodeId))>,
    /// Fresh Alice nodes with the Bob pair each one replaces.
    pub fresh_alice: Vec<(NodeId, (NodeId, NodeId))>,
}

/// Replaces each intra-party term by two joint terms through a fresh node of
/// the other party.
///
/// An Alice term `a x_{A_i A_i'}` becomes `a x_{A_i B'} - |a| x_{A_i' B'}`
/// for a fresh `B'`, and symmetrically for Bob. Only nonzero terms create
/// fresh nodes, numbered in lexicographic order of their pairs.
pub fn triangular_eliminate(ineq: &CutIneq) -> Result<CutIneq> {
    Ok(triangular_eliminate_detailed(ineq)?.ineq)
}

pub fn triangular_eliminate_detailed(ineq: &CutIneq) -> Result<Eliminated> {
    let g = ineq.graph();
    if g.kind() == GraphKind::Tripartite {
        return Ok(Eliminated { ineq: ineq.clone(), fresh_bob: Vec::new(), fresh_alice: Vec::new() });
    }
    let (na, nb) = g.scenario();
    let nonzero = |u: NodeId, v: NodeId| ineq.coeff(u, v).ok().filter(|c| !c.is_zero()).cloned();
    let mut a_pairs = Vec::new();
    for i in 1..=na {
        for k in i + 1..=na {
            if let Some(c) = nonzero(NodeId::a(i), NodeId::a(k)) {
                a_pairs.push((NodeId::a(i), NodeId::a(k), c));
            }
        }
    }
    let mut b_pairs = Vec::new();
    for j in 1..=nb {
        for k in j + 1..=nb {
            if let Some(c) = nonzero(NodeId::b(j), NodeId::b(k)) {
                b_pairs.push((NodeId::b(j), NodeId::b(k), c));
            }
        }
    }

    let target = Graph::new(GraphKind::Tripartite, na + b_pairs.len(), nb + a_pairs.len())?;
    let mut out = CutIneq::zero(target);
    for (e, c) in ineq.coeffs().iter().enumerate() {
        let (u, v) = g.edge_nodes(e);
        if u.party != v.party || u.party == Party::X || v.party == Party::X {
            if !c.is_zero() {
                out.set_coeff(u, v, c.clone())?;
            }
        }
    }
    let mut fresh_bob = Vec::new();
    for (k, (u, v, c)) in a_pairs.into_iter().enumerate() {
        let fresh = NodeId::b(nb + k + 1);
        out.set_coeff(u, fresh, c.clone())?;
        out.set_coeff(v, fresh, -c.abs())?;
        fresh_bob.push((fresh, (u, v)));
    }
    let mut fresh_alice = Vec::new();
    for (k, (u, v, c)) in b_pairs.into_iter().enumerate() {
        let fresh = NodeId::a(na + k + 1);
        out.set_coeff(fresh, u, c.clone())?;
        out.set_coeff(fresh, v, -c.abs())?;
        fresh_alice.push((fresh, (u, v)));
    }
    out.set_rhs(ineq.rhs().clone());
    Ok(Eliminated { ineq: out, fresh_bob, fresh_alice })
}

/// Triangular elimination replayed as explicit triangle sums, one fresh
/// helper per intra-party term. Agrees with [`triangular_eliminate`].
pub fn eliminate_by_triangle_sums(ineq: &CutIneq) -> Result<CutIneq> {
    if ineq.graph().kind() == GraphKind::Tripartite {
        return Ok(ineq.clone());
    }
    let mut cur = ineq.clone();
    let (mut na, mut nb) = ineq.graph().scenario();
    let mut pairs = Vec::new();
    for (e, c) in ineq.coeffs().iter().enumerate() {
        let (u, v) = ineq.graph().edge_nodes(e);
        if u.party == v.party && u.party != Party::X && !c.is_zero() {
            pairs.push((u, v, c.is_positive()));
        }
    }
    // Alice pairs first, matching the fresh node numbering
    pairs.sort_by_key(|(u, v, _)| (u.party, u.index, v.index));
    for (u, v, positive) in pairs {
        let helper = if u.party == Party::A {
            nb += 1;
            NodeId::b(nb)
        } else {
            na += 1;
            NodeId::a(na)
        };
        let tri = if positive { Triangle::PositiveUh } else { Triangle::PositiveUv };
        cur = eliminate_with_triangle(&cur, (u, v), helper, tri)?;
    }
    to_tripartite(&cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pentagonal() -> CutIneq {
        let g = Graph::complete(2, 2).unwrap();
        CutIneq::from_terms(
            g,
            &[
                ("XA1", 1), ("XA2", 1), ("XB1", -1), ("XB2", -1), ("A1A2", 1),
                ("A1B1", -1), ("A1B2", -1), ("A2B1", -1), ("A2B2", -1), ("B1B2", 1),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn pentagonal_with_existing_helpers() {
        let p = pentagonal();
        let s1 = eliminate_with_triangle(&p, (NodeId::a(1), NodeId::a(2)), NodeId::b(2), Triangle::PositiveUh).unwrap();
        let s2 = eliminate_with_triangle(&s1, (NodeId::b(1), NodeId::b(2)), NodeId::a(2), Triangle::PositiveUh).unwrap();
        let expected = CutIneq::from_terms(
            p.graph().clone(),
            &[("XA1", 1), ("XA2", 1), ("XB1", -1), ("XB2", -1), ("A1B1", -1), ("A2B2", -3)],
            0,
        )
        .unwrap();
        assert_eq!(s2, expected);
    }

    #[test]
    fn triangle_plus_triangle_is_chsh() {
        let g = Graph::complete(2, 1).unwrap();
        let t = CutIneq::from_terms(g, &[("A1A2", 1), ("A1B1", -1), ("A2B1", -1)], 0).unwrap();
        let s = eliminate_with_triangle(&t, (NodeId::a(1), NodeId::a(2)), NodeId::b(2), Triangle::PositiveUh).unwrap();
        let out = to_tripartite(&s).unwrap();
        let expected = CutIneq::from_terms(
            Graph::tripartite(2, 2).unwrap(),
            &[("A1B1", -1), ("A2B1", -1), ("A1B2", 1), ("A2B2", -1)],
            0,
        )
        .unwrap();
        assert_eq!(out, expected);
        assert_eq!(triangular_eliminate(&t).unwrap(), expected);
    }

    #[test]
    fn bad_steps_are_rejected() {
        let p = pentagonal();
        let tri = eliminate_with_triangle(&p, (NodeId::X, NodeId::a(1)), NodeId::b(1), Triangle::PositiveUv);
        assert_eq!(tri.unwrap_err(), Error::WrongOrientation);
        let z = CutIneq::zero(p.graph().clone());
        let e = eliminate_with_triangle(&z, (NodeId::a(1), NodeId::a(2)), NodeId::b(1), Triangle::PositiveUh);
        assert_eq!(e.unwrap_err(), Error::ZeroCoefficient(NodeId::a(1), NodeId::a(2)));
        let far = eliminate_with_triangle(&p, (NodeId::a(1), NodeId::a(2)), NodeId::b(5), Triangle::PositiveUh);
        assert_eq!(far.unwrap_err(), Error::ForeignNode(NodeId::b(5)));
    }

    #[test]
    fn nothing_to_eliminate() {
        let g = Graph::complete(1, 2).unwrap();
        let f = CutIneq::from_terms(g, &[("XA1", 1), ("A1B2", -1)], 0).unwrap();
        let out = triangular_eliminate(&f).unwrap();
        assert_eq!(out, to_tripartite(&f).unwrap());
        let t = triangular_eliminate(&out).unwrap();
        assert_eq!(t, out);
    }

    #[test]
    fn fresh_nodes_follow_pair_order() {
        let d = triangular_eliminate_detailed(&pentagonal()).unwrap();
        assert_eq!(d.ineq.graph().scenario(), (3, 3));
        assert_eq!(d.fresh_bob, vec![(NodeId::b(3), (NodeId::a(1), NodeId::a(2)))]);
        assert_eq!(d.fresh_alice, vec![(NodeId::a(3), (NodeId::b(1), NodeId::b(2)))]);
    }
}
