//! Exact facet enumeration by the double description method.
//!
//! Facets `a · x <= a0` of the convex hull of points `v` are the extreme rays
//! `(a0, -a)` of the cone `{y : y · (1, v) >= 0 for all v}`. The cone is
//! built from a simplex of affinely independent points, then the remaining
//! points are inserted one at a time, combining adjacent rays on opposite
//! sides. Adjacency is decided combinatorially from zero sets.

use fixedbitset::FixedBitSet;
use num_traits::{One, ToPrimitive};

use crate::analysis::tightness_report;
use crate::error::{Error, Result};
use crate::graph::{EdgeVector, Graph};
use crate::ineq::CutIneq;
use crate::linalg::{inverse, rank, EchelonBasis, IntEchelon};
use crate::scalar::{make_primitive, primitive, ExactInt, Fp};
use crate::symmetry::{classify, ClassReport, GroupMode};
use crate::{Int, Rat};

/// `coeffs · x <= rhs` with primitive integer entries.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSpace {
    pub coeffs: Vec<Int>,
    pub rhs: Int,
}

/// Irredundant facet description of a full-dimensional polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub dimension: usize,
    pub vertex_count: usize,
    /// Sorted by `(coeffs, rhs)`.
    pub inequalities: Vec<HalfSpace>,
}

/// Facets of the cut polytope of `K_n` with their classes under the full group.
#[derive(Clone, Debug)]
pub struct CutPolytopeFacets {
    pub n: usize,
    pub hrep: HRep,
    /// Facets on the complete graph with `n - 1` observables.
    pub facets: Vec<CutIneq>,
    pub classes: Vec<ClassReport>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct HullOptions {
    /// Re-certify every facet against the point set.
    pub skip_verification: bool,
}

pub fn enumerate_facets(points: &[EdgeVector]) -> Result<HRep> {
    enumerate_facets_with(points, &HullOptions::default())
}

pub fn enumerate_facets_with(points: &[EdgeVector], opts: &HullOptions) -> Result<HRep> {
    let d = points.first().map_or(0, EdgeVector::len);
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: points.iter().map(EdgeVector::len).find(|&l| l != d).unwrap_or(0) });
    }
    let homog: Vec<Vec<Int>> = points
        .iter()
        .map(|p| {
            let mut row = vec![Rat::one()];
            row.extend(p.0.iter().cloned());
            primitive(&row).0
        })
        .collect();
    let affine = rank(homog.iter().map(|r| r.iter().map(|v| Rat::from_integer(v.clone())).collect()), d + 1);
    if affine < d + 1 {
        return Err(Error::Degenerate { affine_dim: affine.saturating_sub(1), ambient: d });
    }
    let rays = match double_description::<i64>(&homog) {
        Ok(r) => r,
        Err(Error::Overflow) => double_description::<Int>(&homog)?,
        Err(e) => return Err(e),
    };
    let mut inequalities: Vec<HalfSpace> = rays
        .into_iter()
        .map(|y| HalfSpace { coeffs: y[1..].iter().map(|v| -v).collect(), rhs: y[0].clone() })
        .collect();
    inequalities.sort();
    inequalities.dedup();
    if !opts.skip_verification {
        for h in &inequalities {
            verify_facet(h, &homog, d)?;
        }
    }
    Ok(HRep { dimension: d, vertex_count: points.len(), inequalities })
}

/// Checks validity on every point and affine rank `d` of the tight points.
fn verify_facet(h: &HalfSpace, homog: &[Vec<Int>], d: usize) -> Result<()> {
    let mut tight = Vec::new();
    for p in homog {
        let lhs: Int = h.coeffs.iter().zip(&p[1..]).map(|(a, x)| a * x).sum();
        let rhs = &h.rhs * &p[0];
        if lhs > rhs {
            return Err(Error::InvalidParameters("hull produced an invalid inequality".into()));
        }
        if lhs == rhs {
            tight.push(p);
        }
    }
    let mut basis = EchelonBasis::<Fp>::new(d + 1);
    for p in &tight {
        let row = p.iter().map(|v| Fp::new((v % Int::from(Fp::MODULUS)).to_i64().expect("reduced"))).collect();
        basis.insert(row);
    }
    let r = if basis.rank() == d {
        d
    } else {
        let mut exact = IntEchelon::<Int>::new(d + 1);
        for p in &tight {
            exact.insert(p.to_vec())?;
        }
        exact.rank()
    };
    if r != d {
        return Err(Error::InvalidParameters("hull produced a non-facet".into()));
    }
    Ok(())
}

struct Ray<I> {
    y: Vec<I>,
    zeros: FixedBitSet,
}

fn dot<I: ExactInt>(a: &[I], b: &[I]) -> Result<I> {
    let mut s = I::zero();
    for (x, y) in a.iter().zip(b) {
        s = s.checked_add(&x.checked_mul(y).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
    }
    Ok(s)
}

fn double_description<I: ExactInt>(homog: &[Vec<Int>]) -> Result<Vec<Vec<Int>>> {
    let m = homog.len();
    let width = homog[0].len();
    let conv = |v: &Int| -> Result<I> { Ok(I::from_i64(v.to_i64().ok_or(Error::Overflow)?)) };
    let pts: Vec<Vec<I>> = homog
        .iter()
        .map(|r| r.iter().map(conv).collect::<Result<Vec<I>>>())
        .collect::<Result<_>>()?;

    // initial simplex: the first affinely independent points in input order
    let mut basis = EchelonBasis::<Rat>::new(width);
    let mut simplex = Vec::new();
    for (i, p) in homog.iter().enumerate() {
        if basis.insert(p.iter().map(|v| Rat::from_integer(v.clone())).collect()) {
            simplex.push(i);
            if simplex.len() == width {
                break;
            }
        }
    }
    let mat: Vec<Vec<Rat>> = simplex
        .iter()
        .map(|&i| homog[i].iter().map(|v| Rat::from_integer(v.clone())).collect())
        .collect();
    let inv = inverse(&mat).expect("independent rows");
    let mut rays: Vec<Ray<I>> = Vec::with_capacity(width);
    for c in 0..width {
        let col: Vec<Rat> = (0..width).map(|r| inv[r][c].clone()).collect();
        let (ints, _) = primitive(&col);
        let y = ints.iter().map(conv).collect::<Result<Vec<I>>>()?;
        let mut zeros = FixedBitSet::with_capacity(m);
        for (k, &i) in simplex.iter().enumerate() {
            if k != c {
                zeros.insert(i);
            }
        }
        rays.push(Ray { y, zeros });
    }
    let d = width - 1;
    for i in (0..m).filter(|i| !simplex.contains(i)) {
        let p = &pts[i];
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: Vec<Ray<I>> = Vec::with_capacity(rays.len());
        let mut values = Vec::with_capacity(rays.len());
        for r in &rays {
            values.push(dot(&r.y, p)?);
        }
        for (k, v) in values.iter().enumerate() {
            if v.is_positive() {
                pos.push(k);
            } else if v.is_negative() {
                neg.push(k);
            }
        }
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        for &a in &pos {
            for &b in &neg {
                let mut z = rays[a].zeros.clone();
                z.intersect_with(&rays[b].zeros);
                if z.count_ones(..) < d - 1 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == a || k == b || !z.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let (va, vb) = (&values[a], &values[b]);
                let mut y = Vec::with_capacity(width);
                for (ya, yb) in rays[a].y.iter().zip(&rays[b].y) {
                    let s = va.checked_mul(yb).ok_or(Error::Overflow)?;
                    let t = vb.checked_mul(ya).ok_or(Error::Overflow)?;
                    y.push(s.checked_sub(&t).ok_or(Error::Overflow)?);
                }
                make_primitive(&mut y);
                z.insert(i);
                next.push(Ray { y, zeros: z });
            }
        }
        for (k, r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            let mut r = r;
            if values[k].is_zero() {
                r.zeros.insert(i);
            }
            next.push(r);
        }
        rays = next;
    }
    Ok(rays
        .into_iter()
        .map(|r| r.y.iter().map(ExactInt::to_big).collect())
        .collect())
}

/// Largest `n` handled without the long-running flag.
pub const MAX_DEFAULT_N: usize = 6;

/// Facets of `CUT(K_n)` from its `2^(n-1)` cut vectors, classified in full mode.
///
/// `n = 7` takes hours and requires `long_running`.
pub fn cut_polytope_facets(n: usize, long_running: bool) -> Result<CutPolytopeFacets> {
    if !(2..=7).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    if n > MAX_DEFAULT_N && !long_running {
        return Err(Error::LongRunning);
    }
    let g = Graph::k(n)?;
    let points: Vec<EdgeVector> = g.cuts()?.map(|c| g.cut_vector(c)).collect::<Result<_>>()?;
    let hrep = enumerate_facets_with(&points, &HullOptions { skip_verification: false })?;
    let facets: Vec<CutIneq> = hrep
        .inequalities
        .iter()
        .map(|h| {
            CutIneq::new(
                g.clone(),
                h.coeffs.iter().cloned().map(Rat::from_integer).collect(),
                Rat::from_integer(h.rhs.clone()),
            )
        })
        .collect::<Result<_>>()?;
    // second, independent certificate through the cut enumeration engine
    for f in &facets {
        let r = tightness_report(f)?;
        if !r.is_facet {
            return Err(Error::InvalidParameters(format!("hull output {f} failed re-certification")));
        }
    }
    let classes = classify(&facets, GroupMode::Full)?;
    Ok(CutPolytopeFacets { n, hrep, facets, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn pts(v: &[&[i64]]) -> Vec<EdgeVector> {
        v.iter().map(|p| EdgeVector(p.iter().map(|&x| rat(x)).collect())).collect()
    }

    #[test]
    fn unit_square() {
        let h = enumerate_facets(&pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
        assert_eq!(h.inequalities.len(), 4);
        assert_eq!(h.dimension, 2);
    }

    #[test]
    fn degenerate_input() {
        let e = enumerate_facets(&pts(&[&[0, 0, 0], &[1, 1, 0], &[2, 2, 0]])).unwrap_err();
        assert_eq!(e, Error::Degenerate { affine_dim: 1, ambient: 3 });
    }

    #[test]
    fn cube_with_interior_point() {
        let mut v: Vec<Vec<i64>> = (0..8).map(|m| vec![m & 1, m >> 1 & 1, m >> 2 & 1]).collect();
        v.insert(3, vec![0, 0, 0]);
        let refs: Vec<&[i64]> = v.iter().map(Vec::as_slice).collect();
        let h = enumerate_facets(&pts(&refs)).unwrap();
        assert_eq!(h.inequalities.len(), 6);
    }

    #[test]
    fn small_cut_polytopes() {
        let k3 = cut_polytope_facets(3, false).unwrap();
        assert_eq!(k3.facets.len(), 4);
        assert_eq!(k3.classes.len(), 1);
        let k4 = cut_polytope_facets(4, false).unwrap();
        assert_eq!(k4.facets.len(), 16);
        assert_eq!(k4.classes.len(), 1);
        assert_eq!(cut_polytope_facets(7, false).unwrap_err(), Error::LongRunning);
        assert_eq!(cut_polytope_facets(8, true).unwrap_err(), Error::UnsupportedSize(8));
    }
}
