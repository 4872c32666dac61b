//! Exact rank and inversion kernels, generic over the scalar type.

use crate::error::{Error, Result};
use crate::scalar::{make_primitive, ExactField, ExactInt};

/// Row-echelon basis built one row at a time over an exact field.
///
/// Each stored row is zero at the pivot columns of the rows stored before
/// it, so a new row is reduced by a single pass in insertion order.
#[derive(Clone, Debug)]
pub struct EchelonBasis<F> {
    width: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: ExactField> EchelonBasis<F> {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Inserts `row`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, mut row: Vec<F>) -> bool {
        debug_assert_eq!(row.len(), self.width);
        for (pivot, basis) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for (dst, src) in row.iter_mut().zip(basis.iter()) {
                if !src.is_zero() {
                    *dst = dst.clone() - factor.clone() * src.clone();
                }
            }
        }
        match row.iter().position(|v| !v.is_zero()) {
            Some(pivot) => {
                let inv = F::one() / row[pivot].clone();
                for v in row.iter_mut() {
                    *v = v.clone() * inv.clone();
                }
                self.rows.push((pivot, row));
                true
            }
            None => false,
        }
    }
}

/// Rank of a row collection over an exact field.
pub fn rank<F: ExactField>(rows: impl IntoIterator<Item = Vec<F>>, width: usize) -> usize {
    let mut basis = EchelonBasis::new(width);
    for row in rows {
        basis.insert(row);
        if basis.rank() == width {
            break;
        }
    }
    basis.rank()
}

/// Fraction-free incremental echelon basis over an integer ring.
///
/// Rows are combined as `piv * row - row[p] * basis` and divided by their
/// content, so no rational numbers appear. Fixed-width rings report
/// [`Error::Overflow`] rather than wrapping.
#[derive(Clone, Debug)]
pub struct IntEchelon<I> {
    width: usize,
    rows: Vec<(usize, Vec<I>)>,
}

impl<I: ExactInt> IntEchelon<I> {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut row: Vec<I>) -> Result<bool> {
        debug_assert_eq!(row.len(), self.width);
        for (pivot, basis) in &self.rows {
            let head = row[*pivot].clone();
            if head.is_zero() {
                continue;
            }
            let piv = basis[*pivot].clone();
            for (dst, src) in row.iter_mut().zip(basis.iter()) {
                let a = dst.checked_mul(&piv).ok_or(Error::Overflow)?;
                let b = src.checked_mul(&head).ok_or(Error::Overflow)?;
                *dst = a.checked_sub(&b).ok_or(Error::Overflow)?;
            }
            make_primitive(&mut row);
        }
        match row.iter().position(|v| !v.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, row));
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// Rank of an integer matrix by Bareiss fraction-free elimination.
pub fn bareiss_rank<I: ExactInt>(mut m: Vec<Vec<I>>) -> Result<usize> {
    let rows = m.len();
    if rows == 0 {
        return Ok(0);
    }
    let cols = m[0].len();
    let mut prev = I::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            let head = m[i][c].clone();
            for j in c + 1..cols {
                let a = m[i][j].checked_mul(&pivot).ok_or(Error::Overflow)?;
                let b = m[r][j].checked_mul(&head).ok_or(Error::Overflow)?;
                let num = a.checked_sub(&b).ok_or(Error::Overflow)?;
                debug_assert!(num.is_multiple_of(&prev));
                m[i][j] = num.div_floor(&prev);
            }
            m[i][c] = I::zero();
        }
        prev = pivot;
        r += 1;
    }
    Ok(r)
}

/// Inverse of a square matrix by Gauss-Jordan elimination, `None` if singular.
pub fn inverse<F: ExactField>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = F::one() / a[c][c].clone();
        for v in a[c].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[c].clone();
                for (dst, src) in a[i].iter_mut().zip(pivot_row) {
                    *dst = dst.clone() - f.clone() * src;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}
