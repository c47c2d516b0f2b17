//! Exact linear algebra: Gaussian elimination over the scalar field (generic
//! ranks, nullspaces, inverses) and a lightweight rational matrix for jet
//! computations that have already been evaluated at a point.

use crate::poly::Coeff;
use crate::scalar::{Scalar, ScalarError, VariableContext};
use num::Zero;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ScalarMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> ScalarMatrix {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c));
        ScalarMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zero(ctx: &Arc<VariableContext>, rows: usize, cols: usize) -> ScalarMatrix {
        ScalarMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(ctx); rows * cols],
        }
    }

    pub fn identity(ctx: &Arc<VariableContext>, n: usize) -> ScalarMatrix {
        let mut m = ScalarMatrix::zero(ctx, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one(ctx);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(&self) -> Result<(ScalarMatrix, Vec<usize>), ScalarError> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Prefer the structurally smallest nonzero pivot to limit swell.
            let mut best: Option<(usize, usize)> = None;
            for r in row..m.rows {
                let e = m.at(r, col);
                if !e.is_zero() {
                    let size = e.base_part().num().num_terms()
                        + e.base_part().den().num_terms()
                        + e.radical_part().map_or(0, |r| r.num().num_terms());
                    if best.map_or(true, |(_, s)| size < s) {
                        best = Some((r, size));
                    }
                }
            }
            let Some((prow, _)) = best else { continue };
            m.swap_rows(row, prow);
            let pivot = m.at(row, col).clone();
            let pinv = pivot.inv()?;
            for j in col..m.cols {
                *m.at_mut(row, j) = m.at(row, j).mul(&pinv);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for j in col..m.cols {
                    let v = m.at(r, j).sub(&factor.mul(m.at(row, j)));
                    *m.at_mut(r, j) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((m, pivots))
    }

    /// Generic rank over the scalar field.
    pub fn rank(&self) -> Result<usize, ScalarError> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Result<Vec<Vec<Scalar>>, ScalarError> {
        let ctx = if self.data.is_empty() {
            return Ok(Vec::new());
        } else {
            self.data[0].ctx().clone()
        };
        let (m, pivots) = self.rref()?;
        let mut basis = Vec::new();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        for &f in &free {
            let mut v = vec![Scalar::zero(&ctx); self.cols];
            v[f] = Scalar::one(&ctx);
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = m.at(prow, f).neg();
            }
            basis.push(v);
        }
        Ok(basis)
    }

    pub fn inverse(&self) -> Result<ScalarMatrix, ScalarError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let ctx = self.data[0].ctx().clone();
        let mut aug = ScalarMatrix::zero(&ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Scalar::one(&ctx);
        }
        let (r, pivots) = aug.rref()?;
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(ScalarError::DivisionByZero);
        }
        let mut out = ScalarMatrix::zero(&ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = r.at(i, n + j).clone();
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<Scalar, ScalarError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let ctx = self.data[0].ctx().clone();
        let mut m = self.clone();
        let mut det = Scalar::one(&ctx);
        for col in 0..n {
            let mut prow = None;
            for r in col..n {
                if !m.at(r, col).is_zero() {
                    prow = Some(r);
                    break;
                }
            }
            let Some(prow) = prow else {
                return Ok(Scalar::zero(&ctx));
            };
            if prow != col {
                m.swap_rows(col, prow);
                det = det.neg();
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let pinv = pivot.inv()?;
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&pinv);
                for j in col..n {
                    let v = m.at(r, j).sub(&factor.mul(m.at(col, j)));
                    *m.at_mut(r, j) = v;
                }
            }
        }
        Ok(det)
    }

    /// Solve `self * x = rhs` for a single right-hand column (square,
    /// invertible systems).
    pub fn solve(&self, rhs: &[Scalar]) -> Result<Vec<Scalar>, ScalarError> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(rhs.len(), self.rows);
        let n = self.rows;
        let ctx = self.data[0].ctx().clone();
        let mut aug = ScalarMatrix::zero(&ctx, n, n + 1);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n) = rhs[i].clone();
        }
        let (r, pivots) = aug.rref()?;
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok((0..n).map(|i| r.at(i, n).clone()).collect())
    }
}

/// Dense rational matrix; only rank is needed.
#[derive(Clone, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Coeff>,
}

impl QMatrix {
    pub fn from_rows(rows: Vec<Vec<Coeff>>) -> QMatrix {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c));
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    fn at(&self, i: usize, j: usize) -> &Coeff {
        &self.data[i * self.cols + j]
    }

    /// Basis of the right nullspace over the rationals.
    pub fn nullspace(&self) -> Vec<Vec<Coeff>> {
        let (rows, cols) = (self.rows, self.cols);
        let mut m = self.data.clone();
        let at = |m: &Vec<Coeff>, i: usize, j: usize| m[i * cols + j].clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let mut prow = None;
            for r in rank..rows {
                if !at(&m, r, col).is_zero() {
                    prow = Some(r);
                    break;
                }
            }
            let Some(prow) = prow else { continue };
            for j in 0..cols {
                m.swap(rank * cols + j, prow * cols + j);
            }
            let pivot = at(&m, rank, col);
            for j in col..cols {
                let v = at(&m, rank, j) / pivot.clone();
                m[rank * cols + j] = v;
            }
            for r in 0..rows {
                if r == rank || at(&m, r, col).is_zero() {
                    continue;
                }
                let factor = at(&m, r, col);
                for j in col..cols {
                    let v = at(&m, r, j) - factor.clone() * at(&m, rank, j);
                    m[r * cols + j] = v;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let mut basis = Vec::new();
        for f in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Coeff::zero(); cols];
            v[f] = Coeff::from(num::BigInt::from(1));
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -at(&m, prow, f);
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<Coeff>, i: usize, j: usize| m[i * cols + j].clone();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let mut prow = None;
            for r in rank..rows {
                if !at(&m, r, col).is_zero() {
                    prow = Some(r);
                    break;
                }
            }
            let Some(prow) = prow else { continue };
            for j in 0..cols {
                m.swap(rank * cols + j, prow * cols + j);
            }
            let pivot = at(&m, rank, col);
            for r in 0..rows {
                if r == rank || at(&m, r, col).is_zero() {
                    continue;
                }
                let factor = at(&m, r, col) / pivot.clone();
                for j in col..cols {
                    let v = at(&m, r, j) - factor.clone() * at(&m, rank, j);
                    m[r * cols + j] = v;
                }
            }
            rank += 1;
        }
        let _ = self.at(0, 0);
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, VariableContext, VAR_P, VAR_X};

    #[test]
    fn rank_and_nullspace() {
        let ctx = VariableContext::base();
        let x = Scalar::var(&ctx, VAR_X);
        let p = Scalar::var(&ctx, VAR_P);
        let one = Scalar::one(&ctx);
        let zero = Scalar::zero(&ctx);
        // rows: (1, x, 0), (p, p*x, 0) -> rank 1
        let m = ScalarMatrix::from_rows(vec![
            vec![one.clone(), x.clone(), zero.clone()],
            vec![p.clone(), p.mul(&x), zero.clone()],
        ]);
        assert_eq!(m.rank().unwrap(), 1);
        let ns = m.nullspace().unwrap();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for i in 0..2 {
                let mut acc = Scalar::zero(&ctx);
                for j in 0..3 {
                    acc = acc.add(&m.at(i, j).mul(&v[j]));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = VariableContext::base();
        let x = Scalar::var(&ctx, VAR_X);
        let one = Scalar::one(&ctx);
        let zero = Scalar::zero(&ctx);
        let m = ScalarMatrix::from_rows(vec![
            vec![one.clone(), x.clone()],
            vec![zero.clone(), one.clone()],
        ]);
        let inv = m.inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Scalar::zero(&ctx);
                for k in 0..2 {
                    acc = acc.add(&m.at(i, k).mul(inv.at(k, j)));
                }
                let expect = if i == j {
                    Scalar::one(&ctx)
                } else {
                    Scalar::zero(&ctx)
                };
                assert_eq!(acc, expect);
            }
        }
        assert_eq!(m.det().unwrap(), one);
    }

    #[test]
    fn rational_rank() {
        let m = QMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ]);
        assert_eq!(m.rank(), 2);
    }
}
