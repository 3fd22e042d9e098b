//! Small dense exact linear algebra over the rationals.
//!
//! Everything here is plain Gaussian elimination with exact division; the
//! matrices that arise (pairing matrices, filtered-subcomplex membership
//! systems, divisor-subring closures) have at most a few dozen rows.

use crate::rat::Rat;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Columns stacked left to right.
    pub fn from_cols(cols: Vec<Vec<Rat>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        assert!(cols.iter().all(|x| x.len() == r), "ragged matrix");
        let mut m = Self::zero(r, c);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// Reduced row echelon form, in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let v = &self[(i, j)] - &f * &self[(r, j)];
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// One solution of `A x = b`, if any.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Is `b` in the column span of `A`?
    pub fn col_span_contains(&self, b: &[Rat]) -> bool {
        self.solve(b).is_some()
    }

    /// Basis of the kernel (as column vectors).
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Inverse of a square matrix, if nonsingular.
    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).any(|&c| c >= n) {
            return None;
        }
        let mut inv = Mat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-reduce a list of vectors to an independent spanning set.
pub fn span_basis(vectors: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let mut m = Mat::from_rows(vectors);
    let pivots = m.rref();
    (0..pivots.len())
        .map(|i| (0..m.cols).map(|j| m[(i, j)].clone()).collect())
        .collect()
}

/// Is `v` in the span of `basis` (all as coordinate vectors)?
pub fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    Mat::from_cols(basis.to_vec()).col_span_contains(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_i64;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_i64(x)).collect()).collect())
    }

    #[test]
    fn solve_and_rank() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let x = a.solve(&[rat_i64(5), rat_i64(11)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rat_i64(5), rat_i64(11)]);
        assert_eq!(a.rank(), 2);
        let s = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.rank(), 1);
        assert!(s.solve(&[rat_i64(1), rat_i64(3)]).is_none());
    }

    #[test]
    fn kernel_and_inverse() {
        let s = m(&[&[1, 2], &[2, 4]]);
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(s.mul_vec(&k[0]), vec![rat_i64(0), rat_i64(0)]);
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        let mut prod = Mat::zero(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = rat_i64(0);
                for k in 0..2 {
                    acc += &a[(i, k)] * &inv[(k, j)];
                }
                prod[(i, j)] = acc;
            }
        }
        assert_eq!(prod, Mat::identity(2));
        assert!(s.inverse().is_none());
    }

    #[test]
    fn span_helpers() {
        let basis = span_basis(vec![
            vec![rat_i64(1), rat_i64(1), rat_i64(0)],
            vec![rat_i64(2), rat_i64(2), rat_i64(0)],
            vec![rat_i64(0), rat_i64(0), rat_i64(1)],
        ]);
        assert_eq!(basis.len(), 2);
        assert!(in_span(&basis, &[rat_i64(3), rat_i64(3), rat_i64(7)]));
        assert!(!in_span(&basis, &[rat_i64(1), rat_i64(0), rat_i64(0)]));
    }
}
