//! Small dense symmetric matrices and Cholesky factorisation.
//!
//! `p = 3m + 2` stays in the tens for realistic feature counts, so a plain
//! row-major matrix is all the estimators need.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut out = Self::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Why a factorisation failed: pivot `index` was not positive, and the
/// column depends on `partners` (indices into the factored matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct NotPositiveDefinite {
    pub index: usize,
    pub partners: Vec<usize>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self, NotPositiveDefinite> {
        let n = a.rows;
        assert_eq!(n, a.cols, "cholesky of a non-square matrix");
        let scale = a.diagonal().into_iter().fold(T::zero(), T::max);
        let tiny = scale * T::epsilon() * T::from_count(16 * n.max(1));
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > tiny) {
                let partners = Self { l: l.clone() }.dependence(a, j);
                return Err(NotPositiveDefinite { index: j, partners });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    /// Columns `< j` that column `j` is (numerically) a combination of,
    /// using the already-computed leading block of `L`.
    fn dependence(&self, a: &Matrix<T>, j: usize) -> Vec<usize> {
        let rhs: Vec<T> = (0..j).map(|i| a[(i, j)]).collect();
        let coef = self.solve_leading(&rhs);
        let cut = T::lit(1e-6) * coef.iter().fold(T::zero(), |m, &c| m.max(c.abs()));
        coef.iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > cut && c.is_finite())
            .map(|(i, _)| i)
            .collect()
    }

    fn solve_leading(&self, b: &[T]) -> Vec<T> {
        let n = b.len();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - self.l[(i, k)] * y[k];
            }
            y[i] = y[i] / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i] - self.l[(k, i)] * y[k];
            }
            y[i] = y[i] / self.l[(i, i)];
        }
        y
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.l.rows);
        self.solve_leading(b)
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.l.rows;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        // symmetrise away round-off
        for i in 0..n {
            for j in 0..i {
                let v = (inv[(i, j)] + inv[(j, i)]) / T::lit(2.0);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }
        inv
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let a = Matrix::<f64>::from_row_major(3, 3, vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]);
        let c = Cholesky::new(&a).unwrap();
        let x = c.solve(&[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        for (u, v) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((u - v).abs() < 1e-12);
        }
        let inv = c.inverse();
        let e0 = inv.mul_vec(&a.mul_vec(&[1.0, 0.0, 0.0]));
        assert!((e0[0] - 1.0).abs() < 1e-12 && e0[1].abs() < 1e-12);
    }

    #[test]
    fn reports_dependent_columns() {
        // column 2 = column 0 + column 1
        let cols = [[1.0, 0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 1.0]];
        let x: Vec<[f64; 3]> = (0..4).map(|r| [cols[0][r], cols[1][r], cols[0][r] + cols[1][r]]).collect();
        let mut a = Matrix::<f64>::zeros(3, 3);
        for row in &x {
            for i in 0..3 {
                for j in 0..3 {
                    a[(i, j)] += row[i] * row[j];
                }
            }
        }
        let err = Cholesky::new(&a).unwrap_err();
        assert_eq!(err.index, 2);
        assert_eq!(err.partners, vec![0, 1]);
    }
}
