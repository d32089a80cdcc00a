//! Small dense complex linear algebra: LU with partial pivoting, inverse,
//! 1-norm condition estimate, and numerical rank by pivoted QR.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul_real_vec(&self, x: &[f64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise distance to the identity.
    pub fn identity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn inverse(&self) -> Result<Matrix> {
        Lu::factor(self)?.inverse()
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U` with unit lower `L`, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot, mag) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if mag == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot * n + j);
                }
                perm.swap(col, pivot);
            }
            let diag = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / diag;
                lu[(r, col)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col + 1..n {
                    let upper = lu[(col, j)];
                    lu[(r, j)] -= factor * upper;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.lu.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            if col.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Singular);
            }
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Numerical rank of a `rows x cols` matrix given column by column.
///
/// Householder QR with column pivoting; a column is counted while its
/// remaining norm exceeds `rel_tol` times the largest initial column norm.
pub fn numerical_rank(columns: &[Vec<Complex64>], rel_tol: f64) -> usize {
    let mut cols: Vec<Vec<Complex64>> = columns.to_vec();
    let Some(rows) = cols.first().map(Vec::len) else {
        return 0;
    };
    let col_norm = |c: &[Complex64], from: usize| -> f64 {
        libm::sqrt(c[from..].iter().map(|v| v.norm_sqr()).sum())
    };
    let scale = cols.iter().map(|c| col_norm(c, 0)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for step in 0..cols.len().min(rows) {
        let (best, norm) = (step..cols.len())
            .map(|j| (j, col_norm(&cols[j], step)))
            .fold((step, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if norm <= rel_tol * scale {
            break;
        }
        cols.swap(step, best);
        // Householder vector v = x + e^{i arg x0} |x| e_0
        let x0 = cols[step][step];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v: Vec<Complex64> = cols[step][step..].to_vec();
        v[0] += phase * norm;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        for col in cols.iter_mut().skip(step) {
            let dot = v
                .iter()
                .zip(&col[step..])
                .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b);
            let f = dot * (2.0 / vnorm2);
            for (c, vi) in col[step..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        rank += 1;
    }
    rank
}
