//! Small dense complex linear algebra: a row-major matrix type, LU determinants and
//! numerical null spaces. Eigensolvers live in [`crate::oracle`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Largest dimension accepted by [`DenseMatrix::zeros`] (a 4096² complex matrix is 256 MiB).
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::TooLarge {
                dim: n,
                limit: MAX_DIM,
            });
        }
        Ok(Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn from_array<const N: usize>(a: &[[Complex64; N]; N]) -> Self {
        let mut data = Vec::with_capacity(N * N);
        for row in a {
            data.extend_from_slice(row);
        }
        Self { n: N, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |a_ij − conj(a_ji)|
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `self − shift·I`
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] -= shift;
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {}", self.n, other.n)));
        }
        let n = self.n;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[l * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let t = a[col * n + j];
                    a[r * n + j] -= f * t;
                }
            }
        }
        det
    }

    /// Orthonormal basis of the numerical kernel.
    ///
    /// Gaussian elimination with complete pivoting; a pivot below
    /// `rel_tol · max|a_ij|` ends the elimination and fixes the rank.
    pub fn null_space(&self, rel_tol: f64) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut a = self.data.clone();
        let mut cols: Vec<usize> = (0..n).collect();
        let cutoff = rel_tol * self.max_abs().max(f64::MIN_POSITIVE);
        let mut rank = 0;
        while rank < n {
            let (mut pr, mut pc, mut best) = (rank, rank, -1.0);
            for r in rank..n {
                for c in rank..n {
                    let v = a[r * n + c].norm();
                    if v > best {
                        best = v;
                        pr = r;
                        pc = c;
                    }
                }
            }
            if best <= cutoff {
                break;
            }
            if pr != rank {
                for j in 0..n {
                    a.swap(pr * n + j, rank * n + j);
                }
            }
            if pc != rank {
                for i in 0..n {
                    a.swap(i * n + pc, i * n + rank);
                }
                cols.swap(pc, rank);
            }
            let p = a[rank * n + rank];
            for j in 0..n {
                a[rank * n + j] /= p;
            }
            for r in 0..n {
                if r == rank {
                    continue;
                }
                let f = a[r * n + rank];
                if f == zero {
                    continue;
                }
                for j in 0..n {
                    let t = a[rank * n + j];
                    a[r * n + j] -= f * t;
                }
            }
            rank += 1;
        }
        // Reduced form [I F; 0 0] in permuted columns: kernel vectors are (−F e_j, e_j).
        let mut basis = Vec::with_capacity(n - rank);
        for free in rank..n {
            let mut x = vec![zero; n];
            x[cols[free]] = Complex64::new(1.0, 0.0);
            for r in 0..rank {
                x[cols[r]] = -a[r * n + free];
            }
            basis.push(x);
        }
        gram_schmidt(basis)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// ⟨a|b⟩ with the first argument conjugated.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Plain bilinear product Σ aᵢbᵢ.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram–Schmidt; numerically dependent vectors are dropped.
pub fn gram_schmidt(vectors: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for q in &out {
            let c = inner(q, &v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
        let nv = norm(&v);
        if nv > 1e-14 {
            v.iter_mut().for_each(|z| *z /= nv);
            out.push(v);
        }
    }
    out
}

/// Multiplies `v` by a unit phase so that its largest-modulus component (first one on
/// ties) is real and positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let m = v[best].norm();
    if m > 0.0 {
        let phase = v[best].conj() / m;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}
