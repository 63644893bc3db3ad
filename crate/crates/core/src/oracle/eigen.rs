#![allow(clippy::needless_range_loop)]

//! Dense eigenvalue solvers.
//!
//! General matrices: Householder reduction to upper Hessenberg form followed by
//! single-shift complex QR iteration (Wilkinson shifts, Givens rotations, deflation on
//! negligible subdiagonals). Hermitian matrices: Householder tridiagonalization followed
//! by implicit QL iteration on the real tridiagonal.

use num_complex::Complex64;

use crate::linalg::DenseMatrix;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sweep budget per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 100;

/// All eigenvalues, sorted by (real, imaginary). Hermitian input takes the
/// tridiagonal fast path and returns exactly real values.
pub fn dense_eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    if m.dim() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if m.is_hermitian(1e-14) {
        Ok(hermitian_eigenvalues(m)?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect())
    } else {
        general_eigenvalues(m)
    }
}

pub fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues of an arbitrary complex matrix via Hessenberg–QR, sorted.
pub fn general_eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut h: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h)?;
    sort_eigenvalues(&mut values);
    Ok(values)
}

fn hessenberg(a: &mut [Vec<Complex64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for col in 0..n - 2 {
        let norm_x: f64 = (col + 1..n).map(|i| a[i][col].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[col + 1][col];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (col + 1..n).map(|i| a[i][col]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        // A ← (I − 2vv†) A
        for j in col..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * a[col + 1 + t][j])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                a[col + 1 + t][j] -= 2.0 * vt * s;
            }
        }
        // A ← A (I − 2vv†)
        for row in a.iter_mut() {
            let s: Complex64 = v.iter().enumerate().map(|(t, vt)| row[col + 1 + t] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                row[col + 1 + t] -= 2.0 * s * vt.conj();
            }
        }
        for row in a.iter_mut().skip(col + 2) {
            row[col] = ZERO;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

fn hessenberg_qr(h: &mut [Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let n = h.len();
    let max_iter = SWEEPS_PER_DIM * n.max(1);
    let mut values = vec![ZERO; n];
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            values[0] = h[0][0];
            break;
        }
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let scale = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if sub <= f64::EPSILON * scale {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[hi][hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                n,
                iterations: total,
            });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break stagnation cycles
            h[hi][hi] + Complex64::new(0.75 * h[hi][hi - 1].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        for i in lo..=hi {
            h[i][i] -= mu;
        }
        rots.clear();
        for i in lo..hi {
            let (c, s) = givens(h[i][i], h[i + 1][i]);
            for j in i..=hi {
                let x = h[i][j];
                let y = h[i + 1][j];
                h[i][j] = c * x + s * y;
                h[i + 1][j] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (t, &(c, s)) in rots.iter().enumerate() {
            let i = lo + t;
            for row in h.iter_mut().take((i + 2).min(hi + 1)).skip(lo) {
                let x = row[i];
                let y = row[i + 1];
                row[i] = c * x + s.conj() * y;
                row[i + 1] = -s * x + c * y;
            }
        }
        for i in lo..=hi {
            h[i][i] += mu;
        }
    }
    Ok(values)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let (mut d, mut e) = tridiagonalize(&mut a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of a Hermitian matrix to a real symmetric tridiagonal.
/// Returns the diagonal and the (absolute) subdiagonal, `e[i]` coupling `i` and `i+1`.
fn tridiagonalize(a: &mut [Vec<Complex64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut e = vec![0.0; n.saturating_sub(1)];
    for col in 0..n.saturating_sub(2) {
        let norm_x: f64 = (col + 1..n).map(|i| a[i][col].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[col + 1][col];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (col + 1..n).map(|i| a[i][col]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        let m = v.len();
        let off = col + 1;
        // p = A v on the trailing block
        let p: Vec<Complex64> = (0..m)
            .map(|i| (0..m).map(|j| a[off + i][off + j] * v[j]).sum())
            .collect();
        let kappa: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        // w = 2p − 2κv,   A' = A − v w† − w v†
        let w: Vec<Complex64> = p
            .iter()
            .zip(&v)
            .map(|(pi, vi)| 2.0 * pi - 2.0 * kappa * vi)
            .collect();
        for i in 0..m {
            for j in 0..m {
                a[off + i][off + j] -= v[i] * w[j].conj() + w[i] * v[j].conj();
            }
        }
        a[off][col] = alpha;
        a[col][off] = alpha.conj();
        for i in 1..m {
            a[off + i][col] = ZERO;
            a[col][off + i] = ZERO;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    for (i, ei) in e.iter_mut().enumerate() {
        // a diagonal unitary similarity makes every off-diagonal real and non-negative
        *ei = a[i + 1][i].norm();
    }
    (d, e)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal (eigenvalues only).
fn tridiagonal_ql(d: &mut [f64], e_in: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    let mut e = e_in.to_vec();
    e.push(0.0);
    let max_iter = SWEEPS_PER_DIM * n;
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > max_iter {
                return Err(Error::NoConvergence {
                    n,
                    iterations: total,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_x() {
        let m = DenseMatrix::from_array(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
        let ev = dense_eigenvalues(&m).unwrap();
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-14);
        let ev = general_eigenvalues(&m).unwrap();
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_and_rotation() {
        // rotation generator: eigenvalues ±i
        let m = DenseMatrix::from_array(&[[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
        let ev = general_eigenvalues(&m).unwrap();
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
        // defective 3×3 Jordan block with eigenvalue 2
        let j = DenseMatrix::from_array(&[
            [c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ]);
        for z in general_eigenvalues(&j).unwrap() {
            assert!((z - c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let m = DenseMatrix::from_array(&[
            [c(10.0, 0.0), c(-35.0, 0.0), c(50.0, 0.0), c(-24.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let ev = general_eigenvalues(&m).unwrap();
        for (z, want) in ev.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((z - c(want, 0.0)).norm() < 1e-10, "{z} vs {want}");
        }
    }

    #[test]
    fn hermitian_path_matches_general_path() {
        let m = DenseMatrix::from_array(&[
            [c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5), c(0.0, 0.0)],
            [c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0), c(0.0, 2.0)],
            [c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(0.0, -2.0), c(1.0, 0.0), c(3.0, 0.0)],
        ]);
        let h = hermitian_eigenvalues(&m).unwrap();
        let g = general_eigenvalues(&m).unwrap();
        for (a, b) in h.iter().zip(&g) {
            assert!((c(*a, 0.0) - b).norm() < 1e-12, "{a} vs {b}");
            assert!(b.im.abs() < 1e-10);
        }
        // trace check
        let tr: f64 = h.iter().sum();
        assert!((tr - 4.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_and_one_by_one() {
        let m = DenseMatrix::from_array(&[[c(3.0, -1.0)]]);
        assert_eq!(general_eigenvalues(&m).unwrap(), vec![c(3.0, -1.0)]);
        let d = DenseMatrix::from_array(&[
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-5.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ]);
        assert_eq!(
            hermitian_eigenvalues(&d).unwrap(),
            vec![-5.0, 1.0, 2.0]
        );
    }
}
