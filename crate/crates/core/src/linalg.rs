//! Small dense linear algebra: complex square matrices, Hermitian eigenvalues
//! via Householder tridiagonalization, and the implicit QL iteration for real
//! symmetric tridiagonal matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Math methods without std; redundant when std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid("row-major data length must be n²"));
        }
        Ok(Self { n, data })
    }

    /// Assemble from columns; `columns[j]` is column `j`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let n = columns.len();
        let mut m = Self::zeros(n);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::invalid("column length must equal column count"));
            }
            for (i, &v) in col.iter().enumerate() {
                m.data[i * n + j] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues (ascending) of a Hermitian matrix. Only the lower triangle is
/// read.
pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let (diag, off) = hermitian_tridiagonalize(m);
    let mut eig = SymmetricTridiagonal { diag, off }.eigenvalues();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    eig
}

/// Householder reduction to real tridiagonal form. Returns the diagonal and
/// the moduli of the subdiagonal, which determine the spectrum.
fn hermitian_tridiagonalize(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.clone();
    // symmetrize from the lower triangle
    for i in 0..n {
        for j in 0..i {
            let v = a.get(i, j);
            a.set(j, i, v.conj());
        }
        let d = a.get(i, i).re;
        a.set(i, i, Complex64::new(d, 0.0));
    }
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let start = k + 1;
        let xnorm = (start..n).map(|i| a.get(i, k).norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            off.push(0.0);
            continue;
        }
        let x0 = a.get(start, k);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in start..n {
            v[i] = a.get(i, k);
        }
        v[start] -= alpha;
        let vnorm = (start..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            off.push(xnorm);
            continue;
        }
        for vi in &mut v[start..n] {
            *vi /= vnorm;
        }
        // p = A v on the trailing block, K = v† p
        for i in start..n {
            p[i] = (start..n).map(|j| a.get(i, j) * v[j]).sum();
        }
        let kk: Complex64 = (start..n).map(|i| v[i].conj() * p[i]).sum();
        let kk = kk.re;
        for i in start..n {
            for j in start..n {
                let upd = v[i] * p[j].conj() * 2.0 + p[i] * v[j].conj() * 2.0
                    - v[i] * v[j].conj() * (4.0 * kk);
                let cur = a.get(i, j);
                a.set(i, j, cur - upd);
            }
        }
        a.set(start, k, alpha);
        a.set(k, start, alpha.conj());
        for i in start + 1..n {
            a.set(i, k, ZERO);
            a.set(k, i, ZERO);
        }
        off.push(alpha.norm());
    }
    let diag = (0..n).map(|i| a.get(i, i).re).collect();
    (diag, off)
}

/// Real symmetric tridiagonal matrix: `diag` of length n, `off[k]` couples
/// rows `k` and `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Eigen-decomposition with eigenvectors stored as columns of a row-major
/// `n x n` array.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        tql2(&mut d, &mut e, None);
        d
    }

    pub fn eigen(&self) -> TridiagonalEigen {
        let n = self.diag.len();
        let mut d = self.diag.clone();
        let mut e = self.padded_off();
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tql2(&mut d, &mut e, Some(&mut z));
        TridiagonalEigen { values: d, vectors: z }
    }

    fn padded_off(&self) -> Vec<f64> {
        let n = self.diag.len();
        let mut e = Vec::with_capacity(n);
        e.extend_from_slice(&self.off[..n.saturating_sub(1)]);
        e.push(0.0);
        e
    }
}

/// Implicit QL with Wilkinson-type shifts (after the EISPACK/JAMA `tql2`
/// routine). `e[k]` couples `k` and `k + 1`, `e[n-1] = 0`.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) {
    let n = d.len();
    if n == 0 {
        return;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zh = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * zh;
                            z[k * n + i] = c * z[k * n + i] - s * zh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_hermitian() {
        // [[2, 1-i], [1+i, 3]] has eigenvalues (5 ± sqrt(9))/2 = 1, 4
        let m = DenseMatrix::from_row_major(2, vec![c(2., 0.), c(1., -1.), c(1., 1.), c(3., 0.)])
            .unwrap();
        let ev = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14);
        assert!((ev[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn four_by_four_known_spectrum() {
        // circulant path: tridiagonal 4x4 with 2 on diag, -1 off: 2 - 2cos(kπ/5)
        let mut m = DenseMatrix::zeros(4);
        for i in 0..4 {
            m.set(i, i, c(2.0, 0.0));
            if i + 1 < 4 {
                m.set(i, i + 1, c(0.0, -1.0));
                m.set(i + 1, i, c(0.0, 1.0));
            }
        }
        let ev = hermitian_eigenvalues(&m);
        let mut expect: Vec<f64> = (1..=4)
            .map(|k| 2.0 - 2.0 * (k as f64 * core::f64::consts::PI / 5.0).cos())
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn tridiagonal_eigenvectors_reconstruct() {
        let t = SymmetricTridiagonal { diag: vec![1.0, -2.0, 0.5, 3.0], off: vec![0.3, 1.1, -0.7] };
        let eig = t.eigen();
        let n = 4;
        for col in 0..n {
            let lambda = eig.values[col];
            for row in 0..n {
                let mut tv = t.diag[row] * eig.vectors[row * n + col];
                if row > 0 {
                    tv += t.off[row - 1] * eig.vectors[(row - 1) * n + col];
                }
                if row + 1 < n {
                    tv += t.off[row] * eig.vectors[(row + 1) * n + col];
                }
                assert!((tv - lambda * eig.vectors[row * n + col]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_element() {
        let t = SymmetricTridiagonal { diag: vec![7.0], off: vec![] };
        assert_eq!(t.eigenvalues(), vec![7.0]);
        let m = DenseMatrix::identity(1);
        assert_eq!(hermitian_eigenvalues(&m), vec![1.0]);
    }

    #[test]
    fn diagonal_matrix_untouched() {
        let mut m = DenseMatrix::zeros(3);
        m.set(0, 0, c(3.0, 0.0));
        m.set(1, 1, c(-1.0, 0.0));
        m.set(2, 2, c(0.5, 0.0));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 0.5, 3.0]);
    }
}
