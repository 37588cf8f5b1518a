//! Small dense helpers shared by the state, channel and bound modules.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Max elementwise `|x − x†|`.
/// Strided view into a column-major buffer: `(offset, row stride, column stride)`.
#[derive(Clone, Copy)]
pub(crate) struct View {
    pub off: usize,
    pub rs: usize,
    pub cs: usize,
}

fn span(v: View, rows: usize, cols: usize) -> usize {
    if rows == 0 || cols == 0 {
        return v.off;
    }
    v.off + (rows - 1) * v.rs + (cols - 1) * v.cs + 1
}

/// `C[m×n] = A[m×k]·B[k×n]` on strided views, overwriting `C`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_into(
    m: usize,
    k: usize,
    n: usize,
    a: &[Complex64],
    va: View,
    b: &[Complex64],
    vb: View,
    c: &mut [Complex64],
    vc: View,
) {
    assert!(span(va, m, k) <= a.len() && span(vb, k, n) <= b.len() && span(vc, m, n) <= c.len());
    if m == 0 || n == 0 {
        return;
    }
    // Complex64 is repr(C) {re, im}, layout-identical to [f64; 2]
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr().add(va.off) as *const [f64; 2],
            va.rs as isize,
            va.cs as isize,
            b.as_ptr().add(vb.off) as *const [f64; 2],
            vb.rs as isize,
            vb.cs as isize,
            [0.0, 0.0],
            c.as_mut_ptr().add(vc.off) as *mut [f64; 2],
            vc.rs as isize,
            vc.cs as isize,
        );
    }
}

/// Dense complex product; nalgebra falls back to naive loops for complex scalars.
pub fn matmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = DMatrix::zeros(m, n);
    gemm_into(
        m,
        k,
        n,
        a.as_slice(),
        View { off: 0, rs: 1, cs: m },
        b.as_slice(),
        View { off: 0, rs: 1, cs: k },
        c.as_mut_slice(),
        View { off: 0, rs: 1, cs: m },
    );
    c
}

/// `a · b†`.
pub fn matmul_adjoint(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    matmul(a, &b.adjoint())
}

pub fn hermiticity_defect(x: &DMatrix<Complex64>) -> f64 {
    let n = x.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((x[(i, j)] - x[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(x + x†)/2`.
pub fn hermitize(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (x + x.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian part of `x`, ascending.
pub fn hermitian_eigenvalues(x: &DMatrix<Complex64>) -> Vec<f64> {
    let h = hermitize(x);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of the symmetric part of a real matrix, ascending.
pub fn symmetric_eigenvalues(x: &DMatrix<f64>) -> Vec<f64> {
    let h = (x + x.transpose()) * 0.5;
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Trace norm of a Hermitian matrix: `Σ |λᵢ|`.
pub fn hermitian_trace_norm(x: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(x).iter().map(|l| l.abs()).sum()
}

/// Largest singular value.
pub fn operator_norm(x: &DMatrix<Complex64>) -> f64 {
    x.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Symmetric square root of a real PSD matrix.
pub fn psd_sqrt(x: &DMatrix<f64>) -> DMatrix<f64> {
    let h = (x + x.transpose()) * 0.5;
    let eig = h.symmetric_eigen();
    let roots = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    if n < 256 {
        let table = TABLE.get_or_init(|| {
            let mut t = vec![0.0; 256];
            for k in 2..256 {
                t[k] = t[k - 1] + (k as f64).ln();
            }
            t
        });
        table[n]
    } else {
        // Stirling series, error below 1e-14 relative for n >= 256
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_nalgebra() {
        let a = DMatrix::from_fn(5, 3, |i, j| Complex64::new(i as f64 - 1.5, (j * j) as f64 * 0.3));
        let b = DMatrix::from_fn(3, 4, |i, j| Complex64::new((i + j) as f64 * 0.7, -(i as f64)));
        assert!((matmul(&a, &b) - &a * &b).camax() < 1e-13);
        assert!((matmul_adjoint(&b.transpose(), &b.transpose()) - b.transpose() * b.conjugate()).camax() < 1e-13);
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let direct: f64 = (2..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() / direct < 1e-13);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.25, 0.0),
        ]));
        assert!((hermitian_trace_norm(&m) - 0.75).abs() < 1e-15);
        assert!((operator_norm(&m) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let r = psd_sqrt(&a);
        assert!((&r * &r - a).amax() < 1e-13);
    }
}
