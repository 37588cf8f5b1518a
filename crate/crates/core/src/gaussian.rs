//! Covariance-matrix calculus for Gaussian states.
//!
//! Quadratures are ordered `(x₁, p₁, x₂, p₂, …)` with `x = (a + a†)/√2`, so the
//! vacuum covariance is `I/2`. AGN of variance `N` adds `N` to each quadrature
//! variance. A Gaussian state has a nonnegative P-function exactly when
//! `cov − I/2 ⪰ 0`; that is the classicality test used here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, ModeOperator};
use crate::linalg;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Standard symplectic form `⊕ [[0, 1], [−1, 0]]` on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

impl GaussianState {
    /// Validates symmetry and the uncertainty principle `cov + (i/2)Ω ⪰ 0`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 || !n.is_multiple_of(2) || cov.nrows() != n || cov.ncols() != n {
            return Err(Error::InvalidState(format!(
                "mean of length {n} with a {}x{} covariance",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidState(format!("covariance asymmetry {asym:e}")));
        }
        let state = Self { mean, cov };
        let min = state.uncertainty_min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "uncertainty principle violated: min eigenvalue {min:e}"
            )));
        }
        Ok(state)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    pub fn coherent(alphas: &[Complex64]) -> Self {
        let mut g = Self::vacuum(alphas.len());
        for (k, a) in alphas.iter().enumerate() {
            g.mean[2 * k] = std::f64::consts::SQRT_2 * a.re;
            g.mean[2 * k + 1] = std::f64::consts::SQRT_2 * a.im;
        }
        g
    }

    pub fn thermal(means: &[f64]) -> Result<Self> {
        let mut g = Self::vacuum(means.len());
        for (k, &n) in means.iter().enumerate() {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::InvalidParameter(format!("thermal mean {n}")));
            }
            g.cov[(2 * k, 2 * k)] = n + 0.5;
            g.cov[(2 * k + 1, 2 * k + 1)] = n + 0.5;
        }
        Ok(g)
    }

    /// Single-mode squeezed vacuum: `Var x = e^{−2r}/2`, `Var p = e^{2r}/2`.
    pub fn squeezed_vacuum(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(format!("squeeze parameter {r}")));
        }
        let mut g = Self::vacuum(1);
        g.cov[(0, 0)] = (-2.0 * r).exp() / 2.0;
        g.cov[(1, 1)] = (2.0 * r).exp() / 2.0;
        Ok(g)
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Total `Σ ⟨a†a⟩ = (tr cov − m)/2 + |mean|²/2`.
    pub fn mean_photon_number(&self) -> f64 {
        (self.cov.trace() - self.modes() as f64) / 2.0 + self.mean.norm_squared() / 2.0
    }

    /// Smallest eigenvalue of `cov + (i/2)Ω`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let w = symplectic_form(self.modes());
        let h = DMatrix::from_fn(self.cov.nrows(), self.cov.ncols(), |i, j| {
            Complex64::new(0.5 * (self.cov[(i, j)] + self.cov[(j, i)]), 0.5 * w[(i, j)])
        });
        linalg::hermitian_eigenvalues(&h)[0]
    }

    /// Symplectic eigenvalues, ascending; all equal `1/2` for pure states.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let root = linalg::psd_sqrt(&self.cov);
        let k = &root * symplectic_form(self.modes()) * &root;
        let h = k.map(|v| Complex64::new(0.0, v));
        let ev = linalg::hermitian_eigenvalues(&h);
        // eigenvalues come in ±ν pairs; keep the upper half
        ev[self.modes()..].to_vec()
    }
}

/// Classicality verdict from the spectrum of `cov − I/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalityCertificate {
    pub is_classical: bool,
    pub min_eigenvalue: f64,
    /// Signed distance from the classical boundary; equal to `min_eigenvalue`.
    pub margin: f64,
}

pub fn classicality_certificate(g: &GaussianState) -> ClassicalityCertificate {
    let shifted = g.cov() - DMatrix::identity(g.cov.nrows(), g.cov.ncols()) * 0.5;
    let min = linalg::symmetric_eigenvalues(&shifted)[0];
    ClassicalityCertificate { is_classical: min >= -PSD_TOL, min_eigenvalue: min, margin: min }
}

/// Two-mode squeezed vacuum (signal, idler) with `ns` mean signal photons.
pub fn gaussian_qidc(ns: f64) -> Result<GaussianState> {
    if !(ns >= 0.0) || !ns.is_finite() {
        return Err(Error::InvalidParameter(format!("mean signal photons {ns}")));
    }
    let mut g = GaussianState::vacuum(2);
    let c = (ns * (ns + 1.0)).sqrt();
    for q in 0..2 {
        g.cov[(q, q)] = ns + 0.5;
        g.cov[(2 + q, 2 + q)] = ns + 0.5;
    }
    g.cov[(0, 2)] = c;
    g.cov[(2, 0)] = c;
    g.cov[(1, 3)] = -c;
    g.cov[(3, 1)] = -c;
    Ok(g)
}

fn check_len(g: &GaussianState, len: usize) -> Result<()> {
    if len != g.modes() {
        return Err(Error::InvalidParameter(format!(
            "parameter vector of length {len} for a {}-mode state",
            g.modes()
        )));
    }
    Ok(())
}

pub fn gaussian_apply_loss(g: &GaussianState, kappa: &[f64]) -> Result<GaussianState> {
    check_len(g, kappa.len())?;
    let mut scale = DVector::zeros(2 * g.modes());
    for (k, &t) in kappa.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTransmittance(t));
        }
        scale[2 * k] = t.sqrt();
        scale[2 * k + 1] = t.sqrt();
    }
    let mean = g.mean.component_mul(&scale);
    let mut cov = DMatrix::from_fn(g.cov.nrows(), g.cov.ncols(), |i, j| {
        scale[i] * g.cov[(i, j)] * scale[j]
    });
    for (k, &t) in kappa.iter().enumerate() {
        cov[(2 * k, 2 * k)] += (1.0 - t) / 2.0;
        cov[(2 * k + 1, 2 * k + 1)] += (1.0 - t) / 2.0;
    }
    Ok(GaussianState { mean, cov })
}

pub fn gaussian_apply_agn(g: &GaussianState, noise: &[f64]) -> Result<GaussianState> {
    check_len(g, noise.len())?;
    let mut out = g.clone();
    for (k, &n) in noise.iter().enumerate() {
        if !(n >= 0.0) || !n.is_finite() {
            return Err(Error::InvalidNoiseVariance(n));
        }
        out.cov[(2 * k, 2 * k)] += n;
        out.cov[(2 * k + 1, 2 * k + 1)] += n;
    }
    Ok(out)
}

/// Certificate after adding noise `1/2` to every mode; classical for any valid input.
pub fn gaussian_lemma2_check(g: &GaussianState) -> ClassicalityCertificate {
    let noisy = gaussian_apply_agn(g, &vec![0.5; g.modes()]).expect("fixed nonnegative noise");
    classicality_certificate(&noisy)
}

/// Smallest scale `t` at which `g` plus noise `t·direction` has `cov − I/2 ⪰ 0`,
/// located by bisection to width `tol`.
pub fn classicality_threshold(g: &GaussianState, direction: &[f64], tol: f64) -> Result<f64> {
    check_len(g, direction.len())?;
    if direction.iter().any(|&d| !(d >= 0.0)) || direction.iter().all(|&d| d == 0.0) {
        return Err(Error::InvalidParameter("noise direction must be nonnegative and nonzero".into()));
    }
    let classical = |t: f64| -> Result<bool> {
        let noise: Vec<f64> = direction.iter().map(|d| d * t).collect();
        Ok(classicality_certificate(&gaussian_apply_agn(g, &noise)?).min_eigenvalue >= 0.0)
    };
    if classical(0.0)? {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !classical(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParameter("no classical point along direction".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if classical(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First and second quadrature moments of a Fock-basis state.
///
/// Only meaningful for Gaussian states well inside the truncation.
pub fn moments_from_fock(rho: &DensityMatrix) -> Result<GaussianState> {
    let m = rho.modes();
    let quads: Vec<Vec<DMatrix<Complex64>>> = rho
        .dims()
        .iter()
        .map(|&d| {
            let a = ModeOperator::annihilation(d).data;
            let ad = a.adjoint();
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let x = (&a + &ad) * s;
            let p = (&a - &ad) * (s * Complex64::new(0.0, -1.0));
            vec![x, p]
        })
        .collect();
    let op = |k: usize| &quads[k / 2][k % 2];
    let mut mean = DVector::zeros(2 * m);
    for k in 0..2 * m {
        mean[k] = rho.expect_local(&[(k / 2, op(k))])?.re;
    }
    let mut cov = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..2 * m {
        for l in k..2 * m {
            let second = if k / 2 == l / 2 {
                let prod = op(k) * op(l);
                rho.expect_local(&[(k / 2, &prod)])?
            } else {
                rho.expect_local(&[(k / 2, op(k)), (l / 2, op(l))])?
            };
            let v = second.re - mean[k] * mean[l];
            cov[(k, l)] = v;
            cov[(l, k)] = v;
        }
    }
    Ok(GaussianState { mean, cov })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qidc_is_pure_with_expected_blocks() {
        assert_eq!(gaussian_qidc(0.0).unwrap(), GaussianState::vacuum(2));
        let g = gaussian_qidc(1.0).unwrap();
        assert!((g.cov()[(0, 2)] - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.cov()[(1, 3)] + 2f64.sqrt()).abs() < 1e-15);
        for nu in g.symplectic_eigenvalues() {
            assert!((nu - 0.5).abs() < 1e-10, "{nu}");
        }
        assert!(gaussian_qidc(-1.0).is_err());
    }

    #[test]
    fn thermal_symplectic_eigenvalue() {
        let g = GaussianState::thermal(&[2.0]).unwrap();
        let nu = g.symplectic_eigenvalues();
        assert_eq!(nu.len(), 1);
        assert!((nu[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_covariance_rejected() {
        let bad = DMatrix::identity(2, 2) * 0.1;
        assert!(matches!(GaussianState::new(DVector::zeros(2), bad), Err(Error::InvalidState(_))));
        assert!(GaussianState::new(DVector::zeros(2), DMatrix::identity(2, 2) * 0.5).is_ok());
    }

    #[test]
    fn loss_and_noise_basics() {
        let vac = GaussianState::vacuum(1);
        assert!((gaussian_apply_loss(&vac, &[0.3]).unwrap().cov() - vac.cov()).amax() < 1e-15);
        let sq = GaussianState::squeezed_vacuum(0.4).unwrap();
        let lossy = gaussian_apply_loss(&sq, &[0.6]).unwrap();
        assert!((lossy.cov()[(0, 0)] - (0.6 * (-0.8f64).exp() / 2.0 + 0.2)).abs() < 1e-15);
        assert!((lossy.cov()[(1, 1)] - (0.6 * 0.8f64.exp() / 2.0 + 0.2)).abs() < 1e-15);
        let noisy = gaussian_apply_agn(&vac, &[1.0]).unwrap();
        assert_eq!(noisy.cov(), GaussianState::thermal(&[1.0]).unwrap().cov());
        assert!(matches!(gaussian_apply_loss(&vac, &[1.2]), Err(Error::InvalidTransmittance(_))));
        assert!(matches!(gaussian_apply_agn(&vac, &[-1.0]), Err(Error::InvalidNoiseVariance(_))));
    }

    #[test]
    fn certificates() {
        let c = classicality_certificate(&GaussianState::vacuum(1));
        assert!(c.is_classical && c.min_eigenvalue.abs() < 1e-15);
        let c = classicality_certificate(&GaussianState::squeezed_vacuum(0.5).unwrap());
        assert!(!c.is_classical);
        assert!((c.min_eigenvalue - ((-1.0f64).exp() - 1.0) / 2.0).abs() < 1e-14);
        let c = gaussian_lemma2_check(&GaussianState::vacuum(1));
        assert!(c.is_classical && (c.margin - 0.5).abs() < 1e-15);
    }

    #[test]
    fn qidc_threshold_is_one() {
        for &ns in &[0.1, 0.5, 1.0, 10.0] {
            let t = classicality_threshold(&gaussian_qidc(ns).unwrap(), &[1.0, 0.0], 1e-10).unwrap();
            assert!((t - 1.0).abs() < 1e-8, "{ns}: {t}");
        }
    }
}
