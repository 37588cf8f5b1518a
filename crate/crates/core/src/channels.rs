//! Pure-loss and additive-Gaussian-noise channels on truncated Fock states.
//!
//! Loss `L_κ` is applied through its photon-loss Kraus operators, which never
//! raise the photon number and so act exactly on the truncation.
//!
//! The AGN map `G_N` is the Gaussian mixture of displacements
//! `ρ ↦ ∫ (1/πN) e^{-|β|²/N} D(β) ρ D(β)† d²β`, evaluated with a tensor
//! Gauss–Hermite rule. The nodes are scaled to the combined envelope
//! `e^{-(1/N + 1)|β|²}` of the kernel and the displacement matrix elements, so
//! each low-lying matrix element is a polynomial times the rule's weight and is
//! integrated to near machine precision. Displacement matrix elements are
//! exact, so every output element below the cutoff is exact up to quadrature
//! error; mass pushed above the cutoff shows up as leakage.

use gauss_quad::GaussHermite;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix};
use crate::linalg;

/// Fraction of the top Fock levels excluded from completeness checks.
pub const GUARD_BAND_FRACTION: f64 = 0.2;
/// Populations above this count as occupied for the AGN headroom check.
pub const OCCUPIED_THRESHOLD: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Per-mode transmittances and AGN variances.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    kappa: Vec<f64>,
    noise: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(kappa: Vec<f64>, noise: Vec<f64>) -> Result<Self> {
        if kappa.len() != noise.len() {
            return Err(Error::InvalidParameter(format!(
                "{} transmittances for {} noise variances",
                kappa.len(),
                noise.len()
            )));
        }
        kappa.iter().try_for_each(|&k| check_kappa(k))?;
        noise.iter().try_for_each(|&n| check_noise(n))?;
        Ok(Self { kappa, noise })
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    /// `G_N L_κ ρ`: loss first, then receiver noise.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let lossy = apply_loss(rho, &self.kappa)?;
        apply_agn(&lossy, &self.noise)
    }
}

fn check_kappa(k: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidTransmittance(k));
    }
    Ok(())
}

fn check_noise(n: f64) -> Result<()> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::InvalidNoiseVariance(n));
    }
    Ok(())
}

fn check_len(rho: &DensityMatrix, len: usize) -> Result<()> {
    if len != rho.modes() {
        return Err(Error::InvalidParameter(format!(
            "parameter vector of length {len} for a {}-mode state",
            rho.modes()
        )));
    }
    Ok(())
}

/// Operator-sum representation of a single-mode map.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub operators: Vec<DMatrix<Complex64>>,
    /// Max elementwise `|Σ K†K − I|` over levels below the guard band.
    pub completeness_defect: f64,
}

impl KrausSet {
    pub fn new(operators: Vec<DMatrix<Complex64>>) -> Self {
        let dim = operators.first().map_or(0, |k| k.ncols());
        let mut sum = DMatrix::from_element(dim, dim, C0);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let reliable = dim - (GUARD_BAND_FRACTION * dim as f64).ceil() as usize;
        let mut defect = 0.0f64;
        for i in 0..reliable {
            for j in 0..reliable {
                let e = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((sum[(i, j)] - Complex64::new(e, 0.0)).norm());
            }
        }
        Self { operators, completeness_defect: defect }
    }

    /// `Σ (I⊗K⊗I) ρ (I⊗K⊗I)†` on one mode.
    pub fn apply(&self, rho: &DensityMatrix, mode: usize) -> Result<DensityMatrix> {
        rho.cutoff().check_mode(mode)?;
        let dims = rho.dims();
        let n = rho.dim();
        let mut out = DMatrix::from_element(n, n, C0);
        for k in &self.operators {
            out += fock::local_sandwich(rho.data(), dims, mode, k);
        }
        Ok(DensityMatrix::from_parts(out, rho.cutoff().clone()))
    }
}

/// Photon-loss Kraus operators `⟨n−k|A_k|n⟩ = √C(n,k) κ^{(n−k)/2} (1−κ)^{k/2}`, `k = 0..dim−1`.
///
/// For `κ = 1` only the identity is returned.
pub fn loss_kraus(kappa: f64, dim: usize) -> Result<KrausSet> {
    check_kappa(kappa)?;
    if kappa == 1.0 {
        return Ok(KrausSet::new(vec![DMatrix::identity(dim, dim)]));
    }
    let mut ops = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut a = DMatrix::from_element(dim, dim, C0);
        for n in k..dim {
            let ln_binom = linalg::ln_factorial(n) - linalg::ln_factorial(k) - linalg::ln_factorial(n - k);
            let amp = (0.5 * ln_binom).exp()
                * pow_half(kappa, n - k)
                * pow_half(1.0 - kappa, k);
            a[(n - k, n)] = Complex64::new(amp, 0.0);
        }
        ops.push(a);
    }
    Ok(KrausSet::new(ops))
}

/// `x^{e/2}` with `0^0 = 1`.
fn pow_half(x: f64, e: usize) -> f64 {
    if e == 0 {
        1.0
    } else {
        x.sqrt().powi(e as i32)
    }
}

/// `L_κ ρ` applied mode by mode.
pub fn apply_loss(rho: &DensityMatrix, kappa: &[f64]) -> Result<DensityMatrix> {
    check_len(rho, kappa.len())?;
    kappa.iter().try_for_each(|&k| check_kappa(k))?;
    let mut out = rho.clone();
    for (mode, &k) in kappa.iter().enumerate() {
        if k == 1.0 {
            continue;
        }
        let kraus = loss_kraus(k, rho.dims()[mode])?;
        out = kraus.apply(&out, mode)?;
    }
    Ok(out)
}

/// Quadrature rule for the AGN displacement average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgnQuadrature {
    /// Gauss–Hermite points per axis.
    pub order: usize,
    /// Nodes with `|β| > radius·√N` are dropped.
    pub radius: f64,
}

impl Default for AgnQuadrature {
    fn default() -> Self {
        Self { order: 31, radius: 6.0 }
    }
}

impl AgnQuadrature {
    /// Displacements and weights for variance `noise`, in fixed row-major order.
    pub fn nodes(&self, noise: f64) -> Result<Vec<(Complex64, f64)>> {
        check_noise(noise)?;
        if self.order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        if noise == 0.0 {
            return Ok(vec![(C0, 1.0)]);
        }
        let rule = GaussHermite::new(self.order.try_into().expect("order > 0"));
        let pairs = rule.as_node_weight_pairs();
        let scale = (noise / (noise + 1.0)).sqrt();
        let cut = self.radius * noise.sqrt();
        let norm = scale * scale / (std::f64::consts::PI * noise);
        let mut nodes = Vec::with_capacity(pairs.len() * pairs.len());
        for &(x, wx) in pairs {
            for &(y, wy) in pairs {
                let beta = Complex64::new(scale * x, scale * y);
                if beta.norm() > cut {
                    continue;
                }
                nodes.push((beta, wx * wy * norm * beta.norm_sqr().exp()));
            }
        }
        Ok(nodes)
    }
}

/// Levels of headroom the AGN map needs above the occupied range: `ceil(6√N + 3N)`.
pub fn headroom_required(noise: f64) -> usize {
    (6.0 * noise.sqrt() + 3.0 * noise).ceil() as usize
}

pub fn apply_agn(rho: &DensityMatrix, noise: &[f64]) -> Result<DensityMatrix> {
    apply_agn_with(rho, noise, &AgnQuadrature::default())
}

/// `G_N ρ` applied mode by mode.
pub fn apply_agn_with(
    rho: &DensityMatrix,
    noise: &[f64],
    quad: &AgnQuadrature,
) -> Result<DensityMatrix> {
    check_len(rho, noise.len())?;
    noise.iter().try_for_each(|&n| check_noise(n))?;
    for (mode, &n) in noise.iter().enumerate() {
        if n == 0.0 {
            continue;
        }
        let d = rho.dims()[mode];
        let occupied = rho.occupied_level(mode, OCCUPIED_THRESHOLD)?;
        let available = d - 1 - occupied;
        let required = headroom_required(n);
        if available < required {
            return Err(Error::CutoffHeadroomInsufficient { mode, noise: n, available, required });
        }
    }
    let mut out = rho.clone();
    for (mode, &n) in noise.iter().enumerate() {
        if n == 0.0 {
            continue;
        }
        let nodes = quad.nodes(n)?;
        let data = if out.modes() == 1 {
            agn_single_mode(out.data(), &nodes)
        } else {
            agn_local(out.data(), out.dims(), mode, &nodes)
        };
        out = DensityMatrix::from_parts(data, out.cutoff().clone());
    }
    Ok(out)
}

/// Number of leading levels outside which `x` is exactly zero.
fn support(x: &DMatrix<Complex64>) -> usize {
    let n = x.nrows();
    (0..n)
        .rev()
        .find(|&i| (0..n).any(|j| x[(i, j)] != C0 || x[(j, i)] != C0))
        .map_or(1, |i| i + 1)
}

fn agn_single_mode(x: &DMatrix<Complex64>, nodes: &[(Complex64, f64)]) -> DMatrix<Complex64> {
    let d = x.nrows();
    let s = support(x);
    let block = x.view((0, 0), (s, s)).into_owned();
    let mut out = DMatrix::from_element(d, d, C0);
    for &(beta, w) in nodes {
        let disp = fock::displacement_matrix(beta, d, s);
        let t = linalg::matmul(&disp, &block);
        out += linalg::matmul_adjoint(&t, &disp) * Complex64::new(w, 0.0);
    }
    out
}

/// Rows `T_δ` of the single-mode transfer: `G_N` is phase covariant, so it
/// sends `|m⟩⟨m+δ|` to `Σ_j T_δ[j,m] |j⟩⟨j+δ|` with real `T_δ`. Entry
/// `δ + d − 1` of the result holds `T_δ`.
fn agn_transfer(nodes: &[(Complex64, f64)], d: usize) -> Vec<DMatrix<f64>> {
    let mut t = vec![DMatrix::zeros(d, d); 2 * d - 1];
    for &(beta, w) in nodes {
        let disp = fock::displacement_matrix(beta, d, d);
        for (k, tk) in t.iter_mut().enumerate() {
            let (lo, hi, shift) = diagonal_range(k, d);
            for m in lo..hi {
                for j in lo..hi {
                    // the phases of the two factors cancel
                    let v = disp[(j, m)] * disp[(j + shift - lo, m + shift - lo)].conj();
                    tk[(j, m)] += w * v.re;
                }
            }
        }
    }
    t
}

/// For diagonal `k` of a `d×d` matrix (`δ = k − d + 1`): the row range
/// `[lo, hi)` and the column of row `lo`.
fn diagonal_range(k: usize, d: usize) -> (usize, usize, usize) {
    if k + 1 >= d {
        let delta = k + 1 - d;
        (0, d - delta, delta)
    } else {
        let delta = d - 1 - k;
        (delta, d, 0)
    }
}

fn agn_local(
    x: &DMatrix<Complex64>,
    dims: &[usize],
    mode: usize,
    nodes: &[(Complex64, f64)],
) -> DMatrix<Complex64> {
    let d = dims[mode];
    let pre: usize = dims[..mode].iter().product();
    let post: usize = dims[mode + 1..].iter().product();
    let n = x.nrows();
    let t = agn_transfer(nodes, d);
    let mut out = DMatrix::from_element(n, n, C0);
    let idx = |a: usize, i: usize, b: usize| (a * d + i) * post + b;
    for a2 in 0..pre {
        for b2 in 0..post {
            for a in 0..pre {
                for b in 0..post {
                    for (k, tk) in t.iter().enumerate() {
                        let (lo, hi, shift) = diagonal_range(k, d);
                        for m in lo..hi {
                            let v = x[(idx(a, m, b), idx(a2, m + shift - lo, b2))];
                            if v == C0 {
                                continue;
                            }
                            for j in lo..hi {
                                out[(idx(a, j, b), idx(a2, j + shift - lo, b2))] += v * tk[(j, m)];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `‖L_κ(G_N ρ) − G_{κN}(L_κ ρ)‖₁` with the same `κ` and `N` on every mode.
pub fn commutation_defect(rho: &DensityMatrix, kappa: f64, noise: f64) -> Result<f64> {
    check_kappa(kappa)?;
    check_noise(noise)?;
    let m = rho.modes();
    let kappas = vec![kappa; m];
    let noise_first = apply_loss(&apply_agn(rho, &vec![noise; m])?, &kappas)?;
    let loss_first = apply_agn(&apply_loss(rho, &kappas)?, &vec![kappa * noise; m])?;
    Ok(linalg::hermitian_trace_norm(&(noise_first.data() - loss_first.data())))
}
