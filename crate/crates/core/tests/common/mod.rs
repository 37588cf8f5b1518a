//! Reference computations that share no code with the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `ln C(n, k)` by direct summation of logs.
fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Sum of singular values; the library uses Hermitian eigenvalues instead.
pub fn trace_norm(x: &DMatrix<Complex64>) -> f64 {
    x.clone().svd(false, false).singular_values.iter().sum()
}

/// Fock amplitudes of `|α⟩` by the recurrence `c_{n+1} = α c_n / √(n+1)`.
pub fn coherent_vector(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(dim);
    let mut cn = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        v.push(cn);
        cn = cn * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

pub fn projector(v: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// `(1/(N+1)) (N/(N+1))^n`.
pub fn thermal_diag(mean: f64, dim: usize) -> Vec<f64> {
    let q = mean / (mean + 1.0);
    (0..dim).map(|n| q.powi(n as i32) / (mean + 1.0)).collect()
}

/// Pure-loss channel from the beamsplitter picture:
/// `|m⟩⟨n| → Σ_k √(C(m,k)C(n,k)) κ^{(m+n)/2−k} (1−κ)^k |m−k⟩⟨n−k|`.
pub fn loss_oracle(x: &DMatrix<Complex64>, kappa: f64) -> DMatrix<Complex64> {
    let d = x.nrows();
    let mut out = DMatrix::from_element(d, d, C0);
    for m in 0..d {
        for n in 0..d {
            for k in 0..=m.min(n) {
                let ln = 0.5 * (ln_binomial(m, k) + ln_binomial(n, k));
                let w = if kappa == 1.0 {
                    if k == 0 { 1.0 } else { 0.0 }
                } else if kappa == 0.0 {
                    if m == k && n == k { 1.0 } else { 0.0 }
                } else {
                    (ln + ((m + n) as f64 / 2.0 - k as f64) * kappa.ln() + k as f64 * (1.0 - kappa).ln()).exp()
                };
                out[(m - k, n - k)] += x[(m, n)] * w;
            }
        }
    }
    out
}

/// Quantum-limited amplifier of gain `g`, computed on `work` levels:
/// `|m⟩⟨n| → Σ_k √(C(m+k,k)C(n+k,k)) g^{−(m+n)/2−1} (1−1/g)^k |m+k⟩⟨n+k|`.
pub fn amplifier_oracle(x: &DMatrix<Complex64>, g: f64, work: usize) -> DMatrix<Complex64> {
    let d = x.nrows();
    let mut out = DMatrix::from_element(work, work, C0);
    for m in 0..d {
        for n in 0..d {
            if x[(m, n)] == C0 {
                continue;
            }
            for k in 0..work - m.max(n) {
                let ln = 0.5 * (ln_binomial(m + k, k) + ln_binomial(n + k, k))
                    - ((m + n) as f64 / 2.0 + 1.0) * g.ln()
                    + k as f64 * (1.0 - 1.0 / g).ln();
                out[(m + k, n + k)] += x[(m, n)] * ln.exp();
            }
        }
    }
    out
}

/// Additive noise `N` as amplification by `N + 1` after loss `1/(N + 1)`;
/// the amplifier runs on `work` levels and the result is cut back to `d`.
pub fn agn_oracle(x: &DMatrix<Complex64>, noise: f64, work: usize) -> DMatrix<Complex64> {
    if noise == 0.0 {
        return x.clone();
    }
    let g = noise + 1.0;
    let d = x.nrows();
    let lossy = loss_oracle(x, 1.0 / g);
    amplifier_oracle(&lossy, g, work).view((0, 0), (d, d)).into_owned()
}

/// Husimi function of `|1⟩`: `|α|² e^{−|α|²}/π`.
pub fn q_fock1(alpha: Complex64) -> f64 {
    alpha.norm_sqr() * (-alpha.norm_sqr()).exp() / std::f64::consts::PI
}

/// Closed-form symmetric characteristic function of a squeezed vacuum with
/// `Var x = e^{−2r}/2`, `Var p = e^{2r}/2`. With `μa† − μ*a = i√2(μ_i x − μ_r p)`
/// this is `exp(−(e^{−2r} μ_i² + e^{2r} μ_r²)/2)`.
pub fn chi_w_squeezed(r: f64, mu: Complex64) -> f64 {
    (-0.5 * ((-2.0 * r).exp() * mu.im * mu.im + (2.0 * r).exp() * mu.re * mu.re)).exp()
}
