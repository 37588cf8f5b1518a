//! Multimode density matrices in a truncated Fock basis.
//!
//! Modes are ordered most-significant first: for dims `[d0, d1]` the joint
//! index of `|n0, n1⟩` is `n0 * d1 + n1`, so `tensor(a, b)` is the Kronecker
//! product `a ⊗ b`.
//!
//! Constructors never renormalize. Probability mass that falls beyond the
//! cutoff is reported through [`DensityMatrix::leakage`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, View};

/// Largest joint dimension accepted unless a cutoff asks for more.
pub const DEFAULT_MAX_TOTAL_DIM: usize = 4096;
/// Truncation mass a constructor may drop before failing with `CutoffTooSmall`.
pub const DEFAULT_LEAKAGE_BUDGET: f64 = 1e-8;
/// Max elementwise |ρ − ρ†| accepted by [`DensityMatrix::validate`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted by [`DensityMatrix::validate`].
pub const PSD_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Per-mode Fock dimensions (levels `0..d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockCutoff {
    dims: Vec<usize>,
    max_total: usize,
}

impl FockCutoff {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_max_total(dims, DEFAULT_MAX_TOTAL_DIM)
    }

    pub fn with_max_total(dims: Vec<usize>, max_total: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("cutoff needs at least one mode".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::CutoffTooSmall(format!("mode dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > max_total {
            return Err(Error::DimensionOverflow { total, max: max_total });
        }
        Ok(Self { dims, max_total })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn uniform(modes: usize, dim: usize) -> Result<Self> {
        Self::new(vec![dim; modes])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    /// Default per-mode dimension: `ceil(mean + 6·sqrt(variance) + 10 + added_noise)`.
    pub fn heuristic_dim(mean: f64, variance: f64, added_noise: f64) -> usize {
        (mean + 6.0 * variance.max(0.0).sqrt() + 10.0 + added_noise.max(0.0)).ceil() as usize
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(Error::InvalidModeIndex { index: mode, modes: self.modes() });
        }
        Ok(())
    }

    fn require_modes(&self, modes: usize, what: &str) -> Result<()> {
        if self.modes() != modes {
            return Err(Error::InvalidParameter(format!(
                "{what} needs a {modes}-mode cutoff, got {} modes",
                self.modes()
            )));
        }
        Ok(())
    }
}

/// A state on the truncated Fock space of `cutoff`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
    cutoff: FockCutoff,
    leakage: f64,
}

impl DensityMatrix {
    /// Wraps a matrix. Only the shape is checked; call [`validate`](Self::validate)
    /// for the physical invariants.
    pub fn from_matrix(data: DMatrix<Complex64>, cutoff: FockCutoff) -> Result<Self> {
        let n = cutoff.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, cutoff needs {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        let leakage = (1.0 - data.trace().re).max(0.0);
        Ok(Self { data, cutoff, leakage })
    }

    pub(crate) fn from_parts(data: DMatrix<Complex64>, cutoff: FockCutoff) -> Self {
        let leakage = (1.0 - data.trace().re).max(0.0);
        Self { data, cutoff, leakage }
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    pub fn dims(&self) -> &[usize] {
        self.cutoff.dims()
    }

    pub fn modes(&self) -> usize {
        self.cutoff.modes()
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Trace mass lost to truncation, `max(0, 1 − Re tr ρ)`.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn purity(&self) -> f64 {
        let mut s = 0.0;
        for (a, b) in self.data.iter().zip(self.data.transpose().iter()) {
            s += (a * b).re;
        }
        s
    }

    /// Checks Hermiticity, positivity and `trace ∈ [1 − budget, 1]`.
    pub fn validate(&self, leakage_budget: f64) -> Result<()> {
        let herm = linalg::hermiticity_defect(&self.data);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let min_ev = linalg::hermitian_eigenvalues(&self.data)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_ev < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:e}")));
        }
        let tr = self.trace();
        if tr < 1.0 - leakage_budget || tr > 1.0 + HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} outside [1 - {leakage_budget:e}, 1]"
            )));
        }
        Ok(())
    }

    /// Photon-number distribution of one mode.
    pub fn populations(&self, mode: usize) -> Result<Vec<f64>> {
        self.cutoff.check_mode(mode)?;
        let dims = self.dims();
        let d = dims[mode];
        let post: usize = dims[mode + 1..].iter().product();
        let mut p = vec![0.0; d];
        for k in 0..self.dim() {
            p[(k / post) % d] += self.data[(k, k)].re;
        }
        Ok(p)
    }

    /// Highest level of `mode` whose population exceeds `threshold`.
    pub fn occupied_level(&self, mode: usize, threshold: f64) -> Result<usize> {
        let p = self.populations(mode)?;
        Ok(p.iter().rposition(|&x| x > threshold).unwrap_or(0))
    }

    /// Expectation `tr(ρ · ⊗ᵢ Oᵢ)` for operators on a subset of modes.
    pub fn expect_local(&self, ops: &[(usize, &DMatrix<Complex64>)]) -> Result<Complex64> {
        let mut m = self.data.clone();
        for &(mode, op) in ops {
            self.cutoff.check_mode(mode)?;
            m = local_left(&m, self.dims(), mode, op);
        }
        Ok(m.trace())
    }
}

/// Which single-mode operator a [`ModeOperator`] holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Number,
    Displacement(Complex64),
}

/// A single-mode operator as a literal truncation of its infinite matrix.
///
/// The truncated `[a, a†]` equals the identity except at the top level,
/// where it is `1 − d`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub kind: OperatorKind,
    pub data: DMatrix<Complex64>,
}

impl ModeOperator {
    pub fn annihilation(dim: usize) -> Self {
        let mut a = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Self { kind: OperatorKind::Annihilation, data: a }
    }

    pub fn creation(dim: usize) -> Self {
        let a = Self::annihilation(dim);
        Self { kind: OperatorKind::Creation, data: a.data.adjoint() }
    }

    pub fn number(dim: usize) -> Self {
        let mut n = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            n[(k, k)] = Complex64::new(k as f64, 0.0);
        }
        Self { kind: OperatorKind::Number, data: n }
    }

    /// Exact matrix elements `⟨m|D(β)|n⟩` for `m, n < dim`.
    pub fn displacement(beta: Complex64, dim: usize) -> Self {
        Self {
            kind: OperatorKind::Displacement(beta),
            data: displacement_matrix(beta, dim, dim),
        }
    }
}

/// `⟨m|D(β)|n⟩` for `m < rows`, `n < cols`.
///
/// Uses the normalized associated-Laguerre recurrence along each diagonal,
/// which stays bounded by one and is stable well beyond `|β|² ≈ 4·dim`.
pub fn displacement_matrix(beta: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(rows, cols, C0);
    let x = beta.norm_sqr();
    let theta = beta.arg();
    let span = rows.max(cols);
    for offset in 0..span {
        let len = if offset < rows { (rows - offset).min(cols) } else { 0 };
        let len_t = if offset > 0 && offset < cols { (cols - offset).min(rows) } else { 0 };
        let steps = len.max(len_t);
        if steps == 0 {
            continue;
        }
        let al = offset as f64;
        // f_0 = e^{-x/2} x^{al/2} / sqrt(al!)
        let mut f = if x == 0.0 {
            if offset == 0 { 1.0 } else { 0.0 }
        } else {
            (-0.5 * x + 0.5 * al * x.ln() - 0.5 * linalg::ln_factorial(offset)).exp()
        };
        let mut f_prev = 0.0;
        let phase_lo = Complex64::from_polar(1.0, al * theta);
        let sign = if offset % 2 == 0 { 1.0 } else { -1.0 };
        let phase_hi = Complex64::from_polar(sign, -al * theta);
        for k in 0..steps {
            if k < len {
                out[(k + offset, k)] = phase_lo * f;
            }
            if k < len_t {
                out[(k, k + offset)] = phase_hi * f;
            }
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + al - x) * f - (kf * (kf + al)).sqrt() * f_prev)
                / ((kf + 1.0) * (kf + 1.0 + al)).sqrt();
            f_prev = f;
            f = next;
        }
    }
    out
}

/// Fock amplitudes `e^{-|α|²/2} αⁿ/√(n!)` for `n < dim`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Poisson mass at or beyond `dim` for mean `lambda`, summed upward from the
/// first omitted term so that tiny tails keep full relative precision.
pub fn poisson_tail(lambda: f64, dim: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut term = (-lambda + dim as f64 * lambda.ln() - linalg::ln_factorial(dim)).exp();
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        sum += term;
        n += 1;
        term *= lambda / n as f64;
        if n as f64 > lambda && term < sum * 1e-17 {
            break;
        }
        if n > dim + 100_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn check_tail(tail: f64, budget: f64, what: &str) -> Result<()> {
    if tail > budget {
        return Err(Error::CutoffTooSmall(format!(
            "{what}: truncated mass {tail:e} exceeds budget {budget:e}"
        )));
    }
    Ok(())
}

fn projector(amps: &[Complex64]) -> DMatrix<Complex64> {
    let n = amps.len();
    DMatrix::from_fn(n, n, |i, j| amps[i] * amps[j].conj())
}

pub fn coherent_state(alpha: Complex64, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    coherent_state_with_budget(alpha, cutoff, DEFAULT_LEAKAGE_BUDGET)
}

pub fn coherent_state_with_budget(
    alpha: Complex64,
    cutoff: &FockCutoff,
    budget: f64,
) -> Result<DensityMatrix> {
    cutoff.require_modes(1, "coherent_state")?;
    let d = cutoff.dims()[0];
    let tail = poisson_tail(alpha.norm_sqr(), d);
    check_tail(tail, budget, "coherent_state")?;
    let amps = coherent_amplitudes(alpha, d);
    let mut rho = DensityMatrix::from_parts(projector(&amps), cutoff.clone());
    rho.leakage = tail;
    Ok(rho)
}

pub fn number_state(n: usize, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    cutoff.require_modes(1, "number_state")?;
    let d = cutoff.dims()[0];
    if n >= d {
        return Err(Error::CutoffTooSmall(format!("number state |{n}⟩ needs dimension > {n}, got {d}")));
    }
    let mut m = DMatrix::from_element(d, d, C0);
    m[(n, n)] = C1;
    Ok(DensityMatrix::from_parts(m, cutoff.clone()))
}

pub fn vacuum(cutoff: &FockCutoff) -> DensityMatrix {
    let n = cutoff.total_dim();
    let mut m = DMatrix::from_element(n, n, C0);
    m[(0, 0)] = C1;
    DensityMatrix::from_parts(m, cutoff.clone())
}

/// Even-photon amplitudes of the squeezed vacuum `S(r)|0⟩`, `x` squeezed for `r > 0`.
fn squeezed_amplitudes(r: f64, dim: usize) -> (Vec<Complex64>, f64) {
    let t = -r.tanh();
    let mut amps = vec![C0; dim];
    let mut c = 1.0 / r.cosh().sqrt();
    let mut k = 0usize;
    while 2 * k < dim {
        amps[2 * k] = Complex64::new(c, 0.0);
        let kf = k as f64;
        c *= t * ((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (2.0 * (kf + 1.0));
        k += 1;
    }
    // Tail of the even-photon distribution: sum the omitted terms directly.
    let mut tail = 0.0;
    loop {
        tail += c * c;
        let kf = k as f64;
        c *= t * ((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (2.0 * (kf + 1.0));
        k += 1;
        if c * c < tail * 1e-17 || k > 1_000_000 || c == 0.0 {
            break;
        }
    }
    (amps, tail)
}

pub fn squeezed_vacuum(r: f64, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    cutoff.require_modes(1, "squeezed_vacuum")?;
    if !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeeze parameter {r}")));
    }
    let (amps, tail) = squeezed_amplitudes(r, cutoff.dims()[0]);
    check_tail(tail, DEFAULT_LEAKAGE_BUDGET, "squeezed_vacuum")?;
    let mut rho = DensityMatrix::from_parts(projector(&amps), cutoff.clone());
    rho.leakage = tail;
    Ok(rho)
}

/// Thermal (geometric) state with mean photon number `mean`.
pub fn thermal_state(mean: f64, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    cutoff.require_modes(1, "thermal_state")?;
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!("thermal mean {mean}")));
    }
    let d = cutoff.dims()[0];
    let q = mean / (mean + 1.0);
    let tail = q.powi(d as i32);
    check_tail(tail, DEFAULT_LEAKAGE_BUDGET, "thermal_state")?;
    let mut m = DMatrix::from_element(d, d, C0);
    let mut p = 1.0 / (mean + 1.0);
    for n in 0..d {
        m[(n, n)] = Complex64::new(p, 0.0);
        p *= q;
    }
    let mut rho = DensityMatrix::from_parts(m, cutoff.clone());
    rho.leakage = tail;
    Ok(rho)
}

/// Two-mode squeezed vacuum `√(1−λ²) Σ λⁿ |n⟩|n⟩`, `λ = √(Ns/(Ns+1))`.
pub fn qidc_state(ns: f64, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    cutoff.require_modes(2, "qidc_state")?;
    if !(ns >= 0.0) || !ns.is_finite() {
        return Err(Error::InvalidParameter(format!("mean signal photons {ns}")));
    }
    let (da, db) = (cutoff.dims()[0], cutoff.dims()[1]);
    let levels = da.min(db);
    let lambda2 = ns / (ns + 1.0);
    let tail = lambda2.powi(levels as i32);
    check_tail(tail, DEFAULT_LEAKAGE_BUDGET, "qidc_state")?;
    let mut psi = vec![C0; da * db];
    let norm = (1.0 - lambda2).sqrt();
    let lambda = lambda2.sqrt();
    let mut c = norm;
    for n in 0..levels {
        psi[n * db + n] = Complex64::new(c, 0.0);
        c *= lambda;
    }
    let mut rho = DensityMatrix::from_parts(projector(&psi), cutoff.clone());
    rho.leakage = tail;
    Ok(rho)
}

/// Random full-trace state `G G† / tr(G G†)` with a complex Ginibre `G` of the given rank.
pub fn random_state<R: Rng + ?Sized>(cutoff: &FockCutoff, rank: usize, rng: &mut R) -> DensityMatrix {
    let n = cutoff.total_dim();
    let rank = rank.clamp(1, n);
    let g = DMatrix::from_fn(n, rank, |_, _| {
        Complex64::new(linalg::standard_normal(rng), linalg::standard_normal(rng))
    });
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    DensityMatrix::from_parts(linalg::hermitize(&m), cutoff.clone())
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    let cutoff = FockCutoff::with_max_total(dims, a.cutoff.max_total.max(b.cutoff.max_total))?;
    Ok(DensityMatrix::from_parts(a.data.kronecker(&b.data), cutoff))
}

/// Reduced state on `keep` (output modes in ascending index order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial_trace needs at least one kept mode".into()));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &k in &keep {
        rho.cutoff.check_mode(k)?;
    }
    let dims = rho.dims();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let nk: usize = keep_dims.iter().product();
    let nt: usize = traced_dims.iter().product();
    let strides = strides(dims);

    let joint = |kept: usize, tr: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept;
        for (pos, &m) in keep.iter().enumerate().rev() {
            idx += (rem % keep_dims[pos]) * strides[m];
            rem /= keep_dims[pos];
        }
        let mut rem = tr;
        for (pos, &m) in traced.iter().enumerate().rev() {
            idx += (rem % traced_dims[pos]) * strides[m];
            rem /= traced_dims[pos];
        }
        idx
    };

    let mut out = DMatrix::from_element(nk, nk, C0);
    for t in 0..nt {
        let rows: Vec<usize> = (0..nk).map(|k| joint(k, t)).collect();
        for (j, &cj) in rows.iter().enumerate() {
            for (i, &ri) in rows.iter().enumerate() {
                out[(i, j)] += rho.data[(ri, cj)];
            }
        }
    }
    let cutoff = FockCutoff::with_max_total(keep_dims, rho.cutoff.max_total)?;
    Ok(DensityMatrix::from_parts(out, cutoff))
}

/// `tr(ρ a†a)` for one mode.
pub fn mean_photon_number(rho: &DensityMatrix, mode: usize) -> Result<f64> {
    let p = rho.populations(mode)?;
    Ok(p.iter().enumerate().map(|(n, &x)| n as f64 * x).sum())
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// `(I ⊗ op ⊗ I) · x` with `op` acting on `mode`.
pub fn local_left(
    x: &DMatrix<Complex64>,
    dims: &[usize],
    mode: usize,
    op: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    if dims.len() == 1 {
        return linalg::matmul(op, x);
    }
    let d = dims[mode];
    let post: usize = dims[mode + 1..].iter().product();
    let pre: usize = dims[..mode].iter().product();
    let (n, m) = (x.nrows(), x.ncols());
    let mut out = DMatrix::from_element(n, m, C0);
    let vop = View { off: 0, rs: 1, cs: d };
    for a in 0..pre {
        for b in 0..post {
            // rows (a, ·, b) form a d×m block with row stride `post`
            let v = View { off: a * d * post + b, rs: post, cs: n };
            linalg::gemm_into(d, d, m, op.as_slice(), vop, x.as_slice(), v, out.as_mut_slice(), v);
        }
    }
    out
}

/// `x · (I ⊗ op ⊗ I)` with `op` acting on `mode`.
pub fn local_right(
    x: &DMatrix<Complex64>,
    dims: &[usize],
    mode: usize,
    op: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    if dims.len() == 1 {
        return linalg::matmul(x, op);
    }
    let d = dims[mode];
    let post: usize = dims[mode + 1..].iter().product();
    let pre: usize = dims[..mode].iter().product();
    let (n, m) = (x.nrows(), x.ncols());
    let mut out = DMatrix::from_element(n, m, C0);
    let vop = View { off: 0, rs: 1, cs: d };
    for a in 0..pre {
        for b in 0..post {
            let v = View { off: (a * d * post + b) * n, rs: 1, cs: post * n };
            linalg::gemm_into(n, d, d, x.as_slice(), v, op.as_slice(), vop, out.as_mut_slice(), v);
        }
    }
    out
}

/// `(I ⊗ k ⊗ I) x (I ⊗ k ⊗ I)†`.
pub fn local_sandwich(
    x: &DMatrix<Complex64>,
    dims: &[usize],
    mode: usize,
    k: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    if dims.len() == 1 {
        return linalg::matmul_adjoint(&linalg::matmul(k, x), k);
    }
    let left = local_left(x, dims, mode, k);
    local_right(&left, dims, mode, &k.adjoint())
}
