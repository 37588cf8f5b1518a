//! Characteristic functions and quasi-probability distributions.
//!
//! Grids are rectangular midpoint lattices over `[−R, R]²` per mode, with at
//! most two modes. Every grid integral is a plain Riemann sum in a fixed order.
//!
//! Evaluations are exact on the truncated space: `Q` uses coherent-state
//! overlaps, `W(α) = (2/π) tr[ρ D(2α) Π]`, and the characteristic functions use
//! matrix elements whose intermediate sums are either finite or summed to
//! convergence. P-functions are never deconvolved; they come from the rescaled
//! Q-function of the input or from the `P = Q` and `P = W` identifications.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channels;
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockCutoff};
use crate::linalg;

/// Tolerance on the Riemann-sum normalization of densities.
pub const GRID_TOLERANCE: f64 = 1e-4;
/// P-function samples below this are treated as genuinely negative.
pub const NEGATIVITY_TOL: f64 = 1e-12;
/// Largest `|μ|²` used for antinormally ordered evaluation; the alternating
/// series loses about `e^{1.5|μ|²}` in relative precision.
pub const ANTINORMAL_MAX_MODULUS_SQ: f64 = 12.0;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Normal,
    Antinormal,
    Symmetric,
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" | "normal" => Ok(Ordering::Normal),
            "A" | "a" | "antinormal" => Ok(Ordering::Antinormal),
            "W" | "w" | "symmetric" => Ok(Ordering::Symmetric),
            other => Err(Error::InvalidOrdering(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    ChiN,
    ChiA,
    ChiW,
    Q,
    W,
    P,
}

impl GridKind {
    pub fn is_characteristic(self) -> bool {
        matches!(self, GridKind::ChiN | GridKind::ChiA | GridKind::ChiW)
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GridKind::ChiN => "chi_N",
            GridKind::ChiA => "chi_A",
            GridKind::ChiW => "chi_W",
            GridKind::Q => "Q",
            GridKind::W => "W",
            GridKind::P => "P",
        };
        f.write_str(s)
    }
}

impl From<Ordering> for GridKind {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Normal => GridKind::ChiN,
            Ordering::Antinormal => GridKind::ChiA,
            Ordering::Symmetric => GridKind::ChiW,
        }
    }
}

/// Lattice geometry: `n = round(2R/Δ)` cells per axis, centers at `−R + (k + ½)Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub modes: usize,
    pub spacing: f64,
    pub extent: f64,
}

impl GridSpec {
    pub fn new(modes: usize, spacing: f64, extent: f64) -> Result<Self> {
        if !(1..=2).contains(&modes) {
            return Err(Error::InvalidParameter(format!("grids support 1 or 2 modes, got {modes}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::GridTooSmall(format!("spacing {spacing}")));
        }
        if !(extent >= spacing) || !extent.is_finite() {
            return Err(Error::GridTooSmall(format!("extent {extent} with spacing {spacing}")));
        }
        Ok(Self { modes, spacing, extent })
    }

    /// Default lattice for a state: `R = 1 + 4(1 + √⟨n⟩max)`, `Δ = 0.1`
    /// (one mode) or `0.25` (two modes).
    pub fn for_state(rho: &DensityMatrix) -> Result<Self> {
        let mut nmax = 0.0f64;
        for mode in 0..rho.modes() {
            nmax = nmax.max(fock::mean_photon_number(rho, mode)?);
        }
        let spacing = if rho.modes() == 1 { 0.1 } else { 0.25 };
        Self::new(rho.modes(), spacing, 1.0 + 4.0 * (1.0 + nmax.max(0.0).sqrt()))
    }

    pub fn with_spacing(&self, spacing: f64) -> Result<Self> {
        Self::new(self.modes, spacing, self.extent)
    }

    pub fn axis_len(&self) -> usize {
        ((2.0 * self.extent / self.spacing).round() as usize).max(1)
    }

    pub fn axis(&self) -> Vec<f64> {
        let n = self.axis_len();
        let half = 0.5 * n as f64 * self.spacing;
        (0..n).map(|k| -half + (k as f64 + 0.5) * self.spacing).collect()
    }

    /// Single-mode lattice points, real part outer and imaginary part inner.
    pub fn mode_points(&self) -> Vec<Complex64> {
        let axis = self.axis();
        let mut pts = Vec::with_capacity(axis.len() * axis.len());
        for &re in &axis {
            for &im in &axis {
                pts.push(Complex64::new(re, im));
            }
        }
        pts
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(2 * self.modes as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Δ^{2m}`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(2 * self.modes as i32)
    }

    /// Phase-space point of a flat index (first mode most significant).
    pub fn point(&self, index: usize) -> Vec<Complex64> {
        let axis = self.axis();
        let per_mode = axis.len() * axis.len();
        let mut out = Vec::with_capacity(self.modes);
        let mut rem = index;
        let mut digits = vec![0; self.modes];
        for m in (0..self.modes).rev() {
            digits[m] = rem % per_mode;
            rem /= per_mode;
        }
        for d in digits {
            out.push(Complex64::new(axis[d / axis.len()], axis[d % axis.len()]));
        }
        out
    }
}

/// Samples of one phase-space function on a [`GridSpec`] lattice.
#[derive(Debug, Clone)]
pub struct PhaseSpaceGrid {
    pub spec: GridSpec,
    pub kind: GridKind,
    pub values: Vec<Complex64>,
}

impl PhaseSpaceGrid {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// `Σ values · Δ^{2m}` in index order.
    pub fn riemann_sum(&self) -> Complex64 {
        let mut s = C0;
        for v in &self.values {
            s += v;
        }
        s * self.spec.cell_volume()
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// CSV with `re_alpha, im_alpha, value` columns (numbered per mode for two
    /// modes); characteristic functions get `value_re, value_im`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = Vec::new();
        for m in 0..self.spec.modes {
            let suffix = if self.spec.modes == 1 { String::new() } else { (m + 1).to_string() };
            header.push(format!("re_alpha{suffix}"));
            header.push(format!("im_alpha{suffix}"));
        }
        if self.kind.is_characteristic() {
            header.push("value_re".into());
            header.push("value_im".into());
        } else {
            header.push("value".into());
        }
        w.write_record(&header).map_err(csv_err)?;
        for (i, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = Vec::with_capacity(header.len());
            for a in self.spec.point(i) {
                rec.push(format!("{:.11e}", a.re));
                rec.push(format!("{:.11e}", a.im));
            }
            rec.push(format!("{:.11e}", v.re));
            if self.kind.is_characteristic() {
                rec.push(format!("{:.11e}", v.im));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Largest reliable `|μ|²` for a mode of dimension `dim`.
pub fn reliable_modulus_sq(dim: usize, ordering: Ordering) -> f64 {
    match ordering {
        Ordering::Antinormal => (dim as f64).min(ANTINORMAL_MAX_MODULUS_SQ),
        _ => dim as f64,
    }
}

/// `ln(|μ|^e)` with `0^0 = 1`.
fn ln_pow(ln_mod: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * ln_mod
    }
}

/// Truncated `⟨m|e^{−μa†}|n⟩` (lower triangular).
fn creation_exponential(mu: Complex64, d: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(d, d, C0);
    let ln_mod = mu.norm().ln();
    let phase = -mu / mu.norm();
    for n in 0..d {
        out[(n, n)] = Complex64::new(1.0, 0.0);
        if mu == C0 {
            continue;
        }
        for k in n + 1..d {
            let e = k - n;
            let mag = (ln_pow(ln_mod, e) - linalg::ln_factorial(e)
                + 0.5 * (linalg::ln_factorial(k) - linalg::ln_factorial(n)))
            .exp();
            out[(k, n)] = phase.powu(e as u32) * mag;
        }
    }
    out
}

/// Exact `⟨m|O|n⟩` on `m, n < d` for the ordered exponential of one mode.
fn ordered_exponential(mu: Complex64, d: usize, ordering: Ordering) -> DMatrix<Complex64> {
    match ordering {
        Ordering::Symmetric => fock::displacement_matrix(-mu, d, d),
        // e^{−μa†} e^{μ*a}: the intermediate level never exceeds min(m, n)
        Ordering::Normal => {
            let lower = creation_exponential(mu, d);
            let upper = creation_exponential(-mu, d).adjoint();
            lower * upper
        }
        Ordering::Antinormal => antinormal_exponential(mu, d),
    }
}

/// `⟨m|e^{μ*a} e^{−μa†}|n⟩ = e^{iθ(m−n)} Σ_{k≥max(m,n)} (−1)^{k−n} |μ|^{2k−m−n} k! / ((k−m)!(k−n)!√(m!n!))`.
fn antinormal_exponential(mu: Complex64, d: usize) -> DMatrix<Complex64> {
    if mu == C0 {
        return DMatrix::identity(d, d);
    }
    let x = mu.norm_sqr();
    let ln_mod = mu.norm().ln();
    let theta = mu.arg();
    let mut out = DMatrix::from_element(d, d, C0);
    for m in 0..d {
        for n in 0..d {
            let base = -0.5 * (linalg::ln_factorial(m) + linalg::ln_factorial(n));
            let mut sum = 0.0;
            let mut largest = f64::NEG_INFINITY;
            let mut k = m.max(n);
            loop {
                let ln_term = base + ln_pow(ln_mod, 2 * k - m - n) + linalg::ln_factorial(k)
                    - linalg::ln_factorial(k - m)
                    - linalg::ln_factorial(k - n);
                largest = largest.max(ln_term);
                let sign = if (k - n) % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * ln_term.exp();
                if k as f64 > x && ln_term < largest - 40.0 {
                    break;
                }
                k += 1;
            }
            out[(m, n)] = Complex64::from_polar(sum, theta * (m as f64 - n as f64));
        }
    }
    out
}

/// `χ(μ) = tr ρ O(μ)` with `O = e^{−μa†}e^{μ*a}` (N), `e^{μ*a}e^{−μa†}` (A) or
/// `D(−μ)` (W), one argument per mode.
pub fn char_func(rho: &DensityMatrix, mu: &[Complex64], ordering: Ordering) -> Result<Complex64> {
    if mu.len() != rho.modes() {
        return Err(Error::InvalidParameter(format!(
            "{} arguments for a {}-mode state",
            mu.len(),
            rho.modes()
        )));
    }
    for (&m, &d) in mu.iter().zip(rho.dims()) {
        let limit = reliable_modulus_sq(d, ordering);
        if !(m.norm_sqr() <= limit) {
            return Err(Error::ArgumentOutOfReliableRange { modulus: m.norm(), limit: limit.sqrt() });
        }
    }
    let ops: Vec<DMatrix<Complex64>> = mu
        .iter()
        .zip(rho.dims())
        .map(|(&m, &d)| ordered_exponential(m, d, ordering))
        .collect();
    let pairs: Vec<(usize, &DMatrix<Complex64>)> = ops.iter().enumerate().collect();
    rho.expect_local(&pairs)
}

/// Characteristic function sampled on a lattice of `μ` values.
pub fn char_grid(rho: &DensityMatrix, spec: &GridSpec, ordering: Ordering) -> Result<PhaseSpaceGrid> {
    check_grid_modes(rho, spec)?;
    let pts = spec.mode_points();
    let corner = pts.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max);
    for &d in rho.dims() {
        let limit = reliable_modulus_sq(d, ordering);
        if corner > limit {
            return Err(Error::ArgumentOutOfReliableRange { modulus: corner.sqrt(), limit: limit.sqrt() });
        }
    }
    let values = evaluate(rho, spec, &vec![pts; rho.modes()], |d, mu| {
        ordered_exponential(mu, d, ordering)
    });
    Ok(PhaseSpaceGrid { spec: *spec, kind: ordering.into(), values })
}

fn check_grid_modes(rho: &DensityMatrix, spec: &GridSpec) -> Result<()> {
    if spec.modes != rho.modes() {
        return Err(Error::InvalidParameter(format!(
            "{}-mode grid for a {}-mode state",
            spec.modes,
            rho.modes()
        )));
    }
    Ok(())
}

/// `tr[ρ (O₁(α₁) ⊗ O₂(α₂))]` over all lattice points.
///
/// Two-mode grids contract the first mode once per `α₁` and then evaluate all
/// `α₂` with one matrix-vector product.
fn evaluate<F>(rho: &DensityMatrix, spec: &GridSpec, points: &[Vec<Complex64>], op: F) -> Vec<Complex64>
where
    F: Fn(usize, Complex64) -> DMatrix<Complex64>,
{
    let dims = rho.dims();
    let x = rho.data();
    if spec.modes == 1 {
        let d = dims[0];
        return points[0]
            .iter()
            .map(|&a| {
                let o = op(d, a);
                let mut s = C0;
                for i in 0..d {
                    for j in 0..d {
                        s += x[(i, j)] * o[(j, i)];
                    }
                }
                s
            })
            .collect();
    }
    let (d1, d2) = (dims[0], dims[1]);
    // row k holds O₂(α₂ₖ)ᵀ flattened so that the value is a plain dot product
    let mut second = DMatrix::from_element(points[1].len(), d2 * d2, C0);
    for (k, &a) in points[1].iter().enumerate() {
        let o = op(d2, a);
        for r in 0..d2 {
            for c in 0..d2 {
                second[(k, r * d2 + c)] = o[(c, r)];
            }
        }
    }
    let mut values = Vec::with_capacity(points[0].len() * points[1].len());
    let mut reduced = DVector::from_element(d2 * d2, C0);
    for &a in &points[0] {
        let o1 = op(d1, a);
        let mut n = DMatrix::from_element(d2, d2, C0);
        for i in 0..d1 {
            for ip in 0..d1 {
                let c = o1[(i, ip)];
                if c == C0 {
                    continue;
                }
                n += x.view((ip * d2, i * d2), (d2, d2)) * c;
            }
        }
        for r in 0..d2 {
            for c in 0..d2 {
                reduced[r * d2 + c] = n[(r, c)];
            }
        }
        values.extend((&second * &reduced).iter().copied());
    }
    values
}

fn coherent_outer(alpha: Complex64, d: usize, scale: f64) -> DMatrix<Complex64> {
    let v = fock::coherent_amplitudes(alpha, d);
    DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() * scale)
}

fn q_values(rho: &DensityMatrix, spec: &GridSpec, points: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut values = evaluate(rho, spec, points, |d, a| coherent_outer(a, d, 1.0 / PI));
    for v in &mut values {
        *v = Complex64::new(v.re, 0.0);
    }
    values
}

fn check_density(grid: &PhaseSpaceGrid, expected: f64) -> Result<()> {
    let total = grid.riemann_sum().re;
    if (total - expected).abs() > GRID_TOLERANCE {
        return Err(Error::GridTooSmall(format!(
            "{} integrates to {total:.8} instead of {expected:.8} (R = {}, Δ = {})",
            grid.kind, grid.spec.extent, grid.spec.spacing
        )));
    }
    Ok(())
}

/// `Q(α) = ⟨α|ρ|α⟩/π`.
pub fn q_function(rho: &DensityMatrix, spec: &GridSpec) -> Result<PhaseSpaceGrid> {
    check_grid_modes(rho, spec)?;
    let pts = vec![spec.mode_points(); spec.modes];
    let grid = PhaseSpaceGrid { spec: *spec, kind: GridKind::Q, values: q_values(rho, spec, &pts) };
    check_density(&grid, rho.trace())?;
    Ok(grid)
}

/// `W(α) = (2/π) tr[ρ D(α) Π D(α)†] = (2/π) tr[ρ D(2α) Π]`.
pub fn wigner_function(rho: &DensityMatrix, spec: &GridSpec) -> Result<PhaseSpaceGrid> {
    check_grid_modes(rho, spec)?;
    let pts = vec![spec.mode_points(); spec.modes];
    let mut values = evaluate(rho, spec, &pts, |d, a| {
        let mut o = fock::displacement_matrix(2.0 * a, d, d);
        for n in (1..d).step_by(2) {
            o.column_mut(n).neg_mut();
        }
        o * Complex64::new(2.0 / PI, 0.0)
    });
    for v in &mut values {
        *v = Complex64::new(v.re, 0.0);
    }
    let grid = PhaseSpaceGrid { spec: *spec, kind: GridKind::W, values };
    check_density(&grid, rho.trace())?;
    Ok(grid)
}

/// `W(α) = (1/π²) ∫ χ_W(μ) e^{α*μ − αμ*} d²μ` by Riemann sum over a single-mode `χ_W` grid.
pub fn wigner_from_char(chi: &PhaseSpaceGrid, alpha: Complex64) -> Result<f64> {
    if chi.kind != GridKind::ChiW || chi.spec.modes != 1 {
        return Err(Error::InvalidParameter("expected a single-mode chi_W grid".into()));
    }
    let mut s = C0;
    for (mu, v) in chi.spec.mode_points().iter().zip(&chi.values) {
        let arg = alpha.conj() * mu - alpha * mu.conj();
        s += v * arg.exp();
    }
    Ok((s * chi.spec.cell_volume() / (PI * PI)).re)
}

/// `ρ = Σ P(α) Δ^{2m} |α⟩⟨α|` for a nonnegative, normalized P sample.
pub fn state_from_p(p: &PhaseSpaceGrid, cutoff: &FockCutoff) -> Result<DensityMatrix> {
    if p.spec.modes != cutoff.modes() {
        return Err(Error::InvalidParameter(format!(
            "{}-mode grid for a {}-mode cutoff",
            p.spec.modes,
            cutoff.modes()
        )));
    }
    if let Some((index, v)) = p.values.iter().enumerate().find(|(_, v)| v.re < -NEGATIVITY_TOL) {
        return Err(Error::NegativePFunction { index, value: v.re });
    }
    check_density(p, 1.0)?;
    let pts = p.spec.mode_points();
    let vol = p.spec.cell_volume();
    let coherent = |d: usize| {
        let mut v = DMatrix::from_element(d, pts.len(), C0);
        for (k, &a) in pts.iter().enumerate() {
            v.column_mut(k).copy_from_slice(&fock::coherent_amplitudes(a, d));
        }
        v
    };
    let weighted = |v: &DMatrix<Complex64>, w: &[Complex64]| {
        let mut vw = v.clone();
        for (k, &wk) in w.iter().enumerate() {
            vw.column_mut(k).scale_mut(wk.re.max(0.0));
        }
        linalg::matmul_adjoint(&vw, v)
    };
    let dims = cutoff.dims();
    let data = if p.spec.modes == 1 {
        weighted(&coherent(dims[0]), &p.values) * Complex64::new(vol, 0.0)
    } else {
        let (d1, d2) = (dims[0], dims[1]);
        let v1 = coherent(d1);
        let v2 = coherent(d2);
        let n2 = pts.len();
        let mut out = DMatrix::from_element(d1 * d2, d1 * d2, C0);
        for k1 in 0..pts.len() {
            let m = weighted(&v2, &p.values[k1 * n2..(k1 + 1) * n2]) * Complex64::new(vol, 0.0);
            let a = v1.column(k1);
            for i in 0..d1 {
                for j in 0..d1 {
                    let c = a[i] * a[j].conj();
                    let mut block = out.view_mut((i * d2, j * d2), (d2, d2));
                    block += &m * c;
                }
            }
        }
        out
    };
    Ok(DensityMatrix::from_parts(linalg::hermitize(&data), cutoff.clone()))
}

/// P-function of `G_κ L_κ ρ`: `(∏ 1/κᵢ) Q_ρ(α₁/√κ₁, …)`.
pub fn theorem1_p_output(rho: &DensityMatrix, kappa: &[f64], spec: &GridSpec) -> Result<PhaseSpaceGrid> {
    check_grid_modes(rho, spec)?;
    if kappa.len() != rho.modes() {
        return Err(Error::InvalidParameter(format!(
            "{} transmittances for a {}-mode state",
            kappa.len(),
            rho.modes()
        )));
    }
    for &k in kappa {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::InvalidTransmittance(k));
        }
    }
    let base = spec.mode_points();
    let pts: Vec<Vec<Complex64>> = kappa
        .iter()
        .map(|&k| base.iter().map(|a| a / k.sqrt()).collect())
        .collect();
    let jac: f64 = kappa.iter().map(|k| 1.0 / k).product();
    let values = q_values(rho, spec, &pts).into_iter().map(|v| v * jac).collect();
    Ok(PhaseSpaceGrid { spec: *spec, kind: GridKind::P, values })
}

/// `G₁ ρ`, the classical state whose P-function is the Q-function of `ρ`.
pub fn classical_counterpart(rho: &DensityMatrix) -> Result<DensityMatrix> {
    channels::apply_agn(rho, &vec![1.0; rho.modes()])
}

/// Outcome of a spacing-refinement run.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub spacing: f64,
    pub distance: f64,
    /// `(spacing, trace distance to the target)` per refinement step.
    pub history: Vec<(f64, f64)>,
}

/// Halves the spacing until the trace distance between `build(spec)` and
/// `target` changes by less than 10% (or drops below `floor`), at most
/// `max_halvings` times.
pub fn refine_spacing<F>(
    spec: &GridSpec,
    target: &DensityMatrix,
    build: F,
    max_halvings: usize,
    floor: f64,
) -> Result<Convergence>
where
    F: Fn(&GridSpec) -> Result<DensityMatrix>,
{
    let distance = |s: &GridSpec| -> Result<f64> {
        let rho = build(s)?;
        if rho.dims() != target.dims() {
            return Err(Error::CutoffMismatch(rho.dims().to_vec(), target.dims().to_vec()));
        }
        Ok(linalg::hermitian_trace_norm(&(rho.data() - target.data())))
    };
    let mut current = *spec;
    let mut d = distance(&current)?;
    let mut history = vec![(current.spacing, d)];
    for _ in 0..max_halvings {
        if d < floor {
            break;
        }
        let next = current.with_spacing(current.spacing / 2.0)?;
        let dn = distance(&next)?;
        history.push((next.spacing, dn));
        let settled = (dn - d).abs() < 0.1 * d;
        current = next;
        d = dn;
        if settled {
            break;
        }
    }
    Ok(Convergence { spacing: current.spacing, distance: d, history })
}
