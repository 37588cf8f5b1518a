//! Trace distances and the distinguishability bounds for classical states
//! under additive Gaussian noise.
//!
//! Trace distance is `‖ρ₁ − ρ₂‖₁` without the factor `1/2`, so it ranges over
//! `[0, 2]`. Measured values always come from an eigendecomposition of the
//! difference of channel outputs, while bounds are closed-form expressions; the
//! two paths share no code.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels;
use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, FockCutoff};
use crate::linalg;
use crate::phase_space::{self, PhaseSpaceGrid};

/// A measured value within this of its bound counts as dominated.
pub const DOMINANCE_SLACK: f64 = 1e-9;
/// Smallest noise variance accepted as a denominator in the difference bounds.
pub const MIN_DENOMINATOR: f64 = 1e-6;
/// Tolerance for `0 ⪯ X ⪯ I` on POVM elements.
pub const POVM_TOL: f64 = 1e-10;

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::CutoffMismatch(a.dims().to_vec(), b.dims().to_vec()));
    }
    Ok(linalg::hermitian_trace_norm(&(a.data() - b.data())))
}

fn check_noise(n: f64) -> Result<()> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::InvalidNoiseVariance(n));
    }
    Ok(())
}

/// Product coherent vector `⊗ᵢ |αᵢ⟩` truncated to `dims`.
fn coherent_vector(alpha: &[Complex64], dims: &[usize]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for (&a, &d) in alpha.iter().zip(dims) {
        let amps = fock::coherent_amplitudes(a, d);
        v = v.iter().flat_map(|x| amps.iter().map(move |y| x * y)).collect();
    }
    v
}

/// `2[1 − ⟨α|ρ′|α⟩]^{1/2}`.
pub fn uhlmann_bound(alpha: &[Complex64], rho_prime: &DensityMatrix) -> Result<f64> {
    if alpha.len() != rho_prime.modes() {
        return Err(Error::InvalidParameter(format!(
            "{} amplitudes for a {}-mode state",
            alpha.len(),
            rho_prime.modes()
        )));
    }
    let v = coherent_vector(alpha, rho_prime.dims());
    let x = rho_prime.data();
    let mut overlap = Complex64::new(0.0, 0.0);
    for i in 0..v.len() {
        for j in 0..v.len() {
            overlap += v[i].conj() * x[(i, j)] * v[j];
        }
    }
    Ok(2.0 * (1.0 - overlap.re).max(0.0).sqrt())
}

/// `2[N/(N+1)]^{1/2}`.
pub fn bound_theorem2(noise: f64) -> Result<f64> {
    check_noise(noise)?;
    Ok(2.0 * (noise / (noise + 1.0)).sqrt())
}

/// `2(N₁ − N₂)/N₂` for `N₁ ≥ N₂ ≥ 10⁻⁶`.
pub fn bound_theorem3(n1: f64, n2: f64) -> Result<f64> {
    check_noise(n1)?;
    check_noise(n2)?;
    if n1 < n2 {
        return Err(Error::InvalidOrdering(format!("N1 = {n1} < N2 = {n2}")));
    }
    if n2 < MIN_DENOMINATOR {
        return Err(Error::DegenerateDenominator(n2));
    }
    Ok(2.0 * (n1 - n2) / n2)
}

/// How the indices of the two-mode difference bound are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem4Reading {
    /// Literal subscripts: differences between the two modes of each vector.
    Printed,
    /// Per-mode differences `Nᵃᵢ − Nᵇᵢ` over `Nᵇᵢ`, consistent with the one-mode bound.
    #[default]
    #[serde(alias = "permode")]
    PerMode,
}

impl FromStr for Theorem4Reading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Theorem4Reading::Printed),
            "permode" | "per_mode" => Ok(Theorem4Reading::PerMode),
            other => Err(Error::InvalidParameter(format!("unknown reading {other:?}"))),
        }
    }
}

impl fmt::Display for Theorem4Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem4Reading::Printed => "printed",
            Theorem4Reading::PerMode => "permode",
        })
    }
}

/// `num/den`, where a zero numerator contributes nothing even if `den` vanishes.
fn ratio(num: f64, den: f64) -> Result<f64> {
    if num == 0.0 {
        return Ok(0.0);
    }
    if den < MIN_DENOMINATOR {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// Two-mode bound `2[u + v + 2uv]` on `‖(G_{Nᵃ} − G_{Nᵇ})ρ‖₁` with `Nᵃ ≥ Nᵇ`.
///
/// Per mode, `u = (Nᵃ₁ − Nᵇ₁)/Nᵇ₁` and `v = (Nᵃ₂ − Nᵇ₂)/Nᵇ₂`. The printed
/// reading uses `u = (Nᵃ₁ − Nᵃ₂)/Nᵃ₂` and `v = (Nᵇ₁ − Nᵇ₂)/Nᵇ₂`; it can be
/// negative and is returned as is.
pub fn bound_theorem4(na: [f64; 2], nb: [f64; 2], reading: Theorem4Reading) -> Result<f64> {
    for &n in na.iter().chain(&nb) {
        check_noise(n)?;
    }
    if na[0] < nb[0] || na[1] < nb[1] {
        return Err(Error::InvalidOrdering(format!("Na = {na:?} is not componentwise >= Nb = {nb:?}")));
    }
    let ((un, ud), (vn, vd)) = match reading {
        Theorem4Reading::PerMode => ((na[0] - nb[0], nb[0]), (na[1] - nb[1], nb[1])),
        Theorem4Reading::Printed => ((na[0] - na[1], na[1]), (nb[0] - nb[1], nb[1])),
    };
    let u = ratio(un, ud)?;
    let v = ratio(vn, vd)?;
    let cross = ratio(un * vn, ud * vd)?;
    Ok(2.0 * (u + v + 2.0 * cross))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem5Bound {
    pub value: f64,
    /// The value exceeds 2, the largest possible trace distance.
    pub vacuous: bool,
}

/// `2 Σᵢ [Nᵢ/(Nᵢ+1)]^{1/2}`.
pub fn bound_theorem5(noise: &[f64]) -> Result<Theorem5Bound> {
    let mut sum = 0.0;
    for &n in noise {
        check_noise(n)?;
        sum += (n / (n + 1.0)).sqrt();
    }
    let value = 2.0 * sum;
    Ok(Theorem5Bound { value, vacuous: value > 2.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Theorem2,
    Theorem3,
    Theorem4Printed,
    Theorem4Permode,
    Theorem5,
    Uhlmann,
    Lemma3,
    Lemma4,
    /// The tensor bound with operator-norm factors, which fails for mixed states.
    Lemma4Operator,
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        f.write_str(s.as_str().expect("string tag"))
    }
}

/// A bound paired with the exactly measured quantity it should dominate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub params: IndexMap<String, f64>,
    pub bound_value: f64,
    pub measured_value: Option<f64>,
    /// `bound − measured`, or the bound itself when nothing was measured.
    pub margin: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(
        bound_name: BoundName,
        params: IndexMap<String, f64>,
        bound_value: f64,
        measured_value: Option<f64>,
    ) -> Self {
        let (margin, satisfied) = match measured_value {
            Some(m) => (bound_value - m, m <= bound_value + DOMINANCE_SLACK),
            None => (bound_value, true),
        };
        Self { bound_name, params, bound_value, measured_value, margin, satisfied }
    }
}

fn params<const K: usize>(pairs: [(&str, f64); K]) -> IndexMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// CSV rows `bound_name, <params…>, bound, measured, margin, satisfied`, with
/// parameter columns in order of first appearance.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], writer: W) -> Result<()> {
    let mut keys: Vec<&str> = Vec::new();
    for r in reports {
        for k in r.params.keys() {
            if !keys.contains(&k.as_str()) {
                keys.push(k);
            }
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["bound_name"];
    header.extend(&keys);
    header.extend(["bound", "measured", "margin", "satisfied"]);
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for r in reports {
        let mut rec = vec![r.bound_name.to_string()];
        for k in &keys {
            rec.push(r.params.get(*k).map_or(String::new(), |v| format!("{v:.11e}")));
        }
        rec.push(format!("{:.11e}", r.bound_value));
        rec.push(r.measured_value.map_or(String::new(), |v| format!("{v:.11e}")));
        rec.push(format!("{:.11e}", r.margin));
        rec.push(r.satisfied.to_string());
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `|tr ρ₁X − tr ρ₂X|` against `‖ρ₁ − ρ₂‖₁` for a POVM element `0 ⪯ X ⪯ I`.
pub fn lemma3_probability_gap(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    povm_element: &DMatrix<Complex64>,
) -> Result<BoundReport> {
    let bound = trace_distance(rho1, rho2)?;
    let n = rho1.dim();
    if povm_element.nrows() != n || povm_element.ncols() != n {
        return Err(Error::InvalidPovmElement(format!(
            "{}x{} element for dimension {n}",
            povm_element.nrows(),
            povm_element.ncols()
        )));
    }
    let herm = linalg::hermiticity_defect(povm_element);
    if herm > POVM_TOL {
        return Err(Error::InvalidPovmElement(format!("hermiticity defect {herm:e}")));
    }
    let ev = linalg::hermitian_eigenvalues(povm_element);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo < -POVM_TOL || hi > 1.0 + POVM_TOL {
        return Err(Error::InvalidPovmElement(format!("spectrum [{lo:e}, {hi}] outside [0, 1]")));
    }
    let gap = ((rho1.data() * povm_element).trace() - (rho2.data() * povm_element).trace()).norm();
    Ok(BoundReport::new(BoundName::Lemma3, IndexMap::new(), bound, Some(gap)))
}

fn check_same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::CutoffMismatch(a.dims().to_vec(), b.dims().to_vec()));
    }
    Ok(())
}

/// `‖A⊗B − C⊗D‖₁ ≤ ‖B‖₁‖A − C‖₁ + ‖C‖₁‖B − D‖₁`.
///
/// This follows from `A⊗B − C⊗D = (A − C)⊗B + C⊗(B − D)` and
/// `‖X⊗Y‖₁ = ‖X‖₁‖Y‖₁`. With operator norms in place of `‖B‖₁`, `‖C‖₁` the
/// inequality agrees for pure states but can fail for mixed ones; that variant
/// is available from [`lemma4_operator_norm_bound`].
pub fn lemma4_tensor_bound(
    a: &DensityMatrix,
    b: &DensityMatrix,
    c: &DensityMatrix,
    d: &DensityMatrix,
) -> Result<BoundReport> {
    lemma4_with(a, b, c, d, BoundName::Lemma4, linalg::hermitian_trace_norm)
}

/// The tensor bound with operator-norm factors `‖B‖`, `‖C‖`.
pub fn lemma4_operator_norm_bound(
    a: &DensityMatrix,
    b: &DensityMatrix,
    c: &DensityMatrix,
    d: &DensityMatrix,
) -> Result<BoundReport> {
    lemma4_with(a, b, c, d, BoundName::Lemma4Operator, linalg::operator_norm)
}

fn lemma4_with(
    a: &DensityMatrix,
    b: &DensityMatrix,
    c: &DensityMatrix,
    d: &DensityMatrix,
    name: BoundName,
    factor_norm: fn(&DMatrix<Complex64>) -> f64,
) -> Result<BoundReport> {
    check_same_dims(a, c)?;
    check_same_dims(b, d)?;
    let lhs = a.data().kronecker(b.data()) - c.data().kronecker(d.data());
    let measured = linalg::hermitian_trace_norm(&lhs);
    let ac = linalg::hermitian_trace_norm(&(a.data() - c.data()));
    let bd = linalg::hermitian_trace_norm(&(b.data() - d.data()));
    let bound = factor_norm(b.data()) * ac + factor_norm(c.data()) * bd;
    Ok(BoundReport::new(name, IndexMap::new(), bound, Some(measured)))
}

/// How a [`ClassicalState`] was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Coherent(Vec<Complex64>),
    Thermal(Vec<f64>),
    /// Mixture of coherent projectors from a nonnegative P-function sample.
    PMixture,
    /// `G₁ρ`, which has P-function `Q_ρ`.
    AgnCounterpart,
    Product,
}

/// A state known to be classical from how it was built.
#[derive(Debug, Clone)]
pub struct ClassicalState {
    rho: DensityMatrix,
    provenance: Provenance,
}

impl ClassicalState {
    pub fn coherent(alpha: &[Complex64], cutoff: &FockCutoff) -> Result<Self> {
        let rho = product(alpha.len(), cutoff, |i, c| fock::coherent_state(alpha[i], c))?;
        Ok(Self { rho, provenance: Provenance::Coherent(alpha.to_vec()) })
    }

    pub fn thermal(means: &[f64], cutoff: &FockCutoff) -> Result<Self> {
        let rho = product(means.len(), cutoff, |i, c| fock::thermal_state(means[i], c))?;
        Ok(Self { rho, provenance: Provenance::Thermal(means.to_vec()) })
    }

    pub fn from_p(p: &PhaseSpaceGrid, cutoff: &FockCutoff) -> Result<Self> {
        Ok(Self { rho: phase_space::state_from_p(p, cutoff)?, provenance: Provenance::PMixture })
    }

    pub fn counterpart_of(rho: &DensityMatrix) -> Result<Self> {
        Ok(Self { rho: phase_space::classical_counterpart(rho)?, provenance: Provenance::AgnCounterpart })
    }

    pub fn tensor(&self, other: &ClassicalState) -> Result<Self> {
        let provenance = match (&self.provenance, &other.provenance) {
            (Provenance::Coherent(a), Provenance::Coherent(b)) => {
                Provenance::Coherent(a.iter().chain(b).copied().collect())
            }
            (Provenance::Thermal(a), Provenance::Thermal(b)) => {
                Provenance::Thermal(a.iter().chain(b).copied().collect())
            }
            _ => Provenance::Product,
        };
        Ok(Self { rho: fock::tensor(&self.rho, &other.rho)?, provenance })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

fn product<F>(modes: usize, cutoff: &FockCutoff, make: F) -> Result<DensityMatrix>
where
    F: Fn(usize, &FockCutoff) -> Result<DensityMatrix>,
{
    if modes != cutoff.modes() || modes == 0 {
        return Err(Error::InvalidParameter(format!(
            "{modes} parameters for a {}-mode cutoff",
            cutoff.modes()
        )));
    }
    let mut rho = make(0, &FockCutoff::single(cutoff.dims()[0])?)?;
    for i in 1..modes {
        let next = make(i, &FockCutoff::single(cutoff.dims()[i])?)?;
        rho = fock::tensor(&rho, &next)?;
    }
    if rho.dim() > cutoff.max_total() {
        return Err(Error::DimensionOverflow { total: rho.dim(), max: cutoff.max_total() });
    }
    Ok(rho)
}

/// Parameter grid for [`dominance_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// `‖ρ − G_N ρ‖₁`, single mode.
    Theorem2 { noise: Vec<f64> },
    /// `‖G_{N₁}ρ − G_{N₂}ρ‖₁`, single mode.
    Theorem3 { pairs: Vec<(f64, f64)> },
    /// `‖G_{Nᵃ}ρ − G_{Nᵇ}ρ‖₁`, two modes.
    Theorem4 { pairs: Vec<([f64; 2], [f64; 2])>, reading: Theorem4Reading },
    /// `‖ρ − G_N ρ‖₁` with per-mode variances.
    Theorem5 { noise: Vec<Vec<f64>> },
    /// Coherent `ρ` only: `‖ρ − G_N ρ‖₁` against the fidelity bound.
    Uhlmann { noise: Vec<f64> },
}

fn require_modes(state: &ClassicalState, modes: usize, what: &str) -> Result<()> {
    if state.rho.modes() != modes {
        return Err(Error::InvalidParameter(format!(
            "{what} needs a {modes}-mode state, got {}",
            state.rho.modes()
        )));
    }
    Ok(())
}

/// Exact trace distance and bound at every point of `sweep`.
pub fn dominance_sweep(state: &ClassicalState, sweep: &Sweep) -> Result<Vec<BoundReport>> {
    let rho = &state.rho;
    let mut out = Vec::new();
    match sweep {
        Sweep::Theorem2 { noise } => {
            require_modes(state, 1, "theorem2")?;
            for &n in noise {
                let bound = bound_theorem2(n)?;
                let measured = trace_distance(rho, &channels::apply_agn(rho, &[n])?)?;
                out.push(BoundReport::new(BoundName::Theorem2, params([("N", n)]), bound, Some(measured)));
            }
        }
        Sweep::Theorem3 { pairs } => {
            require_modes(state, 1, "theorem3")?;
            for &(n1, n2) in pairs {
                let bound = bound_theorem3(n1, n2)?;
                let measured =
                    trace_distance(&channels::apply_agn(rho, &[n1])?, &channels::apply_agn(rho, &[n2])?)?;
                out.push(BoundReport::new(
                    BoundName::Theorem3,
                    params([("N1", n1), ("N2", n2)]),
                    bound,
                    Some(measured),
                ));
            }
        }
        Sweep::Theorem4 { pairs, reading } => {
            require_modes(state, 2, "theorem4")?;
            let name = match reading {
                Theorem4Reading::Printed => BoundName::Theorem4Printed,
                Theorem4Reading::PerMode => BoundName::Theorem4Permode,
            };
            for &(na, nb) in pairs {
                let bound = bound_theorem4(na, nb, *reading)?;
                let measured =
                    trace_distance(&channels::apply_agn(rho, &na)?, &channels::apply_agn(rho, &nb)?)?;
                out.push(BoundReport::new(
                    name,
                    params([("Na1", na[0]), ("Na2", na[1]), ("Nb1", nb[0]), ("Nb2", nb[1])]),
                    bound,
                    Some(measured),
                ));
            }
        }
        Sweep::Theorem5 { noise } => {
            for n in noise {
                if n.len() != rho.modes() {
                    return Err(Error::InvalidParameter(format!(
                        "{} variances for a {}-mode state",
                        n.len(),
                        rho.modes()
                    )));
                }
                let bound = bound_theorem5(n)?;
                let measured = trace_distance(rho, &channels::apply_agn(rho, n)?)?;
                let p = n.iter().enumerate().map(|(i, &v)| (format!("N{}", i + 1), v)).collect();
                out.push(BoundReport::new(BoundName::Theorem5, p, bound.value, Some(measured)));
            }
        }
        Sweep::Uhlmann { noise } => {
            let Provenance::Coherent(alpha) = &state.provenance else {
                return Err(Error::InvalidParameter("the fidelity bound needs a coherent state".into()));
            };
            for &n in noise {
                let noisy = channels::apply_agn(rho, &vec![n; rho.modes()])?;
                let bound = uhlmann_bound(alpha, &noisy)?;
                let measured = trace_distance(rho, &noisy)?;
                out.push(BoundReport::new(BoundName::Uhlmann, params([("N", n)]), bound, Some(measured)));
            }
        }
    }
    Ok(out)
}
