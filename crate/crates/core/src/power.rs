//! Signal power needed for a given photon number per mode: `P = ħω₀ N_S W`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier {
    /// Vacuum wavelength in metres.
    Wavelength(f64),
    /// Angular frequency in rad/s.
    AngularFrequency(f64),
}

impl Carrier {
    pub fn omega(self) -> Result<f64> {
        let omega = match self {
            Carrier::Wavelength(l) => {
                positive(l, "wavelength")?;
                2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / l
            }
            Carrier::AngularFrequency(w) => w,
        };
        positive(omega, "carrier angular frequency")?;
        Ok(omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerResult {
    pub ns: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    pub omega0: f64,
    pub power_watts: f64,
    pub power_dbm: f64,
    /// `N_S · W`.
    pub photons_per_second: f64,
    pub nmax: Option<f64>,
    pub pmax: Option<f64>,
    /// `N_S ≤ N_max` or `P_S ≤ P_max`; absent when no threshold is given.
    pub constraint_met: Option<bool>,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {x}")));
    }
    Ok(())
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Photon flux `P/(ħω₀)` carried by `watts` of power.
pub fn photons_per_second(watts: f64, carrier: Carrier) -> Result<f64> {
    positive(watts, "power")?;
    Ok(watts / (HBAR * carrier.omega()?))
}

pub fn power_calc(
    ns: f64,
    carrier: Carrier,
    bandwidth: f64,
    nmax: Option<f64>,
    pmax: Option<f64>,
) -> Result<PowerResult> {
    positive(ns, "photons per mode")?;
    positive(bandwidth, "bandwidth")?;
    for (t, what) in [(nmax, "Nmax"), (pmax, "Pmax")] {
        if let Some(v) = t {
            positive(v, what)?;
        }
    }
    let omega0 = carrier.omega()?;
    let power_watts = HBAR * omega0 * ns * bandwidth;
    let constraint_met = match (nmax, pmax) {
        (None, None) => None,
        _ => Some(nmax.is_some_and(|n| ns <= n) || pmax.is_some_and(|p| power_watts <= p)),
    };
    Ok(PowerResult {
        ns,
        bandwidth,
        omega0,
        power_watts,
        power_dbm: watts_to_dbm(power_watts),
        photons_per_second: ns * bandwidth,
        nmax,
        pmax,
        constraint_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_micron_full_bandwidth() {
        let r = power_calc(1.0, Carrier::Wavelength(1e-6), 1e15, None, None).unwrap();
        // ħ·2πc/λ·W computed by hand
        let expect = 1.054_571_817e-34 * 2.0 * std::f64::consts::PI * 299_792_458.0 / 1e-6 * 1e15;
        assert!((r.power_watts - expect).abs() / expect < 1e-14);
        assert!((r.power_dbm - (-7.0192)).abs() < 1e-3);
        assert_eq!(r.constraint_met, None);
    }

    #[test]
    fn thresholds() {
        let r = power_calc(1.0, Carrier::Wavelength(1e-6), 1e12, Some(0.5), Some(1e-6)).unwrap();
        assert_eq!(r.constraint_met, Some(true));
        let r = power_calc(1.0, Carrier::Wavelength(1e-6), 1e12, Some(0.5), None).unwrap();
        assert_eq!(r.constraint_met, Some(false));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(power_calc(0.0, Carrier::Wavelength(1e-6), 1e12, None, None).is_err());
        assert!(power_calc(1.0, Carrier::AngularFrequency(-1.0), 1e12, None, None).is_err());
        assert!(photons_per_second(1.0, Carrier::Wavelength(0.0)).is_err());
    }
}
