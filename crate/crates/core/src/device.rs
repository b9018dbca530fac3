//! Reduction of a Cooper-pair box to an effective two-level qubit.
//!
//! Only the charge states N = 0 and N = 1 are kept. The charge Hamiltonian in
//! that subspace is `ε σ_z + (E_J0/2) σ_x`, which fixes the mixing angle
//! `tan 2η = E_J0 / 2ε` and the splitting `E = sqrt(4ε² + E_J0²)`.
//!
//! The charging energy uses the two-junction denominator `C_g + 2 C_J`. A
//! single-junction reading (`C_g + C_J`) is obtained by halving `C_J`.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

use crate::hamiltonian::QubitParams;

/// Elementary charge in coulombs.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("capacitances must be positive (C_g = {gate}, C_J = {junction})")]
    NonPositiveCapacitance { gate: f64, junction: f64 },
    #[error("Josephson energy must be positive, got {0}")]
    NonPositiveJosephson(f64),
    #[error("flux ratio {0} outside [0, 1)")]
    FluxOutOfRange(f64),
}

/// Unit system for the circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    /// Farads, volts, joules; the elementary charge is its SI value.
    #[default]
    Si,
    /// Elementary charge set to 1; capacitances and energies are ratios.
    Dimensionless,
}

impl Units {
    pub fn elementary_charge(self) -> f64 {
        match self {
            Units::Si => ELEMENTARY_CHARGE,
            Units::Dimensionless => 1.0,
        }
    }
}

/// Circuit parameters of one Cooper-pair box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub josephson_energy: f64,
    pub gate_capacitance: f64,
    pub junction_capacitance: f64,
    pub gate_voltage: f64,
    /// Static flux in units of the flux quantum, Φ_e/Φ_0.
    pub flux_ratio: f64,
    pub units: Units,
}

impl DeviceParams {
    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.gate_capacitance > 0.0 && self.junction_capacitance > 0.0) {
            return Err(DeviceError::NonPositiveCapacitance {
                gate: self.gate_capacitance,
                junction: self.junction_capacitance,
            });
        }
        if self.josephson_energy.is_nan() || self.josephson_energy <= 0.0 {
            return Err(DeviceError::NonPositiveJosephson(self.josephson_energy));
        }
        if !(0.0..1.0).contains(&self.flux_ratio) {
            return Err(DeviceError::FluxOutOfRange(self.flux_ratio));
        }
        Ok(())
    }

    /// Reduced gate charge `C_g V_g / e`.
    pub fn gate_charge(&self) -> f64 {
        self.gate_capacitance * self.gate_voltage / self.units.elementary_charge()
    }
}

/// Effective two-level description of a charge qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveQubit {
    pub epsilon: f64,
    /// Mixing angle, in (−π/4, π/4].
    pub eta: f64,
    pub splitting: f64,
    /// `E_J0 cos 2η`, the transverse (field-coupling) amplitude.
    pub coupling_prefactor: f64,
    /// `E_J0 sin 2η cos(π Φ_e/Φ_0)`, the longitudinal flux term.
    pub diagonal_prefactor: f64,
    /// `E_J0 sin 2η` before the flux factor is applied.
    pub longitudinal_amplitude: f64,
}

impl EffectiveQubit {
    /// Parameters for the cavity Hamiltonian, with the transverse coupling
    /// multiplied by the field scale (the flux per photon in energy units).
    pub fn qubit_params(&self, field_scale: f64) -> QubitParams {
        QubitParams {
            splitting: self.splitting,
            coupling: self.coupling_prefactor * field_scale,
            diagonal_amplitude: self.longitudinal_amplitude,
        }
    }
}

pub fn charging_energy(p: &DeviceParams) -> Result<f64, DeviceError> {
    if !(p.gate_capacitance > 0.0 && p.junction_capacitance > 0.0) {
        return Err(DeviceError::NonPositiveCapacitance {
            gate: p.gate_capacitance,
            junction: p.junction_capacitance,
        });
    }
    let e = p.units.elementary_charge();
    Ok(e * e / (2.0 * (p.gate_capacitance + 2.0 * p.junction_capacitance)))
}

/// Reduces the device in the N = 0/1 charge sector.
pub fn effective_qubit(p: &DeviceParams) -> Result<EffectiveQubit, DeviceError> {
    p.validate()?;
    let ec = charging_energy(p)?;
    let ej = p.josephson_energy;
    let epsilon = 2.0 * ec * (p.gate_charge() - 1.0);
    let eta = if epsilon == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * (ej / (2.0 * epsilon)).atan()
    };
    let splitting = (4.0 * epsilon * epsilon + ej * ej).sqrt();
    let longitudinal = ej * (2.0 * eta).sin();
    Ok(EffectiveQubit {
        epsilon,
        eta,
        splitting,
        coupling_prefactor: ej * (2.0 * eta).cos(),
        diagonal_prefactor: longitudinal * (PI * p.flux_ratio).cos(),
        longitudinal_amplitude: longitudinal,
    })
}
