//! Laboratory laser parameters and the coupling `B` (half the Rabi frequency).
//!
//! Internally `hbar = c = 1`; the power form takes W, um, um^2 and eV and
//! returns `B` in eV.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.05457182e-34;
/// Speed of light, m/s.
pub const C_LIGHT: f64 = 2.99792458e8;
/// Elementary charge, C (J per eV).
pub const E_CHARGE: f64 = 1.60217663e-19;
/// Fine-structure constant.
pub const ALPHA: f64 = 7.29735257e-3;

/// Coefficient of `B^2 = K P lambda^3 / A * hbar Gamma` as quoted, in eV^2 for
/// `P` in W, `lambda` in um, `A` in um^2, `hbar Gamma` in eV.
pub const POWER_COEFFICIENT: f64 = 132.0;

/// Same coefficient rebuilt from `B^2 = P / (c A) * lambda^3 / (16 pi^2) * hbar Gamma`.
pub fn derived_power_coefficient() -> f64 {
    let um = 1e-6;
    let energy_density = 1.0 / (C_LIGHT * um * um); // J/m^3 for 1 W over 1 um^2
    let volume = um.powi(3) / (16.0 * PI * PI);
    energy_density * volume / E_CHARGE
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be a finite nonnegative number, got {x}")))
    }
}

/// Polarization factor `|eps* . x13|^2 / |x13|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    /// Average over orientations, 1/3.
    #[default]
    AngleAverage,
    Overlap(f64),
}

impl Polarization {
    pub fn factor(self) -> f64 {
        match self {
            Polarization::AngleAverage => 1.0 / 3.0,
            Polarization::Overlap(x) => x,
        }
    }
}

/// `B^2 = 2 pi alpha Omega0 |eps* . x13|^2 n0` in natural units.
pub fn b_from_dipole(omega_big: f64, dipole_sq: f64, n0: f64, pol: Polarization) -> Result<f64> {
    check_nonneg("Omega0", omega_big)?;
    check_nonneg("|x13|^2", dipole_sq)?;
    check_nonneg("n0", n0)?;
    check_nonneg("polarization overlap", pol.factor())?;
    Ok((2.0 * PI * ALPHA * omega_big * pol.factor() * dipole_sq * n0).sqrt())
}

/// Spontaneous rate of the 1-3 dipole transition, `(4/3) alpha |x13|^2 Omega0^3`.
pub fn dipole_linewidth(omega_big: f64, dipole_sq: f64) -> f64 {
    4.0 / 3.0 * ALPHA * dipole_sq * omega_big.powi(3)
}

/// `B^2 = (pi / 2) n0 Gamma13 / Omega0^2` in natural units.
pub fn b_from_linewidth(omega_big: f64, gamma13: f64, n0: f64) -> Result<f64> {
    check_nonneg("Gamma13", gamma13)?;
    check_nonneg("n0", n0)?;
    if !(omega_big > 0.0) {
        return Err(Error::domain(format!("Omega0 must be > 0, got {omega_big}")));
    }
    Ok((0.5 * PI * n0 * gamma13 / (omega_big * omega_big)).sqrt())
}

/// `B` in eV from photon density (m^-3), laser wavelength (um) and `hbar Gamma13` (eV):
/// `B^2 = (n0 hbar Omega0) lambda^3 / (16 pi^2) hbar Gamma13`.
pub fn b_from_photon_density(n0_per_m3: f64, wavelength_um: f64, hgamma_ev: f64) -> Result<f64> {
    check_nonneg("n0", n0_per_m3)?;
    check_nonneg("hbar Gamma", hgamma_ev)?;
    if !(wavelength_um > 0.0) {
        return Err(Error::domain(format!("wavelength must be > 0, got {wavelength_um}")));
    }
    let lambda = wavelength_um * 1e-6;
    let photon_ev = 2.0 * PI * HBAR * C_LIGHT / lambda / E_CHARGE;
    Ok((n0_per_m3 * photon_ev * lambda.powi(3) / (16.0 * PI * PI) * hgamma_ev).sqrt())
}

/// `B` in eV from laser power (W), wavelength (um), spot area (um^2) and `hbar Gamma13` (eV).
pub fn b_from_power(power_w: f64, wavelength_um: f64, area_um2: f64, hgamma_ev: f64) -> Result<f64> {
    check_nonneg("P", power_w)?;
    check_nonneg("lambda", wavelength_um)?;
    check_nonneg("hbar Gamma", hgamma_ev)?;
    if !(area_um2 > 0.0) {
        return Err(Error::domain(format!("spot area must be > 0, got {area_um2}")));
    }
    Ok((POWER_COEFFICIENT * power_w * wavelength_um.powi(3) / area_um2 * hgamma_ev).sqrt())
}

/// `Omega_Rabi = 2 B`.
pub fn rabi_from_b(b: f64) -> Result<f64> {
    check_nonneg("B", b)?;
    Ok(2.0 * b)
}

pub fn b_from_rabi(rabi: f64) -> Result<f64> {
    check_nonneg("Omega_Rabi", rabi)?;
    Ok(0.5 * rabi)
}

/// One way of specifying the laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LaserSpec {
    /// `B` given directly, in units of omega0.
    Direct { b: f64 },
    /// Natural units, energies in units of omega0.
    Dipole {
        n0: f64,
        dipole_sq: f64,
        omega_big: f64,
        #[serde(default)]
        polarization: Polarization,
    },
    /// W, um^2, um, eV.
    Power {
        power_w: f64,
        area_um2: f64,
        wavelength_um: f64,
        linewidth_ev: f64,
    },
}

impl LaserSpec {
    /// `B` in the native unit of the parameterization (eV for `Power`).
    pub fn b(&self) -> Result<f64> {
        match *self {
            LaserSpec::Direct { b } => {
                check_nonneg("B", b)?;
                Ok(b)
            }
            LaserSpec::Dipole {
                n0,
                dipole_sq,
                omega_big,
                polarization,
            } => b_from_dipole(omega_big, dipole_sq, n0, polarization),
            LaserSpec::Power {
                power_w,
                area_um2,
                wavelength_um,
                linewidth_ev,
            } => b_from_power(power_w, wavelength_um, area_um2, linewidth_ev),
        }
    }

    pub fn is_ev(&self) -> bool {
        matches!(self, LaserSpec::Power { .. })
    }
}
