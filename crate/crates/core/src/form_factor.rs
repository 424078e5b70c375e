//! Emission form factor chi^2(omega) and the coupling constant g^2.
//!
//! The form factor is the interpolating family
//!
//! ```text
//! chi^2(w) = (w / w_ref)^kappa / (1 + (w / Lambda)^2)^((kappa + beta) / 2)
//! ```
//!
//! which behaves as `w^kappa` well below the cutoff `Lambda` and as `w^-beta`
//! well above it. The infrared asymptote is normalized to exactly
//! `(w / w_ref)^kappa`. Because `kappa` is an integer and the cutoff factor is
//! a principal power, the same expression continues off the positive axis;
//! its only singularities are the branch points `w = +-i Lambda`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electric or magnetic character of the 2 -> 1 transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multipole {
    Electric,
    Magnetic,
}

/// Angular momentum and character of the photon emitted in the 2 -> 1 decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub j: u32,
    pub character: Multipole,
}

impl TransitionSpec {
    pub fn new(j: u32, character: Multipole) -> Result<Self> {
        if j == 0 {
            return Err(Error::domain("photon angular momentum j must be >= 1"));
        }
        Ok(Self { j, character })
    }

    pub fn electric(j: u32) -> Self {
        Self::new(j, Multipole::Electric).expect("j >= 1")
    }

    pub fn magnetic(j: u32) -> Self {
        Self::new(j, Multipole::Magnetic).expect("j >= 1")
    }

    pub fn kappa(&self) -> u32 {
        kappa_of(*self)
    }
}

/// Low-frequency exponent: `2j - 1` for electric, `2j + 1` for magnetic transitions.
pub fn kappa_of(transition: TransitionSpec) -> u32 {
    match transition.character {
        Multipole::Electric => 2 * transition.j - 1,
        Multipole::Magnetic => 2 * transition.j + 1,
    }
}

/// `g^2 = alpha (omega0 / Lambda)^(2j + 1 -+ 1)`, i.e. exponent `kappa + 1`.
pub fn coupling_g2(alpha_fs: f64, omega0: f64, lambda_cut: f64, transition: TransitionSpec) -> f64 {
    alpha_fs * (omega0 / lambda_cut).powi(kappa_of(transition) as i32 + 1)
}

/// Default high-frequency falloff exponent.
pub const DEFAULT_BETA: f64 = 2.0;

fn default_beta() -> f64 {
    DEFAULT_BETA
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFactorModel {
    pub kappa: u32,
    pub lambda_cut: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub omega0_ref: f64,
}

impl FormFactorModel {
    pub fn new(kappa: u32, lambda_cut: f64, beta: f64, omega0_ref: f64) -> Result<Self> {
        let model = Self {
            kappa,
            lambda_cut,
            beta,
            omega0_ref,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks every invariant of the family; used by [`FormFactorModel::new`]
    /// and by callers that deserialize models directly.
    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 || self.kappa % 2 == 0 {
            return Err(Error::domain(format!(
                "kappa must be an odd positive integer, got {}",
                self.kappa
            )));
        }
        if !(self.lambda_cut > 0.0 && self.lambda_cut.is_finite()) {
            return Err(Error::domain(format!("lambda_cut must be > 0, got {}", self.lambda_cut)));
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(Error::domain(format!(
                "beta must exceed 1 for the coupling density to be integrable, got {}",
                self.beta
            )));
        }
        if !(self.omega0_ref > 0.0 && self.omega0_ref.is_finite()) {
            return Err(Error::domain(format!("omega0_ref must be > 0, got {}", self.omega0_ref)));
        }
        Ok(())
    }

    fn cutoff_power(&self) -> f64 {
        0.5 * (self.kappa as f64 + self.beta)
    }

    /// chi^2 at a nonnegative real frequency.
    pub fn chi_squared(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::domain(format!("chi^2 needs omega >= 0, got {omega}")));
        }
        Ok(self.eval(omega))
    }

    /// Unchecked evaluation for `omega >= 0`; the hot path of every quadrature.
    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        let u = omega / self.lambda_cut;
        (omega / self.omega0_ref).powi(self.kappa as i32) * (-self.cutoff_power() * (u * u).ln_1p()).exp()
    }

    /// Analytic continuation of chi^2 to complex frequency.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        let u = z / self.lambda_cut;
        let base = Complex64::new(1.0, 0.0) + u * u;
        if base.norm() < 1e-12 {
            return Err(Error::domain(format!(
                "chi^2 continuation hits the branch point at {z} (= +-i Lambda)"
            )));
        }
        Ok((z / self.omega0_ref).powi(self.kappa as i32) * base.powf(-self.cutoff_power()))
    }

    /// Logarithmic derivative `d ln chi^2 / d ln omega`.
    pub fn log_slope(&self, omega: f64) -> f64 {
        let u2 = (omega / self.lambda_cut).powi(2);
        self.kappa as f64 - (self.kappa as f64 + self.beta) * u2 / (1.0 + u2)
    }

    /// Upper bound on `int_w^inf chi^2`, valid for `w >= Lambda`: there
    /// chi^2 <= (Lambda / w_ref)^kappa (Lambda / w)^beta.
    pub fn tail_bound(&self, omega: f64) -> f64 {
        let w = omega.max(self.lambda_cut);
        (self.lambda_cut / self.omega0_ref).powi(self.kappa as i32) * self.lambda_cut.powf(self.beta)
            * w.powf(1.0 - self.beta)
            / (self.beta - 1.0)
    }
}

/// Emitter energies, coupling and emission model. Energies are in the same
/// unit as `omega0` (usually `omega0 = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega0: f64,
    pub g2: f64,
    pub form_factor: FormFactorModel,
    pub transition: TransitionSpec,
}

/// Couplings above this value trigger a warning.
pub const G2_WARN: f64 = 1e-2;

impl SystemParams {
    pub fn new(
        omega0: f64,
        g2: f64,
        form_factor: FormFactorModel,
        transition: TransitionSpec,
    ) -> Result<Self> {
        let p = Self {
            omega0,
            g2,
            form_factor,
            transition,
        };
        p.validate()?;
        Ok(p)
    }

    /// The model used throughout the examples and checks: `omega0 = 1`,
    /// the form-factor exponent taken from the transition, beta = 2.
    pub fn standard(g2: f64, transition: TransitionSpec, lambda_cut: f64, omega0_ref: f64) -> Result<Self> {
        let ff = FormFactorModel::new(transition.kappa(), lambda_cut, DEFAULT_BETA, omega0_ref)?;
        Self::new(1.0, g2, ff, transition)
    }

    pub fn validate(&self) -> Result<()> {
        self.form_factor.validate()?;
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::domain(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if !(self.g2 >= 0.0 && self.g2.is_finite()) {
            return Err(Error::domain(format!("g2 must be >= 0, got {}", self.g2)));
        }
        if self.g2 > G2_WARN {
            log::warn!("g2 = {} is not small; O(g^4) corrections may be visible", self.g2);
        }
        if self.omega0 >= self.form_factor.lambda_cut {
            log::warn!(
                "omega0 = {} is not below the cutoff {}; outside the physical regime",
                self.omega0,
                self.form_factor.lambda_cut
            );
        }
        if kappa_of(self.transition) != self.form_factor.kappa {
            return Err(Error::domain(format!(
                "form factor kappa {} does not match transition {:?} (kappa {})",
                self.form_factor.kappa,
                self.transition,
                kappa_of(self.transition)
            )));
        }
        Ok(())
    }

    /// chi^2 at real frequency.
    #[inline]
    pub fn chi2(&self, omega: f64) -> f64 {
        self.form_factor.eval(omega)
    }

    /// Continuum coupling density `g^2 omega0 chi^2(omega)`.
    #[inline]
    pub fn coupling_density(&self, omega: f64) -> f64 {
        self.g2 * self.omega0 * self.form_factor.eval(omega)
    }

    pub fn kappa(&self) -> u32 {
        self.form_factor.kappa
    }

    /// Returns a copy with a different coupling constant.
    pub fn with_g2(&self, g2: f64) -> Self {
        Self { g2, ..*self }
    }
}
