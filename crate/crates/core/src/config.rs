//! Run configuration for the command-line front end.
//!
//! A config is a TOML document. Every section is optional; missing values are
//! filled in by [`RunConfig::resolve`], and the resolved document is what gets
//! embedded in output headers, so each CSV can be rerun from its own header.
//!
//! ```toml
//! seed = 7
//!
//! [system]
//! omega0 = 1.0
//! g2 = 1e-4
//!
//! [form_factor]
//! lambda_cut = 1000.0
//! beta = 2.0
//!
//! [transition]
//! j = 2
//! character = "electric"
//!
//! [laser.direct]
//! b = 0.2
//!
//! [[ladder]]
//! f = 0.5
//! delta = 3.0
//! ```

use serde::{Deserialize, Serialize};

use crate::dressed::{LadderLevel, LevelLadder};
use crate::dynamics::{EvolveOptions, GridRule};
use crate::error::{Error, Result};
use crate::form_factor::{kappa_of, FormFactorModel, Multipole, SystemParams, TransitionSpec, DEFAULT_BETA};
use crate::lab_units::LaserSpec;
use crate::self_energy::PoleOptions;
use crate::spectrum::{LineWidths, NormalizationRoute};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega0: f64,
    pub g2: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { omega0: 1.0, g2: 1e-4 }
    }
}

/// `omega0_ref` defaults to the cutoff and `kappa` to the transition's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFactorSection {
    pub lambda_cut: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_ref: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<u32>,
}

impl Default for FormFactorSection {
    fn default() -> Self {
        Self {
            lambda_cut: 1e3,
            beta: DEFAULT_BETA,
            omega0_ref: None,
            kappa: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GammaScanConfig {
    pub b_min: f64,
    pub b_max: f64,
    pub points: usize,
    pub js: Vec<u32>,
    pub character: Multipole,
    pub route: NormalizationRoute,
}

impl Default for GammaScanConfig {
    fn default() -> Self {
        Self {
            b_min: 0.0,
            b_max: 1.0,
            points: 11,
            js: vec![1, 2, 3],
            character: Multipole::Electric,
            route: NormalizationRoute::Quadrature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// Field strength in units of omega0; taken from `[laser]` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub points: usize,
    /// Extra samples across each line, spread over `peak_halfwidths` widths.
    pub peak_points: usize,
    pub peak_halfwidths: f64,
    pub widths: LineWidths,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            b: None,
            points: 2001,
            peak_points: 401,
            peak_halfwidths: 20.0,
            widths: LineWidths::Shared,
            omega_min: None,
            omega_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    pub modes: usize,
    pub omega_max: f64,
    pub rule: GridRule,
    pub samples: usize,
    pub tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
    /// Defaults to five pole lifetimes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_end: Option<f64>,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        let o = EvolveOptions::default();
        Self {
            b: None,
            modes: 2000,
            omega_max: 100.0,
            rule: GridRule::GaussLegendre,
            samples: 200,
            tol: o.tol,
            initial_step: o.initial_step,
            max_steps: o.max_steps,
            t_final: None,
            fit_start: None,
            fit_end: None,
        }
    }
}

impl EvolveConfig {
    pub fn options(&self) -> EvolveOptions {
        EvolveOptions {
            tol: self.tol,
            initial_step: self.initial_step,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub b_min: f64,
    pub b_max: f64,
    pub points: usize,
}

impl SweepConfig {
    fn new(b_min: f64, b_max: f64, points: usize) -> Self {
        Self { b_min, b_max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.b_min];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.b_min + (self.b_max - self.b_min) * i as f64 / n)
            .collect()
    }

    fn check(&self, path: &str) -> Result<()> {
        if self.points == 0 {
            return Err(Error::config(format!("{path}.points"), "need at least one point"));
        }
        if !(self.b_min >= 0.0 && self.b_max >= self.b_min && self.b_max.is_finite()) {
            return Err(Error::config(
                path,
                format!("need 0 <= b_min <= b_max, got [{}, {}]", self.b_min, self.b_max),
            ));
        }
        Ok(())
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::new(0.0, 1.0, 101)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    /// Transition energy in eV; needed to express a power-specified laser as `B / omega0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_ev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    /// Random `(s, B)` samples for the self-energy identity.
    pub shift_samples: usize,
    /// Random ladders for the partial-fraction checks.
    pub ladders: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            shift_samples: 20,
            ladders: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Overrides the pole tolerance and the integrator tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub form_factor: FormFactorSection,
    #[serde(default = "default_transition")]
    pub transition: TransitionSpec,
    #[serde(default = "default_laser")]
    pub laser: LaserSpec,
    #[serde(default)]
    pub ladder: Vec<LadderLevel>,
    #[serde(default)]
    pub gamma_scan: GammaScanConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub dressed: SweepConfig,
    #[serde(default = "default_multilevel")]
    pub multilevel: SweepConfig,
    #[serde(default)]
    pub estimate_b: EstimateConfig,
    #[serde(default)]
    pub validate: ValidateConfig,
}

fn default_seed() -> u64 {
    0
}

fn default_multilevel() -> SweepConfig {
    SweepConfig::new(0.0, 0.5, 11)
}

fn default_transition() -> TransitionSpec {
    TransitionSpec::electric(2)
}

fn default_laser() -> LaserSpec {
    LaserSpec::Direct { b: 0.2 }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            tolerance: None,
            system: SystemSection::default(),
            form_factor: FormFactorSection::default(),
            transition: default_transition(),
            laser: default_laser(),
            ladder: Vec::new(),
            gamma_scan: GammaScanConfig::default(),
            spectrum: SpectrumConfig::default(),
            evolve: EvolveConfig::default(),
            dressed: SweepConfig::default(),
            multilevel: default_multilevel(),
            estimate_b: EstimateConfig::default(),
            validate: ValidateConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses a TOML document. Errors name the offending key.
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<document>", e.message().to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().message().to_string())
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml(&text)
    }

    /// Fills every derived default so the document is self-describing, and
    /// checks the values that do not depend on the physics.
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("tolerance", format!("must be > 0, got {t}")));
            }
            self.evolve.tol = t;
        }
        let ff = &mut self.form_factor;
        ff.omega0_ref.get_or_insert(ff.lambda_cut);
        ff.kappa.get_or_insert(kappa_of(self.transition));
        if self.transition.j == 0 {
            return Err(Error::config("transition.j", "must be >= 1"));
        }
        LevelLadder::new(self.ladder.clone()).map_err(|e| Error::config("ladder", e.to_string()))?;
        self.gamma_scan_sweep().check("gamma_scan")?;
        if self.gamma_scan.js.iter().any(|&j| j == 0) {
            return Err(Error::config("gamma_scan.js", "photon angular momenta must be >= 1"));
        }
        self.dressed.check("dressed")?;
        self.multilevel.check("multilevel")?;
        if self.spectrum.points < 2 {
            return Err(Error::config("spectrum.points", "need at least 2 points"));
        }
        if self.evolve.samples < 2 {
            return Err(Error::config("evolve.samples", "need at least 2 samples"));
        }
        if !(self.evolve.tol > 0.0) {
            return Err(Error::config("evolve.tol", "must be > 0"));
        }
        Ok(self)
    }

    fn gamma_scan_sweep(&self) -> SweepConfig {
        SweepConfig::new(self.gamma_scan.b_min, self.gamma_scan.b_max, self.gamma_scan.points)
    }

    pub fn gamma_scan_values(&self) -> Vec<f64> {
        self.gamma_scan_sweep().values()
    }

    /// The form factor exactly as configured, without the range checks.
    pub fn form_factor_unchecked(&self) -> FormFactorModel {
        let ff = &self.form_factor;
        FormFactorModel {
            kappa: ff.kappa.unwrap_or_else(|| kappa_of(self.transition)),
            lambda_cut: ff.lambda_cut,
            beta: ff.beta,
            omega0_ref: ff.omega0_ref.unwrap_or(ff.lambda_cut),
        }
    }

    pub fn params_unchecked(&self) -> SystemParams {
        SystemParams {
            omega0: self.system.omega0,
            g2: self.system.g2,
            form_factor: self.form_factor_unchecked(),
            transition: self.transition,
        }
    }

    /// Physical parameters; an invalid combination is reported as a config error.
    pub fn params(&self) -> Result<SystemParams> {
        let p = self.params_unchecked();
        p.validate().map_err(|e| {
            let msg = e.to_string();
            let key = ["beta", "lambda_cut", "omega0_ref", "kappa", "omega0", "g2"]
                .into_iter()
                .find(|k| msg.contains(&format!("{k} ")))
                .map(|k| match k {
                    "omega0" | "g2" => format!("system.{k}"),
                    k => format!("form_factor.{k}"),
                })
                .unwrap_or_else(|| "system".into());
            Error::config(key, msg)
        })?;
        Ok(p)
    }

    /// Same model with a different transition, `kappa` following the transition.
    pub fn params_for(&self, transition: TransitionSpec) -> Result<SystemParams> {
        let mut p = self.params()?;
        p.transition = transition;
        p.form_factor.kappa = kappa_of(transition);
        p.validate().map_err(|e| Error::config("gamma_scan", e.to_string()))?;
        Ok(p)
    }

    pub fn ladder(&self) -> Result<LevelLadder> {
        LevelLadder::new(self.ladder.clone()).map_err(|e| Error::config("ladder", e.to_string()))
    }

    pub fn pole_options(&self) -> PoleOptions {
        let mut o = PoleOptions::default();
        if let Some(t) = self.tolerance {
            o.tolerance = t;
        }
        o
    }

    /// `B / omega0` from the `[laser]` section.
    pub fn laser_b(&self) -> Result<f64> {
        let b = self.laser.b().map_err(|e| Error::config("laser", e.to_string()))?;
        if self.laser.is_ev() {
            let w0 = self.estimate_b.omega0_ev.ok_or_else(|| {
                Error::config(
                    "estimate_b.omega0_ev",
                    "a power-specified laser gives B in eV; set omega0_ev to use it as B / omega0",
                )
            })?;
            if !(w0 > 0.0) {
                return Err(Error::config("estimate_b.omega0_ev", format!("must be > 0, got {w0}")));
            }
            Ok(b / w0)
        } else {
            Ok(b)
        }
    }

    /// The resolved document, one `# `-prefixed line per TOML line.
    pub fn header_lines(&self) -> Vec<String> {
        let text = toml::to_string(self).expect("config serializes");
        text.lines()
            .map(|l| if l.is_empty() { "#".to_string() } else { format!("# {l}") })
            .collect()
    }
}
