//! Emitted-photon spectra in the pole approximation and the decay rate
//! recovered from their normalization.
//!
//! With the laser on the line is a pair of Lorentzians at `omega_bar +- B`,
//! each of weight one half, multiplied by the coupling density
//! `g^2 omega0 chi^2(omega)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form_factor::SystemParams;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::self_energy::{pole_newton, PoleOptions, PoleResult};

/// `f_L(omega; gamma) = 1 / (omega^2 + gamma^2 / 4)`.
pub fn lorentzian(omega: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("Lorentzian width must be > 0, got {gamma}")));
    }
    Ok(lorentzian_unchecked(omega, gamma))
}

#[inline]
fn lorentzian_unchecked(omega: f64, gamma: f64) -> f64 {
    1.0 / (omega * omega + 0.25 * gamma * gamma)
}

/// Width assignment for the two lines of the doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineWidths {
    /// Both lines carry the pole width `gamma(B)`.
    #[default]
    Shared,
    /// The line at `omega_bar + B` carries `2 gamma_-`, the one at
    /// `omega_bar - B` carries `2 gamma_+` (dressed-channel rates). Not normalized.
    PerChannel,
}

fn widths(params: &SystemParams, pole: &PoleResult, b: f64, mode: LineWidths) -> (f64, f64) {
    match mode {
        LineWidths::Shared => (pole.gamma, pole.gamma),
        LineWidths::PerChannel => {
            let (gp, gm) = crate::dressed::partial_rates(params, b);
            (2.0 * gm, 2.0 * gp)
        }
    }
}

/// Laser-off spectrum `g^2 omega0 chi^2(omega) f_L(omega - omega_bar; gamma)`.
pub fn spectrum_b0(params: &SystemParams, pole: &PoleResult, omega: f64) -> f64 {
    params.coupling_density(omega) * lorentzian_unchecked(omega - pole.omega_bar(), pole.gamma)
}

/// Doublet spectrum with shared width.
pub fn spectrum_b(params: &SystemParams, pole: &PoleResult, b: f64, omega: f64) -> f64 {
    spectrum_b_with(params, pole, b, omega, LineWidths::Shared)
}

pub fn spectrum_b_with(params: &SystemParams, pole: &PoleResult, b: f64, omega: f64, mode: LineWidths) -> f64 {
    let b = b.abs();
    let (g_hi, g_lo) = widths(params, pole, b, mode);
    let c = pole.omega_bar();
    let lines = 0.5 * (lorentzian_unchecked(omega - c - b, g_hi) + lorentzian_unchecked(omega - c + b, g_lo));
    params.coupling_density(omega) * lines
}

/// Sampled spectrum together with the line parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub omegas: Vec<f64>,
    pub density: Vec<f64>,
    pub b: f64,
    pub gamma: f64,
    pub omega_bar: f64,
    pub params: SystemParams,
}

impl SpectrumCurve {
    /// Samples on `[lo, hi]` with `n` points; `n >= 2`.
    pub fn sample(params: &SystemParams, pole: &PoleResult, b: f64, lo: f64, hi: f64, n: usize, mode: LineWidths) -> Result<Self> {
        if n < 2 || !(hi > lo) || lo < 0.0 {
            return Err(Error::domain(format!("bad spectral window [{lo}, {hi}] with {n} samples")));
        }
        let omegas: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let density = omegas.iter().map(|&w| spectrum_b_with(params, pole, b, w, mode)).collect();
        Ok(Self {
            omegas,
            density,
            b: b.abs(),
            gamma: pole.gamma,
            omega_bar: pole.omega_bar(),
            params: *params,
        })
    }

    /// Window `[max(0, omega_bar - B - 50 gamma), omega_bar + B + 50 gamma]`.
    pub fn default_window(pole: &PoleResult, b: f64) -> (f64, f64) {
        let c = pole.omega_bar();
        let pad = 50.0 * pole.gamma;
        ((c - b.abs() - pad).max(0.0), c + b.abs() + pad)
    }

    pub fn trapezoid(&self) -> f64 {
        self.omegas
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(w, d)| 0.5 * (w[1] - w[0]) * (d[0] + d[1]))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# B = {:.15e}\n# gamma = {:.15e}\n# omega_bar = {:.15e}\nomega,density\n",
            self.b, self.gamma, self.omega_bar
        );
        for (w, d) in self.omegas.iter().zip(&self.density) {
            out.push_str(&format!("{w:.15e},{d:.15e}\n"));
        }
        out
    }
}

fn opts() -> QuadOptions {
    QuadOptions::with_rel_tol(1e-11)
}

/// `int_0^inf g(omega) f_L(omega - c; gamma) d omega` for smooth `g`; the
/// line core is integrated in the angle `theta = atan(2 (omega - c) / gamma)`.
fn line_integral<G: Fn(f64) -> f64>(g: G, c: f64, gamma: f64, far_scale: f64, far_break: f64) -> Result<f64> {
    let (lo, hi) = if c > 0.0 { (0.5 * c, 1.5 * c) } else { (0.0, 1.0 - c) };
    let half = 0.5 * gamma;
    let f = |w: f64| g(w) * lorentzian_unchecked(w - c, gamma);
    if c < -50.0 * gamma {
        // centre well below the axis: nothing sharp left on [0, inf)
        let near = integrate(f, 0.0, hi, opts())?.value;
        return Ok(near + integrate_to_infinity(f, hi, far_scale.max(hi), &[far_break], opts())?.value);
    }
    let core = integrate(
        |th: f64| g(c + half * th.tan()),
        ((lo - c) / half).atan(),
        ((hi - c) / half).atan(),
        opts(),
    )?
    .value
        / half;
    let below = if lo > 0.0 { integrate(f, 0.0, lo, opts())?.value } else { 0.0 };
    let above = integrate_to_infinity(f, hi, far_scale.max(hi), &[far_break], opts())?.value;
    Ok(core + below + above)
}

/// Total emission probability `int_0^inf dP_B` for given line centre and width.
pub fn emission_normalization(params: &SystemParams, b: f64, omega_bar: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("line width must be > 0, got {gamma}")));
    }
    let b = b.abs();
    let lam = params.form_factor.lambda_cut;
    let g = |w: f64| params.coupling_density(w);
    let hi = line_integral(g, omega_bar + b, gamma, lam, lam)?;
    let lo = if b == 0.0 { hi } else { line_integral(g, omega_bar - b, gamma, lam, lam)? };
    Ok(0.5 * (hi + lo))
}

/// How [`recover_gamma_from_normalization`] evaluates the normalization condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationRoute {
    /// Narrow-line limit: `gamma = pi g^2 omega0 [chi^2(omega_bar + B) + chi^2(omega_bar - B) theta]`.
    ClosedForm,
    /// Solve `int dP_B = 1` for the width with the full line shape.
    Quadrature,
}

/// Width fixed by unit emission probability, at line centre `omega_bar`.
pub fn gamma_from_normalization_at(params: &SystemParams, b: f64, omega_bar: f64, route: NormalizationRoute) -> Result<f64> {
    let b = b.abs();
    let lower = if omega_bar - b >= 0.0 { params.chi2(omega_bar - b) } else { 0.0 };
    let closed = PI * params.g2 * params.omega0 * (params.chi2(omega_bar + b) + lower);
    if closed > 1e-2 * omega_bar {
        log::warn!("gamma = {closed:e} is not small against omega_bar = {omega_bar}; narrow-line estimate unreliable");
    }
    match route {
        NormalizationRoute::ClosedForm => Ok(closed),
        NormalizationRoute::Quadrature => {
            if !(closed > 0.0) {
                return Err(Error::domain("zero coupling: emission probability vanishes for every width"));
            }
            // the normalization scales as 1/gamma to leading order
            let mut gamma = closed;
            for _ in 0..60 {
                let norm = emission_normalization(params, b, omega_bar, gamma)?;
                let next = gamma * norm;
                if (next - gamma).abs() <= 1e-12 * gamma {
                    return Ok(next);
                }
                gamma = next;
            }
            Err(Error::NoConvergence {
                iterations: 60,
                residual: (emission_normalization(params, b, omega_bar, gamma)? - 1.0).abs(),
                trail: Vec::new(),
            })
        }
    }
}

/// Rate recovered from the normalization, with `omega_bar` from the Newton pole.
pub fn recover_gamma_from_normalization(params: &SystemParams, b: f64, route: NormalizationRoute) -> Result<f64> {
    let pole = pole_newton(params, b, PoleOptions::default())?;
    gamma_from_normalization_at(params, b, pole.omega_bar(), route)
}

/// Large-time occupations `(|y_k|^2, |z_k|^2)` of the mode `omega_k` per unit
/// coupling density, once the pole contribution has died out.
pub fn asymptotic_occupations(params: &SystemParams, pole: &PoleResult, b: f64, omega_k: f64, t: f64) -> (f64, f64) {
    let b = b.abs();
    let g = pole.gamma;
    let nu = omega_k - pole.omega_bar();
    let phi2 = params.coupling_density(omega_k);
    let d = num_complex::Complex64::new(nu, 0.5 * g);
    let denom = (d * d - b * b).norm_sqr();
    let a = nu * nu + 0.25 * g * g;
    let (s, c) = (b * t).sin_cos();
    let cross = 0.5 * g * b * (2.0 * b * t).sin();
    let y = phi2 / denom * (a * c * c + b * b * s * s + cross);
    let z = phi2 / denom * (a * s * s + b * b * c * c - cross);
    (y, z)
}

/// Sum of the two occupations, `phi^2 (nu^2 + gamma^2/4 + B^2) / |(nu + i gamma/2)^2 - B^2|^2`.
pub fn total_occupation(params: &SystemParams, pole: &PoleResult, b: f64, omega_k: f64) -> f64 {
    let g = pole.gamma;
    let nu = omega_k - pole.omega_bar();
    let d = num_complex::Complex64::new(nu, 0.5 * g);
    params.coupling_density(omega_k) * (nu * nu + 0.25 * g * g + b * b) / (d * d - b * b).norm_sqr()
}

/// Maximum of the doublet density within one width of `guess`, by golden-section search.
pub fn locate_peak(params: &SystemParams, pole: &PoleResult, b: f64, guess: f64) -> f64 {
    let h = pole.gamma;
    let f = |x: f64| spectrum_b(params, pole, b, guess + x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut c) = (-h, h);
    let mut x1 = c - r * (c - a);
    let mut x2 = a + r * (c - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (c - a) <= 1e-10 * h {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (c - a);
            f2 = f(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - r * (c - a);
            f1 = f(x1);
        }
    }
    guess + 0.5 * (a + c)
}
