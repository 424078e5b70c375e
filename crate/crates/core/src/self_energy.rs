//! Self-energy of the decaying level and its decay pole.
//!
//! With `z = i s` the bare self-energy is
//!
//! ```text
//! q(s) = -i F(i s),    F(z) = int_0^inf chi^2(w) / (w - z) dw,
//! ```
//!
//! analytic in the s-plane cut along the negative imaginary axis. Crossing the
//! cut from `Re s > 0` to `Re s < 0` continues it to `q_II(s) = q(s) + 2 pi chi^2(i s)`.
//! With the laser on, `Q(B, s) = [Q(s + iB) + Q(s - iB)] / 2`; the pole of the
//! survival amplitude solves `s + i omega0 + Q(B, s) = 0` on the determination
//! selected by [`SheetLabel`].
//!
//! Near the positive real `z` axis the 1/(w - z) singularity is removed by
//! subtracting `chi^2(z)` on the window `[0, 2 Re z]` and adding the logarithm
//! back analytically; the principal logarithm then carries exactly the
//! discontinuity of the first sheet.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form_factor::{FormFactorModel, SystemParams, TransitionSpec};
use crate::quadrature::{integrate_points, integrate_to_infinity, QuadOptions};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Riemann-sheet determination of `Q(B, s)`.
///
/// * `I`: both shifted terms on the physical sheet.
/// * `II`: only the term whose cut is `(-i inf, +iB]` continued; at `B = 0` the
///   two terms coincide and this is the usual second sheet of `Q(s)`.
/// * `III`: both terms continued (pole region for `0 < B < omega0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SheetLabel {
    I,
    II,
    III,
}

impl fmt::Display for SheetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SheetLabel::I => "I",
            SheetLabel::II => "II",
            SheetLabel::III => "III",
        })
    }
}

/// Sheet holding the decay pole: II at `B = 0` and for `B > omega0`, III in between.
pub fn pole_sheet(b: f64, omega0: f64) -> SheetLabel {
    let b = b.abs();
    if b == 0.0 || b > omega0 {
        SheetLabel::II
    } else {
        SheetLabel::III
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleMethod {
    Perturbative,
    Newton,
}

impl fmt::Display for PoleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoleMethod::Perturbative => "perturbative",
            PoleMethod::Newton => "newton",
        })
    }
}

/// Location of the decay pole, `s_pole = -i omega0 + i delta_e - gamma / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleResult {
    pub s_pole: Complex64,
    pub gamma: f64,
    pub delta_e: f64,
    pub sheet: SheetLabel,
    pub method: PoleMethod,
    pub residual: f64,
}

impl PoleResult {
    fn new(s_pole: Complex64, omega0: f64, sheet: SheetLabel, method: PoleMethod, residual: f64) -> Self {
        Self {
            s_pole,
            gamma: -2.0 * s_pole.re,
            delta_e: omega0 + s_pole.im,
            sheet,
            method,
            residual,
        }
    }

    /// Shifted emission frequency `omega0 - delta_e = -Im s_pole`.
    pub fn omega_bar(&self) -> f64 {
        -self.s_pole.im
    }

    pub const CSV_HEADER: &'static str = "re_s,im_s,gamma,delta_E,sheet,method,residual";

    pub fn to_csv_record(&self) -> String {
        format!(
            "{:.15e},{:.15e},{:.15e},{:.15e},{},{},{:.6e}",
            self.s_pole.re, self.s_pole.im, self.gamma, self.delta_e, self.sheet, self.method, self.residual
        )
    }

    pub fn record(&self) -> PoleRecord {
        PoleRecord {
            re_s: self.s_pole.re,
            im_s: self.s_pole.im,
            gamma: self.gamma,
            delta_e: self.delta_e,
            sheet: self.sheet,
            method: self.method,
            residual: self.residual,
        }
    }
}

/// Flat serializable form of a [`PoleResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub re_s: f64,
    pub im_s: f64,
    pub gamma: f64,
    #[serde(rename = "delta_E")]
    pub delta_e: f64,
    pub sheet: SheetLabel,
    pub method: PoleMethod,
    pub residual: f64,
}

impl From<PoleRecord> for PoleResult {
    fn from(r: PoleRecord) -> Self {
        Self {
            s_pole: Complex64::new(r.re_s, r.im_s),
            gamma: r.gamma,
            delta_e: r.delta_e,
            sheet: r.sheet,
            method: r.method,
            residual: r.residual,
        }
    }
}

fn quad_opts() -> QuadOptions {
    QuadOptions::with_rel_tol(1e-13)
}

/// `int_a^inf chi^2(w) g(w) dw` with the tail mapped onto the unit interval.
fn tail_integral<G>(model: &FormFactorModel, a: f64, kernel: G, extra_break: Option<f64>) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64,
{
    let scale = model.lambda_cut.max(a).max(1e-300);
    let mut breaks = vec![model.lambda_cut];
    breaks.extend(extra_break);
    let r = integrate_to_infinity(|w| kernel(w) * model.eval(w), a, scale, &breaks, quad_opts())?;
    Ok(r.value)
}

/// `F(z) = int_0^inf chi^2(w) / (w - z) dw` on the principal determination
/// (cut along `z >= 0`). `z` must not lie on the cut.
fn resolvent(model: &FormFactorModel, z: Complex64) -> Result<Complex64> {
    if z.re > 0.0 && z.im.abs() < z.re {
        let b = 2.0 * z.re;
        let chi_z = model.eval_complex(z)?;
        let window = integrate_points(
            |w: f64| (Complex64::new(model.eval(w), 0.0) - chi_z) / (w - z),
            &[0.0, z.re, b],
            quad_opts(),
        )?
        .value;
        let logs = (Complex64::new(b, 0.0) - z).ln() - (-z).ln();
        let tail = tail_integral(model, b, |w| 1.0 / (w - z), None)?;
        Ok(window + chi_z * logs + tail)
    } else {
        let hint = (z.re > 0.0).then_some(z.re);
        tail_integral(model, 0.0, |w| 1.0 / (w - z), hint)
    }
}

/// Principal-value integral `P int_0^inf chi^2(w) / (w - eta) dw` (ordinary
/// integral for `eta <= 0`).
pub fn principal_value(model: &FormFactorModel, eta: f64) -> Result<f64> {
    if !eta.is_finite() {
        return Err(Error::domain(format!("eta must be finite, got {eta}")));
    }
    if eta > 0.0 {
        let chi_eta = model.eval(eta);
        let b = 2.0 * eta;
        let window = integrate_points(
            |w: f64| {
                let d = w - eta;
                if d == 0.0 {
                    0.0
                } else {
                    (model.eval(w) - chi_eta) / d
                }
            },
            &[0.0, eta, b],
            quad_opts(),
        )?
        .value;
        // the log remainder ln((b - eta) / eta) vanishes for the symmetric window
        let tail = tail_integral(model, b, |w| Complex64::new(1.0 / (w - eta), 0.0), None)?;
        Ok(window + tail.re)
    } else {
        Ok(tail_integral(model, 0.0, |w| Complex64::new(1.0 / (w - eta), 0.0), None)?.re)
    }
}

/// Boundary value `q(-i eta + 0+) = pi chi^2(eta) theta(eta) - i P int chi^2 / (w - eta)`.
pub fn q_boundary(model: &FormFactorModel, eta: f64) -> Result<Complex64> {
    let pv = principal_value(model, eta)?;
    let re = if eta > 0.0 { PI * model.eval(eta) } else { 0.0 };
    Ok(Complex64::new(re, -pv))
}

fn on_cut(s: Complex64) -> bool {
    s.re == 0.0 && s.im <= 0.0
}

/// `q(s)` on the physical sheet. Points on the cut (negative imaginary axis)
/// are rejected; use [`q_boundary`] for boundary values there.
pub fn q_sheet_i(model: &FormFactorModel, s: Complex64) -> Result<Complex64> {
    if on_cut(s) {
        return Err(Error::domain(format!(
            "s = {s} lies on the branch cut of q; use q_boundary for the boundary value"
        )));
    }
    Ok(-I * resolvent(model, I * s)?)
}

/// Second-sheet determination reached by crossing the cut from `Re s > 0`.
///
/// Equal to `q_sheet_i` outside the third quadrant and to
/// `q_sheet_i(s) + 2 pi chi^2(i s)` inside it; continuous across the negative
/// imaginary axis (its own seam is the negative real axis).
pub fn q_sheet_ii(model: &FormFactorModel, s: Complex64) -> Result<Complex64> {
    if on_cut(s) {
        return if s.im < 0.0 {
            q_boundary(model, -s.im)
        } else {
            Err(Error::domain("s = 0 is the branch point of q"))
        };
    }
    let q1 = q_sheet_i(model, s)?;
    if s.re < 0.0 && s.im < 0.0 {
        Ok(q1 + 2.0 * PI * model.eval_complex(I * s)?)
    } else {
        Ok(q1)
    }
}

/// Laser-dressed self-energy `Q(B, s) = g^2 omega0 [q(s + iB) + q(s - iB)] / 2`
/// on the requested determination. Even in `B`.
pub fn q_of_b(params: &SystemParams, b: f64, s: Complex64, sheet: SheetLabel) -> Result<Complex64> {
    let b = b.abs();
    if params.g2 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let model = &params.form_factor;
    let scale = params.g2 * params.omega0;
    let up = s + I * b;
    let down = s - I * b;
    let half_sum = match sheet {
        SheetLabel::I if b == 0.0 => q_sheet_i(model, s)?,
        SheetLabel::I => 0.5 * (q_sheet_i(model, up)? + q_sheet_i(model, down)?),
        SheetLabel::II | SheetLabel::III if b == 0.0 => q_sheet_ii(model, s)?,
        SheetLabel::II => 0.5 * (q_sheet_i(model, up)? + q_sheet_ii(model, down)?),
        SheetLabel::III => 0.5 * (q_sheet_ii(model, up)? + q_sheet_ii(model, down)?),
    };
    Ok(scale * half_sum)
}

/// Fermi golden-rule rate `2 pi g^2 omega0 chi^2(omega0)`.
pub fn golden_rule_rate(params: &SystemParams) -> f64 {
    2.0 * PI * params.g2 * params.omega0 * params.chi2(params.omega0)
}

/// Second-order level shift `g^2 omega0 P int chi^2 / (w - omega0)`.
pub fn second_order_shift(params: &SystemParams) -> Result<f64> {
    Ok(params.g2 * params.omega0 * principal_value(&params.form_factor, params.omega0)?)
}

/// Leading-order rate with the laser on,
/// `pi g^2 omega0 [chi^2(omega0 + B) + chi^2(omega0 - B) theta(omega0 - B)]`.
pub fn gamma_first_order(params: &SystemParams, b: f64) -> f64 {
    let b = b.abs();
    let w0 = params.omega0;
    let lower = if b <= w0 { params.chi2(w0 - b) } else { 0.0 };
    PI * params.g2 * w0 * (params.chi2(w0 + b) + lower)
}

/// `gamma(B) / gamma = [(1 + b)^kappa + (1 - b)^kappa theta(1 - b)] / 2`, `b = B / omega0`.
pub fn gamma_ratio_closed_form(transition: TransitionSpec, b_over_omega0: f64) -> f64 {
    let k = transition.kappa() as i32;
    let x = b_over_omega0.abs();
    let lower = if x <= 1.0 { (1.0 - x).powi(k) } else { 0.0 };
    0.5 * ((1.0 + x).powi(k) + lower)
}

/// Large-field rate `(gamma / 2) chi^2(B) / chi^2(omega0)`, for `B > Lambda` only.
pub fn gamma_large_b(params: &SystemParams, b: f64) -> Result<f64> {
    let b = b.abs();
    if b <= params.form_factor.lambda_cut {
        return Err(Error::precondition(format!(
            "large-B formula needs B > Lambda = {}, got {b}",
            params.form_factor.lambda_cut
        )));
    }
    log::debug!("B = {b} exceeds the cutoff: unphysical regime");
    Ok(0.5 * golden_rule_rate(params) * params.chi2(b) / params.chi2(params.omega0))
}

fn check_radius(params: &SystemParams, b: f64) -> Result<f64> {
    let radius = (b - params.omega0).abs();
    if radius <= 1e-14 * params.omega0 {
        return Err(Error::DegenerateRadius(b));
    }
    Ok(radius)
}

/// First-order pole,
/// `s = -i omega0 - g^2 omega0 [q_b(omega0 + B) + q_b(omega0 - B)] / 2`.
pub fn pole_perturbative(params: &SystemParams, b: f64) -> Result<PoleResult> {
    let b = b.abs();
    check_radius(params, b)?;
    let w0 = params.omega0;
    let model = &params.form_factor;
    let s = if params.g2 == 0.0 {
        Complex64::new(0.0, -w0)
    } else {
        let qp = q_boundary(model, w0 + b)?;
        let qm = if b == 0.0 { qp } else { q_boundary(model, w0 - b)? };
        Complex64::new(0.0, -w0) - 0.5 * params.g2 * w0 * (qp + qm)
    };
    let sheet = pole_sheet(b, w0);
    let residual = (s + I * w0 + q_of_b(params, b, s, sheet)?).norm();
    Ok(PoleResult::new(s, w0, sheet, PoleMethod::Perturbative, residual))
}

#[derive(Debug, Clone, Copy)]
pub struct PoleOptions {
    /// Accepted residual `|s + i omega0 + Q|`, in units of omega0.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Central-difference step for dQ/ds, in units of omega0.
    pub derivative_step: f64,
}

impl Default for PoleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iter: 50,
            derivative_step: 1e-7,
        }
    }
}

/// Newton refinement of the decay pole on the sheet chosen by [`pole_sheet`],
/// seeded with [`pole_perturbative`].
pub fn pole_newton(params: &SystemParams, b: f64, opts: PoleOptions) -> Result<PoleResult> {
    let b = b.abs();
    let radius = check_radius(params, b)?;
    let w0 = params.omega0;
    let sheet = pole_sheet(b, w0);
    if b > w0 {
        log::warn!("B = {b} > omega0 = {w0}: pole computed on sheet II but the regime is unphysical");
    }
    let origin = Complex64::new(0.0, -w0);
    let seed = pole_perturbative(params, b)?.s_pole;
    let outside = |s: Complex64| (s - origin).norm() >= radius;
    if outside(seed) {
        return Err(Error::WrongSheet {
            iterate: seed,
            radius,
            sheet: sheet.to_string(),
        });
    }
    let f = |s: Complex64| -> Result<Complex64> { Ok(s - origin + q_of_b(params, b, s, sheet)?) };
    let h = opts.derivative_step * w0;
    let tol = opts.tolerance * w0;

    let mut s = seed;
    let mut trail = vec![s];
    let mut last_step = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let fs = f(s)?;
        let dq = (q_of_b(params, b, s + I * h, sheet)? - q_of_b(params, b, s - I * h, sheet)?) / (2.0 * I * h);
        let step = fs / (1.0 + dq);
        s -= step;
        trail.push(s);
        if outside(s) {
            return Err(Error::WrongSheet {
                iterate: s,
                radius,
                sheet: sheet.to_string(),
            });
        }
        let step_norm = step.norm();
        let displacement = (s - origin).norm();
        // stop at the quadrature noise floor: steps no longer shrinking
        if step_norm <= 1e-11 * displacement || step_norm == 0.0 || step_norm >= last_step {
            let residual = f(s)?.norm();
            if residual <= tol {
                return Ok(PoleResult::new(s, w0, sheet, PoleMethod::Newton, residual));
            }
            if step_norm >= last_step {
                return Err(Error::NoConvergence {
                    iterations: trail.len() - 1,
                    residual,
                    trail,
                });
            }
        }
        last_step = step_norm;
    }
    let residual = f(s)?.norm();
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
        trail,
    })
}
