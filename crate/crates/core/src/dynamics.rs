//! Time-domain integration of the amplitude equations on a discretized photon
//! continuum.
//!
//! ```text
//! i x'   = omega0 x + sum_k phi_k y_k
//! i y_k' = phi_k x + omega_k y_k + B z_k
//! i z_k' = B y_k + omega_k z_k
//! ```
//!
//! In the basis `(y_k +- z_k) / sqrt 2` the modes decouple into a star of `2M`
//! oscillators at `omega_k +- B` coupled to `x` with strength `phi_k / sqrt 2`.
//! The integrator works in the frame rotating at `omega0` and treats the
//! diagonal part exactly (exponential time differencing, fourth order), so the
//! step size is set by the coupling dynamics alone. Steps are controlled by
//! step doubling.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form_factor::SystemParams;
use crate::quadrature::{gauss_legendre, integrate_points, QuadOptions};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridRule {
    /// Midpoint rule on equal cells.
    Uniform,
    /// Composite 8-point Gauss-Legendre panels, graded towards the resonances.
    GaussLegendre,
}

/// Discretized continuum: nodes `omega_k` with `|phi_k|^2 = w_k g^2 omega0 chi^2(omega_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub couplings2: Vec<f64>,
    pub omega_max: f64,
    pub rule: GridRule,
    /// Frequencies around which the nodes are concentrated.
    pub foci: Vec<f64>,
    /// `|sum |phi_k|^2 - int_0^omega_max g^2 omega0 chi^2| / int`.
    pub sum_rule_error: f64,
}

impl ModeGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn coupling_sum(&self) -> f64 {
        self.couplings2.iter().sum()
    }

    /// Largest node spacing within `half_width` of `omega`.
    pub fn local_spacing(&self, omega: f64, half_width: f64) -> f64 {
        let lo = self.nodes.partition_point(|&w| w < omega - half_width).saturating_sub(1);
        let hi = (self.nodes.partition_point(|&w| w <= omega + half_width) + 1).min(self.nodes.len());
        self.nodes[lo..hi].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Recurrence time `2 pi / d omega` at the coarsest resonance.
    pub fn recurrence_time(&self) -> f64 {
        let gap = self
            .foci
            .iter()
            .filter(|&&f| f > 0.0 && f < self.omega_max)
            .map(|&f| self.local_spacing(f, RESONANCE_BAND * f.max(1.0)))
            .fold(0.0, f64::max);
        if gap > 0.0 {
            2.0 * std::f64::consts::PI / gap
        } else {
            f64::INFINITY
        }
    }
}

/// Node-density profile `c0 + sum_f 1 / (eps (1 + ((w - f) / eps)^2))` with
/// foci at the resonances `omega0 +- B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grading {
    pub background: f64,
    pub focus_width: f64,
}

impl Default for Grading {
    fn default() -> Self {
        Self {
            background: 0.02,
            focus_width: 0.02,
        }
    }
}

/// Half-width of the band around each resonance whose node spacing sets the recurrence time.
pub const RESONANCE_BAND: f64 = 0.02;

fn panel_edges(omega_max: f64, panels: usize, foci: &[f64], grading: Grading) -> Vec<f64> {
    let eps = grading.focus_width;
    let cdf = |w: f64| {
        grading.background * w + foci.iter().map(|&f| ((w - f) / eps).atan() - (-f / eps).atan()).sum::<f64>()
    };
    let total = cdf(omega_max);
    let mut edges = Vec::with_capacity(panels + 1);
    edges.push(0.0);
    for i in 1..panels {
        let target = total * i as f64 / panels as f64;
        let (mut lo, mut hi) = (*edges.last().unwrap(), omega_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * omega_max {
                break;
            }
        }
        edges.push(0.5 * (lo + hi));
    }
    edges.push(omega_max);
    edges
}

/// Builds an `m`-mode grid on `[0, omega_max]` for a run at laser coupling `b`.
/// Gauss-Legendre grids need `m` divisible by 8.
pub fn build_mode_grid(params: &SystemParams, omega_max: f64, m: usize, rule: GridRule, b: f64) -> Result<ModeGrid> {
    build_mode_grid_with(params, omega_max, m, rule, b, Grading::default())
}

pub fn build_mode_grid_with(
    params: &SystemParams,
    omega_max: f64,
    m: usize,
    rule: GridRule,
    b: f64,
    grading: Grading,
) -> Result<ModeGrid> {
    let w0 = params.omega0;
    let b = b.abs();
    if m < 100 {
        return Err(Error::Refinement(format!("{m} modes is too few; use at least 100")));
    }
    if !(omega_max >= 10.0 * (w0 + b)) {
        return Err(Error::precondition(format!(
            "omega_max = {omega_max} must be at least 10 (omega0 + B) = {}",
            10.0 * (w0 + b)
        )));
    }
    let mut foci = vec![w0 + b];
    if b > 0.0 && w0 - b > 0.0 {
        foci.insert(0, w0 - b);
    }
    let (nodes, weights) = match rule {
        GridRule::Uniform => {
            let dw = omega_max / m as f64;
            ((0..m).map(|k| (k as f64 + 0.5) * dw).collect::<Vec<_>>(), vec![dw; m])
        }
        GridRule::GaussLegendre => {
            if m % PANEL_ORDER != 0 {
                return Err(Error::precondition(format!("Gauss-Legendre grids need a multiple of {PANEL_ORDER} modes, got {m}")));
            }
            let (x, w) = gauss_legendre(PANEL_ORDER);
            let edges = panel_edges(omega_max, m / PANEL_ORDER, &foci, grading);
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for e in edges.windows(2) {
                let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
                for (xi, wi) in x.iter().zip(&w) {
                    nodes.push(mid + half * xi);
                    weights.push(half * wi);
                }
            }
            (nodes, weights)
        }
    };
    let couplings2: Vec<f64> = nodes.iter().zip(&weights).map(|(&w, &wt)| wt * params.coupling_density(w)).collect();
    let mut points = vec![0.0];
    points.extend(foci.iter().copied().filter(|&f| f < omega_max));
    points.push(params.form_factor.lambda_cut.min(omega_max));
    points.push(omega_max);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let exact = integrate_points(|w: f64| params.coupling_density(w), &points, QuadOptions::with_rel_tol(1e-12))?.value;
    let sum: f64 = couplings2.iter().sum();
    let sum_rule_error = if exact > 0.0 { (sum - exact).abs() / exact } else { 0.0 };
    Ok(ModeGrid {
        nodes,
        weights,
        couplings2,
        omega_max,
        rule,
        foci,
        sum_rule_error,
    })
}

/// Lab-frame amplitudes at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub t: f64,
    pub x: Complex64,
    pub y: Vec<Complex64>,
    pub z: Vec<Complex64>,
}

impl AmplitudeState {
    pub fn survival(&self) -> f64 {
        self.x.norm_sqr()
    }

    /// Probability carried by the photon modes, `sum |y|^2 + |z|^2`.
    pub fn emitted(&self) -> f64 {
        self.y.iter().chain(&self.z).map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.survival() + self.emitted()
    }
}

/// Degree of the polynomial representing `x` on one step.
const DEGREE: usize = 4;
const THETA: [f64; DEGREE] = [0.25, 0.5, 0.75, 1.0];

/// `phi_k(z)` for `k = 0..=6`: `phi_0 = e^z`, `phi_{k+1} = (phi_k - 1/k!) / z`.
fn phis(z: Complex64) -> [Complex64; 7] {
    let mut f = [Complex64::new(0.0, 0.0); 7];
    if z.norm() < 2.0 {
        // phi_k(z) = sum_n z^n / (n + k)!
        let mut coef = [1.0f64; 7];
        for k in 1..7 {
            coef[k] = coef[k - 1] / k as f64;
        }
        let mut zn = Complex64::new(1.0, 0.0);
        for n in 0..40 {
            for k in 0..7 {
                f[k] += zn * coef[k];
                coef[k] /= (n + k + 1) as f64;
            }
            zn *= z;
        }
    } else {
        f[0] = z.exp();
        let mut fact = 1.0;
        for k in 0..6 {
            f[k + 1] = (f[k] - 1.0 / fact) / z;
            fact *= (k + 1) as f64;
        }
    }
    f
}

const FACT: [f64; 7] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

struct Coeffs {
    e: Vec<Complex64>,
    // c_j theta_k h phi_1(l_j theta_k h)
    a: [Vec<Complex64>; DEGREE],
    // -i c_j n! h phi_{n+1}(l_j h)
    bm: [Vec<Complex64>; DEGREE + 1],
    // G_0(theta_k)
    g0: [Complex64; DEGREE],
    solve: nalgebra::Matrix4<Complex64>,
}

/// Star system in the rotating frame: `i x' = sum c_j m_j`, `i m_j' = c_j x + lambda_j m_j`.
///
/// One step represents `x` on `[0, h]` as a quartic in `s / h`, integrates the
/// modes against it exactly and fixes the quartic by collocation of the
/// integrated `x` equation at `h/4, h/2, 3h/4, h`.
struct Star {
    lambda: Vec<f64>,
    c: Vec<f64>,
}

impl Star {
    fn coeffs(&self, h: f64) -> Result<Coeffs> {
        let n = self.lambda.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut e = Vec::with_capacity(n);
        let mut a: [Vec<Complex64>; DEGREE] = std::array::from_fn(|_| Vec::with_capacity(n));
        let mut bm: [Vec<Complex64>; DEGREE + 1] = std::array::from_fn(|_| Vec::with_capacity(n));
        // sum_j c_j^2 phi_{n+2}(l_j theta_k h)
        let mut kern = [[zero; DEGREE + 1]; DEGREE];
        for (&l, &c) in self.lambda.iter().zip(&self.c) {
            let z = Complex64::new(0.0, -l * h);
            let full = phis(z);
            e.push(full[0]);
            for (nn, col) in bm.iter_mut().enumerate() {
                col.push(-I * c * FACT[nn] * h * full[nn + 1]);
            }
            for (k, &th) in THETA.iter().enumerate() {
                let f = if th == 1.0 { full } else { phis(th * z) };
                a[k].push(c * th * h * f[1]);
                for nn in 0..=DEGREE {
                    kern[k][nn] += c * c * f[nn + 2];
                }
            }
        }
        let g = |k: usize, nn: usize| FACT[nn] * THETA[k].powi(nn as i32 + 2) * h * h * kern[k][nn];
        let mut mat = nalgebra::Matrix4::<Complex64>::zeros();
        for k in 0..DEGREE {
            for nn in 1..=DEGREE {
                mat[(k, nn - 1)] = THETA[k].powi(nn as i32) + g(k, nn);
            }
        }
        let solve = mat
            .try_inverse()
            .ok_or_else(|| Error::Stiffness { t: 0.0, step: h, hint: "singular collocation system".into() })?;
        let g0 = std::array::from_fn(|k| g(k, 0));
        Ok(Coeffs { e, a, bm, g0, solve })
    }

    fn step(&self, co: &Coeffs, x: Complex64, m: &[Complex64], m_out: &mut [Complex64]) -> Complex64 {
        let mut s = [Complex64::new(0.0, 0.0); DEGREE];
        for (j, &mj) in m.iter().enumerate() {
            for k in 0..DEGREE {
                s[k] += co.a[k][j] * mj;
            }
        }
        let rhs = nalgebra::Vector4::from_fn(|k, _| -I * s[k] - x * co.g0[k]);
        let sol = co.solve * rhs;
        let coef = [x, sol[0], sol[1], sol[2], sol[3]];
        for (j, out) in m_out.iter_mut().enumerate() {
            let mut v = co.e[j] * m[j];
            for (nn, &an) in coef.iter().enumerate() {
                v += an * co.bm[nn][j];
            }
            *out = v;
        }
        coef.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    /// Bound on the accumulated local error over the run.
    pub tol: f64,
    /// First trial step.
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            initial_step: 1e-3,
            max_steps: 50_000_000,
        }
    }
}

/// Integrates from `x = 1, y = z = 0` and records the state at each requested
/// time (ascending, nonnegative).
pub fn evolve(grid: &ModeGrid, params: &SystemParams, b: f64, times: &[f64], opts: EvolveOptions) -> Result<Vec<AmplitudeState>> {
    let b = b.abs();
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::domain("sample times must be nonnegative and ascending"));
    }
    let t_final = times.last().copied().unwrap_or(0.0);
    let t_rec = grid.recurrence_time();
    if t_final > 0.5 * t_rec {
        return Err(Error::Recurrence {
            t_final,
            t_recurrence: t_rec,
        });
    }
    let w0 = params.omega0;
    let mm = grid.len();
    let mut lambda = Vec::with_capacity(2 * mm);
    let mut c = Vec::with_capacity(2 * mm);
    for (&w, &p2) in grid.nodes.iter().zip(&grid.couplings2) {
        let amp = p2.sqrt() * FRAC_1_SQRT_2;
        lambda.push(w + b - w0);
        c.push(amp);
        lambda.push(w - b - w0);
        c.push(amp);
    }
    let star = Star { lambda, c };

    let mut x = Complex64::new(1.0, 0.0);
    let mut m = vec![Complex64::new(0.0, 0.0); 2 * mm];
    let mut t = 0.0;
    let mut h = 2f64.powi(opts.initial_step.min(t_final.max(f64::MIN_POSITIVE)).log2().floor() as i32);
    let mut cache: HashMap<u64, Coeffs> = HashMap::new();
    let (mut full, mut half1, mut half2) = (m.clone(), m.clone(), m.clone());
    let mut out = Vec::with_capacity(times.len());
    let mut steps = 0usize;
    let record = |t: f64, x: Complex64, m: &[Complex64]| {
        let rot = Complex64::from_polar(1.0, -w0 * t);
        let mut y = Vec::with_capacity(mm);
        let mut z = Vec::with_capacity(mm);
        for k in 0..mm {
            let (a, bb) = (m[2 * k], m[2 * k + 1]);
            y.push(rot * (a + bb) * FRAC_1_SQRT_2);
            z.push(rot * (a - bb) * FRAC_1_SQRT_2);
        }
        AmplitudeState { t, x: rot * x, y, z }
    };
    let span = t_final.max(f64::MIN_POSITIVE);
    for &target in times {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Stiffness {
                    t,
                    step: h,
                    hint: format!("step budget of {} exhausted; loosen tol or reduce omega_max", opts.max_steps),
                });
            }
            let hs = h.min(target - t);
            if hs <= 1e-13 * t.max(1.0) && target - t > hs {
                return Err(Error::Stiffness {
                    t,
                    step: hs,
                    hint: "step size underflow; loosen tol, reduce omega_max or the mode count".into(),
                });
            }
            if cache.len() > 64 {
                cache.clear();
            }
            for hh in [hs, 0.5 * hs] {
                if let std::collections::hash_map::Entry::Vacant(v) = cache.entry(hh.to_bits()) {
                    v.insert(star.coeffs(hh)?);
                }
            }
            let xf = star.step(&cache[&hs.to_bits()], x, &m, &mut full);
            let xh = {
                let co = &cache[&(0.5 * hs).to_bits()];
                let x1 = star.step(co, x, &m, &mut half1);
                star.step(co, x1, &half1, &mut half2)
            };
            let err = full
                .iter()
                .zip(&half2)
                .map(|(a, b)| (a - b).norm())
                .fold((xf - xh).norm(), f64::max)
                / 31.0;
            let allowed = opts.tol * hs / span;
            if err <= allowed || hs <= 1e-13 * t.max(1.0) {
                t += hs;
                x = xh;
                std::mem::swap(&mut m, &mut half2);
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 4.0) };
            if hs == h || factor < 1.0 {
                // powers of two keep the coefficient cache small
                h = 2f64.powi((hs * factor).log2().floor() as i32);
            }
        }
        out.push(record(target, x, &m));
    }
    log::debug!("evolve: {steps} steps over {} modes", 2 * mm);
    Ok(out)
}

/// `P(t) = |x(t)|^2` as `(t, P)` pairs.
pub fn survival_probability(series: &[AmplitudeState]) -> Vec<(f64, f64)> {
    series.iter().map(|s| (s.t, s.survival())).collect()
}

/// Largest `| ||state||^2 - 1 |` along the series.
pub fn norm_drift(series: &[AmplitudeState]) -> f64 {
    series.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// Pole-approximation survival `exp(-gamma t)`.
pub fn ww_survival(pole: &crate::self_energy::PoleResult, t: f64) -> f64 {
    (-pole.gamma * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub gamma: f64,
    /// Standard error of the fitted rate.
    pub sigma: f64,
    /// RMS residual of `ln P` relative to its drop across the window.
    pub rel_residual: f64,
    pub points: usize,
}

/// Largest relative residual accepted by [`fit_decay_rate`].
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-2;

/// Least-squares fit of `ln P = a - gamma t` on samples with `t1 <= t <= t2`.
pub fn fit_decay_rate(curve: &[(f64, f64)], t1: f64, t2: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = curve.iter().copied().filter(|&(t, _)| t >= t1 && t <= t2).collect();
    if pts.len() < 3 {
        return Err(Error::FitQuality(format!("only {} samples in [{t1}, {t2}]", pts.len())));
    }
    if pts.iter().any(|&(_, p)| !(p > 0.0)) {
        return Err(Error::FitQuality("survival not positive on the window".into()));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let lm = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1.ln() - lm)).sum();
    let slope = sxy / sxx;
    let ss: f64 = pts.iter().map(|p| (p.1.ln() - lm - slope * (p.0 - tm)).powi(2)).sum();
    let rms = (ss / n).sqrt();
    let drop = (pts.last().unwrap().1.ln() - pts[0].1.ln()).abs();
    let rel_residual = if drop > 0.0 { rms / drop } else { f64::INFINITY };
    let sigma = if pts.len() > 2 { (ss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    if rel_residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::FitQuality(format!(
            "log-survival is not linear on [{t1}, {t2}]: relative residual {rel_residual:.3e}"
        )));
    }
    Ok(DecayFit {
        gamma: -slope,
        sigma,
        rel_residual,
        points: pts.len(),
    })
}

/// Default fit window `[0.5 / gamma_seed, 5 / gamma_seed]`.
pub fn default_fit_window(gamma_seed: f64) -> (f64, f64) {
    (0.5 / gamma_seed, 5.0 / gamma_seed)
}

pub const SURVIVAL_CSV_HEADER: &str = "t,P";

pub fn survival_csv(curve: &[(f64, f64)]) -> String {
    let mut out = format!("{SURVIVAL_CSV_HEADER}\n");
    for (t, p) in curve {
        out.push_str(&format!("{t:.15e},{p:.15e}\n"));
    }
    out
}
