//! Dressed states, partial decay rates, and the extension to a ladder of
//! off-resonant levels.
//!
//! For a ladder with strengths `f_j` and detunings `delta_j` (the laser level
//! itself being `f = 1, delta = 0`) the branch points `-i sigma` of the
//! self-energy are the zeros of
//!
//! ```text
//! R(w) = w + B^2 sum_j f_j / (delta_j - w)
//! ```
//!
//! and `1/R(w) = sum_i c_i / (w - sigma_i)` with `c_i = 1 / R'(sigma_i)`.
//! `R` increases strictly between consecutive poles, so each gap holds exactly
//! one root: eigenvalues of the companion matrix are polished inside their
//! bracket.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form_factor::SystemParams;
use crate::quadrature::{integrate_to_infinity, QuadOptions};
use crate::self_energy::{gamma_ratio_closed_form, golden_rule_rate, q_sheet_i};

/// Autler-Townes doublet of the laser-coupled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedDoublet {
    pub energies: (f64, f64),
    /// Coupling of each dressed state to the photon field relative to the bare `phi`.
    pub coupling_scale: f64,
    pub splitting: f64,
}

pub fn dressed_doublet(b: f64) -> Result<DressedDoublet> {
    if !(b >= 0.0) {
        return Err(Error::domain(format!("B must be >= 0, got {b}")));
    }
    Ok(DressedDoublet {
        energies: (b, -b),
        coupling_scale: FRAC_1_SQRT_2,
        splitting: 2.0 * b,
    })
}

/// Decay rates into the dressed states, `gamma_+- = pi g^2 omega0 chi^2(omega0 -+ B)`.
/// The `+` channel closes for `B > omega0`.
pub fn partial_rates(params: &SystemParams, b: f64) -> (f64, f64) {
    let b = b.abs();
    let w0 = params.omega0;
    let scale = PI * params.g2 * w0;
    let plus = if b <= w0 { scale * params.chi2(w0 - b) } else { 0.0 };
    (plus, scale * params.chi2(w0 + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderLevel {
    /// `|Phi_j|^2 / |Phi_3|^2`.
    pub f: f64,
    /// `Omega_j - Omega_3`.
    pub delta: f64,
}

/// Off-resonant levels `j = 4..N`, sorted by `|delta|`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelLadder {
    entries: Vec<LadderLevel>,
}

impl LevelLadder {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(mut entries: Vec<LadderLevel>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !(e.f >= 0.0 && e.f.is_finite()) {
                return Err(Error::domain(format!("ladder level {i}: f must be >= 0, got {}", e.f)));
            }
            if !(e.delta != 0.0 && e.delta.is_finite()) {
                return Err(Error::domain(format!("ladder level {i}: delta must be nonzero, got {}", e.delta)));
            }
        }
        entries.sort_by(|a, b| a.delta.abs().total_cmp(&b.delta.abs()).then(a.delta.total_cmp(&b.delta)));
        Ok(Self { entries })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(f, delta)| LadderLevel { f, delta }).collect())
    }

    pub fn entries(&self) -> &[LadderLevel] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of levels including 1, 2 and 3.
    pub fn n_levels(&self) -> usize {
        self.entries.len() + 3
    }

    /// `(f, delta)` for all laser-coupled levels, the resonant one first.
    fn poles(&self) -> Vec<(f64, f64)> {
        std::iter::once((1.0, 0.0)).chain(self.entries.iter().map(|e| (e.f, e.delta))).collect()
    }

    /// `R(w)` and `R'(w)`.
    pub fn resolvent_denominator(&self, b: f64, w: f64) -> (f64, f64) {
        let b2 = b * b;
        self.poles().iter().fold((w, 1.0), |(r, dr), &(f, d)| {
            let x = 1.0 / (d - w);
            (r + b2 * f * x, dr + b2 * f * x * x)
        })
    }
}

/// Branch-point shifts `sigma_i` and weights `c_i`, sorted by `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionDecomp {
    pub shifts: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PartialFractionDecomp {
    fn sorted(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            shifts: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,c\n");
        for (s, c) in self.shifts.iter().zip(&self.weights) {
            out.push_str(&format!("{s:.15e},{c:.15e}\n"));
        }
        out
    }
}

/// Coefficients (ascending powers) of `R(w) prod_j (delta_j - w)`.
fn cleared_polynomial(poles: &[(f64, f64)], b: f64) -> Vec<f64> {
    fn mul(p: &[f64], d: f64) -> Vec<f64> {
        // p(w) * (d - w)
        let mut out = vec![0.0; p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            out[k] += d * c;
            out[k + 1] -= c;
        }
        out
    }
    let mut poly = vec![0.0, 1.0];
    for &(_, d) in poles {
        poly = mul(&poly, d);
    }
    let b2 = b * b;
    for (j, &(f, _)) in poles.iter().enumerate() {
        let mut term = vec![b2 * f];
        for (i, &(_, d)) in poles.iter().enumerate() {
            if i != j {
                term = mul(&term, d);
            }
        }
        for (k, c) in term.into_iter().enumerate() {
            poly[k] += c;
        }
    }
    poly
}

fn companion_roots(poly: &[f64]) -> Vec<f64> {
    let n = poly.len() - 1;
    let lead = poly[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -poly[i] / lead;
    }
    let mut roots: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Safeguarded Newton for the unique zero of the increasing `R` in `(lo, hi)`.
fn polish(ladder_poles: &[(f64, f64)], b: f64, lo: f64, hi: f64, start: f64) -> f64 {
    let eval = |w: f64| {
        let b2 = b * b;
        ladder_poles.iter().fold((w, 1.0), |(r, dr), &(f, d)| {
            let x = 1.0 / (d - w);
            (r + b2 * f * x, dr + b2 * f * x * x)
        })
    };
    let (mut a, mut c) = (lo, hi);
    let mut w = if start > lo && start < hi { start } else { bracket_mid(lo, hi) };
    for _ in 0..200 {
        let (r, dr) = eval(w);
        if r == 0.0 {
            return w;
        }
        if r < 0.0 {
            a = w;
        } else {
            c = w;
        }
        let mut next = w - r / dr;
        if !(next > a && next < c) {
            next = bracket_mid(a, c);
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        w = next;
    }
    w
}

fn bracket_mid(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (false, true) => hi - 1.0 - hi.abs(),
        (true, false) => lo + 1.0 + lo.abs(),
        (false, false) => 0.0,
    }
}

/// Distinct laser-coupled poles with their summed strengths, plus the trivial
/// roots left behind by zero-strength or repeated levels.
fn reduce_poles(ladder: &LevelLadder) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut poles = ladder.poles();
    poles.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut trivial = Vec::new();
    for (f, d) in poles {
        match merged.last_mut() {
            Some(last) if last.1 == d => {
                last.0 += f;
                trivial.push(d);
            }
            _ => merged.push((f, d)),
        }
    }
    let mut active = Vec::new();
    for (f, d) in merged {
        if f > 0.0 {
            active.push((f, d));
        } else {
            trivial.push(d);
        }
    }
    (active, trivial)
}

fn decompose(ladder: &LevelLadder, b: f64) -> PartialFractionDecomp {
    let b = b.abs();
    if b == 0.0 {
        let mut pairs = vec![(0.0, 0.5), (0.0, 0.5)];
        pairs.extend(ladder.entries.iter().map(|e| (e.delta, 0.0)));
        return PartialFractionDecomp::sorted(pairs);
    }
    let (active, trivial) = reduce_poles(ladder);
    let guesses = companion_roots(&cleared_polynomial(&active, b));
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(active.iter().map(|p| p.1));
    edges.push(f64::INFINITY);
    let mut pairs = Vec::with_capacity(active.len() + 1 + trivial.len());
    for gap in edges.windows(2) {
        let (lo, hi) = (gap[0], gap[1]);
        let start = guesses.iter().copied().find(|&g| g > lo && g < hi).unwrap_or(f64::NAN);
        let sigma = polish(&active, b, lo, hi, start);
        let dr = active.iter().fold(1.0, |acc, &(f, d)| acc + b * b * f / ((d - sigma) * (d - sigma)));
        pairs.push((sigma, 1.0 / dr));
    }
    pairs.extend(trivial.into_iter().map(|d| (d, 0.0)));
    PartialFractionDecomp::sorted(pairs)
}

const CLUSTER: f64 = 1e-10;

fn cluster_gap(shifts: &[f64]) -> Option<(f64, f64)> {
    shifts.windows(2).find(|w| w[1] - w[0] < CLUSTER).map(|w| (w[0], w[1]))
}

/// All `N - 1` branch-point shifts `sigma_i`, ascending.
pub fn branch_points(ladder: &LevelLadder, b: f64) -> Vec<f64> {
    let d = decompose(ladder, b);
    if b != 0.0 {
        if let Some((x, y)) = cluster_gap(&d.shifts) {
            log::warn!("branch points {x} and {y} closer than {CLUSTER:e}: roots ill-conditioned");
        }
    }
    d.shifts
}

/// Shifts and residue weights of `1/R`. Fails when two shifts carrying weight coincide.
pub fn partial_fractions(ladder: &LevelLadder, b: f64) -> Result<PartialFractionDecomp> {
    let d = decompose(ladder, b);
    if b != 0.0 {
        let weighted: Vec<f64> = d.shifts.iter().zip(&d.weights).filter(|(_, &c)| c > 0.0).map(|(&s, _)| s).collect();
        if let Some((x, y)) = cluster_gap(&weighted) {
            return Err(Error::Conditioning(format!("branch points {x} and {y} are degenerate")));
        }
    }
    Ok(d)
}

/// Second-order expansion in `B` of shifts and weights.
pub fn perturbative_shifts(ladder: &LevelLadder, b: f64) -> PartialFractionDecomp {
    let b2 = b * b;
    let s1: f64 = ladder.entries.iter().map(|e| e.f / e.delta).sum();
    let s2: f64 = ladder.entries.iter().map(|e| e.f / (e.delta * e.delta)).sum();
    let b = b.abs();
    let mut pairs = vec![
        (b - 0.5 * b2 * s1, 0.5 - 0.25 * b * s1 - 0.5 * b2 * s2),
        (-b - 0.5 * b2 * s1, 0.5 + 0.25 * b * s1 - 0.5 * b2 * s2),
    ];
    pairs.extend(
        ladder
            .entries
            .iter()
            .map(|e| (e.delta + b2 * e.f / e.delta, b2 * e.f / (e.delta * e.delta))),
    );
    PartialFractionDecomp::sorted(pairs)
}

/// `gamma sum_i c_i (1 - sigma_i / omega0)^kappa theta(omega0 - sigma_i)` for a given decomposition.
pub fn gamma_from_decomposition(params: &SystemParams, decomp: &PartialFractionDecomp) -> f64 {
    let w0 = params.omega0;
    let k = params.kappa() as i32;
    let factor: f64 = decomp
        .shifts
        .iter()
        .zip(&decomp.weights)
        .filter(|(&s, _)| s <= w0)
        .map(|(&s, &c)| c * (1.0 - s / w0).powi(k))
        .sum();
    golden_rule_rate(params) * factor
}

/// Modified decay rate with the ladder, from the exact branch points.
pub fn gamma_many(params: &SystemParams, ladder: &LevelLadder, b: f64) -> Result<f64> {
    let d = partial_fractions(ladder, b)?;
    if let Some(&lowest) = d.shifts.first() {
        if lowest > params.omega0 {
            log::warn!("lowest shift {lowest} exceeds omega0: every channel gated off");
        }
    }
    Ok(gamma_from_decomposition(params, &d))
}

/// Same rate from the second-order shifts and weights.
pub fn gamma_many_perturbative(params: &SystemParams, ladder: &LevelLadder, b: f64) -> f64 {
    gamma_from_decomposition(params, &perturbative_shifts(ladder, b))
}

/// `B* = B [1 + sum_l f_l omega0 / (2 delta_l)]`, valid when every `delta_l > omega0`.
pub fn effective_b_star(ladder: &LevelLadder, b: f64, omega0: f64) -> Result<f64> {
    if let Some(e) = ladder.entries.iter().find(|e| e.delta <= omega0) {
        return Err(Error::precondition(format!(
            "effective B needs every delta > omega0 = {omega0}; found delta = {}",
            e.delta
        )));
    }
    let sum: f64 = ladder.entries.iter().map(|e| e.f * omega0 / (2.0 * e.delta)).sum();
    Ok(b * (1.0 + sum))
}

/// Three-level rate at the effective coupling.
pub fn gamma_at_b_star(params: &SystemParams, ladder: &LevelLadder, b: f64) -> Result<f64> {
    let bs = effective_b_star(ladder, b, params.omega0)?;
    Ok(golden_rule_rate(params) * gamma_ratio_closed_form(params.transition, bs / params.omega0))
}

/// Ladder self-energy on the physical sheet assembled as `sum_i c_i Q(s + i sigma_i)`.
pub fn q_many(params: &SystemParams, decomp: &PartialFractionDecomp, s: Complex64) -> Result<Complex64> {
    let scale = params.g2 * params.omega0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&sigma, &c) in decomp.shifts.iter().zip(&decomp.weights) {
        if c != 0.0 {
            acc += c * q_sheet_i(&params.form_factor, s + Complex64::new(0.0, sigma))?;
        }
    }
    Ok(scale * acc)
}

/// Ladder self-energy by direct quadrature of
/// `g^2 omega0 chi^2(w) / (s + i w + B^2 sum_j f_j / (s + i delta_j + i w))`.
pub fn q_many_direct(params: &SystemParams, ladder: &LevelLadder, b: f64, s: Complex64) -> Result<Complex64> {
    let poles = ladder.poles();
    let b2 = b * b;
    let i = Complex64::new(0.0, 1.0);
    let kernel = |w: f64| {
        let u = s + i * w;
        let tail: Complex64 = poles.iter().map(|&(f, d)| f / (u + i * d)).sum();
        Complex64::new(params.coupling_density(w), 0.0) / (u + b2 * tail)
    };
    let lam = params.form_factor.lambda_cut;
    let mut breaks = vec![lam];
    breaks.extend(poles.iter().map(|p| -s.im - p.1).filter(|&x| x > 0.0));
    Ok(integrate_to_infinity(kernel, 0.0, lam, &breaks, QuadOptions::with_rel_tol(1e-13))?.value)
}
