//! Subcommand bodies. Each returns a [`Table`] that renders to CSV with a
//! `#`-prefixed header carrying the resolved config and run metadata.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dressed::{
    dressed_doublet, effective_b_star, gamma_at_b_star, gamma_many, gamma_many_perturbative, partial_fractions,
    partial_rates,
};
use crate::dynamics::{
    build_mode_grid, default_fit_window, evolve, fit_decay_rate, norm_drift, survival_probability, ww_survival,
};
use crate::error::{Error, Result};
use crate::form_factor::TransitionSpec;
use crate::lab_units::{derived_power_coefficient, rabi_from_b, POWER_COEFFICIENT};
use crate::self_energy::{gamma_first_order, gamma_ratio_closed_form, pole_newton, PoleResult};
use crate::spectrum::{
    emission_normalization, gamma_from_normalization_at, locate_peak, spectrum_b0, spectrum_b_with, LineWidths,
};

/// CSV body plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(String, String)>,
    pub columns: String,
    pub rows: Vec<String>,
}

impl Table {
    fn new(command: &'static str, columns: &str) -> Self {
        Self {
            command,
            meta: Vec::new(),
            columns: columns.to_string(),
            rows: Vec::new(),
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    /// Header, column line and rows. Identical inputs give identical bytes.
    pub fn render(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# laser-zeno {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command: {}", self.command);
        out.push_str("# [resolved config]\n");
        for line in config.header_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        if !self.meta.is_empty() {
            out.push_str("# [results]\n");
            for (k, v) in &self.meta {
                let _ = writeln!(out, "# {k} = {v}");
            }
        }
        out.push_str(&self.columns);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

pub(crate) fn row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

fn pole_or_nan(result: Result<PoleResult>) -> Result<f64> {
    match result {
        Ok(p) => Ok(p.gamma),
        // no pole expansion exists exactly at the threshold
        Err(Error::DegenerateRadius(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// `gamma(B) / gamma(0)` by closed form, pole search and spectrum normalization,
/// for each configured multipole order.
pub fn cmd_gamma_scan(cfg: &RunConfig) -> Result<Table> {
    let scan = &cfg.gamma_scan;
    let bs = cfg.gamma_scan_values();
    let opts = cfg.pole_options();
    let mut t = Table::new(
        "gamma-scan",
        "j,b_over_omega0,ratio_closed_form,ratio_pole,ratio_spectrum",
    );
    let mut rows = Vec::new();
    for &j in &scan.js {
        let tr = TransitionSpec::new(j, scan.character).map_err(|e| Error::config("gamma_scan.js", e.to_string()))?;
        let p = cfg.params_for(tr)?;
        let w0 = p.omega0;
        let base = pole_newton(&p, 0.0, opts)?;
        let spec0 = gamma_from_normalization_at(&p, 0.0, base.omega_bar(), scan.route)?;
        t.meta(&format!("gamma0_pole[j={j}]"), format!("{:e}", base.gamma));
        t.meta(&format!("gamma0_spectrum[j={j}]"), format!("{spec0:e}"));
        let part: Vec<String> = bs
            .par_iter()
            .map(|&x| -> Result<String> {
                let b = x * w0;
                let closed = gamma_ratio_closed_form(tr, x);
                let pole = pole_newton(&p, b, opts);
                let omega_bar = pole.as_ref().map(|q| q.omega_bar()).unwrap_or(base.omega_bar());
                let g_pole = pole_or_nan(pole)?;
                let g_spec = gamma_from_normalization_at(&p, b, omega_bar, scan.route)?;
                Ok(format!("{j},{}", row(&[x, closed, g_pole / base.gamma, g_spec / spec0])))
            })
            .collect::<Result<_>>()?;
        rows.extend(part);
    }
    t.rows = rows;
    Ok(t)
}

fn spectrum_grid(cfg: &RunConfig, b: f64, lines: &[(f64, f64)]) -> Vec<f64> {
    let s = &cfg.spectrum;
    let centre = lines[0].0;
    let pad = 0.25 * centre.max(b);
    let lo = s.omega_min.unwrap_or((centre - b - pad).max(0.0));
    let hi = s.omega_max.unwrap_or(centre + b + pad);
    let n = s.points;
    let mut w: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    if s.peak_points >= 2 {
        for &(c, g) in lines {
            let half = s.peak_halfwidths * g;
            let m = s.peak_points;
            w.extend((0..m).map(|i| c - half + 2.0 * half * i as f64 / (m - 1) as f64).filter(|&x| x >= lo && x <= hi));
        }
    }
    w.sort_by(f64::total_cmp);
    w.dedup();
    w
}

/// Emission spectrum with the laser off and on.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let b = match cfg.spectrum.b {
        Some(b) => b,
        None => cfg.laser_b()?,
    } * p.omega0;
    let opts = cfg.pole_options();
    let pole0 = pole_newton(&p, 0.0, opts)?;
    let pole = pole_newton(&p, b, opts)?;
    let mode = cfg.spectrum.widths;
    let c = pole.omega_bar();
    let mut lines = vec![(pole0.omega_bar(), pole0.gamma)];
    if b > 0.0 {
        lines.push((c + b, pole.gamma));
        if c - b > 0.0 {
            lines.push((c - b, pole.gamma));
        }
    }
    let grid = spectrum_grid(cfg, b, &lines);
    let mut t = Table::new("spectrum", "omega,density_b0,density_b");
    t.meta("B", format!("{b:e}"));
    t.meta("gamma_b0", format!("{:e}", pole0.gamma));
    t.meta("omega_bar_b0", format!("{:e}", pole0.omega_bar()));
    t.meta("gamma_b", format!("{:e}", pole.gamma));
    t.meta("omega_bar_b", format!("{c:e}"));
    t.meta("widths", format!("{mode:?}"));
    t.meta(
        "normalization_b0",
        format!("{:e}", emission_normalization(&p, 0.0, pole0.omega_bar(), pole0.gamma)?),
    );
    if mode == LineWidths::Shared {
        t.meta("normalization_b", format!("{:e}", emission_normalization(&p, b, c, pole.gamma)?));
    }
    if b > 0.0 && c - b > 0.0 {
        let hi = locate_peak(&p, &pole, b, c + b);
        let lo = locate_peak(&p, &pole, b, c - b);
        t.meta("peak_upper", format!("{hi:e}"));
        t.meta("peak_lower", format!("{lo:e}"));
        let ratio = spectrum_b_with(&p, &pole, b, hi, mode) / spectrum_b_with(&p, &pole, b, lo, mode);
        t.meta("height_ratio", format!("{ratio:e}"));
        t.meta("chi2_ratio", format!("{:e}", p.chi2(c + b) / p.chi2(c - b)));
    }
    t.rows = grid
        .iter()
        .map(|&w| row(&[w, spectrum_b0(&p, &pole0, w), spectrum_b_with(&p, &pole, b, w, mode)]))
        .collect();
    Ok(t)
}

/// Survival probability from the discretized continuum and the fitted rate.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let e = &cfg.evolve;
    let b = match e.b {
        Some(b) => b,
        None => cfg.laser_b()?,
    } * p.omega0;
    let pole = pole_newton(&p, b, cfg.pole_options())?;
    let t_final = e.t_final.unwrap_or(5.0 / pole.gamma);
    let grid = build_mode_grid(&p, e.omega_max * p.omega0, e.modes, e.rule, b)?;
    let times: Vec<f64> = (0..=e.samples).map(|i| t_final * i as f64 / e.samples as f64).collect();
    let series = evolve(&grid, &p, b, &times, e.options())?;
    let curve = survival_probability(&series);
    let (d1, d2) = default_fit_window(pole.gamma);
    let (t1, t2) = (e.fit_start.unwrap_or(d1), e.fit_end.unwrap_or(d2.min(t_final)));
    let fit = fit_decay_rate(&curve, t1, t2)?;
    let mut t = Table::new("evolve", "t,P,P_pole_approx");
    t.meta("B", format!("{b:e}"));
    t.meta("modes", grid.len());
    t.meta("sum_rule_error", format!("{:e}", grid.sum_rule_error));
    t.meta("recurrence_time", format!("{:e}", grid.recurrence_time()));
    t.meta("t_final", format!("{t_final:e}"));
    t.meta("fit_window", format!("[{t1:e}, {t2:e}]"));
    t.meta("gamma_pole", format!("{:e}", pole.gamma));
    t.meta("gamma_fit", format!("{:e}", fit.gamma));
    t.meta("gamma_fit_sigma", format!("{:e}", fit.sigma));
    t.meta("gamma_rel_diff", format!("{:e}", fit.gamma / pole.gamma - 1.0));
    t.meta("norm_drift", format!("{:e}", norm_drift(&series)));
    t.rows = curve.iter().map(|&(tt, pp)| row(&[tt, pp, ww_survival(&pole, tt)])).collect();
    Ok(t)
}

/// Rates into the two dressed states against the field strength.
pub fn cmd_dressed(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let mut t = Table::new(
        "dressed",
        "b_over_omega0,gamma_plus,gamma_minus,gamma_sum,gamma_first_order,splitting",
    );
    t.rows = cfg
        .dressed
        .values()
        .iter()
        .map(|&x| {
            let b = x * p.omega0;
            let (gp, gm) = partial_rates(&p, b);
            let d = dressed_doublet(b)?;
            Ok(row(&[x, gp, gm, gp + gm, gamma_first_order(&p, b), d.splitting]))
        })
        .collect::<Result<_>>()?;
    Ok(t)
}

/// Rate with the configured ladder of extra levels, exact and perturbative,
/// and the effective-coupling shortcut.
pub fn cmd_multilevel(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let ladder = cfg.ladder()?;
    let mut t = Table::new(
        "multilevel",
        "b_over_omega0,gamma_exact,gamma_perturbative,b_star,gamma_b_star",
    );
    t.meta("levels", ladder.n_levels());
    let b_star_ok = effective_b_star(&ladder, 0.0, p.omega0).is_ok();
    if !b_star_ok {
        t.meta("b_star", "undefined: some level lies at or below omega0");
    }
    let bs = cfg.multilevel.values();
    let rows: Vec<(String, f64)> = bs
        .par_iter()
        .map(|&x| {
            let b = x * p.omega0;
            let decomp = partial_fractions(&ladder, b)?;
            let exact = gamma_many(&p, &ladder, b)?;
            let pert = gamma_many_perturbative(&p, &ladder, b);
            let (bs, gs) = if b_star_ok {
                (effective_b_star(&ladder, b, p.omega0)? / p.omega0, gamma_at_b_star(&p, &ladder, b)?)
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok((row(&[x, exact, pert, bs, gs]), (decomp.weight_sum() - 1.0).abs()))
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    t.meta("max_weight_sum_error", format!("{worst:e}"));
    t.rows = rows.into_iter().map(|r| r.0).collect();
    Ok(t)
}

/// Field strength implied by the `[laser]` section.
pub fn cmd_estimate_b(cfg: &RunConfig) -> Result<Table> {
    let laser = cfg.laser;
    let b = laser.b().map_err(|e| Error::config("laser", e.to_string()))?;
    let unit = if laser.is_ev() { "eV" } else { "omega0" };
    let rabi = rabi_from_b(b)?;
    let mut t = Table::new("estimate-b", "quantity,value,unit");
    let mut push = |q: &str, v: f64, u: &str| t.rows.push(format!("{q},{v:e},{u}"));
    push("B", b, unit);
    push("rabi_frequency", rabi, unit);
    let scaled = if laser.is_ev() {
        cfg.estimate_b.omega0_ev.map(|w0| b / w0)
    } else {
        Some(b)
    };
    if let Some(x) = scaled {
        push("B_over_omega0", x, "1");
        push("rabi_over_omega0", 2.0 * x, "1");
    }
    push("power_coefficient_quoted", POWER_COEFFICIENT, "eV/(W um)");
    push("power_coefficient_derived", derived_power_coefficient(), "eV/(W um)");
    Ok(t)
}
