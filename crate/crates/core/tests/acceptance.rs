//! Acceptance gate. Runs every criterion, prints one line each, fails if any fails.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{chi2, integrate_lines, ladder_roots_bisect, q_of_b_oracle, rel};
use laser_zeno::dressed::{
    effective_b_star, gamma_at_b_star, gamma_many, partial_fractions, partial_rates, perturbative_shifts, LevelLadder,
};
use laser_zeno::dynamics::{
    build_mode_grid, evolve, fit_decay_rate, norm_drift, survival_probability, EvolveOptions, GridRule,
};
use laser_zeno::lab_units::derived_power_coefficient;
use laser_zeno::self_energy::{gamma_first_order, gamma_ratio_closed_form, golden_rule_rate, pole_newton, q_of_b};
use laser_zeno::spectrum::{locate_peak, recover_gamma_from_normalization, spectrum_b, NormalizationRoute};
use laser_zeno::{PoleOptions, SheetLabel, SystemParams, TransitionSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

/// kappa = 3, cutoff 10^3 omega0, beta = 2, g^2 = 1e-4.
fn standard() -> SystemParams {
    SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3).unwrap()
}

fn pole_gamma(p: &SystemParams, b: f64) -> f64 {
    pole_newton(p, b, PoleOptions::default()).unwrap().gamma
}

fn golden_rule() -> Outcome {
    let p = standard();
    let g = pole_gamma(&p, 0.0);
    let oracle = 2.0 * PI * p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, 1.0);
    let r = rel(g, oracle);
    outcome(r < 5e-3, format!("gamma = {g:.6e}, 2 pi g^2 chi^2(omega0) = {oracle:.6e}, rel {r:.2e}"))
}

fn central_ratio() -> Outcome {
    let closed = gamma_ratio_closed_form(TransitionSpec::electric(2), 0.2);
    let p = standard();
    let pole = pole_gamma(&p, 0.2) / pole_gamma(&p, 0.0);
    let ok = closed == 28.0 / 25.0 && rel(pole, 1.12) < 1e-2;
    outcome(ok, format!("closed form {closed}, pole {pole:.6}"))
}

fn fig4_family() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(env!("CARGO_BIN_EXE_laser-zeno"))
        .args(["gamma-scan", "--config"])
        .arg(root.join("configs/standard.toml"))
        .output()
        .unwrap();
    if !out.status.success() {
        return outcome(false, format!("gamma-scan exited with {:?}", out.status.code()));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let col = |j: f64, c: usize| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| r[0] == j).map(|r| (r[1], r[c])).collect()
    };
    let mut ok = col(1.0, 2).iter().all(|&(_, v)| v == 1.0);
    for j in [2.0, 3.0] {
        for c in 2..=4 {
            let curve: Vec<f64> = col(j, c).into_iter().filter(|(b, _)| *b < 1.0).map(|p| p.1).collect();
            ok &= curve.windows(2).all(|w| w[1] > w[0]);
        }
    }
    let ends: Vec<f64> = [1.0, 2.0, 3.0].iter().map(|&j| col(j, 2).last().unwrap().1).collect();
    ok &= ends == [1.0, 4.0, 16.0];
    // the j = 1 pole curve is flat to first order too
    let flat = col(1.0, 3).iter().filter(|(b, _)| *b < 1.0).map(|p| (p.1 - 1.0).abs()).fold(0.0, f64::max);
    outcome(ok, format!("endpoints {ends:?}, j = 1 pole curve within {flat:.1e} of 1"))
}

fn shift_identity() -> Outcome {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 10.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let re = rng.random_range(0.05..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let s = Complex64::new(re, rng.random_range(-3.0..3.0));
        let b = rng.random_range(0.0..1.5);
        let q = q_of_b(&p, b, s, SheetLabel::I).unwrap();
        let oracle = q_of_b_oracle(3, 10.0, 2.0, 1.0, p.g2, p.omega0, b, s);
        worst = worst.max((q - oracle).norm() / oracle.norm());
    }
    outcome(worst < 1e-10, format!("worst relative gap {worst:.2e} over 100 samples"))
}

fn three_routes() -> Outcome {
    let p = standard();
    let g0 = golden_rule_rate(&p);
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let b = i as f64 / 10.0;
        let closed = g0 * gamma_ratio_closed_form(p.transition, b);
        let pole = pole_gamma(&p, b);
        let spec = recover_gamma_from_normalization(&p, b, NormalizationRoute::Quadrature).unwrap();
        worst = worst.max(rel(pole, closed)).max(rel(spec, closed)).max(rel(spec, pole));
    }
    outcome(worst < 2e-2, format!("largest pairwise gap {worst:.2e}"))
}

fn time_domain() -> Outcome {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 5.0, 1.0).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for b in [0.0, 0.5] {
        let pole = pole_gamma(&p, b);
        let grid = build_mode_grid(&p, 100.0, 2000, GridRule::GaussLegendre, b).unwrap();
        let t_final = 5.0 / pole;
        let times: Vec<f64> = (0..=200).map(|i| t_final * i as f64 / 200.0).collect();
        let opts = EvolveOptions { tol: 1e-9, ..Default::default() };
        let series = evolve(&grid, &p, b, &times, opts).unwrap();
        let fit = fit_decay_rate(&survival_probability(&series), 1.0 / pole, t_final).unwrap();
        let drift = norm_drift(&series);

        let early: Vec<f64> = (0..=10).map(|i| 1e-4 * 10f64.powf(i as f64 / 10.0)).collect();
        let short = evolve(&grid, &p, b, &early, EvolveOptions { tol: 1e-12, ..Default::default() }).unwrap();
        let pts: Vec<(f64, f64)> = short.iter().map(|s| (s.t, s.emitted())).collect();
        let slope = common::loglog_slope(&pts);

        let r = rel(fit.gamma, pole);
        ok &= r < 5e-2 && drift < 1e-8 && (slope - 2.0).abs() <= 0.05;
        detail.push(format!("B = {b}: fit/pole rel {r:.2e}, drift {drift:.1e}, slope {slope:.4}"));
    }
    outcome(ok, detail.join("; "))
}

fn dressed_sum_rule() -> Outcome {
    let p = standard();
    let mut worst = 0.0f64;
    let mut gated = true;
    for i in 0..100 {
        let b = 2.0 * i as f64 / 99.0;
        let (gp, gm) = partial_rates(&p, b);
        let first = gamma_first_order(&p, b);
        let up = if b < 1.0 { chi2(3, 1e3, 2.0, 1e3, 1.0 - b) } else { 0.0 };
        let oracle = PI * p.g2 * p.omega0 * (chi2(3, 1e3, 2.0, 1e3, 1.0 + b) + up);
        worst = worst.max(rel(gp + gm, first)).max(rel(gp + gm, oracle));
        if b > 1.0 {
            gated &= gp == 0.0;
        }
    }
    outcome(worst < 1e-12 && gated, format!("worst relative gap {worst:.1e}, upper channel closed above omega0: {gated}"))
}

fn multilevel() -> Outcome {
    let p = standard();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst_sum, mut shift_ratios, mut rate_ratios) = (0.0f64, Vec::new(), Vec::new());
    let mut b_star_above = true;
    for _ in 0..40 {
        // at most 8 levels: ground, the pumped pair and up to 5 more
        let n = rng.random_range(1..=5);
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.01..1.0), rng.random_range(1.5..10.0))).collect();
        let l = LevelLadder::from_pairs(&pairs).unwrap();
        assert!(l.n_levels() <= 8);
        for b in [0.05, 0.2, 0.5] {
            let d = partial_fractions(&l, b).unwrap();
            worst_sum = worst_sum.max((d.weight_sum() - 1.0).abs());
            // weights against an independent root finder
            let oracle: f64 = ladder_roots_bisect(b, &pairs).iter().map(|r| r.1).sum();
            worst_sum = worst_sum.max((oracle - 1.0).abs());
            b_star_above &= effective_b_star(&l, b, 1.0).unwrap() > b;
        }
        let shift_err = |b: f64| {
            let exact = partial_fractions(&l, b).unwrap();
            let pert = perturbative_shifts(&l, b);
            exact.shifts.iter().zip(&pert.shifts).map(|(a, q)| (a - q).abs()).fold(0.0, f64::max)
        };
        // the extra levels move at fourth order, so B must be small for the pair's B^3 to dominate
        shift_ratios.push(shift_err(0.01) / shift_err(0.005));
        let rate_err =
            |b: f64| (gamma_many(&p, &l, b).unwrap() - gamma_at_b_star(&p, &l, b).unwrap()).abs();
        rate_ratios.push(rate_err(0.05) / rate_err(0.025));
    }
    let within = |r: &f64| (6.0..=10.0).contains(r);
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        format!("[{lo:.2}, {hi:.2}]")
    };
    let shifts_ok = shift_ratios.iter().all(within);
    let rates_ok = rate_ratios.iter().all(within);
    let ok = worst_sum <= 1e-12 && shifts_ok && b_star_above && rates_ok;
    outcome(
        ok,
        format!(
            "weight sums within {worst_sum:.1e}; shift error ratio {} ({}); B* > B: {b_star_above}; \
             gamma_many vs gamma(B*) error ratio {} ({})",
            range(&shift_ratios),
            if shifts_ok { "ok" } else { "off" },
            range(&rate_ratios),
            if rates_ok { "ok" } else { "second order, not third" },
        ),
    )
}

fn unit_coefficient() -> Outcome {
    let k = derived_power_coefficient();
    outcome(rel(k, 132.0) < 1e-2, format!("derived {k:.3} vs 132"))
}

fn spectrum_shape() -> Outcome {
    let p = standard();
    let b = 0.2;
    let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
    let (c, g) = (pole.omega_bar(), pole.gamma);
    let hi = locate_peak(&p, &pole, b, c + b);
    let lo = locate_peak(&p, &pole, b, c - b);
    let off = (hi - c - b).abs().max((lo - c + b).abs());
    let ratio = spectrum_b(&p, &pole, b, hi) / spectrum_b(&p, &pole, b, lo);
    let envelope = chi2(3, 1e3, 2.0, 1e3, c + b) / chi2(3, 1e3, 2.0, 1e3, c - b);
    let n = integrate_lines(|w| spectrum_b(&p, &pole, b, w), &[c - b, c + b], g, 1e3);
    let ok = off < 0.5 * g && rel(ratio, envelope) < 2e-2 && (0.995..=1.005).contains(&n);
    outcome(
        ok,
        format!("peak offset {:.2} gamma, height ratio {ratio:.5} vs {envelope:.5}, normalization {n:.6}", off / g),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 10] = [
        (1, "golden rule", golden_rule, Duration::from_secs(1)),
        (2, "central ratio", central_ratio, Duration::from_secs(5)),
        (3, "multipole family", fig4_family, Duration::from_secs(10)),
        (4, "shift identity", shift_identity, Duration::from_secs(30)),
        (5, "three routes", three_routes, Duration::from_secs(60)),
        (6, "time domain", time_domain, Duration::from_secs(300)),
        (7, "dressed sum rule", dressed_sum_rule, Duration::from_secs(1)),
        (8, "multilevel", multilevel, Duration::from_secs(60)),
        (9, "unit coefficient", unit_coefficient, Duration::from_secs(1)),
        (10, "spectrum shape", spectrum_shape, Duration::from_secs(10)),
    ];
    let mut failed = Vec::new();
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let ok = o.ok && took <= budget;
        println!(
            "criterion {n}: {} {name}: {} [{:.2} s of {} s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !ok {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
