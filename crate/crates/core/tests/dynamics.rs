mod common;

use std::f64::consts::E;
use std::sync::OnceLock;

use common::{chi2, integrate_half_line, real, rel, tanh_sinh};
use laser_zeno::dynamics::{
    build_mode_grid, evolve, fit_decay_rate, norm_drift, survival_probability, ww_survival, AmplitudeState, DecayFit,
    EvolveOptions, GridRule,
};
use laser_zeno::self_energy::{golden_rule_rate, pole_newton};
use laser_zeno::{Error, PoleOptions, PoleResult, SystemParams, TransitionSpec};

const TOL: f64 = 1e-9;

fn params(g2: f64) -> SystemParams {
    SystemParams::standard(g2, TransitionSpec::electric(2), 5.0, 1.0).unwrap()
}

struct Run {
    pole: PoleResult,
    series: Vec<AmplitudeState>,
    fit: DecayFit,
}

fn run(g2: f64, b: f64, modes: usize) -> Run {
    let p = params(g2);
    let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
    let grid = build_mode_grid(&p, 100.0, modes, GridRule::GaussLegendre, b).unwrap();
    let t_final = 5.0 / pole.gamma;
    let times: Vec<f64> = (0..=200).map(|i| t_final * i as f64 / 200.0).collect();
    let series = evolve(&grid, &p, b, &times, EvolveOptions { tol: TOL, ..Default::default() }).unwrap();
    let fit = fit_decay_rate(&survival_probability(&series), 0.2 * t_final, t_final).unwrap();
    Run { pole, series, fit }
}

fn at_zero() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| run(1e-4, 0.0, 2000))
}

fn at_half() -> &'static Run {
    static R: OnceLock<Run> = OnceLock::new();
    R.get_or_init(|| run(1e-4, 0.5, 2000))
}

#[test]
fn survival_starts_at_one_and_stays_below() {
    let r = at_half();
    assert_eq!(r.series[0].survival(), 1.0);
    for s in &r.series {
        let pr = s.survival();
        assert!((0.0..=1.0).contains(&pr));
    }
}

#[test]
fn norm_is_conserved() {
    for r in [at_zero(), at_half()] {
        let d = norm_drift(&r.series);
        assert!(d <= 10.0 * TOL, "{d}");
    }
}

#[test]
fn zero_field_slope_is_the_golden_rule() {
    let r = at_zero();
    let gr = golden_rule_rate(&params(1e-4));
    assert!(rel(r.fit.gamma, gr) < 5e-2, "{} vs {gr}", r.fit.gamma);
}

#[test]
fn fitted_rate_matches_the_pole_at_half_omega0() {
    let r = at_half();
    assert!(rel(r.fit.gamma, r.pole.gamma) < 5e-2, "{} vs {}", r.fit.gamma, r.pole.gamma);
}

#[test]
fn laser_speeds_up_the_decay() {
    let (a, b) = (at_zero(), at_half());
    assert!(b.fit.gamma - a.fit.gamma > a.fit.sigma + b.fit.sigma);
}

fn ww_gap(r: &Run) -> f64 {
    r.series
        .iter()
        .map(|s| (s.survival() - ww_survival(&r.pole, s.t)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn pole_approximation_gap_is_second_order() {
    // halving g^2 halves the largest gap over [0, 5 / gamma]
    let weak = run(5e-5, 0.0, 2000);
    let (a, b) = (ww_gap(at_zero()), ww_gap(&weak));
    assert!((a / b - 2.0).abs() <= 0.5, "{a:e} / {b:e}");
    assert!(ww_gap(at_half()) < 0.01);
}

#[test]
fn fitted_rate_is_converged_in_the_mode_count() {
    let coarse = at_zero();
    let fine = run(1e-4, 0.0, 4000);
    assert!(rel(fine.fit.gamma, coarse.fit.gamma) < 1e-2);
}

#[test]
fn short_times_are_quadratic() {
    let p = params(1e-4);
    let grid = build_mode_grid(&p, 20.0, 400, GridRule::GaussLegendre, 0.5).unwrap();
    let times: Vec<f64> = (0..=10).map(|i| 1e-4 * 10f64.powf(i as f64 / 10.0)).collect();
    let series = evolve(&grid, &p, 0.5, &times, EvolveOptions { tol: 1e-12, ..Default::default() }).unwrap();
    // 1 - P from the photon side: no cancellation
    let pts: Vec<(f64, f64)> = series.iter().map(|s| (s.t, s.emitted())).collect();
    let slope = common::loglog_slope(&pts);
    assert!((slope - 2.0).abs() <= 0.05, "{slope}");
    // and it is a transient: no exponential fits there
    let curve = survival_probability(&series);
    assert!(matches!(fit_decay_rate(&curve, 1e-4, 1e-3), Err(Error::FitQuality(_))));
}

#[test]
fn decoupled_level_never_decays() {
    let p = params(0.0);
    let grid = build_mode_grid(&p, 20.0, 200, GridRule::GaussLegendre, 0.3).unwrap();
    assert!(grid.couplings2.iter().all(|&c| c == 0.0));
    let times: Vec<f64> = (0..=20).map(|i| i as f64 * 5.0).collect();
    let series = evolve(&grid, &p, 0.3, &times, EvolveOptions::default()).unwrap();
    assert!(series.iter().all(|s| (s.survival() - 1.0).abs() < 1e-14));
}

fn coupling_integral(p: &SystemParams, omega_max: f64) -> f64 {
    let f = real(|w| p.g2 * p.omega0 * chi2(3, 5.0, 2.0, 1.0, w));
    (tanh_sinh(&f, 0.0, 1.0) + tanh_sinh(&f, 1.0, 5.0) + tanh_sinh(&f, 5.0, omega_max)).re
}

#[test]
fn mode_sum_reproduces_the_coupling_integral() {
    let p = params(1e-4);
    let exact = coupling_integral(&p, 100.0);
    let grid = build_mode_grid(&p, 100.0, 2000, GridRule::GaussLegendre, 0.0).unwrap();
    assert!(rel(grid.coupling_sum(), exact) < 1e-8);
    assert!(grid.nodes.windows(2).all(|w| w[1] > w[0]));
    assert!(grid.nodes[0] > 0.0);
    let s: f64 = grid.nodes.iter().zip(&grid.couplings2).map(|(w, c)| c / (w - 1.0).powi(2)).sum();
    assert!(s.is_finite());
    // the grid is nowhere near the whole continuum
    let all = integrate_half_line(real(|w| p.g2 * chi2(3, 5.0, 2.0, 1.0, w)), &[1.0, 5.0], 100.0).re;
    assert!(grid.coupling_sum() < all);
}

#[test]
fn mode_sum_converges_when_refined() {
    let p = params(1e-4);
    let exact = coupling_integral(&p, 100.0);
    for rule in [GridRule::Uniform, GridRule::GaussLegendre] {
        let errs: Vec<f64> = [200, 400, 800]
            .iter()
            .map(|&m| rel(build_mode_grid(&p, 100.0, m, rule, 0.0).unwrap().coupling_sum(), exact))
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{rule:?}: {errs:?}");
    }
}

#[test]
fn grid_preconditions() {
    let p = params(1e-4);
    assert!(matches!(build_mode_grid(&p, 100.0, 50, GridRule::Uniform, 0.0), Err(Error::Refinement(_))));
    assert!(build_mode_grid(&p, 5.0, 400, GridRule::Uniform, 0.0).is_err());
    assert!(build_mode_grid(&p, 100.0, 404, GridRule::GaussLegendre, 0.0).is_err());
}

#[test]
fn horizon_beyond_half_the_recurrence_time_is_refused() {
    let p = params(1e-4);
    let grid = build_mode_grid(&p, 100.0, 400, GridRule::Uniform, 0.0).unwrap();
    let t = grid.recurrence_time();
    let r = evolve(&grid, &p, 0.0, &[0.0, 0.6 * t], EvolveOptions::default());
    assert!(matches!(r, Err(Error::Recurrence { .. })));
}

#[test]
fn step_budget_exhaustion_is_a_stiffness_error() {
    let p = params(1e-4);
    let grid = build_mode_grid(&p, 20.0, 200, GridRule::GaussLegendre, 0.0).unwrap();
    let opts = EvolveOptions { max_steps: 3, ..Default::default() };
    assert!(matches!(evolve(&grid, &p, 0.0, &[0.0, 50.0], opts), Err(Error::Stiffness { .. })));
}

#[test]
fn exact_exponential_is_fitted_exactly() {
    let g = 0.37;
    let curve: Vec<(f64, f64)> = (0..100).map(|i| i as f64 * 0.1).map(|t| (t, (-g * t).exp())).collect();
    let fit = fit_decay_rate(&curve, 1.0, 9.0).unwrap();
    assert!(rel(fit.gamma, g) < 1e-12);
    assert!(fit.sigma < 1e-12);
}

#[test]
fn pole_survival() {
    let p = params(1e-4);
    let pole = pole_newton(&p, 0.2, PoleOptions::default()).unwrap();
    assert_eq!(ww_survival(&pole, 0.0), 1.0);
    assert!(rel(ww_survival(&pole, 1.0 / pole.gamma), 1.0 / E) < 1e-15);
}
