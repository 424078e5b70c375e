mod common;

use std::f64::consts::PI;

use common::{chi2, integrate_lines, real, rel, tanh_sinh, tanh_sinh_tail};
use laser_zeno::self_energy::{gamma_ratio_closed_form, pole_newton, PoleMethod};
use laser_zeno::spectrum::{
    asymptotic_occupations, emission_normalization, gamma_from_normalization_at, locate_peak, lorentzian,
    recover_gamma_from_normalization, spectrum_b, spectrum_b0, total_occupation, LineWidths, NormalizationRoute,
    SpectrumCurve,
};
use laser_zeno::{PoleOptions, PoleResult, SheetLabel, SystemParams, TransitionSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn standard() -> SystemParams {
    SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3).unwrap()
}

/// A line of chosen width and centre, for shape checks independent of any pole search.
fn line(gamma: f64, omega_bar: f64) -> PoleResult {
    PoleResult {
        s_pole: Complex64::new(-0.5 * gamma, -omega_bar),
        gamma,
        delta_e: 1.0 - omega_bar,
        sheet: SheetLabel::III,
        method: PoleMethod::Newton,
        residual: 0.0,
    }
}

#[test]
fn lorentzian_values() {
    let g = 0.3;
    assert!(rel(lorentzian(0.0, g).unwrap(), 4.0 / (g * g)) < 1e-15);
    assert!(rel(lorentzian(0.5 * g, g).unwrap(), 2.0 / (g * g)) < 1e-15);
    assert!(lorentzian(0.0, 0.0).is_err());
    assert!(lorentzian(0.0, -1.0).is_err());
    let f = real(|x| lorentzian(x, g).unwrap());
    let total = 2.0 * (tanh_sinh(&f, 0.0, 1.0) + tanh_sinh_tail(&f, 1.0)).re;
    assert!(rel(total, 2.0 * PI / g) < 1e-6);
}

#[test]
fn laser_off_line() {
    let p = standard();
    let pole = pole_newton(&p, 0.0, PoleOptions::default()).unwrap();
    let c = pole.omega_bar();
    let peak = p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, c) * 4.0 / pole.gamma.powi(2);
    assert!(rel(spectrum_b0(&p, &pole, c), peak) < 1e-12);
    assert_eq!(spectrum_b0(&p, &pole, 0.0), 0.0);
    let m = locate_peak(&p, &pole, 0.0, c);
    assert!((m - c).abs() < pole.gamma);
}

#[test]
fn laser_off_normalization_for_a_broad_line() {
    // small cutoff so the line is 1e-4 wide
    let lam = 5.0;
    let g2 = 1e-4 / (2.0 * PI * chi2(3, lam, 2.0, 1.0, 1.0));
    let p = SystemParams::standard(g2, TransitionSpec::electric(2), lam, 1.0).unwrap();
    let pole = pole_newton(&p, 0.0, PoleOptions::default()).unwrap();
    assert!((pole.gamma / 1e-4 - 1.0).abs() < 1e-2);
    let n = integrate_lines(|w| spectrum_b0(&p, &pole, w), &[pole.omega_bar()], pole.gamma, lam);
    assert!((n - 1.0).abs() < 1e-3, "{n}");
}

#[test]
fn doublet_reduces_to_single_line_without_field() {
    let p = standard();
    let pole = pole_newton(&p, 0.0, PoleOptions::default()).unwrap();
    for w in [0.2, 0.999, pole.omega_bar(), 1.3] {
        assert!(rel(spectrum_b(&p, &pole, 0.0, w), spectrum_b0(&p, &pole, w)) < 1e-15);
    }
}

#[test]
fn doublet_height_ratio_follows_the_envelope() {
    let p = standard();
    let pole = line(1e-2, 1.0);
    let b = pole.omega_bar() / 5.0;
    let hi = locate_peak(&p, &pole, b, 1.2);
    let lo = locate_peak(&p, &pole, b, 0.8);
    let r = spectrum_b(&p, &pole, b, hi) / spectrum_b(&p, &pole, b, lo);
    assert!(rel(r, 3.375) < 2e-2, "{r}");
    let envelope = chi2(3, 1e3, 2.0, 1e3, 1.2) / chi2(3, 1e3, 2.0, 1e3, 0.8);
    assert!(rel(r, envelope) < 2e-2);
}

#[test]
fn lower_line_leaves_the_spectrum_above_omega_bar() {
    let p = standard();
    let b = 1.5;
    let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
    let c = pole.omega_bar();
    let g = pole.gamma;
    let upper = |w: f64| 0.5 * p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, w) / ((w - c - b).powi(2) + 0.25 * g * g);
    let lower = integrate_lines(|w| spectrum_b(&p, &pole, b, w) - upper(w), &[c + b], g, 1e3);
    let total = emission_normalization(&p, b, c, g).unwrap();
    assert!(lower.abs() < 1e-6, "{lower}");
    assert!((total - 1.0).abs() < 5e-3, "{total}");
    // with B below omega_bar the lower line carries about half
    let pole = pole_newton(&p, 0.5, PoleOptions::default()).unwrap();
    let (c, g) = (pole.omega_bar(), pole.gamma);
    let upper = |w: f64| 0.5 * p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, w) / ((w - c - 0.5).powi(2) + 0.25 * g * g);
    let lower = integrate_lines(|w| spectrum_b(&p, &pole, 0.5, w) - upper(w), &[c - 0.5, c + 0.5], g, 1e3);
    let expected = 0.5 * 0.5f64.powi(3) / gamma_ratio_closed_form(TransitionSpec::electric(2), 0.5);
    assert!(rel(lower, expected) < 1e-2, "{lower} vs {expected}");
}

#[test]
fn occupation_sum_is_time_independent() {
    let p = standard();
    let b = 0.3;
    let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for wk in [0.5, pole.omega_bar() + b, 1.9] {
        let nu = wk - pole.omega_bar();
        let g = pole.gamma;
        let phi2 = p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, wk);
        let d = Complex64::new(nu, 0.5 * g);
        let expected = phi2 * (nu * nu + 0.25 * g * g + b * b) / (d * d - b * b).norm_sqr();
        assert!(rel(total_occupation(&p, &pole, b, wk), expected) < 1e-13);
        for _ in 0..20 {
            let t = rng.random_range(1e3..1e6) / g;
            let (y, z) = asymptotic_occupations(&p, &pole, b, wk, t);
            assert!(y >= 0.0 && z >= 0.0);
            assert!(rel(y + z, expected) < 1e-12);
        }
        // sin(Bt) = 0: the first channel holds the (nu^2 + gamma^2/4) part
        let (y, z) = asymptotic_occupations(&p, &pole, b, wk, PI / b);
        let denom = (d * d - b * b).norm_sqr();
        assert!(rel(y, phi2 * (nu * nu + 0.25 * g * g) / denom) < 1e-10);
        assert!(rel(z, phi2 * b * b / denom) < 1e-10);
    }
}

#[test]
fn no_field_no_second_channel() {
    let p = standard();
    let pole = pole_newton(&p, 0.0, PoleOptions::default()).unwrap();
    for t in [0.0, 1.0, 3e12, 7.7e13] {
        let (_, z) = asymptotic_occupations(&p, &pole, 0.0, 1.01, t);
        assert_eq!(z, 0.0);
    }
}

#[test]
fn rate_from_normalization_at_zero_field() {
    let p = standard();
    let pole = pole_newton(&p, 0.0, PoleOptions::default()).unwrap();
    let c = pole.omega_bar();
    let closed = gamma_from_normalization_at(&p, 0.0, c, NormalizationRoute::ClosedForm).unwrap();
    assert!(rel(closed, 2.0 * PI * p.g2 * p.omega0 * chi2(3, 1e3, 2.0, 1e3, c)) < 1e-14);
    let quad = gamma_from_normalization_at(&p, 0.0, c, NormalizationRoute::Quadrature).unwrap();
    assert!(rel(quad, closed) < 1e-3);
}

#[test]
fn rate_from_normalization_ratio_at_a_fifth() {
    let p = standard();
    for route in [NormalizationRoute::ClosedForm, NormalizationRoute::Quadrature] {
        let r = recover_gamma_from_normalization(&p, 0.2, route).unwrap()
            / recover_gamma_from_normalization(&p, 0.0, route).unwrap();
        assert!((r - 1.12).abs() < 1e-3, "{route:?}: {r}");
    }
}

#[test]
fn rate_from_normalization_tracks_the_pole() {
    let p = standard();
    for i in 1..10 {
        let b = i as f64 / 10.0;
        let pole = pole_newton(&p, b, PoleOptions::default()).unwrap().gamma;
        for route in [NormalizationRoute::ClosedForm, NormalizationRoute::Quadrature] {
            let g = recover_gamma_from_normalization(&p, b, route).unwrap();
            assert!(rel(g, pole) < 2e-2, "B = {b}, {route:?}");
            let closed = gamma_ratio_closed_form(p.transition, b) * pole_newton(&p, 0.0, PoleOptions::default()).unwrap().gamma;
            assert!(rel(g, closed) < 2e-2 && rel(pole, closed) < 2e-2);
        }
    }
}

#[test]
fn doublet_normalization_and_peak_positions() {
    let p = standard();
    for b in [0.1, 0.2, 0.5, 0.9] {
        let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
        assert!(pole.gamma <= 1e-3 * pole.omega_bar());
        let c = pole.omega_bar();
        let n = integrate_lines(|w| spectrum_b(&p, &pole, b, w), &[c - b, c + b], pole.gamma, 1e3);
        assert!((0.995..=1.005).contains(&n), "B = {b}: {n}");
        for centre in [c - b, c + b] {
            let m = locate_peak(&p, &pole, b, centre);
            assert!((m - centre).abs() < 0.5 * pole.gamma, "B = {b}");
        }
    }
}

#[test]
fn sampled_curve_is_nonnegative_and_bounded() {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 5.0, 1.0).unwrap();
    let b = 0.2;
    let pole = pole_newton(&p, b, PoleOptions::default()).unwrap();
    let (lo, hi) = SpectrumCurve::default_window(&pole, b);
    for mode in [LineWidths::Shared, LineWidths::PerChannel] {
        let curve = SpectrumCurve::sample(&p, &pole, b, lo, hi, 20001, mode).unwrap();
        assert!(curve.density.iter().all(|&d| d >= 0.0));
        assert!(curve.trapezoid() <= 1.0 + 1e-2, "{mode:?}: {}", curve.trapezoid());
    }
    let shared = SpectrumCurve::sample(&p, &pole, b, lo, hi, 20001, LineWidths::Shared).unwrap();
    assert!(shared.trapezoid() > 0.97);
}
