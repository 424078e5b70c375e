//! Brute-force check of the pole: integrate the amplitude equations for a
//! discretized photon continuum and fit the survival probability.
//!
//! Takes tens of seconds in release mode.
//!
//! ```sh
//! cargo run --release --example time_domain -- 0.5
//! ```

use laser_zeno::dynamics::{build_mode_grid, evolve, fit_decay_rate, norm_drift, survival_probability, EvolveOptions, GridRule};
use laser_zeno::self_energy::pole_newton;
use laser_zeno::{PoleOptions, SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    env_logger::init();
    let b: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);

    // low cutoff: the continuum fits on 2000 modes below omega = 100
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 5.0, 1.0)?;
    let pole = pole_newton(&p, b, PoleOptions::default())?;
    let grid = build_mode_grid(&p, 100.0, 2000, GridRule::GaussLegendre, b)?;
    println!("recurrence time {:.4e}, 5 lifetimes {:.4e}", grid.recurrence_time(), 5.0 / pole.gamma);

    let t_final = 5.0 / pole.gamma;
    let times: Vec<f64> = (0..=100).map(|i| t_final * i as f64 / 100.0).collect();
    let series = evolve(&grid, &p, b, &times, EvolveOptions::default())?;
    let curve = survival_probability(&series);
    let fit = fit_decay_rate(&curve, 1.0 / pole.gamma, t_final)?;

    println!("pole  gamma = {:.6e}", pole.gamma);
    println!("fit   gamma = {:.6e} +- {:.1e}", fit.gamma, fit.sigma);
    println!("relative difference {:.2e}, norm drift {:.1e}", fit.gamma / pole.gamma - 1.0, norm_drift(&series));
    for (t, pr) in curve.iter().step_by(10) {
        println!("t = {t:9.1}  P = {pr:.6}  exp(-gamma t) = {:.6}", (-pole.gamma * t).exp());
    }
    Ok(())
}
