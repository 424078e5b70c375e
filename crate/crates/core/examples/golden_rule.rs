//! Laser off: the decay pole against Fermi's golden rule.
//!
//! ```sh
//! cargo run --release --example golden_rule
//! ```

use laser_zeno::self_energy::{golden_rule_rate, pole_newton, pole_perturbative, second_order_shift};
use laser_zeno::{PoleOptions, SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    // cutoff far above omega0, chi^2 normalized at the cutoff
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3)?;

    let exact = pole_newton(&p, 0.0, PoleOptions::default())?;
    let first = pole_perturbative(&p, 0.0)?;
    let gr = golden_rule_rate(&p);

    println!("golden rule      gamma = {gr:.10e}");
    println!("first order      gamma = {:.10e}", first.gamma);
    println!("newton pole      gamma = {:.10e}  (sheet {}, residual {:.1e})", exact.gamma, exact.sheet, exact.residual);
    println!("relative offset        = {:.3e}", exact.gamma / gr - 1.0);
    println!("second-order shift     = {:.10e}", second_order_shift(&p)?);
    println!("pole shift             = {:.10e}", exact.delta_e);

    // halving g^2 quarters the absolute discrepancy
    for g2 in [1e-4, 5e-5, 2.5e-5] {
        let q = p.with_g2(g2);
        let d = pole_newton(&q, 0.0, PoleOptions::default())?.gamma - golden_rule_rate(&q);
        println!("g2 = {g2:.2e}: gamma - gamma_GR = {d:.4e}");
    }
    Ok(())
}
