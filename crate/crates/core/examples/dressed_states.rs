//! Decay into the two dressed states. Their rates add up to the modified
//! rate, and the lower channel closes once B exceeds omega0.

use laser_zeno::dressed::{dressed_doublet, partial_rates};
use laser_zeno::self_energy::{gamma_first_order, golden_rule_rate};
use laser_zeno::{SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3)?;
    let g = golden_rule_rate(&p);
    println!("   B    split   g+/g     g-/g     sum/g   gamma(B)/g");
    for i in 0..=12 {
        let b = 0.125 * i as f64;
        let d = dressed_doublet(b)?;
        let (gp, gm) = partial_rates(&p, b);
        println!(
            "{b:5.3}  {:5.3}  {:7.4}  {:7.4}  {:7.4}  {:7.4}",
            d.splitting,
            gp / g,
            gm / g,
            (gp + gm) / g,
            gamma_first_order(&p, b) / g
        );
    }
    Ok(())
}
