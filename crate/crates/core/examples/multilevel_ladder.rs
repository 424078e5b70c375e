//! Extra laser-coupled levels. The resolvent is split into partial
//! fractions; each branch point opens its own decay channel.

use laser_zeno::dressed::{
    effective_b_star, gamma_at_b_star, gamma_many, gamma_many_perturbative, partial_fractions, LevelLadder,
};
use laser_zeno::{SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3)?;
    let ladder = LevelLadder::from_pairs(&[(0.5, 3.0), (0.25, 6.0), (1.0, 4.0)])?;

    let d = partial_fractions(&ladder, 0.3)?;
    print!("B = 0.3 decomposition\n{}", d.to_csv());
    println!("sum of weights - 1 = {:.2e}", d.weight_sum() - 1.0);

    println!("\n   B     exact/g0  pert/g0   B*      gamma(B*)/g0");
    let g0 = gamma_many(&p, &ladder, 0.0)?;
    for i in 1..=8 {
        let b = 0.05 * i as f64;
        println!(
            "{b:5.2}  {:8.5}  {:8.5}  {:6.4}  {:8.5}",
            gamma_many(&p, &ladder, b)? / g0,
            gamma_many_perturbative(&p, &ladder, b) / g0,
            effective_b_star(&ladder, b, p.omega0)?,
            gamma_at_b_star(&p, &ladder, b)? / g0
        );
    }
    Ok(())
}
