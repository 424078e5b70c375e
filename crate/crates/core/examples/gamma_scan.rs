//! gamma(B)/gamma for electric dipole, quadrupole and octupole photons.
//!
//! Three independent routes per row: the closed form, the pole of the
//! dressed self-energy, and the width that normalizes the emitted spectrum.

use laser_zeno::self_energy::{gamma_ratio_closed_form, pole_newton};
use laser_zeno::spectrum::{gamma_from_normalization_at, NormalizationRoute};
use laser_zeno::{PoleOptions, SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    println!("j,b,closed,pole,spectrum");
    for j in 1..=3 {
        let tr = TransitionSpec::electric(j);
        let p = SystemParams::standard(1e-4, tr, 1e3, 1e3)?;
        let base = pole_newton(&p, 0.0, PoleOptions::default())?;
        let g0 = base.gamma;
        let n0 = gamma_from_normalization_at(&p, 0.0, base.omega_bar(), NormalizationRoute::Quadrature)?;
        for i in 0..10 {
            let b = i as f64 / 10.0;
            let pole = pole_newton(&p, b, PoleOptions::default())?;
            let spec = gamma_from_normalization_at(&p, b, pole.omega_bar(), NormalizationRoute::Quadrature)?;
            println!(
                "{j},{b:.1},{:.6},{:.6},{:.6}",
                gamma_ratio_closed_form(tr, b),
                pole.gamma / g0,
                spec / n0
            );
        }
        // at B = omega0 the pole expansion degenerates; the closed form reaches 2^kappa / 2
        println!("{j},1.0,{:.6},,", gamma_ratio_closed_form(tr, 1.0));
    }
    Ok(())
}
