//! How strong is a real laser? B from power, spot size and wavelength.

use laser_zeno::lab_units::{b_from_power, derived_power_coefficient, rabi_from_b, POWER_COEFFICIENT};

fn main() -> laser_zeno::Result<()> {
    println!("coefficient: quoted {POWER_COEFFICIENT}, rebuilt from constants {:.3}", derived_power_coefficient());

    // (power W, spot um^2, wavelength um, natural width eV)
    let cases = [
        (1.0, 1.0, 1.0, 1.0),
        (1e-3, 100.0, 0.5, 1e-7),
        (10.0, 10.0, 1.0, 1e-7),
    ];
    let omega0_ev = 2.0;
    for (pw, a, l, w) in cases {
        let b = b_from_power(pw, l, a, w)?;
        println!(
            "P = {pw:7.1e} W, A = {a:5.0} um^2, lambda = {l} um, width = {w:.0e} eV: B = {b:.3e} eV, Rabi = {:.3e} eV, B/omega0 = {:.2e}",
            rabi_from_b(b)?,
            b / omega0_ev
        );
    }
    Ok(())
}
