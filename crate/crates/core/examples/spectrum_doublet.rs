//! Emitted-photon spectrum: one line with the laser off, an Autler-Townes
//! doublet at omega_bar +- B with the laser on.

use laser_zeno::self_energy::pole_newton;
use laser_zeno::spectrum::{emission_normalization, locate_peak, spectrum_b, SpectrumCurve, LineWidths};
use laser_zeno::{PoleOptions, SystemParams, TransitionSpec};

fn main() -> laser_zeno::Result<()> {
    // a broad line so the doublet is visible on a coarse grid
    let p = SystemParams::standard(1e-3, TransitionSpec::electric(2), 5.0, 1.0)?;
    let b = 0.2;
    let pole = pole_newton(&p, b, PoleOptions::default())?;
    let c = pole.omega_bar();

    let up = locate_peak(&p, &pole, b, c + b);
    let down = locate_peak(&p, &pole, b, c - b);
    println!("gamma = {:.4e}, omega_bar = {c:.6}", pole.gamma);
    println!("peaks at {up:.6} and {down:.6}");
    println!(
        "height ratio {:.5}, chi^2 ratio {:.5}",
        spectrum_b(&p, &pole, b, up) / spectrum_b(&p, &pole, b, down),
        p.chi2(c + b) / p.chi2(c - b)
    );
    println!("total emission {:.6}", emission_normalization(&p, b, c, pole.gamma)?);

    let curve = SpectrumCurve::sample(&p, &pole, b, 0.7, 1.3, 61, LineWidths::Shared)?;
    let top = curve.density.iter().cloned().fold(0.0, f64::max);
    for (w, d) in curve.omegas.iter().zip(&curve.density) {
        println!("{w:.3} {}", "#".repeat((60.0 * d / top).round() as usize));
    }
    Ok(())
}
