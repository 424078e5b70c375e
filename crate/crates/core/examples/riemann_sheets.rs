//! Where the pole lives. Laser off, it sits on the second sheet of q; with
//! 0 < B < omega0 both shifted arguments have crossed their cuts (sheet III);
//! above omega0 only one has (sheet II).
//!
//! Also shows the failure mode when the coupling is not perturbative: the
//! Newton iterate leaves the disc where the continuation is valid.

use laser_zeno::self_energy::{pole_newton, q_of_b, q_sheet_i, q_sheet_ii};
use laser_zeno::{Error, PoleOptions, SheetLabel, SystemParams, TransitionSpec};
use num_complex::Complex64;

fn main() -> laser_zeno::Result<()> {
    let p = SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1e3)?;
    let m = &p.form_factor;

    // sheet II continues sheet I across the cut from the right
    let eps = 1e-9;
    let right = q_sheet_i(m, Complex64::new(eps, -0.5))?;
    let left_i = q_sheet_i(m, Complex64::new(-eps, -0.5))?;
    let left_ii = q_sheet_ii(m, Complex64::new(-eps, -0.5))?;
    println!("jump across the cut on sheet I:  {:.3e}", (right - left_i).norm());
    println!("jump onto sheet II:              {:.3e}", (right - left_ii).norm());

    for b in [0.0, 0.4, 1.5] {
        let pole = pole_newton(&p, b, PoleOptions::default())?;
        let s = pole.s_pole;
        let on_i = (s + Complex64::new(0.0, 1.0) + q_of_b(&p, b, s, SheetLabel::I)?).norm();
        println!(
            "B = {b}: pole {s:.6e} on sheet {}; residual there {:.1e}, on sheet I {on_i:.1e}",
            pole.sheet, pole.residual
        );
    }

    // chi^2 normalized at omega0 with a distant cutoff: the coupling is huge
    let strong = SystemParams::standard(1e-4, TransitionSpec::electric(2), 1e3, 1.0)?;
    match pole_newton(&strong, 0.3, PoleOptions::default()) {
        Err(Error::WrongSheet { iterate, radius, sheet }) => {
            println!("non-perturbative model: iterate {iterate:.3e} left the radius-{radius} disc (sheet {sheet})")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
