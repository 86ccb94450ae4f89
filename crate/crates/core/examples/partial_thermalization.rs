//! Swap engine whose baths only partly re-thermalize the modes.

use otto_tur::thermalization::{partial_tur_report, recursion_iterate, steady_occupations, ThermalizationParams};
use otto_tur::{EngineParams, Result};

fn main() -> Result<()> {
    let engine = EngineParams::new(1.0, 0.6, 1.0, 2.0, std::f64::consts::FRAC_PI_2)?;
    for gamma_tau in [0.1, 0.5, 1.0, 3.0, 10.0] {
        let params = ThermalizationParams::new(engine, gamma_tau)?;
        let (na, nb) = steady_occupations(&params);
        let r = partial_tur_report(&params);
        println!(
            "gamma tau {gamma_tau:>4}: steady ({na:.5}, {nb:.5}), var/mean^2 {:.4}, v {:.4} >= {:.4}, modified bound {:.4}",
            r.report.inv_snr_w, r.v, r.v_bound, r.modified_tur_rhs
        );
    }
    let params = ThermalizationParams::new(engine, 0.5)?;
    let path = recursion_iterate(&params, (0.0, 0.0), 40)?;
    let last = path.last().copied().unwrap_or_default();
    println!("40 cycles from the ground state reach ({:.6}, {:.6})", last.0, last.1);
    Ok(())
}
