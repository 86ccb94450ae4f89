//! Exact uncertainty relation of the swap engine compared with the
//! standard, shifted and saturable bounds.

use otto_tur::bosonic::tur_report;
use otto_tur::{classify_regime, EngineParams, Result};

fn main() -> Result<()> {
    println!("{:>6} {:>14} {:>12} {:>12} {:>12} {:>10}  regime", "wb", "var/mean^2", "exact", "2/sigma+1", "f(sigma)", "residual");
    for i in 1..10 {
        let wb = 0.1 * i as f64;
        let params = EngineParams::new(1.0, wb, 1.0, 2.0, std::f64::consts::FRAC_PI_2)?;
        let r = tur_report(&params);
        println!(
            "{wb:>6.2} {:>14.6} {:>12.6} {:>12.6} {:>12.6} {:>10.1e}  {}",
            r.inv_snr_w,
            r.exact_rhs,
            r.shifted_tur_rhs,
            r.saturable_rhs,
            r.identity_residual(),
            classify_regime(&params).as_str()
        );
    }
    Ok(())
}
