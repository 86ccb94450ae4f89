//! Detailed fluctuation theorem: p(n)/p(-n) against exp(-Σ) for a few engines.

use otto_tur::distribution::{bosonic_pmf, detailed_ft_check};
use otto_tur::{EngineParams, Result};

fn main() -> Result<()> {
    let settings = [
        (1.0, 0.6, 1.0, 2.0, std::f64::consts::FRAC_PI_2),
        (1.0, 0.3, 0.5, 3.0, 0.7),
        (2.0, 1.5, 0.2, 0.4, 1.2),
    ];
    for (wa, wb, ba, bb, theta) in settings {
        let params = EngineParams::new(wa, wb, ba, bb, theta)?;
        let pmf = bosonic_pmf(&params);
        let check = detailed_ft_check(&pmf, &params, 30);
        println!(
            "wa={wa} wb={wb} ba={ba} bb={bb} theta={theta:.3}: p(1)/p(-1)={:.6} max residual {:.2e} over n<={}",
            pmf.prob(1) / pmf.prob(-1),
            check.max_residual,
            check.effective_n_max
        );
    }
    Ok(())
}
