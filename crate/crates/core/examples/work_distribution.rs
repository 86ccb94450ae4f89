//! Joint work/heat distribution of one engine, written as CSV to stdout.

use otto_tur::distribution::bosonic_pmf;
use otto_tur::{EngineParams, Result};

fn main() -> Result<()> {
    let params = EngineParams::new(1.0, 0.6, 1.0, 2.0, std::f64::consts::FRAC_PI_4)?;
    let pmf = bosonic_pmf(&params);
    eprintln!(
        "x = {:.6}, y = {:.6}, P(0) = {:.6}, <W> = {:.6}",
        pmf.ratio_pos,
        pmf.ratio_neg,
        pmf.prob(0),
        pmf.moments().mean_w
    );
    pmf.write_csv(std::io::stdout().lock(), Some((-10, 10)))
}
