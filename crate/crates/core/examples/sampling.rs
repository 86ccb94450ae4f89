//! Draw outcomes from the exact law and compare empirical moments.

use otto_tur::distribution::{bosonic_pmf, sample};
use otto_tur::{EngineParams, Result};

fn main() -> Result<()> {
    let params = EngineParams::new(1.0, 0.6, 1.0, 2.0, std::f64::consts::FRAC_PI_2)?;
    let pmf = bosonic_pmf(&params);
    let exact = pmf.moments();
    let count = 200_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for o in sample(&pmf, count, 42) {
        sum += o.w;
        sum2 += o.w * o.w;
    }
    let mean = sum / count as f64;
    let var = sum2 / count as f64 - mean * mean;
    println!("<W>   exact {:+.6}  sampled {:+.6}", exact.mean_w, mean);
    println!("Var W exact {:.6}  sampled {:.6}", exact.var_w, var);
    Ok(())
}
