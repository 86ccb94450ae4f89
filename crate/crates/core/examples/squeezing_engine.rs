//! Two-mode squeezing stroke: moments and uncertainty ratio, with a
//! brute-force cross-check at one point.

use otto_tur::distribution::squeeze_pmf;
use otto_tur::oracle::{joint_distribution, StrokeKind, TruncationSpec};
use otto_tur::strokes::{squeeze_moments, SqueezeParams};
use otto_tur::Result;

fn main() -> Result<()> {
    for r in [0.1, 0.3, 0.6, 1.0] {
        let params = SqueezeParams::new(1.0, 0.6, 1.0, 2.0, r)?;
        let (m, report) = squeeze_moments(&params);
        println!(
            "r = {r:.1}: <W> = {:+.5}, Var W = {:.5}, sigma = {:.5}, var/mean^2 = {:.5} (exact {:.5})",
            m.mean_w, m.var_w, report.sigma, report.inv_snr_w, report.exact_rhs
        );
    }
    let params = SqueezeParams::new(1.0, 0.6, 1.0, 2.0, 0.3)?;
    let (n_a, n_b) = params.occupations();
    let kind = StrokeKind::TwoModeSqueeze { r: params.r };
    let trunc = TruncationSpec::for_stroke(kind, 80, n_a, n_b);
    let oracle = joint_distribution(kind, n_a, n_b, params.omega_a, params.omega_b, &trunc)?;
    println!(
        "oracle at r = 0.3, n_max = 80: total variation {:.2e}, leakage {:.2e}",
        oracle.total_variation(&squeeze_pmf(&params)),
        oracle.leakage
    );
    Ok(())
}
