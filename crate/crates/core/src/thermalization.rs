//! Swap engine whose strokes only partially thermalise the modes.
//!
//! Both modes relax towards their bath at the same rate for a time `tau`;
//! only `gamma_tau = gamma * tau` matters. After many cycles the modes enter
//! a periodic Gibbs state with occupations `N~_a`, `N~_b`, and every statistic
//! of the ideal swap engine applies with `N -> N~`.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distribution::{bosonic_pmf_from_occupations, WorkHeatPmf};
use crate::engine::EngineParams;
use crate::error::{domain, Result};
use crate::export::{fmt_f64, Table};
use crate::moments::Moments;
use crate::tur::{satisfies, TurReport};

/// Accepted distance of the coupling angle from a perfect swap.
pub const SWAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationParams {
    pub engine: EngineParams,
    pub gamma_tau: f64,
}

impl ThermalizationParams {
    /// Fails unless `theta = pi/2`: for a partial swap the modes leave the
    /// stroke correlated and the periodic state is no longer a product of
    /// Gibbs states.
    pub fn new(engine: EngineParams, gamma_tau: f64) -> Result<Self> {
        if (engine.theta - FRAC_PI_2).abs() > SWAP_TOLERANCE {
            return domain(format!(
                "partial thermalization is only modelled for a perfect swap (theta = pi/2), got theta = {}; \
                 for other angles the post-stroke state is correlated",
                engine.theta
            ));
        }
        if !(gamma_tau >= 0.0) {
            return domain(format!("gamma_tau must be >= 0, got {gamma_tau}"));
        }
        Ok(Self { engine, gamma_tau })
    }

    fn decay(&self) -> f64 {
        (-self.gamma_tau).exp()
    }
}

/// Periodic-state occupations
/// `N~_a = (N_a + e N_b)/(1 + e)`, `N~_b = (N_b + e N_a)/(1 + e)`, `e = exp(-gamma tau)`.
pub fn steady_occupations(params: &ThermalizationParams) -> (f64, f64) {
    let occ = params.engine.bose();
    let e = params.decay();
    (
        (occ.n_a + e * occ.n_b) / (1.0 + e),
        (occ.n_b + e * occ.n_a) / (1.0 + e),
    )
}

/// Occupations at the start of each cycle, beginning with `n0`; the result has
/// `cycles + 1` entries.
pub fn recursion_iterate(params: &ThermalizationParams, n0: (f64, f64), cycles: usize) -> Result<Vec<(f64, f64)>> {
    if !(n0.0 >= 0.0 && n0.1 >= 0.0) {
        return domain(format!("initial occupations must be >= 0, got {n0:?}"));
    }
    let occ = params.engine.bose();
    let e = params.decay();
    let mut out = Vec::with_capacity(cycles + 1);
    let mut cur = n0;
    out.push(cur);
    for _ in 0..cycles {
        cur = (
            e * cur.1 + (1.0 - e) * occ.n_a,
            e * cur.0 + (1.0 - e) * occ.n_b,
        );
        out.push(cur);
    }
    Ok(out)
}

/// `beta~ = ln((N~ + 1)/N~) / omega`; `+inf` for `N~ = 0`.
pub fn effective_inverse_temperature(n_tilde: f64, omega: f64) -> Result<f64> {
    if !(n_tilde >= 0.0) || !(omega > 0.0) {
        return domain(format!("need n_tilde >= 0 and omega > 0 (n_tilde = {n_tilde}, omega = {omega})"));
    }
    if n_tilde == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 / n_tilde).ln_1p() / omega)
}

/// Ideal swap-engine inverse SNR `(N_a + N_b + 2 N_a N_b)/(N_a - N_b)^2 + 1`.
pub fn ideal_inv_snr(n_a: f64, n_b: f64) -> f64 {
    let bias = n_a - n_b;
    (n_a + n_b + 2.0 * n_a * n_b) / (bias * bias) + 1.0
}

/// Inverse SNR of work under partial thermalization, written with the bath
/// occupations.
pub fn partial_inv_snr(n_a: f64, n_b: f64, gamma_tau: f64) -> f64 {
    let e = (-gamma_tau).exp();
    let bias = n_a - n_b;
    let num = (1.0 + e * e) * (n_a * (n_a + 1.0) + n_b * (n_b + 1.0))
        + 2.0 * e * (n_a + n_b + 2.0 * n_a * n_b);
    let gap = -(-gamma_tau).exp_m1();
    num / (gap * gap * bias * bias)
}

/// Replacement for `h` in the exact relation, as a function of
/// `beta_a w_a`, `beta_b w_b` and `gamma tau`.
pub fn v_function(xa: f64, xb: f64, gamma_tau: f64) -> f64 {
    let e = (-gamma_tau).exp();
    let d = xa - xb;
    let lift = (1.0 + e) * (1.0 + e);
    let num = lift * xa.cosh() + lift * xb.cosh() - (1.0 + e * e) * d.cosh() - e * (4.0 + e) - 1.0;
    let den = -(-2.0 * gamma_tau).exp_m1() * (xa.sinh() - xb.sinh() - d.sinh());
    d * num / den
}

/// `2 coth(gamma tau / 2)`, the lower bound of [`v_function`].
pub fn v_lower_bound(gamma_tau: f64) -> f64 {
    2.0 / (0.5 * gamma_tau).tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialTurReport {
    /// `exact_rhs` is `v/sigma + 1`.
    pub report: TurReport,
    pub v: f64,
    pub v_bound: f64,
    pub v_bound_holds: bool,
    /// `(2/sigma) coth(gamma tau / 2) + 1`
    pub modified_tur_rhs: f64,
    pub modified_tur_holds: bool,
    /// `tanh(gamma tau / 2)`: ratio of every mean to its ideal value.
    pub mean_scale: f64,
}

/// Mean work, heats and entropy production equal their ideal values times
/// `tanh(gamma tau / 2)`.
pub fn partial_moments(params: &ThermalizationParams) -> Moments {
    partial_pmf(params).moments()
}

pub fn partial_entropy_production(params: &ThermalizationParams) -> f64 {
    crate::bosonic::entropy_production(&params.engine) * (0.5 * params.gamma_tau).tanh()
}

pub fn partial_tur_report(params: &ThermalizationParams) -> PartialTurReport {
    let occ = params.engine.bose();
    let mean_scale = (0.5 * params.gamma_tau).tanh();
    let v_bound = v_lower_bound(params.gamma_tau);
    if params.gamma_tau == 0.0 || occ.n_a == occ.n_b {
        return PartialTurReport {
            report: TurReport::degenerate(),
            v: f64::NAN,
            v_bound,
            v_bound_holds: true,
            modified_tur_rhs: f64::INFINITY,
            modified_tur_holds: true,
            mean_scale,
        };
    }
    let p = &params.engine;
    let inv = partial_inv_snr(occ.n_a, occ.n_b, params.gamma_tau);
    let sigma = partial_entropy_production(params);
    let v = v_function(p.beta_a * p.omega_a, p.beta_b * p.omega_b, params.gamma_tau);
    let modified_tur_rhs = v_bound / sigma + 1.0;
    PartialTurReport {
        report: TurReport::new(inv, sigma, v / sigma + 1.0),
        v,
        v_bound,
        v_bound_holds: satisfies(v, v_bound),
        modified_tur_rhs,
        modified_tur_holds: satisfies(inv, modified_tur_rhs),
        mean_scale,
    }
}

/// Law of the heat index in the periodic state.
pub fn partial_pmf(params: &ThermalizationParams) -> WorkHeatPmf {
    let (na, nb) = steady_occupations(params);
    bosonic_pmf_from_occupations(na, nb, 1.0, params.engine.omega_a, params.engine.omega_b)
        .expect("steady occupations are non-negative")
}

/// SNR of work against `N_b` at fixed `N_a`, ideal and for each `gamma tau`.
/// Columns: `n_b`, `snr_ideal`, then `snr_gt_<value>` per rate.
pub fn snr_sweep(n_a: f64, n_b_values: &[f64], gamma_taus: &[f64]) -> Table {
    let mut header = vec!["n_b".to_string(), "snr_ideal".to_string()];
    header.extend(gamma_taus.iter().map(|g| format!("snr_gt_{g}")));
    let mut table = Table::new(header);
    for &nb in n_b_values {
        let mut row = vec![fmt_f64(nb), fmt_f64(1.0 / ideal_inv_snr(n_a, nb))];
        row.extend(gamma_taus.iter().map(|&g| fmt_f64(1.0 / partial_inv_snr(n_a, nb, g))));
        table.push(row);
    }
    table
}

pub fn write_snr_sweep<W: Write>(out: W, n_a: f64, n_b_values: &[f64], gamma_taus: &[f64]) -> Result<()> {
    snr_sweep(n_a, n_b_values, gamma_taus).write_to(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(gamma_tau: f64) -> ThermalizationParams {
        let engine = EngineParams::from_occupations(1.0, 0.6, 3.0, 1.0, FRAC_PI_2).unwrap();
        ThermalizationParams::new(engine, gamma_tau).unwrap()
    }

    #[test]
    fn rejects_partial_swap_and_negative_rate() {
        let engine = EngineParams::new(1.0, 0.6, 1.0, 2.0, 1.0).unwrap();
        assert!(ThermalizationParams::new(engine, 1.0).is_err());
        let swap = engine.with_theta(FRAC_PI_2).unwrap();
        assert!(ThermalizationParams::new(swap, -0.5).is_err());
    }

    #[test]
    fn steady_state_reference_and_limits() {
        let (na, nb) = steady_occupations(&reference(1.0));
        assert!((na - 2.462_117_157_260_009_8).abs() < 1e-12);
        assert!((na + nb - 4.0).abs() < 1e-12);
        let (na, nb) = steady_occupations(&reference(0.0));
        assert!((na - 2.0).abs() < 1e-12 && (nb - 2.0).abs() < 1e-12);
        let (na, nb) = steady_occupations(&reference(60.0));
        assert!((na - 3.0).abs() < 1e-12 && (nb - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recursion_converges_to_steady_state() {
        let params = reference(1.0);
        let steady = steady_occupations(&params);
        let traj = recursion_iterate(&params, (0.0, 0.0), 50).unwrap();
        let last = traj[50];
        assert!((last.0 - steady.0).abs() < 1e-15 * 4.0 && (last.1 - steady.1).abs() < 1e-15 * 4.0);
        let fixed = recursion_iterate(&params, steady, 5).unwrap();
        for p in fixed {
            assert!((p.0 - steady.0).abs() < 1e-14 && (p.1 - steady.1).abs() < 1e-14);
        }
        let long = recursion_iterate(&params, (7.0, 0.1), 200).unwrap();
        assert!((long[200].0 - steady.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_rate() {
        let params = reference(2.0);
        let steady = steady_occupations(&params);
        let traj = recursion_iterate(&params, (5.0, 0.3), 6).unwrap();
        let dist = |p: (f64, f64)| ((p.0 - steady.0).powi(2) + (p.1 - steady.1).powi(2)).sqrt();
        for k in 0..6 {
            let ratio = dist(traj[k + 1]) / dist(traj[k]);
            assert!((ratio - (-2.0f64).exp()).abs() < 1e-10, "{ratio}");
        }
    }

    #[test]
    fn effective_temperature_round_trip() {
        let beta = effective_inverse_temperature(2.462_117_157_260_009_8, 1.0).unwrap();
        assert!((beta - 0.340_858_684_255_436).abs() < 1e-12);
        let n = crate::engine::occupation(1.7, 0.8, crate::engine::Statistics::Bose).unwrap();
        assert!((effective_inverse_temperature(n, 0.8).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(effective_inverse_temperature(0.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn long_contact_recovers_ideal_engine() {
        let params = reference(40.0);
        let ideal = crate::bosonic::tur_report(&params.engine);
        let partial = partial_tur_report(&params);
        assert!((partial.report.inv_snr_w - ideal.inv_snr_w).abs() / ideal.inv_snr_w < 1e-10);
    }

    #[test]
    fn substitution_rule_and_identity() {
        for gt in [0.3, 1.0, 2.5] {
            let params = reference(gt);
            let partial = partial_tur_report(&params);
            let (na, nb) = steady_occupations(&params);
            assert!((ideal_inv_snr(na, nb) - partial.report.inv_snr_w).abs() / partial.report.inv_snr_w < 1e-12);
            assert!(partial.report.identity_residual() < 1e-10, "{gt}: {partial:?}");
            assert!(partial.v_bound_holds && partial.modified_tur_holds);
            let m = partial_moments(&params);
            assert!((m.inv_snr_w() - partial.report.inv_snr_w).abs() / m.inv_snr_w() < 1e-12);
            let ideal = crate::bosonic::moments(&params.engine);
            assert!((m.mean_w / ideal.mean_w - (0.5 * gt).tanh()).abs() < 1e-12);
        }
    }

    #[test]
    fn detailed_ft_with_effective_temperatures() {
        let params = reference(1.3);
        let (na, nb) = steady_occupations(&params);
        let p = &params.engine;
        let ba = effective_inverse_temperature(na, p.omega_a).unwrap();
        let bb = effective_inverse_temperature(nb, p.omega_b).unwrap();
        let pmf = partial_pmf(&params);
        for n in 1..=10i64 {
            let o = pmf.outcome(n);
            let predicted = ((bb - ba) * o.qh + bb * o.w).exp();
            let ratio = pmf.prob(n) / pmf.prob(-n);
            assert!((ratio - predicted).abs() / predicted < 1e-10);
            assert!((-o.w / o.qh - (1.0 - p.omega_b / p.omega_a)).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_rate_is_degenerate() {
        let r = partial_tur_report(&reference(0.0));
        assert!(r.report.is_degenerate());
    }

    #[test]
    fn sweep_layout() {
        let csv = snr_sweep(3.0, &[0.5, 1.0], &[1.0, 2.0]).to_csv_string().unwrap();
        assert!(csv.starts_with("n_b,snr_ideal,snr_gt_1,snr_gt_2\r\n"));
    }
}
