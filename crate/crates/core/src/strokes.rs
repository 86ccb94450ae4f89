//! Engines whose stroke is two-mode squeezing or the cubic exchange
//! `exp(t a^dag b^2 - t^* a b^dag 2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{bose_beta, occupation, Statistics};
use crate::error::{domain, Result};
use crate::moments::Moments;
use crate::oracle::{joint_distribution, StrokeKind, TruncationSpec};
use crate::special::h_fn;
use crate::tur::TurReport;

/// Otto cycle with a two-mode squeezing stroke of magnitude `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub r: f64,
}

fn check_positive(values: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in values {
        if !(v > 0.0) || !v.is_finite() {
            return domain(format!("{name} must be finite and > 0, got {v}"));
        }
    }
    Ok(())
}

impl SqueezeParams {
    pub fn new(omega_a: f64, omega_b: f64, beta_a: f64, beta_b: f64, r: f64) -> Result<Self> {
        check_positive(&[
            ("omega_a", omega_a),
            ("omega_b", omega_b),
            ("beta_a", beta_a),
            ("beta_b", beta_b),
        ])?;
        if !(r >= 0.0) || !r.is_finite() {
            return domain(format!("squeeze parameter r must be finite and >= 0, got {r}"));
        }
        Ok(Self {
            omega_a,
            omega_b,
            beta_a,
            beta_b,
            r,
        })
    }

    pub fn from_occupations(omega_a: f64, omega_b: f64, n_a: f64, n_b: f64, r: f64) -> Result<Self> {
        Self::new(omega_a, omega_b, bose_beta(n_a, omega_a)?, bose_beta(n_b, omega_b)?, r)
    }

    pub fn occupations(&self) -> (f64, f64) {
        (
            occupation(self.beta_a, self.omega_a, Statistics::Bose).expect("validated"),
            occupation(self.beta_b, self.omega_b, Statistics::Bose).expect("validated"),
        )
    }

    /// `beta_a w_a + beta_b w_b`, the argument of `h` in the exact relation.
    pub fn affinity(&self) -> f64 {
        self.beta_a * self.omega_a + self.beta_b * self.omega_b
    }
}

/// Moments and uncertainty report of the squeezing engine.
///
/// Work is always consumed: `<W> = (w_a + w_b)(N_a + N_b + 1) sinh^2 r >= 0`
/// and both heats are non-positive. The exact relation reads
/// `var/mean^2 = h(beta_a w_a + beta_b w_b)/sigma + 1`.
pub fn squeeze_moments(params: &SqueezeParams) -> (Moments, TurReport) {
    let (n_a, n_b) = params.occupations();
    let s = params.r.sinh().powi(2);
    let step_w = params.omega_a + params.omega_b;
    if s == 0.0 {
        return (Moments::from_index(0.0, 0.0, step_w, params.omega_a), TurReport::degenerate());
    }
    let spread = n_a + n_b + 2.0 * n_a * n_b + 1.0;
    let total = n_a + n_b + 1.0;
    let mean_n = -total * s;
    let var_n = (spread + total * total * s) * s;
    let moments = Moments::from_index(mean_n, var_n, step_w, params.omega_a);
    let sigma = params.affinity() / step_w * moments.mean_w;
    let inv_snr = spread / (total * total * s) + 1.0;
    let report = TurReport::new(inv_snr, sigma, h_fn(params.affinity()) / sigma + 1.0);
    (moments, report)
}

/// Otto cycle with the cubic exchange stroke; the coupling is complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub theta_c: Complex64,
}

impl CubicParams {
    pub fn new(omega_a: f64, omega_b: f64, beta_a: f64, beta_b: f64, theta_c: Complex64) -> Result<Self> {
        check_positive(&[
            ("omega_a", omega_a),
            ("omega_b", omega_b),
            ("beta_a", beta_a),
            ("beta_b", beta_b),
        ])?;
        if !theta_c.is_finite() {
            return domain("coupling must be finite");
        }
        Ok(Self {
            omega_a,
            omega_b,
            beta_a,
            beta_b,
            theta_c,
        })
    }

    pub fn occupations(&self) -> (f64, f64) {
        (
            occupation(self.beta_a, self.omega_a, Statistics::Bose).expect("validated"),
            occupation(self.beta_b, self.omega_b, Statistics::Bose).expect("validated"),
        )
    }

    /// Work quantum `w_a - 2 w_b`.
    pub fn step_w(&self) -> f64 {
        self.omega_a - 2.0 * self.omega_b
    }

    /// Constant `-W/Q_H` on the support.
    pub fn efficiency(&self) -> f64 {
        1.0 - 2.0 * self.omega_b / self.omega_a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicEntropy {
    pub sigma: f64,
    /// Mean work implied by the support, `-(w_a - 2 w_b)/w_a <Q_H>`.
    pub mean_w: f64,
    pub nonnegative: bool,
}

/// Entropy production `-(beta_a w_a - 2 beta_b w_b)/w_a <Q_H>` from an
/// externally supplied mean heat.
pub fn cubic_entropy_relation(params: &CubicParams, mean_qh: f64) -> CubicEntropy {
    let rate = params.beta_a * params.omega_a - 2.0 * params.beta_b * params.omega_b;
    let sigma = -rate / params.omega_a * mean_qh;
    CubicEntropy {
        sigma,
        mean_w: -params.step_w() / params.omega_a * mean_qh,
        nonnegative: sigma >= -1e-14 * mean_qh.abs(),
    }
}

/// Whether the cubic engine can extract work while heat leaves the hot bath:
/// `beta_a w_a < 2 beta_b w_b` together with `w_a > 2 w_b`.
pub fn cubic_heat_engine_condition(params: &CubicParams) -> bool {
    params.beta_a * params.omega_a < 2.0 * params.beta_b * params.omega_b
        && params.omega_a > 2.0 * params.omega_b
}

/// Occupation form of `beta_a w_a < 2 beta_b w_b`: `N_a > N_b^2 / (2 N_b + 1)`.
pub fn cubic_occupation_condition(n_a: f64, n_b: f64) -> bool {
    n_a > n_b * n_b / (2.0 * n_b + 1.0)
}

/// Support check of the cubic engine against the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicDeltaReport {
    /// Probability off the line `2 dm + dn = 0`.
    pub off_support_mass: f64,
    pub tail_bound: f64,
    /// Largest spread of `-W/Q_H` over support points with `Q_H != 0`.
    pub efficiency_spread: f64,
    pub mean_qh: f64,
    pub entropy: CubicEntropy,
    /// Off-support mass is below `max(1e-10, tail_bound)`.
    pub within_bound: bool,
}

pub fn cubic_delta_structure(params: &CubicParams, trunc: Option<TruncationSpec>) -> Result<CubicDeltaReport> {
    let (n_a, n_b) = params.occupations();
    let stroke = StrokeKind::CubicExchange {
        theta: params.theta_c,
    };
    let trunc = match trunc {
        Some(t) => t,
        None => TruncationSpec::auto(stroke, n_a, n_b, 1e-10),
    };
    let result = joint_distribution(stroke, n_a, n_b, params.omega_a, params.omega_b, &trunc)?;
    let off = result.off_support_mass(2, 1);
    let target = params.efficiency();
    let mut spread: f64 = 0.0;
    for (&(dm, dn), &p) in &result.joint {
        if dm != 0 && 2 * dm + dn == 0 && p > 0.0 {
            let eff = -result.work(dm, dn) / result.heat_hot(dm);
            spread = spread.max((eff - target).abs());
        }
    }
    let mean_qh = result.moments().mean_qh;
    Ok(CubicDeltaReport {
        off_support_mass: off,
        tail_bound: result.tail_bound,
        efficiency_spread: spread,
        mean_qh,
        entropy: cubic_entropy_relation(params, mean_qh),
        within_bound: off <= f64::max(1e-10, result.tail_bound),
    })
}
