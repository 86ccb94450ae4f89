//! Engine configuration, thermal occupations and regime classification.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Relative tolerance for the boundaries between operating regimes.
pub const REGIME_TOLERANCE: f64 = 1e-12;

/// Particle statistics of the working media.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Bose,
    Fermi,
}

/// Mean thermal occupation `(e^{beta omega} -/+ 1)^{-1}`.
pub fn occupation(beta: f64, omega: f64, statistics: Statistics) -> Result<f64> {
    if !(beta > 0.0) || !(omega > 0.0) {
        return domain(format!(
            "occupation needs beta > 0 and omega > 0 (beta = {beta}, omega = {omega})"
        ));
    }
    let x = beta * omega;
    Ok(match statistics {
        Statistics::Bose => 1.0 / x.exp_m1(),
        // Written as e^{-x}/(1 + e^{-x}) so that large x does not overflow.
        Statistics::Fermi => {
            let e = (-x).exp();
            e / (1.0 + e)
        }
    })
}

/// Inverse temperature that produces a given Bose occupation at `omega`.
pub(crate) fn bose_beta(n: f64, omega: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() || !(omega > 0.0) {
        return domain(format!(
            "need a finite occupation > 0 and omega > 0 (n = {n}, omega = {omega})"
        ));
    }
    Ok((1.0 / n).ln_1p() / omega)
}

/// Mean occupations of the two modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupations {
    pub n_a: f64,
    pub n_b: f64,
    pub statistics: Statistics,
}

/// Full configuration of one Otto cycle with a beam-splitter stroke.
///
/// Units: `hbar = k_B = 1`. Mode `a` touches the bath at inverse temperature
/// `beta_a`, mode `b` the one at `beta_b`. The coupling phase `phi` is kept
/// for completeness but has no influence on any statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl EngineParams {
    pub fn new(omega_a: f64, omega_b: f64, beta_a: f64, beta_b: f64, theta: f64) -> Result<Self> {
        let params = Self {
            omega_a,
            omega_b,
            beta_a,
            beta_b,
            theta,
            phi: 0.0,
        };
        params.validate()?;
        if beta_a >= beta_b {
            log::warn!(
                "beta_a = {beta_a} >= beta_b = {beta_b}: bath a is not the hotter one; \
                 results remain valid but regime labels refer to the actual ordering"
            );
        }
        Ok(params)
    }

    /// Build parameters from target Bose occupations instead of temperatures.
    pub fn from_occupations(
        omega_a: f64,
        omega_b: f64,
        n_a: f64,
        n_b: f64,
        theta: f64,
    ) -> Result<Self> {
        Self::new(
            omega_a,
            omega_b,
            bose_beta(n_a, omega_a)?,
            bose_beta(n_b, omega_b)?,
            theta,
        )
    }

    pub fn with_phi(mut self, phi: f64) -> Result<Self> {
        if !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
            return domain(format!("phi must lie in [0, 2 pi), got {phi}"));
        }
        self.phi = phi;
        Ok(self)
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        self.theta = theta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return domain(format!("{name} must be finite and > 0, got {value}"));
            }
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return domain(format!("theta must lie in [0, pi/2], got {}", self.theta));
        }
        Ok(())
    }

    pub fn t_a(&self) -> f64 {
        1.0 / self.beta_a
    }

    pub fn t_b(&self) -> f64 {
        1.0 / self.beta_b
    }

    pub fn sin2_theta(&self) -> f64 {
        let s = self.theta.sin();
        s * s
    }

    /// Thermodynamic affinity `beta_a omega_a - beta_b omega_b`.
    pub fn affinity(&self) -> f64 {
        self.beta_a * self.omega_a - self.beta_b * self.omega_b
    }

    pub fn occupations(&self, statistics: Statistics) -> Occupations {
        // Parameters are validated on construction, so these cannot fail.
        let n_a = occupation(self.beta_a, self.omega_a, statistics).unwrap_or(f64::NAN);
        let n_b = occupation(self.beta_b, self.omega_b, statistics).unwrap_or(f64::NAN);
        Occupations {
            n_a,
            n_b,
            statistics,
        }
    }

    pub fn bose(&self) -> Occupations {
        self.occupations(Statistics::Bose)
    }
}

/// Operating regime of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    HeatEngine,
    Refrigerator,
    ThermalAccelerator,
    /// Equal frequencies, equal occupations (Carnot point) or no coupling.
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::HeatEngine => "heat_engine",
            Regime::Refrigerator => "refrigerator",
            Regime::ThermalAccelerator => "thermal_accelerator",
            Regime::Degenerate => "degenerate",
        }
    }
}

fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= REGIME_TOLERANCE * f64::max(x.abs(), y.abs())
}

/// Classify the cycle from the frequency ratio and the occupation ordering.
///
/// The bath with the higher temperature plays the role of the hot bath; with
/// the usual ordering `beta_a < beta_b` that is bath `a`.
pub fn classify_regime(params: &EngineParams) -> Regime {
    let (w_hot, w_cold, bw_hot, bw_cold) = if params.beta_a <= params.beta_b {
        (
            params.omega_a,
            params.omega_b,
            params.beta_a * params.omega_a,
            params.beta_b * params.omega_b,
        )
    } else {
        (
            params.omega_b,
            params.omega_a,
            params.beta_b * params.omega_b,
            params.beta_a * params.omega_a,
        )
    };
    if params.sin2_theta() == 0.0 || nearly_equal(w_hot, w_cold) || nearly_equal(bw_hot, bw_cold) {
        return Regime::Degenerate;
    }
    // beta omega ordering is the occupation ordering (reversed).
    let hot_more_populated = bw_hot < bw_cold;
    if w_hot > w_cold {
        if hot_more_populated {
            Regime::HeatEngine
        } else {
            Regime::Refrigerator
        }
    } else {
        Regime::ThermalAccelerator
    }
}

/// Same classification through temperature and frequency ratios only.
///
/// Heat engine: `T_B/T_A < w_B/w_A < 1`; refrigerator: `w_B/w_A < T_B/T_A < 1`;
/// accelerator: `w_B/w_A > 1`. Assumes `T_A > T_B`.
pub fn classify_by_ratios(params: &EngineParams) -> Regime {
    let temp_ratio = params.beta_a / params.beta_b;
    let freq_ratio = params.omega_b / params.omega_a;
    if params.sin2_theta() == 0.0 || nearly_equal(freq_ratio, 1.0) || nearly_equal(freq_ratio, temp_ratio) {
        Regime::Degenerate
    } else if freq_ratio > 1.0 {
        Regime::ThermalAccelerator
    } else if temp_ratio < freq_ratio {
        Regime::HeatEngine
    } else {
        Regime::Refrigerator
    }
}
