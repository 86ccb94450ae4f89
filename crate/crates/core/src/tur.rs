//! Uncertainty-relation bookkeeping shared by every engine variant.

use serde::{Deserialize, Serialize};

use crate::special::f_bound;

/// Relative slack used when comparing a ratio with a bound, so that exact
/// equalities are not reported as violations because of rounding.
pub const BOUND_SLACK: f64 = 1e-12;

pub(crate) fn satisfies(lhs: f64, rhs: f64) -> bool {
    if lhs.is_infinite() && lhs > 0.0 {
        return true;
    }
    lhs >= rhs - BOUND_SLACK * rhs.abs()
}

/// Which bounds hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurFlags {
    /// `var/mean^2 >= 2/sigma + 1`
    pub shifted_tur: bool,
    /// `var/mean^2 >= 2/sigma`
    pub standard_tur: bool,
    /// `var/mean^2 >= f(sigma)`
    pub saturable: bool,
    /// Work-fluctuation-efficiency trade-off, heat-engine regime only.
    pub work_tradeoff: Option<bool>,
    /// Efficiency bound from the same trade-off, heat-engine regime only.
    pub efficiency_bound: Option<bool>,
}

/// Inverse signal-to-noise ratio of work against the entropy-production
/// bounds.
///
/// `exact_rhs` holds the variant's exact closed-form expression of the same
/// ratio in terms of entropy production; for a consistent model
/// `inv_snr_w == exact_rhs` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurReport {
    pub inv_snr_w: f64,
    pub sigma: f64,
    pub exact_rhs: f64,
    pub standard_tur_rhs: f64,
    pub shifted_tur_rhs: f64,
    pub saturable_rhs: f64,
    pub flags: TurFlags,
    pub efficiency: Option<f64>,
    pub efficiency_bound: Option<f64>,
}

impl TurReport {
    pub fn new(inv_snr_w: f64, sigma: f64, exact_rhs: f64) -> Self {
        let sigma_pos = sigma.max(0.0);
        let standard_tur_rhs = if sigma_pos == 0.0 { f64::INFINITY } else { 2.0 / sigma_pos };
        let shifted_tur_rhs = standard_tur_rhs + 1.0;
        let saturable_rhs = f_bound(sigma_pos).unwrap_or(f64::INFINITY);
        let flags = TurFlags {
            shifted_tur: satisfies(inv_snr_w, shifted_tur_rhs),
            standard_tur: satisfies(inv_snr_w, standard_tur_rhs),
            saturable: satisfies(inv_snr_w, saturable_rhs),
            work_tradeoff: None,
            efficiency_bound: None,
        };
        Self {
            inv_snr_w,
            sigma,
            exact_rhs,
            standard_tur_rhs,
            shifted_tur_rhs,
            saturable_rhs,
            flags,
            efficiency: None,
            efficiency_bound: None,
        }
    }

    /// Zero mean current: the inverse SNR diverges and no entropy is produced.
    pub fn degenerate() -> Self {
        Self::new(f64::INFINITY, 0.0, f64::INFINITY)
    }

    pub fn is_degenerate(&self) -> bool {
        self.inv_snr_w.is_infinite()
    }

    /// Signal-to-noise ratio `mean^2 / var`.
    pub fn snr_w(&self) -> f64 {
        1.0 / self.inv_snr_w
    }

    /// Relative residual of the exact identity `inv_snr_w == exact_rhs`.
    pub fn identity_residual(&self) -> f64 {
        if self.is_degenerate() && self.exact_rhs.is_infinite() {
            return 0.0;
        }
        (self.inv_snr_w - self.exact_rhs).abs() / self.inv_snr_w.abs()
    }

    /// Distance above the saturable bound.
    pub fn saturable_gap(&self) -> f64 {
        self.inv_snr_w - self.saturable_rhs
    }
}
