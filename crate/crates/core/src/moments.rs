use serde::{Deserialize, Serialize};

/// First and second moments of work and heat for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_w: f64,
    pub mean_qh: f64,
    pub mean_qc: f64,
    pub var_w: f64,
    pub var_qh: f64,
    pub cov_w_qh: f64,
}

impl Moments {
    /// Moments of a law supported on `W = -n step_w`, `Q_H = n step_qh`,
    /// given the mean and variance of the integer index `n`.
    pub fn from_index(mean_n: f64, var_n: f64, step_w: f64, step_qh: f64) -> Self {
        let mean_w = -step_w * mean_n;
        let mean_qh = step_qh * mean_n;
        Self {
            mean_w,
            mean_qh,
            mean_qc: -mean_w - mean_qh,
            var_w: step_w * step_w * var_n,
            var_qh: step_qh * step_qh * var_n,
            cov_w_qh: -step_w * step_qh * var_n,
        }
    }

    pub fn zero() -> Self {
        Self::from_index(0.0, 0.0, 0.0, 0.0)
    }

    pub fn inv_snr_w(&self) -> f64 {
        if self.mean_w == 0.0 {
            f64::INFINITY
        } else {
            self.var_w / (self.mean_w * self.mean_w)
        }
    }

    /// `<W Q_H>`
    pub fn mixed_w_qh(&self) -> f64 {
        self.cov_w_qh + self.mean_w * self.mean_qh
    }
}
