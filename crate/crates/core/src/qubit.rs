//! Two-qubit Otto engine with a partial-swap stroke.
//!
//! Each qubit has `H = -omega |0><0|`, so the Fermi occupation `N` is the
//! weight of the upper level `|1>`. The joint law of `(W, Q_H)` lives on the
//! three points `n in {-1, 0, 1}`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{EngineParams, Occupations, Statistics};
use crate::error::Result;
use crate::export::{fmt_f64, Table};
use crate::moments::Moments;
use crate::special::h_fn;
use crate::tur::{satisfies, TurReport};

/// Engine parameters interpreted with Fermi occupations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitEngineParams(pub EngineParams);

impl QubitEngineParams {
    pub fn new(omega_a: f64, omega_b: f64, beta_a: f64, beta_b: f64, theta: f64) -> Result<Self> {
        EngineParams::new(omega_a, omega_b, beta_a, beta_b, theta).map(Self)
    }

    pub fn occupations(&self) -> Occupations {
        self.0.occupations(Statistics::Fermi)
    }
}

impl From<EngineParams> for QubitEngineParams {
    fn from(params: EngineParams) -> Self {
        Self(params)
    }
}

/// Probabilities of `n = 0, +1, -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePointPmf {
    pub p_zero: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl ThreePointPmf {
    pub fn from_occupations(n_a: f64, n_b: f64, sin2_theta: f64) -> Self {
        let p_plus = n_a * (1.0 - n_b) * sin2_theta;
        let p_minus = n_b * (1.0 - n_a) * sin2_theta;
        Self {
            p_zero: 1.0 - (n_a + n_b - 2.0 * n_a * n_b) * sin2_theta,
            p_plus,
            p_minus,
        }
    }

    pub fn new(params: &QubitEngineParams) -> Self {
        let occ = params.occupations();
        Self::from_occupations(occ.n_a, occ.n_b, params.0.sin2_theta())
    }

    pub fn prob(&self, n: i64) -> f64 {
        match n {
            0 => self.p_zero,
            1 => self.p_plus,
            -1 => self.p_minus,
            _ => 0.0,
        }
    }
}

pub fn qubit_char_fn(params: &QubitEngineParams, lambda: Complex64, mu: Complex64) -> Complex64 {
    let p = &params.0;
    let occ = params.occupations();
    let u = mu * p.omega_a - lambda * (p.omega_a - p.omega_b);
    let spread = occ.n_a + occ.n_b - 2.0 * occ.n_a * occ.n_b;
    let bias = occ.n_a - occ.n_b;
    1.0 + p.sin2_theta() * (spread * (u.cos() - 1.0) + Complex64::i() * bias * u.sin())
}

/// Raw moment `<Q_H^k>`: odd orders carry the occupation difference, even
/// orders the spread.
pub fn qubit_heat_moment(params: &QubitEngineParams, order: u32) -> f64 {
    if order == 0 {
        return 1.0;
    }
    let occ = params.occupations();
    let weight = if order % 2 == 1 {
        occ.n_a - occ.n_b
    } else {
        occ.n_a + occ.n_b - 2.0 * occ.n_a * occ.n_b
    };
    params.0.omega_a.powi(order as i32) * weight * params.0.sin2_theta()
}

/// Mixed moment `<W^j Q_H^k> = ((w_b - w_a)/w_a)^j <Q_H^{j+k}>`.
pub fn qubit_mixed_moment(params: &QubitEngineParams, order_w: u32, order_qh: u32) -> f64 {
    let p = &params.0;
    ((p.omega_b - p.omega_a) / p.omega_a).powi(order_w as i32)
        * qubit_heat_moment(params, order_w + order_qh)
}

pub fn qubit_moments(params: &QubitEngineParams) -> Moments {
    let p = &params.0;
    let occ = params.occupations();
    let s = p.sin2_theta();
    let mean_n = (occ.n_a - occ.n_b) * s;
    let second = (occ.n_a + occ.n_b - 2.0 * occ.n_a * occ.n_b) * s;
    Moments::from_index(mean_n, second - mean_n * mean_n, p.omega_a - p.omega_b, p.omega_a)
}

pub fn qubit_entropy_production(params: &QubitEngineParams) -> f64 {
    let occ = params.occupations();
    params.0.affinity() * (occ.n_b - occ.n_a) * params.0.sin2_theta()
}

/// Uncertainty report with the exact relation `var/mean^2 = h(x)/sigma - 1`.
/// The standard bound `2/sigma` can fail here; the saturable one cannot.
pub fn qubit_tur_report(params: &QubitEngineParams) -> TurReport {
    let occ = params.occupations();
    let s = params.0.sin2_theta();
    let bias = occ.n_a - occ.n_b;
    if s == 0.0 || bias == 0.0 {
        return TurReport::degenerate();
    }
    let spread = occ.n_a + occ.n_b - 2.0 * occ.n_a * occ.n_b;
    let inv_snr = spread / (bias * bias * s) - 1.0;
    let sigma = qubit_entropy_production(params);
    TurReport::new(inv_snr, sigma, h_fn(params.0.affinity()) / sigma - 1.0)
}

/// One cell of a [`violation_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub n_a: f64,
    pub n_b: f64,
    /// `<W>^2 / var(W)`
    pub snr: f64,
    pub half_sigma: f64,
    /// `snr > sigma / 2`: the standard bound fails.
    pub violated: bool,
    pub saturable_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationScan {
    pub theta: f64,
    pub resolution: usize,
    pub cells: Vec<ScanCell>,
}

impl ViolationScan {
    pub fn violated_count(&self) -> usize {
        self.cells.iter().filter(|c| c.violated).count()
    }

    pub fn area_fraction(&self) -> f64 {
        self.violated_count() as f64 / self.cells.len() as f64
    }

    pub fn saturable_failures(&self) -> usize {
        self.cells.iter().filter(|c| !c.saturable_holds).count()
    }

    /// The cell whose square contains `(n_a, n_b)`.
    pub fn cell_at(&self, n_a: f64, n_b: f64) -> Option<&ScanCell> {
        let res = self.resolution;
        let index = |n: f64| {
            let i = (n / 0.5 * res as f64).floor();
            (i >= 0.0 && i < res as f64).then_some(i as usize)
        };
        let (i, j) = (index(n_a)?, index(n_b)?);
        self.cells.get(i * res + j)
    }

    pub fn to_table(&self) -> Table {
        let mut table = Table::new(["n_a", "n_b", "snr", "half_sigma", "violated"]);
        for c in &self.cells {
            table.push(vec![
                fmt_f64(c.n_a),
                fmt_f64(c.n_b),
                fmt_f64(c.snr),
                fmt_f64(c.half_sigma),
                u8::from(c.violated).to_string(),
            ]);
        }
        table
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_table().write_to(out)
    }
}

/// Evaluate one point of the `(N_a, N_b)` plane. The relation only depends on
/// the products `beta omega = ln((1 - N)/N)`, so no frequencies are needed.
pub fn scan_point(n_a: f64, n_b: f64, sin2_theta: f64) -> ScanCell {
    let bias = n_a - n_b;
    let spread = n_a + n_b - 2.0 * n_a * n_b;
    let affinity = ((1.0 - n_a) / n_a).ln() - ((1.0 - n_b) / n_b).ln();
    let sigma = -affinity * bias * sin2_theta;
    if bias == 0.0 || sin2_theta == 0.0 {
        return ScanCell {
            n_a,
            n_b,
            snr: 0.0,
            half_sigma: 0.0,
            violated: false,
            saturable_holds: true,
        };
    }
    let report = TurReport::new(spread / (bias * bias * sin2_theta) - 1.0, sigma, f64::NAN);
    ScanCell {
        n_a,
        n_b,
        snr: report.snr_w(),
        half_sigma: 0.5 * sigma,
        violated: !satisfies(report.inv_snr_w, report.standard_tur_rhs),
        saturable_holds: report.flags.saturable,
    }
}

/// Compare `<W>^2/var(W)` with `sigma/2` on the cell centres of a
/// `resolution x resolution` grid over `(0, 1/2)^2`, row-major in `N_a`.
pub fn violation_scan(theta: f64, resolution: usize) -> ViolationScan {
    let s = theta.sin().powi(2);
    let width = 0.5 / resolution as f64;
    let mut cells = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let n_a = (i as f64 + 0.5) * width;
        for j in 0..resolution {
            let n_b = (j as f64 + 0.5) * width;
            cells.push(scan_point(n_a, n_b, s));
        }
    }
    ViolationScan {
        theta,
        resolution,
        cells,
    }
}
