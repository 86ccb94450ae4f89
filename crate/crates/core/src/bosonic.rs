//! Exact statistics of the two-mode bosonic engine with a beam-splitter stroke.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{classify_regime, EngineParams, Regime};
use crate::error::{Error, Result};
use crate::moments::Moments;
use crate::special::h_fn;
use crate::tur::{satisfies, TurReport};

/// Denominators below this magnitude are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-300;

/// Base finite-difference step (before frequency scaling) for derivative
/// orders up to two.
pub const FD_BASE_STEP: f64 = 1e-3;

/// Joint characteristic function `chi(lambda, mu) = <exp(i lambda W + i mu Q_H)>`.
///
/// Complex arguments are accepted so that fluctuation identities such as
/// `chi(i beta_b, i(beta_b - beta_a)) = 1` are plain evaluations.
pub fn char_fn(params: &EngineParams, lambda: Complex64, mu: Complex64) -> Result<Complex64> {
    let occ = params.bose();
    let s = params.sin2_theta();
    let u = mu * params.omega_a - lambda * (params.omega_a - params.omega_b);
    let iu = Complex64::i() * u;
    // spread (cos u - 1) + i bias sin u factors as
    // N_a (1 + N_b) (e^{iu} - 1)(1 - e^{x - iu}), x = beta_a w_a - beta_b w_b,
    // which avoids cancelling large terms for imaginary u.
    let up = occ.n_a * (1.0 + occ.n_b);
    let x = params.beta_a * params.omega_a - params.beta_b * params.omega_b;
    let factored = -up * expm1(iu) * expm1(x - iu);
    let bracket = if up > 0.0 && factored.is_finite() {
        factored
    } else {
        let spread = occ.n_a + occ.n_b + 2.0 * occ.n_a * occ.n_b;
        let bias = occ.n_a - occ.n_b;
        spread * (u.cos() - 1.0) + Complex64::i() * bias * u.sin()
    };
    invert_denominator(1.0 - s * bracket)
}

fn expm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

fn invert_denominator(denom: Complex64) -> Result<Complex64> {
    if denom.norm() < POLE_THRESHOLD {
        return Err(Error::Pole(denom.norm()));
    }
    Ok(denom.inv())
}

/// Real-argument convenience wrapper around [`char_fn`].
pub fn char_fn_real(params: &EngineParams, lambda: f64, mu: f64) -> Complex64 {
    // No pole exists for real arguments: |denominator| >= 1.
    char_fn(params, lambda.into(), mu.into()).expect("no pole on the real axis")
}

/// Closed-form means, variances and covariance of work and heat.
pub fn moments(params: &EngineParams) -> Moments {
    let occ = params.bose();
    let s = params.sin2_theta();
    let bias = occ.n_a - occ.n_b;
    let spread = occ.n_a + occ.n_b + 2.0 * occ.n_a * occ.n_b;
    // The stroke conserves a^dag a + b^dag b, so W = -n (w_a - w_b), Q_H = n w_a.
    let mean_n = bias * s;
    let var_n = (spread + bias * bias * s) * s;
    Moments::from_index(mean_n, var_n, params.omega_a - params.omega_b, params.omega_a)
}

// Central-difference stencils (offset, weight) for derivative orders 0..=4,
// all second-order accurate with an even error expansion.
const STENCILS: [&[(i32, f64)]; 5] = [
    &[(0, 1.0)],
    &[(1, 0.5), (-1, -0.5)],
    &[(1, 1.0), (0, -2.0), (-1, 1.0)],
    &[(2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)],
    &[(2, 1.0), (1, -4.0), (0, 6.0), (-1, -4.0), (-2, 1.0)],
];

fn fd_step(total_order: usize) -> f64 {
    match total_order {
        0..=2 => FD_BASE_STEP,
        3 => 2e-2,
        _ => 4e-2,
    }
}

/// Mixed moment `<W^n Q_H^m> = (-i)^{n+m} d^{n+m} chi / d lambda^n d mu^m`
/// at the origin, by central differences with two Richardson levels.
///
/// `scale` holds the frequencies with which the characteristic function
/// oscillates along each argument; the step on each axis is divided by its own.
pub(crate) fn mixed_moment_fd<F>(chi: F, order_w: usize, order_qh: usize, scale: (f64, f64)) -> Result<f64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let total = order_w + order_qh;
    if total > 4 {
        return Err(Error::UnsupportedOrder { order_w, order_qh });
    }
    let derivative = |h: f64| -> Complex64 {
        let (hw, hq) = (h / scale.0, h / scale.1);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(i, wi) in STENCILS[order_w] {
            for &(j, wj) in STENCILS[order_qh] {
                acc += wi * wj * chi(i as f64 * hw, j as f64 * hq);
            }
        }
        acc / (hw.powi(order_w as i32) * hq.powi(order_qh as i32))
    };
    let h = fd_step(total);
    let d0 = derivative(h);
    let d1 = derivative(0.5 * h);
    let d2 = derivative(0.25 * h);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let extrapolated = (16.0 * r1 - r0) / 15.0;
    Ok((Complex64::new(0.0, -1.0).powi(total as i32) * extrapolated).re)
}

/// Mixed moment of work and heat from numerical derivatives of [`char_fn`].
pub fn moments_from_chi(params: &EngineParams, order_w: usize, order_qh: usize) -> Result<f64> {
    // chi depends on lambda only through (w_a - w_b) lambda; keep the step
    // finite when the two frequencies coincide. The law widens with the
    // occupations, so the step shrinks with them.
    let occ = params.bose();
    let width = 1.0 + occ.n_a + occ.n_b;
    let scale = (
        width * (params.omega_a - params.omega_b).abs().max(1e-3 * params.omega_a),
        width * params.omega_a,
    );
    mixed_moment_fd(|l, m| char_fn_real(params, l, m), order_w, order_qh, scale)
}

/// Mean entropy production per cycle,
/// `(beta_a w_a - beta_b w_b)(N_b - N_a) sin^2 theta >= 0`.
pub fn entropy_production(params: &EngineParams) -> f64 {
    let occ = params.bose();
    params.affinity() * (occ.n_b - occ.n_a) * params.sin2_theta()
}

/// Otto efficiency and refrigerator coefficient of performance, with their
/// Carnot counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub eta: f64,
    pub eta_carnot: f64,
    pub zeta: f64,
    pub zeta_carnot: f64,
}

pub fn efficiency_and_cop(params: &EngineParams) -> Result<Efficiency> {
    let (wa, wb) = (params.omega_a, params.omega_b);
    if wa == wb {
        return Err(Error::Undefined(
            "coefficient of performance needs omega_a != omega_b".into(),
        ));
    }
    let eta_carnot = 1.0 - params.beta_a / params.beta_b;
    let zeta_carnot = if params.beta_a == params.beta_b {
        f64::INFINITY
    } else {
        params.beta_a / (params.beta_b - params.beta_a)
    };
    Ok(Efficiency {
        eta: 1.0 - wb / wa,
        eta_carnot,
        zeta: wb / (wa - wb),
        zeta_carnot,
    })
}

/// Inverse SNR of work, entropy production and every bound that applies.
///
/// At the Carnot point (`N_a = N_b`) or without coupling the ratio diverges;
/// the report then carries `+inf` and `sigma = 0`.
pub fn tur_report(params: &EngineParams) -> TurReport {
    let occ = params.bose();
    let s = params.sin2_theta();
    let bias = occ.n_a - occ.n_b;
    if s == 0.0 || bias == 0.0 {
        return TurReport::degenerate();
    }
    let spread = occ.n_a + occ.n_b + 2.0 * occ.n_a * occ.n_b;
    let inv_snr = spread / (bias * bias * s) + 1.0;
    let sigma = entropy_production(params);
    let exact = h_fn(params.affinity()) / sigma + 1.0;
    let mut report = TurReport::new(inv_snr, sigma, exact);

    if classify_regime(params) == Regime::HeatEngine {
        if let Ok(eff) = efficiency_and_cop(params) {
            let m = moments(params);
            let extracted = -m.mean_w;
            let t_b = params.t_b();
            let tradeoff_rhs = m.var_w * (eff.eta_carnot / eff.eta - 1.0) / (2.0 * t_b);
            let eta_bound = eff.eta_carnot / (1.0 + 2.0 * t_b * extracted / m.var_w);
            report.efficiency = Some(eff.eta);
            report.efficiency_bound = Some(eta_bound);
            report.flags.work_tradeoff = Some(satisfies(tradeoff_rhs, extracted));
            report.flags.efficiency_bound = Some(satisfies(eta_bound, eff.eta));
        }
    }
    report
}
