//! The scalar functions that appear in the uncertainty relations:
//! `h(x) = x coth(x/2)`, the inverse `g` of `x tanh x`, and the saturable
//! bound `f(s) = csch^2(g(s/2))`.

use crate::error::{domain, Result};

/// Below this magnitude `h` is evaluated from its Taylor series.
pub const H_SERIES_THRESHOLD: f64 = 1e-4;

/// Absolute tolerance used when inverting `x tanh x`.
pub const G_TOLERANCE: f64 = 1e-14;

/// `h(x) = x coth(x/2)`, continuously extended with `h(0) = 2`.
///
/// Even in `x`, with `2 <= h(x) <= 2 + x^2/6`. Near zero the direct form
/// loses digits to the `coth` pole, so the series
/// `2 + x^2/6 - x^4/360` is used for `|x| < 1e-4`; the first omitted term is
/// of order `x^6 / 15120`, far below double precision there.
pub fn h_fn(x: f64) -> f64 {
    if x.abs() < H_SERIES_THRESHOLD {
        let x2 = x * x;
        2.0 + x2 / 6.0 - x2 * x2 / 360.0
    } else {
        x / (0.5 * x).tanh()
    }
}

/// Inverse of `x -> x tanh(x)` on `x >= 0`.
///
/// Safeguarded Newton iteration inside the bracket `[0, max(1, y + 1)]`;
/// any Newton step that leaves the bracket is replaced by bisection.
pub fn g_inverse(y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return domain(format!("g is defined for finite y >= 0, got {y}"));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let residual = |x: f64| x * x.tanh() - y;
    let mut lo = 0.0_f64;
    let mut hi = f64::max(1.0, y + 1.0);
    // Start from the better of the two asymptotes: sqrt(y) near zero, y + ... for large y.
    let mut x = if y < 1.0 { y.sqrt() } else { y };
    x = x.clamp(lo, hi);

    for _ in 0..200 {
        let r = residual(x);
        if r == 0.0 {
            return Ok(x);
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let t = x.tanh();
        let slope = t + x * (1.0 - t * t);
        let newton = x - r / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step <= G_TOLERANCE * f64::max(1.0, x) || hi - lo <= G_TOLERANCE * f64::max(1.0, x) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Saturable uncertainty bound `f(sigma) = csch^2(g(sigma / 2))`.
///
/// Strictly decreasing; returns `+inf` at `sigma = 0`.
pub fn f_bound(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return domain(format!("entropy production must be >= 0, got {sigma}"));
    }
    if sigma == 0.0 {
        return Ok(f64::INFINITY);
    }
    if sigma.is_infinite() {
        return Ok(0.0);
    }
    let s = g_inverse(0.5 * sigma)?.sinh();
    Ok(1.0 / (s * s))
}
