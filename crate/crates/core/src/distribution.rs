//! Exact joint law of stochastic work and heat.
//!
//! Every stroke considered here conserves a weighted number operator, so the
//! pair `(W, Q_H)` lives on a single line `W = -n step_w`, `Q_H = n step_qh`
//! indexed by `n in Z`, and the law of `n` is a two-sided geometric
//! ("asymmetric Bose-Einstein") distribution
//! `p(n) = alpha x^n` for `n >= 0`, `p(n) = alpha y^{|n|}` for `n < 0`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::engine::EngineParams;
use crate::error::{domain, Result};
use crate::export::{fmt_f64, Table};
use crate::moments::Moments;
use crate::special::h_fn;
use crate::strokes::SqueezeParams;
use crate::tur::TurReport;

/// Series over the support stop once the remaining tail is below this.
pub const SUPPORT_TAIL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkHeatPmf {
    /// Work quantum; outcome `n` carries `W = -n step_w`.
    pub step_w: f64,
    /// Heat quantum; outcome `n` carries `Q_H = n step_qh`.
    pub step_qh: f64,
    /// Geometric ratio on `n >= 0`.
    pub ratio_pos: f64,
    /// Geometric ratio on `n < 0`.
    pub ratio_neg: f64,
    /// `alpha = (1 - x)(1 - y) / (1 - x y)`.
    pub norm: f64,
}

/// One point of the joint support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointOutcome {
    pub n: i64,
    pub w: f64,
    pub qh: f64,
    pub qc: f64,
    pub probability: f64,
}

impl WorkHeatPmf {
    pub fn new(step_w: f64, step_qh: f64, ratio_pos: f64, ratio_neg: f64) -> Result<Self> {
        for (name, r) in [("ratio_pos", ratio_pos), ("ratio_neg", ratio_neg)] {
            if !(0.0..1.0).contains(&r) {
                return domain(format!("{name} must lie in [0, 1), got {r}"));
            }
        }
        let norm = (1.0 - ratio_pos) * (1.0 - ratio_neg) / (1.0 - ratio_pos * ratio_neg);
        Ok(Self {
            step_w,
            step_qh,
            ratio_pos,
            ratio_neg,
            norm,
        })
    }

    pub fn point_mass(step_w: f64, step_qh: f64) -> Self {
        Self {
            step_w,
            step_qh,
            ratio_pos: 0.0,
            ratio_neg: 0.0,
            norm: 1.0,
        }
    }

    pub fn prob(&self, n: i64) -> f64 {
        let (ratio, k) = if n >= 0 {
            (self.ratio_pos, n)
        } else {
            (self.ratio_neg, -n)
        };
        if k == 0 {
            return self.norm;
        }
        if k <= i32::MAX as i64 {
            self.norm * ratio.powi(k as i32)
        } else {
            self.norm * ratio.powf(k as f64)
        }
    }

    /// Total probability of `n >= 0`.
    pub fn mass_nonneg(&self) -> f64 {
        self.norm / (1.0 - self.ratio_pos)
    }

    pub fn mean_n(&self) -> f64 {
        let (x, y) = (self.ratio_pos, self.ratio_neg);
        (x - y) / ((1.0 - x) * (1.0 - y))
    }

    pub fn var_n(&self) -> f64 {
        let (x, y) = (self.ratio_pos, self.ratio_neg);
        x / ((1.0 - x) * (1.0 - x)) + y / ((1.0 - y) * (1.0 - y))
    }

    pub fn moments(&self) -> Moments {
        Moments::from_index(self.mean_n(), self.var_n(), self.step_w, self.step_qh)
    }

    /// Smallest `n_cut` with `alpha r^{n_cut} / (1 - r) < tail`, `r = max(x, y)`.
    pub fn support_cut(&self, tail: f64) -> i64 {
        let r = self.ratio_pos.max(self.ratio_neg);
        if r == 0.0 {
            return 0;
        }
        let lead = self.norm / (1.0 - r);
        if lead < tail {
            return 0;
        }
        ((tail / lead).ln() / r.ln()).ceil().max(0.0) as i64
    }

    pub fn outcome(&self, n: i64) -> JointOutcome {
        let w = -(n as f64) * self.step_w;
        let qh = n as f64 * self.step_qh;
        JointOutcome {
            n,
            w,
            qh,
            qc: -w - qh,
            probability: self.prob(n),
        }
    }

    /// Outcomes on `[-n_cut, n_cut]` with `n_cut = support_cut(SUPPORT_TAIL)`.
    pub fn outcomes(&self) -> impl Iterator<Item = JointOutcome> + '_ {
        let cut = self.support_cut(SUPPORT_TAIL);
        (-cut..=cut).map(move |n| self.outcome(n))
    }

    /// The stochastic efficiency `-W / Q_H`, identical for every `n != 0`.
    pub fn stochastic_efficiency(&self) -> f64 {
        self.step_w / self.step_qh
    }

    /// Uncertainty relation of the law seen as a generic two-sided geometric
    /// distribution with heat step `step_qh` and work step `-step_w`.
    pub fn generic_tur(&self, beta_a: f64, beta_b: f64) -> Result<TurReport> {
        generic_two_sided_tur(
            self.ratio_pos,
            self.ratio_neg,
            self.step_qh,
            -self.step_w,
            beta_a,
            beta_b,
        )
    }

    pub fn to_table(&self, n_range: Option<(i64, i64)>) -> Table {
        let (lo, hi) = n_range.unwrap_or_else(|| {
            let c = self.support_cut(SUPPORT_TAIL);
            (-c, c)
        });
        let mut table = Table::new(["n", "w", "q_h", "probability"]);
        for n in lo..=hi {
            let o = self.outcome(n);
            table.push(vec![n.to_string(), fmt_f64(o.w), fmt_f64(o.qh), fmt_f64(o.probability)]);
        }
        table
    }

    pub fn write_csv<W: Write>(&self, out: W, n_range: Option<(i64, i64)>) -> Result<()> {
        self.to_table(n_range).write_to(out)
    }
}

/// Law of the heat index for the beam-splitter engine at given occupations.
///
/// Uses the rationalised form `x = 2 N_a (1 + N_b) s / (1 + c s + D)`,
/// `y = 2 N_b (1 + N_a) s / (1 + c s + D)`, `alpha = 1 / D` with
/// `c = N_a + N_b + 2 N_a N_b`, `D = sqrt(1 + 2 c s + (N_a - N_b)^2 s^2)` and
/// `s = sin^2 theta`, which stays finite as either occupation goes to zero.
pub fn bosonic_pmf_from_occupations(
    n_a: f64,
    n_b: f64,
    sin2_theta: f64,
    omega_a: f64,
    omega_b: f64,
) -> Result<WorkHeatPmf> {
    if !(n_a >= 0.0 && n_b >= 0.0) {
        return domain(format!("occupations must be >= 0 (n_a = {n_a}, n_b = {n_b})"));
    }
    if !(0.0..=1.0).contains(&sin2_theta) {
        return domain(format!("sin^2 theta must lie in [0, 1], got {sin2_theta}"));
    }
    let step_w = omega_a - omega_b;
    if sin2_theta == 0.0 {
        return Ok(WorkHeatPmf::point_mass(step_w, omega_a));
    }
    let s = sin2_theta;
    let spread = n_a + n_b + 2.0 * n_a * n_b;
    let bias = n_a - n_b;
    let d = (1.0 + 2.0 * spread * s + bias * bias * s * s).sqrt();
    let den = 1.0 + spread * s + d;
    let x = 2.0 * n_a * (1.0 + n_b) * s / den;
    let y = 2.0 * n_b * (1.0 + n_a) * s / den;
    let mut pmf = WorkHeatPmf::new(step_w, omega_a, x, y)?;
    pmf.norm = 1.0 / d;
    Ok(pmf)
}

pub fn bosonic_pmf(params: &EngineParams) -> WorkHeatPmf {
    let occ = params.bose();
    bosonic_pmf_from_occupations(occ.n_a, occ.n_b, params.sin2_theta(), params.omega_a, params.omega_b)
        .expect("validated parameters give a valid law")
}

/// Law of the heat index for the two-mode squeezing stroke.
///
/// Work comes in quanta of `w_a + w_b` with `W = -n (w_a + w_b)`; `n < 0`
/// outcomes dominate, so work is on average done on the modes.
pub fn squeeze_pmf_from_occupations(
    n_a: f64,
    n_b: f64,
    r: f64,
    omega_a: f64,
    omega_b: f64,
) -> Result<WorkHeatPmf> {
    if !(n_a >= 0.0 && n_b >= 0.0) {
        return domain(format!("occupations must be >= 0 (n_a = {n_a}, n_b = {n_b})"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return domain(format!("squeeze parameter must be finite and >= 0, got {r}"));
    }
    let step_w = omega_a + omega_b;
    if r == 0.0 {
        return Ok(WorkHeatPmf::point_mass(step_w, omega_a));
    }
    let s = r.sinh().powi(2);
    let spread = n_a + n_b + 2.0 * n_a * n_b + 1.0;
    let total = n_a + n_b + 1.0;
    let d = (1.0 + 2.0 * spread * s + total * total * s * s).sqrt();
    let den = 1.0 + spread * s + d;
    let x = 2.0 * n_a * n_b * s / den;
    let y = 2.0 * (n_a + 1.0) * (n_b + 1.0) * s / den;
    let mut pmf = WorkHeatPmf::new(step_w, omega_a, x, y)?;
    pmf.norm = 1.0 / d;
    Ok(pmf)
}

pub fn squeeze_pmf(params: &SqueezeParams) -> WorkHeatPmf {
    let (n_a, n_b) = params.occupations();
    squeeze_pmf_from_occupations(n_a, n_b, params.r, params.omega_a, params.omega_b)
        .expect("validated parameters give a valid law")
}

/// Outcome of [`detailed_ft_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtCheck {
    /// Largest relative residual of `p(n)/p(-n)` against the prediction.
    pub max_residual: f64,
    /// Largest `n` actually compared (smaller than requested on underflow).
    pub effective_n_max: u32,
}

/// Compare `p(n)/p(-n)` with `exp((beta_b - beta_a) Q_H + beta_b W)` for
/// `n = 1..=n_max`, and for beam-splitter laws also with
/// `[N_a (N_b + 1) / (N_b (N_a + 1))]^n`.
pub fn detailed_ft_check(pmf: &WorkHeatPmf, params: &EngineParams, n_max: u32) -> FtCheck {
    let occ = params.bose();
    let bracket = occ.n_a * (occ.n_b + 1.0) / (occ.n_b * (occ.n_a + 1.0));
    let beam_splitter = ((pmf.step_w - (params.omega_a - params.omega_b)).abs()
        <= 1e-12 * params.omega_a)
        && (pmf.step_qh - params.omega_a).abs() <= 1e-12 * params.omega_a;
    let mut max_residual: f64 = 0.0;
    let mut effective = 0;
    for n in 1..=n_max {
        let plus = pmf.prob(n as i64);
        let minus = pmf.prob(-(n as i64));
        if minus < f64::MIN_POSITIVE || plus < f64::MIN_POSITIVE {
            break;
        }
        let ratio = plus / minus;
        let o = pmf.outcome(n as i64);
        let predicted = ((params.beta_b - params.beta_a) * o.qh + params.beta_b * o.w).exp();
        max_residual = max_residual.max((ratio - predicted).abs() / predicted);
        if beam_splitter && bracket.is_finite() {
            let by_bracket = bracket.powi(n as i32);
            max_residual = max_residual.max((ratio - by_bracket).abs() / by_bracket);
        }
        effective = n;
    }
    FtCheck {
        max_residual,
        effective_n_max: effective,
    }
}

/// Exact inverse-CDF sampler for a [`WorkHeatPmf`].
///
/// The side `n >= 0` is chosen with probability `alpha / (1 - x)`, then the
/// distance from the origin is geometric. Deterministic for a fixed seed.
pub struct Sampler {
    pmf: WorkHeatPmf,
    rng: ChaCha8Rng,
    p_nonneg: f64,
    pos: Geometric,
    neg: Geometric,
    remaining: u64,
}

impl Iterator for Sampler {
    type Item = JointOutcome;

    fn next(&mut self) -> Option<JointOutcome> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let u: f64 = self.rng.random();
        let n = if u < self.p_nonneg {
            self.pos.sample(&mut self.rng) as i64
        } else {
            -1 - self.neg.sample(&mut self.rng) as i64
        };
        Some(self.pmf.outcome(n))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

/// Draw `count` outcomes with a ChaCha8 stream seeded by `seed`.
pub fn sample(pmf: &WorkHeatPmf, count: u64, seed: u64) -> Sampler {
    Sampler {
        pmf: *pmf,
        rng: ChaCha8Rng::seed_from_u64(seed),
        p_nonneg: pmf.mass_nonneg(),
        pos: Geometric::new(1.0 - pmf.ratio_pos).expect("ratio in [0, 1)"),
        neg: Geometric::new(1.0 - pmf.ratio_neg).expect("ratio in [0, 1)"),
        remaining: count,
    }
}

pub fn write_samples_csv<W: Write>(out: W, samples: impl Iterator<Item = JointOutcome>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(["draw_index", "n", "w", "q_h"])?;
    for (i, o) in samples.enumerate() {
        w.write_record([i.to_string(), o.n.to_string(), fmt_f64(o.w), fmt_f64(o.qh)])?;
    }
    w.flush()?;
    Ok(())
}

/// Exponent `(v + k) beta_b - v beta_a` fixed by the detailed fluctuation
/// theorem for a law with heat step `v` and work step `k`.
pub fn ft_exponent(v: f64, k: f64, beta_a: f64, beta_b: f64) -> f64 {
    (v + k) * beta_b - v * beta_a
}

/// `|ln(x / y) - exponent|`: zero when the law obeys the detailed theorem.
pub fn ft_constraint_residual(x: f64, y: f64, v: f64, k: f64, beta_a: f64, beta_b: f64) -> f64 {
    ((x / y).ln() - ft_exponent(v, k, beta_a, beta_b)).abs()
}

/// Uncertainty relation of a generic two-sided geometric law with
/// `Q_H = n v`, `W = n k`.
///
/// `inv_snr_w = (x + y)(1 - x)(1 - y)/(x - y)^2 + 1`; `exact_rhs` is
/// `h(A)/sigma + 1` with `A = (v + k) beta_b - v beta_a`, which equals the
/// ratio whenever `x / y = e^A`.
pub fn generic_two_sided_tur(x: f64, y: f64, v: f64, k: f64, beta_a: f64, beta_b: f64) -> Result<TurReport> {
    if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
        return domain(format!("ratios must lie in [0, 1) (x = {x}, y = {y})"));
    }
    if x == y {
        return Ok(TurReport::degenerate());
    }
    let mean_n = (x - y) / ((1.0 - x) * (1.0 - y));
    let inv_snr = (x + y) * (1.0 - x) * (1.0 - y) / ((x - y) * (x - y)) + 1.0;
    let a = ft_exponent(v, k, beta_a, beta_b);
    let sigma = a * mean_n;
    Ok(TurReport::new(inv_snr, sigma, h_fn(a) / sigma + 1.0))
}

/// Mean work `k (x - y) / ((1 - x)(1 - y))` of the generic law.
pub fn generic_mean_work(x: f64, y: f64, k: f64) -> f64 {
    k * (x - y) / ((1.0 - x) * (1.0 - y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn swap_8_2() -> WorkHeatPmf {
        bosonic_pmf_from_occupations(8.0, 2.0, 1.0, 1.0, 0.6).unwrap()
    }

    #[test]
    fn swap_law_values() {
        let pmf = swap_8_2();
        assert!((pmf.prob(0) - 1.0 / 11.0).abs() < 1e-15);
        assert!((pmf.prob(1) - 8.0 / 99.0).abs() < 1e-15);
        assert!((pmf.prob(-1) - 2.0 / 33.0).abs() < 1e-15);
        assert!((pmf.ratio_pos - 8.0 / 9.0).abs() < 1e-15);
        assert!((pmf.ratio_neg - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn norm_forms_agree() {
        for &(na, nb, s) in &[(8.0, 2.0, 0.5), (0.3, 1.7, 0.2), (1e-9, 3.0, 1.0), (0.0, 0.4, 0.7)] {
            let pmf = bosonic_pmf_from_occupations(na, nb, s, 1.0, 0.5).unwrap();
            let (x, y) = (pmf.ratio_pos, pmf.ratio_neg);
            let alt = (1.0 - x) * (1.0 - y) / (1.0 - x * y);
            assert!((pmf.norm - alt).abs() < 1e-12, "{na} {nb} {s}");
            assert!((pmf.norm * (1.0 / (1.0 - x) + y / (1.0 - y)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_temperature_limit_is_continuous() {
        let at_zero = bosonic_pmf_from_occupations(1.2, 0.0, 0.6, 1.0, 0.5).unwrap();
        let near = bosonic_pmf_from_occupations(1.2, 1e-12, 0.6, 1.0, 0.5).unwrap();
        assert_eq!(at_zero.ratio_neg, 0.0);
        assert!((at_zero.ratio_pos - near.ratio_pos).abs() < 1e-10);
        let sq = squeeze_pmf_from_occupations(0.0, 0.4, 0.3, 1.0, 0.5).unwrap();
        assert_eq!(sq.ratio_pos, 0.0);
    }

    #[test]
    fn identity_stroke_is_point_mass() {
        let pmf = bosonic_pmf_from_occupations(8.0, 2.0, 0.0, 1.0, 0.6).unwrap();
        assert_eq!(pmf.prob(0), 1.0);
        assert_eq!(pmf.prob(3), 0.0);
        let sq = squeeze_pmf_from_occupations(0.5, 0.2, 0.0, 1.0, 0.6).unwrap();
        assert_eq!(sq.prob(0), 1.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(WorkHeatPmf::new(1.0, 1.0, 1.0, 0.2).is_err());
        assert!(WorkHeatPmf::new(1.0, 1.0, 0.2, -0.1).is_err());
        assert!(bosonic_pmf_from_occupations(-1.0, 1.0, 0.5, 1.0, 0.5).is_err());
        assert!(squeeze_pmf_from_occupations(0.5, 0.2, -0.1, 1.0, 0.5).is_err());
    }

    fn series(pmf: &WorkHeatPmf) -> (f64, f64, f64) {
        let cut = pmf.support_cut(1e-18) + 10;
        let mut total = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for n in -cut..=cut {
            let p = pmf.prob(n);
            total += p;
            m1 += n as f64 * p;
            m2 += (n * n) as f64 * p;
        }
        (total, m1, m2 - m1 * m1)
    }

    #[test]
    fn series_moments_match_closed_forms() {
        let cases = [
            EngineParams::new(1.0, 0.6, 1.0, 2.0, FRAC_PI_2).unwrap(),
            EngineParams::from_occupations(1.0, 0.6, 8.0, 2.0, FRAC_PI_4).unwrap(),
            EngineParams::new(1.0, 1.4, 0.5, 2.0, 0.8).unwrap(),
        ];
        for params in cases {
            let pmf = bosonic_pmf(&params);
            let (total, mean, var) = series(&pmf);
            assert!((total - 1.0).abs() < 1e-12);
            let m = crate::bosonic::moments(&params);
            let from_series = Moments::from_index(mean, var, pmf.step_w, pmf.step_qh);
            assert!((from_series.mean_w - m.mean_w).abs() < 1e-10 * m.mean_w.abs().max(1.0));
            assert!((from_series.var_w - m.var_w).abs() < 1e-10 * m.var_w.max(1.0));
            assert!((pmf.moments().var_w - m.var_w).abs() < 1e-10 * m.var_w.max(1.0));
        }
    }

    #[test]
    fn squeeze_series_mean() {
        let pmf = squeeze_pmf_from_occupations(0.5, 0.2, 0.5, 1.0, 0.6).unwrap();
        let (total, mean, _) = series(&pmf);
        assert!((total - 1.0).abs() < 1e-12);
        let mean_w = -mean * pmf.step_w;
        assert!((mean_w - 0.738_589_663_348_731_6).abs() < 1e-12);
    }

    #[test]
    fn no_efficiency_fluctuations() {
        let params = EngineParams::new(1.0, 0.6, 1.0, 2.0, 1.0).unwrap();
        let pmf = bosonic_pmf(&params);
        for o in pmf.outcomes().filter(|o| o.n != 0) {
            // Identical up to the rounding of one product and one quotient.
            let eff = -o.w / o.qh;
            assert!((eff - pmf.stochastic_efficiency()).abs() <= 4.0 * f64::EPSILON * eff);
            assert!((eff - 0.4).abs() < 1e-15);
            assert!((o.w + o.qh + o.qc).abs() < 1e-12);
        }
    }

    #[test]
    fn detailed_ft_examples() {
        let params = EngineParams::from_occupations(1.0, 0.6, 8.0, 2.0, FRAC_PI_2).unwrap();
        let pmf = bosonic_pmf(&params);
        assert!((pmf.prob(1) / pmf.prob(-1) - 4.0 / 3.0).abs() < 1e-12);
        let r1 = pmf.prob(1) / pmf.prob(-1);
        assert!((pmf.prob(2) / pmf.prob(-2) - r1 * r1).abs() < 1e-12);
        let check = detailed_ft_check(&pmf, &params, 40);
        assert!(check.max_residual < 1e-10, "{check:?}");
        assert_eq!(check.effective_n_max, 40);

        let eq = EngineParams::from_occupations(1.0, 0.6, 1.5, 1.5, 1.0).unwrap();
        let pmf = bosonic_pmf(&eq);
        for n in 1..10 {
            assert!((pmf.prob(n) / pmf.prob(-n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn detailed_ft_truncates_on_underflow() {
        let params = EngineParams::new(1.0, 0.6, 3.0, 40.0, 1.0).unwrap();
        let pmf = bosonic_pmf(&params);
        let check = detailed_ft_check(&pmf, &params, 10_000);
        assert!(check.effective_n_max < 10_000);
        assert!(check.max_residual < 1e-10);
    }

    #[test]
    fn sampler_is_deterministic() {
        let pmf = swap_8_2();
        let a: Vec<_> = sample(&pmf, 1000, 7).map(|o| o.n).collect();
        let b: Vec<_> = sample(&pmf, 1000, 7).map(|o| o.n).collect();
        let c: Vec<_> = sample(&pmf, 1000, 8).map(|o| o.n).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(sample(&pmf, 0, 1).count(), 0);
    }

    #[test]
    fn sampler_symmetric_law_has_zero_mean() {
        let pmf = WorkHeatPmf::new(1.0, 1.0, 0.6, 0.6).unwrap();
        let count = 1_000_000;
        let mut sum = 0.0;
        for o in sample(&pmf, count, 3) {
            sum += o.n as f64;
        }
        let mean = sum / count as f64;
        let se = (pmf.var_n() / count as f64).sqrt();
        assert!(mean.abs() < 5.0 * se, "mean={mean} se={se}");
    }

    #[test]
    fn generic_tur_oracle_by_summation() {
        // x = 0.4, y = 0.2, v = 1, k = -0.4, beta_b chosen so x / y = e^A.
        let (x, y, v, k, beta_a) = (0.4, 0.2, 1.0, -0.4, 1.0);
        let beta_b = (2.0_f64.ln() + v * beta_a) / (v + k);
        assert!(ft_constraint_residual(x, y, v, k, beta_a, beta_b) < 1e-15);
        let report = generic_two_sided_tur(x, y, v, k, beta_a, beta_b).unwrap();
        // Brute force: sum the series directly.
        let alpha = (1.0 - x) * (1.0 - y) / (1.0 - x * y);
        let (mut m1, mut m2, mut s) = (0.0, 0.0, 0.0);
        for n in -200i32..=200 {
            let p = if n >= 0 { alpha * x.powi(n) } else { alpha * y.powi(-n) };
            let w = n as f64 * k;
            let q = n as f64 * v;
            m1 += w * p;
            m2 += w * w * p;
            s += ((beta_b - beta_a) * q + beta_b * w) * p;
        }
        let inv = (m2 - m1 * m1) / (m1 * m1);
        assert!((report.inv_snr_w - inv).abs() / inv < 1e-12);
        assert!((report.sigma - s).abs() / s < 1e-12);
        assert!((generic_mean_work(x, y, k) - m1).abs() < 1e-15);
        assert!(report.identity_residual() < 1e-12);
        assert!(report.flags.shifted_tur);
    }

    #[test]
    fn generic_tur_reproduces_engine_report() {
        for &(wb, theta) in &[(0.6, FRAC_PI_2), (0.3, 0.7), (1.4, 1.2)] {
            let params = EngineParams::new(1.0, wb, 1.0, 2.0, theta).unwrap();
            let direct = crate::bosonic::tur_report(&params);
            let generic = bosonic_pmf(&params).generic_tur(params.beta_a, params.beta_b).unwrap();
            assert!((direct.inv_snr_w - generic.inv_snr_w).abs() / direct.inv_snr_w < 1e-10);
            assert!((direct.sigma - generic.sigma).abs() / direct.sigma < 1e-10);
            assert!((direct.exact_rhs - generic.exact_rhs).abs() / direct.exact_rhs < 1e-10);
        }
        assert!(generic_two_sided_tur(0.3, 0.3, 1.0, 1.0, 1.0, 2.0).unwrap().is_degenerate());
        assert!(generic_two_sided_tur(1.0, 0.3, 1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn pmf_csv_layout() {
        let csv = swap_8_2().to_table(Some((-1, 1))).to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,w,q_h,probability"));
        let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "0");
        assert_eq!(row[3], "9.0909090909090912e-2");
    }
}
