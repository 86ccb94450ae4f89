use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use otto_tur::bosonic::{self, char_fn, char_fn_real, moments_from_chi};
use otto_tur::distribution::{bosonic_pmf, bosonic_pmf_from_occupations, squeeze_pmf};
use otto_tur::qubit::{qubit_moments, scan_point, QubitEngineParams, ThreePointPmf};
use otto_tur::strokes::{squeeze_moments, SqueezeParams};
use otto_tur::thermalization::{partial_moments, partial_pmf, partial_tur_report, steady_occupations, ThermalizationParams};
use otto_tur::{classify_regime, f_bound, g_inverse, h_fn, occupation, EngineParams, Regime, Statistics};
use proptest::prelude::*;

fn engine() -> impl Strategy<Value = EngineParams> {
    (0.2..3.0f64, 0.05..1.6f64, 0.1..5.0f64, 0.1..5.0f64, 0.05..FRAC_PI_2).prop_map(|(wa, ratio, ba, bb, theta)| {
        EngineParams::new(wa, wa * ratio, ba, bb, theta).expect("valid draw")
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * f64::max(1.0, b.abs())
}

proptest! {
    #[test]
    fn occupations_decrease_with_beta_omega(x in 0.01..20.0f64, dx in 1e-3..5.0f64) {
        for stats in [Statistics::Bose, Statistics::Fermi] {
            let lo = occupation(x, 1.0, stats).unwrap();
            let hi = occupation(x + dx, 1.0, stats).unwrap();
            prop_assert!(hi < lo);
        }
    }

    #[test]
    fn bias_sign_matches_affinity(p in engine()) {
        let occ = p.bose();
        let affinity = p.beta_a * p.omega_a - p.beta_b * p.omega_b;
        let bias = occ.n_a - occ.n_b;
        if affinity.abs() > 1e-12 {
            prop_assert_eq!(affinity.signum(), -bias.signum());
        }
    }

    #[test]
    fn h_is_even_and_bracketed(x in -5.0..5.0f64) {
        prop_assert!((h_fn(x) - h_fn(-x)).abs() < 1e-12);
        prop_assert!(h_fn(x) >= 2.0);
        prop_assert!(h_fn(x) <= 2.0 + x * x / 6.0 + 1e-15);
    }

    #[test]
    fn saturable_bound_inverts_and_decreases(sigma in 1e-3..20.0f64, step in 1e-3..1.0f64) {
        let g = g_inverse(0.5 * sigma).unwrap();
        prop_assert!((g * g.tanh() - 0.5 * sigma).abs() < 1e-12);
        prop_assert!(f_bound(sigma + step).unwrap() < f_bound(sigma).unwrap());
    }

    #[test]
    fn microreversibility(p in engine(), l in -3.0..3.0f64, m in -3.0..3.0f64) {
        let i = Complex64::i();
        let lhs = char_fn(&p, i * p.beta_b - l, i * (p.beta_b - p.beta_a) - m).unwrap();
        let rhs = char_fn_real(&p, l, m);
        prop_assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn char_fn_is_periodic(p in engine(), l in -3.0..3.0f64, m in -3.0..3.0f64) {
        prop_assume!((p.omega_a - p.omega_b).abs() > 1e-3);
        let base = char_fn_real(&p, l, m);
        let shifted_w = char_fn_real(&p, l + 2.0 * PI / (p.omega_a - p.omega_b).abs(), m);
        let shifted_q = char_fn_real(&p, l, m + 2.0 * PI / p.omega_a);
        prop_assert!((base - shifted_w).norm() < 1e-12);
        prop_assert!((base - shifted_q).norm() < 1e-12);
    }

    #[test]
    fn heat_moments_follow_work_moments(p in engine()) {
        prop_assume!((p.omega_a - p.omega_b).abs() > 0.05);
        let ratio = p.omega_a / (p.omega_b - p.omega_a);
        let w2 = moments_from_chi(&p, 2, 0).unwrap();
        let wq = moments_from_chi(&p, 1, 1).unwrap();
        let qq = moments_from_chi(&p, 0, 2).unwrap();
        prop_assert!(close(wq, ratio * w2, 1e-6), "{wq} vs {}", ratio * w2);
        prop_assert!(close(qq, ratio * ratio * w2, 1e-6));
    }

    #[test]
    fn covariance_sign_tracks_regime(p in engine()) {
        let cov = bosonic::moments(&p).cov_w_qh;
        if p.omega_a != p.omega_b && cov != 0.0 {
            prop_assert_eq!(cov.signum(), (p.omega_b - p.omega_a).signum());
        }
        // With bath a the hotter one the regimes split by frequency ratio.
        if p.beta_a < p.beta_b {
            match classify_regime(&p) {
                Regime::HeatEngine | Regime::Refrigerator => prop_assert!(cov < 0.0),
                Regime::ThermalAccelerator => prop_assert!(cov > 0.0),
                Regime::Degenerate => {}
            }
        }
    }

    #[test]
    fn pmf_series_matches_closed_moments(p in engine()) {
        let pmf = bosonic_pmf(&p);
        let (mut total, mut m1, mut m2) = (0.0, 0.0, 0.0);
        let cut = pmf.support_cut(1e-17);
        for n in -cut..=cut {
            let o = pmf.outcome(n);
            total += o.probability;
            m1 += o.probability * o.w;
            m2 += o.probability * o.w * o.w;
        }
        let m = bosonic::moments(&p);
        prop_assert!(close(total, 1.0, 1e-12));
        prop_assert!(close(m1, m.mean_w, 1e-10));
        prop_assert!(close(m2 - m1 * m1, m.var_w, 1e-9));
    }

    #[test]
    fn efficiency_never_fluctuates(p in engine()) {
        let pmf = bosonic_pmf(&p);
        let eta = 1.0 - p.omega_b / p.omega_a;
        for n in (-15..=15).filter(|&n| n != 0) {
            let o = pmf.outcome(n);
            prop_assert!((-o.w / o.qh - eta).abs() <= 4.0 * f64::EPSILON * eta.abs().max(1.0));
        }
    }

    #[test]
    fn qubit_three_point_law(p in engine()) {
        let q = QubitEngineParams(p);
        let law = ThreePointPmf::new(&q);
        let occ = q.occupations();
        let expected = (p.beta_b * p.omega_b - p.beta_a * p.omega_a).exp();
        prop_assert!(close(law.p_plus / law.p_minus, expected, 1e-12));
        let step_w = p.omega_a - p.omega_b;
        let mean_w = -step_w * (law.p_plus - law.p_minus);
        let second = step_w * step_w * (law.p_plus + law.p_minus);
        let m = qubit_moments(&q);
        prop_assert!((mean_w - m.mean_w).abs() < 1e-14);
        prop_assert!((second - mean_w * mean_w - m.var_w).abs() < 1e-14);
        prop_assert!(occ.n_a < 0.5 && occ.n_b < 0.5);
    }

    #[test]
    fn qubit_saturable_bound_holds(n_a in 1e-3..0.499f64, n_b in 1e-3..0.499f64, theta in 0.05..FRAC_PI_2) {
        prop_assert!(scan_point(n_a, n_b, theta.sin().powi(2)).saturable_holds);
    }

    #[test]
    fn squeeze_series_matches_closed_moments(n_a in 0.01..3.0f64, n_b in 0.01..3.0f64, r in 0.01..1.2f64) {
        let params = SqueezeParams::from_occupations(1.0, 0.6, n_a, n_b, r).unwrap();
        let pmf = squeeze_pmf(&params);
        let (m, _) = squeeze_moments(&params);
        let cut = pmf.support_cut(1e-17);
        let (mut m1, mut m2) = (0.0, 0.0);
        for n in -cut..=cut {
            let o = pmf.outcome(n);
            m1 += o.probability * o.w;
            m2 += o.probability * o.w * o.w;
        }
        prop_assert!(close(m1, m.mean_w, 1e-10));
        prop_assert!(close(m2 - m1 * m1, m.var_w, 1e-9));
    }

    #[test]
    fn partial_thermalization_is_a_substitution(p in engine(), gt in 0.01..20.0f64) {
        let p = p.with_theta(FRAC_PI_2).unwrap();
        let tp = ThermalizationParams::new(p, gt).unwrap();
        let (na, nb) = steady_occupations(&tp);
        let substituted = bosonic_pmf_from_occupations(na, nb, 1.0, p.omega_a, p.omega_b).unwrap();
        prop_assert_eq!(partial_pmf(&tp), substituted);
        let ideal = bosonic::moments(&p).mean_w;
        if ideal != 0.0 {
            prop_assert!(close(partial_moments(&tp).mean_w / ideal, (0.5 * gt).tanh(), 1e-12));
        }
        let r = partial_tur_report(&tp);
        if !r.report.is_degenerate() {
            prop_assert!(r.v_bound_holds && r.modified_tur_holds);
            prop_assert!(r.report.identity_residual() < 1e-9);
        }
    }
}
