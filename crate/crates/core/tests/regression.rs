//! Values pinned from an independent computation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use otto_tur::bosonic::{self, char_fn_real};
use otto_tur::distribution::bosonic_pmf;
use otto_tur::oracle::{char_fn_oracle, char_fn_trace_route, joint_distribution, StrokeKind, TruncationSpec};
use otto_tur::EngineParams;

fn p1() -> EngineParams {
    EngineParams::new(1.0, 0.6, 1.0, 2.0, FRAC_PI_2).unwrap()
}

const CHI_P1: Complex64 = Complex64::new(0.7979632460229588, 0.05291073563738679);

#[test]
fn reference_engine_moments() {
    let m = bosonic::moments(&p1());
    assert!((m.mean_w - -0.06038557847039732).abs() < 1e-15);
    assert!((bosonic::entropy_production(&p1()) - 0.03019278923519866).abs() < 1e-15);
    assert!((m.inv_snr_w() - 67.461_637_936_763_99).abs() < 1e-9);
}

#[test]
fn reference_char_fn_closed_form() {
    assert!((char_fn_real(&p1(), 0.3, 0.7) - CHI_P1).norm() < 1e-14);
}

#[test]
fn reference_char_fn_from_oracle() {
    let p = p1();
    let occ = p.bose();
    let kind = StrokeKind::beam_splitter(p.theta);
    let trunc = TruncationSpec::for_stroke(kind, 60, occ.n_a, occ.n_b);
    let (l, m) = (Complex64::new(0.3, 0.0), Complex64::new(0.7, 0.0));
    let enumerated = char_fn_oracle(kind, occ.n_a, occ.n_b, p.omega_a, p.omega_b, l, m, &trunc).unwrap();
    let traced = char_fn_trace_route(p.theta, occ.n_a, occ.n_b, p.omega_a, p.omega_b, 0.3, 0.7, &trunc).unwrap();
    assert!((enumerated - CHI_P1).norm() < 1e-8);
    assert!((traced - enumerated).norm() < 1e-10);
}

#[test]
fn swap_pmf_at_large_occupations() {
    let wa = 1.0;
    let wb = 0.6;
    let beta = |n: f64, w: f64| (1.0 / n).ln_1p() / w;
    let p = EngineParams::new(wa, wb, beta(8.0, wa), beta(2.0, wb), FRAC_PI_2).unwrap();
    let pmf = bosonic_pmf(&p);
    assert!((pmf.prob(0) - 1.0 / 11.0).abs() < 1e-12);
    assert!((pmf.prob(1) - 8.0 / 99.0).abs() < 1e-12);
    assert!((pmf.prob(-1) - 2.0 / 33.0).abs() < 1e-12);
}

#[test]
fn quarter_coupling_matches_oracle() {
    let (n_a, n_b) = (1.2, 0.4);
    let kind = StrokeKind::beam_splitter(FRAC_PI_4);
    let trunc = TruncationSpec::for_stroke(kind, 60, n_a, n_b);
    let oracle = joint_distribution(kind, n_a, n_b, 1.0, 0.6, &trunc).unwrap();
    let beta = |n: f64, w: f64| (1.0 / n).ln_1p() / w;
    let p = EngineParams::new(1.0, 0.6, beta(n_a, 1.0), beta(n_b, 0.6), FRAC_PI_4).unwrap();
    assert!(oracle.total_variation(&bosonic_pmf(&p)) < 1e-8);
}
