//! Brute-force Fock-space computation of the characteristic function,
//! by direct enumeration and by the trace of two unitaries.

use num_complex::Complex64;
use otto_tur::bosonic::char_fn;
use otto_tur::oracle::{char_fn_oracle, char_fn_trace_route, StrokeKind, TruncationSpec};
use otto_tur::{EngineParams, Result};

fn main() -> Result<()> {
    let params = EngineParams::new(1.0, 0.6, 1.0, 2.0, std::f64::consts::FRAC_PI_4)?;
    let occ = params.bose();
    let kind = StrokeKind::beam_splitter(params.theta);
    let trunc = TruncationSpec::for_stroke(kind, 60, occ.n_a, occ.n_b);
    let (lambda, mu) = (0.3, 0.7);
    let l = Complex64::new(lambda, 0.0);
    let m = Complex64::new(mu, 0.0);
    let closed = char_fn(&params, l, m)?;
    let enumerated = char_fn_oracle(kind, occ.n_a, occ.n_b, params.omega_a, params.omega_b, l, m, &trunc)?;
    let traced = char_fn_trace_route(params.theta, occ.n_a, occ.n_b, params.omega_a, params.omega_b, lambda, mu, &trunc)?;
    println!("closed form {closed:.12}");
    println!("enumerated  {enumerated:.12}");
    println!("trace       {traced:.12}");
    Ok(())
}
