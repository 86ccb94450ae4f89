//! Brute-force two-point-measurement statistics on a truncated Fock space.
//!
//! Nothing here uses the closed forms of the other modules: the stroke is the
//! matrix exponential of its generator, the initial state is a product of
//! Gibbs states, and the joint law of the energy changes is accumulated by
//! direct enumeration. It exists to check everything else.

mod fock;
pub mod qubit;

pub use fock::{
    build_stroke, char_fn_oracle, char_fn_trace_route, joint_distribution, Block, BlockUnitary,
    FockOracleResult, Stroke, StrokeKind, TruncationSpec, LEAKAGE_TOLERANCE,
};
