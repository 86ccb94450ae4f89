//! Exact work and heat statistics of quantum Otto engines built from two
//! bosonic modes (or two qubits), together with the thermodynamic uncertainty
//! relations they satisfy or violate.
//!
//! The closed forms live in [`bosonic`], [`distribution`], [`qubit`],
//! [`strokes`] and [`thermalization`]; [`oracle`] recomputes the same
//! statistics by brute force on a truncated Fock space.

pub mod bosonic;
pub mod cli;
pub mod distribution;
pub mod engine;
pub mod error;
pub mod export;
pub mod moments;
pub mod oracle;
pub mod qubit;
pub mod special;
pub mod strokes;
pub mod thermalization;
pub mod tur;

pub use engine::{classify_regime, occupation, EngineParams, Occupations, Regime, Statistics};
pub use error::{Error, Result};
pub use moments::Moments;
pub use special::{f_bound, g_inverse, h_fn};
pub use tur::{TurFlags, TurReport};
