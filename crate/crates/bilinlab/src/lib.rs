//! bilinlab: a numerical laboratory for bilinear Fourier multiplier operators
//! on periodic 1-D grids.
//!
//! The crate provides exact discrete models of the objects showing up in the
//! multiplier-norm experiments: grids and DFT conventions ([`grid`]),
//! exponent-triple arithmetic ([`exponents`]), phase functions and symbols
//! ([`phase`], [`symbol`]), operator application paths ([`operator`]),
//! extremal witness constructions and norm lower-bound certificates
//! ([`witness`]), a numerical Rayleigh-ratio sharpener ([`search`]),
//! identity and dispersive-decay checks ([`identities`]), and the torus
//! transference machinery ([`torus`]).

pub mod error;
pub mod exponents;
pub mod grid;
pub mod identities;
pub mod operator;
pub mod phase;
pub mod search;
pub mod symbol;
pub mod torus;
pub mod witness;

pub use error::{Error, Result};
pub use exponents::{classify_local_l2, gamma, parse_exponent, ExponentTriple};
pub use grid::{dft, idft, lp_l2_norm, lp_norm, pairing, Grid, SampledFn, Spectrum, VectorSampledFn};
pub use operator::{schrodinger_q, BilinearOperator, LinearModulationOp};
pub use phase::{phase_library, Phase};
pub use symbol::{
    adjoint_symbol_1, adjoint_symbol_2, mollify_symbol, Symbol, SymbolTable,
    UnimodularPhaseSymbol,
};
