//! Algebra of Hagedorn wavepackets attached to different Gaussian centers.
//!
//! The crate provides:
//!
//! * parameter sets for multidimensional Gaussian wavepackets with their
//!   symplecticity invariants ([`params`]),
//! * ladder-operator transformation data relating two Gaussians
//!   ([`bogoliubov`]),
//! * exact shell-recursive overlap matrices between the two associated
//!   bases ([`overlap`]),
//! * basis evaluation on position grids and projections between bases
//!   ([`wavepacket`]),
//! * harmonic propagation, autocorrelation functions, and spectra
//!   ([`dynamics`]),
//! * independent numerical ground truth: grid quadrature and split-operator
//!   Fourier propagation ([`oracles`]).

pub mod bogoliubov;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod index;
pub mod la;
pub mod oracles;
pub mod overlap;
pub mod params;
pub mod wavepacket;

pub use error::{Error, Result};
pub use index::{
    binomial, enumerate_rectangle, enumerate_simplex, simplex_len, BasisCut, IndexSet, MultiIndex,
};
pub use la::{CMatrix, CVector, RMatrix, RVector};
pub use params::{
    factorize_width_matrix, standard_symplectic_matrix, symplectic_form, GaussianParams,
    PhaseSpacePoint, StackedZ, ValidationReport, DEFAULT_SYMPL_TOL,
};
