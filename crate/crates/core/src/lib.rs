//! Gaussian-state model of cascaded four-wave-mixing amplifiers, their
//! entanglement criteria, and the dressed atomic spectra that set the
//! coherent channels.
//!
//! Every model is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the double-precision variant.

// `!(x > 0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod criteria;
pub mod delc;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod scalar;
pub mod sweep;
pub mod validation;

pub use criteria::{Criterion, DuanResult, PptResult, QuadPair, Region, Sufficiency, TriPair};
pub use delc::{GainSet, PumpingParams, System};
pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, ModeBipartition, QuadratureTransform, SymplecticSpectrum};
pub use scalar::Real;
pub use sweep::{Axis, GainGrid, SweepRow};

pub type CovarianceMatrix64 = CovarianceMatrix<f64>;
pub type QuadratureTransform64 = QuadratureTransform<f64>;
pub type GainSet64 = GainSet<f64>;
pub type Axis64 = Axis<f64>;
pub type AtomicParams64 = atomic::AtomicParams<f64>;
pub type TruncatedState64 = fock::TruncatedState<f64>;
