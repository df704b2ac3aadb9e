//! Fourier spectra, approximation bounds and dynamical Lie algebras of
//! parameterized quantum circuits.
//!
//! Every numerical type is generic over the scalar (`f32` or `f64`, see
//! [`Real`]); the aliases below fix it to `f64`.

pub mod bounds;
pub mod dla;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod qsim;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod selftest;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type HermitianEigen = linalg::HermitianEigen<f64>;
pub type GapSet = spectrum::GapSet<f64>;
pub type NormalizedGapSet = spectrum::NormalizedGapSet<f64>;
pub type FrequencyEnvelope = spectrum::FrequencyEnvelope<f64>;
pub type SobolevParams = bounds::SobolevParams<f64>;
pub type FourierSeries = bounds::FourierSeries<f64>;
pub type LowerCurve = bounds::LowerCurve<f64>;
pub type JacksonBound = bounds::JacksonBound<f64>;
pub type LieBasis = dla::LieBasis<f64>;
pub type StateVector = qsim::StateVector<f64>;
pub type CircuitSpec = qsim::CircuitSpec<f64>;
pub type TrigPoly = qsim::TrigPoly<f64>;
