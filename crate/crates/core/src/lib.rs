//! Quasi-exact spectra for a moving atom carrying a magnetic quadrupole
//! moment in a radial electric field, confined by harmonic and linear
//! potentials.
//!
//! The radial problem reduces to a biconfluent Heun equation. Polynomial
//! solutions exist only at quantized oscillator frequencies `ω_{n,l}`; this
//! crate finds them, assembles energies and wavefunctions, and checks every
//! result against an independent finite-difference eigensolver.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The `*64`
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! command-line front end uses.

pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod quantize;
pub mod scalar;
pub mod series;
pub mod wavefunction;

pub use error::{Error, Result};
pub use model::{FieldConfig, PhysicalParams, QuadrupoleTensor};
pub use oracle::{OracleSpectrum, RadialOperatorSpec, VerificationReport, VerifyOptions};
pub use quantize::{ReducedProblem, Residuals, SpectralSolution};
pub use scalar::Real;
pub use series::{CoefficientSequence, HeunParams};
pub use wavefunction::RadialWavefunction;

pub type PhysicalParams64 = PhysicalParams<f64>;
pub type QuadrupoleTensor64 = QuadrupoleTensor<f64>;
pub type FieldConfig64 = FieldConfig<f64>;
pub type HeunParams64 = HeunParams<f64>;
pub type CoefficientSequence64 = CoefficientSequence<f64>;
pub type ReducedProblem64 = ReducedProblem<f64>;
pub type SpectralSolution64 = SpectralSolution<f64>;
pub type RadialWavefunction64 = RadialWavefunction<f64>;
pub type RadialOperatorSpec64 = RadialOperatorSpec<f64>;
pub type OracleSpectrum64 = OracleSpectrum<f64>;
pub type VerificationReport64 = VerificationReport<f64>;
