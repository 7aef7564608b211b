//! Sleep-stage classification pipeline over polysomnographic EDF recordings:
//! EDF/EDF+ parsing, STFT spectrogram images, a tiered epoch cache with
//! parallel ingestion, a compact mobile-style CNN trained from scratch, and
//! subject-wise cross-validated evaluation.
//!
//! Numeric code is generic over [`Scalar`] (f32 or f64); the concrete
//! aliases below pin the two precisions the pipeline actually runs at.

pub mod edf;
pub mod scalar;

pub use scalar::Scalar;

/// Training precision.
pub type TrainScalar = f32;
/// Precision used by signal-processing oracles and gradient checks.
pub type CheckScalar = f64;
