//! Consistency learning for audio classification on the CPU.
//!
//! The library covers the full pipeline at desk scale:
//!
//! - [`signal`] — WAV ingestion and the waveform → log-mel-spectrogram
//!   feature pipeline.
//! - [`augment`] — pitch shifting, synthetic-reverb convolution, and
//!   time-frequency masking, plus the random policy that draws two
//!   transformed variants per instance.
//! - [`tensor`] — a minimal reverse-mode automatic differentiation engine.
//! - [`nn`] — the VGG-style convolutional classifier built on the tensor
//!   engine, with checkpointing.
//! - [`optim`] — AdamW with decoupled weight decay.
//! - [`losses`] — cross-entropy, joint cross-entropy over triplets, the
//!   three-way Jensen-Shannon divergence, and the linear consistency-weight
//!   ramp.
//! - [`trainer`] — triplet batch assembly, the four training regimes
//!   (none / standard / bda / cl), cross-validation, per-epoch divergence
//!   tracking, and a synthetic dataset for fast experiments.
//! - [`run`] — the experiment runner behind the command-line interface.
//!
//! Core numerics are generic over the scalar type via [`Scalar`]; the
//! training harness uses `f64` throughout (see the type aliases below).

use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

pub mod augment;
pub mod losses;
pub mod oracle;
pub mod nn;
pub mod optim;
pub mod run;
pub mod signal;
pub mod tensor;
pub mod trainer;

/// Scalar type the numeric core is generic over.
///
/// Implemented for `f32` and `f64`. The `rustfft::FftNum` bound lets the
/// FFT-backed paths (STFT, fast convolution) share the same parameter.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Display + rustfft::FftNum
{
    /// Shorthand for lossless conversion from `f64` constants.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Scalar type used by the training harness.
pub type Real = f64;

/// Double-precision tensor, the type trained models run on.
pub type Tensor64 = tensor::Tensor<f64>;
/// Single-precision tensor.
pub type Tensor32 = tensor::Tensor<f32>;
/// Double-precision waveform.
pub type Waveform64 = signal::Waveform<f64>;
/// Double-precision mel spectrogram.
pub type MelSpectrogram64 = signal::MelSpectrogram<f64>;
