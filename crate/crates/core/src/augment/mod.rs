//! Label-preserving audio transformations and the random policy that draws
//! two transformed variants per training instance.
//!
//! Pitch shifting and reverberation act on the waveform; time-frequency
//! masking acts on the mel spectrogram. The whole pipeline is a pure
//! function of (instance, seed).

mod mask;
mod pitch;
mod policy;
mod rir;

pub use mask::{sample_mask, tf_mask, MaskParams, MaskSpec};
pub use pitch::pitch_shift;
pub use policy::{
    sample_transform_pair, Augmenter, Instance, Policy, TransformKind, PITCH_SEMITONES,
};
pub use rir::{apply_reverb, fft_convolve, synth_rir, RirBank};

use crate::signal::SignalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("pitch shift of {0} semitones outside the supported +/-12 range")]
    SemitonesOutOfRange(f64),
    #[error("waveform of {len} samples is too short for one analysis window of {window}")]
    TooShortForAnalysis { len: usize, window: usize },
    #[error("rt60 of {0} ms outside the supported [200, 1000] ms range")]
    Rt60OutOfRange(f64),
    #[error("sample rate mismatch: {a} Hz vs {b} Hz")]
    SampleRateMismatch { a: u32, b: u32 },
    #[error("rir index {index} out of range for bank of {size}")]
    RirIndexOutOfRange { index: usize, size: usize },
    #[error("mask ({start}, {width}) exceeds dimension of {limit}")]
    MaskOutOfBounds {
        start: usize,
        width: usize,
        limit: usize,
    },
    #[error("unknown transform policy '{0}' (expected pitch, reverb, tfmask, or combination)")]
    UnknownPolicy(String),
    #[error("transform {transform} cannot be applied in the {domain} domain")]
    DomainMismatch {
        transform: &'static str,
        domain: &'static str,
    },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[cfg(test)]
mod tests;
