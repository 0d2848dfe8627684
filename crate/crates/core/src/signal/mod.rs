//! Audio ingestion and the waveform → log-mel-spectrogram feature pipeline.
//!
//! The pipeline is: WAV (or synthetic) waveform → Hann-windowed STFT →
//! power spectrum → triangular mel filterbank → natural log with a floor.
//! No centering or padding is applied before framing, so the frame count
//! is exactly `(len - window) / hop + 1`.

mod mel;
mod stft;
mod wav;

pub use mel::{mel_filterbank, mel_from_hz, mel_to_hz, MelFilterbank};
pub use stft::{hann_window, stft, ComplexSpectrogram};
pub use wav::{read_wav, write_wav};

use crate::Scalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("waveform is empty")]
    EmptyWaveform,
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("waveform of {len} samples is shorter than one window of {window}")]
    TooShort { len: usize, window: usize },
    #[error("window and hop must be positive")]
    InvalidFraming,
    #[error("{n_mels} mel bins over {n_bins} FFT bins leaves filter {filter} empty")]
    EmptyMelFilter {
        n_mels: usize,
        n_bins: usize,
        filter: usize,
    },
    #[error("wav file not found: {0}")]
    WavMissing(String),
    #[error("malformed RIFF/WAVE header: {0}")]
    WavMalformed(String),
    #[error("unsupported wav encoding: format tag {format_tag} ({bits} bits/sample); only PCM 16-bit and IEEE float32 are supported")]
    WavUnsupported { format_tag: u16, bits: u16 },
    #[error("wav i/o error: {0}")]
    WavIo(#[from] std::io::Error),
}

/// A mono audio clip: amplitude samples (nominal range [-1, 1]) at a fixed
/// sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<S: Scalar> {
    samples: Vec<S>,
    sample_rate: u32,
}

impl<S: Scalar> Waveform<S> {
    pub fn new(samples: Vec<S>, sample_rate: u32) -> Result<Self, SignalError> {
        if samples.is_empty() {
            return Err(SignalError::EmptyWaveform);
        }
        if sample_rate == 0 {
            return Err(SignalError::InvalidSampleRate);
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SignalError::NonFiniteSample(i));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: nonempty
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn into_samples(self) -> Vec<S> {
        self.samples
    }

    /// Largest absolute sample value.
    pub fn peak(&self) -> S {
        self.samples
            .iter()
            .fold(S::zero(), |acc, &s| acc.max(s.abs()))
    }
}

/// Log-magnitude mel spectrogram, `n_mels x n_frames`, natural-log power
/// with a floor so every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram<S: Scalar> {
    values: Vec<S>,
    n_mels: usize,
    n_frames: usize,
    sample_rate: u32,
}

impl<S: Scalar> MelSpectrogram<S> {
    pub fn from_values(
        values: Vec<S>,
        n_mels: usize,
        n_frames: usize,
        sample_rate: u32,
    ) -> Self {
        assert_eq!(values.len(), n_mels * n_frames);
        Self {
            values,
            n_mels,
            n_frames,
            sample_rate,
        }
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn at(&self, mel: usize, frame: usize) -> S {
        self.values[mel * self.n_frames + frame]
    }

    pub fn at_mut(&mut self, mel: usize, frame: usize) -> &mut S {
        &mut self.values[mel * self.n_frames + frame]
    }

    /// Row-major values, mel bin by mel bin.
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn min_value(&self) -> S {
        self.values.iter().fold(S::infinity(), |a, &v| a.min(v))
    }

    /// One CSV line per mel bin, frames as columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for m in 0..self.n_mels {
            let row: Vec<String> = (0..self.n_frames)
                .map(|t| format!("{}", self.at(m, t)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Parameters of the waveform → log-mel pipeline.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureConfig {
    pub window: usize,
    pub hop: usize,
    pub n_mels: usize,
    /// Floor inside the log so silence maps to `ln(log_floor)`.
    pub log_floor: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window: 1024,
            hop: 600,
            n_mels: 128,
            log_floor: 1e-10,
        }
    }
}

impl FeatureConfig {
    /// Reduced bin count for fast CPU experiments.
    pub fn desk_scale() -> Self {
        Self {
            n_mels: 32,
            ..Self::default()
        }
    }

    /// Frames produced for a waveform of `len` samples, or `None` when it is
    /// shorter than one window.
    pub fn n_frames(&self, len: usize) -> Option<usize> {
        if len < self.window {
            None
        } else {
            Some((len - self.window) / self.hop + 1)
        }
    }
}

/// Full feature pipeline: STFT power spectrum through the mel filterbank,
/// then `ln(max(e, log_floor))`.
pub fn log_mel<S: Scalar>(
    w: &Waveform<S>,
    cfg: &FeatureConfig,
) -> Result<MelSpectrogram<S>, SignalError> {
    let spec = stft(w, cfg.window, cfg.hop)?;
    let fb = mel_filterbank::<S>(cfg.n_mels, cfg.window, w.sample_rate())?;
    let n_frames = spec.n_frames();
    let n_bins = spec.n_bins();
    let floor = S::from_f64_c(cfg.log_floor);
    let mut values = vec![S::zero(); cfg.n_mels * n_frames];
    // power spectrum per frame, then one filterbank row per mel bin
    let mut power = vec![S::zero(); n_bins];
    for t in 0..n_frames {
        for k in 0..n_bins {
            power[k] = spec.at(t, k).norm_sqr();
        }
        for m in 0..cfg.n_mels {
            let row = fb.row(m);
            let mut acc = S::zero();
            for k in 0..n_bins {
                acc = acc + row[k] * power[k];
            }
            values[m * n_frames + t] = acc.max(floor).ln();
        }
    }
    Ok(MelSpectrogram::from_values(
        values,
        cfg.n_mels,
        n_frames,
        w.sample_rate(),
    ))
}
