//! Triangular mel filterbank with centers equally spaced on the mel scale
//! between 0 Hz and Nyquist.

use super::SignalError;
use crate::Scalar;

/// mel(f) = 2595 * log10(1 + f / 700)
pub fn mel_from_hz(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10.0f64.powf(mel / 2595.0) - 1.0)
}

/// Filter matrix `n_mels x (n_fft/2 + 1)`, all weights nonnegative.
#[derive(Debug, Clone)]
pub struct MelFilterbank<S: Scalar> {
    weights: Vec<S>,
    n_mels: usize,
    n_bins: usize,
    /// Center frequency of each filter in Hz.
    centers_hz: Vec<f64>,
}

impl<S: Scalar> MelFilterbank<S> {
    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn row(&self, mel: usize) -> &[S] {
        &self.weights[mel * self.n_bins..(mel + 1) * self.n_bins]
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers_hz
    }
}

/// Builds the triangular filterbank. Fails if some filter would have no
/// positive weight, which happens when `n_mels` is too large for the FFT
/// resolution.
pub fn mel_filterbank<S: Scalar>(
    n_mels: usize,
    n_fft: usize,
    sample_rate: u32,
) -> Result<MelFilterbank<S>, SignalError> {
    assert!(n_mels >= 1, "n_mels must be at least 1");
    assert!(n_fft % 2 == 0, "n_fft must be even");
    assert!(sample_rate > 0, "sample rate must be positive");

    let n_bins = n_fft / 2 + 1;
    let nyquist = sample_rate as f64 / 2.0;
    let mel_max = mel_from_hz(nyquist);
    // n_mels + 2 edge points, filters span [edge[m], edge[m+2]] with the
    // peak at edge[m+1]
    let edges_hz: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (n_mels + 1) as f64))
        .collect();

    let bin_hz = |k: usize| k as f64 * sample_rate as f64 / n_fft as f64;
    let mut weights = vec![S::zero(); n_mels * n_bins];
    for m in 0..n_mels {
        let (lo, center, hi) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
        let mut any_positive = false;
        for k in 0..n_bins {
            let f = bin_hz(k);
            let w = if f <= lo || f >= hi {
                0.0
            } else if f <= center {
                (f - lo) / (center - lo)
            } else {
                (hi - f) / (hi - center)
            };
            if w > 0.0 {
                any_positive = true;
                weights[m * n_bins + k] = S::from_f64_c(w);
            }
        }
        if !any_positive {
            return Err(SignalError::EmptyMelFilter {
                n_mels,
                n_bins,
                filter: m,
            });
        }
    }

    Ok(MelFilterbank {
        weights,
        n_mels,
        n_bins,
        centers_hz: edges_hz[1..=n_mels].to_vec(),
    })
}
