//! Short-time Fourier transform with a periodic Hann window and no
//! signal padding: every frame lies fully inside the input.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{SignalError, Waveform};
use crate::Scalar;

/// One-sided complex STFT, stored frame-major: `n_frames x (n_fft/2 + 1)`.
#[derive(Debug, Clone)]
pub struct ComplexSpectrogram<S: Scalar> {
    bins: Vec<Complex<S>>,
    n_frames: usize,
    n_fft: usize,
    hop: usize,
}

impl<S: Scalar> ComplexSpectrogram<S> {
    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn at(&self, frame: usize, bin: usize) -> Complex<S> {
        self.bins[frame * self.n_bins() + bin]
    }

    pub fn frame(&self, frame: usize) -> &[Complex<S>] {
        let nb = self.n_bins();
        &self.bins[frame * nb..(frame + 1) * nb]
    }

    /// Magnitudes of one frame.
    pub fn magnitudes(&self, frame: usize) -> Vec<S> {
        self.frame(frame).iter().map(|c| c.norm()).collect()
    }
}

/// Periodic Hann window of length `n`.
pub fn hann_window<S: Scalar>(n: usize) -> Vec<S> {
    let half = S::from_f64_c(0.5);
    let tau = S::from_f64_c(std::f64::consts::TAU);
    let nn = S::from_f64_c(n as f64);
    (0..n)
        .map(|i| half * (S::one() - (tau * S::from_f64_c(i as f64) / nn).cos()))
        .collect()
}

/// STFT of `w` with `window == n_fft` and the given hop.
///
/// Frame `t`, bin `k` is the k-th DFT coefficient of the Hann-windowed
/// segment starting at `t * hop`.
pub fn stft<S: Scalar>(
    w: &Waveform<S>,
    window: usize,
    hop: usize,
) -> Result<ComplexSpectrogram<S>, SignalError> {
    if window == 0 || hop == 0 {
        return Err(SignalError::InvalidFraming);
    }
    let samples = w.samples();
    if samples.len() < window {
        return Err(SignalError::TooShort {
            len: samples.len(),
            window,
        });
    }
    let n_frames = (samples.len() - window) / hop + 1;
    let win = hann_window::<S>(window);
    let n_bins = window / 2 + 1;

    let mut planner = FftPlanner::<S>::new();
    let fft = planner.plan_fft_forward(window);
    let mut scratch = vec![Complex::new(S::zero(), S::zero()); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::new(S::zero(), S::zero()); window];
    let mut bins = Vec::with_capacity(n_frames * n_bins);

    for t in 0..n_frames {
        let start = t * hop;
        for i in 0..window {
            buf[i] = Complex::new(samples[start + i] * win[i], S::zero());
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        bins.extend_from_slice(&buf[..n_bins]);
    }

    Ok(ComplexSpectrogram {
        bins,
        n_frames,
        n_fft: window,
        hop,
    })
}
