//! Pitch shifting via phase-vocoder time stretching followed by linear
//! resampling back to the original length, so the clip's duration is
//! unchanged while frequencies scale by `2^(semitones/12)`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::AugmentError;
use crate::signal::{hann_window, Waveform};
use crate::Scalar;

const PV_WINDOW: usize = 1024;
const PV_HOP: usize = PV_WINDOW / 4;

/// Shifts the pitch of `w` by the given number of semitones.
pub fn pitch_shift<S: Scalar>(
    w: &Waveform<S>,
    semitones: f64,
) -> Result<Waveform<S>, AugmentError> {
    if !semitones.is_finite() || semitones.abs() > 12.0 {
        return Err(AugmentError::SemitonesOutOfRange(semitones));
    }
    if w.len() < PV_WINDOW {
        return Err(AugmentError::TooShortForAnalysis {
            len: w.len(),
            window: PV_WINDOW,
        });
    }
    let factor = (semitones / 12.0).exp2();
    // stretch to duration * factor, then read back at step `factor`
    let stretched = time_stretch(w.samples(), 1.0 / factor);
    let resampled: Vec<S> = (0..w.len())
        .map(|i| {
            let pos = i as f64 * factor;
            let i0 = pos.floor() as usize;
            let frac = S::from_f64_c(pos - i0 as f64);
            let a = stretched.get(i0).copied().unwrap_or(S::zero());
            let b = stretched.get(i0 + 1).copied().unwrap_or(a);
            a + (b - a) * frac
        })
        .collect();
    Ok(Waveform::new(resampled, w.sample_rate())?)
}

/// Phase-vocoder time stretch: output duration is input duration / `rate`.
///
/// Frames are taken at fractional positions `k * rate` of the analysis
/// frame grid; magnitudes are linearly interpolated and phases accumulated
/// from the wrapped deviation against the expected per-hop advance.
fn time_stretch<S: Scalar>(samples: &[S], rate: f64) -> Vec<S> {
    let n_bins = PV_WINDOW / 2 + 1;
    let win = hann_window::<S>(PV_WINDOW);

    // centered framing: pad half a window of zeros on both sides
    let pad = PV_WINDOW / 2;
    let mut padded = vec![S::zero(); samples.len() + 2 * pad];
    padded[pad..pad + samples.len()].copy_from_slice(samples);
    let n_frames = (padded.len() - PV_WINDOW) / PV_HOP + 1;

    let mut planner = FftPlanner::<S>::new();
    let fft = planner.plan_fft_forward(PV_WINDOW);
    let ifft = planner.plan_fft_inverse(PV_WINDOW);

    let mut frames: Vec<Vec<Complex<S>>> = Vec::with_capacity(n_frames);
    let mut buf = vec![Complex::new(S::zero(), S::zero()); PV_WINDOW];
    for t in 0..n_frames {
        for i in 0..PV_WINDOW {
            buf[i] = Complex::new(padded[t * PV_HOP + i] * win[i], S::zero());
        }
        fft.process(&mut buf);
        frames.push(buf[..n_bins].to_vec());
    }

    // expected phase advance per hop for each bin
    let tau = std::f64::consts::TAU;
    let advance: Vec<f64> = (0..n_bins)
        .map(|k| tau * (PV_HOP * k) as f64 / PV_WINDOW as f64)
        .collect();

    let n_out = ((n_frames as f64) / rate).ceil() as usize;
    let mut phase: Vec<f64> = frames[0].iter().map(|c| arg(*c)).collect();
    let mut out_len = (n_out - 1) * PV_HOP + PV_WINDOW;
    let mut acc = vec![S::zero(); out_len];
    let mut norm = vec![S::zero(); out_len];

    for k in 0..n_out {
        let t = k as f64 * rate;
        let i0 = (t.floor() as usize).min(n_frames - 1);
        let i1 = (i0 + 1).min(n_frames - 1);
        let frac = t - t.floor();

        // synthesize the full spectrum from interpolated magnitude and the
        // accumulated phase
        for i in 0..PV_WINDOW {
            buf[i] = Complex::new(S::zero(), S::zero());
        }
        for b in 0..n_bins {
            let m0 = frames[i0][b].norm().to_f64().unwrap();
            let m1 = frames[i1][b].norm().to_f64().unwrap();
            let mag = m0 * (1.0 - frac) + m1 * frac;
            let c = Complex::new(
                S::from_f64_c(mag * phase[b].cos()),
                S::from_f64_c(mag * phase[b].sin()),
            );
            buf[b] = c;
            if b > 0 && b < PV_WINDOW / 2 {
                buf[PV_WINDOW - b] = c.conj();
            }
        }
        if k + 1 < n_out {
            for b in 0..n_bins {
                let d = arg(frames[i1][b]) - arg(frames[i0][b]) - advance[b];
                let wrapped = d - tau * (d / tau).round();
                phase[b] += advance[b] + wrapped;
            }
        }

        ifft.process(&mut buf);
        let scale = S::from_f64_c(1.0 / PV_WINDOW as f64);
        let start = k * PV_HOP;
        for i in 0..PV_WINDOW {
            acc[start + i] = acc[start + i] + buf[i].re * scale * win[i];
            norm[start + i] = norm[start + i] + win[i] * win[i];
        }
    }

    // weighted overlap-add normalization, then trim the centering pad
    let tiny = S::from_f64_c(1e-8);
    for i in 0..out_len {
        if norm[i] > tiny {
            acc[i] = acc[i] / norm[i];
        }
    }
    let target_len = ((samples.len() as f64) / rate).round() as usize;
    let start = ((pad as f64) / rate).round() as usize;
    out_len = acc.len();
    let end = (start + target_len).min(out_len);
    acc[start.min(out_len)..end].to_vec()
}

fn arg<S: Scalar>(c: Complex<S>) -> f64 {
    c.im.to_f64().unwrap().atan2(c.re.to_f64().unwrap())
}
