//! Synthetic room impulse responses and reverberation by convolution.
//!
//! An RIR is a unit direct-path impulse followed by Gaussian noise shaped
//! by the exponential decay `exp(-t * 3 ln 10 / rt60)`, which gives a
//! controllable RT60 measurable by Schroeder backward integration.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::AugmentError;
use crate::signal::Waveform;
use crate::Scalar;

pub const RT60_MIN_MS: f64 = 200.0;
pub const RT60_MAX_MS: f64 = 1000.0;

/// Generates one RIR with the given target RT60 in milliseconds. The
/// result is peak-normalized and at least 1.5 * rt60 long.
pub fn synth_rir<S: Scalar>(
    rt60_ms: f64,
    sample_rate: u32,
    rng: &mut impl Rng,
) -> Result<Waveform<S>, AugmentError> {
    if !(RT60_MIN_MS..=RT60_MAX_MS).contains(&rt60_ms) {
        return Err(AugmentError::Rt60OutOfRange(rt60_ms));
    }
    let rt60 = rt60_ms / 1000.0;
    let len = (1.5 * rt60 * sample_rate as f64).ceil() as usize + 1;
    let decay_rate = 3.0 * 10f64.ln() / rt60;

    let mut samples = Vec::with_capacity(len);
    samples.push(1.0f64); // direct path
    for n in 1..len {
        let t = n as f64 / sample_rate as f64;
        let g: f64 = sample_standard_normal(rng);
        samples.push(g * (-t * decay_rate).exp());
    }
    let peak = samples.iter().fold(0.0f64, |a, &s| a.max(s.abs()));
    let inv = 1.0 / peak;
    let samples: Vec<S> = samples.iter().map(|&s| S::from_f64_c(s * inv)).collect();
    Ok(Waveform::new(samples, sample_rate)?)
}

/// Box-Muller draw, so determinism depends only on the `Rng` byte stream.
fn sample_standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A pre-generated bank of RIRs with RT60 drawn uniformly from a range.
#[derive(Debug, Clone)]
pub struct RirBank<S: Scalar> {
    rirs: Vec<Waveform<S>>,
    rt60_range_ms: (f64, f64),
    seed: u64,
}

impl<S: Scalar> RirBank<S> {
    pub const DEFAULT_SIZE: usize = 500;

    /// Generates `size` RIRs deterministically from the seed.
    pub fn generate(
        size: usize,
        rt60_range_ms: (f64, f64),
        sample_rate: u32,
        seed: u64,
    ) -> Result<Self, AugmentError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rirs = Vec::with_capacity(size);
        for _ in 0..size {
            let rt60 = rng.gen_range(rt60_range_ms.0..=rt60_range_ms.1);
            rirs.push(synth_rir(rt60, sample_rate, &mut rng)?);
        }
        Ok(Self {
            rirs,
            rt60_range_ms,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.rirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rirs.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&Waveform<S>, AugmentError> {
        self.rirs.get(index).ok_or(AugmentError::RirIndexOutOfRange {
            index,
            size: self.rirs.len(),
        })
    }

    pub fn rt60_range_ms(&self) -> (f64, f64) {
        self.rt60_range_ms
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Adds reverberation: full linear convolution with the RIR, truncated to
/// the input length and renormalized to the input's peak.
pub fn apply_reverb<S: Scalar>(
    w: &Waveform<S>,
    rir: &Waveform<S>,
) -> Result<Waveform<S>, AugmentError> {
    if w.sample_rate() != rir.sample_rate() {
        return Err(AugmentError::SampleRateMismatch {
            a: w.sample_rate(),
            b: rir.sample_rate(),
        });
    }
    let mut wet = fft_convolve(w.samples(), rir.samples());
    wet.truncate(w.len());
    let in_peak = w.peak();
    let wet_peak = wet.iter().fold(S::zero(), |a, &s| a.max(s.abs()));
    if wet_peak > S::zero() && in_peak > S::zero() {
        let gain = in_peak / wet_peak;
        for s in &mut wet {
            *s = *s * gain;
        }
    }
    Ok(Waveform::new(wet, w.sample_rate())?)
}

/// Full linear convolution via FFT; output length is `a.len() + b.len() - 1`.
pub fn fft_convolve<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::<S>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut fa = vec![Complex::new(S::zero(), S::zero()); n];
    let mut fb = vec![Complex::new(S::zero(), S::zero()); n];
    for (i, &x) in a.iter().enumerate() {
        fa[i].re = x;
    }
    for (i, &x) in b.iter().enumerate() {
        fb[i].re = x;
    }
    fft.process(&mut fa);
    fft.process(&mut fb);
    let scale = S::from_f64_c(1.0 / n as f64);
    for i in 0..n {
        fa[i] = fa[i] * fb[i] * scale;
    }
    ifft.process(&mut fa);
    fa[..out_len].iter().map(|c| c.re).collect()
}
