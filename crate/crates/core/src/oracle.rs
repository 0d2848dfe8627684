//! Slow, independent reference computations used by the test suites and the
//! `selftest` command: a naive O(n^2) DFT, direct convolution, a
//! brute-force Jensen-Shannon divergence, and Schroeder backward
//! integration for RT60 estimates.
//!
//! Nothing here shares code with the fast implementations it checks.

use rustfft::num_complex::Complex;

/// Naive O(n^2) DFT of a real signal; returns all n coefficients.
pub fn naive_dft(signal: &[f64]) -> Vec<Complex<f64>> {
    let n = signal.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(0.0, 0.0);
            for (i, &x) in signal.iter().enumerate() {
                let angle = -std::f64::consts::TAU * (k * i) as f64 / n as f64;
                acc += Complex::new(x * angle.cos(), x * angle.sin());
            }
            acc
        })
        .collect()
}

/// Direct O(n*m) full linear convolution.
pub fn naive_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Three-way Jensen-Shannon divergence evaluated term by term from its
/// definition: the mean of the three KL divergences to the mixture.
pub fn jsd_brute_force(p0: &[f64], p1: &[f64], p2: &[f64]) -> f64 {
    let k = p0.len();
    let kl = |p: &[f64], q: &[f64]| -> f64 {
        (0..k)
            .map(|i| {
                if p[i] <= 0.0 {
                    0.0
                } else {
                    p[i] * (p[i].max(1e-12).ln() - q[i].max(1e-12).ln())
                }
            })
            .sum()
    };
    let m: Vec<f64> = (0..k).map(|i| (p0[i] + p1[i] + p2[i]) / 3.0).collect();
    (kl(p0, &m) + kl(p1, &m) + kl(p2, &m)) / 3.0
}

/// RT60 estimate of an impulse response via Schroeder backward integration,
/// fitting the -5 dB to -25 dB span of the decay curve.
pub fn schroeder_rt60_secs(rir: &[f64], sample_rate: u32) -> Option<f64> {
    let energy: Vec<f64> = rir.iter().map(|&x| x * x).collect();
    // backward cumulative energy
    let mut cum = vec![0.0; energy.len()];
    let mut acc = 0.0;
    for i in (0..energy.len()).rev() {
        acc += energy[i];
        cum[i] = acc;
    }
    let total = cum[0];
    if total <= 0.0 {
        return None;
    }
    let db: Vec<f64> = cum.iter().map(|&e| 10.0 * (e / total).log10()).collect();
    let idx_at = |level: f64| db.iter().position(|&d| d <= level);
    let i5 = idx_at(-5.0)?;
    let i25 = idx_at(-25.0)?;
    if i25 <= i5 {
        return None;
    }
    // least-squares slope of db over the span, in dB per sample
    let n = (i25 - i5 + 1) as f64;
    let xs = (i5..=i25).map(|i| i as f64);
    let mean_x = xs.clone().sum::<f64>() / n;
    let mean_y = db[i5..=i25].iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, &y) in xs.zip(&db[i5..=i25]) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx; // dB per sample, negative
    if slope >= 0.0 {
        return None;
    }
    Some(-60.0 / slope / sample_rate as f64)
}

/// Central finite difference of a scalar function at `x` with step `h`.
pub fn central_difference(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Relative error used by the gradient checks: |a-b| / max(|a|, |b|, floor).
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
