use super::*;
use crate::oracle::{naive_convolve, schroeder_rt60_secs};
use crate::signal::{log_mel, stft, FeatureConfig, MelSpectrogram, Waveform};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::rand_core::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

const SR: u32 = 22050;

fn tone(freq: f64, len: usize, sr: u32) -> Waveform<f64> {
    let samples: Vec<f64> = (0..len)
        .map(|i| 0.5 * (std::f64::consts::TAU * freq * i as f64 / sr as f64).sin())
        .collect();
    Waveform::new(samples, sr).unwrap()
}

fn peak_freq_hz(w: &Waveform<f64>) -> f64 {
    let s = stft(w, 1024, 600).unwrap();
    // middle frame, away from transient edges
    let mags = s.magnitudes(s.n_frames() / 2);
    let bin = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    bin as f64 * w.sample_rate() as f64 / 1024.0
}

#[test]
fn pitch_shift_zero_is_near_identity() {
    let w = tone(440.0, SR as usize, SR);
    let out = pitch_shift(&w, 0.0).unwrap();
    assert_eq!(out.len(), w.len());
    assert_eq!(out.sample_rate(), w.sample_rate());
    let mse: f64 = w
        .samples()
        .iter()
        .zip(out.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / w.len() as f64;
    assert!(mse.sqrt() < 1e-3, "rms {}", mse.sqrt());
}

#[test]
fn pitch_shift_up_two_semitones() {
    let w = tone(440.0, SR as usize, SR);
    let out = pitch_shift(&w, 2.0).unwrap();
    let expected = 440.0 * (2.0f64 / 12.0).exp2();
    let bin_width = SR as f64 / 1024.0;
    assert!((peak_freq_hz(&out) - expected).abs() <= bin_width);
}

#[test]
fn pitch_shift_down_fractional_semitones() {
    let w = tone(440.0, SR as usize, SR);
    let out = pitch_shift(&w, -2.5).unwrap();
    let expected = 440.0 * (-2.5f64 / 12.0).exp2(); // ~380.8 Hz
    assert!((expected - 380.8).abs() < 0.1);
    let bin_width = SR as f64 / 1024.0;
    assert!((peak_freq_hz(&out) - expected).abs() <= bin_width);
}

#[test]
fn pitch_shift_errors() {
    let w = tone(440.0, 100, SR);
    assert!(matches!(
        pitch_shift(&w, 1.0),
        Err(AugmentError::TooShortForAnalysis { .. })
    ));
    let w = tone(440.0, 4096, SR);
    assert!(matches!(
        pitch_shift(&w, 13.0),
        Err(AugmentError::SemitonesOutOfRange(_))
    ));
}

#[test]
fn synth_rir_hits_target_rt60() {
    for &target_ms in &[200.0, 600.0, 1000.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let rir: Waveform<f64> = synth_rir(target_ms, SR, &mut rng).unwrap();
        assert!(rir.len() as f64 >= 1.5 * target_ms / 1000.0 * SR as f64);
        let est = schroeder_rt60_secs(rir.samples(), SR).unwrap() * 1000.0;
        assert!(
            (est - target_ms).abs() <= 0.15 * target_ms,
            "target {target_ms} ms, estimated {est} ms"
        );
    }
}

#[test]
fn synth_rir_envelope_decays() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rir: Waveform<f64> = synth_rir(600.0, SR, &mut rng).unwrap();
    // block RMS over 20 ms windows, after the direct-path sample
    let block = (SR as usize) / 50;
    let rms: Vec<f64> = rir.samples()[1..]
        .chunks(block)
        .filter(|c| c.len() == block)
        .map(|c| (c.iter().map(|x| x * x).sum::<f64>() / c.len() as f64).sqrt())
        .collect();
    for pair in rms.windows(2) {
        assert!(pair[1] <= pair[0], "{} -> {}", pair[0], pair[1]);
    }
}

#[test]
fn synth_rir_is_deterministic() {
    let a: Waveform<f64> = synth_rir(400.0, SR, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let b: Waveform<f64> = synth_rir(400.0, SR, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn synth_rir_rejects_out_of_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(
        synth_rir::<f64>(100.0, SR, &mut rng),
        Err(AugmentError::Rt60OutOfRange(_))
    ));
    assert!(matches!(
        synth_rir::<f64>(1500.0, SR, &mut rng),
        Err(AugmentError::Rt60OutOfRange(_))
    ));
}

#[test]
fn rir_bank_is_reproducible_and_in_range() {
    let a: RirBank<f64> = RirBank::generate(5, (300.0, 900.0), SR, 123).unwrap();
    let b: RirBank<f64> = RirBank::generate(5, (300.0, 900.0), SR, 123).unwrap();
    assert_eq!(a.len(), 5);
    for i in 0..5 {
        assert_eq!(a.get(i).unwrap(), b.get(i).unwrap());
        let est = schroeder_rt60_secs(a.get(i).unwrap().samples(), SR).unwrap() * 1000.0;
        assert!(est >= 0.85 * 300.0 && est <= 1.15 * 900.0, "rir {i}: {est} ms");
    }
    assert!(matches!(
        a.get(5),
        Err(AugmentError::RirIndexOutOfRange { index: 5, size: 5 })
    ));
}

#[test]
fn reverb_with_unit_impulse_is_identity() {
    let w = tone(300.0, 2000, SR);
    let mut imp = vec![0.0f64; 64];
    imp[0] = 1.0;
    let rir = Waveform::new(imp, SR).unwrap();
    let out = apply_reverb(&w, &rir).unwrap();
    for (a, b) in w.samples().iter().zip(out.samples()) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn reverb_with_delayed_impulse_shifts() {
    let w = tone(300.0, 2000, SR);
    let k = 17;
    let mut imp = vec![0.0f64; 64];
    imp[k] = 1.0;
    let rir = Waveform::new(imp, SR).unwrap();
    let out = apply_reverb(&w, &rir).unwrap();
    assert_eq!(out.len(), w.len());
    let gain = out.peak() / w.peak();
    for i in k..w.len() {
        assert!((out.samples()[i] - gain * w.samples()[i - k]).abs() < 1e-6);
    }
    for i in 0..k {
        assert!(out.samples()[i].abs() < 1e-6);
    }
}

#[test]
fn fft_convolve_matches_naive_oracle() {
    let mut rng = StdRng::seed_from_u64(21);
    let a: Vec<f64> = (0..1000).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let fast = fft_convolve(&a, &b);
    let slow = naive_convolve(&a, &b);
    assert_eq!(fast.len(), slow.len());
    let scale = slow.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    for (x, y) in fast.iter().zip(&slow) {
        assert!((x - y).abs() <= 1e-6 * scale);
    }
}

#[test]
fn reverb_rejects_sample_rate_mismatch() {
    let w = tone(300.0, 2000, SR);
    let rir = Waveform::new(vec![1.0f64, 0.5], 8000).unwrap();
    assert!(matches!(
        apply_reverb(&w, &rir),
        Err(AugmentError::SampleRateMismatch { a: 22050, b: 8000 })
    ));
}

fn random_spec(rng: &mut impl Rng, n_mels: usize, n_frames: usize) -> MelSpectrogram<f64> {
    let values: Vec<f64> = (0..n_mels * n_frames)
        .map(|_| rng.gen_range(-20.0..0.0))
        .collect();
    MelSpectrogram::from_values(values, n_mels, n_frames, SR)
}

#[test]
fn tf_mask_empty_spec_is_identity() {
    let mut rng = StdRng::seed_from_u64(1);
    let spec = random_spec(&mut rng, 16, 20);
    let out = tf_mask(&spec, &MaskSpec::default()).unwrap();
    assert_eq!(out, spec);
}

#[test]
fn tf_mask_full_band_fills_grid() {
    let mut rng = StdRng::seed_from_u64(2);
    let spec = random_spec(&mut rng, 16, 20);
    let mask = MaskSpec {
        freq_masks: vec![(0, 16)],
        time_masks: vec![],
    };
    let out = tf_mask(&spec, &mask).unwrap();
    let fill = spec.min_value();
    assert!(out.values().iter().all(|&v| v == fill));
}

#[test]
fn tf_mask_changes_exactly_the_masked_area() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let (n_mels, n_frames) = (rng.gen_range(4..40), rng.gen_range(4..40));
        let spec = random_spec(&mut rng, n_mels, n_frames);
        let params = MaskParams::default();
        let mask = sample_mask(&mut rng, n_mels, n_frames, &params);
        let out = tf_mask(&spec, &mask).unwrap();

        // independent union-area computation over a boolean grid
        let mut covered = vec![false; n_mels * n_frames];
        for &(s, w) in &mask.freq_masks {
            for m in s..s + w {
                for t in 0..n_frames {
                    covered[m * n_frames + t] = true;
                }
            }
        }
        for &(s, w) in &mask.time_masks {
            for t in s..s + w {
                for m in 0..n_mels {
                    covered[m * n_frames + t] = true;
                }
            }
        }
        let fill = spec.min_value();
        for m in 0..n_mels {
            for t in 0..n_frames {
                let (a, b) = (spec.at(m, t), out.at(m, t));
                if covered[m * n_frames + t] {
                    assert_eq!(b, fill);
                } else {
                    assert_eq!(a, b);
                }
            }
        }
    }
}

#[test]
fn tf_mask_rejects_out_of_bounds() {
    let mut rng = StdRng::seed_from_u64(4);
    let spec = random_spec(&mut rng, 8, 10);
    let mask = MaskSpec {
        freq_masks: vec![(6, 4)],
        time_masks: vec![],
    };
    assert!(matches!(
        tf_mask(&spec, &mask),
        Err(AugmentError::MaskOutOfBounds { .. })
    ));
}

#[test]
fn sample_mask_zero_masks_is_empty() {
    let params = MaskParams {
        max_masks: 0,
        ..MaskParams::default()
    };
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        assert!(sample_mask(&mut rng, 32, 32, &params).is_empty());
    }
}

#[test]
fn sample_mask_always_valid() {
    let params = MaskParams::default();
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..10_000 {
        let spec = sample_mask(&mut rng, 32, 40, &params);
        assert!(spec.freq_masks.len() <= params.max_masks);
        assert!(spec.time_masks.len() <= params.max_masks);
        for &(s, w) in &spec.freq_masks {
            assert!(w >= 1 && w <= 4 && s + w <= 32);
        }
        for &(s, w) in &spec.time_masks {
            assert!(w >= 1 && w <= 5 && s + w <= 40);
        }
    }
}

#[test]
fn sample_mask_is_deterministic() {
    let params = MaskParams::default();
    let a = sample_mask(&mut ChaCha8Rng::seed_from_u64(11), 32, 40, &params);
    let b = sample_mask(&mut ChaCha8Rng::seed_from_u64(11), 32, 40, &params);
    assert_eq!(a, b);
}

#[test]
fn pitch_policy_draws_only_pitch_shifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let (a, b) = sample_transform_pair(Policy::Pitch, &mut rng, 500);
        for t in [&a, &b] {
            match t {
                TransformKind::PitchShift { semitones } => {
                    assert!(PITCH_SEMITONES.contains(semitones));
                }
                other => panic!("unexpected transform {other:?}"),
            }
        }
    }
}

#[test]
fn combination_policy_is_evenly_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut pitch_counts = [0usize; 2];
    let n = 10_000;
    for _ in 0..n {
        let (a, b) = sample_transform_pair(Policy::Combination, &mut rng, 500);
        for (slot, t) in [(0, &a), (1, &b)] {
            match t {
                TransformKind::PitchShift { .. } => pitch_counts[slot] += 1,
                TransformKind::Reverb { rir_index } => assert!(*rir_index < 500),
                other => panic!("unexpected transform {other:?}"),
            }
        }
    }
    for count in pitch_counts {
        let frac = count as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.02, "pitch fraction {frac}");
    }
}

#[test]
fn transform_pair_is_deterministic() {
    let a = sample_transform_pair(Policy::Combination, &mut ChaCha8Rng::seed_from_u64(19), 500);
    let b = sample_transform_pair(Policy::Combination, &mut ChaCha8Rng::seed_from_u64(19), 500);
    assert_eq!(a, b);
}

#[test]
fn unknown_policy_name_is_rejected() {
    assert!(matches!(
        "bogus".parse::<Policy>(),
        Err(AugmentError::UnknownPolicy(_))
    ));
    assert_eq!("combination".parse::<Policy>().unwrap(), Policy::Combination);
}

fn test_augmenter() -> Augmenter<f64> {
    let cfg = FeatureConfig::desk_scale();
    let bank = RirBank::generate(4, (300.0, 700.0), SR, 77).unwrap();
    Augmenter::new(cfg, bank, MaskParams::default())
}

#[test]
fn applied_transforms_preserve_feature_shape() {
    let aug = test_augmenter();
    let w = tone(440.0, SR as usize, SR);
    let base = aug.features(&w).unwrap();
    for t in [
        TransformKind::PitchShift { semitones: 0.5 },
        TransformKind::Reverb { rir_index: 2 },
        TransformKind::TfMask { seed: 99 },
    ] {
        let f = aug.transformed_features(&t, &w).unwrap();
        assert_eq!(f.n_mels(), base.n_mels());
        assert_eq!(f.n_frames(), base.n_frames());
    }
}

#[test]
fn reverb_preserves_length() {
    let aug = test_augmenter();
    let w = tone(440.0, SR as usize, SR);
    match aug
        .apply(&TransformKind::Reverb { rir_index: 0 }, Instance::Waveform(w.clone()))
        .unwrap()
    {
        Instance::Waveform(out) => assert_eq!(out.len(), w.len()),
        _ => panic!("reverb must stay in the waveform domain"),
    }
}

#[test]
fn tf_mask_differs_only_inside_masks() {
    let aug = test_augmenter();
    let w = tone(440.0, SR as usize, SR);
    let base = aug.features(&w).unwrap();
    let masked = aug
        .transformed_features(&TransformKind::TfMask { seed: 5 }, &w)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mask = sample_mask(&mut rng, base.n_mels(), base.n_frames(), &aug.mask_params);
    let expect = tf_mask(&base, &mask).unwrap();
    assert_eq!(masked, expect);
}

#[test]
fn apply_rejects_domain_mismatch() {
    let aug = test_augmenter();
    let w = tone(440.0, SR as usize, SR);
    let feats = aug.features(&w).unwrap();
    assert!(matches!(
        aug.apply(
            &TransformKind::TfMask { seed: 1 },
            Instance::Waveform(w.clone())
        ),
        Err(AugmentError::DomainMismatch { .. })
    ));
    assert!(matches!(
        aug.apply(
            &TransformKind::PitchShift { semitones: 1.0 },
            Instance::Features(feats)
        ),
        Err(AugmentError::DomainMismatch { .. })
    ));
}
