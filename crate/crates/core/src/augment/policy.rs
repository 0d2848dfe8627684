//! Transform policies: which transformations a training regime may draw,
//! and the sampler that produces two independent transforms per instance.

use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    apply_reverb, pitch_shift, sample_mask, tf_mask, AugmentError, MaskParams, RirBank,
};
use crate::signal::{log_mel, FeatureConfig, MelSpectrogram, Waveform};
use crate::Scalar;

/// The ten admissible pitch offsets in semitones; zero is deliberately
/// absent.
pub const PITCH_SEMITONES: [f64; 10] =
    [-2.5, -2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 2.5];

/// One concrete transformation, fully determined by its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformKind {
    PitchShift { semitones: f64 },
    Reverb { rir_index: usize },
    /// Mask rectangles are drawn lazily from this seed once the grid size
    /// is known.
    TfMask { seed: u64 },
}

impl TransformKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::PitchShift { .. } => "pitch-shift",
            TransformKind::Reverb { .. } => "reverb",
            TransformKind::TfMask { .. } => "tf-mask",
        }
    }
}

/// Which transform kinds a regime draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Pitch,
    Reverb,
    TfMask,
    /// Pitch shifting or reverberation with equal probability.
    Combination,
}

impl FromStr for Policy {
    type Err = AugmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pitch" => Ok(Policy::Pitch),
            "reverb" => Ok(Policy::Reverb),
            "tfmask" => Ok(Policy::TfMask),
            "combination" => Ok(Policy::Combination),
            other => Err(AugmentError::UnknownPolicy(other.to_string())),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Policy::Pitch => "pitch",
            Policy::Reverb => "reverb",
            Policy::TfMask => "tfmask",
            Policy::Combination => "combination",
        };
        f.write_str(s)
    }
}

/// Draws one transform of the policy's allowed kinds with uniformly sampled
/// parameters.
pub fn sample_transform(
    policy: Policy,
    rng: &mut impl Rng,
    bank_size: usize,
) -> TransformKind {
    let kind = match policy {
        Policy::Pitch => 0,
        Policy::Reverb => 1,
        Policy::TfMask => 2,
        Policy::Combination => {
            if rng.gen_bool(0.5) {
                0
            } else {
                1
            }
        }
    };
    match kind {
        0 => TransformKind::PitchShift {
            semitones: PITCH_SEMITONES[rng.gen_range(0..PITCH_SEMITONES.len())],
        },
        1 => TransformKind::Reverb {
            rir_index: rng.gen_range(0..bank_size),
        },
        _ => TransformKind::TfMask { seed: rng.gen() },
    }
}

/// Two independently sampled transforms for one instance.
pub fn sample_transform_pair(
    policy: Policy,
    rng: &mut impl Rng,
    bank_size: usize,
) -> (TransformKind, TransformKind) {
    let a = sample_transform(policy, rng, bank_size);
    let b = sample_transform(policy, rng, bank_size);
    (a, b)
}

/// A training instance in whichever domain it currently lives.
#[derive(Debug, Clone)]
pub enum Instance<S: Scalar> {
    Waveform(Waveform<S>),
    Features(MelSpectrogram<S>),
}

/// Bundles the RIR bank, mask parameters, and feature configuration so
/// transforms can be applied end to end.
#[derive(Debug, Clone)]
pub struct Augmenter<S: Scalar> {
    pub feature_cfg: FeatureConfig,
    pub rir_bank: RirBank<S>,
    pub mask_params: MaskParams,
}

impl<S: Scalar> Augmenter<S> {
    pub fn new(feature_cfg: FeatureConfig, rir_bank: RirBank<S>, mask_params: MaskParams) -> Self {
        Self {
            feature_cfg,
            rir_bank,
            mask_params,
        }
    }

    /// Applies a transform in its native domain. Waveform transforms
    /// (pitch, reverb) require a waveform; masking requires features.
    pub fn apply(
        &self,
        t: &TransformKind,
        x: Instance<S>,
    ) -> Result<Instance<S>, AugmentError> {
        match (t, x) {
            (TransformKind::PitchShift { semitones }, Instance::Waveform(w)) => {
                Ok(Instance::Waveform(pitch_shift(&w, *semitones)?))
            }
            (TransformKind::Reverb { rir_index }, Instance::Waveform(w)) => {
                let rir = self.rir_bank.get(*rir_index)?;
                Ok(Instance::Waveform(apply_reverb(&w, rir)?))
            }
            (TransformKind::TfMask { seed }, Instance::Features(spec)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mask =
                    sample_mask(&mut rng, spec.n_mels(), spec.n_frames(), &self.mask_params);
                Ok(Instance::Features(tf_mask(&spec, &mask)?))
            }
            (t, Instance::Features(_)) => Err(AugmentError::DomainMismatch {
                transform: t.name(),
                domain: "spectrogram",
            }),
            (t, Instance::Waveform(_)) => Err(AugmentError::DomainMismatch {
                transform: t.name(),
                domain: "waveform",
            }),
        }
    }

    /// Untransformed feature extraction.
    pub fn features(&self, w: &Waveform<S>) -> Result<MelSpectrogram<S>, AugmentError> {
        Ok(log_mel(w, &self.feature_cfg)?)
    }

    /// Transforms a waveform and takes it through to the mel grid,
    /// applying each transform in the correct domain.
    pub fn transformed_features(
        &self,
        t: &TransformKind,
        w: &Waveform<S>,
    ) -> Result<MelSpectrogram<S>, AugmentError> {
        match t {
            TransformKind::PitchShift { .. } | TransformKind::Reverb { .. } => {
                match self.apply(t, Instance::Waveform(w.clone()))? {
                    Instance::Waveform(out) => Ok(log_mel(&out, &self.feature_cfg)?),
                    Instance::Features(f) => Ok(f),
                }
            }
            TransformKind::TfMask { .. } => {
                let spec = self.features(w)?;
                match self.apply(t, Instance::Features(spec))? {
                    Instance::Features(f) => Ok(f),
                    Instance::Waveform(_) => unreachable!("tf-mask stays in feature domain"),
                }
            }
        }
    }
}
