//! SpecAugment-style time-frequency masking: random rectangles of the mel
//! grid are filled with the grid's minimum value (the log floor stands in
//! for silence in log space).

use rand::Rng;

use super::AugmentError;
use crate::signal::MelSpectrogram;
use crate::Scalar;

/// Concrete mask rectangles: `(start, width)` per axis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MaskSpec {
    pub freq_masks: Vec<(usize, usize)>,
    pub time_masks: Vec<(usize, usize)>,
}

impl MaskSpec {
    pub fn is_empty(&self) -> bool {
        self.freq_masks.is_empty() && self.time_masks.is_empty()
    }
}

/// Sampling parameters: up to `max_masks` masks per axis, each at most an
/// eighth of the axis wide by default.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MaskParams {
    pub max_masks: usize,
    /// Maximum mask width as a fraction of the axis length.
    pub max_width_frac: f64,
}

impl Default for MaskParams {
    fn default() -> Self {
        Self {
            max_masks: 2,
            max_width_frac: 1.0 / 8.0,
        }
    }
}

impl MaskParams {
    fn max_width(&self, dim: usize) -> usize {
        (((dim as f64) * self.max_width_frac).floor() as usize).clamp(1, dim)
    }
}

/// Draws a random mask specification valid for an `n_mels x n_frames` grid:
/// mask count uniform in `[0, max_masks]`, width uniform in `[1, max_width]`,
/// start uniform over the positions keeping the mask inside the grid.
pub fn sample_mask(
    rng: &mut impl Rng,
    n_mels: usize,
    n_frames: usize,
    params: &MaskParams,
) -> MaskSpec {
    assert!(n_mels > 0 && n_frames > 0, "grid must be nonempty");
    let mut axis = |dim: usize| -> Vec<(usize, usize)> {
        let count = rng.gen_range(0..=params.max_masks);
        let max_width = params.max_width(dim);
        (0..count)
            .map(|_| {
                let width = rng.gen_range(1..=max_width);
                let start = rng.gen_range(0..=dim - width);
                (start, width)
            })
            .collect()
    };
    MaskSpec {
        freq_masks: axis(n_mels),
        time_masks: axis(n_frames),
    }
}

/// Applies the mask: covered cells are set to the grid minimum, everything
/// else is left bit-identical.
pub fn tf_mask<S: Scalar>(
    spec: &MelSpectrogram<S>,
    mask: &MaskSpec,
) -> Result<MelSpectrogram<S>, AugmentError> {
    for &(start, width) in &mask.freq_masks {
        if start + width > spec.n_mels() {
            return Err(AugmentError::MaskOutOfBounds {
                start,
                width,
                limit: spec.n_mels(),
            });
        }
    }
    for &(start, width) in &mask.time_masks {
        if start + width > spec.n_frames() {
            return Err(AugmentError::MaskOutOfBounds {
                start,
                width,
                limit: spec.n_frames(),
            });
        }
    }

    let fill = spec.min_value();
    let mut out = spec.clone();
    for &(start, width) in &mask.freq_masks {
        for m in start..start + width {
            for t in 0..spec.n_frames() {
                *out.at_mut(m, t) = fill;
            }
        }
    }
    for &(start, width) in &mask.time_masks {
        for t in start..start + width {
            for m in 0..spec.n_mels() {
                *out.at_mut(m, t) = fill;
            }
        }
    }
    Ok(out)
}
