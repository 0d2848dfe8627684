//! Minimal RIFF/WAVE reader and writer.
//!
//! Reads PCM 16-bit LE and IEEE float32, mono or multichannel (channels are
//! averaged to mono). Compressed encodings are rejected with the offending
//! format tag in the diagnostic.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{SignalError, Waveform};
use crate::Scalar;

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

/// Sample encoding for [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Pcm16,
    Float32,
}

fn read_u16(b: &[u8], off: usize) -> Result<u16, SignalError> {
    b.get(off..off + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| SignalError::WavMalformed("truncated chunk".into()))
}

fn read_u32(b: &[u8], off: usize) -> Result<u32, SignalError> {
    b.get(off..off + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| SignalError::WavMalformed("truncated chunk".into()))
}

/// Reads a WAV file into a mono waveform. Integer samples are scaled to
/// [-1, 1); multichannel input is averaged across channels.
pub fn read_wav<S: Scalar>(path: impl AsRef<Path>) -> Result<Waveform<S>, SignalError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            SignalError::WavMissing(path.display().to_string())
        } else {
            SignalError::WavIo(e)
        }
    })?;

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(SignalError::WavMalformed(
            "missing RIFF/WAVE signature".into(),
        ));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // tag, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut off = 12usize;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = read_u32(&bytes, off + 4)? as usize;
        let body_start = off + 8;
        if body_start + size > bytes.len() {
            return Err(SignalError::WavMalformed("chunk overruns file".into()));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(SignalError::WavMalformed("fmt chunk too small".into()));
                }
                fmt = Some((
                    read_u16(&bytes, body_start)?,
                    read_u16(&bytes, body_start + 2)?,
                    read_u32(&bytes, body_start + 4)?,
                    read_u16(&bytes, body_start + 14)?,
                ));
            }
            b"data" => data = Some(&bytes[body_start..body_start + size]),
            _ => {}
        }
        // chunks are word-aligned
        off = body_start + size + (size & 1);
    }

    let (tag, channels, rate, bits) =
        fmt.ok_or_else(|| SignalError::WavMalformed("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| SignalError::WavMalformed("no data chunk".into()))?;
    if channels == 0 {
        return Err(SignalError::WavMalformed("zero channels".into()));
    }
    if rate == 0 {
        return Err(SignalError::WavMalformed("zero sample rate".into()));
    }

    let decode_frames = |bytes_per_sample: usize,
                         decode: &dyn Fn(&[u8]) -> f64|
     -> Vec<S> {
        let frame_bytes = bytes_per_sample * channels as usize;
        let n_frames = data.len() / frame_bytes;
        let inv_ch = 1.0 / channels as f64;
        (0..n_frames)
            .map(|f| {
                let mut acc = 0.0f64;
                for c in 0..channels as usize {
                    let start = f * frame_bytes + c * bytes_per_sample;
                    acc += decode(&data[start..start + bytes_per_sample]);
                }
                S::from_f64_c(acc * inv_ch)
            })
            .collect()
    };

    let samples: Vec<S> = match (tag, bits) {
        (FORMAT_PCM, 16) => decode_frames(2, &|b| {
            i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0
        }),
        (FORMAT_IEEE_FLOAT, 32) => decode_frames(4, &|b| {
            f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64
        }),
        _ => {
            return Err(SignalError::WavUnsupported {
                format_tag: tag,
                bits,
            })
        }
    };

    if samples.is_empty() {
        return Err(SignalError::WavMalformed("empty data chunk".into()));
    }
    Waveform::new(samples, rate)
}

/// Writes a mono WAV file in the requested encoding. PCM samples are
/// clamped to [-1, 1] before quantization.
pub fn write_wav<S: Scalar>(
    path: impl AsRef<Path>,
    w: &Waveform<S>,
    encoding: WavEncoding,
) -> Result<(), SignalError> {
    let (tag, bits): (u16, u16) = match encoding {
        WavEncoding::Pcm16 => (FORMAT_PCM, 16),
        WavEncoding::Float32 => (FORMAT_IEEE_FLOAT, 32),
    };
    let bytes_per_sample = (bits / 8) as u32;
    let data_len = w.len() as u32 * bytes_per_sample;
    let rate = w.sample_rate();

    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * bytes_per_sample).to_le_bytes());
    out.extend_from_slice(&(bytes_per_sample as u16).to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in w.samples() {
        let v = s.to_f64().unwrap_or(0.0);
        match encoding {
            WavEncoding::Pcm16 => {
                let q = (v.clamp(-1.0, 1.0) * 32767.0).round() as i16;
                out.extend_from_slice(&q.to_le_bytes());
            }
            WavEncoding::Float32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }

    let mut file = fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}
