//! 16-bit PCM WAVE files.
//!
//! Byte layout written here, and accepted back, is the canonical RIFF form:
//!
//! ```text
//! offset 0   "RIFF"            4 bytes
//! offset 4   riff size         u32 LE, file length - 8
//! offset 8   "WAVE"            4 bytes
//! offset 12  "fmt " chunk      size 16, PCM format tag 1, channel count,
//!            sample rate, byte rate, block align, 16 bits per sample
//! offset 36  "data" chunk      size, then interleaved i16 LE frames
//! ```
//!
//! Readers skip unknown chunks (word-aligned), so files with extra metadata
//! still load. Quantization maps a sample `s` to `round(s * 32767)` clamped
//! into `[-32768, 32767]`; reading divides by 32767, which makes
//! write-read-write produce identical bytes from the first write onward and
//! bounds the round-trip error by half a quantization step.

use std::fs;
use std::path::Path;

use crate::buffer::{SampleBuffer, SampleRate};
use crate::error::{Error, Result};

const FULL_SCALE: f64 = 32767.0;

/// An in-memory 16-bit PCM file: header fields plus interleaved samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavFile {
    rate: u32,
    channels: u16,
    samples: Vec<i16>,
    clipped: usize,
}

impl WavFile {
    pub const BIT_DEPTH: u16 = 16;

    /// Quantize a buffer. Samples outside `[-1, 1]` are clamped and counted
    /// in [`WavFile::clipped`]; a NaN anywhere is an error since it has no
    /// meaningful quantization.
    pub fn from_buffer(buf: &SampleBuffer) -> Result<WavFile> {
        let channels = buf.channel_count();
        let frames = buf.len();
        let mut samples = Vec::with_capacity(frames * channels);
        let mut clipped = 0usize;
        for i in 0..frames {
            for ch in buf.channels() {
                let s = ch[i];
                if s.is_nan() {
                    return Err(Error::invalid("cannot quantize NaN sample"));
                }
                if s.abs() > 1.0 {
                    clipped += 1;
                }
                let q = (s * FULL_SCALE).round().clamp(-32768.0, 32767.0);
                samples.push(q as i16);
            }
        }
        Ok(WavFile {
            rate: buf.rate().value(),
            channels: channels as u16,
            samples,
            clipped,
        })
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    /// Sample frames per channel.
    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    /// Interleaved quantized samples.
    pub fn samples(&self) -> &[i16] {
        &self.samples
    }

    /// How many input samples fell outside `[-1, 1]` during quantization.
    /// Zero for files read from disk.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    /// Back to floating point, dividing by full scale.
    pub fn to_buffer(&self) -> Result<SampleBuffer> {
        let rate = SampleRate::new(self.rate)?;
        let nch = self.channels as usize;
        let frames = self.frames();
        let mut channels = vec![Vec::with_capacity(frames); nch];
        for (i, &q) in self.samples.iter().enumerate() {
            channels[i % nch].push(q as f64 / FULL_SCALE);
        }
        SampleBuffer::from_channels(rate, channels)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let block_align = self.channels as u32 * 2;
        let data_len = (self.samples.len() * 2) as u32;
        let mut out = Vec::with_capacity(44 + data_len as usize);
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(36 + data_len).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&self.channels.to_le_bytes());
        out.extend_from_slice(&self.rate.to_le_bytes());
        out.extend_from_slice(&(self.rate * block_align).to_le_bytes());
        out.extend_from_slice(&(block_align as u16).to_le_bytes());
        out.extend_from_slice(&Self::BIT_DEPTH.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&data_len.to_le_bytes());
        for &q in &self.samples {
            out.extend_from_slice(&q.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<WavFile> {
        let tag = |offset: usize, expect: &[u8; 4], what: &str| -> Result<()> {
            let got = bytes
                .get(offset..offset + 4)
                .ok_or_else(|| Error::wav_parse(offset, format!("file ends inside {what} tag")))?;
            if got != expect {
                return Err(Error::wav_parse(offset, format!("bad {what} tag")));
            }
            Ok(())
        };
        let u32_at = |offset: usize, what: &str| -> Result<u32> {
            bytes
                .get(offset..offset + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(|| Error::wav_parse(offset, format!("file ends inside {what}")))
        };
        let u16_at = |offset: usize, what: &str| -> Result<u16> {
            bytes
                .get(offset..offset + 2)
                .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(|| Error::wav_parse(offset, format!("file ends inside {what}")))
        };

        tag(0, b"RIFF", "RIFF")?;
        tag(8, b"WAVE", "WAVE")?;

        let mut offset = 12usize;
        let mut format: Option<(u16, u16, u32, u16)> = None;
        loop {
            let id_off = offset;
            let id = bytes
                .get(offset..offset + 4)
                .ok_or_else(|| Error::wav_parse(id_off, "no data chunk before end of file"))?;
            let size = u32_at(offset + 4, "chunk size")? as usize;
            let body = offset + 8;
            match id {
                b"fmt " => {
                    if size < 16 {
                        return Err(Error::wav_parse(offset + 4, "fmt chunk too short"));
                    }
                    let audio_format = u16_at(body, "format tag")?;
                    if audio_format != 1 {
                        return Err(Error::wav_parse(
                            body,
                            format!("unsupported codec {audio_format}, only PCM (1)"),
                        ));
                    }
                    let channels = u16_at(body + 2, "channel count")?;
                    let rate = u32_at(body + 4, "sample rate")?;
                    let bits = u16_at(body + 14, "bit depth")?;
                    if bits != Self::BIT_DEPTH {
                        return Err(Error::wav_parse(
                            body + 14,
                            format!("unsupported bit depth {bits}, only 16"),
                        ));
                    }
                    if channels == 0 || channels > 2 {
                        return Err(Error::wav_parse(
                            body + 2,
                            format!("unsupported channel count {channels}, only mono or stereo"),
                        ));
                    }
                    format = Some((audio_format, channels, rate, bits));
                }
                b"data" => {
                    let (_, channels, rate, _) = format.ok_or_else(|| {
                        Error::wav_parse(id_off, "data chunk before fmt chunk")
                    })?;
                    let data = bytes.get(body..body + size).ok_or_else(|| {
                        Error::wav_parse(body, "data chunk truncated")
                    })?;
                    let block_align = channels as usize * 2;
                    if size % block_align != 0 {
                        return Err(Error::wav_parse(
                            offset + 4,
                            "data length is not a whole number of frames",
                        ));
                    }
                    let samples = data
                        .chunks_exact(2)
                        .map(|b| i16::from_le_bytes([b[0], b[1]]))
                        .collect();
                    return Ok(WavFile {
                        rate,
                        channels,
                        samples,
                        clipped: 0,
                    });
                }
                _ => {
                    if bytes.get(body..body + size).is_none() {
                        return Err(Error::wav_parse(body, "chunk truncated"));
                    }
                }
            }
            // Chunks are word aligned; odd sizes carry a pad byte.
            offset = body + size + (size & 1);
        }
    }

    pub fn write<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read<P: AsRef<Path>>(path: P) -> Result<WavFile> {
        WavFile::from_bytes(&fs::read(path)?)
    }
}

/// Quantize and write a buffer in one step, returning the written file
/// (check [`WavFile::clipped`] for how many samples were clamped).
pub fn write_wav<P: AsRef<Path>>(buf: &SampleBuffer, path: P) -> Result<WavFile> {
    let file = WavFile::from_buffer(buf)?;
    file.write(path)?;
    Ok(file)
}

/// Read a 16-bit PCM file back into a float buffer.
pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<SampleBuffer> {
    WavFile::read(path)?.to_buffer()
}
