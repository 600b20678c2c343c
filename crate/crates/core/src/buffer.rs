//! PCM sample buffers and the duration/power/decibel arithmetic on them.
//!
//! Samples are `f64` throughout; quantization to 16 bits happens only at WAV
//! export. A buffer holds one or two channels of equal length plus the rate
//! they were sampled at. Channel 0 is the left channel of a stereo pair.

use crate::error::{Error, Result};

/// Samples per second. Defaults to CD rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleRate(u32);

impl SampleRate {
    pub const CD: SampleRate = SampleRate(44_100);

    /// Rates below 2 Hz leave no room for any oscillation.
    pub fn new(hz: u32) -> Result<Self> {
        if hz < 2 {
            return Err(Error::invalid(format!("sample rate {hz} below 2 Hz")));
        }
        Ok(SampleRate(hz))
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// Highest representable frequency, rate/2.
    pub fn nyquist(self) -> f64 {
        self.as_f64() / 2.0
    }
}

impl Default for SampleRate {
    fn default() -> Self {
        SampleRate::CD
    }
}

/// A level expressed in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decibels(pub f64);

impl Decibels {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Amplitude gain corresponding to this level: `10^(dB/20)`.
    pub fn gain(self) -> f64 {
        db_to_gain(self)
    }
}

impl From<f64> for Decibels {
    fn from(v: f64) -> Self {
        Decibels(v)
    }
}

/// One or two channels of finite `f64` samples at a common rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    rate: SampleRate,
    channels: Vec<Vec<f64>>,
}

impl SampleBuffer {
    pub fn from_mono(rate: SampleRate, samples: Vec<f64>) -> Result<Self> {
        check_finite(&samples)?;
        Ok(SampleBuffer {
            rate,
            channels: vec![samples],
        })
    }

    pub fn from_stereo(rate: SampleRate, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::invalid(format!(
                "stereo channels differ in length: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        check_finite(&left)?;
        check_finite(&right)?;
        Ok(SampleBuffer {
            rate,
            channels: vec![left, right],
        })
    }

    /// General constructor: one or two equal-length channels.
    pub fn from_channels(rate: SampleRate, channels: Vec<Vec<f64>>) -> Result<Self> {
        match channels.len() {
            1 => {
                let mut it = channels.into_iter();
                Self::from_mono(rate, it.next().unwrap())
            }
            2 => {
                let mut it = channels.into_iter();
                Self::from_stereo(rate, it.next().unwrap(), it.next().unwrap())
            }
            n => Err(Error::invalid(format!("buffers hold 1 or 2 channels, not {n}"))),
        }
    }

    pub fn empty(rate: SampleRate) -> Self {
        SampleBuffer {
            rate,
            channels: vec![Vec::new()],
        }
    }

    pub fn rate(&self) -> SampleRate {
        self.rate
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, i: usize) -> &[f64] {
        &self.channels[i]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.rate.as_f64()
    }

    /// Borrow the single channel of a mono buffer.
    pub fn mono(&self) -> Result<&[f64]> {
        if self.channel_count() != 1 {
            return Err(Error::invalid(
                "operation requires a mono buffer".to_string(),
            ));
        }
        Ok(&self.channels[0])
    }

    /// New buffer with every sample multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<SampleBuffer> {
        if !k.is_finite() {
            return Err(Error::invalid(format!("scale factor {k} not finite")));
        }
        Ok(SampleBuffer {
            rate: self.rate,
            channels: self
                .channels
                .iter()
                .map(|ch| ch.iter().map(|s| s * k).collect())
                .collect(),
        })
    }

    pub(crate) fn from_channels_unchecked(rate: SampleRate, channels: Vec<Vec<f64>>) -> Self {
        debug_assert!(!channels.is_empty() && channels.len() <= 2);
        debug_assert!(channels.windows(2).all(|w| w[0].len() == w[1].len()));
        SampleBuffer { rate, channels }
    }
}

fn check_finite(samples: &[f64]) -> Result<()> {
    if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite sample {} at index {pos}",
            samples[pos]
        )));
    }
    Ok(())
}

/// Number of whole samples in `delta` seconds: floor(delta * rate).
///
/// Products that land within a hair of an integer (rational durations like
/// 1/3 s at 44.1 kHz dip just below the true value in `f64`) snap to it
/// before flooring.
pub fn duration_to_samples(delta: f64, rate: SampleRate) -> Result<usize> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::invalid(format!("duration {delta} s")));
    }
    let x = delta * rate.as_f64();
    let nearest = x.round();
    let snapped = if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.floor()
    };
    Ok(snapped as usize)
}

/// Mean squared sample value, one entry per channel.
pub fn power(buf: &SampleBuffer) -> Result<Vec<f64>> {
    if buf.is_empty() {
        return Err(Error::invalid("power of an empty buffer".to_string()));
    }
    let n = buf.len() as f64;
    Ok(buf
        .channels()
        .iter()
        .map(|ch| ch.iter().map(|s| s * s).sum::<f64>() / n)
        .collect())
}

fn mean_power(buf: &SampleBuffer) -> Result<f64> {
    let p = power(buf)?;
    Ok(p.iter().sum::<f64>() / p.len() as f64)
}

/// Level of `a` relative to `b`: `10 log10(pow(a) / pow(b))`.
///
/// Stereo buffers contribute the mean of their channel powers.
pub fn db_difference(a: &SampleBuffer, b: &SampleBuffer) -> Result<Decibels> {
    let pa = mean_power(a)?;
    let pb = mean_power(b)?;
    if pb == 0.0 {
        return Err(Error::degenerate(
            "reference buffer has zero power".to_string(),
        ));
    }
    Ok(Decibels(10.0 * (pa / pb).log10()))
}

/// Amplitude gain for a level change of `v` dB: `10^(v/20)`.
pub fn db_to_gain(v: Decibels) -> f64 {
    10f64.powf(v.0 / 20.0)
}

/// Sample-wise sum. Shorter inputs are zero-padded to the longest.
///
/// All inputs must share rate and channel count. An empty input list yields
/// an empty mono buffer at the default rate.
pub fn mix(bufs: &[SampleBuffer]) -> Result<SampleBuffer> {
    let Some(first) = bufs.first() else {
        return Ok(SampleBuffer::empty(SampleRate::default()));
    };
    check_uniform(bufs)?;
    let out_len = bufs.iter().map(SampleBuffer::len).max().unwrap_or(0);
    let mut channels = vec![vec![0.0; out_len]; first.channel_count()];
    for buf in bufs {
        for (acc, ch) in channels.iter_mut().zip(buf.channels()) {
            for (a, s) in acc.iter_mut().zip(ch) {
                *a += s;
            }
        }
    }
    Ok(SampleBuffer::from_channels_unchecked(first.rate, channels))
}

/// Buffers joined end to end, in order.
pub fn concat(bufs: &[SampleBuffer]) -> Result<SampleBuffer> {
    let Some(first) = bufs.first() else {
        return Ok(SampleBuffer::empty(SampleRate::default()));
    };
    check_uniform(bufs)?;
    let mut channels = vec![Vec::new(); first.channel_count()];
    for buf in bufs {
        for (acc, ch) in channels.iter_mut().zip(buf.channels()) {
            acc.extend_from_slice(ch);
        }
    }
    Ok(SampleBuffer::from_channels_unchecked(first.rate, channels))
}

fn check_uniform(bufs: &[SampleBuffer]) -> Result<()> {
    let first = &bufs[0];
    for (i, buf) in bufs.iter().enumerate().skip(1) {
        if buf.rate != first.rate {
            return Err(Error::invalid(format!(
                "buffer {i} rate {} differs from {}",
                buf.rate.value(),
                first.rate.value()
            )));
        }
        if buf.channel_count() != first.channel_count() {
            return Err(Error::invalid(format!(
                "buffer {i} has {} channels, expected {}",
                buf.channel_count(),
                first.channel_count()
            )));
        }
    }
    Ok(())
}

/// Rescale so the largest absolute sample equals `peak`.
pub fn normalize(buf: &SampleBuffer, peak: f64) -> Result<SampleBuffer> {
    if !peak.is_finite() || peak <= 0.0 {
        return Err(Error::invalid(format!("normalization peak {peak}")));
    }
    let max = buf
        .channels()
        .iter()
        .flat_map(|ch| ch.iter())
        .fold(0.0f64, |m, s| m.max(s.abs()));
    if max == 0.0 {
        return Err(Error::degenerate("cannot normalize silence".to_string()));
    }
    buf.scaled(peak / max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(samples: &[f64]) -> SampleBuffer {
        SampleBuffer::from_mono(SampleRate::default(), samples.to_vec()).unwrap()
    }

    #[test]
    fn duration_whole_and_fractional_seconds() {
        let r = SampleRate::default();
        assert_eq!(duration_to_samples(1.0, r).unwrap(), 44_100);
        assert_eq!(duration_to_samples(1.0 / 3.0, r).unwrap(), 14_700);
        assert_eq!(duration_to_samples(0.0, r).unwrap(), 0);
        assert_eq!(duration_to_samples(0.1, r).unwrap(), 4_410);
        assert!(duration_to_samples(-0.5, r).is_err());
        assert!(duration_to_samples(f64::NAN, r).is_err());
    }

    #[test]
    fn sample_rate_bounds() {
        assert!(SampleRate::new(1).is_err());
        assert_eq!(SampleRate::new(8000).unwrap().value(), 8000);
        assert_eq!(SampleRate::default().nyquist(), 22_050.0);
    }

    #[test]
    fn power_of_constant_ones() {
        assert_eq!(power(&mono(&[1.0; 8])).unwrap(), vec![1.0]);
    }

    #[test]
    fn power_of_full_cycle_sine_is_half() {
        let n = 1000;
        let s: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::TAU * i as f64 / n as f64).sin())
            .collect();
        let p = power(&mono(&s)).unwrap()[0];
        assert!((p - 0.5).abs() < 1e-12, "power {p}");
    }

    #[test]
    fn power_scales_quadratically() {
        let x = mono(&[0.3, -0.7, 0.2, 0.9]);
        let y = x.scaled(2.0).unwrap();
        let px = power(&x).unwrap()[0];
        let py = power(&y).unwrap()[0];
        assert!((py - 4.0 * px).abs() < 1e-12);
    }

    #[test]
    fn power_of_empty_buffer_fails() {
        assert!(power(&SampleBuffer::empty(SampleRate::default())).is_err());
    }

    #[test]
    fn db_of_doubled_amplitude() {
        let x = mono(&[0.1, -0.4, 0.3, 0.8, -0.2]);
        let y = x.scaled(2.0).unwrap();
        let db = db_difference(&y, &x).unwrap().value();
        assert!((db - 6.0206).abs() < 1e-4, "got {db}");
    }

    #[test]
    fn db_of_sqrt_ten_gain_is_ten() {
        let x = mono(&[0.5, -0.5, 0.25]);
        let y = x.scaled(10f64.sqrt()).unwrap();
        let db = db_difference(&y, &x).unwrap().value();
        assert!((db - 10.0).abs() < 1e-9);
    }

    #[test]
    fn db_against_silence_fails() {
        let x = mono(&[0.5]);
        let z = mono(&[0.0]);
        assert!(matches!(
            db_difference(&x, &z),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn gain_for_ten_db() {
        let g = db_to_gain(Decibels(10.0));
        assert!((g - 3.16228).abs() < 1e-5);
        assert!((db_to_gain(Decibels(0.0)) - 1.0).abs() < 1e-15);
        assert!((db_to_gain(Decibels(-6.0206)) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn mix_pads_shorter_inputs() {
        let out = mix(&[mono(&[1.0, 2.0]), mono(&[3.0, 4.0])]).unwrap();
        assert_eq!(out.channel(0), &[4.0, 6.0]);
        let out = mix(&[mono(&[1.0]), mono(&[1.0, 1.0])]).unwrap();
        assert_eq!(out.channel(0), &[2.0, 1.0]);
    }

    #[test]
    fn mix_of_single_buffer_is_identity() {
        let x = mono(&[0.25, -0.5]);
        assert_eq!(mix(std::slice::from_ref(&x)).unwrap(), x);
    }

    #[test]
    fn mix_rejects_rate_mismatch() {
        let a = mono(&[1.0]);
        let b = SampleBuffer::from_mono(SampleRate::new(22_050).unwrap(), vec![1.0]).unwrap();
        assert!(mix(&[a, b]).is_err());
    }

    #[test]
    fn mix_rejects_channel_mismatch() {
        let a = mono(&[1.0]);
        let b = SampleBuffer::from_stereo(SampleRate::default(), vec![1.0], vec![1.0]).unwrap();
        assert!(mix(&[a, b]).is_err());
    }

    #[test]
    fn concat_joins_in_order() {
        let out = concat(&[mono(&[1.0, 2.0]), mono(&[3.0])]).unwrap();
        assert_eq!(out.channel(0), &[1.0, 2.0, 3.0]);
        assert!(concat(&[]).unwrap().is_empty());
    }

    #[test]
    fn concat_duration_adds() {
        let a = mono(&[0.0; 441]);
        let b = mono(&[0.0; 882]);
        let out = concat(&[a, b]).unwrap();
        assert!((out.duration_secs() - 0.03).abs() < 1e-12);
    }

    #[test]
    fn normalize_hits_requested_peak() {
        let out = normalize(&mono(&[3.0, -4.0]), 1.0).unwrap();
        assert_eq!(out.channel(0), &[0.75, -1.0]);
        let out = normalize(&mono(&[0.1, -0.05]), 0.5).unwrap();
        assert_eq!(out.channel(0), &[0.5, -0.25]);
    }

    #[test]
    fn normalize_rejects_silence_and_bad_peak() {
        assert!(matches!(
            normalize(&mono(&[0.0, 0.0]), 1.0),
            Err(Error::DegenerateSignal(_))
        ));
        assert!(normalize(&mono(&[1.0]), 0.0).is_err());
        assert!(normalize(&mono(&[1.0]), f64::INFINITY).is_err());
    }

    #[test]
    fn buffers_reject_non_finite_samples() {
        assert!(SampleBuffer::from_mono(SampleRate::default(), vec![0.0, f64::NAN]).is_err());
        assert!(SampleBuffer::from_stereo(SampleRate::default(), vec![0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn stereo_power_is_per_channel() {
        let b = SampleBuffer::from_stereo(SampleRate::default(), vec![1.0, 1.0], vec![2.0, 2.0])
            .unwrap();
        assert_eq!(power(&b).unwrap(), vec![1.0, 4.0]);
    }
}
