//! Wavetable oscillators: table construction, lookup synthesis, frequency
//! glides and amplitude fades.
//!
//! Synthesis walks a single-period table with a real-valued phase index that
//! is floored to pick a sample (truncation lookup, no interpolation). A note
//! at frequency `f` advances the index by `f * len / rate` per sample, so the
//! table is traversed `f` times per second regardless of its length.

use crate::buffer::{duration_to_samples, Decibels, SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// Table length used when no explicit resolution is requested.
pub const DEFAULT_TABLE_LEN: usize = 1024;

/// Built-in single-period shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveShape {
    Sine,
    Sawtooth,
    Triangle,
    Square,
}

impl std::str::FromStr for WaveShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(WaveShape::Sine),
            "sawtooth" => Ok(WaveShape::Sawtooth),
            "triangle" => Ok(WaveShape::Triangle),
            "square" => Ok(WaveShape::Square),
            other => Err(Error::invalid(format!("unknown wave shape '{other}'"))),
        }
    }
}

/// Provenance tag kept on a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableShape {
    Sine,
    Sawtooth,
    Triangle,
    Square,
    Sampled,
}

/// One period of a waveform, used as a lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTable {
    samples: Vec<f64>,
    shape: TableShape,
}

impl WaveTable {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least two samples
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn shape(&self) -> TableShape {
        self.shape
    }

    /// Largest absolute sample in the table.
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }

    #[inline]
    pub(crate) fn at(&self, index: i64) -> f64 {
        let n = self.samples.len() as i64;
        self.samples[index.rem_euclid(n) as usize]
    }
}

/// Build one period of a built-in shape with `table_len` samples.
pub fn build_wavetable(shape: WaveShape, table_len: usize) -> Result<WaveTable> {
    if table_len < 2 {
        return Err(Error::invalid(format!(
            "wavetable length {table_len} below 2"
        )));
    }
    let n = table_len as f64;
    let samples: Vec<f64> = (0..table_len)
        .map(|i| {
            let i = i as f64;
            match shape {
                WaveShape::Sine => (TAU * i / n).sin(),
                WaveShape::Sawtooth => 2.0 * i / n - 1.0,
                WaveShape::Triangle => 1.0 - (2.0 - 4.0 * i / n).abs(),
                WaveShape::Square => {
                    if i < n / 2.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            }
        })
        .collect();
    let shape = match shape {
        WaveShape::Sine => TableShape::Sine,
        WaveShape::Sawtooth => TableShape::Sawtooth,
        WaveShape::Triangle => TableShape::Triangle,
        WaveShape::Square => TableShape::Square,
    };
    Ok(WaveTable { samples, shape })
}

/// Use one recorded period directly as a table.
pub fn from_sampled_period(samples: Vec<f64>) -> Result<WaveTable> {
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "sampled period of {} samples, need at least 2",
            samples.len()
        )));
    }
    if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite sample at index {pos} in sampled period"
        )));
    }
    Ok(WaveTable {
        samples,
        shape: TableShape::Sampled,
    })
}

/// Neumaier-compensated running sum.
///
/// Phase accumulation must not drift: summing a constant increment `n` times
/// has to agree, after flooring, with the direct product `n * inc`. Plain
/// `f64` accumulation drifts by roughly `n * ulp` which is enough to flip a
/// floor result; the compensated sum stays within one rounding of the exact
/// value.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PhaseAccumulator {
    sum: f64,
    compensation: f64,
}

impl PhaseAccumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_frequency(f: f64, rate: SampleRate, what: &str) -> Result<()> {
    if !f.is_finite() || f <= 0.0 || f >= rate.nyquist() {
        return Err(Error::invalid(format!(
            "{what} {f} Hz outside (0, {})",
            rate.nyquist()
        )));
    }
    Ok(())
}

/// Core lookup loop for anything with a per-sample frequency: sample `i`
/// reads the table at the floored accumulated phase, then the phase advances
/// by `freq_at(i) * len / rate`. A constant `freq_at` therefore reproduces
/// [`synth_note`] sample for sample.
pub(crate) fn synth_with_freq<F: FnMut(usize) -> f64>(
    table: &WaveTable,
    n: usize,
    rate: SampleRate,
    mut freq_at: F,
) -> Vec<f64> {
    let len = table.len() as f64;
    let rate_f = rate.as_f64();
    let mut phase = PhaseAccumulator::default();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        samples.push(table.at(phase.value().floor() as i64));
        phase.add(freq_at(i) * len / rate_f);
    }
    samples
}

/// Fixed-frequency note: `delta` seconds of the table played at `f` Hz.
///
/// Sample `i` reads the table at index `floor(i * f * len / rate) % len`.
pub fn synth_note(
    table: &WaveTable,
    f: f64,
    delta: f64,
    rate: SampleRate,
) -> Result<SampleBuffer> {
    check_frequency(f, rate, "note frequency")?;
    let n = duration_to_samples(delta, rate)?;
    let stride = f * table.len() as f64 / rate.as_f64();
    let samples: Vec<f64> = (0..n)
        .map(|i| table.at((i as f64 * stride).floor() as i64))
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(rate, vec![samples]))
}

/// How a glide interpolates between its endpoint frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlideMode {
    Linear,
    Exponential,
}

/// A frequency ramp from `f_start` to `f_end` over the note's duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlideSpec {
    pub f_start: f64,
    pub f_end: f64,
    pub mode: GlideMode,
}

/// Gliding note: the per-sample frequency follows the spec's ramp and the
/// phase index is the floored running sum of the per-sample increments.
///
/// The increment applied between samples `i` and `i+1` uses the frequency at
/// sample `i`, so a constant ramp reproduces [`synth_note`] sample for
/// sample.
pub fn synth_glide(
    table: &WaveTable,
    glide: &GlideSpec,
    delta: f64,
    rate: SampleRate,
) -> Result<SampleBuffer> {
    check_frequency(glide.f_start, rate, "glide start frequency")?;
    check_frequency(glide.f_end, rate, "glide end frequency")?;
    let n = duration_to_samples(delta, rate)?;
    let span = n.saturating_sub(1) as f64;
    let freq_at = |i: usize| -> f64 {
        if n <= 1 {
            return glide.f_start;
        }
        let t = i as f64 / span;
        match glide.mode {
            GlideMode::Linear => glide.f_start + (glide.f_end - glide.f_start) * t,
            GlideMode::Exponential => glide.f_start * (glide.f_end / glide.f_start).powf(t),
        }
    };
    let samples = synth_with_freq(table, n, rate, freq_at);
    Ok(SampleBuffer::from_channels_unchecked(rate, vec![samples]))
}

/// Fade the buffer along a decibel ramp: sample `i` is scaled by
/// `10^((v/20) * (i/(n-1))^alpha)`.
///
/// `alpha` bends the ramp: 1 is a straight line in dB, larger values hold
/// the start level longer.
pub fn amp_transition(buf: &SampleBuffer, v: Decibels, alpha: f64) -> Result<SampleBuffer> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::invalid(format!("transition exponent {alpha}")));
    }
    if !v.value().is_finite() {
        return Err(Error::invalid("non-finite transition level".to_string()));
    }
    let n = buf.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "amplitude transition needs at least 2 samples, got {n}"
        )));
    }
    let span = (n - 1) as f64;
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(i, s)| s * 10f64.powf(v.value() / 20.0 * (i as f64 / span).powf(alpha)))
                .collect()
        })
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(buf.rate(), channels))
}

/// Fade with a straight-line amplitude ramp from `a_start` to `a_end`.
pub fn amp_transition_linear(
    buf: &SampleBuffer,
    a_start: f64,
    a_end: f64,
) -> Result<SampleBuffer> {
    if !a_start.is_finite() || !a_end.is_finite() {
        return Err(Error::invalid("non-finite ramp endpoint".to_string()));
    }
    let n = buf.len();
    if n == 0 {
        return Ok(buf.clone());
    }
    let span = n.saturating_sub(1).max(1) as f64;
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(i, s)| s * (a_start + (a_end - a_start) * i as f64 / span))
                .collect()
        })
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(buf.rate(), channels))
}
