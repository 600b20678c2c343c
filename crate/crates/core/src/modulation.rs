//! Periodic modulation of pitch and level, plus envelopes.
//!
//! A modulator is an [`OscillatorPattern`]: any wavetable read at its own
//! rate. Vibrato bends the carrier's per-sample frequency by a semitone
//! depth, tremolo scales the level in dB, FM adds a frequency deviation in
//! Hz, AM multiplies by `1 + alpha * modulator`. Zero-depth versions of all
//! four are exact identities, not approximate ones; tests rely on that.

use crate::buffer::{duration_to_samples, Decibels, SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use crate::osc::{self, build_wavetable, WaveShape, WaveTable};
use std::f64::consts::{PI, TAU};

/// Default modulator table length.
pub const DEFAULT_PATTERN_LEN: usize = 1024;

/// A modulation waveform: a table cycled at `freq` Hz.
#[derive(Debug, Clone)]
pub struct OscillatorPattern {
    table: WaveTable,
    freq: f64,
}

impl OscillatorPattern {
    pub fn new(table: WaveTable, freq: f64) -> Result<Self> {
        if !(freq > 0.0 && freq.is_finite()) {
            return Err(Error::invalid(format!("modulator frequency {freq} Hz")));
        }
        Ok(OscillatorPattern { table, freq })
    }

    /// The everyday modulator: a sine table at `freq` Hz.
    pub fn sine(freq: f64) -> Result<Self> {
        Self::new(build_wavetable(WaveShape::Sine, DEFAULT_PATTERN_LEN)?, freq)
    }

    pub fn table(&self) -> &WaveTable {
        &self.table
    }

    pub fn freq(&self) -> f64 {
        self.freq
    }

    /// Modulator value at sample `i`: the table read at
    /// `floor(i * freq * len / rate) % len`.
    pub fn value_at(&self, i: usize, rate: SampleRate) -> f64 {
        let stride = self.freq * self.table.len() as f64 / rate.as_f64();
        self.table.at((i as f64 * stride).floor() as i64)
    }
}

/// Pitch modulation with depth `nu` in semitones: the carrier's per-sample
/// frequency is `f * 2^(modulator * nu / 12)`, fed through the accumulated
/// table lookup. `nu = 0` returns exactly what [`osc::synth_note`] would.
pub fn vibrato(
    table: &WaveTable,
    f: f64,
    delta: f64,
    rate: SampleRate,
    pattern: &OscillatorPattern,
    nu: f64,
) -> Result<SampleBuffer> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!("vibrato depth {nu} semitones")));
    }
    let peak = f * 2f64.powf(nu / 12.0);
    if !(f > 0.0) || peak >= rate.nyquist() {
        return Err(Error::invalid(format!(
            "vibrato peak frequency {peak} Hz outside (0, {})",
            rate.nyquist()
        )));
    }
    let n = duration_to_samples(delta, rate)?;
    let samples = osc::synth_with_freq(table, n, rate, |i| {
        f * 2f64.powf(pattern.value_at(i, rate) * nu / 12.0)
    });
    Ok(SampleBuffer::from_channels_unchecked(rate, vec![samples]))
}

/// Level modulation with depth `v` in dB: sample `i` is scaled by
/// `10^(modulator_i * v / 20)`. `v = 0` is the identity.
pub fn tremolo(
    buf: &SampleBuffer,
    pattern: &OscillatorPattern,
    v: Decibels,
) -> Result<SampleBuffer> {
    if !v.value().is_finite() {
        return Err(Error::invalid(format!("tremolo depth {} dB", v.value())));
    }
    let rate = buf.rate();
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(i, &s)| s * 10f64.powf(pattern.value_at(i, rate) * v.value() / 20.0))
                .collect()
        })
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(rate, channels))
}

/// Amplitude modulation by a pure sine: `t_i * (1 + alpha * sin(2 pi f_mod
/// i / rate))`. For a sine carrier this puts sidebands at `f +- f_mod` with
/// amplitude `alpha / 2` of the carrier.
pub fn am(buf: &SampleBuffer, f_mod: f64, alpha: f64) -> Result<SampleBuffer> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("modulation index {alpha}")));
    }
    if !(f_mod > 0.0) || f_mod >= buf.rate().nyquist() {
        return Err(Error::invalid(format!(
            "modulator frequency {f_mod} Hz outside (0, {})",
            buf.rate().nyquist()
        )));
    }
    let rate = buf.rate().as_f64();
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(i, &s)| s * (1.0 + alpha * (TAU * f_mod * i as f64 / rate).sin()))
                .collect()
        })
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(buf.rate(), channels))
}

/// Amplitude modulation by an arbitrary pattern: `t_i * (1 + alpha *
/// modulator_i)`.
pub fn am_with_pattern(
    buf: &SampleBuffer,
    pattern: &OscillatorPattern,
    alpha: f64,
) -> Result<SampleBuffer> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("modulation index {alpha}")));
    }
    let rate = buf.rate();
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            ch.iter()
                .enumerate()
                .map(|(i, &s)| s * (1.0 + alpha * pattern.value_at(i, rate)))
                .collect()
        })
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(rate, channels))
}

/// Frequency modulation in deviation form with an arbitrary modulator:
/// per-sample frequency `f + mu * modulator_i`. For a sinusoidal modulator
/// the sidebands at `f + k * f_mod` carry Bessel amplitudes of index
/// `beta = mu / f_mod`.
pub fn fm_with_pattern(
    table: &WaveTable,
    f: f64,
    pattern: &OscillatorPattern,
    mu: f64,
    delta: f64,
    rate: SampleRate,
) -> Result<SampleBuffer> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::invalid(format!("frequency deviation {mu} Hz")));
    }
    if !(f > 0.0) || f + mu >= rate.nyquist() {
        return Err(Error::invalid(format!(
            "FM peak frequency {} Hz outside (0, {})",
            f + mu,
            rate.nyquist()
        )));
    }
    let n = duration_to_samples(delta, rate)?;
    let samples = osc::synth_with_freq(table, n, rate, |i| {
        f + mu * pattern.value_at(i, rate)
    });
    Ok(SampleBuffer::from_channels_unchecked(rate, vec![samples]))
}

/// Frequency modulation by a sine modulator at `f_mod` Hz.
pub fn fm(
    table: &WaveTable,
    f: f64,
    f_mod: f64,
    mu: f64,
    delta: f64,
    rate: SampleRate,
) -> Result<SampleBuffer> {
    fm_with_pattern(table, f, &OscillatorPattern::sine(f_mod)?, mu, delta, rate)
}

/// Bessel function of the first kind, integer order, by its power series.
/// Predicts FM sideband amplitudes: component `k` of a modulation with
/// phase index `beta` has amplitude `J_k(beta)`.
pub fn bessel_j(k: u32, mu: f64) -> f64 {
    if !mu.is_finite() {
        return f64::NAN;
    }
    let half = mu / 2.0;
    // Leading term (mu/2)^k / k!, built incrementally to dodge overflow.
    let mut term = 1.0;
    for j in 1..=k as u64 {
        term *= half / j as f64;
    }
    let mut sum = term;
    let neg_quarter = -(half * half);
    let mut m = 1.0;
    loop {
        term *= neg_quarter / (m * (m + k as f64));
        sum += term;
        if term.abs() <= 1e-16 * sum.abs().max(1e-300) || m > 500.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// The same Bessel value by numerical quadrature of
/// `(1/pi) * integral_0^pi cos(k theta - mu sin theta) d theta`.
/// Slow; exists to cross-check [`bessel_j`].
pub fn bessel_j_quadrature(k: u32, mu: f64) -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let f = |theta: f64| (k as f64 * theta - mu * theta.sin()).cos();
    // Simpson's rule.
    let mut sum = f(0.0) + f(PI);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0 / PI
}

/// Envelope segment shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeMode {
    Linear,
    Exponential,
}

/// Attack-decay-sustain-release envelope. Durations are in seconds; the
/// sustain segment absorbs whatever the other three leave of the buffer.
/// `floor` is the tiny positive level the exponential segments start and
/// end on (an exponential cannot reach zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdsrSpec {
    pub attack: f64,
    pub decay: f64,
    pub release: f64,
    pub sustain_level: f64,
    pub mode: EnvelopeMode,
    pub floor: f64,
}

impl AdsrSpec {
    pub fn new(attack: f64, decay: f64, release: f64, sustain_level: f64) -> Self {
        AdsrSpec {
            attack,
            decay,
            release,
            sustain_level,
            mode: EnvelopeMode::Exponential,
            floor: 1e-4,
        }
    }

    pub fn with_mode(mut self, mode: EnvelopeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, d) in [
            ("attack", self.attack),
            ("decay", self.decay),
            ("release", self.release),
        ] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::invalid(format!("{name} duration {d} s")));
            }
        }
        if !(self.sustain_level > 0.0 && self.sustain_level <= 1.0) {
            return Err(Error::invalid(format!(
                "sustain level {} outside (0, 1]",
                self.sustain_level
            )));
        }
        if !(self.floor > 0.0 && self.floor < self.sustain_level) {
            return Err(Error::invalid(format!(
                "envelope floor {} outside (0, sustain)",
                self.floor
            )));
        }
        Ok(())
    }
}

/// The raw envelope for a buffer of `n` samples.
///
/// Exponential segments: attack runs `floor -> 1` as `floor *
/// (1/floor)^(i/(len-1))`, decay `1 -> sustain`, release `sustain ->
/// floor`, each geometric in the sample index. Linear segments connect the
/// same endpoints with straight lines, except the linear release lands on
/// exactly 0. Segment boundary samples hit their endpoint values exactly;
/// one-sample segments take the endpoint value.
pub fn adsr_envelope(spec: &AdsrSpec, n: usize, rate: SampleRate) -> Result<Vec<f64>> {
    spec.validate()?;
    let n_a = duration_to_samples(spec.attack, rate)?;
    let n_d = duration_to_samples(spec.decay, rate)?;
    let n_r = duration_to_samples(spec.release, rate)?;
    let used = n_a + n_d + n_r;
    if used > n {
        return Err(Error::invalid(format!(
            "envelope segments cover {used} samples but the buffer has {n}"
        )));
    }
    let n_s = n - used;
    let a_s = spec.sustain_level;
    let xi = spec.floor;
    let exp = spec.mode == EnvelopeMode::Exponential;
    // Position within a segment, in [0, 1]; a one-sample segment sits at
    // its end.
    let pos = |i: usize, len: usize| {
        if len <= 1 {
            1.0
        } else {
            i as f64 / (len - 1) as f64
        }
    };
    let mut env = Vec::with_capacity(n);
    for i in 0..n_a {
        let t = pos(i, n_a);
        env.push(if exp { xi * (1.0 / xi).powf(t) } else { t });
    }
    for i in 0..n_d {
        let t = pos(i, n_d);
        env.push(if exp {
            a_s.powf(t)
        } else {
            1.0 + (a_s - 1.0) * t
        });
    }
    env.resize(env.len() + n_s, a_s);
    for i in 0..n_r {
        let t = pos(i, n_r);
        env.push(if exp {
            a_s * (xi / a_s).powf(t)
        } else {
            a_s * (1.0 - t)
        });
    }
    Ok(env)
}

/// Multiply a buffer by its ADSR envelope.
pub fn adsr(buf: &SampleBuffer, spec: &AdsrSpec) -> Result<SampleBuffer> {
    let env = adsr_envelope(spec, buf.len(), buf.rate())?;
    let channels = buf
        .channels()
        .iter()
        .map(|ch| ch.iter().zip(&env).map(|(s, e)| s * e).collect())
        .collect();
    Ok(SampleBuffer::from_channels_unchecked(buf.rate(), channels))
}

/// Carrier-linked modulation parameters: maps the note frequency to a
/// modulator rate, a vibrato depth in semitones, and a tremolo depth in dB.
pub struct ParameterLink {
    pub mod_rate: Box<dyn Fn(f64) -> f64>,
    pub vibrato_semitones: Box<dyn Fn(f64) -> f64>,
    pub tremolo_db: Box<dyn Fn(f64) -> f64>,
}

/// Evaluate a [`ParameterLink`] at a carrier frequency. Any non-finite
/// result means the link is undefined there.
pub fn link_parameters(f: f64, link: &ParameterLink) -> Result<(f64, f64, f64)> {
    let values = (
        (link.mod_rate)(f),
        (link.vibrato_semitones)(f),
        (link.tremolo_db)(f),
    );
    if !(values.0.is_finite() && values.1.is_finite() && values.2.is_finite()) {
        return Err(Error::invalid(format!(
            "parameter link undefined at {f} Hz"
        )));
    }
    Ok(values)
}
