//! FIR convolution and recursive (IIR) filters.
//!
//! Convolution follows the textbook sum directly; a transform-based fast
//! path kicks in for large jobs and is held to 1e-6 agreement with the
//! direct form. The IIR side provides the four classic single-pole /
//! two-pole recipes (low-pass, high-pass, band-pass, band-reject) plus the
//! raw difference-equation applicator they feed.

use crate::buffer::{SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use crate::spectral;
use rustfft::num_complex::Complex64;
use std::f64::consts::TAU;

/// Finite impulse response `h_0..h_(m-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    samples: Vec<f64>,
}

impl ImpulseResponse {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empty impulse response".to_string()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid(
                "non-finite impulse response sample".to_string(),
            ));
        }
        Ok(ImpulseResponse { samples })
    }

    /// The identity element of convolution: a single unit sample.
    pub fn identity() -> Self {
        ImpulseResponse {
            samples: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Difference-equation coefficients: feedforward `a_0..a_J` applied to the
/// input history, feedback `b_1..b_K` applied to the output history (the
/// implicit `b_0` is 1, i.e. coefficients are already normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoefficients {
    feedforward: Vec<f64>,
    feedback: Vec<f64>,
}

impl IirCoefficients {
    pub fn new(feedforward: Vec<f64>, feedback: Vec<f64>) -> Result<Self> {
        if feedforward.is_empty() {
            return Err(Error::invalid(
                "at least one feedforward coefficient required".to_string(),
            ));
        }
        if feedforward
            .iter()
            .chain(feedback.iter())
            .any(|c| !c.is_finite())
        {
            return Err(Error::invalid("non-finite filter coefficient".to_string()));
        }
        Ok(IirCoefficients {
            feedforward,
            feedback,
        })
    }

    pub fn feedforward(&self) -> &[f64] {
        &self.feedforward
    }

    pub fn feedback(&self) -> &[f64] {
        &self.feedback
    }
}

/// The four designable responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    LowPass,
    HighPass,
    BandPass,
    BandReject,
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowpass" => Ok(FilterKind::LowPass),
            "highpass" => Ok(FilterKind::HighPass),
            "bandpass" => Ok(FilterKind::BandPass),
            "bandreject" => Ok(FilterKind::BandReject),
            other => Err(Error::invalid(format!(
                "unknown filter kind '{other}' (expected lowpass, highpass, bandpass or bandreject)"
            ))),
        }
    }
}

/// Prepend `n` zeros to every channel.
pub fn delay(buf: &SampleBuffer, n: usize) -> SampleBuffer {
    let channels = buf
        .channels()
        .iter()
        .map(|ch| {
            let mut out = vec![0.0; n + ch.len()];
            out[n..].copy_from_slice(ch);
            out
        })
        .collect();
    SampleBuffer::from_channels_unchecked(buf.rate(), channels)
}

// Above this many multiply-adds the transform path wins comfortably.
const DIRECT_CONVOLUTION_LIMIT: usize = 1 << 21;

fn convolve_direct(x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = x.len() + h.len() - 1;
    let mut out = vec![0.0; n];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (j, &hj) in h.iter().enumerate() {
            out[i + j] += xi * hj;
        }
    }
    out
}

fn convolve_fft(x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = x.len() + h.len() - 1;
    let size = n.next_power_of_two();
    let mut fx: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fx.resize(size, Complex64::new(0.0, 0.0));
    let mut fh: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fh.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = rustfft::FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    fwd.process(&mut fx);
    fwd.process(&mut fh);
    for (a, b) in fx.iter_mut().zip(&fh) {
        *a *= b;
    }
    planner.plan_fft_inverse(size).process(&mut fx);
    let scale = 1.0 / size as f64;
    fx.truncate(n);
    fx.iter().map(|c| c.re * scale).collect()
}

fn convolve_samples(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.len().saturating_mul(h.len()) > DIRECT_CONVOLUTION_LIMIT {
        convolve_fft(x, h)
    } else {
        convolve_direct(x, h)
    }
}

/// Full convolution of a mono buffer with an impulse response; the result
/// has length `len(x) + len(h) - 1`.
pub fn convolve(x: &SampleBuffer, h: &ImpulseResponse) -> Result<SampleBuffer> {
    let samples = x
        .mono()
        .map_err(|_| Error::invalid("convolution input must be mono".to_string()))?;
    if samples.is_empty() {
        return Err(Error::invalid("convolution of an empty buffer".to_string()));
    }
    SampleBuffer::from_mono(x.rate(), convolve_samples(samples, h.samples()))
}

/// Run the difference equation
/// `y_i = sum_j a_j x_(i-j) + sum_k b_k y_(i-k)`
/// over a mono buffer with zero initial state. Output length equals input
/// length. Stability is the caller's problem.
pub fn apply_iir(x: &SampleBuffer, c: &IirCoefficients) -> Result<SampleBuffer> {
    let input = x
        .mono()
        .map_err(|_| Error::invalid("filter input must be mono".to_string()))?;
    let a = &c.feedforward;
    let b = &c.feedback;
    let mut out = vec![0.0; input.len()];
    for i in 0..input.len() {
        let mut acc = 0.0;
        for (j, &aj) in a.iter().enumerate() {
            if j > i {
                break;
            }
            acc += aj * input[i - j];
        }
        for (k, &bk) in b.iter().enumerate() {
            let lag = k + 1;
            if lag > i {
                break;
            }
            acc += bk * out[i - lag];
        }
        out[i] = acc;
    }
    SampleBuffer::from_mono(x.rate(), out)
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 0.5) {
        return Err(Error::invalid(format!(
            "{name} = {value}, must lie strictly between 0 and 0.5 of the rate"
        )));
    }
    Ok(())
}

/// Design one of the four recursive recipes. `fc` (and `bw` for the band
/// kinds) are fractions of the sampling rate in (0, 0.5). The single-pole
/// kinds take no bandwidth.
pub fn design_iir(kind: FilterKind, fc: f64, bw: Option<f64>) -> Result<IirCoefficients> {
    check_fraction("cutoff", fc)?;
    match kind {
        FilterKind::LowPass | FilterKind::HighPass => {
            if bw.is_some() {
                return Err(Error::invalid(
                    "bandwidth only applies to band filters".to_string(),
                ));
            }
            let x = (-TAU * fc).exp();
            match kind {
                FilterKind::LowPass => IirCoefficients::new(vec![1.0 - x], vec![x]),
                _ => IirCoefficients::new(vec![(x + 1.0) / 2.0, -(x + 1.0) / 2.0], vec![x]),
            }
        }
        FilterKind::BandPass | FilterKind::BandReject => {
            let bw = bw.ok_or_else(|| {
                Error::invalid("band filters require a bandwidth".to_string())
            })?;
            check_fraction("bandwidth", bw)?;
            let c = (TAU * fc).cos();
            let r = 1.0 - 3.0 * bw;
            let k = (1.0 - 2.0 * r * c + r * r) / (2.0 - 2.0 * c);
            let feedback = vec![2.0 * r * c, -(r * r)];
            match kind {
                FilterKind::BandPass => IirCoefficients::new(
                    vec![1.0 - k, 2.0 * (k - r) * c, r * r - k],
                    feedback,
                ),
                _ => IirCoefficients::new(vec![k, -2.0 * k * c, k], feedback),
            }
        }
    }
}

/// Steady-state gain of a filter at one frequency, in dB.
///
/// Protocol: a one-second unit sine probe at `freq_fraction` of the rate is
/// run through the filter, the first 10% of both signals is discarded as
/// transient, and the remaining RMS levels are compared.
pub fn measure_response_db(
    c: &IirCoefficients,
    freq_fraction: f64,
    rate: SampleRate,
) -> Result<f64> {
    check_fraction("probe frequency", freq_fraction)?;
    let n = rate.value() as usize;
    let probe: Vec<f64> = (0..n)
        .map(|i| (TAU * freq_fraction * i as f64).sin())
        .collect();
    let input = SampleBuffer::from_mono(rate, probe)?;
    let output = apply_iir(&input, c)?;
    let skip = n / 10;
    let rms = |s: &[f64]| {
        let sum: f64 = s[skip..].iter().map(|v| v * v).sum();
        (sum / (s.len() - skip) as f64).sqrt()
    };
    let rms_in = rms(input.channel(0));
    let rms_out = rms(output.channel(0));
    if rms_in == 0.0 {
        return Err(Error::degenerate("silent probe".to_string()));
    }
    Ok(20.0 * (rms_out / rms_in).log10())
}

/// Linear magnitude ratio between the filter's response at `f` and at a
/// reference frequency, using the same probe protocol.
pub fn measure_gain_ratio(
    c: &IirCoefficients,
    f: f64,
    f_ref: f64,
    rate: SampleRate,
) -> Result<f64> {
    let db = measure_response_db(c, f, rate)? - measure_response_db(c, f_ref, rate)?;
    Ok(10f64.powf(db / 20.0))
}

// Spectral probe used in tests: magnitude response from the transfer
// function evaluated on the unit circle.
#[cfg(test)]
fn transfer_magnitude(c: &IirCoefficients, freq_fraction: f64) -> f64 {
    let z = Complex64::new(0.0, -TAU * freq_fraction).exp();
    let mut num = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    for &a in &c.feedforward {
        num += a * zp;
        zp *= z;
    }
    let mut den = Complex64::new(1.0, 0.0);
    let mut zp = z;
    for &b in &c.feedback {
        den -= b * zp;
        zp *= z;
    }
    (num / den).norm()
}

/// Spectrum of the filter's impulse response over `n` samples; handy for
/// eyeballing a response without probing one frequency at a time.
pub fn impulse_spectrum(
    c: &IirCoefficients,
    n: usize,
    rate: SampleRate,
) -> Result<spectral::Spectrum> {
    if n == 0 {
        return Err(Error::invalid("zero-length response".to_string()));
    }
    let mut impulse = vec![0.0; n];
    impulse[0] = 1.0;
    let buf = SampleBuffer::from_mono(rate, impulse)?;
    spectral::forward(&apply_iir(&buf, c)?)
}
