//! Discrete Fourier analysis and the real-signal reconstruction identities.
//!
//! Conventions, fixed once for the whole crate: the synthesis direction is
//! `t_i = (1/n) sum_k c_k e^(-j w_k i)` with `w_k = 2 pi k / n`, so the
//! forward (analysis) transform is its adjoint,
//! `c_k = sum_i t_i e^(+j w_k i)`, unnormalized. Real signals then satisfy
//! `c_k = conj(c_(n-k))`, which is what lets a length-n real signal be
//! written as a bias plus [`conjugate_pair_count`] cosines of the form
//! `cos(w_k i - atan2(b_k, a_k))` (plus a Nyquist term when n is even).
//!
//! [`forward`] uses an O(n log n) transform; [`forward_direct`] evaluates
//! the defining sum in O(n^2) and exists so tests can cross-check the fast
//! path against an independent route.

use crate::buffer::{SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// DFT coefficients of a mono buffer, with the rate kept for bin -> Hz maps.
#[derive(Debug, Clone)]
pub struct Spectrum {
    rate: SampleRate,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// Wrap raw coefficients. Finiteness is checked; symmetry is not.
    pub fn from_parts(rate: SampleRate, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("empty spectrum".to_string()));
        }
        if let Some(pos) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::invalid(format!(
                "non-finite coefficient at bin {pos}"
            )));
        }
        Ok(Spectrum { rate, coeffs })
    }

    pub fn rate(&self) -> SampleRate {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Center frequency of bin `k` in Hz.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.rate.as_f64() / self.len() as f64
    }

    pub fn magnitude(&self, k: usize) -> f64 {
        self.coeffs[k].norm()
    }
}

fn mono_input<'a>(buf: &'a SampleBuffer, what: &str) -> Result<&'a [f64]> {
    let s = buf.mono().map_err(|_| {
        Error::invalid(format!("{what} requires a mono buffer"))
    })?;
    if s.is_empty() {
        return Err(Error::invalid(format!("{what} of an empty buffer")));
    }
    Ok(s)
}

/// Forward transform, O(n log n).
///
/// Positive-exponent convention (see the module docs); this is the plan
/// direction rustfft calls "inverse", used here unnormalized.
pub fn forward(buf: &SampleBuffer) -> Result<Spectrum> {
    let samples = mono_input(buf, "forward transform")?;
    let mut data: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(data.len()).process(&mut data);
    Ok(Spectrum {
        rate: buf.rate(),
        coeffs: data,
    })
}

/// Forward transform by the defining sum, O(n^2). Test oracle.
pub fn forward_direct(buf: &SampleBuffer) -> Result<Spectrum> {
    let samples = mono_input(buf, "forward transform")?;
    let n = samples.len();
    let coeffs = (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &s) in samples.iter().enumerate() {
                let angle = TAU * k as f64 * i as f64 / n as f64;
                acc += s * Complex64::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect();
    Ok(Spectrum {
        rate: buf.rate(),
        coeffs,
    })
}

/// Inverse transform (`1/n` normalized), returning raw complex samples.
pub fn inverse_complex(spectrum: &Spectrum) -> Vec<Complex64> {
    let mut data = spectrum.coeffs.clone();
    FftPlanner::new()
        .plan_fft_forward(data.len())
        .process(&mut data);
    let scale = 1.0 / data.len() as f64;
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Inverse transform projected onto the real axis.
pub fn inverse(spectrum: &Spectrum) -> Result<SampleBuffer> {
    let samples: Vec<f64> = inverse_complex(spectrum).iter().map(|c| c.re).collect();
    SampleBuffer::from_mono(spectrum.rate, samples)
}

/// How many conjugate-paired oscillations a length-`n` real signal carries:
/// `(n - n % 2) / 2 + n % 2 - 1`, i.e. bins `1..=pairs` pair off with their
/// mirror bins, leaving the bias term and (for even `n`) the Nyquist bin.
pub fn conjugate_pair_count(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (n - n % 2) / 2 + n % 2 - 1
}

fn hermitian_tolerance(coeffs: &[Complex64]) -> f64 {
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    1e-9 * max.max(1.0)
}

/// Rebuild the real signal from paired bins:
/// bias, one cosine per conjugate pair (two-argument phase), and the
/// Nyquist term for even lengths.
///
/// Rejects spectra that are not Hermitian-symmetric, since those do not
/// describe a real signal.
pub fn reconstruct_real(spectrum: &Spectrum) -> Result<SampleBuffer> {
    let n = spectrum.len();
    let coeffs = &spectrum.coeffs;
    let tol = hermitian_tolerance(coeffs);
    if coeffs[0].im.abs() > tol {
        return Err(Error::invalid(format!(
            "bias bin has imaginary part {}",
            coeffs[0].im
        )));
    }
    for k in 1..n {
        let diff = (coeffs[k] - coeffs[n - k].conj()).norm();
        if diff > tol {
            return Err(Error::invalid(format!(
                "spectrum not conjugate-symmetric at bin {k} (|c_k - conj(c_(n-k))| = {diff:.3e})"
            )));
        }
    }
    let pairs = conjugate_pair_count(n);
    let nf = n as f64;
    let even = n % 2 == 0;
    let terms: Vec<(f64, f64, f64)> = (1..=pairs)
        .map(|k| {
            let a = coeffs[k].re;
            let b = coeffs[k].im;
            let magnitude = (a * a + b * b).sqrt();
            let phase = if a == 0.0 && b == 0.0 {
                0.0
            } else {
                b.atan2(a)
            };
            (TAU * k as f64 / nf, magnitude, phase)
        })
        .collect();
    let bias = coeffs[0].re / nf;
    let nyquist = if even { coeffs[n / 2].re / nf } else { 0.0 };
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let mut t = bias;
            for &(w, magnitude, phase) in &terms {
                t += 2.0 / nf * magnitude * (w * i as f64 - phase).cos();
            }
            if even {
                // Nyquist alternates sign sample to sample.
                t += nyquist * if i % 2 == 0 { 1.0 } else { -1.0 };
            }
            t
        })
        .collect();
    SampleBuffer::from_mono(spectrum.rate, samples)
}

/// Least-squares slope of magnitude (dB) against log2(frequency) over bins
/// whose frequency lies in `[f_lo, f_hi]`.
///
/// The band must span at least two octaves; zero-magnitude bins are skipped
/// (they carry no level to regress on).
pub fn slope_db_per_octave(spectrum: &Spectrum, f_lo: f64, f_hi: f64) -> Result<f64> {
    if !(f_lo > 0.0 && f_hi.is_finite() && f_lo < f_hi) {
        return Err(Error::invalid(format!("slope band [{f_lo}, {f_hi}]")));
    }
    if f_hi > spectrum.rate.nyquist() {
        return Err(Error::invalid(format!(
            "band edge {f_hi} above Nyquist {}",
            spectrum.rate.nyquist()
        )));
    }
    if f_hi < 4.0 * f_lo {
        return Err(Error::invalid(format!(
            "band [{f_lo}, {f_hi}] narrower than two octaves"
        )));
    }
    let n = spectrum.len();
    let mut points = Vec::new();
    for k in 1..=n / 2 {
        let f = spectrum.bin_frequency(k);
        if f < f_lo || f > f_hi {
            continue;
        }
        let magnitude = spectrum.coeffs[k].norm();
        if magnitude == 0.0 {
            continue;
        }
        points.push((f.log2(), 20.0 * magnitude.log10()));
    }
    if points.len() < 2 {
        return Err(Error::invalid(format!(
            "band [{f_lo}, {f_hi}] covers {} usable bins, need at least 2",
            points.len()
        )));
    }
    let n_pts = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n_pts;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n_pts;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    if den == 0.0 {
        return Err(Error::invalid(
            "all usable bins share one frequency".to_string(),
        ));
    }
    Ok(num / den)
}

/// Magnitudes at the bins nearest `f0, 2 f0, ..., count * f0`.
pub fn harmonic_magnitudes(spectrum: &Spectrum, f0: f64, count: usize) -> Result<Vec<f64>> {
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(Error::invalid(format!("fundamental {f0} Hz")));
    }
    if count == 0 {
        return Err(Error::invalid("zero harmonics requested".to_string()));
    }
    let top = f0 * count as f64;
    if top >= spectrum.rate.nyquist() {
        return Err(Error::invalid(format!(
            "harmonic {count} at {top} Hz reaches Nyquist"
        )));
    }
    let n = spectrum.len() as f64;
    Ok((1..=count)
        .map(|h| {
            let k = (h as f64 * f0 * n / spectrum.rate.as_f64()).round() as usize;
            spectrum.coeffs[k].norm()
        })
        .collect())
}

/// Spectrum of a rectangular slice `[start, start + len)` of the buffer.
/// Used to probe the local frequency of glides and modulated notes.
pub fn window_spectrum(buf: &SampleBuffer, start: usize, len: usize) -> Result<Spectrum> {
    let samples = mono_input(buf, "windowed transform")?;
    if len == 0 || start + len > samples.len() {
        return Err(Error::invalid(format!(
            "window [{start}, {}) outside buffer of {} samples",
            start + len,
            samples.len()
        )));
    }
    let slice = SampleBuffer::from_channels_unchecked(
        buf.rate(),
        vec![samples[start..start + len].to_vec()],
    );
    forward(&slice)
}

/// Frequency of the strongest bin in `[f_lo, f_hi]`, refined by parabolic
/// interpolation on the neighboring magnitudes.
pub fn peak_frequency(spectrum: &Spectrum, f_lo: f64, f_hi: f64) -> Result<f64> {
    if !(f_lo >= 0.0 && f_lo < f_hi) {
        return Err(Error::invalid(format!("peak band [{f_lo}, {f_hi}]")));
    }
    let n = spectrum.len();
    let half = n / 2;
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=half {
        let f = spectrum.bin_frequency(k);
        if f < f_lo || f > f_hi {
            continue;
        }
        let magnitude = spectrum.coeffs[k].norm();
        if best.map_or(true, |(_, m)| magnitude > m) {
            best = Some((k, magnitude));
        }
    }
    let (k, _) = best.ok_or_else(|| {
        Error::invalid(format!("no bins inside [{f_lo}, {f_hi}]"))
    })?;
    let mut delta = 0.0;
    if k > 0 && k + 1 <= half {
        let l = spectrum.coeffs[k - 1].norm();
        let c = spectrum.coeffs[k].norm();
        let r = spectrum.coeffs[k + 1].norm();
        let denom = l - 2.0 * c + r;
        if denom.abs() > 1e-30 {
            delta = 0.5 * (l - r) / denom;
            delta = delta.clamp(-0.5, 0.5);
        }
    }
    Ok((k as f64 + delta) * spectrum.rate.as_f64() / n as f64)
}
