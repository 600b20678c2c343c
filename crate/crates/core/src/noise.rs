//! Colored noise, synthesized in the frequency domain.
//!
//! Every color is a deterministic magnitude curve plus uniformly random
//! phases from a seeded generator: bin magnitudes fix the spectral slope
//! exactly, the seed only decides the waveform. The bias bin is always zero
//! and the upper half of the spectrum mirrors the lower conjugately, so the
//! inverse transform is real up to rounding.

use crate::buffer::{SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use crate::spectral::{self, Spectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use std::f64::consts::TAU;

/// Identifier of the phase generator, for output manifests.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Default lower band edge in Hz for the sloped colors.
pub const DEFAULT_F_MIN: f64 = 15.0;

/// Default loss rate in dB/octave for black noise (anything above 6 counts).
pub const DEFAULT_BLACK_BETA: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseColor {
    White,
    Pink,
    Brown,
    Blue,
    Violet,
    Black,
    Gray,
}

impl std::str::FromStr for NoiseColor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "white" => Ok(NoiseColor::White),
            "pink" => Ok(NoiseColor::Pink),
            "brown" => Ok(NoiseColor::Brown),
            "blue" => Ok(NoiseColor::Blue),
            "violet" => Ok(NoiseColor::Violet),
            "black" => Ok(NoiseColor::Black),
            "gray" => Ok(NoiseColor::Gray),
            other => Err(Error::invalid(format!("unknown noise color '{other}'"))),
        }
    }
}

/// Everything needed to synthesize one noise buffer.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    pub color: NoiseColor,
    pub len: usize,
    pub rate: SampleRate,
    pub seed: u64,
    /// Bins below this frequency are silenced for every color except white.
    pub f_min: f64,
    /// Upper band edge; required for blue and violet, ignored otherwise.
    pub f_max: Option<f64>,
    /// Loss in dB/octave for black noise; must exceed 6.
    pub beta: f64,
    /// Equal-loudness curve for gray noise as (Hz, dB) points.
    pub loudness_curve: Option<Vec<(f64, f64)>>,
}

impl NoiseSpec {
    pub fn new(color: NoiseColor, len: usize, rate: SampleRate, seed: u64) -> Self {
        NoiseSpec {
            color,
            len,
            rate,
            seed,
            f_min: DEFAULT_F_MIN,
            f_max: None,
            beta: DEFAULT_BLACK_BETA,
            loudness_curve: None,
        }
    }

    pub fn with_band(mut self, f_min: f64, f_max: Option<f64>) -> Self {
        self.f_min = f_min;
        self.f_max = f_max;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_loudness_curve(mut self, curve: Vec<(f64, f64)>) -> Self {
        self.loudness_curve = Some(curve);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::invalid(format!(
                "noise length {} below minimum of 2",
                self.len
            )));
        }
        let nyquist = self.rate.nyquist();
        if !(self.f_min > 0.0 && self.f_min < nyquist) {
            return Err(Error::invalid(format!(
                "f_min {} outside (0, {nyquist})",
                self.f_min
            )));
        }
        match self.color {
            NoiseColor::Blue | NoiseColor::Violet => {
                let f_max = self.f_max.ok_or_else(|| {
                    Error::invalid("blue and violet noise need an upper band edge".to_string())
                })?;
                if !(f_max > self.f_min && f_max < nyquist) {
                    return Err(Error::invalid(format!(
                        "f_max {f_max} outside ({}, {nyquist})",
                        self.f_min
                    )));
                }
            }
            NoiseColor::Black => {
                if !(self.beta > 6.0) {
                    return Err(Error::invalid(format!(
                        "black noise slope {} dB/oct must exceed 6",
                        self.beta
                    )));
                }
            }
            NoiseColor::Gray => {
                let curve = self.loudness_curve.as_ref().ok_or_else(|| {
                    Error::missing("gray noise needs a loudness curve".to_string())
                })?;
                if curve.is_empty() {
                    return Err(Error::missing("empty loudness curve".to_string()));
                }
                if curve.iter().any(|&(f, db)| {
                    !(f > 0.0 && f.is_finite()) || !db.is_finite()
                }) {
                    return Err(Error::invalid(
                        "loudness curve points must be finite with positive frequency"
                            .to_string(),
                    ));
                }
                if curve.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::invalid(
                        "loudness curve frequencies must be strictly increasing".to_string(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Magnitude for a bin at `f` Hz, before any phase is attached.
    fn magnitude_at(&self, f: f64) -> f64 {
        let octaves_up = |f: f64| (f / self.f_min).log2();
        let sloped = |db_per_octave: f64| 10f64.powf(db_per_octave / 20.0 * octaves_up(f));
        match self.color {
            NoiseColor::White => 1.0,
            _ if f < self.f_min => 0.0,
            NoiseColor::Pink => sloped(-3.0),
            NoiseColor::Brown => sloped(-6.0),
            NoiseColor::Blue | NoiseColor::Violet => {
                if f > self.f_max.unwrap() {
                    0.0
                } else if self.color == NoiseColor::Blue {
                    sloped(3.0)
                } else {
                    sloped(6.0)
                }
            }
            NoiseColor::Black => sloped(-self.beta),
            NoiseColor::Gray => {
                let curve = self.loudness_curve.as_ref().unwrap();
                10f64.powf(loudness_db(curve, f) / 20.0)
            }
        }
    }
}

/// Curve lookup, linear in (log2 f, dB) with endpoint values held outside
/// the tabulated range.
fn loudness_db(curve: &[(f64, f64)], f: f64) -> f64 {
    let first = curve[0];
    let last = curve[curve.len() - 1];
    if f <= first.0 {
        return first.1;
    }
    if f >= last.0 {
        return last.1;
    }
    let lf = f.log2();
    for w in curve.windows(2) {
        let (f0, db0) = w[0];
        let (f1, db1) = w[1];
        if f <= f1 {
            let t = (lf - f0.log2()) / (f1.log2() - f0.log2());
            return db0 + t * (db1 - db0);
        }
    }
    last.1
}

/// Construct the complex spectrum of a noise buffer: deterministic
/// magnitudes, seeded phases, conjugate-mirrored upper half, zero bias.
/// Exposed separately so the exact zero bins can be asserted directly.
pub fn build_spectrum(spec: &NoiseSpec) -> Result<Spectrum> {
    spec.validate()?;
    let n = spec.len;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..n {
        if k > n - k {
            break;
        }
        let f = k as f64 * spec.rate.as_f64() / n as f64;
        let alpha = spec.magnitude_at(f);
        if k == n - k {
            // Nyquist bin is its own mirror and must stay real.
            coeffs[k] = Complex64::new(alpha, 0.0);
        } else {
            let x = rng.gen::<f64>() * TAU;
            let c = alpha * Complex64::new(x.cos(), x.sin());
            coeffs[k] = c;
            coeffs[n - k] = c.conj();
        }
    }
    Spectrum::from_parts(spec.rate, coeffs)
}

/// Largest |imaginary part| of a raw complex synthesis output; a correctly
/// mirrored spectrum keeps this at rounding-noise level.
pub fn imaginary_residual(raw: &[Complex64]) -> f64 {
    raw.iter().fold(0.0f64, |m, c| m.max(c.im.abs()))
}

/// Synthesize the noise buffer described by `spec`.
pub fn generate(spec: &NoiseSpec) -> Result<SampleBuffer> {
    let spectrum = build_spectrum(spec)?;
    let raw = spectral::inverse_complex(&spectrum);
    let residual = imaginary_residual(&raw);
    if residual > 1e-9 * spec.len as f64 {
        return Err(Error::degenerate(format!(
            "noise synthesis left imaginary residual {residual:.3e}"
        )));
    }
    SampleBuffer::from_mono(spec.rate, raw.iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate() -> SampleRate {
        SampleRate::default()
    }

    #[test]
    fn white_bins_are_unit_above_dc() {
        let spec = NoiseSpec::new(NoiseColor::White, 64, rate(), 7);
        let s = build_spectrum(&spec).unwrap();
        assert_eq!(s.coeffs()[0], Complex64::new(0.0, 0.0));
        for k in 1..64 {
            assert!((s.magnitude(k) - 1.0).abs() < 1e-12, "bin {k}");
        }
        // Even length: the self-mirrored bin is exactly 1, purely real.
        assert_eq!(s.coeffs()[32], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pink_halves_power_per_octave() {
        let n = 1 << 14;
        let spec = NoiseSpec::new(NoiseColor::Pink, n, rate(), 7);
        let s = build_spectrum(&spec).unwrap();
        // Pick a bin pair (k, 2k) well above f_min.
        let k = 128;
        let ratio = s.magnitude(2 * k) / s.magnitude(k);
        assert!((ratio - 10f64.powf(-3.0 / 20.0)).abs() < 1e-12);
    }

    #[test]
    fn colored_bins_below_f_min_are_zero() {
        let n = 1 << 15;
        for color in [
            NoiseColor::Pink,
            NoiseColor::Brown,
            NoiseColor::Black,
        ] {
            let spec = NoiseSpec::new(color, n, rate(), 3);
            let s = build_spectrum(&spec).unwrap();
            for k in 1..n {
                let f = s.bin_frequency(k.min(n - k));
                if f < DEFAULT_F_MIN {
                    assert_eq!(s.magnitude(k), 0.0, "{color:?} bin {k}");
                }
            }
        }
    }

    #[test]
    fn blue_and_violet_vanish_above_f_max() {
        let n = 1 << 15;
        for color in [NoiseColor::Blue, NoiseColor::Violet] {
            let spec =
                NoiseSpec::new(color, n, rate(), 3).with_band(DEFAULT_F_MIN, Some(8000.0));
            let s = build_spectrum(&spec).unwrap();
            for k in 1..=n / 2 {
                let f = s.bin_frequency(k);
                if f > 8000.0 {
                    assert_eq!(s.magnitude(k), 0.0, "{color:?} bin {k}");
                }
            }
        }
    }

    #[test]
    fn same_seed_reproduces_different_seed_rephases() {
        let spec = NoiseSpec::new(NoiseColor::Pink, 4096, rate(), 11);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.channel(0), b.channel(0));
        let mut other = spec.clone();
        other.seed = 12;
        let c = generate(&other).unwrap();
        assert_ne!(a.channel(0), c.channel(0));
        // Magnitudes stay put; only phases moved.
        let sa = spectral::forward(&a).unwrap();
        let sc = spectral::forward(&c).unwrap();
        for k in 0..4096 {
            assert!((sa.magnitude(k) - sc.magnitude(k)).abs() < 1e-9, "bin {k}");
        }
    }

    #[test]
    fn output_is_real_and_zero_mean() {
        for color in [NoiseColor::White, NoiseColor::Pink, NoiseColor::Violet] {
            let spec =
                NoiseSpec::new(color, 10_000, rate(), 99).with_band(15.0, Some(10_000.0));
            let raw = spectral::inverse_complex(&build_spectrum(&spec).unwrap());
            assert!(imaginary_residual(&raw) <= 1e-9 * 10_000.0);
            let buf = generate(&spec).unwrap();
            let mean: f64 = buf.channel(0).iter().sum::<f64>();
            assert!(mean.abs() <= 1e-9 * 10_000.0, "{color:?} mean {mean}");
        }
    }

    #[test]
    fn broken_symmetry_leaves_residual() {
        let spec = NoiseSpec::new(NoiseColor::White, 256, rate(), 5);
        let s = build_spectrum(&spec).unwrap();
        let mut coeffs = s.coeffs().to_vec();
        coeffs[3] = Complex64::new(0.9, 0.9); // no matching mirror update
        let broken = Spectrum::from_parts(rate(), coeffs).unwrap();
        let raw = spectral::inverse_complex(&broken);
        assert!(imaginary_residual(&raw) > 1e-3);
    }

    #[test]
    fn empty_band_gives_silence() {
        let raw = vec![Complex64::new(0.0, 0.0); 128];
        assert_eq!(imaginary_residual(&raw), 0.0);
    }

    #[test]
    fn measured_slopes_match_nominal() {
        let n = 1 << 17;
        let cases: [(NoiseSpec, f64, f64); 6] = [
            (NoiseSpec::new(NoiseColor::White, n, rate(), 1), 0.0, 0.1),
            (NoiseSpec::new(NoiseColor::Pink, n, rate(), 1), -3.01, 0.1),
            (NoiseSpec::new(NoiseColor::Brown, n, rate(), 1), -6.02, 0.1),
            (
                NoiseSpec::new(NoiseColor::Blue, n, rate(), 1)
                    .with_band(DEFAULT_F_MIN, Some(15_000.0)),
                3.01,
                0.1,
            ),
            (
                NoiseSpec::new(NoiseColor::Violet, n, rate(), 1)
                    .with_band(DEFAULT_F_MIN, Some(15_000.0)),
                6.02,
                0.1,
            ),
            (NoiseSpec::new(NoiseColor::Black, n, rate(), 1), -12.0, 0.2),
        ];
        for (spec, nominal, tol) in cases {
            let buf = generate(&spec).unwrap();
            let measured =
                spectral::slope_db_per_octave(&spectral::forward(&buf).unwrap(), 100.0, 10_000.0)
                    .unwrap();
            assert!(
                (measured - nominal).abs() < tol,
                "{:?}: measured {measured}, nominal {nominal}",
                spec.color
            );
        }
    }

    #[test]
    fn gray_follows_the_loudness_curve() {
        let n = 1 << 14;
        let curve = vec![(100.0, 0.0), (1000.0, 20.0)];
        let spec =
            NoiseSpec::new(NoiseColor::Gray, n, rate(), 4).with_loudness_curve(curve);
        let s = build_spectrum(&spec).unwrap();
        let bin_of = |f: f64| (f * n as f64 / rate().as_f64()).round() as usize;
        let lo = s.magnitude(bin_of(100.0));
        let hi = s.magnitude(bin_of(1000.0));
        assert!((hi / lo - 10.0).abs() < 0.05, "ratio {}", hi / lo);
        // Held flat outside the table.
        let above = s.magnitude(bin_of(5000.0));
        assert!((above / hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(generate(&NoiseSpec::new(NoiseColor::White, 1, rate(), 0)).is_err());
        assert!(generate(&NoiseSpec::new(NoiseColor::Blue, 64, rate(), 0)).is_err());
        assert!(generate(
            &NoiseSpec::new(NoiseColor::Blue, 64, rate(), 0).with_band(100.0, Some(50.0))
        )
        .is_err());
        assert!(
            generate(&NoiseSpec::new(NoiseColor::Black, 64, rate(), 0).with_beta(6.0)).is_err()
        );
        let gray_missing = generate(&NoiseSpec::new(NoiseColor::Gray, 64, rate(), 0));
        assert!(matches!(gray_missing, Err(Error::MissingData(_))));
        assert!(generate(
            &NoiseSpec::new(NoiseColor::Gray, 64, rate(), 0)
                .with_loudness_curve(vec![(200.0, 0.0), (100.0, 3.0)])
        )
        .is_err());
    }
}
