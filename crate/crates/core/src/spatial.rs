//! Stereo placement, moving sources, and reverberation.
//!
//! The geometry is head-centered: the ears sit at `(+-zeta/2, 0)` and
//! positive `x` points at the right ear. Interaural time and intensity
//! differences fall straight out of the two ear distances; channel 0 is the
//! left ear, channel 1 the right.

use crate::buffer::{duration_to_samples, Decibels, SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use crate::filter::ImpulseResponse;
use crate::noise::{generate, NoiseColor, NoiseSpec};
use crate::osc::{self, WaveTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Propagation speed used everywhere, in m/s.
pub const SPEED_OF_SOUND: f64 = 343.2;

/// Adult interaural distance in meters.
pub const DEFAULT_EAR_SPACING: f64 = 0.215;

/// A fixed source location on the horizontal plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePosition {
    pub x: f64,
    pub y: f64,
    /// Distance between the ears.
    pub zeta: f64,
}

impl SourcePosition {
    pub fn new(x: f64, y: f64) -> Self {
        SourcePosition {
            x,
            y,
            zeta: DEFAULT_EAR_SPACING,
        }
    }

    pub fn with_ear_spacing(mut self, zeta: f64) -> Self {
        self.zeta = zeta;
        self
    }

    /// Distances to the right and left ear respectively.
    fn ear_distances(&self) -> Result<(f64, f64)> {
        if !(self.zeta > 0.0 && self.zeta.is_finite())
            || !self.x.is_finite()
            || !self.y.is_finite()
        {
            return Err(Error::invalid(format!(
                "source position ({}, {}), ear spacing {}",
                self.x, self.y, self.zeta
            )));
        }
        let half = self.zeta / 2.0;
        let right = ((self.x - half).powi(2) + self.y * self.y).sqrt();
        let left = ((self.x + half).powi(2) + self.y * self.y).sqrt();
        if right == 0.0 || left == 0.0 {
            return Err(Error::invalid(
                "source coincides with an ear".to_string(),
            ));
        }
        Ok((right, left))
    }
}

/// Interaural time difference in seconds and intensity difference in dB.
///
/// Positive ITD means the sound reaches the right ear first; the IID is
/// then negative (the far ear is quieter), `20 log10(d_right / d_left)`.
pub fn itd_iid(pos: &SourcePosition) -> Result<(f64, Decibels)> {
    let (right, left) = pos.ear_distances()?;
    let itd = (left - right) / SPEED_OF_SOUND;
    let iid = 20.0 * (right / left).log10();
    Ok((itd, Decibels(iid)))
}

/// Horizontal angle of the source: `atan2(y, x)`, so straight ahead is
/// `pi/2` and the right ear direction is 0.
pub fn azimuth(pos: &SourcePosition) -> Result<f64> {
    if pos.x == 0.0 && pos.y == 0.0 {
        return Err(Error::invalid(
            "azimuth undefined at the head center".to_string(),
        ));
    }
    Ok(pos.y.atan2(pos.x))
}

/// Place a mono buffer in the stereo field: the far channel is delayed by
/// `floor(ITD * rate)` samples (magnitude taken after flooring) and scaled
/// by the linear intensity ratio of the ear distances. Output channels are
/// left then right, both `len + delay` samples long.
pub fn localize(buf: &SampleBuffer, pos: &SourcePosition) -> Result<SampleBuffer> {
    let mono = buf
        .mono()
        .map_err(|_| Error::invalid("localization input must be mono".to_string()))?;
    let (right_d, left_d) = pos.ear_distances()?;
    let itd = (left_d - right_d) / SPEED_OF_SOUND;
    let lambda = (itd * buf.rate().as_f64()).floor() as i64;
    let shift = lambda.unsigned_abs() as usize;
    let iid_a = right_d / left_d;
    let n = mono.len() + shift;
    let near = |scale: f64| {
        let mut ch = vec![0.0; n];
        for (i, &s) in mono.iter().enumerate() {
            ch[i] = s * scale;
        }
        ch
    };
    let far = |scale: f64| {
        let mut ch = vec![0.0; n];
        for (i, &s) in mono.iter().enumerate() {
            ch[shift + i] = s * scale;
        }
        ch
    };
    let (left, right) = if lambda >= 0 {
        // Source on the right: the right ear leads, the left channel is
        // delayed and attenuated by iid_a = d_right / d_left < 1.
        (far(iid_a), near(1.0))
    } else {
        (near(1.0), far(1.0 / iid_a))
    };
    SampleBuffer::from_stereo(buf.rate(), left, right)
}

/// Frequency heard by an observer for source/receiver speeds along the
/// line between them (positive speeds increase the gap).
pub fn doppler_shift(f0: f64, v_source: f64, v_receiver: f64) -> f64 {
    f0 * (SPEED_OF_SOUND + v_receiver) / (SPEED_OF_SOUND + v_source)
}

/// A source passing the listener on a straight line: it travels along the
/// y axis offset laterally by `z0`, starting at `y0`, while the receiver
/// may move along the same axis. All meters and m/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerPath {
    pub f0: f64,
    pub y0: f64,
    pub z0: f64,
    pub v_source: f64,
    pub v_receiver: f64,
}

impl DopplerPath {
    pub fn new(f0: f64, y0: f64, z0: f64, v_source: f64, v_receiver: f64) -> Result<Self> {
        if !(f0 > 0.0 && f0.is_finite()) {
            return Err(Error::invalid(format!("source frequency {f0} Hz")));
        }
        if !(z0 > 0.0 && z0.is_finite()) {
            return Err(Error::invalid(format!(
                "lateral distance {z0} m must be positive (a dead-center crossing is abrupt)"
            )));
        }
        if !y0.is_finite() {
            return Err(Error::invalid(format!("initial offset {y0} m")));
        }
        for v in [v_source, v_receiver] {
            if !(v.is_finite() && v.abs() < SPEED_OF_SOUND) {
                return Err(Error::invalid(format!("speed {v} m/s is not subsonic")));
            }
        }
        Ok(DopplerPath {
            f0,
            y0,
            z0,
            v_source,
            v_receiver,
        })
    }

    /// Axial gap between source and receiver at sample `i`.
    pub fn offset_at(&self, i: usize, rate: SampleRate) -> f64 {
        self.y0 + (self.v_source - self.v_receiver) * i as f64 / rate.as_f64()
    }

    /// Straight-line distance at sample `i`.
    pub fn distance_at(&self, i: usize, rate: SampleRate) -> f64 {
        let y = self.offset_at(i, rate);
        (y * y + self.z0 * self.z0).sqrt()
    }

    /// Instantaneous frequency at the receiver.
    pub fn frequency_at(&self, i: usize, rate: SampleRate) -> f64 {
        let y = self.offset_at(i, rate);
        let d = self.distance_at(i, rate);
        self.f0 * (SPEED_OF_SOUND + self.v_receiver * y / d)
            / (SPEED_OF_SOUND + self.v_source * y / d)
    }

    /// Instantaneous amplitude factor (inverse-distance, with the relative
    /// speed correction).
    pub fn amplitude_at(&self, i: usize, rate: SampleRate) -> f64 {
        let d = self.distance_at(i, rate);
        self.z0 / d * ((self.v_receiver - self.v_source) / SPEED_OF_SOUND + 1.0).sqrt()
    }
}

/// Render the passing source: per-sample frequency through the accumulated
/// table lookup, scaled by the per-sample amplitude.
pub fn doppler_render(
    path: &DopplerPath,
    table: &WaveTable,
    delta: f64,
    rate: SampleRate,
) -> Result<SampleBuffer> {
    let n = duration_to_samples(delta, rate)?;
    let mut samples = osc::synth_with_freq(table, n, rate, |i| path.frequency_at(i, rate));
    for (i, s) in samples.iter_mut().enumerate() {
        *s *= path.amplitude_at(i, rate);
    }
    Ok(SampleBuffer::from_channels_unchecked(rate, vec![samples]))
}

/// Statistical room response: a leading unit impulse, sparse early
/// reflections over the first period, and a colored-noise tail, all under
/// one exponential decay.
#[derive(Debug, Clone)]
pub struct ReverbSpec {
    /// Length of the early-reflection period, seconds.
    pub first_period: f64,
    /// Total response length, seconds.
    pub total: f64,
    /// Level the decay reaches at the final sample; must be negative dB.
    pub decay_db: Decibels,
    /// Tail noise color: brown (default) or pink.
    pub tail_color: NoiseColor,
    pub seed: u64,
}

impl ReverbSpec {
    pub fn new(first_period: f64, total: f64, decay_db: Decibels, seed: u64) -> Self {
        ReverbSpec {
            first_period,
            total,
            decay_db,
            tail_color: NoiseColor::Brown,
            seed,
        }
    }

    pub fn with_tail_color(mut self, color: NoiseColor) -> Self {
        self.tail_color = color;
        self
    }
}

/// Build the reverberation impulse response.
///
/// Sample 0 is exactly 1. Each sample `i` of the first period carries an
/// impulse with probability `(i / len_first)^2` at the decay envelope's
/// level `10^((decay_db/20) * i/(len_total-1))`; the tail is unit-peak
/// colored noise under the same envelope. Convolving dry sound with the
/// result auralizes it.
pub fn reverb_impulse(spec: &ReverbSpec, rate: SampleRate) -> Result<ImpulseResponse> {
    if !(spec.first_period > 0.0 && spec.total > spec.first_period) {
        return Err(Error::invalid(format!(
            "reverb periods {} / {} s",
            spec.first_period, spec.total
        )));
    }
    if !(spec.decay_db.value() < 0.0) {
        return Err(Error::invalid(format!(
            "reverb decay {} dB must be negative",
            spec.decay_db.value()
        )));
    }
    if spec.tail_color != NoiseColor::Brown && spec.tail_color != NoiseColor::Pink {
        return Err(Error::invalid(format!(
            "reverb tail must be brown or pink noise, not {:?}",
            spec.tail_color
        )));
    }
    let len_first = duration_to_samples(spec.first_period, rate)?;
    let len_total = duration_to_samples(spec.total, rate)?;
    if len_first < 1 || len_total <= len_first {
        return Err(Error::invalid(format!(
            "reverb too short at this rate: {len_first} / {len_total} samples"
        )));
    }
    let envelope =
        |i: usize| 10f64.powf(spec.decay_db.value() / 20.0 * i as f64 / (len_total - 1) as f64);
    let mut r = vec![0.0; len_total];
    r[0] = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for i in 1..len_first {
        let p = (i as f64 / len_first as f64).powi(2);
        if rng.gen::<f64>() < p {
            r[i] = envelope(i);
        }
    }
    let tail_spec = NoiseSpec::new(spec.tail_color, len_total - len_first, rate, spec.seed);
    let tail = generate(&tail_spec)?;
    let peak = tail.channel(0).iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        for (i, &s) in tail.channel(0).iter().enumerate() {
            r[len_first + i] = envelope(len_first + i) * s / peak;
        }
    }
    ImpulseResponse::new(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osc::{build_wavetable, synth_note, WaveShape};
    use crate::spectral;
    use std::f64::consts::PI;

    fn rate() -> SampleRate {
        SampleRate::default()
    }

    #[test]
    fn median_plane_has_no_differences() {
        let (itd, iid) = itd_iid(&SourcePosition::new(0.0, 1.0)).unwrap();
        assert_eq!(itd, 0.0);
        assert_eq!(iid.value(), 0.0);
    }

    #[test]
    fn side_source_reference_values() {
        let (itd, iid) = itd_iid(&SourcePosition::new(1.0, 0.0)).unwrap();
        let d_right: f64 = 1.0 - 0.1075;
        let d_left: f64 = 1.0 + 0.1075;
        assert!((itd - 0.215 / SPEED_OF_SOUND).abs() < 1e-15);
        assert!((itd - 6.265e-4).abs() < 1e-7);
        assert!((iid.value() - 20.0 * (d_right / d_left).log10()).abs() < 1e-12);
        assert!((iid.value() + 1.874).abs() < 1e-3);
    }

    #[test]
    fn mirroring_negates_both_cues() {
        for &(x, y) in &[(1.0, 0.0), (0.3, 0.7), (2.0, -1.0), (0.05, 0.01)] {
            let (itd, iid) = itd_iid(&SourcePosition::new(x, y)).unwrap();
            let (itd_m, iid_m) = itd_iid(&SourcePosition::new(-x, y)).unwrap();
            assert_eq!(itd_m, -itd);
            assert!((iid_m.value() + iid.value()).abs() < 1e-12);
        }
    }

    #[test]
    fn itd_bounded_by_ear_spacing() {
        for ix in -10..=10 {
            for iy in -10..=10 {
                let pos = SourcePosition::new(ix as f64 * 0.3, iy as f64 * 0.3);
                if let Ok((itd, _)) = itd_iid(&pos) {
                    assert!(itd.abs() <= DEFAULT_EAR_SPACING / SPEED_OF_SOUND + 1e-15);
                }
            }
        }
    }

    #[test]
    fn ear_coincidence_rejected() {
        assert!(itd_iid(&SourcePosition::new(0.1075, 0.0)).is_err());
        assert!(itd_iid(&SourcePosition::new(-0.1075, 0.0)).is_err());
    }

    #[test]
    fn azimuth_reference_angles() {
        assert_eq!(azimuth(&SourcePosition::new(0.0, 1.0)).unwrap(), PI / 2.0);
        assert_eq!(azimuth(&SourcePosition::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(azimuth(&SourcePosition::new(1.0, 1.0)).unwrap(), PI / 4.0);
        assert!(azimuth(&SourcePosition::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn median_plane_localization_copies_channels() {
        let buf = SampleBuffer::from_mono(rate(), vec![0.5, -0.25, 0.75]).unwrap();
        let out = localize(&buf, &SourcePosition::new(0.0, 2.0)).unwrap();
        assert_eq!(out.channel(0), buf.channel(0));
        assert_eq!(out.channel(1), buf.channel(0));
    }

    #[test]
    fn right_source_leads_right_channel() {
        let buf = SampleBuffer::from_mono(rate(), vec![1.0, 2.0, 3.0]).unwrap();
        let out = localize(&buf, &SourcePosition::new(1.0, 0.0)).unwrap();
        // floor(6.2646e-4 * 44100) = 27.
        assert_eq!(out.len(), 3 + 27);
        assert_eq!(out.channel(1)[0], 1.0);
        let iid_a = (1.0 - 0.1075) / (1.0 + 0.1075);
        for i in 0..3 {
            assert_eq!(out.channel(0)[27 + i], buf.channel(0)[i] * iid_a);
        }
        assert!(out.channel(0)[..27].iter().all(|&s| s == 0.0));
        // Energy ratio equals the square of the intensity ratio.
        let p = crate::buffer::power(&out).unwrap();
        assert!((p[0] / p[1] - iid_a * iid_a).abs() < 1e-12);
    }

    #[test]
    fn left_source_mirrors_with_floored_delay() {
        let buf = SampleBuffer::from_mono(rate(), vec![1.0, 2.0, 3.0]).unwrap();
        let out = localize(&buf, &SourcePosition::new(-1.0, 0.0)).unwrap();
        // The delay count floors before the sign is dropped, so the mirror
        // case lands on 28 samples, not 27.
        assert_eq!(out.len(), 3 + 28);
        assert_eq!(out.channel(0)[0], 1.0);
        let scale = (1.0 - 0.1075) / (1.0 + 0.1075);
        for i in 0..3 {
            assert!((out.channel(1)[28 + i] - buf.channel(0)[i] * scale).abs() < 1e-12);
        }
    }

    #[test]
    fn doppler_shift_reference_cases() {
        assert_eq!(doppler_shift(1000.0, 0.0, 0.0), 1000.0);
        assert!((doppler_shift(1000.0, 0.0, 34.32) - 1100.0).abs() < 1e-9);
        assert!((doppler_shift(1100.0, 34.32, 0.0) - 1000.0).abs() < 1e-9);
        // Reciprocity.
        let f = doppler_shift(doppler_shift(440.0, 25.0, -10.0), -10.0, 25.0);
        assert!((f - 440.0).abs() < 1e-12);
    }

    #[test]
    fn static_path_is_a_scaled_note() {
        let table = build_wavetable(WaveShape::Sine, 1024).unwrap();
        let path = DopplerPath::new(440.0, 3.0, 4.0, 0.0, 0.0).unwrap();
        let out = doppler_render(&path, &table, 0.1, rate()).unwrap();
        let plain = synth_note(&table, 440.0, 0.1, rate()).unwrap();
        let amp = 4.0 / 5.0; // z0 / sqrt(y0^2 + z0^2)
        for (a, b) in out.channel(0).iter().zip(plain.channel(0)) {
            assert_eq!(*a, b * amp);
        }
    }

    #[test]
    fn passing_source_frequency_only_falls() {
        let path = DopplerPath::new(1000.0, -100.0, 5.0, 20.0, 0.0).unwrap();
        let n = 10 * rate().value() as usize;
        let mut prev = f64::INFINITY;
        for i in (0..n).step_by(441) {
            let f = path.frequency_at(i, rate());
            assert!(f <= prev + 1e-12, "sample {i}: {f} after {prev}");
            prev = f;
        }
        let first = path.frequency_at(0, rate());
        let last = path.frequency_at(n - 1, rate());
        assert!(first > 1000.0 && last < 1000.0);
        // Closest approach: unit distance factor.
        let mid = (100.0 / 20.0 * rate().as_f64()) as usize;
        assert!((path.amplitude_at(mid, rate()) - ((0.0 - 20.0) / SPEED_OF_SOUND + 1.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn distant_path_degenerates_to_pure_tone() {
        let table = build_wavetable(WaveShape::Sine, 1 << 16).unwrap();
        let path = DopplerPath::new(441.0, -50.0, 1e9, 30.0, 0.0).unwrap();
        let out = doppler_render(&path, &table, 1.0, rate()).unwrap();
        let spec = spectral::forward(&out).unwrap();
        let peak = spectral::peak_frequency(&spec, 100.0, 2000.0).unwrap();
        // One bin of a 1-second transform is 1 Hz.
        assert!((peak - 441.0).abs() <= 1.0, "peak {peak}");
    }

    #[test]
    fn path_validation() {
        assert!(DopplerPath::new(440.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(DopplerPath::new(440.0, 0.0, 1.0, 400.0, 0.0).is_err());
        assert!(DopplerPath::new(0.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn reverb_reference_lengths() {
        let spec = ReverbSpec::new(0.1, 1.9, Decibels(-60.0), 42);
        let r = reverb_impulse(&spec, rate()).unwrap();
        assert_eq!(r.len(), 83_790);
        assert_eq!(r.samples()[0], 1.0);
    }

    #[test]
    fn reverb_early_impulse_count_matches_probability_law() {
        // E[count] = sum (i/n)^2 over the first period ~= n/3.
        let mut total = 0usize;
        let seeds = 20;
        for seed in 0..seeds {
            let spec = ReverbSpec::new(0.1, 0.4, Decibels(-60.0), seed);
            let r = reverb_impulse(&spec, rate()).unwrap();
            total += r.samples()[1..4410].iter().filter(|&&s| s != 0.0).count();
        }
        let mean = total as f64 / seeds as f64;
        let expected = 4410.0 / 3.0;
        assert!(
            (mean - expected).abs() < 0.05 * expected,
            "mean count {mean} vs {expected}"
        );
    }

    #[test]
    fn reverb_respects_decay_envelope() {
        let spec = ReverbSpec::new(0.05, 0.5, Decibels(-40.0), 7);
        let r = reverb_impulse(&spec, rate()).unwrap();
        let n = r.len();
        for (i, &s) in r.samples().iter().enumerate().skip(1) {
            let env = 10f64.powf(-40.0 / 20.0 * i as f64 / (n - 1) as f64);
            assert!(s.abs() <= env + 1e-12, "sample {i}: {s} over {env}");
        }
        assert!(r.samples()[n - 1].abs() <= 10f64.powf(-40.0 / 20.0) + 1e-12);
    }

    #[test]
    fn reverb_is_deterministic_and_validated() {
        let spec = ReverbSpec::new(0.05, 0.2, Decibels(-30.0), 3);
        let a = reverb_impulse(&spec, rate()).unwrap();
        let b = reverb_impulse(&spec, rate()).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert!(reverb_impulse(&ReverbSpec::new(0.5, 0.2, Decibels(-30.0), 3), rate()).is_err());
        assert!(reverb_impulse(&ReverbSpec::new(0.1, 0.5, Decibels(3.0), 3), rate()).is_err());
        let white = ReverbSpec::new(0.1, 0.5, Decibels(-30.0), 3)
            .with_tail_color(NoiseColor::White);
        assert!(reverb_impulse(&white, rate()).is_err());
        let pink = ReverbSpec::new(0.1, 0.5, Decibels(-30.0), 3)
            .with_tail_color(NoiseColor::Pink);
        assert!(reverb_impulse(&pink, rate()).is_ok());
    }
}
