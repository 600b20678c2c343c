//! Acceptance checks, one test per criterion. Each prints a single
//! pass/FAIL line; a FAIL panics with the measured values so nothing is
//! quietly out of tolerance.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use sonum::buffer::{db_difference, db_to_gain, duration_to_samples, Decibels, SampleBuffer, SampleRate};
use sonum::filter::{design_iir, FilterKind, IirCoefficients};
use sonum::modulation::{adsr_envelope, am, bessel_j, fm, tremolo, vibrato, AdsrSpec, EnvelopeMode, OscillatorPattern};
use sonum::noise::{build_spectrum, generate, NoiseColor, NoiseSpec};
use sonum::osc::{build_wavetable, synth_note, WaveShape, DEFAULT_TABLE_LEN};
use sonum::spatial::{doppler_shift, itd_iid, reverb_impulse, ReverbSpec, SourcePosition, DEFAULT_EAR_SPACING, SPEED_OF_SOUND};
use sonum::spectral::{conjugate_pair_count, forward, inverse, reconstruct_real};
use sonum::structure::{alternating_cycle, cycle_sequence, golden_ratio_errors, hunt_peal_generators, lucas_sequence, Permutation, GOLDEN_RATIO};
use sonum::theory::{classify_interval, diatonic_mode_kappa, make_scale, IntervalClass, Tuning, SCALE_NAMES};
use sonum::wav::WavFile;
use sonum::Complex64;
use sonum::{demo, render_demo, DEMO_NAMES};

const RATE: SampleRate = SampleRate::CD;

struct Criterion {
    number: u32,
    label: &'static str,
    failures: Vec<String>,
    started: Instant,
}

impl Criterion {
    fn new(number: u32, label: &'static str) -> Self {
        Criterion {
            number,
            label,
            failures: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn near(&mut self, got: f64, want: f64, tol: f64, what: &str) {
        self.check((got - want).abs() <= tol, || {
            format!("{what}: got {got}, want {want} +- {tol}")
        });
    }

    fn runtime_under(&mut self, seconds: f64) {
        let elapsed = self.started.elapsed().as_secs_f64();
        self.check(elapsed < seconds, || {
            format!("runtime {elapsed:.2} s exceeds {seconds} s")
        });
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {:2} {}: pass", self.number, self.label);
        } else {
            println!("criterion {:2} {}: FAIL", self.number, self.label);
            panic!(
                "criterion {} {}: {}",
                self.number,
                self.label,
                self.failures.join("; ")
            );
        }
    }
}

fn sine_tone(freq: f64, delta: f64) -> SampleBuffer {
    let table = build_wavetable(WaveShape::Sine, DEFAULT_TABLE_LEN).unwrap();
    synth_note(&table, freq, delta, RATE).unwrap()
}

#[test]
fn a01_level_algebra() {
    let mut c = Criterion::new(1, "level algebra");
    let x = sine_tone(441.0, 0.2);
    let doubled = x.scaled(2.0).unwrap();
    c.near(
        db_difference(&doubled, &x).unwrap().value(),
        6.0206,
        1e-6,
        "doubling in dB",
    );
    c.near(db_to_gain(Decibels(10.0)), 3.16228, 1e-5, "gain of 10 dB");
    c.runtime_under(1.0);
    c.finish();
}

#[test]
fn a02_waveform_spectra() {
    let mut c = Criterion::new(2, "waveform spectra");
    let harmonics = 49usize; // 49 * 441 Hz is the last harmonic below Nyquist

    let magnitudes = |shape: WaveShape| -> Vec<f64> {
        let table = build_wavetable(shape, DEFAULT_TABLE_LEN).unwrap();
        let note = synth_note(&table, 441.0, 1.0, RATE).unwrap();
        let spectrum = forward(&note).unwrap();
        sonum::spectral::harmonic_magnitudes(&spectrum, 441.0, harmonics).unwrap()
    };
    let fit_slope = |mags: &[f64], keep: &dyn Fn(usize) -> bool| -> f64 {
        let points: Vec<(f64, f64)> = mags
            .iter()
            .enumerate()
            .filter(|&(i, &m)| keep(i + 1) && m > 0.0)
            .map(|(i, &m)| (((i + 1) as f64).log2(), 20.0 * m.log10()))
            .collect();
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let num: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        num / den
    };

    for shape in [WaveShape::Square, WaveShape::Triangle] {
        let mags = magnitudes(shape);
        let worst_even = (2..=harmonics)
            .step_by(2)
            .map(|k| mags[k - 1] / mags[0])
            .fold(0.0f64, f64::max);
        c.check(worst_even <= 1e-3, || {
            format!(
                "{shape:?} even harmonics reach {:.1} dB of the fundamental",
                20.0 * worst_even.log10()
            )
        });
    }
    c.near(
        fit_slope(&magnitudes(WaveShape::Sawtooth), &|_| true),
        -6.02,
        1.0,
        "sawtooth rolloff dB/oct",
    );
    c.near(
        fit_slope(&magnitudes(WaveShape::Triangle), &|k| k % 2 == 1),
        -12.04,
        1.5,
        "triangle rolloff dB/oct",
    );
    c.runtime_under(5.0);
    c.finish();
}

#[test]
fn a03_transform_pairing_and_reconstruction() {
    let mut c = Criterion::new(3, "transform pairing and reconstruction");
    for n in 1..=256usize {
        let brute = (1..n).filter(|&k| k < n - k).count();
        c.check(conjugate_pair_count(n) == brute, || {
            format!(
                "pair count at {n}: got {}, brute force {brute}",
                conjugate_pair_count(n)
            )
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    for n in 1..=64usize {
        let samples: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let buf = SampleBuffer::from_mono(RATE, samples).unwrap();
        let spectrum = forward(&buf).unwrap();
        let direct = inverse(&spectrum).unwrap();
        let paired = reconstruct_real(&spectrum).unwrap();
        let worst = direct
            .channel(0)
            .iter()
            .zip(paired.channel(0))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        c.check(worst <= 1e-9, || {
            format!("length {n}: reconstruction differs from direct inverse by {worst:e}")
        });
    }
    c.finish();
}

#[test]
fn a04_noise_slopes() {
    let mut c = Criterion::new(4, "colored noise slopes");
    let cases = [
        (NoiseColor::White, 0.0),
        (NoiseColor::Pink, -3.01),
        (NoiseColor::Brown, -6.02),
        (NoiseColor::Blue, 3.01),
        (NoiseColor::Violet, 6.02),
    ];
    for (i, &(color, want)) in cases.iter().enumerate() {
        let spec = NoiseSpec::new(color, 1 << 17, RATE, 40 + i as u64).with_band(100.0, Some(10_000.0));
        let buf = generate(&spec).unwrap();
        let measured = forward(&buf).unwrap();
        let slope = sonum::spectral::slope_db_per_octave(&measured, 100.0, 10_000.0).unwrap();
        c.near(slope, want, 0.1, &format!("{color:?} slope dB/oct"));

        let built = build_spectrum(&spec).unwrap();
        let n = built.len();
        c.check(built.coeffs()[0].norm() == 0.0, || {
            format!("{color:?} carries a DC bias")
        });
        if color != NoiseColor::White {
            let zero_below_band = (0..n).all(|k| {
                let f = built.bin_frequency(k.min(n - k));
                f >= 100.0 || built.coeffs()[k].norm() == 0.0
            });
            c.check(zero_below_band, || {
                format!("{color:?} carries energy below the 100 Hz band edge")
            });
        }
    }
    c.runtime_under(10.0);
    c.finish();
}

/// Filter response at a frequency given as a fraction of the sample rate,
/// evaluated directly from the difference-equation coefficients.
fn response(coeffs: &IirCoefficients, f: f64) -> f64 {
    let z = |k: usize| Complex64::from_polar(1.0, -TAU * f * k as f64);
    let num: Complex64 = coeffs
        .feedforward()
        .iter()
        .enumerate()
        .map(|(j, &a)| a * z(j))
        .sum();
    let den: Complex64 = Complex64::new(1.0, 0.0)
        - coeffs
            .feedback()
            .iter()
            .enumerate()
            .map(|(k, &b)| b * z(k + 1))
            .sum::<Complex64>();
    (num / den).norm()
}

#[test]
fn a05_iir_recipes() {
    let mut c = Criterion::new(5, "recursive filter recipes");
    for fc in [0.01, 0.05, 0.1] {
        let lp = design_iir(FilterKind::LowPass, fc, None).unwrap();
        let db = 20.0 * (response(&lp, fc) / response(&lp, 0.0)).log10();
        c.near(db, -3.0, 1.0, &format!("lowpass level at fc={fc}"));

        let hp = design_iir(FilterKind::HighPass, fc, None).unwrap();
        let db = 20.0 * (response(&hp, fc) / response(&hp, 0.5)).log10();
        c.near(db, -3.0, 1.0, &format!("highpass level at fc={fc}"));
    }
    let fc = 0.25;
    for bw in [0.02, 0.05] {
        let bp = design_iir(FilterKind::BandPass, fc, Some(bw)).unwrap();
        let peak = response(&bp, fc);
        for f in [fc - bw, fc + bw] {
            c.near(
                response(&bp, f) / peak,
                0.707,
                0.1,
                &format!("bandpass relative level at {f} (bw={bw})"),
            );
        }
        let br = design_iir(FilterKind::BandReject, fc, Some(bw)).unwrap();
        let passband = response(&br, 0.0);
        for f in [fc - bw, fc + bw] {
            c.near(
                response(&br, f) / passband,
                0.707,
                0.1,
                &format!("bandreject relative level at {f} (bw={bw})"),
            );
        }
        let notch = 20.0 * (response(&br, fc) / passband).log10();
        c.check(notch <= -26.0, || {
            format!("notch depth {notch:.1} dB at fc (bw={bw})")
        });
    }
    c.finish();
}

#[test]
fn a06_fm_and_am_sidebands() {
    let mut c = Criterion::new(6, "modulation sidebands");
    let table = build_wavetable(WaveShape::Sine, DEFAULT_TABLE_LEN).unwrap();

    // One second at 44100 puts every 200 Hz sideband on an exact bin.
    let buf = fm(&table, 2000.0, 200.0, 200.0, 1.0, RATE).unwrap();
    let spectrum = forward(&buf).unwrap();
    let mag = |f: usize| spectrum.coeffs()[f].norm();
    let ratio = (mag(1800) + mag(2200)) / 2.0 / mag(2000);
    let want = bessel_j(1, 1.0) / bessel_j(0, 1.0);
    c.check((ratio / want - 1.0).abs() <= 0.05, || {
        format!("first FM sideband ratio {ratio:.4}, series oracle {want:.4}")
    });

    let am_buf = am(&sine_tone(2000.0, 1.0), 200.0, 0.5).unwrap();
    let spectrum = forward(&am_buf).unwrap();
    let mag = |f: usize| spectrum.coeffs()[f].norm();
    let ratio = (mag(1800) + mag(2200)) / 2.0 / mag(2000);
    c.near(ratio, 0.25, 0.02, "AM sideband/carrier ratio");
    c.finish();
}

#[test]
fn a07_vibrato_and_tremolo_depth() {
    let mut c = Criterion::new(7, "vibrato and tremolo depth");
    let table = build_wavetable(WaveShape::Sine, DEFAULT_TABLE_LEN).unwrap();
    let pattern = OscillatorPattern::sine(3.0).unwrap();

    let buf = vibrato(&table, 1000.0, 2.0, RATE, &pattern, 12.0).unwrap();
    let s = buf.mono().unwrap();
    let mut crossings = Vec::new();
    for i in 1..s.len() {
        if (s[i - 1] < 0.0) != (s[i] < 0.0) {
            crossings.push((i - 1) as f64 + s[i - 1] / (s[i - 1] - s[i]));
        }
    }
    let (mut fast, mut slow) = (0.0f64, f64::INFINITY);
    for w in crossings.windows(2) {
        let f = RATE.as_f64() / (2.0 * (w[1] - w[0]));
        fast = fast.max(f);
        slow = slow.min(f);
    }
    c.check((fast / 2000.0 - 1.0).abs() <= 0.01, || {
        format!("highest instantaneous frequency {fast:.1} Hz, want 2000 +- 1%")
    });
    c.check((slow / 500.0 - 1.0).abs() <= 0.01, || {
        format!("lowest instantaneous frequency {slow:.1} Hz, want 500 +- 1%")
    });

    let trem = tremolo(&sine_tone(441.0, 2.0), &pattern, Decibels(12.0)).unwrap();
    // 441 Hz at 44100 repeats every 100 samples, so each chunk holds one
    // full carrier cycle and its peak tracks the gain.
    let peaks: Vec<f64> = trem
        .mono()
        .unwrap()
        .chunks(100)
        .map(|w| w.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
        .collect();
    let ratio = peaks.iter().fold(0.0f64, |m, &p| m.max(p))
        / peaks.iter().fold(f64::INFINITY, |m, &p| m.min(p));
    c.check((ratio / 10f64.powf(1.2) - 1.0).abs() <= 0.02, || {
        format!("envelope max/min {ratio:.3}, want 10^1.2 +- 2%")
    });
    c.finish();
}

#[test]
fn a08_adsr_continuity() {
    let mut c = Criterion::new(8, "envelope continuity");
    let n = duration_to_samples(1.0, RATE).unwrap();
    let n_a = duration_to_samples(0.1, RATE).unwrap();
    let n_r = duration_to_samples(0.3, RATE).unwrap();
    for mode in [EnvelopeMode::Exponential, EnvelopeMode::Linear] {
        let spec = AdsrSpec::new(0.1, 0.2, 0.3, 0.5).with_mode(mode);
        let env = adsr_envelope(&spec, n, RATE).unwrap();
        c.near(env[n_a - 1], 1.0, 1e-6, &format!("{mode:?} attack end"));
        let sustain = &env[n - n_r - 100..n - n_r];
        c.check(sustain.iter().all(|&v| (v - 0.5).abs() <= 1e-6), || {
            format!("{mode:?} sustain drifts from 0.5")
        });
        let last_want = match mode {
            EnvelopeMode::Exponential => spec.floor,
            EnvelopeMode::Linear => 0.0,
        };
        c.near(env[n - 1], last_want, 1e-6, &format!("{mode:?} release end"));
    }
    c.finish();
}

#[test]
fn a09_spatial_cues() {
    let mut c = Criterion::new(9, "spatial cues");
    let (itd, iid) = itd_iid(&SourcePosition::new(0.0, 1.0)).unwrap();
    c.check(itd == 0.0 && iid.value() == 0.0, || {
        format!("median plane gives ITD {itd}, IID {}", iid.value())
    });

    let (itd, iid) = itd_iid(&SourcePosition::new(1.0, 0.0)).unwrap();
    c.near(itd, 6.265e-4, 1e-7, "ITD of a source at (1, 0)");
    c.near(iid.value(), -1.874, 0.001, "IID of a source at (1, 0)");

    let bound = DEFAULT_EAR_SPACING / SPEED_OF_SOUND;
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    for _ in 0..1000 {
        let pos = SourcePosition::new(rng.gen_range(-10.0..10.0), rng.gen_range(0.05..10.0));
        let (itd, _) = itd_iid(&pos).unwrap();
        c.check(itd.abs() <= bound * (1.0 + 1e-12), || {
            format!("ITD {itd} beyond ear-spacing bound {bound} at ({}, {})", pos.x, pos.y)
        });
    }

    for _ in 0..100 {
        let f = rng.gen_range(20.0..5000.0);
        let a = rng.gen_range(-100.0..100.0);
        let b = rng.gen_range(-100.0..100.0);
        let back = doppler_shift(doppler_shift(f, a, b), b, a);
        c.check((back - f).abs() <= 1e-12 * f, || {
            format!("shift there-and-back moved {f} Hz to {back} Hz")
        });
    }
    c.finish();
}

#[test]
fn a10_reverb_profile() {
    let mut c = Criterion::new(10, "reverberation profile");
    let first = duration_to_samples(0.1, RATE).unwrap();
    let total = duration_to_samples(1.9, RATE).unwrap();
    c.check(first == 4410 && total == 83790, || {
        format!("period sample counts {first}/{total}, want 4410/83790")
    });

    let mut counts = Vec::new();
    for seed in 0..20u64 {
        let spec = ReverbSpec::new(0.1, 1.9, Decibels(-80.0), seed);
        let impulse = reverb_impulse(&spec, RATE).unwrap();
        let s = impulse.samples();
        c.check(s.len() == total, || {
            format!("impulse length {} for seed {seed}, want {total}", s.len())
        });
        c.check(s[0] == 1.0, || format!("leading sample {} for seed {seed}", s[0]));
        let tail_dense = s[first..first + 4410].iter().filter(|&&v| v != 0.0).count();
        c.check(tail_dense >= 4366, || {
            format!("noise tail only {tail_dense}/4410 nonzero for seed {seed}")
        });
        counts.push(s[1..first].iter().filter(|&&v| v != 0.0).count() as f64);
    }
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let want = 4410.0 / 3.0;
    c.check((mean / want - 1.0).abs() <= 0.05, || {
        format!("mean early-reflection count {mean:.1}, want {want:.1} +- 5%")
    });
    c.finish();
}

#[test]
fn a11_theory_tables() {
    let mut c = Criterion::new(11, "theory tables");
    let third = Tuning::equal(12, 200.0)
        .unwrap()
        .degree_frequency(make_scale("wholetone").unwrap().offset_of_degree(3))
        .unwrap();
    c.near(third, 282.843, 0.001, "third whole-tone note from 200 Hz");

    let listed: [(&str, &[f64]); 15] = [
        ("chromatic", &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0]),
        ("wholetone", &[0.0, 2.0, 4.0, 6.0, 8.0, 10.0]),
        ("minor-thirds", &[0.0, 3.0, 6.0, 9.0]),
        ("major-thirds", &[0.0, 4.0, 8.0]),
        ("tritones", &[0.0, 6.0]),
        ("aeolian", &[0.0, 2.0, 3.0, 5.0, 7.0, 8.0, 10.0]),
        ("locrian", &[0.0, 1.0, 3.0, 5.0, 6.0, 8.0, 10.0]),
        ("ionian", &[0.0, 2.0, 4.0, 5.0, 7.0, 9.0, 11.0]),
        ("dorian", &[0.0, 2.0, 3.0, 5.0, 7.0, 9.0, 10.0]),
        ("phrygian", &[0.0, 1.0, 3.0, 5.0, 7.0, 8.0, 10.0]),
        ("lydian", &[0.0, 2.0, 4.0, 6.0, 7.0, 9.0, 11.0]),
        ("mixolydian", &[0.0, 2.0, 4.0, 5.0, 7.0, 9.0, 10.0]),
        ("harmonic-minor", &[0.0, 2.0, 3.0, 5.0, 7.0, 8.0, 11.0]),
        (
            "melodic-minor",
            &[0.0, 2.0, 3.0, 5.0, 7.0, 9.0, 11.0, 12.0, 10.0, 8.0, 7.0, 5.0, 3.0, 2.0, 0.0],
        ),
        (
            "harmonic-series",
            &[
                0.0, 12.0, 19.02, 24.0, 27.86, 31.2, 33.69, 36.0, 38.04, 39.86, 41.51,
                43.02, 44.41, 45.69, 46.88, 48.0, 49.05, 50.04, 50.98, 51.86,
            ],
        ),
    ];
    c.check(listed.len() == SCALE_NAMES.len(), || {
        format!("covering {} scales of {}", listed.len(), SCALE_NAMES.len())
    });
    for (name, want) in listed {
        let got = make_scale(name).unwrap();
        c.check(got.offsets() == want, || {
            format!("{name} offsets {:?} differ from the listing", got.offsets())
        });
    }

    for i in 0..=48i64 {
        let want = match i % 12 {
            0 | 7 => IntervalClass::PerfectConsonance,
            3 | 4 | 8 | 9 => IntervalClass::ImperfectConsonance,
            1 | 11 => IntervalClass::HarshDissonance,
            2 | 10 => IntervalClass::MildDissonance,
            5 => IntervalClass::Contextual,
            _ => IntervalClass::Tritone,
        };
        let got = classify_interval(i).unwrap();
        c.check(got == want, || {
            format!("interval {i} classified {got:?}, want {want:?}")
        });
    }

    let rotated = diatonic_mode_kappa(2).unwrap();
    let lydian = make_scale("lydian").unwrap();
    c.check(rotated.offsets() == lydian.offsets(), || {
        format!("rotation 2 gives {:?}, lydian is {:?}", rotated.offsets(), lydian.offsets())
    });
    c.finish();
}

#[test]
fn a12_structure_sequences() {
    let mut c = Criterion::new(12, "structure sequences");
    let (first, second) = hunt_peal_generators();
    let rows = alternating_cycle(&first, &second, &[1, 2, 3]).unwrap();
    let want: Vec<Vec<i32>> = vec![
        vec![1, 2, 3],
        vec![2, 1, 3],
        vec![2, 3, 1],
        vec![3, 2, 1],
        vec![3, 1, 2],
        vec![1, 3, 2],
        vec![1, 2, 3],
    ];
    c.check(rows == want, || format!("hunt rows {rows:?}"));

    let mut one_line = Vec::new();
    for a in 0..4usize {
        for b in 0..4usize {
            for d in 0..4usize {
                for e in 0..4usize {
                    if a != b && a != d && a != e && b != d && b != e && d != e {
                        one_line.push(vec![a, b, d, e]);
                    }
                }
            }
        }
    }
    c.check(one_line.len() == 24, || "S4 enumeration is off".to_string());
    for map in one_line {
        let p = Permutation::from_one_line(map.clone()).unwrap();
        let rows = cycle_sequence(&p, &[0, 1, 2, 3]).unwrap();
        c.check(p.order() == rows.len() as u64 - 1, || {
            format!(
                "{map:?}: order {} but cycle sequence has {} rows",
                p.order(),
                rows.len()
            )
        });
    }

    let seq = lucas_sequence(1.0, 1.0, 31).unwrap();
    c.near(seq[30] / seq[29], GOLDEN_RATIO, 1e-6, "additive ratio at term 30");

    let errors = golden_ratio_errors(&lucas_sequence(1.0, 100.0, 6).unwrap());
    for (got, want) in errors.iter().zip([6080.33, -37.57, 23.0, -7.14]) {
        c.near(*got, want, 0.01, "golden-ratio percentage error");
    }
    c.finish();
}

/// Frozen digest of the shipped score rendered to WAV bytes.
const FINALE_WAV_SHA256: &str = "8af3cc325bcd588c1e330a95d4eb58202482ce2107458127689f73a05a687c96";

fn wav_sha256(buf: &SampleBuffer) -> String {
    let bytes = WavFile::from_buffer(buf).unwrap().to_bytes();
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    format!("{:x}", hasher.finalize())
}

#[test]
fn a13_end_to_end() {
    let mut c = Criterion::new(13, "end to end");
    for name in DEMO_NAMES {
        let one = wav_sha256(&render_demo(name).unwrap());
        let two = wav_sha256(&render_demo(name).unwrap());
        c.check(one == two, || format!("demo {name} hash changed between runs"));
        if name == "finale" {
            c.check(one == FINALE_WAV_SHA256, || {
                format!("finale hash {one} differs from the frozen {FINALE_WAV_SHA256}")
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1300);
    let samples: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let original = SampleBuffer::from_mono(RATE, samples).unwrap();
    let bytes = WavFile::from_buffer(&original).unwrap().to_bytes();
    let read = WavFile::from_bytes(&bytes).unwrap().to_buffer().unwrap();
    let worst = original
        .channel(0)
        .iter()
        .zip(read.channel(0))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    c.check(worst <= 1.0 / 32767.0, || {
        format!("round trip error {worst:e} exceeds one quantization step")
    });

    c.check(!demo::FINALE_SCORE.is_empty(), || "shipped score is empty".to_string());
    c.runtime_under(60.0);
    c.finish();
}
