//! Built-in showcase renders, one per area of the library.
//!
//! Every demo is fully seeded, so repeated renders of the same name are
//! bit-identical. [`DEMO_NAMES`] lists them; [`render_demo`] builds one.

use rustfft::num_complex::Complex64;

use crate::buffer::{concat, duration_to_samples, mix, normalize, Decibels, SampleBuffer, SampleRate};
use crate::error::{Error, Result};
use crate::filter::{apply_iir, convolve, delay, design_iir, FilterKind};
use crate::modulation::{adsr, fm, tremolo, vibrato, AdsrSpec, OscillatorPattern};
use crate::noise::{generate, NoiseColor, NoiseSpec};
use crate::osc::{build_wavetable, from_sampled_period, synth_note, WaveShape, DEFAULT_TABLE_LEN};
use crate::render::render;
use crate::score::parse_score;
use crate::spatial::{doppler_render, localize, reverb_impulse, DopplerPath, ReverbSpec, SourcePosition};
use crate::spectral::{inverse, Spectrum};
use crate::structure::{transform_motif, Motif, MotifEvent, MotifTransform};
use crate::theory::{build_chord, make_scale, ChordQuality, Seventh, Tuning};

/// The available demo names, in presentation order.
pub const DEMO_NAMES: [&str; 10] = [
    "levels",
    "shapes",
    "partials",
    "colors",
    "sweepbank",
    "expression",
    "passing",
    "cadence",
    "rounds",
    "finale",
];

/// The score document behind the `finale` demo, also shipped in the repo.
pub const FINALE_SCORE: &str = include_str!("../../../scores/demo.score");

const RATE: SampleRate = SampleRate::CD;

fn sine_table() -> Result<crate::osc::WaveTable> {
    build_wavetable(WaveShape::Sine, DEFAULT_TABLE_LEN)
}

/// Duplicate a mono buffer into both channels.
fn stereo(buf: &SampleBuffer) -> Result<SampleBuffer> {
    let ch = buf.mono()?.to_vec();
    SampleBuffer::from_stereo(buf.rate(), ch.clone(), ch)
}

/// A 441 Hz tone stepping down in 6 dB increments.
fn levels() -> Result<SampleBuffer> {
    let table = sine_table()?;
    let tone = synth_note(&table, 441.0, 0.35, RATE)?;
    let steps: Result<Vec<SampleBuffer>> = (0..4)
        .map(|k| tone.scaled(0.9 * Decibels(-6.0 * k as f64).gain()))
        .collect();
    concat(&steps?)
}

/// The four built-in waveforms at 220 Hz.
fn shapes() -> Result<SampleBuffer> {
    let shapes = [
        WaveShape::Sine,
        WaveShape::Sawtooth,
        WaveShape::Triangle,
        WaveShape::Square,
    ];
    let notes: Result<Vec<SampleBuffer>> = shapes
        .iter()
        .map(|&s| {
            let table = build_wavetable(s, DEFAULT_TABLE_LEN)?;
            synth_note(&table, 220.0, 0.4, RATE)?.scaled(0.5)
        })
        .collect();
    concat(&notes?)
}

/// A timbre authored directly in the frequency domain: six harmonics at
/// 1/k amplitude become one period via the inverse transform, then play
/// as a wavetable.
fn partials() -> Result<SampleBuffer> {
    let n = 256usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=6usize {
        let amp = 1.0 / k as f64;
        // Magnitude n*amp/2 per conjugate bin yields a cosine of height amp.
        coeffs[k] = Complex64::new(n as f64 * amp / 2.0, 0.0);
        coeffs[n - k] = coeffs[k].conj();
    }
    let period = inverse(&Spectrum::from_parts(RATE, coeffs)?)?;
    let table = from_sampled_period(period.mono()?.to_vec())?;
    let note = synth_note(&table, 220.0, 1.4, RATE)?;
    let shaped = adsr(&note, &AdsrSpec::new(0.05, 0.2, 0.4, 0.6))?;
    normalize(&shaped, 0.8)
}

/// One second split across five noise colors.
fn colors() -> Result<SampleBuffer> {
    let len = duration_to_samples(0.35, RATE)?;
    let colors = [
        NoiseColor::White,
        NoiseColor::Pink,
        NoiseColor::Brown,
        NoiseColor::Blue,
        NoiseColor::Violet,
    ];
    let segments: Result<Vec<SampleBuffer>> = colors
        .iter()
        .enumerate()
        .map(|(i, &color)| {
            let spec =
                NoiseSpec::new(color, len, RATE, 11 + i as u64).with_band(30.0, Some(16000.0));
            normalize(&generate(&spec)?, 0.5)
        })
        .collect();
    concat(&segments?)
}

/// The same white noise through each of the four recursive filters.
fn sweepbank() -> Result<SampleBuffer> {
    let len = duration_to_samples(0.6, RATE)?;
    let noise = generate(&NoiseSpec::new(NoiseColor::White, len, RATE, 5))?;
    let rate = RATE.as_f64();
    let designs = [
        (FilterKind::LowPass, 1200.0, None),
        (FilterKind::HighPass, 3000.0, None),
        (FilterKind::BandPass, 2000.0, Some(500.0)),
        (FilterKind::BandReject, 2000.0, Some(500.0)),
    ];
    let segments: Result<Vec<SampleBuffer>> = designs
        .iter()
        .map(|&(kind, fc, bw)| {
            let coeffs = design_iir(kind, fc / rate, bw.map(|b| b / rate))?;
            normalize(&apply_iir(&noise, &coeffs)?, 0.6)
        })
        .collect();
    concat(&segments?)
}

/// Vibrato, tremolo and an ADSR contour, then a sideband-rich FM tone.
fn expression() -> Result<SampleBuffer> {
    let table = sine_table()?;
    let sung = vibrato(&table, 330.0, 1.6, RATE, &OscillatorPattern::sine(5.0)?, 0.7)?;
    let sung = tremolo(&sung, &OscillatorPattern::sine(3.0)?, Decibels(3.0))?;
    let sung = adsr(&sung, &AdsrSpec::new(0.08, 0.12, 0.3, 0.75))?;
    let bell = fm(&table, 800.0, 120.0, 120.0, 1.2, RATE)?;
    let bell = adsr(&bell, &AdsrSpec::new(0.01, 0.3, 0.5, 0.4))?;
    normalize(&concat(&[sung.scaled(0.8)?, bell.scaled(0.5)?])?, 0.85)
}

/// Reverberated, localized and Doppler-shifted versions of a plain tone.
fn passing() -> Result<SampleBuffer> {
    let table = sine_table()?;
    let beep = adsr(
        &synth_note(&table, 500.0, 0.35, RATE)?,
        &AdsrSpec::new(0.01, 0.05, 0.1, 0.7),
    )?
    .scaled(0.6)?;

    let room = ReverbSpec::new(0.03, 0.4, Decibels(-50.0), 9);
    let wet = convolve(&beep, &reverb_impulse(&room, RATE)?)?;

    let left = localize(&beep, &SourcePosition::new(-2.0, 1.0))?;
    let right = localize(&beep, &SourcePosition::new(2.0, 1.0))?;

    let path = DopplerPath::new(600.0, -40.0, 8.0, 25.0, 0.0)?;
    let pass = doppler_render(&path, &table, 2.2, RATE)?;

    let out = concat(&[stereo(&wet)?, left, right, stereo(&normalize(&pass, 0.6)?)?])?;
    normalize(&out, 0.85)
}

/// A I-IV-V7-I progression spelled with stacked-third chords.
fn cadence() -> Result<SampleBuffer> {
    let tuning = Tuning::default();
    let table = sine_table()?;
    let plan = [
        (60, ChordQuality::Major, Seventh::None),
        (65, ChordQuality::Major, Seventh::None),
        (67, ChordQuality::Major, Seventh::Minor),
        (60, ChordQuality::Major, Seventh::None),
    ];
    let mut chords = Vec::new();
    for &(root, quality, seventh) in &plan {
        let chord = build_chord(quality, seventh, 0, 0);
        let mut voices = Vec::new();
        for &offset in chord.offsets() {
            let f = tuning.degree_frequency((root + offset - 69) as f64)?;
            let note = synth_note(&table, f, 0.55, RATE)?;
            voices.push(adsr(&note, &AdsrSpec::new(0.02, 0.08, 0.15, 0.7))?);
        }
        chords.push(normalize(&mix(&voices)?, 0.7)?);
    }
    concat(&chords)
}

/// Play a motif, then its mirror, tonal inversion and rotation.
fn rounds() -> Result<SampleBuffer> {
    let tuning = Tuning::default();
    let scale = make_scale("ionian")?;
    let mut events = Vec::new();
    for (slot, &degree) in [0i64, 2, 4, 7].iter().enumerate() {
        let steps = 12.0 * 5.0 + scale.offset_of_degree(degree) - 69.0;
        events.push(MotifEvent::new(
            tuning.degree_frequency(steps)?,
            slot as f64 * 0.25,
            0.22,
            0.7,
        ));
    }
    let motif = Motif::new(events)?;
    let variants = [
        transform_motif(&motif, MotifTransform::Retrograde)?,
        transform_motif(&motif, MotifTransform::TonalInversion { scale: &scale })?,
        transform_motif(&motif, MotifTransform::Rotate { positions: 1 })?,
    ];
    let mut sections = vec![play_motif(&motif)?];
    for v in &variants {
        sections.push(play_motif(v)?);
    }
    concat(&sections)
}

fn play_motif(motif: &Motif) -> Result<SampleBuffer> {
    let table = sine_table()?;
    let start = motif
        .events()
        .iter()
        .map(|e| e.onset)
        .fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();
    for event in motif.events() {
        let note = synth_note(&table, event.freq, event.duration, RATE)?;
        let shaped = adsr(&note, &AdsrSpec::new(0.01, 0.03, 0.05, 0.8))?.scaled(event.amplitude)?;
        let offset = duration_to_samples(event.onset - start, RATE)?;
        notes.push(delay(&shaped, offset));
    }
    mix(&notes)
}

/// The shipped score document, parsed and rendered.
fn finale() -> Result<SampleBuffer> {
    render(&parse_score(FINALE_SCORE)?)
}

/// Render a named demo. Unknown names list the catalog.
pub fn render_demo(name: &str) -> Result<SampleBuffer> {
    match name {
        "levels" => levels(),
        "shapes" => shapes(),
        "partials" => partials(),
        "colors" => colors(),
        "sweepbank" => sweepbank(),
        "expression" => expression(),
        "passing" => passing(),
        "cadence" => cadence(),
        "rounds" => rounds(),
        "finale" => finale(),
        other => Err(Error::invalid(format!(
            "unknown demo `{other}`; available: {}",
            DEMO_NAMES.join(", ")
        ))),
    }
}
