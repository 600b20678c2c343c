//! Sample-level audio synthesis and music-structure toolkit.
//!
//! Everything is built on `f64` sample buffers at an explicit rate. The
//! modules stack roughly bottom-up:
//!
//! - [`buffer`]: sample buffers, durations, power and dB algebra
//! - [`osc`]: wavetables, table-lookup notes, glides, fades
//! - [`spectral`]: DFT analysis, reconstruction, slope and peak probes
//! - [`filter`]: single-pole and biquad-style recursive filters, convolution
//! - [`noise`]: spectrally shaped noise colors
//! - [`modulation`]: vibrato, tremolo, FM, AM, envelopes
//! - [`spatial`]: interaural cues, moving sources, reverberation
//! - [`theory`]: tunings, scales, intervals, chords, counterpoint checks
//! - [`structure`]: rhythm grids, motif transforms, permutations
//! - [`score`] / [`render`]: text scores and their realization
//! - [`wav`]: 16-bit PCM file I/O
//! - [`demo`]: built-in demonstration renders

pub mod buffer;
pub mod demo;
pub mod error;
pub mod filter;
pub mod modulation;
pub mod noise;
pub mod osc;
pub mod render;
pub mod score;
pub mod spatial;
pub mod spectral;
pub mod structure;
pub mod theory;
pub mod wav;

pub use buffer::{Decibels, SampleBuffer, SampleRate};
pub use error::{Error, Result};
pub use filter::{FilterKind, IirCoefficients, ImpulseResponse};
pub use modulation::{AdsrSpec, EnvelopeMode, OscillatorPattern};
pub use noise::{NoiseColor, NoiseSpec};
pub use osc::{GlideSpec, WaveShape, WaveTable};
pub use demo::{render_demo, DEMO_NAMES};
pub use render::render;
pub use score::{parse_score, NoteSpec, Score, ScoreEvent};
pub use spatial::{DopplerPath, ReverbSpec, SourcePosition};
pub use spectral::Spectrum;
pub use structure::{Motif, MotifEvent, MotifTransform, Permutation, RhythmGrid};
pub use theory::{Chord, ChordQuality, IntervalClass, Motion, Scale, Tuning};
pub use wav::WavFile;

pub use rustfft::num_complex::Complex64;
