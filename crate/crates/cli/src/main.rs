//! Command line front end: renders score files, synthesizes one-off notes
//! and noise beds, inspects WAV files, and writes the built-in demos.
//!
//! Exit codes: 0 on success, 1 when the command line itself is malformed,
//! 2 when input data or parameters are rejected. All diagnostics go to
//! stderr; only reports and listings go to stdout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use sonum::buffer::{duration_to_samples, normalize, power};
use sonum::noise::generate;
use sonum::score::ModulationSpec;
use sonum::spectral::{forward, peak_frequency, slope_db_per_octave};
use sonum::wav::{read_wav, write_wav};
use sonum::{
    parse_score, render, render_demo, AdsrSpec, NoiseColor, NoiseSpec, NoteSpec, SampleBuffer,
    SampleRate, Score, ScoreEvent, WaveShape, DEMO_NAMES,
};

const RATE_VAR: &str = "SONUM_RATE";

#[derive(Parser)]
#[command(
    name = "sonum",
    version,
    about = "Sample-domain synthesis: scores, notes, noise, and analysis",
    after_help = "Environment:\n  SONUM_RATE  default sample rate in Hz for synth and noise (default 44100)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a score file to WAV
    Render {
        /// Score document
        score: PathBuf,
        /// Output WAV path
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Synthesize a single note to WAV
    Synth {
        /// Frequency in Hz
        #[arg(long, allow_negative_numbers = true)]
        freq: f64,
        /// Duration in seconds
        #[arg(long, allow_negative_numbers = true)]
        dur: f64,
        /// Waveform
        #[arg(long, value_enum, default_value_t = ShapeArg::Sine)]
        shape: ShapeArg,
        /// Envelope as attack:decay:sustain:release (seconds, except sustain level)
        #[arg(long)]
        adsr: Option<String>,
        /// Pitch wobble as rate_hz:semitones
        #[arg(long)]
        vibrato: Option<String>,
        /// Level wobble as rate_hz:db
        #[arg(long)]
        tremolo: Option<String>,
        /// Linear gain applied to the note
        #[arg(long, default_value_t = 1.0)]
        amp: f64,
        /// Output WAV path
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate seeded colored noise to WAV
    Noise {
        /// Spectral color
        #[arg(long, value_enum, default_value_t = ColorArg::White)]
        color: ColorArg,
        /// Length in seconds
        #[arg(long, allow_negative_numbers = true)]
        seconds: f64,
        /// RNG seed; the same seed always produces the same file
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output WAV path
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Report fundamental, spectral slope, and level of a WAV file
    Analyze {
        /// File to inspect
        wav: PathBuf,
    },
    /// Render a built-in demo
    Demo {
        /// Demo name (see --list)
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// Output WAV path (defaults to <name>.wav)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// List available demos and exit
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Sine,
    Square,
    Triangle,
    Sawtooth,
}

impl From<ShapeArg> for WaveShape {
    fn from(s: ShapeArg) -> WaveShape {
        match s {
            ShapeArg::Sine => WaveShape::Sine,
            ShapeArg::Square => WaveShape::Square,
            ShapeArg::Triangle => WaveShape::Triangle,
            ShapeArg::Sawtooth => WaveShape::Sawtooth,
        }
    }
}

/// Gray noise is library-only: it needs a loudness table there is no flag
/// syntax for.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorArg {
    White,
    Pink,
    Brown,
    Blue,
    Violet,
    Black,
}

impl From<ColorArg> for NoiseColor {
    fn from(c: ColorArg) -> NoiseColor {
        match c {
            ColorArg::White => NoiseColor::White,
            ColorArg::Pink => NoiseColor::Pink,
            ColorArg::Brown => NoiseColor::Brown,
            ColorArg::Blue => NoiseColor::Blue,
            ColorArg::Violet => NoiseColor::Violet,
            ColorArg::Black => NoiseColor::Black,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), String> {
    match cmd {
        Command::Render { score, output } => {
            let text = fs::read_to_string(&score)
                .map_err(|e| format!("cannot read {}: {e}", score.display()))?;
            let parsed = parse_score(&text).map_err(|e| e.to_string())?;
            let buf = render(&parsed).map_err(|e| e.to_string())?;
            save(&buf, &output)
        }
        Command::Synth {
            freq,
            dur,
            shape,
            adsr,
            vibrato,
            tremolo,
            amp,
            output,
        } => {
            let mut note = NoteSpec::new(freq, dur);
            note.shape = shape.into();
            note.amplitude = amp;
            if let Some(text) = &adsr {
                note.envelope = Some(parse_adsr(text)?);
            }
            if let Some(text) = &vibrato {
                note.vibrato = Some(parse_modulation(text, "vibrato (rate_hz:semitones)")?);
            }
            if let Some(text) = &tremolo {
                note.tremolo = Some(parse_modulation(text, "tremolo (rate_hz:db)")?);
            }
            let mut score = Score::new(default_rate()?);
            score.events.push(ScoreEvent { onset: 0.0, note });
            let buf = render(&score).map_err(|e| e.to_string())?;
            save(&buf, &output)
        }
        Command::Noise {
            color,
            seconds,
            seed,
            output,
        } => {
            let rate = default_rate()?;
            let len = duration_to_samples(seconds, rate).map_err(|e| e.to_string())?;
            let mut spec = NoiseSpec::new(color.into(), len, rate, seed);
            if matches!(color, ColorArg::Blue | ColorArg::Violet) {
                spec = spec.with_band(15.0, Some(rate.nyquist() - 1.0));
            }
            let raw = generate(&spec).map_err(|e| e.to_string())?;
            let buf = normalize(&raw, 0.9).map_err(|e| e.to_string())?;
            save(&buf, &output)
        }
        Command::Analyze { wav } => {
            let buf = read_wav(&wav).map_err(|e| format!("cannot read {}: {e}", wav.display()))?;
            analyze(&wav, &buf)
        }
        Command::Demo { name, output, list } => {
            if list {
                for name in DEMO_NAMES {
                    println!("{name}");
                }
                return Ok(());
            }
            let name = name.expect("clap requires a name unless --list is given");
            let buf = render_demo(&name).map_err(|e| e.to_string())?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{name}.wav")));
            save(&buf, &path)
        }
    }
}

/// Default sample rate for commands that do not get one from their input:
/// the SONUM_RATE environment variable when set, CD rate otherwise.
fn default_rate() -> Result<SampleRate, String> {
    match std::env::var(RATE_VAR) {
        Ok(text) => {
            let hz: u32 = text
                .trim()
                .parse()
                .map_err(|_| format!("{RATE_VAR} must be a whole number of Hz, got {text:?}"))?;
            SampleRate::new(hz).map_err(|e| e.to_string())
        }
        Err(std::env::VarError::NotPresent) => Ok(SampleRate::CD),
        Err(e) => Err(format!("{RATE_VAR}: {e}")),
    }
}

fn save(buf: &SampleBuffer, path: &Path) -> Result<(), String> {
    let wav =
        write_wav(buf, path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    if wav.clipped() > 0 {
        eprintln!(
            "warning: {} of {} samples clipped at full scale",
            wav.clipped(),
            wav.samples().len()
        );
    }
    eprintln!(
        "wrote {}: {} frames, {} channel(s), {} Hz",
        path.display(),
        wav.frames(),
        wav.channels(),
        wav.rate()
    );
    Ok(())
}

fn analyze(path: &Path, buf: &SampleBuffer) -> Result<(), String> {
    let rate = buf.rate();
    let nyquist = rate.nyquist();
    let spectrum = forward(&downmix(buf)).map_err(|e| e.to_string())?;
    let fundamental =
        peak_frequency(&spectrum, 20.0, nyquist * 0.95).map_err(|e| e.to_string())?;
    let slope = slope_db_per_octave(&spectrum, 100.0, 10_000f64.min(nyquist * 0.95))
        .map_err(|e| e.to_string())?;
    let per_channel = power(buf).map_err(|e| e.to_string())?;
    let mean = per_channel.iter().sum::<f64>() / per_channel.len() as f64;
    println!(
        "file: {} ({} channels, {} Hz, {} frames)",
        path.display(),
        buf.channel_count(),
        rate.value(),
        buf.len()
    );
    println!("fundamental: {fundamental:.2} Hz");
    println!("slope: {slope:.2} dB/octave");
    println!("power: {:.2} dBFS", 10.0 * mean.log10());
    Ok(())
}

/// Average all channels into one, so spectral measurements see the whole
/// signal.
fn downmix(buf: &SampleBuffer) -> SampleBuffer {
    if buf.channel_count() == 1 {
        return buf.clone();
    }
    let k = buf.channel_count() as f64;
    let mixed = (0..buf.len())
        .map(|i| buf.channels().iter().map(|c| c[i]).sum::<f64>() / k)
        .collect();
    SampleBuffer::from_mono(buf.rate(), mixed).expect("averaged samples stay finite")
}

/// Same field order as the score format: attack:decay:sustain:release.
fn parse_adsr(text: &str) -> Result<AdsrSpec, String> {
    let p = split_floats(text, 4, "adsr (attack:decay:sustain:release)")?;
    Ok(AdsrSpec::new(p[0], p[1], p[3], p[2]))
}

fn parse_modulation(text: &str, what: &str) -> Result<ModulationSpec, String> {
    let p = split_floats(text, 2, what)?;
    Ok(ModulationSpec {
        freq: p[0],
        depth: p[1],
    })
}

fn split_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != n {
        return Err(format!(
            "{what} needs {n} colon-separated numbers, got {}",
            parts.len()
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| format!("{what}: bad number {p:?}"))
        })
        .collect()
}
