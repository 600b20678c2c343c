//! Line-oriented text scores.
//!
//! A score file is UTF-8 text, one directive per line. `#` starts a comment
//! and blank lines are ignored. Directives:
//!
//! ```text
//! rate 44100                    sample rate in Hz
//! pulse 0.5                     grid pulse in seconds (enables @ addresses)
//! factor <level> <n>            grid division/grouping factor for a level
//! tuning equal 12 440           or: tuning just 440 | tuning pythagorean 440
//! seed 42                       base for all randomness in the piece
//! note <onset> <pitch> <dur> [key=value ...]
//! post <stage> <args ...>       output chain, applied in file order
//! ```
//!
//! Onsets are seconds, or grid addresses like `@(0,2)(-1,1)` when a pulse is
//! set. Durations are seconds, or `@(level,count)` spans meaning count units
//! of that level. Pitch takes three forms: `441Hz` literal frequency,
//! `eq12:57` equal-tempered steps with 69 at the reference frequency, or
//! `<scale>:<degree>@<octave>` such as `ionian:3@4`, resolved through the
//! score's tuning.
//!
//! Note options: `amp=0.5` or `amp=-6dB`, `shape=square`,
//! `adsr=att:dec:sus:rel` (sustain is a level, the rest are seconds),
//! `env=linear|exp`, `floor=1e-4`, `vib=rate:semitones`, `trem=rate:db`,
//! `pos=x:y` (meters; any positioned note makes the piece stereo).
//!
//! Post stages: `lowpass hz`, `highpass hz`, `bandpass hz bw_hz`,
//! `bandreject hz bw_hz`, `reverb first_s total_s decay_db [color]`,
//! `normalize [peak]`.

use std::str::FromStr;

use crate::buffer::SampleRate;
use crate::error::{Error, Result};
use crate::filter::FilterKind;
use crate::modulation::{AdsrSpec, EnvelopeMode};
use crate::noise::NoiseColor;
use crate::osc::WaveShape;
use crate::spatial::SourcePosition;
use crate::structure::RhythmGrid;
use crate::theory::{make_scale, Tuning};

/// A periodic modulator: its rate in Hz and a depth whose unit depends on
/// use (semitones for vibrato, dB for tremolo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    pub freq: f64,
    pub depth: f64,
}

/// Everything needed to synthesize one note.
#[derive(Debug, Clone, PartialEq)]
pub struct NoteSpec {
    pub freq: f64,
    pub duration: f64,
    pub amplitude: f64,
    pub shape: WaveShape,
    pub envelope: Option<AdsrSpec>,
    pub vibrato: Option<ModulationSpec>,
    pub tremolo: Option<ModulationSpec>,
    pub position: Option<SourcePosition>,
}

impl NoteSpec {
    pub fn new(freq: f64, duration: f64) -> Self {
        NoteSpec {
            freq,
            duration,
            amplitude: 1.0,
            shape: WaveShape::Sine,
            envelope: None,
            vibrato: None,
            tremolo: None,
            position: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEvent {
    pub onset: f64,
    pub note: NoteSpec,
}

/// One stage of the output chain.
#[derive(Debug, Clone, PartialEq)]
pub enum PostStage {
    Filter {
        kind: FilterKind,
        cutoff_hz: f64,
        bandwidth_hz: Option<f64>,
    },
    Reverb {
        first_period: f64,
        total: f64,
        decay_db: f64,
        color: NoiseColor,
    },
    Normalize {
        peak: f64,
    },
}

/// A parsed piece: events to synthesize plus the output chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub rate: SampleRate,
    pub grid: Option<RhythmGrid>,
    pub tuning: Tuning,
    pub seed: u64,
    pub events: Vec<ScoreEvent>,
    pub post: Vec<PostStage>,
}

impl Score {
    pub fn new(rate: SampleRate) -> Self {
        Score {
            rate,
            grid: None,
            tuning: Tuning::default(),
            seed: 0,
            events: Vec::new(),
            post: Vec::new(),
        }
    }
}

impl Default for Score {
    fn default() -> Self {
        Score::new(SampleRate::default())
    }
}

/// A token with its 1-based column, for error reporting.
struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut col = 0usize;
    let mut start = None;
    for (i, c) in line.char_indices().chain([(line.len(), ' ')]) {
        col += 1;
        if c.is_whitespace() {
            if let Some((s_col, s_i)) = start.take() {
                tokens.push(Token {
                    col: s_col,
                    text: &line[s_i..i],
                });
            }
        } else if start.is_none() {
            start = Some((col, i));
        }
    }
    tokens
}

struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::score_parse(self.line, col, message)
    }

    fn wrap<T>(&self, col: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.err(col, e.to_string()))
    }
}

fn parse_number<T: FromStr>(ctx: &LineCtx, tok: &Token<'_>, what: &str) -> Result<T> {
    tok.text
        .parse()
        .map_err(|_| ctx.err(tok.col, format!("expected {what}, got `{}`", tok.text)))
}

/// Parse `(a,b)(c,d)...` pairs after a leading `@`.
fn parse_address(ctx: &LineCtx, tok: &Token<'_>) -> Result<Vec<(i64, u64)>> {
    let body = &tok.text[1..];
    let mut pairs = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(ctx.err(tok.col, format!("expected `(` in grid address `{}`", tok.text)));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| ctx.err(tok.col, format!("unclosed `(` in grid address `{}`", tok.text)))?;
        let inner = &rest[1..close];
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| ctx.err(tok.col, format!("grid address entry `{inner}` needs `level,index`")))?;
        let level: i64 = a
            .trim()
            .parse()
            .map_err(|_| ctx.err(tok.col, format!("bad grid level `{a}`")))?;
        let index: u64 = b
            .trim()
            .parse()
            .map_err(|_| ctx.err(tok.col, format!("bad grid index `{b}`")))?;
        pairs.push((level, index));
        rest = &rest[close + 1..];
    }
    if pairs.is_empty() {
        return Err(ctx.err(tok.col, "empty grid address"));
    }
    Ok(pairs)
}

fn parse_onset(ctx: &LineCtx, tok: &Token<'_>, grid: Option<&RhythmGrid>) -> Result<f64> {
    if tok.text.starts_with('@') {
        let grid = grid.ok_or_else(|| {
            ctx.err(tok.col, "grid address used but the score sets no pulse")
        })?;
        let address = parse_address(ctx, tok)?;
        return ctx.wrap(tok.col, grid.resolve(&address));
    }
    let onset: f64 = parse_number(ctx, tok, "onset in seconds")?;
    if !onset.is_finite() || onset < 0.0 {
        return Err(ctx.err(tok.col, format!("onset must be >= 0, got {onset}")));
    }
    Ok(onset)
}

fn parse_duration(ctx: &LineCtx, tok: &Token<'_>, grid: Option<&RhythmGrid>) -> Result<f64> {
    let dur = if tok.text.starts_with('@') {
        let grid = grid.ok_or_else(|| {
            ctx.err(tok.col, "grid span used but the score sets no pulse")
        })?;
        parse_address(ctx, tok)?
            .iter()
            .map(|&(level, count)| count as f64 * grid.unit(level))
            .sum()
    } else {
        parse_number::<f64>(ctx, tok, "duration in seconds")?
    };
    if !dur.is_finite() || dur <= 0.0 {
        return Err(ctx.err(tok.col, format!("duration must be positive, got {dur}")));
    }
    Ok(dur)
}

fn parse_pitch(ctx: &LineCtx, tok: &Token<'_>, tuning: &Tuning, rate: SampleRate) -> Result<f64> {
    let text = tok.text;
    let freq = if let Some(hz) = text
        .strip_suffix("Hz")
        .or_else(|| text.strip_suffix("hz"))
        .or_else(|| text.strip_suffix("HZ"))
    {
        hz.parse::<f64>()
            .map_err(|_| ctx.err(tok.col, format!("bad frequency `{text}`")))?
    } else if let Some(steps) = text.strip_prefix("eq12:") {
        let steps: f64 = steps
            .parse()
            .map_err(|_| ctx.err(tok.col, format!("bad step count in `{text}`")))?;
        let eq = ctx.wrap(tok.col, Tuning::equal(12, tuning.reference()))?;
        ctx.wrap(tok.col, eq.degree_frequency(steps - 69.0))?
    } else if let Some((name, rest)) = text.split_once(':') {
        let (degree, octave) = rest.split_once('@').ok_or_else(|| {
            ctx.err(tok.col, format!("scale pitch `{text}` needs `<scale>:<degree>@<octave>`"))
        })?;
        let scale = ctx.wrap(tok.col, make_scale(name))?;
        let degree: i64 = degree
            .parse()
            .map_err(|_| ctx.err(tok.col, format!("bad scale degree `{degree}`")))?;
        let octave: i64 = octave
            .parse()
            .map_err(|_| ctx.err(tok.col, format!("bad octave `{octave}`")))?;
        let steps = 12.0 * (octave + 1) as f64 + scale.offset_of_degree(degree);
        ctx.wrap(tok.col, tuning.degree_frequency(steps - 69.0))?
    } else {
        return Err(ctx.err(
            tok.col,
            format!("pitch `{text}` is not `<n>Hz`, `eq12:<steps>` or `<scale>:<degree>@<octave>`"),
        ));
    };
    if !freq.is_finite() || freq <= 0.0 || freq >= rate.nyquist() {
        return Err(ctx.err(
            tok.col,
            format!("pitch {freq} Hz is outside (0, {}) at this rate", rate.nyquist()),
        ));
    }
    Ok(freq)
}

fn split_parts<'a>(
    ctx: &LineCtx,
    tok: &Token<'a>,
    value: &'a str,
    n: usize,
    what: &str,
) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != n {
        return Err(ctx.err(
            tok.col,
            format!("`{}` needs {n} colon-separated numbers ({what})", tok.text),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| ctx.err(tok.col, format!("bad number `{p}` in `{}`", tok.text)))
        })
        .collect()
}

fn parse_note_option(ctx: &LineCtx, tok: &Token<'_>, note: &mut NoteSpec) -> Result<()> {
    let (key, value) = tok
        .text
        .split_once('=')
        .ok_or_else(|| ctx.err(tok.col, format!("expected key=value, got `{}`", tok.text)))?;
    match key {
        "amp" => {
            if let Some(db) = value
                .strip_suffix("dB")
                .or_else(|| value.strip_suffix("db"))
            {
                let db: f64 = db
                    .parse()
                    .map_err(|_| ctx.err(tok.col, format!("bad dB value `{value}`")))?;
                note.amplitude = 10f64.powf(db / 20.0);
            } else {
                note.amplitude = value
                    .parse()
                    .map_err(|_| ctx.err(tok.col, format!("bad amplitude `{value}`")))?;
            }
            if !note.amplitude.is_finite() || note.amplitude < 0.0 {
                return Err(ctx.err(tok.col, format!("amplitude must be >= 0, got `{value}`")));
            }
        }
        "shape" => {
            note.shape = ctx.wrap(tok.col, value.parse())?;
        }
        "adsr" => {
            let p = split_parts(ctx, tok, value, 4, "attack:decay:sustain:release")?;
            let mode = note
                .envelope
                .as_ref()
                .map(|e| e.mode)
                .unwrap_or(EnvelopeMode::Exponential);
            let floor = note.envelope.as_ref().map(|e| e.floor);
            let mut spec = AdsrSpec::new(p[0], p[1], p[3], p[2]).with_mode(mode);
            if let Some(f) = floor {
                spec = spec.with_floor(f);
            }
            note.envelope = Some(spec);
        }
        "env" => {
            let mode = match value {
                "linear" => EnvelopeMode::Linear,
                "exp" => EnvelopeMode::Exponential,
                other => {
                    return Err(ctx.err(tok.col, format!("envelope mode `{other}` is not linear|exp")))
                }
            };
            match note.envelope.as_mut() {
                Some(e) => e.mode = mode,
                None => {
                    return Err(ctx.err(tok.col, "env= given before adsr= on this note"));
                }
            }
        }
        "floor" => {
            let f: f64 = value
                .parse()
                .map_err(|_| ctx.err(tok.col, format!("bad floor `{value}`")))?;
            match note.envelope.as_mut() {
                Some(e) => e.floor = f,
                None => {
                    return Err(ctx.err(tok.col, "floor= given before adsr= on this note"));
                }
            }
        }
        "vib" => {
            let p = split_parts(ctx, tok, value, 2, "rate_hz:semitones")?;
            note.vibrato = Some(ModulationSpec {
                freq: p[0],
                depth: p[1],
            });
        }
        "trem" => {
            let p = split_parts(ctx, tok, value, 2, "rate_hz:db")?;
            note.tremolo = Some(ModulationSpec {
                freq: p[0],
                depth: p[1],
            });
        }
        "pos" => {
            let p = split_parts(ctx, tok, value, 2, "x:y in meters")?;
            note.position = Some(SourcePosition::new(p[0], p[1]));
        }
        other => {
            return Err(ctx.err(tok.col, format!("unknown note option `{other}`")));
        }
    }
    Ok(())
}

fn parse_post(ctx: &LineCtx, tokens: &[Token<'_>]) -> Result<PostStage> {
    let stage = &tokens[0];
    let expect_args = |n: usize| -> Result<()> {
        if tokens.len() != n + 1 {
            return Err(ctx.err(
                stage.col,
                format!("`post {}` takes {n} argument(s), got {}", stage.text, tokens.len() - 1),
            ));
        }
        Ok(())
    };
    match stage.text {
        "lowpass" | "highpass" => {
            expect_args(1)?;
            Ok(PostStage::Filter {
                kind: ctx.wrap(stage.col, stage.text.parse())?,
                cutoff_hz: parse_number(ctx, &tokens[1], "cutoff in Hz")?,
                bandwidth_hz: None,
            })
        }
        "bandpass" | "bandreject" => {
            expect_args(2)?;
            Ok(PostStage::Filter {
                kind: ctx.wrap(stage.col, stage.text.parse())?,
                cutoff_hz: parse_number(ctx, &tokens[1], "center in Hz")?,
                bandwidth_hz: Some(parse_number(ctx, &tokens[2], "bandwidth in Hz")?),
            })
        }
        "reverb" => {
            if tokens.len() < 4 || tokens.len() > 5 {
                return Err(ctx.err(
                    stage.col,
                    "`post reverb` takes first_s total_s decay_db [color]",
                ));
            }
            let color = if let Some(tok) = tokens.get(4) {
                ctx.wrap(tok.col, tok.text.parse())?
            } else {
                NoiseColor::Brown
            };
            Ok(PostStage::Reverb {
                first_period: parse_number(ctx, &tokens[1], "first period in seconds")?,
                total: parse_number(ctx, &tokens[2], "total length in seconds")?,
                decay_db: parse_number(ctx, &tokens[3], "decay in dB")?,
                color,
            })
        }
        "normalize" => {
            if tokens.len() > 2 {
                return Err(ctx.err(stage.col, "`post normalize` takes at most one peak argument"));
            }
            let peak = match tokens.get(1) {
                Some(tok) => parse_number(ctx, tok, "peak level")?,
                None => 1.0,
            };
            Ok(PostStage::Normalize { peak })
        }
        other => Err(ctx.err(
            stage.col,
            format!("unknown post stage `{other}` (lowpass, highpass, bandpass, bandreject, reverb, normalize)"),
        )),
    }
}

/// Parse a complete score document.
///
/// Meta directives may appear anywhere; notes and post stages are collected
/// in file order. Errors carry the 1-based line and column of the offending
/// token.
pub fn parse_score(text: &str) -> Result<Score> {
    struct Meta {
        rate: Option<(usize, u32)>,
        pulse: Option<(usize, f64)>,
        factors: Vec<(usize, usize, i64, u64)>,
        tuning: Option<(usize, Tuning)>,
        seed: Option<(usize, u64)>,
    }
    let mut meta = Meta {
        rate: None,
        pulse: None,
        factors: Vec::new(),
        tuning: None,
        seed: None,
    };

    let logical_lines: Vec<(usize, Vec<Token<'_>>)> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let uncommented = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            (i + 1, tokenize(uncommented))
        })
        .filter(|(_, tokens)| !tokens.is_empty())
        .collect();

    // First pass: meta, so notes can reference the grid and tuning wherever
    // they appear in the file.
    for (line, tokens) in &logical_lines {
        let ctx = LineCtx { line: *line };
        let head = &tokens[0];
        let dup = |what: &str, prev: usize| {
            ctx.err(
                head.col,
                format!("duplicate `{what}` directive (already set on line {prev})"),
            )
        };
        match head.text {
            "rate" => {
                if let Some((prev, _)) = meta.rate {
                    return Err(dup("rate", prev));
                }
                if tokens.len() != 2 {
                    return Err(ctx.err(head.col, "`rate` takes one value in Hz"));
                }
                meta.rate = Some((*line, parse_number(&ctx, &tokens[1], "sample rate in Hz")?));
            }
            "pulse" => {
                if let Some((prev, _)) = meta.pulse {
                    return Err(dup("pulse", prev));
                }
                if tokens.len() != 2 {
                    return Err(ctx.err(head.col, "`pulse` takes one value in seconds"));
                }
                meta.pulse = Some((*line, parse_number(&ctx, &tokens[1], "pulse in seconds")?));
            }
            "factor" => {
                if tokens.len() != 3 {
                    return Err(ctx.err(head.col, "`factor` takes a level and a factor"));
                }
                let level: i64 = parse_number(&ctx, &tokens[1], "grid level")?;
                let factor: u64 = parse_number(&ctx, &tokens[2], "grid factor")?;
                meta.factors.push((*line, head.col, level, factor));
            }
            "tuning" => {
                if let Some((prev, _)) = meta.tuning {
                    return Err(dup("tuning", prev));
                }
                if tokens.len() < 2 {
                    return Err(ctx.err(head.col, "`tuning` takes a kind"));
                }
                let t = match tokens[1].text {
                    "equal" => {
                        let n: u32 = match tokens.get(2) {
                            Some(tok) => parse_number(&ctx, tok, "steps per octave")?,
                            None => 12,
                        };
                        let reference = match tokens.get(3) {
                            Some(tok) => parse_number(&ctx, tok, "reference in Hz")?,
                            None => crate::theory::REFERENCE_A,
                        };
                        ctx.wrap(tokens[1].col, Tuning::equal(n, reference))?
                    }
                    "just" | "pythagorean" => {
                        let reference = match tokens.get(2) {
                            Some(tok) => parse_number(&ctx, tok, "reference in Hz")?,
                            None => crate::theory::REFERENCE_A,
                        };
                        if tokens[1].text == "just" {
                            ctx.wrap(tokens[1].col, Tuning::just(reference))?
                        } else {
                            ctx.wrap(tokens[1].col, Tuning::pythagorean(reference))?
                        }
                    }
                    other => {
                        return Err(ctx.err(
                            tokens[1].col,
                            format!("unknown tuning `{other}` (equal, just, pythagorean)"),
                        ));
                    }
                };
                meta.tuning = Some((*line, t));
            }
            "seed" => {
                if let Some((prev, _)) = meta.seed {
                    return Err(dup("seed", prev));
                }
                if tokens.len() != 2 {
                    return Err(ctx.err(head.col, "`seed` takes one integer"));
                }
                meta.seed = Some((*line, parse_number(&ctx, &tokens[1], "seed integer")?));
            }
            "note" | "post" => {}
            other => {
                return Err(ctx.err(
                    head.col,
                    format!("unknown directive `{other}` (rate, pulse, factor, tuning, seed, note, post)"),
                ));
            }
        }
    }

    let rate = match meta.rate {
        Some((line, hz)) => {
            SampleRate::new(hz).map_err(|e| Error::score_parse(line, 1, e.to_string()))?
        }
        None => SampleRate::default(),
    };
    let grid = match meta.pulse {
        Some((line, pulse)) => {
            let mut g = RhythmGrid::new(pulse)
                .map_err(|e| Error::score_parse(line, 1, e.to_string()))?;
            for &(fl, fc, level, factor) in &meta.factors {
                g = g
                    .with_factor(level, factor)
                    .map_err(|e| Error::score_parse(fl, fc, e.to_string()))?;
            }
            Some(g)
        }
        None => {
            if let Some(&(fl, fc, ..)) = meta.factors.first() {
                return Err(Error::score_parse(fl, fc, "`factor` needs a `pulse` directive"));
            }
            None
        }
    };
    let tuning = meta.tuning.map(|(_, t)| t).unwrap_or_default();
    let seed = meta.seed.map(|(_, s)| s).unwrap_or(0);

    let mut events = Vec::new();
    let mut post = Vec::new();
    for (line, tokens) in &logical_lines {
        let ctx = LineCtx { line: *line };
        match tokens[0].text {
            "note" => {
                if tokens.len() < 4 {
                    return Err(ctx.err(
                        tokens[0].col,
                        "`note` takes at least onset, pitch and duration",
                    ));
                }
                let onset = parse_onset(&ctx, &tokens[1], grid.as_ref())?;
                let freq = parse_pitch(&ctx, &tokens[2], &tuning, rate)?;
                let duration = parse_duration(&ctx, &tokens[3], grid.as_ref())?;
                let mut note = NoteSpec::new(freq, duration);
                for tok in &tokens[4..] {
                    parse_note_option(&ctx, tok, &mut note)?;
                }
                events.push(ScoreEvent { onset, note });
            }
            "post" => {
                if tokens.len() < 2 {
                    return Err(ctx.err(tokens[0].col, "`post` takes a stage name"));
                }
                post.push(parse_post(&ctx, &tokens[1..])?);
            }
            _ => {}
        }
    }

    Ok(Score {
        rate,
        grid,
        tuning,
        seed,
        events,
        post,
    })
}
