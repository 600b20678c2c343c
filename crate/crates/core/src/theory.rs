//! Tunings, interval classification, scales, chords, functional-harmony
//! tables, and voice-motion analysis for counterpoint checking.
//!
//! Everything here is pure table-driven arithmetic on semitone offsets and
//! frequency ratios. Pitches are semitone counts unless a function says Hz.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default reference frequency in Hz (concert A).
pub const REFERENCE_A: f64 = 440.0;

/// Twelve-tone just-intonation ratios for steps 0..12 above the reference.
/// The named diatonic degrees (unison, major second 9/8, major third 5/4,
/// fourth 4/3, fifth 3/2, major sixth 5/3, major seventh 15/8) are joined by
/// the conventional chromatic fill: 16/15, 6/5, 45/32, 8/5, 16/9. Other
/// completions exist; this one is fixed so results are reproducible.
const JUST_RATIOS: [(u64, u64); 12] = [
    (1, 1),
    (16, 15),
    (9, 8),
    (6, 5),
    (5, 4),
    (4, 3),
    (45, 32),
    (3, 2),
    (8, 5),
    (5, 3),
    (16, 9),
    (15, 8),
];

/// Pythagorean ratios for steps 0..12, generated from stacked 3/2 fifths.
/// Step 6 is spelled as the augmented fourth 729/512; see
/// [`PYTHAGOREAN_DIMINISHED_FIFTH`] for the alternate spelling.
const PYTHAGOREAN_RATIOS: [(u64, u64); 12] = [
    (1, 1),
    (256, 243),
    (9, 8),
    (32, 27),
    (81, 64),
    (4, 3),
    (729, 512),
    (3, 2),
    (128, 81),
    (27, 16),
    (16, 9),
    (243, 128),
];

/// Alternate Pythagorean spelling for step 6: the diminished fifth 1024/729
/// reached by descending fifths, in place of the ascending 729/512.
pub const PYTHAGOREAN_DIMINISHED_FIFTH: (u64, u64) = (1024, 729);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningKind {
    /// Equal temperament with `n` steps per octave.
    Equal(u32),
    Just,
    Pythagorean,
}

/// A mapping from step counts to frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuning {
    kind: TuningKind,
    reference: f64,
}

impl Tuning {
    /// Equal temperament with `n` steps per octave, anchored at `reference` Hz
    /// for step 0. `n = 12` is the common case but any division works, e.g.
    /// 19, 31 or 53.
    pub fn equal(n: u32, reference: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("equal temperament needs at least one step per octave"));
        }
        Self::with_kind(TuningKind::Equal(n), reference)
    }

    /// Twelve-tone just intonation over `reference` Hz.
    pub fn just(reference: f64) -> Result<Self> {
        Self::with_kind(TuningKind::Just, reference)
    }

    /// Twelve-tone Pythagorean tuning over `reference` Hz.
    pub fn pythagorean(reference: f64) -> Result<Self> {
        Self::with_kind(TuningKind::Pythagorean, reference)
    }

    fn with_kind(kind: TuningKind, reference: f64) -> Result<Self> {
        if !reference.is_finite() || reference <= 0.0 {
            return Err(Error::invalid("tuning reference frequency must be positive"));
        }
        Ok(Tuning { kind, reference })
    }

    pub fn kind(&self) -> TuningKind {
        self.kind
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    /// Frequency of the note `steps` above the reference (negative steps go
    /// below). Equal temperament accepts real step counts; the ratio tunings
    /// are defined on integers only and reject fractional steps. Steps
    /// outside one octave wrap with an exact power-of-two octave shift, so
    /// `f(s + n) = 2 f(s)` holds to the last bit.
    pub fn degree_frequency(&self, steps: f64) -> Result<f64> {
        if !steps.is_finite() {
            return Err(Error::invalid("step count must be finite"));
        }
        match self.kind {
            TuningKind::Equal(n) => {
                let n = f64::from(n);
                let octave = steps.div_euclid(n);
                let frac = steps.rem_euclid(n);
                Ok(self.reference * (frac / n).exp2() * octave.exp2())
            }
            TuningKind::Just => self.ratio_frequency(steps, &JUST_RATIOS),
            TuningKind::Pythagorean => self.ratio_frequency(steps, &PYTHAGOREAN_RATIOS),
        }
    }

    fn ratio_frequency(&self, steps: f64, table: &[(u64, u64); 12]) -> Result<f64> {
        if steps.fract() != 0.0 {
            return Err(Error::invalid("ratio tunings are defined on integer steps"));
        }
        let steps = steps as i64;
        let octave = steps.div_euclid(12);
        let (num, den) = table[steps.rem_euclid(12) as usize];
        Ok(self.reference * (num as f64 / den as f64) * (octave as f64).exp2())
    }

    /// The interval of `step` within the octave as an exact ratio, for the
    /// ratio tunings. Equal temperament has no rational steps, so `None`.
    pub fn step_ratio(&self, step: i64) -> Option<(u64, u64)> {
        let table = match self.kind {
            TuningKind::Equal(_) => return None,
            TuningKind::Just => &JUST_RATIOS,
            TuningKind::Pythagorean => &PYTHAGOREAN_RATIOS,
        };
        Some(table[step.rem_euclid(12) as usize])
    }
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            kind: TuningKind::Equal(12),
            reference: REFERENCE_A,
        }
    }
}

/// Size of an interval in cents (1200 per octave).
pub fn ratio_to_cents(ratio: f64) -> f64 {
    1200.0 * ratio.log2()
}

/// Consonance class of an interval, by semitone count.
///
/// The fourth sits in its own contextual class: consonant between upper
/// voices, treated as dissonant against the bass. The tritone is likewise
/// kept apart from the plain dissonances. Classification is purely numeric;
/// enharmonic spelling distinctions are out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalClass {
    PerfectConsonance,
    ImperfectConsonance,
    HarshDissonance,
    MildDissonance,
    Contextual,
    Tritone,
}

/// Classify an interval given in semitones. Compound intervals reduce
/// modulo 12, so a major tenth (16) classifies like a major third.
pub fn classify_interval(semitones: i64) -> Result<IntervalClass> {
    if semitones < 0 {
        return Err(Error::invalid("interval size must be non-negative"));
    }
    Ok(match semitones % 12 {
        0 | 7 => IntervalClass::PerfectConsonance,
        3 | 4 | 8 | 9 => IntervalClass::ImperfectConsonance,
        1 | 11 => IntervalClass::HarshDissonance,
        2 | 10 => IntervalClass::MildDissonance,
        5 => IntervalClass::Contextual,
        _ => IntervalClass::Tritone,
    })
}

/// Invert an interval within the octave: `s` becomes `12 - s`. Defined for
/// 0..=12 and self-inverse on that range.
pub fn invert_interval(semitones: i64) -> Result<i64> {
    if !(0..=12).contains(&semitones) {
        return Err(Error::invalid("interval inversion is defined for 0..=12 semitones"));
    }
    Ok(12 - semitones)
}

/// Names accepted by [`make_scale`].
pub const SCALE_NAMES: [&str; 15] = [
    "chromatic",
    "wholetone",
    "minor-thirds",
    "major-thirds",
    "tritones",
    "ionian",
    "dorian",
    "phrygian",
    "lydian",
    "mixolydian",
    "aeolian",
    "locrian",
    "harmonic-minor",
    "melodic-minor",
    "harmonic-series",
];

/// A named sequence of pitch offsets in semitones.
///
/// Most scales are strictly increasing within one octave and start at 0.
/// Two keep a different shape on purpose: the melodic minor stores its full
/// up-then-down contour (15 entries), and the harmonic series spans several
/// octaves with real-valued offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    name: String,
    offsets: Vec<f64>,
}

impl Scale {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Offset of an arbitrary degree: the index wraps around the stored
    /// offsets and each full wrap shifts by an octave, so degree `len`
    /// of a 7-note scale is the octave above degree 0.
    pub fn offset_of_degree(&self, degree: i64) -> f64 {
        let len = self.offsets.len() as i64;
        let wrap = degree.div_euclid(len);
        self.offsets[degree.rem_euclid(len) as usize] + 12.0 * wrap as f64
    }
}

fn scale(name: &str, offsets: &[f64]) -> Scale {
    Scale {
        name: name.to_string(),
        offsets: offsets.to_vec(),
    }
}

fn scale_int(name: &str, offsets: &[i64]) -> Scale {
    Scale {
        name: name.to_string(),
        offsets: offsets.iter().map(|&s| s as f64).collect(),
    }
}

/// Build one of the standard scales by name. See [`SCALE_NAMES`].
///
/// The symmetric scales divide the octave evenly; the seven modes share the
/// diatonic step pattern at different rotations (see
/// [`diatonic_mode_kappa`]); the minor forms alter the sixth and seventh
/// degrees; the harmonic series lists the first 20 partials as semitone
/// offsets above the fundamental, each the nearest tempered degree plus a
/// fractional correction.
pub fn make_scale(name: &str) -> Result<Scale> {
    Ok(match name {
        "chromatic" => scale_int(name, &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]),
        "wholetone" => scale_int(name, &[0, 2, 4, 6, 8, 10]),
        "minor-thirds" => scale_int(name, &[0, 3, 6, 9]),
        "major-thirds" => scale_int(name, &[0, 4, 8]),
        "tritones" => scale_int(name, &[0, 6]),
        "ionian" => scale_int(name, &[0, 2, 4, 5, 7, 9, 11]),
        "dorian" => scale_int(name, &[0, 2, 3, 5, 7, 9, 10]),
        "phrygian" => scale_int(name, &[0, 1, 3, 5, 7, 8, 10]),
        "lydian" => scale_int(name, &[0, 2, 4, 6, 7, 9, 11]),
        "mixolydian" => scale_int(name, &[0, 2, 4, 5, 7, 9, 10]),
        "aeolian" => scale_int(name, &[0, 2, 3, 5, 7, 8, 10]),
        "locrian" => scale_int(name, &[0, 1, 3, 5, 6, 8, 10]),
        "harmonic-minor" => scale_int(name, &[0, 2, 3, 5, 7, 8, 11]),
        "melodic-minor" => scale_int(
            name,
            &[0, 2, 3, 5, 7, 9, 11, 12, 10, 8, 7, 5, 3, 2, 0],
        ),
        "harmonic-series" => scale(
            name,
            &[
                0.0, 12.0, 19.02, 24.0, 27.86, 31.2, 33.69, 36.0, 38.04, 39.86,
                41.51, 43.02, 44.41, 45.69, 46.88, 48.0, 49.05, 50.04, 50.98,
                51.86,
            ],
        ),
        _ => {
            return Err(Error::invalid(format!("unknown scale name `{name}`")));
        }
    })
}

/// Diatonic step sizes in semitones; they sum to an octave.
pub const DIATONIC_STEPS: [i64; 7] = [2, 2, 1, 2, 2, 2, 1];

const MODE_NAMES_BY_KAPPA: [&str; 7] = [
    "dorian",
    "phrygian",
    "lydian",
    "mixolydian",
    "aeolian",
    "locrian",
    "ionian",
];

/// Build a diatonic mode by rotating the step pattern: starting from 0, the
/// i-th degree adds step `(i + kappa) % 7`. Each of the seven rotations is a
/// distinct mode; `kappa = 2` gives the lydian, `kappa = 6` the ionian.
pub fn diatonic_mode_kappa(kappa: usize) -> Result<Scale> {
    if kappa > 6 {
        return Err(Error::invalid("mode rotation must be in 0..=6"));
    }
    let mut offsets = vec![0_i64];
    for i in 1..7 {
        let step = DIATONIC_STEPS[(i + kappa) % 7];
        offsets.push(offsets[i - 1] + step);
    }
    Ok(scale_int(MODE_NAMES_BY_KAPPA[kappa], &offsets))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChordQuality {
    Major,
    Minor,
    Diminished,
    Augmented,
}

impl FromStr for ChordQuality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "major" => ChordQuality::Major,
            "minor" => ChordQuality::Minor,
            "diminished" => ChordQuality::Diminished,
            "augmented" => ChordQuality::Augmented,
            _ => return Err(Error::invalid(format!("unknown chord quality `{s}`"))),
        })
    }
}

/// Optional seventh above the triad root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Seventh {
    None,
    /// Ten semitones above the root.
    Minor,
    /// Eleven semitones above the root.
    Major,
}

/// A chord as semitone offsets from its root.
///
/// Root position starts at 0 and is sorted ascending. Inversions lift the
/// lowest member an octave, so an inverted chord no longer starts at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chord {
    offsets: Vec<i64>,
}

impl Chord {
    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Build a chord from stacked thirds.
///
/// The four triad qualities are {0,4,7}, {0,3,7}, {0,3,6} and {0,4,8}; a
/// seventh appends 10 or 11. Each inversion moves the lowest member up an
/// octave and re-sorts, so the first inversion of {0,4,7} is {4,7,12}.
/// `spread` shifts the whole chord by that many octaves.
pub fn build_chord(
    quality: ChordQuality,
    seventh: Seventh,
    inversion: usize,
    spread: i64,
) -> Chord {
    let mut offsets: Vec<i64> = match quality {
        ChordQuality::Major => vec![0, 4, 7],
        ChordQuality::Minor => vec![0, 3, 7],
        ChordQuality::Diminished => vec![0, 3, 6],
        ChordQuality::Augmented => vec![0, 4, 8],
    };
    match seventh {
        Seventh::None => {}
        Seventh::Minor => offsets.push(10),
        Seventh::Major => offsets.push(11),
    }
    for _ in 0..inversion {
        offsets[0] += 12;
        offsets.sort_unstable();
    }
    for o in &mut offsets {
        *o += 12 * spread;
    }
    Chord { offsets }
}

/// One scale degree of a functional-harmony chord, 1-based, with an
/// optional raised inflection (the dominant's counter-relative uses #4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaleDegree {
    pub degree: u8,
    pub sharp: bool,
}

impl ScaleDegree {
    const fn plain(degree: u8) -> Self {
        ScaleDegree { degree, sharp: false }
    }

    const fn sharp(degree: u8) -> Self {
        ScaleDegree { degree, sharp: true }
    }
}

impl fmt::Display for ScaleDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sharp {
            write!(f, "#{}", self.degree)
        } else {
            write!(f, "{}", self.degree)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HarmonicFunction {
    Tonic,
    Dominant,
    Subdominant,
}

/// The three degree-triads tied to one harmonic function in a major key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FunctionalTriads {
    pub main: [ScaleDegree; 3],
    pub relative: [ScaleDegree; 3],
    pub counter_relative: [ScaleDegree; 3],
}

/// Main, relative and counter-relative chords of a harmonic function,
/// as 1-based scale degrees in a major key. Minor-key variants are debated
/// enough that they are left out of the numeric model.
pub fn functional_relatives(function: HarmonicFunction) -> FunctionalTriads {
    use ScaleDegree as D;
    match function {
        HarmonicFunction::Tonic => FunctionalTriads {
            main: [D::plain(1), D::plain(3), D::plain(5)],
            relative: [D::plain(6), D::plain(1), D::plain(3)],
            counter_relative: [D::plain(3), D::plain(5), D::plain(7)],
        },
        HarmonicFunction::Dominant => FunctionalTriads {
            main: [D::plain(5), D::plain(7), D::plain(2)],
            relative: [D::plain(3), D::plain(5), D::plain(7)],
            counter_relative: [D::plain(7), D::plain(2), D::sharp(4)],
        },
        HarmonicFunction::Subdominant => FunctionalTriads {
            main: [D::plain(4), D::plain(6), D::plain(1)],
            relative: [D::plain(2), D::plain(4), D::plain(6)],
            counter_relative: [D::plain(6), D::plain(1), D::plain(3)],
        },
    }
}

/// Relative motion of two voices moving between two chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Motion {
    /// Same direction, different interval change.
    Direct,
    /// Same direction, same interval change. A special case of direct.
    Parallel,
    /// One voice holds. Both holding counts as oblique too.
    Oblique,
    /// Opposite directions.
    Contrary,
}

impl Motion {
    /// Parallel motion is a kind of direct motion.
    pub fn is_direct(self) -> bool {
        matches!(self, Motion::Direct | Motion::Parallel)
    }
}

/// Classify the joint motion of two voices. Pitches are on a semitone
/// scale; only the direction and size of each voice's change matter.
pub fn classify_motion(v1_from: f64, v1_to: f64, v2_from: f64, v2_to: f64) -> Motion {
    let d1 = v1_to - v1_from;
    let d2 = v2_to - v2_from;
    if d1 == 0.0 || d2 == 0.0 {
        Motion::Oblique
    } else if (d1 > 0.0) == (d2 > 0.0) {
        if d1 == d2 {
            Motion::Parallel
        } else {
            Motion::Direct
        }
    } else {
        Motion::Contrary
    }
}

/// Which counterpoint rule a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// Direct (including parallel) motion arriving at a perfect consonance.
    DirectIntoPerfect,
    /// More than three consecutive parallel imperfect consonances.
    ParallelImperfectRun,
    /// A dissonance not both approached and left by step in every voice.
    UnpreparedDissonance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    /// Index of the offending column in the voice sequences.
    pub index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::DirectIntoPerfect => "direct motion into a perfect consonance",
            ViolationKind::ParallelImperfectRun => {
                "more than three consecutive parallel imperfect consonances"
            }
            ViolationKind::UnpreparedDissonance => "dissonance not approached and left by step",
        };
        write!(f, "at column {}: {}", self.index, what)
    }
}

fn is_dissonant(class: IntervalClass) -> bool {
    matches!(
        class,
        IntervalClass::HarshDissonance | IntervalClass::MildDissonance | IntervalClass::Tritone
    )
}

fn is_step(from: i64, to: i64) -> bool {
    (to - from).abs() <= 2
}

/// Check a pair of equal-length voices against the classic rules: no direct
/// motion into perfect consonances, at most three consecutive parallel
/// imperfect consonances, and dissonances entered and quit stepwise in both
/// voices. Pitches are integer semitone counts. The fourth's contextual
/// class is not flagged as a dissonance here.
pub fn check_counterpoint(upper: &[i64], lower: &[i64]) -> Result<Vec<Violation>> {
    if upper.len() != lower.len() {
        return Err(Error::invalid("voice sequences must have equal length"));
    }
    let n = upper.len();
    let mut violations = Vec::new();
    let class_at = |i: usize| classify_interval((upper[i] - lower[i]).abs());

    for i in 1..n {
        let motion = classify_motion(
            upper[i - 1] as f64,
            upper[i] as f64,
            lower[i - 1] as f64,
            lower[i] as f64,
        );
        if motion.is_direct() && class_at(i)? == IntervalClass::PerfectConsonance {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::DirectIntoPerfect,
            });
        }
    }

    // A run counts columns: four successive imperfect consonances joined by
    // three parallel motions is the first length that overshoots the limit.
    let mut run = 0usize;
    for i in 0..n {
        let imperfect = class_at(i)? == IntervalClass::ImperfectConsonance;
        let parallel_entry = i > 0
            && classify_motion(
                upper[i - 1] as f64,
                upper[i] as f64,
                lower[i - 1] as f64,
                lower[i] as f64,
            ) == Motion::Parallel;
        if imperfect && (run == 0 || parallel_entry) {
            run += 1;
        } else {
            run = usize::from(imperfect);
        }
        if run == 4 {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::ParallelImperfectRun,
            });
        }
    }

    for i in 0..n {
        if !is_dissonant(class_at(i)?) {
            continue;
        }
        let prepared = i > 0
            && is_step(upper[i - 1], upper[i])
            && is_step(lower[i - 1], lower[i]);
        let resolved = i + 1 < n
            && is_step(upper[i], upper[i + 1])
            && is_step(lower[i], lower[i + 1]);
        if !(prepared && resolved) {
            violations.push(Violation {
                index: i,
                kind: ViolationKind::UnpreparedDissonance,
            });
        }
    }

    violations.sort_by_key(|v| v.index);
    Ok(violations)
}
