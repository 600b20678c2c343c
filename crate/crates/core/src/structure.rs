//! Rhythm-grid addressing, motif transformations, permutation groups,
//! change-ringing cycles, and additive (golden-ratio) sequences.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::theory::Scale;

/// Golden ratio, the limit of successive additive-sequence quotients.
pub const GOLDEN_RATIO: f64 = 1.61803398875;

/// A pulse with nested divisions and groupings.
///
/// Level 0 is the pulse itself. Negative levels divide: one unit of level
/// j+1 splits into `factor(j)` units of level j. Positive levels group:
/// one unit of level j is `factor(j)` units of level j-1. Levels without an
/// explicit factor default to 2, the most common division. Pulses between
/// roughly 0.25 s and 1.5 s sit in the range felt as beat; that is guidance,
/// not a validation rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RhythmGrid {
    pulse: f64,
    factors: BTreeMap<i64, u64>,
}

impl RhythmGrid {
    pub fn new(pulse: f64) -> Result<Self> {
        if !pulse.is_finite() || pulse <= 0.0 {
            return Err(Error::invalid("pulse duration must be positive"));
        }
        Ok(RhythmGrid {
            pulse,
            factors: BTreeMap::new(),
        })
    }

    /// Set the division (level < 0) or grouping (level > 0) factor of one
    /// level. Level 0 is the pulse and takes no factor.
    pub fn with_factor(mut self, level: i64, factor: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("level 0 is the pulse, it has no factor"));
        }
        if factor < 2 {
            return Err(Error::invalid("grid factors must be at least 2"));
        }
        self.factors.insert(level, factor);
        Ok(self)
    }

    pub fn pulse(&self) -> f64 {
        self.pulse
    }

    /// Factor of a level, defaulting to 2 where none was set.
    pub fn factor(&self, level: i64) -> u64 {
        *self.factors.get(&level).unwrap_or(&2)
    }

    /// Duration in seconds of one unit at a level.
    pub fn unit(&self, level: i64) -> f64 {
        let mut d = self.pulse;
        if level > 0 {
            for l in 1..=level {
                d *= self.factor(l) as f64;
            }
        } else {
            for l in level..0 {
                d /= self.factor(l) as f64;
            }
        }
        d
    }

    /// Onset in seconds of a grid address: the sum over address entries of
    /// index times that level's unit duration.
    ///
    /// Below the pulse an index must stay inside its parent unit, so it is
    /// bounded by the level's own division factor. At and above the pulse an
    /// index counts units inside the next grouping level, bounded by
    /// `factor(level + 1)` - except at the topmost level given, which has
    /// nothing above it and is unbounded.
    pub fn resolve(&self, address: &[(i64, u64)]) -> Result<f64> {
        let mut seen = BTreeMap::new();
        for &(level, index) in address {
            if seen.insert(level, index).is_some() {
                return Err(Error::invalid(format!("level {level} appears twice in address")));
            }
        }
        let top = seen.keys().next_back().copied();
        let mut onset = 0.0;
        for (&level, &index) in &seen {
            let bound = if level < 0 {
                Some(self.factor(level))
            } else if Some(level) == top {
                None
            } else {
                Some(self.factor(level + 1))
            };
            if let Some(bound) = bound {
                if index >= bound {
                    return Err(Error::invalid(format!(
                        "index {index} out of range at level {level} (factor {bound})"
                    )));
                }
            }
            onset += index as f64 * self.unit(level);
        }
        Ok(onset)
    }
}

/// See [`RhythmGrid::resolve`].
pub fn resolve_grid(grid: &RhythmGrid, address: &[(i64, u64)]) -> Result<f64> {
    grid.resolve(address)
}

/// One note of a [`Motif`]: a frequency with its place in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotifEvent {
    pub freq: f64,
    pub onset: f64,
    pub duration: f64,
    pub amplitude: f64,
}

impl MotifEvent {
    pub fn new(freq: f64, onset: f64, duration: f64, amplitude: f64) -> Self {
        MotifEvent {
            freq,
            onset,
            duration,
            amplitude,
        }
    }
}

/// An ordered sequence of events. Grid addresses resolve to seconds before
/// events enter a motif, so onsets are always plain time here.
#[derive(Debug, Clone, PartialEq)]
pub struct Motif {
    events: Vec<MotifEvent>,
}

impl Motif {
    pub fn new(events: Vec<MotifEvent>) -> Result<Self> {
        for (i, e) in events.iter().enumerate() {
            if !e.freq.is_finite() || e.freq <= 0.0 {
                return Err(Error::invalid(format!("event {i}: frequency must be positive")));
            }
            if !e.duration.is_finite() || e.duration <= 0.0 {
                return Err(Error::invalid(format!("event {i}: duration must be positive")));
            }
            if !e.onset.is_finite() || !e.amplitude.is_finite() {
                return Err(Error::invalid(format!("event {i}: onset and amplitude must be finite")));
            }
        }
        if events.windows(2).any(|w| w[1].onset < w[0].onset) {
            return Err(Error::invalid("motif onsets must be non-decreasing"));
        }
        Ok(Motif { events })
    }

    pub fn events(&self) -> &[MotifEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.freq).collect()
    }
}

/// The classic motif variations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotifTransform<'a> {
    /// Shift every onset by a time offset.
    Translate { delta: f64 },
    /// Scale onsets and durations by a factor.
    Stretch { factor: f64 },
    /// Mirror the timeline: last event first, gaps preserved.
    Retrograde,
    /// Shift every frequency by a semitone count.
    Transpose { semitones: f64 },
    /// Negate every interval from the first event: f becomes f0^2 / f.
    StrictInversion,
    /// Reflect scale degrees within a single-octave scale: the note at
    /// degree j maps to 12 minus the offset of degree (len - j) mod len,
    /// with octave displacements from the first event negated.
    TonalInversion { scale: &'a Scale },
    /// Rotate pitch, duration and amplitude over the fixed onset slots:
    /// slot n takes the content of slot (n + positions) mod len.
    Rotate { positions: i64 },
}

/// Apply one variation, returning the new motif.
pub fn transform_motif(motif: &Motif, transform: MotifTransform<'_>) -> Result<Motif> {
    let events = motif.events();
    let out = match transform {
        MotifTransform::Translate { delta } => {
            if !delta.is_finite() {
                return Err(Error::invalid("translation offset must be finite"));
            }
            events
                .iter()
                .map(|e| MotifEvent { onset: e.onset + delta, ..*e })
                .collect()
        }
        MotifTransform::Stretch { factor } => {
            if !factor.is_finite() || factor <= 0.0 {
                return Err(Error::invalid("stretch factor must be positive"));
            }
            events
                .iter()
                .map(|e| MotifEvent {
                    onset: e.onset * factor,
                    duration: e.duration * factor,
                    ..*e
                })
                .collect()
        }
        MotifTransform::Retrograde => {
            if events.is_empty() {
                Vec::new()
            } else {
                let start = events[0].onset;
                let end = events
                    .iter()
                    .map(|e| e.onset + e.duration)
                    .fold(f64::MIN, f64::max);
                let mut mirrored: Vec<MotifEvent> = events
                    .iter()
                    .map(|e| MotifEvent {
                        onset: start + (end - (e.onset + e.duration)),
                        ..*e
                    })
                    .collect();
                mirrored.sort_by(|a, b| a.onset.total_cmp(&b.onset));
                mirrored
            }
        }
        MotifTransform::Transpose { semitones } => {
            if !semitones.is_finite() {
                return Err(Error::invalid("transposition must be finite"));
            }
            let ratio = (semitones / 12.0).exp2();
            events
                .iter()
                .map(|e| MotifEvent { freq: e.freq * ratio, ..*e })
                .collect()
        }
        MotifTransform::StrictInversion => {
            if events.is_empty() {
                Vec::new()
            } else {
                let f0 = events[0].freq;
                events
                    .iter()
                    .map(|e| MotifEvent { freq: f0 * f0 / e.freq, ..*e })
                    .collect()
            }
        }
        MotifTransform::TonalInversion { scale } => {
            return tonal_inversion(motif, scale);
        }
        MotifTransform::Rotate { positions } => {
            let h = events.len() as i64;
            if h == 0 {
                Vec::new()
            } else {
                (0..events.len())
                    .map(|n| {
                        let src = &events[(n as i64 + positions).rem_euclid(h) as usize];
                        MotifEvent { onset: events[n].onset, ..*src }
                    })
                    .collect()
            }
        }
    };
    Motif::new(out)
}

fn tonal_inversion(motif: &Motif, scale: &Scale) -> Result<Motif> {
    let offsets = scale.offsets();
    let single_octave = !offsets.is_empty()
        && offsets.iter().all(|&o| (0.0..12.0).contains(&o))
        && offsets.windows(2).all(|w| w[0] < w[1]);
    if !single_octave {
        return Err(Error::invalid(
            "tonal inversion needs a strictly increasing single-octave scale",
        ));
    }
    let events = motif.events();
    if events.is_empty() {
        return Motif::new(Vec::new());
    }
    let f0 = events[0].freq;
    let len = offsets.len();
    let out = events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let st = 12.0 * (e.freq / f0).log2();
            let within = st.rem_euclid(12.0);
            let degree = offsets
                .iter()
                .position(|&o| (o - within).abs() < 1e-6 || (o - within + 12.0).abs() < 1e-6)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "event {i}: {:.3} semitones above the first note is not a degree of `{}`",
                        st,
                        scale.name()
                    ))
                })?;
            let octave = ((st - offsets[degree]) / 12.0).round();
            let reflected = 12.0 - offsets[(len - degree) % len];
            Ok(MotifEvent {
                freq: f0 * ((reflected - 12.0 * octave) / 12.0).exp2(),
                ..*e
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Motif::new(out)
}

/// Which event attribute a permutation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Pitch,
    Duration,
    Amplitude,
}

/// Permute one attribute of the first `p.len()` events, leaving every other
/// attribute and all later events untouched.
pub fn apply_to_dimension(motif: &Motif, p: &Permutation, dimension: Dimension) -> Result<Motif> {
    let n = p.len();
    if n > motif.len() {
        return Err(Error::invalid(format!(
            "permutation of {n} elements cannot act on {} events",
            motif.len()
        )));
    }
    let mut events = motif.events().to_vec();
    let old: Vec<MotifEvent> = events[..n].to_vec();
    for (i, e) in events[..n].iter_mut().enumerate() {
        let src = &old[p.one_line()[i]];
        match dimension {
            Dimension::Pitch => e.freq = src.freq,
            Dimension::Duration => e.duration = src.duration,
            Dimension::Amplitude => e.amplitude = src.amplitude,
        }
    }
    Motif::new(events)
}

/// A bijection on `{0..n-1}`, stored in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    /// Build from one-line notation: `map[i]` is where position `i` looks.
    pub fn from_one_line(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::invalid("one-line notation must be a bijection on 0..n"));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    /// Parse cyclic notation like `"(1,2,5)(3,4)"` or `"(0 1 2)(3 4)"` into
    /// a permutation on `0..n`. Elements not mentioned stay fixed, so
    /// `(1,2,5)(3,4)` on six elements is `[0,2,5,4,3,1]` in one-line form.
    pub fn from_cycles(text: &str, n: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        let mut placed = vec![false; n];
        let text = text.trim();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::invalid("expected `(` starting a cycle"))?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::invalid("unexpected text between cycles"));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::invalid("unclosed cycle"))?;
            if close < open {
                return Err(Error::invalid("`)` before `(` in cycle text"));
            }
            let body = &rest[open + 1..close];
            let cycle: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad cycle element `{s}`")))
                })
                .collect::<Result<_>>()?;
            for &e in &cycle {
                if e >= n {
                    return Err(Error::invalid(format!("cycle element {e} out of range for n={n}")));
                }
                if placed[e] {
                    return Err(Error::invalid(format!("element {e} appears in two cycles")));
                }
                placed[e] = true;
            }
            for (i, &e) in cycle.iter().enumerate() {
                map[e] = cycle[(i + 1) % cycle.len()];
            }
            rest = &rest[close + 1..];
        }
        Permutation::from_one_line(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Reorder a slice: position `i` of the result takes element `map[i]`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.map.len() {
            return Err(Error::invalid("permutation size does not match item count"));
        }
        Ok(self.map.iter().map(|&i| items[i].clone()).collect())
    }

    /// Disjoint cycles, fixed points included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.map[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.map[next];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Least k >= 1 with p^k the identity: the lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .map(|c| c.len() as u64)
            .fold(1, lcm)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Function composition: `(p . q)[i] = p[q[i]]`, so applying the result once
/// reorders like applying q, then p... seen as index maps it is "q first".
/// Applying a then b to a sequence equals one application of compose(a, b).
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    if p.len() != q.len() {
        return Err(Error::invalid("only equal-size permutations compose"));
    }
    Ok(Permutation {
        map: q.one_line().iter().map(|&i| p.one_line()[i]).collect(),
    })
}

/// Apply `p` repeatedly to a seed ordering until the seed recurs. The result
/// includes both the seed and its final repeat, so the identity yields two
/// rows and a 3-cycle yields four.
pub fn cycle_sequence<T: Clone + PartialEq>(p: &Permutation, seed: &[T]) -> Result<Vec<Vec<T>>> {
    let mut rows = vec![seed.to_vec()];
    loop {
        let next = p.apply(rows.last().unwrap())?;
        let done = next == seed;
        rows.push(next);
        if done {
            return Ok(rows);
        }
    }
}

/// The two generators of the three-bell hunt: swap the first pair, swap the
/// last pair. Alternating them walks all six orderings and returns home.
pub fn hunt_peal_generators() -> (Permutation, Permutation) {
    (
        Permutation::from_one_line(vec![1, 0, 2]).unwrap(),
        Permutation::from_one_line(vec![0, 2, 1]).unwrap(),
    )
}

/// Apply two generators alternately (first, second, first, ...) until the
/// seed ordering recurs. Both endpoints are included, like
/// [`cycle_sequence`].
pub fn alternating_cycle<T: Clone + PartialEq>(
    first: &Permutation,
    second: &Permutation,
    seed: &[T],
) -> Result<Vec<Vec<T>>> {
    if first.len() != second.len() {
        return Err(Error::invalid("only equal-size permutations compose"));
    }
    // The alternation has a finite period; 2 n! steps bounds one lap.
    let limit = 2 * (1..=seed.len() as u64).product::<u64>().max(1);
    let mut rows = vec![seed.to_vec()];
    for step in 0..limit {
        let gen = if step % 2 == 0 { first } else { second };
        let next = gen.apply(rows.last().unwrap())?;
        let done = next == seed;
        rows.push(next);
        if done {
            return Ok(rows);
        }
    }
    Err(Error::invalid("generator alternation did not return to the seed"))
}

/// Additive sequence: each term is the sum of the previous two. With seeds
/// (1, 1) this is the Fibonacci sequence; successive quotients approach the
/// golden ratio regardless of the seeds.
pub fn lucas_sequence(x0: f64, x1: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("an additive sequence needs at least two terms"));
    }
    let mut seq = Vec::with_capacity(n);
    seq.push(x0);
    seq.push(x1);
    for k in 2..n {
        seq.push(seq[k - 1] + seq[k - 2]);
    }
    Ok(seq)
}

/// Percent error of each successive quotient against the golden ratio.
pub fn golden_ratio_errors(seq: &[f64]) -> Vec<f64> {
    seq.windows(2)
        .map(|w| (w[1] / w[0] / GOLDEN_RATIO - 1.0) * 100.0)
        .collect()
}
