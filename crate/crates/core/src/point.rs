//! Lazily represented bi-infinite points: a periodic left tail, a finite
//! plan of periodic runs and connector words, and a periodic right tail.
//! Positions are arbitrary-precision integers; coordinate lookup costs a
//! binary search over the plan and never touches the magnitude of `j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::serde_bigint;
use crate::sft::{PeriodicOrbit, PeriodicPoint, Sft, Symbol, Word};

/// One piece of the block plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    /// `len` symbols of the orbit word, the first one at `phase`.
    Periodic {
        orbit: PeriodicOrbit,
        phase: usize,
        #[serde(with = "serde_bigint")]
        len: BigInt,
    },
    Connector { word: Word },
}

impl Segment {
    /// `repetitions` full copies of the orbit word starting at `phase`.
    pub fn repeated(orbit: PeriodicOrbit, repetitions: BigInt, phase: usize) -> Self {
        let len = repetitions * orbit.period();
        let phase = phase % orbit.period();
        Segment::Periodic { orbit, phase, len }
    }

    pub fn len(&self) -> BigInt {
        match self {
            Segment::Periodic { len, .. } => len.clone(),
            Segment::Connector { word } => BigInt::from(word.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }

    /// Number of full orbit words if the run is a whole number of periods.
    pub fn repetitions(&self) -> Option<BigInt> {
        match self {
            Segment::Periodic { orbit, len, .. } => {
                let (q, r) = len.div_rem(&BigInt::from(orbit.period()));
                r.is_zero().then_some(q)
            }
            Segment::Connector { .. } => None,
        }
    }

    fn symbol(&self, offset: &BigInt) -> Symbol {
        match self {
            Segment::Periodic { orbit, phase, .. } => {
                let p = BigInt::from(orbit.period());
                let idx: usize = (offset + *phase).mod_floor(&p).try_into().expect("below period");
                orbit.symbol(idx)
            }
            Segment::Connector { word } => {
                let idx: usize = offset.try_into().expect("connector offset fits usize");
                word.0[idx]
            }
        }
    }
}

/// A bi-infinite symbol sequence: `left_tail` on `(-inf, 0)`, the
/// segments laid out contiguously from position 0, and `right_tail` from
/// the end of the plan onward. Tails use absolute positions
/// (`PeriodicPoint::symbol_at(j)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduledPoint {
    left_tail: PeriodicPoint,
    segments: Vec<Segment>,
    starts: Vec<BigInt>,
    right_tail: PeriodicPoint,
}

#[derive(Serialize, Deserialize)]
struct PointFile {
    left_tail: PeriodicPoint,
    segments: Vec<Segment>,
    right_tail: PeriodicPoint,
}

/// A contiguous stretch of positions with a single description, used by the
/// closed-form window counting.
enum Piece<'a> {
    Periodic { start: Option<BigInt>, end: Option<BigInt>, point: PeriodicPoint },
    Finite { start: BigInt, word: &'a Word },
}

impl ScheduledPoint {
    pub fn new(left_tail: PeriodicPoint, segments: Vec<Segment>, right_tail: PeriodicPoint) -> Self {
        let segments: Vec<Segment> = segments.into_iter().filter(|s| !s.is_empty()).collect();
        let mut starts = Vec::with_capacity(segments.len() + 1);
        let mut pos = BigInt::zero();
        for s in &segments {
            starts.push(pos.clone());
            pos += s.len();
        }
        starts.push(pos);
        ScheduledPoint { left_tail, segments, starts, right_tail }
    }

    /// The purely periodic point.
    pub fn periodic(point: PeriodicPoint) -> Self {
        ScheduledPoint::new(point.clone(), Vec::new(), point)
    }

    pub fn left_tail(&self) -> &PeriodicPoint {
        &self.left_tail
    }

    pub fn right_tail(&self) -> &PeriodicPoint {
        &self.right_tail
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Start positions of the segments, followed by the plan's end.
    pub fn cumulative_lengths(&self) -> &[BigInt] {
        &self.starts
    }

    /// End of the finite plan; positions from here on follow the right tail.
    pub fn extent(&self) -> &BigInt {
        self.starts.last().expect("starts is never empty")
    }

    fn segment_index(&self, j: &BigInt) -> Option<usize> {
        if j.is_negative() || j >= self.extent() {
            return None;
        }
        // last start <= j
        let idx = self.starts.partition_point(|s| s <= j) - 1;
        Some(idx)
    }

    pub fn coordinate(&self, j: &BigInt) -> Symbol {
        if j.is_negative() {
            return self.left_tail.symbol_at(j);
        }
        match self.segment_index(j) {
            Some(i) => self.segments[i].symbol(&(j - &self.starts[i])),
            None => self.right_tail.symbol_at(j),
        }
    }

    pub fn coordinate_i64(&self, j: i64) -> Symbol {
        self.coordinate(&BigInt::from(j))
    }

    /// Symbols at positions `[from, from + len)`.
    pub fn window(&self, from: &BigInt, len: usize) -> Word {
        Word((0..len).map(|i| self.coordinate(&(from + i))).collect())
    }

    /// Checks every symbol and every junction against the transition matrix.
    pub fn check_admissible(&self, sft: &Sft) -> Result<()> {
        self.left_tail.orbit.check(sft)?;
        self.right_tail.orbit.check(sft)?;
        for seg in &self.segments {
            match seg {
                Segment::Periodic { orbit, .. } => orbit.check(sft)?,
                Segment::Connector { word } => sft.check_admissible(word)?,
            }
        }
        let mut junctions: Vec<BigInt> = self.starts.clone();
        junctions.dedup();
        for j in junctions {
            let w = self.window(&(&j - 1), 2);
            if !sft.is_admissible(&w.0) {
                return Err(Error::Inadmissible(w));
            }
        }
        Ok(())
    }

    /// Copy of the point with position `j` replaced by `symbol`; the
    /// containing run is split around it. Used as a negative control;
    /// `j` must be non-negative.
    pub fn with_symbol(&self, j: &BigInt, symbol: Symbol) -> ScheduledPoint {
        assert!(!j.is_negative(), "only non-negative positions can be edited");
        let single = Segment::Connector { word: Word(vec![symbol]) };
        if j >= self.extent() {
            // materialise the right-tail stretch between the plan and j
            let mut segments = self.segments.clone();
            let gap = j - self.extent();
            if gap.is_positive() {
                segments.push(Segment::Periodic {
                    orbit: self.right_tail.orbit.clone(),
                    phase: self.right_tail.symbol_phase(self.extent()),
                    len: gap,
                });
            }
            segments.push(single);
            return ScheduledPoint::new(self.left_tail.clone(), segments, self.right_tail.clone());
        }
        let i = self.segment_index(j).expect("inside the plan");
        let offset = j - &self.starts[i];
        let mut segments = self.segments[..i].to_vec();
        match &self.segments[i] {
            Segment::Periodic { orbit, phase, len } => {
                let p = orbit.period();
                segments.push(Segment::Periodic { orbit: orbit.clone(), phase: *phase, len: offset.clone() });
                segments.push(single);
                let after_phase: usize = (&offset + BigInt::from(1 + *phase)).mod_floor(&BigInt::from(p)).try_into().unwrap();
                segments.push(Segment::Periodic {
                    orbit: orbit.clone(),
                    phase: after_phase,
                    len: len - &offset - 1,
                });
            }
            Segment::Connector { word } => {
                let mut w = word.clone();
                let idx: usize = offset.try_into().unwrap();
                w.0[idx] = symbol;
                segments.push(Segment::Connector { word: w });
            }
        }
        segments.extend_from_slice(&self.segments[i + 1..]);
        ScheduledPoint::new(self.left_tail.clone(), segments, self.right_tail.clone())
    }

    fn pieces(&self) -> Vec<Piece<'_>> {
        let mut out = Vec::with_capacity(self.segments.len() + 2);
        out.push(Piece::Periodic { start: None, end: Some(BigInt::zero()), point: self.left_tail.clone() });
        for (seg, start) in self.segments.iter().zip(&self.starts) {
            match seg {
                Segment::Periodic { orbit, phase, len } => {
                    let p = BigInt::from(orbit.period());
                    // absolute phase: symbol_at(start) must equal orbit[phase]
                    let abs: usize = (BigInt::from(*phase) - start).mod_floor(&p).try_into().unwrap();
                    out.push(Piece::Periodic {
                        start: Some(start.clone()),
                        end: Some(start + len),
                        point: PeriodicPoint::new(orbit.clone(), abs),
                    });
                }
                Segment::Connector { word } => out.push(Piece::Finite { start: start.clone(), word }),
            }
        }
        out.push(Piece::Periodic { start: Some(self.extent().clone()), end: None, point: self.right_tail.clone() });
        out
    }

    /// Exact counts of the length-`depth` windows `x[j..j+depth)` over
    /// `j in [from, from + count)`. Closed form per run: full periods are
    /// counted by multiplication, so the cost is independent of `count`.
    pub fn window_counts(&self, from: &BigInt, count: &BigInt, depth: usize) -> BTreeMap<Word, BigInt> {
        let mut counts: BTreeMap<Word, BigInt> = BTreeMap::new();
        if !count.is_positive() || depth == 0 {
            if depth == 0 && count.is_positive() {
                counts.insert(Word::default(), count.clone());
            }
            return counts;
        }
        let to = from + count;
        let d = BigInt::from(depth);
        for piece in self.pieces() {
            let (ps, pe) = match &piece {
                Piece::Periodic { start, end, .. } => (start.clone(), end.clone()),
                Piece::Finite { start, word } => (Some(start.clone()), Some(start + word.len())),
            };
            let lo = match &ps {
                Some(s) if s > from => s.clone(),
                _ => from.clone(),
            };
            let hi = match &pe {
                Some(e) if e < &to => e.clone(),
                _ => to.clone(),
            };
            if lo >= hi {
                continue;
            }
            // windows starting at j <= pe - depth stay inside the piece
            let interior_end = match &pe {
                Some(e) => {
                    let ie = e - &d + 1;
                    if ie < hi { ie } else { hi.clone() }
                }
                None => hi.clone(),
            };
            if interior_end > lo {
                let n = &interior_end - &lo;
                match &piece {
                    Piece::Periodic { point, .. } => add_periodic_windows(&mut counts, point, &lo, &n, depth),
                    Piece::Finite { start, word } => {
                        let a: usize = (&lo - start).try_into().unwrap();
                        let b: usize = (&interior_end - start).try_into().unwrap();
                        for i in a..b {
                            bump(&mut counts, Word(word.0[i..i + depth].to_vec()), &BigInt::one());
                        }
                    }
                }
            }
            let mut j = if interior_end > lo { interior_end } else { lo };
            while j < hi {
                bump(&mut counts, self.window(&j, depth), &BigInt::one());
                j += 1;
            }
        }
        counts
    }

    /// `sum_{j in [from, from+count)} f(x[j..j+depth))` for a locally
    /// constant observable given on words of length `depth`.
    pub fn window_sum(&self, from: &BigInt, count: &BigInt, f: &LocallyConstant) -> BigRational {
        self.window_counts(from, count, f.depth())
            .into_iter()
            .map(|(w, c)| f.value(&w) * BigRational::from_integer(c))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Materialises positions `[0, len)`; for testing and small horizons.
    pub fn prefix(&self, len: usize) -> Vec<Symbol> {
        (0..len).map(|j| self.coordinate(&BigInt::from(j))).collect()
    }

    pub fn to_json(&self) -> String {
        let file = PointFile {
            left_tail: self.left_tail.clone(),
            segments: self.segments.clone(),
            right_tail: self.right_tail.clone(),
        };
        serde_json::to_string_pretty(&file).expect("point serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PointFile = serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        for seg in &file.segments {
            if let Segment::Periodic { orbit, phase, len } = seg {
                if *phase >= orbit.period() || len.is_negative() {
                    return Err(Error::Manifest(format!("bad periodic segment {orbit} phase {phase}")));
                }
            }
        }
        Ok(ScheduledPoint::new(file.left_tail, file.segments, file.right_tail))
    }
}

impl PeriodicPoint {
    /// Index into the orbit word of the symbol at position `j`.
    pub fn symbol_phase(&self, j: &BigInt) -> usize {
        (j + self.phase).mod_floor(&BigInt::from(self.orbit.period())).try_into().unwrap()
    }
}

fn bump(counts: &mut BTreeMap<Word, BigInt>, w: Word, by: &BigInt) {
    *counts.entry(w).or_insert_with(BigInt::zero) += by;
}

fn add_periodic_windows(counts: &mut BTreeMap<Word, BigInt>, point: &PeriodicPoint, from: &BigInt, n: &BigInt, depth: usize) {
    let p = point.orbit.period();
    let (full, rem) = n.div_rem(&BigInt::from(p));
    let rem: usize = rem.try_into().unwrap();
    let first = point.symbol_phase(from);
    let window_at = |phase: usize| Word((0..depth).map(|i| point.orbit.symbol(phase + i)).collect());
    if full.is_positive() {
        for r in 0..p {
            bump(counts, window_at(r), &full);
        }
    }
    for i in 0..rem {
        bump(counts, window_at((first + i) % p), &BigInt::one());
    }
}

/// A real-valued function of the first `depth` coordinates, given on words;
/// words not listed evaluate to 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyConstant {
    depth: usize,
    values: BTreeMap<Word, BigRational>,
}

impl LocallyConstant {
    pub fn new(depth: usize, values: BTreeMap<Word, BigRational>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if let Some(w) = values.keys().find(|w| w.len() != depth) {
            return Err(Error::ParseWord(w.to_string()));
        }
        Ok(LocallyConstant { depth, values })
    }

    /// Indicator of the cylinder `[w]` at coordinates `0..|w|`.
    pub fn indicator(w: &Word) -> Self {
        let mut values = BTreeMap::new();
        values.insert(w.clone(), BigRational::one());
        LocallyConstant { depth: w.len().max(1), values }
    }

    pub fn constant(depth: usize, c: BigRational, sft: &Sft) -> Self {
        let values = sft.admissible_words(depth).into_iter().map(|w| (w, c.clone())).collect();
        LocallyConstant { depth, values }
    }

    /// Depth-1 observable from per-symbol weights.
    pub fn from_symbol_weights(weights: &[BigRational]) -> Self {
        let values = weights
            .iter()
            .enumerate()
            .map(|(s, v)| (Word(vec![s as Symbol]), v.clone()))
            .collect();
        LocallyConstant { depth: 1, values }
    }

    /// Sum of per-symbol weights over each admissible word of length `block`.
    pub fn block_sum(weights: &[BigRational], block: usize, sft: &Sft) -> Self {
        let values = sft
            .admissible_words(block)
            .into_iter()
            .map(|w| {
                let s = w.0.iter().map(|&c| weights[c as usize].clone()).fold(BigRational::zero(), |a, b| a + b);
                (w, s)
            })
            .collect();
        LocallyConstant { depth: block, values }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Word, BigRational> {
        &self.values
    }

    pub fn value(&self, w: &Word) -> BigRational {
        self.values.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Sup norm over admissible words.
    pub fn sup_norm(&self, sft: &Sft) -> BigRational {
        let words = sft.admissible_words(self.depth);
        let vals: Vec<BigRational> = words.iter().map(|w| self.value(w)).collect();
        crate::rational::max_abs(vals.iter())
    }

    /// Oscillation over pairs of points at distance `<= 2^{-t}`, i.e.
    /// points agreeing on coordinates `-(t-1)..=(t-1)`. Only the first `t`
    /// forward coordinates matter for a function of `x[0..depth)`.
    pub fn oscillation(&self, t: usize, sft: &Sft) -> BigRational {
        if t >= self.depth {
            return BigRational::zero();
        }
        let mut ranges: BTreeMap<Word, (BigRational, BigRational)> = BTreeMap::new();
        for w in sft.admissible_words(self.depth) {
            let v = self.value(&w);
            let key = Word(w.0[..t].to_vec());
            let e = ranges.entry(key).or_insert_with(|| (v.clone(), v.clone()));
            if v < e.0 {
                e.0 = v.clone();
            }
            if v > e.1 {
                e.1 = v;
            }
        }
        ranges
            .values()
            .map(|(lo, hi)| hi - lo)
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
    }

    /// Mean over one period of the orbit.
    pub fn orbit_mean(&self, orbit: &PeriodicOrbit) -> BigRational {
        let p = orbit.period();
        let total = (0..p)
            .map(|r| self.value(&Word((0..self.depth).map(|i| orbit.symbol(r + i)).collect())))
            .fold(BigRational::zero(), |a, b| a + b);
        total / BigRational::from_integer(BigInt::from(p))
    }
}

/// Shift-metric distance `d(f^j x, f^j y)` seen through a window of
/// half-width `window`: `2^{-k}` for the nearest disagreement offset
/// `k <= window`, or 0 when the whole window agrees.
pub fn shift_distance(x: &ScheduledPoint, y: &ScheduledPoint, j: &BigInt, window: usize) -> BigRational {
    for k in 0..=window {
        let kk = BigInt::from(k);
        if x.coordinate(&(j + &kk)) != y.coordinate(&(j + &kk)) || x.coordinate(&(j - &kk)) != y.coordinate(&(j - &kk)) {
            return crate::rational::dyadic(k as u32);
        }
    }
    BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn orbit(w: &str) -> PeriodicOrbit {
        PeriodicOrbit::canonical(&Word::from(w)).unwrap()
    }

    #[test]
    fn coordinate_examples() {
        let zero = PeriodicPoint::new(orbit("0"), 0);
        let x = ScheduledPoint::new(zero.clone(), vec![Segment::repeated(orbit("0"), BigInt::from(5), 0)], zero);
        let far: BigInt = "1000000000000000000000000000000".parse().unwrap();
        assert_eq!(x.coordinate(&far), 0);

        let alt = PeriodicPoint::new(orbit("01"), 0);
        let y = ScheduledPoint::new(alt.clone(), vec![Segment::repeated(orbit("01"), BigInt::from(3), 0)], alt);
        assert_eq!(y.coordinate_i64(4), 0);
        assert_eq!(y.coordinate_i64(-1), 1);
        assert_eq!(y.prefix(6), vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn distance_examples() {
        let zero = ScheduledPoint::periodic(PeriodicPoint::new(orbit("0"), 0));
        let one = ScheduledPoint::periodic(PeriodicPoint::new(orbit("1"), 0));
        assert_eq!(shift_distance(&zero, &zero, &BigInt::from(3), 10), BigRational::zero());
        assert_eq!(shift_distance(&zero, &one, &BigInt::from(-7), 10), ratio(1, 1));
        let y = zero.with_symbol(&BigInt::from(5), 1);
        assert_eq!(shift_distance(&zero, &y, &BigInt::from(2), 10), ratio(1, 8));
        assert_eq!(shift_distance(&zero, &y, &BigInt::from(2), 2), BigRational::zero());
    }

    #[test]
    fn with_symbol_splits_runs() {
        let alt = PeriodicPoint::new(orbit("01"), 0);
        let x = ScheduledPoint::new(alt.clone(), vec![Segment::repeated(orbit("01"), BigInt::from(4), 0)], alt);
        let y = x.with_symbol(&BigInt::from(3), 0);
        assert_eq!(y.prefix(10), vec![0, 1, 0, 0, 0, 1, 0, 1, 0, 1]);
        let z = x.with_symbol(&BigInt::from(12), 1);
        assert_eq!(z.prefix(14), vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn window_counts_small() {
        // (01)^5 followed by zeros
        let zero = PeriodicPoint::new(orbit("0"), 0);
        let x = ScheduledPoint::new(zero.clone(), vec![Segment::repeated(orbit("01"), BigInt::from(5), 0)], zero);
        let c = x.window_counts(&BigInt::zero(), &BigInt::from(10), 2);
        assert_eq!(c.get(&Word::from("01")), Some(&BigInt::from(5)));
        assert_eq!(c.get(&Word::from("10")), Some(&BigInt::from(5)));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn oscillation_levels() {
        let full = Sft::full(2);
        let xi = LocallyConstant::indicator(&Word::from("01"));
        assert_eq!(xi.oscillation(0, &full), ratio(1, 1));
        assert_eq!(xi.oscillation(1, &full), ratio(1, 1));
        assert_eq!(xi.oscillation(2, &full), BigRational::zero());
        assert_eq!(xi.orbit_mean(&orbit("001")), ratio(1, 3));
    }

    #[test]
    fn json_roundtrip() {
        let zero = PeriodicPoint::new(orbit("0"), 0);
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let x = ScheduledPoint::new(
            zero.clone(),
            vec![Segment::Connector { word: Word::from("1") }, Segment::repeated(orbit("011"), big, 2)],
            PeriodicPoint::new(orbit("011"), 1),
        );
        let back = ScheduledPoint::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
    }
}
