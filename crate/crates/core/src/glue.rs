//! Barycenter gluing: a single point whose orbit follows a prescribed
//! sequence of periodic orbits on exponentially growing time windows.
//!
//! Stage `n` targets the periodic orbit `x_n` (period `p_n`). With
//! `a_0 = b_0 = 0` the windows obey
//!
//! ```text
//! a_n = b_{n-1} + M_n,    b_n = a_n + 2^n (b_{n-1} + M_n) p_n
//! ```
//!
//! and the point agrees with the periodic extension `t -> w_n[t mod p_n]`
//! on `[a_n - pad_n, b_n + pad_n]`, `pad_n = K0 + n`. Consecutive blocks are
//! joined by connector words; `M_n` is the least value making room for the
//! connector and both paddings while starting each block at phase 0.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{empirical_measure, weak_star_distance, PeriodicMeasure};
use crate::point::{shift_distance, LocallyConstant, ScheduledPoint, Segment};
use crate::rational::{dyadic, from_int, pow2, serde_bigint, serde_rational};
use crate::sft::{PeriodicOrbit, PeriodicPoint, Sft, Word};

/// One entry of the target sequence: the orbit and the radius of the
/// measure ball around its periodic measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingTarget {
    pub orbit: PeriodicOrbit,
    #[serde(with = "serde_rational")]
    pub radius: BigRational,
}

/// Base point `x_0`, precision `delta = 2^{-K0}` and the stage targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingTargetSequence {
    pub base: PeriodicPoint,
    pub k0: usize,
    pub entries: Vec<GluingTarget>,
}

impl GluingTargetSequence {
    pub fn new(sft: &Sft, base: PeriodicPoint, k0: usize, entries: Vec<GluingTarget>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NoTargets);
        }
        if k0 == 0 {
            return Err(Error::ScheduleInfeasible { stage: 0, msg: "delta must be at most 1/2".into() });
        }
        base.orbit.check(sft)?;
        for e in &entries {
            e.orbit.check(sft)?;
        }
        Ok(GluingTargetSequence { base, k0, entries })
    }

    /// Cycles through `orbits` `rounds` times, all with the same radius.
    pub fn cycling(
        sft: &Sft,
        base: PeriodicPoint,
        k0: usize,
        orbits: &[PeriodicOrbit],
        rounds: usize,
        radius: BigRational,
    ) -> Result<Self> {
        let entries = (0..rounds)
            .flat_map(|_| orbits.iter())
            .map(|o| GluingTarget { orbit: o.clone(), radius: radius.clone() })
            .collect();
        GluingTargetSequence::new(sft, base, k0, entries)
    }

    /// Whether consecutive closed balls meet inside the invariant measures.
    /// Invariant measures form a convex set and the distance comes from a
    /// norm, so this holds exactly when the centres are at most the sum of
    /// the radii apart.
    pub fn consecutive_intersections(&self, depth: usize) -> Result<Vec<bool>> {
        let measures: Vec<PeriodicMeasure> = self
            .entries
            .iter()
            .map(|e| PeriodicMeasure::new(e.orbit.clone(), depth))
            .collect::<Result<_>>()?;
        self.entries
            .windows(2)
            .zip(measures.windows(2))
            .map(|(e, m)| {
                let d = weak_star_distance(&m[0].marginals, &m[1].marginals, depth)?;
                Ok(d <= &e[0].radius + &e[1].radius)
            })
            .collect()
    }
}

/// `(a_n, b_n)` for given gaps `M_n`, periods `p_n` and growth factors
/// `g_n` (the recurrence uses `g_n = 2^n`).
pub fn recurrence(stages: &[(BigInt, usize, BigInt)]) -> Vec<(BigInt, BigInt)> {
    let mut b_prev = BigInt::zero();
    stages
        .iter()
        .map(|(m, p, g)| {
            let a = &b_prev + m;
            let b = &a + g * &a * BigInt::from(*p);
            b_prev = b.clone();
            (a, b)
        })
        .collect()
}

/// Initial run of the base point covering `[-K0, K0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseBlock {
    pub point: PeriodicPoint,
    #[serde(with = "serde_bigint")]
    pub repetitions: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub n: usize,
    pub orbit: PeriodicOrbit,
    pub period: usize,
    #[serde(with = "serde_bigint")]
    pub growth: BigInt,
    #[serde(with = "serde_bigint")]
    pub gap: BigInt,
    #[serde(with = "serde_bigint")]
    pub a: BigInt,
    #[serde(with = "serde_bigint")]
    pub b: BigInt,
    pub pad: usize,
    /// Joins the previous block to this one; a periodic run when both
    /// sides continue the same periodic point.
    pub connector: Segment,
    #[serde(with = "serde_bigint")]
    pub block_start: BigInt,
    #[serde(with = "serde_bigint")]
    pub repetitions: BigInt,
}

impl Stage {
    /// Last position of the stage block.
    pub fn block_end(&self) -> BigInt {
        &self.block_start + &self.repetitions * self.period - 1
    }

    /// `t -> w_n[t mod p_n]`.
    pub fn extension(&self) -> PeriodicPoint {
        PeriodicPoint::new(self.orbit.clone(), 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingSchedule {
    pub k0: usize,
    pub mixing_time: usize,
    /// True when some growth factor differs from `2^n`.
    pub growth_overridden: bool,
    pub base: BaseBlock,
    pub stages: Vec<Stage>,
}

impl GluingSchedule {
    pub fn stage(&self, n: usize) -> Result<&Stage> {
        if n == 0 {
            return Err(Error::NoSuchStage(0));
        }
        self.stages.get(n - 1).ok_or(Error::NoSuchStage(n))
    }

    pub fn checkpoints(&self) -> Vec<BigInt> {
        self.stages.iter().map(|s| s.b.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }
}

pub fn build_schedule(targets: &GluingTargetSequence, sft: &Sft) -> Result<GluingSchedule> {
    build_schedule_with_growth(targets, sft, None)
}

/// Like [`build_schedule`], with optional per-stage growth factors
/// replacing `2^n`. Overrides are recorded in the schedule.
pub fn build_schedule_with_growth(
    targets: &GluingTargetSequence,
    sft: &Sft,
    growth: Option<&[BigInt]>,
) -> Result<GluingSchedule> {
    if targets.entries.is_empty() {
        return Err(Error::NoTargets);
    }
    let k0 = targets.k0;
    let m = sft.mixing_time();
    let base = &targets.base;
    let p0 = base.orbit.period();
    let base_reps = (k0 + 1).div_ceil(p0);
    let mut end = BigInt::from(base_reps * p0 - 1);
    let mut b_prev = BigInt::zero();
    // periodic point continued by the previous block, with its last symbol
    let mut prev_point = base.clone();
    let mut stages = Vec::with_capacity(targets.entries.len());
    let mut overridden = false;

    for (i, target) in targets.entries.iter().enumerate() {
        let n = i + 1;
        let orbit = target.orbit.clone();
        let p = orbit.period();
        let pb = BigInt::from(p);
        let pad = k0 + n;
        let g = match growth.and_then(|g| g.get(i)) {
            Some(g) => {
                if !g.is_positive() {
                    return Err(Error::ScheduleInfeasible { stage: n, msg: "growth factor must be positive".into() });
                }
                if *g != pow2(n as u32) {
                    overridden = true;
                }
                g.clone()
            }
            None => pow2(n as u32),
        };
        let earliest = &end + m;
        let start = earliest.div_ceil(&pb) * &pb;
        let a = &start + pad;
        let gap = &a - &b_prev;
        let b = &a + &g * &a * &pb;
        let cover_end = &b + pad;
        let reps: BigInt = Integer::div_ceil(&(&cover_end - &start + 1), &pb);

        let here = PeriodicPoint::new(orbit.clone(), 0);
        let conn_len = &start - &end - 1;
        let connector = if here == prev_point {
            Segment::Periodic { orbit: orbit.clone(), phase: here.symbol_phase(&(&end + 1)), len: conn_len }
        } else {
            let steps = (&start - &end).to_usize().expect("connector gap is small");
            let last = prev_point.symbol_at(&end);
            Segment::Connector { word: sft.connector(last, orbit.symbol(0), steps)? }
        };

        stages.push(Stage {
            n,
            orbit,
            period: p,
            growth: g,
            gap,
            a,
            b: b.clone(),
            pad,
            connector,
            block_start: start.clone(),
            repetitions: reps.clone(),
        });
        end = &start + reps * &pb - 1;
        b_prev = b;
        prev_point = here;
    }
    Ok(GluingSchedule {
        k0,
        mixing_time: m,
        growth_overridden: overridden,
        base: BaseBlock { point: base.clone(), repetitions: BigInt::from(base_reps) },
        stages,
    })
}

/// The glued point with its schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalPoint {
    pub point: ScheduledPoint,
    pub schedule: GluingSchedule,
    pub checkpoints: Vec<BigInt>,
}

/// Lays out the block plan of a schedule in one pass.
pub fn construct_universal_point(schedule: &GluingSchedule) -> Result<UniversalPoint> {
    let base = &schedule.base;
    let mut segments = vec![Segment::repeated(base.point.orbit.clone(), base.repetitions.clone(), base.point.phase)];
    let mut pos = base.repetitions.clone() * base.point.orbit.period();
    let mut b_prev = BigInt::zero();
    let mut pad_prev = schedule.k0;
    for st in &schedule.stages {
        let infeasible = |msg: &str| Error::ScheduleInfeasible { stage: st.n, msg: msg.to_string() };
        if &pos - 1 < &b_prev + pad_prev {
            return Err(infeasible("previous block ends inside its padding window"));
        }
        if st.a != &b_prev + &st.gap || st.b != &st.a + &st.growth * &st.a * st.period {
            return Err(infeasible("recurrence does not hold"));
        }
        pos += st.connector.len();
        if pos != st.block_start {
            return Err(infeasible("connector does not end at the block start"));
        }
        if !(&st.block_start % st.period).is_zero() || st.block_start > &st.a - st.pad {
            return Err(infeasible("block start misaligned"));
        }
        segments.push(st.connector.clone());
        segments.push(Segment::repeated(st.orbit.clone(), st.repetitions.clone(), 0));
        pos = st.block_end() + 1;
        if &pos - 1 < &st.b + st.pad {
            return Err(infeasible("block does not cover the padding window"));
        }
        b_prev = st.b.clone();
        pad_prev = st.pad;
    }
    let right = match schedule.stages.last() {
        Some(st) => st.extension(),
        None => base.point.clone(),
    };
    let point = ScheduledPoint::new(base.point.clone(), segments, right);
    Ok(UniversalPoint { point, checkpoints: schedule.checkpoints(), schedule: schedule.clone() })
}

impl UniversalPoint {
    pub fn build(targets: &GluingTargetSequence, sft: &Sft) -> Result<Self> {
        construct_universal_point(&build_schedule(targets, sft)?)
    }
}

/// Outcome of the shadowing check at one stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq5Report {
    pub stage: usize,
    /// `2^{-n+1} delta`.
    pub bound: BigRational,
    /// Sampled positions and the windowed distances found there.
    pub samples: Vec<(BigInt, BigRational)>,
}

/// First position in `[lo, hi]` where the point differs from the periodic
/// point `ext`, comparing run by run.
fn first_disagreement(x: &ScheduledPoint, ext: &PeriodicPoint, lo: &BigInt, hi: &BigInt) -> Option<BigInt> {
    let starts = x.cumulative_lengths();
    let segs = x.segments();
    let q = ext.orbit.period();
    let mut cursor = lo.clone();
    while &cursor <= hi {
        // [cursor, piece_end] is described by one run or tail
        let (piece_end, period, sym): (BigInt, usize, Box<dyn Fn(&BigInt) -> u8>) = if cursor.is_negative() {
            let tail = x.left_tail().clone();
            (BigInt::from(-1), tail.orbit.period(), Box::new(move |t| tail.symbol_at(t)))
        } else if &cursor >= x.extent() {
            let tail = x.right_tail().clone();
            (hi.clone(), tail.orbit.period(), Box::new(move |t| tail.symbol_at(t)))
        } else {
            let i = starts.partition_point(|s| s <= &cursor) - 1;
            let seg_end = &starts[i + 1] - 1;
            match &segs[i] {
                Segment::Periodic { orbit, phase, .. } => {
                    let st = starts[i].clone();
                    let pt = PeriodicPoint::new(orbit.clone(), 0);
                    let ph = *phase;
                    (seg_end, orbit.period(), Box::new(move |t| pt.symbol_at(&(t - &st + ph))))
                }
                Segment::Connector { word } => {
                    let st = starts[i].clone();
                    let w = word.clone();
                    let len = w.len();
                    (seg_end, len, Box::new(move |t| w.0[(t - &st).to_usize().expect("inside connector")]))
                }
            }
        };
        let stop = if &piece_end < hi { piece_end } else { hi.clone() };
        // two periodic sequences agree on an interval iff they agree on
        // its first lcm(periods) positions
        let span: BigInt = std::cmp::min(&stop - &cursor + 1, BigInt::from(Integer::lcm(&period, &q)));
        let span = span.to_usize().expect("span bounded by lcm");
        for t in 0..span {
            let pos = &cursor + t;
            if sym(&pos) != ext.symbol_at(&pos) {
                return Some(pos);
            }
        }
        cursor = stop + 1;
    }
    None
}

/// Checks `d(f^j x_n, f^j x) < 2^{-n+1} delta` for all `a_n <= j <= b_n`.
///
/// Structurally, agreement on `[a_n - pad_n, b_n + pad_n]` is verified
/// run by run; then `samples` positions (always including both
/// endpoints) are re-checked with [`shift_distance`].
pub fn verify_eq5(up: &UniversalPoint, n: usize, samples: usize, seed: u64) -> Result<Eq5Report> {
    let st = up.schedule.stage(n)?;
    let k0 = up.schedule.k0;
    let bound = dyadic((k0 + n - 1) as u32);
    let ext = st.extension();
    let lo = &st.a - st.pad;
    let hi = &st.b + st.pad;
    if let Some(t) = first_disagreement(&up.point, &ext, &lo, &hi) {
        let witness = t.clamp(st.a.clone(), st.b.clone());
        return Err(Error::Violation { stage: n, witness });
    }
    let ext_point = ScheduledPoint::periodic(ext);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let width = &st.b - &st.a;
    let mut positions = vec![st.a.clone(), st.b.clone()];
    for _ in 2..samples.max(2) {
        let offset = random_below(&mut rng, &(&width + 1));
        positions.push(&st.a + offset);
    }
    let mut out = Vec::with_capacity(positions.len());
    for j in positions.into_iter().take(samples.max(2)) {
        let d = shift_distance(&up.point, &ext_point, &j, st.pad);
        if d >= bound {
            return Err(Error::Violation { stage: n, witness: j });
        }
        out.push((j, d));
    }
    Ok(Eq5Report { stage: n, bound, samples: out })
}

/// Uniform integer in `[0, bound)` for a positive big integer bound.
fn random_below(rng: &mut impl Rng, bound: &BigInt) -> BigInt {
    let bytes = bound.to_bytes_be().1.len() + 8;
    let raw: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
    BigInt::from_bytes_be(num_bigint::Sign::Plus, &raw).mod_floor(bound)
}

/// Indices given as sorted, disjoint, inclusive intervals of
/// non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    intervals: Vec<(BigInt, BigInt)>,
}

impl IndexSet {
    pub fn from_intervals(mut intervals: Vec<(BigInt, BigInt)>) -> Result<Self> {
        intervals.retain(|(lo, hi)| lo <= hi);
        intervals.sort();
        let mut merged: Vec<(BigInt, BigInt)> = Vec::new();
        for (lo, hi) in intervals {
            if lo.is_negative() {
                return Err(Error::ScheduleInfeasible { stage: 0, msg: "negative index".into() });
            }
            match merged.last_mut() {
                Some(last) if lo <= &last.1 + 1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        Ok(IndexSet { intervals: merged })
    }

    pub fn from_points(points: impl IntoIterator<Item = u64>) -> Result<Self> {
        IndexSet::from_intervals(points.into_iter().map(|p| (BigInt::from(p), BigInt::from(p))).collect())
    }

    pub fn intervals(&self) -> &[(BigInt, BigInt)] {
        &self.intervals
    }

    pub fn cardinality(&self) -> BigInt {
        self.intervals.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }

    pub fn max(&self) -> &BigInt {
        &self.intervals.last().expect("nonempty").1
    }
}

/// `|mean_{j in A} xi(f^j y) - mean_{j <= max A} xi(f^j y)|` against
/// `2 (max A + 1 - card A) ||xi|| / card A`.
pub fn eq6_bound(
    a: &IndexSet,
    xi: &LocallyConstant,
    y: &ScheduledPoint,
    sft: &Sft,
) -> Result<(BigRational, BigRational)> {
    let card = a.cardinality();
    let full = a.max() + 1;
    let sum_a = a
        .intervals
        .iter()
        .map(|(lo, hi)| y.window_sum(lo, &(hi - lo + 1), xi))
        .fold(BigRational::zero(), |s, v| s + v);
    let sum_full = y.window_sum(&BigInt::zero(), &full, xi);
    let lhs = (sum_a / from_int(&card) - sum_full / from_int(&full)).abs();
    let rhs = BigRational::from_integer(BigInt::from(2) * (&full - &card)) * xi.sup_norm(sft) / from_int(&card);
    if lhs > rhs {
        return Err(Error::BoundViolated {
            stage: 0,
            lhs: crate::rational::format(&lhs),
            bound: crate::rational::format(&rhs),
        });
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step2Report {
    pub stage: usize,
    /// `|int xi d nu_{b_n} - int xi dY_n|`.
    pub lhs: BigRational,
    /// `w_xi(2^{-n+1} delta)`.
    pub modulus: BigRational,
    /// `2 a_n / (b_n - a_n)`.
    pub tail: BigRational,
    pub bound: BigRational,
}

/// Exact comparison of the checkpoint average with the target orbit mean.
pub fn verify_step2(up: &UniversalPoint, n: usize, xi: &LocallyConstant, sft: &Sft) -> Result<Step2Report> {
    let norm = xi.sup_norm(sft);
    if norm > BigRational::one() {
        return Err(Error::ObservableTooLarge(crate::rational::format(&norm)));
    }
    let st = up.schedule.stage(n)?;
    let avg = up.point.window_sum(&BigInt::zero(), &st.b, xi) / from_int(&st.b);
    let lhs = (avg - xi.orbit_mean(&st.orbit)).abs();
    let modulus = xi.oscillation(up.schedule.k0 + n - 1, sft);
    let tail = BigRational::new(BigInt::from(2) * &st.a, &st.b - &st.a);
    let bound = &modulus + &tail;
    if lhs > bound {
        return Err(Error::BoundViolated {
            stage: n,
            lhs: crate::rational::format(&lhs),
            bound: crate::rational::format(&bound),
        });
    }
    Ok(Step2Report { stage: n, lhs, modulus, tail, bound })
}

/// Closest approach of the checkpoint empirical measures to one net element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRow {
    pub orbit: PeriodicOrbit,
    pub best_stage: usize,
    pub distance: BigRational,
}

/// For each net element, the stage whose checkpoint measure `nu_{b_n}` is
/// nearest (ties go to the earlier stage).
pub fn vfx_density_report(up: &UniversalPoint, net: &[PeriodicMeasure], depth: usize) -> Result<Vec<DensityRow>> {
    let checkpoint_measures = up
        .checkpoints
        .par_iter()
        .map(|b| empirical_measure(&up.point, b, depth).map(|e| e.marginals))
        .collect::<Result<Vec<_>>>()?;
    net.iter()
        .map(|y| {
            let mut best: Option<(usize, BigRational)> = None;
            for (i, nu) in checkpoint_measures.iter().enumerate() {
                let d = weak_star_distance(nu, &y.marginals, depth)?;
                if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                    best = Some((i + 1, d));
                }
            }
            let (best_stage, distance) = best.ok_or(Error::NoTargets)?;
            Ok(DensityRow { orbit: y.orbit.clone(), best_stage, distance })
        })
        .collect()
}

/// A periodic point shadowing `p` on `[-n1, 0]` and, after `N` steps, `q`
/// on `[0, n2]`, both at precision `2^{-K}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barycenter {
    pub z: PeriodicPoint,
    pub n: usize,
    /// One period of `z`, starting at position `-n1 - K`.
    pub word: Word,
}

/// Builds the cyclic word `[p-block][connector][q-block][connector]`, with
/// the `p`-block on `[-n1-K, K]` and the `q`-block on `[N-K, N+n2+K]`,
/// `N = 2K + m`. Both orbits are taken at phase 0.
pub fn barycenter_connect(
    sft: &Sft,
    p: &PeriodicOrbit,
    q: &PeriodicOrbit,
    k: usize,
    n1: usize,
    n2: usize,
) -> Result<Barycenter> {
    p.check(sft)?;
    q.check(sft)?;
    let pp = PeriodicPoint::new(p.clone(), 0);
    if p == q {
        return Ok(Barycenter { z: pp, n: 0, word: p.word().clone() });
    }
    let m = sft.mixing_time();
    let n = 2 * k + m;
    let start = -((n1 + k) as i64);
    let mut word: Vec<u8> = (start..=k as i64).map(|t| pp.symbol_at(&BigInt::from(t))).collect();
    let q_first = q.symbol((q.period() - k % q.period()) % q.period());
    word.extend(sft.connector(*word.last().expect("p-block nonempty"), q_first, m)?.0);
    let qp = PeriodicPoint::new(q.clone(), 0);
    word.extend((-(k as i64)..=(n2 + k) as i64).map(|i| qp.symbol_at(&BigInt::from(i))));
    word.extend(sft.connector(*word.last().expect("q-block nonempty"), word[0], m)?.0);
    let word = Word(word);
    let at_start = PeriodicPoint::from_cyclic_word(sft, &word)?;
    let z = PeriodicPoint::new(at_start.orbit.clone(), at_start.phase + n1 + k);
    Ok(Barycenter { z, n, word })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn orbit(w: &str) -> PeriodicOrbit {
        PeriodicOrbit::canonical(&Word::from(w)).unwrap()
    }

    fn targets(sft: &Sft, base: &str, k0: usize, ws: &[&str]) -> GluingTargetSequence {
        let entries = ws.iter().map(|w| GluingTarget { orbit: orbit(w), radius: ratio(1, 4) }).collect();
        GluingTargetSequence::new(sft, PeriodicPoint::new(orbit(base), 0), k0, entries).unwrap()
    }

    #[test]
    fn recurrence_example() {
        let ab = recurrence(&[(BigInt::from(5), 2, BigInt::from(2)), (BigInt::from(5), 3, BigInt::from(4))]);
        assert_eq!(ab, vec![(BigInt::from(5), BigInt::from(25)), (BigInt::from(30), BigInt::from(390))]);
    }

    #[test]
    fn two_target_schedule() {
        let full = Sft::full(2);
        let t = targets(&full, "0", 2, &["0", "1"]);
        let up = UniversalPoint::build(&t, &full).unwrap();
        let s = &up.schedule;
        // base covers [0, 2]; stage 1 starts at 3 and continues the zeros
        assert_eq!(s.stages[0].block_start, BigInt::from(3));
        assert_eq!(s.stages[0].a, BigInt::from(6));
        assert_eq!(s.stages[0].b, BigInt::from(18));
        // stage 1 block ends at b_1 + pad_1 = 21; stage 2 starts right after
        assert_eq!(s.stages[1].block_start, BigInt::from(22));
        assert_eq!(s.stages[1].a, BigInt::from(26));
        assert_eq!(s.stages[1].b, BigInt::from(130));
        assert_eq!(s.stages[1].gap, BigInt::from(8));
        for st in &s.stages[1..] {
            assert_eq!(up.point.coordinate(&st.a), 1);
            assert_eq!(up.point.coordinate(&st.b), 1);
        }
        assert_eq!(up.point.window(&BigInt::from(-2), 5), Word::from("00000"));
        up.point.check_admissible(&full).unwrap();
        for n in 1..=2 {
            verify_eq5(&up, n, 16, 7).unwrap();
        }
    }

    #[test]
    fn single_target_equal_to_base() {
        let gm = Sft::golden_mean();
        let t = targets(&gm, "01", 3, &["01"]);
        let up = UniversalPoint::build(&t, &gm).unwrap();
        let x0 = ScheduledPoint::periodic(PeriodicPoint::new(orbit("01"), 0));
        let far = up.point.extent() + 5;
        for j in [-7i64, 0, 3, 10] {
            assert_eq!(up.point.coordinate_i64(j), x0.coordinate_i64(j));
        }
        assert_eq!(up.point.coordinate(&far), x0.coordinate(&far));
    }

    #[test]
    fn corrupted_point_is_caught() {
        let full = Sft::full(2);
        let t = targets(&full, "0", 2, &["01", "1"]);
        let mut up = UniversalPoint::build(&t, &full).unwrap();
        let st = up.schedule.stages[0].clone();
        let j = &st.a + 3;
        let flipped = 1 - up.point.coordinate(&j);
        up.point = up.point.with_symbol(&j, flipped);
        assert_eq!(verify_eq5(&up, 1, 8, 1), Err(Error::Violation { stage: 1, witness: j }));
        verify_eq5(&up, 2, 8, 1).unwrap();
    }

    #[test]
    fn index_set_average_example() {
        let full = Sft::full(2);
        let y = ScheduledPoint::periodic(PeriodicPoint::new(orbit("001"), 0));
        let a = IndexSet::from_points([2, 3, 4]).unwrap();
        let xi = LocallyConstant::indicator(&Word::from("1"));
        let (_, rhs) = eq6_bound(&a, &xi, &y, &full).unwrap();
        assert_eq!(rhs, ratio(4, 3));
        let one = LocallyConstant::constant(1, ratio(1, 1), &full);
        assert_eq!(eq6_bound(&a, &one, &y, &full).unwrap().0, BigRational::zero());
    }

    #[test]
    fn checkpoint_average_bound() {
        let full = Sft::full(2);
        let t = targets(&full, "0", 1, &["0", "1", "01", "011"]);
        let up = UniversalPoint::build(&t, &full).unwrap();
        let xi = LocallyConstant::indicator(&Word::from("1"));
        for n in 1..=4 {
            let r = verify_step2(&up, n, &xi, &full).unwrap();
            let st = &up.schedule.stages[n - 1];
            assert_eq!(r.modulus, BigRational::zero());
            assert_eq!(r.tail, BigRational::new(BigInt::from(2), pow2(n as u32) * st.period));
        }
    }

    #[test]
    fn barycenter_example() {
        let full = Sft::full(2);
        let bc = barycenter_connect(&full, &orbit("0"), &orbit("1"), 2, 3, 3).unwrap();
        assert_eq!(bc.n, 5);
        assert_eq!(bc.word, Word::from("0000000011111111"));
        let same = barycenter_connect(&full, &orbit("0"), &orbit("0"), 4, 2, 2).unwrap();
        assert_eq!((same.z.orbit, same.n), (orbit("0"), 0));
    }

    #[test]
    fn schedule_json_reload() {
        let gm = Sft::golden_mean();
        let t = targets(&gm, "0", 2, &["01", "001", "0"]);
        let s = build_schedule(&t, &gm).unwrap();
        let back = GluingSchedule::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(construct_universal_point(&back).unwrap().point, construct_universal_point(&s).unwrap().point);
    }
}
