//! Ball systems in measure space and cylinder-by-cylinder witnesses that
//! universal points occur in every open set.
//!
//! A scan over the admissible words of a fixed length builds, inside each
//! cylinder, a glued point whose checkpoint empirical measures are then
//! tested against every ball. Only the checkpoints `b_n` are used as
//! horizons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::glue::{build_schedule_with_growth, construct_universal_point, GluingTarget, GluingTargetSequence, UniversalPoint};
use crate::measures::{empirical_measure, CylinderDistribution, MeasureBall, PeriodicMeasure};
use crate::point::ScheduledPoint;
use crate::rational;
use crate::sft::{PeriodicPoint, Sft, Word};

/// A ball `V` and a larger concentric ball `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallPair {
    pub net_index: usize,
    pub round: usize,
    pub v: MeasureBall,
    pub u: MeasureBall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSystem {
    pub depth: usize,
    pub pairs: Vec<BallPair>,
}

/// Every net element gets one pair per round; in round `r >= 1` the inner
/// radius is `base * shrink^r` and the outer one `base * shrink^{r-1}`.
pub fn build_ball_system(
    sft: &Sft,
    net: &[PeriodicMeasure],
    rounds: usize,
    base_radius: &BigRational,
    shrink: &BigRational,
) -> Result<BallSystem> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    if !shrink.is_positive() || *shrink >= BigRational::one() || !base_radius.is_positive() {
        return Err(Error::BadShrink);
    }
    let depth = net[0].marginals.depth();
    for y in net {
        y.marginals.check_invariant(sft)?;
        if y.marginals.depth() != depth {
            return Err(Error::DepthMismatch { have: y.marginals.depth(), want: depth });
        }
    }
    let mut pairs = Vec::with_capacity(net.len() * rounds);
    let mut outer = base_radius.clone();
    for round in 1..=rounds {
        let inner = &outer * shrink;
        for (i, y) in net.iter().enumerate() {
            pairs.push(BallPair {
                net_index: i,
                round,
                v: MeasureBall::new(y.marginals.clone(), inner.clone()),
                u: MeasureBall::new(y.marginals.clone(), outer.clone()),
            });
        }
        outer = inner;
    }
    Ok(BallSystem { depth, pairs })
}

/// A horizon at which the empirical measure lies in a ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub horizon: BigInt,
    pub distance: BigRational,
}

/// Smallest checkpoint `N` with `rho_L(delta(x)^N, center) <= radius`.
/// `None` means no listed horizon witnesses membership.
pub fn pu_membership(
    x: &ScheduledPoint,
    ball: &MeasureBall,
    checkpoints: &[BigInt],
    depth: usize,
) -> Result<Option<MembershipWitness>> {
    let mut sorted = checkpoints.to_vec();
    sorted.sort();
    for n in sorted {
        let e = empirical_measure(x, &n, depth)?;
        let d = ball.distance(&e.marginals, depth)?;
        if d <= ball.radius {
            return Ok(Some(MembershipWitness { horizon: n, distance: d }));
        }
    }
    Ok(None)
}

/// Periodic point whose word at positions `0..|w|` is `w`, closed up with
/// the shortest connector when `w` is not cyclically admissible.
pub fn base_point_for(w: &Word, sft: &Sft) -> Result<PeriodicPoint> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    sft.check_admissible(w)?;
    let mut word = w.clone();
    if !sft.is_cyclically_admissible(&w.0) {
        let (_, conn) = sft.shortest_connector(w.0[w.len() - 1], w.0[0]);
        word.0.extend(conn.0);
    }
    PeriodicPoint::from_cyclic_word(sft, &word)
}

/// Glued point inside the cylinder `[w]`, with `delta = 2^{-|w|}`, following
/// the given targets. Growth factors other than `2^n` may be supplied.
pub fn density_witness(
    w: &Word,
    entries: &[GluingTarget],
    growth: Option<&[BigInt]>,
    sft: &Sft,
) -> Result<UniversalPoint> {
    let base = base_point_for(w, sft)?;
    let targets = GluingTargetSequence::new(sft, base, w.len(), entries.to_vec())?;
    construct_universal_point(&build_schedule_with_growth(&targets, sft, growth)?)
}

/// One (cylinder, ball) outcome of a scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub cylinder: Word,
    pub ball: usize,
    pub horizon: Option<BigInt>,
    /// Distance at the witnessing horizon, or the closest approach when
    /// there is none.
    pub distance: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub scan_depth: usize,
    pub depth: usize,
    pub cylinders: Vec<Word>,
    pub rows: Vec<ScanRow>,
}

impl DensityReport {
    pub fn failures(&self) -> Vec<&ScanRow> {
        self.rows.iter().filter(|r| r.horizon.is_none()).collect()
    }

    pub fn is_success(&self) -> bool {
        self.rows.iter().all(|r| r.horizon.is_some())
    }

    /// `cylinder,ball,horizon,rho` lines followed by a summary comment.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cylinder,ball,horizon,rho\n");
        for r in &self.rows {
            let h = r.horizon.as_ref().map_or_else(|| "absent".to_string(), |n| n.to_string());
            s.push_str(&format!("{},{},{},{}\n", r.cylinder, r.ball, h, rational::format(&r.distance)));
        }
        s.push_str(&format!(
            "# cylinders={} balls={} failures={} success={}\n",
            self.cylinders.len(),
            self.rows.len().checked_div(self.cylinders.len()).unwrap_or(0),
            self.failures().len(),
            self.is_success()
        ));
        s
    }
}

/// Tests each point's checkpoint measures against every `V` ball.
pub fn scan_points(
    points: Vec<(Word, ScheduledPoint, Vec<BigInt>)>,
    system: &BallSystem,
    scan_depth: usize,
) -> Result<DensityReport> {
    let depth = system.depth;
    let per_cylinder: Vec<Vec<ScanRow>> = points
        .par_iter()
        .map(|(w, x, checkpoints)| {
            let mut horizons = checkpoints.clone();
            horizons.sort();
            let measures: Vec<(BigInt, CylinderDistribution)> = horizons
                .into_iter()
                .map(|n| empirical_measure(x, &n, depth).map(|e| (n, e.marginals)))
                .collect::<Result<_>>()?;
            system
                .pairs
                .iter()
                .enumerate()
                .map(|(i, pair)| {
                    let mut closest: Option<BigRational> = None;
                    for (n, mu) in &measures {
                        let d = pair.v.distance(mu, depth)?;
                        if d <= pair.v.radius {
                            return Ok(ScanRow { cylinder: w.clone(), ball: i, horizon: Some(n.clone()), distance: d });
                        }
                        if closest.as_ref().is_none_or(|c| d < *c) {
                            closest = Some(d);
                        }
                    }
                    Ok(ScanRow {
                        cylinder: w.clone(),
                        ball: i,
                        horizon: None,
                        distance: closest.unwrap_or_else(BigRational::one),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DensityReport {
        scan_depth,
        depth,
        cylinders: points.into_iter().map(|p| p.0).collect(),
        rows: per_cylinder.into_iter().flatten().collect(),
    })
}

/// Builds a density witness in every cylinder of length `scan_depth` and
/// checks it against every ball of the system.
pub fn residual_scan(
    sft: &Sft,
    scan_depth: usize,
    system: &BallSystem,
    entries: &[GluingTarget],
    growth: Option<&[BigInt]>,
) -> Result<DensityReport> {
    if scan_depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let words = sft.admissible_words(scan_depth);
    let points = words
        .par_iter()
        .map(|w| {
            let up = density_witness(w, entries, growth, sft)?;
            Ok((w.clone(), up.point, up.checkpoints))
        })
        .collect::<Result<Vec<_>>>()?;
    scan_points(points, system, scan_depth)
}

/// Recomputes every claimed membership from scratch.
pub fn recheck(report: &DensityReport, system: &BallSystem, points: &[(Word, ScheduledPoint)]) -> Result<bool> {
    for row in &report.rows {
        let Some(n) = &row.horizon else { continue };
        let Some((_, x)) = points.iter().find(|(w, _)| *w == row.cylinder) else { return Ok(false) };
        let e = empirical_measure(x, n, system.depth)?;
        let ball = &system.pairs[row.ball].v;
        if !ball.contains(&e.marginals, system.depth)? || ball.distance(&e.marginals, system.depth)? != row.distance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orbits from a net as gluing targets, cycled `rounds` times.
pub fn cycled_targets(net: &[PeriodicMeasure], rounds: usize, radius: &BigRational) -> Vec<GluingTarget> {
    (0..rounds)
        .flat_map(|_| net.iter())
        .map(|y| GluingTarget { orbit: y.orbit.clone(), radius: radius.clone() })
        .collect()
}
