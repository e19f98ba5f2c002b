//! Diagonal locally constant cocycles over an SFT: exact Birkhoff
//! averages, mean-cycle criteria and uniform hyperbolicity constants.
//!
//! At symbol `s` the `E` direction is scaled by `e^{u(s)}` and the `F`
//! direction by `e^{v(s)}`. With block length `L`,
//! `phi_E = sum_{i<L} u(x_i)` and `phi_F = -sum_{i<L} v(x_i)` are the logs
//! of `||Df^L|E||` and `||(Df^L|F)^{-1}||`. A point is non-uniformly
//! hyperbolic when both averages stay at most `-eta`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genericity::density_witness;
use crate::glue::{GluingTarget, UniversalPoint};
use crate::point::{LocallyConstant, ScheduledPoint};
use crate::rational::{from_int, max_abs, serde_bigint, serde_rational, serde_rational_vec};
use crate::sft::{PeriodicOrbit, Sft, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalCocycle {
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<BigRational>,
    #[serde(with = "serde_rational_vec")]
    pub v: Vec<BigRational>,
    pub block: usize,
}

impl DiagonalCocycle {
    pub fn new(sft: &Sft, u: Vec<BigRational>, v: Vec<BigRational>, block: usize) -> Result<Self> {
        let k = sft.alphabet_size();
        for w in [&u, &v] {
            if w.len() != k {
                return Err(Error::CocycleSize { have: w.len(), want: k });
            }
        }
        if block == 0 {
            return Err(Error::ZeroDepth);
        }
        Ok(DiagonalCocycle { u, v, block })
    }

    pub fn phi_e(&self, sft: &Sft) -> LocallyConstant {
        LocallyConstant::block_sum(&self.u, self.block, sft)
    }

    pub fn phi_f(&self, sft: &Sft) -> LocallyConstant {
        let neg: Vec<BigRational> = self.v.iter().map(|x| -x).collect();
        LocallyConstant::block_sum(&neg, self.block, sft)
    }
}

/// `sum_{j<N} w(x_j)`, in closed form per block.
pub fn birkhoff_sum(x: &ScheduledPoint, w: &[BigRational], n: &BigInt) -> Result<BigRational> {
    if !n.is_positive() {
        return Err(Error::EmptyHorizon);
    }
    Ok(x.window_sum(&BigInt::zero(), n, &LocallyConstant::from_symbol_weights(w)))
}

/// An extremal cycle mean with a shortest witnessing cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeanCycle {
    #[serde(with = "serde_rational")]
    pub mean: BigRational,
    pub cycle: PeriodicOrbit,
}

/// Maximum of `(sum of w over a cycle) / (cycle length)` over cycles of
/// the transition graph, by Karp's recurrence.
pub fn max_mean_cycle(sft: &Sft, w: &[BigRational]) -> MeanCycle {
    let k = sft.alphabet_size();
    // d[j][s]: heaviest walk of j edges ending at s, from any start
    let mut d: Vec<Vec<Option<BigRational>>> = vec![vec![Some(BigRational::zero()); k]];
    for j in 1..=k {
        let row = (0..k)
            .map(|b| {
                (0..k)
                    .filter(|&a| sft.allowed(a as Symbol, b as Symbol))
                    .filter_map(|a| d[j - 1][a].as_ref().map(|x| x + &w[a]))
                    .max()
            })
            .collect();
        d.push(row);
    }
    let best = (0..k)
        .filter_map(|s| {
            let dn = d[k][s].as_ref()?;
            (0..k)
                .filter_map(|j| d[j][s].as_ref().map(|dj| (dn - dj) / BigRational::from_integer(BigInt::from(k - j))))
                .min()
        })
        .max()
        .expect("an irreducible graph has cycles");
    let cycle = tight_cycle(sft, w, &best);
    MeanCycle { mean: best, cycle }
}

pub fn min_mean_cycle(sft: &Sft, w: &[BigRational]) -> MeanCycle {
    let neg: Vec<BigRational> = w.iter().map(|x| -x).collect();
    let m = max_mean_cycle(sft, &neg);
    MeanCycle { mean: -m.mean, cycle: m.cycle }
}

/// Largest weight of a nonempty path ending at each symbol, or `None` if
/// the weights admit a positive cycle.
fn path_potentials(sft: &Sft, w: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = sft.alphabet_size();
    let mut h: Vec<BigRational> = w.to_vec();
    for _ in 0..=k {
        let next: Vec<BigRational> = (0..k)
            .map(|b| {
                let inc = (0..k)
                    .filter(|&a| sft.allowed(a as Symbol, b as Symbol))
                    .map(|a| h[a].clone())
                    .max()
                    .filter(|x| x.is_positive())
                    .unwrap_or_else(BigRational::zero);
                &w[b] + inc
            })
            .collect();
        if next == h {
            return Some(h);
        }
        h = next;
    }
    None
}

/// Lexicographically least shortest cycle among those attaining `mean`.
fn tight_cycle(sft: &Sft, w: &[BigRational], mean: &BigRational) -> PeriodicOrbit {
    let k = sft.alphabet_size();
    let reduced: Vec<BigRational> = w.iter().map(|x| x - mean).collect();
    let h = path_potentials(sft, &reduced).expect("reduced weights have no positive cycle");
    // edge a -> b is tight when the potential is attained through it
    let tight = |a: usize, b: usize| sft.allowed(a as Symbol, b as Symbol) && &h[a] + &reduced[b] == h[b];
    let mut best_len = usize::MAX;
    for s in 0..k {
        let mut dist = vec![usize::MAX; k];
        let mut queue = VecDeque::new();
        for b in (0..k).filter(|&b| tight(s, b)) {
            dist[b] = 1;
            queue.push_back(b);
        }
        while let Some(a) = queue.pop_front() {
            for b in (0..k).filter(|&b| tight(a, b)) {
                if dist[b] == usize::MAX {
                    dist[b] = dist[a] + 1;
                    queue.push_back(b);
                }
            }
        }
        best_len = best_len.min(dist[s]);
    }
    // reach[r][a]: a closed tight walk can finish from a in r steps, back at start
    for s in 0..k {
        let mut reach = vec![vec![false; k]; best_len + 1];
        reach[0][s] = true;
        for r in 1..=best_len {
            for a in 0..k {
                reach[r][a] = (0..k).any(|b| tight(a, b) && reach[r - 1][b]);
            }
        }
        if !reach[best_len][s] {
            continue;
        }
        let mut word = vec![s as Symbol];
        let mut cur = s;
        for r in (1..best_len).rev() {
            let next = (0..k).find(|&b| tight(cur, b) && reach[r][b]).expect("reachable");
            word.push(next as Symbol);
            cur = next;
        }
        return PeriodicOrbit::canonical(&Word(word)).expect("nonempty cycle");
    }
    unreachable!("an optimal cycle is tight")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaoVerdict {
    pub pass: bool,
    #[serde(with = "serde_rational")]
    pub eta: BigRational,
    /// Maximum cycle mean of `u`.
    pub e_cycle: MeanCycle,
    /// Minimum cycle mean of `v`.
    pub f_cycle: MeanCycle,
}

/// Every invariant measure contracts `E` and expands `F` exactly when the
/// maximum cycle mean of `u` is negative and the minimum one of `v` is
/// positive.
pub fn cao_check(sft: &Sft, c: &DiagonalCocycle) -> CaoVerdict {
    let e_cycle = max_mean_cycle(sft, &c.u);
    let f_cycle = min_mean_cycle(sft, &c.v);
    let eta = (-e_cycle.mean.clone()).min(f_cycle.mean.clone());
    CaoVerdict { pass: eta.is_positive(), eta, e_cycle, f_cycle }
}

/// Per-step exponents `(lambda_E, lambda_F)` of a periodic orbit.
pub fn periodic_exponents(orbit: &PeriodicOrbit, c: &DiagonalCocycle) -> (BigRational, BigRational) {
    (
        LocallyConstant::from_symbol_weights(&c.u).orbit_mean(orbit),
        LocallyConstant::from_symbol_weights(&c.v).orbit_mean(orbit),
    )
}

/// Largest weight of any path, counting the empty path as 0.
pub fn max_path_sum(sft: &Sft, w: &[BigRational]) -> Result<BigRational> {
    let h = path_potentials(sft, w).ok_or(Error::PositiveCycleDetected)?;
    Ok(h.into_iter().fold(BigRational::zero(), |a, b| a.max(b)))
}

/// `max` of `sum w` over admissible words of each length `1..=n`.
pub fn max_word_sums(sft: &Sft, w: &[BigRational], n: usize) -> Vec<BigRational> {
    let k = sft.alphabet_size();
    let mut best: Vec<BigRational> = w.to_vec();
    let mut out = Vec::with_capacity(n);
    for len in 1..=n {
        if len > 1 {
            best = (0..k)
                .map(|b| {
                    let prev = (0..k)
                        .filter(|&a| sft.allowed(a as Symbol, b as Symbol))
                        .map(|a| best[a].clone())
                        .max()
                        .expect("every symbol has a predecessor");
                    prev + &w[b]
                })
                .collect();
        }
        out.push(best.iter().max().expect("nonempty alphabet").clone());
    }
    out
}

/// Logarithmic constants for `||Df^n|E|| <= C lambda^n` and
/// `||Df^{-n}|F|| <= C lambda^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperbolicityCertificate {
    /// `log lambda = -eta`.
    #[serde(with = "serde_rational")]
    pub log_lambda: BigRational,
    #[serde(with = "serde_rational")]
    pub d_e: BigRational,
    #[serde(with = "serde_rational")]
    pub d_f: BigRational,
    /// `log C = max(D_E, D_F)`.
    #[serde(with = "serde_rational")]
    pub log_c: BigRational,
    pub e_cycle: MeanCycle,
    pub f_cycle: MeanCycle,
    pub n_check: usize,
}

pub const DEFAULT_N_CHECK: usize = 25;

pub fn uniform_constants(sft: &Sft, c: &DiagonalCocycle, n_check: usize) -> Result<HyperbolicityCertificate> {
    let cao = cao_check(sft, c);
    if !cao.pass {
        return Err(Error::NotHyperbolic);
    }
    let eta = &cao.eta;
    let e_shift: Vec<BigRational> = c.u.iter().map(|x| x + eta).collect();
    let f_shift: Vec<BigRational> = c.v.iter().map(|x| eta - x).collect();
    let d_e = max_path_sum(sft, &e_shift)?;
    let d_f = max_path_sum(sft, &f_shift)?;
    let neg_v: Vec<BigRational> = c.v.iter().map(|x| -x).collect();
    for (weights, d) in [(&c.u, &d_e), (&neg_v, &d_f)] {
        for (i, m) in max_word_sums(sft, weights, n_check).into_iter().enumerate() {
            let n = i + 1;
            let bound = d - eta * from_int(&BigInt::from(n));
            if m > bound {
                return Err(Error::BoundViolated {
                    stage: n,
                    lhs: crate::rational::format(&m),
                    bound: crate::rational::format(&bound),
                });
            }
        }
    }
    Ok(HyperbolicityCertificate {
        log_lambda: -eta.clone(),
        log_c: d_e.clone().max(d_f.clone()),
        d_e,
        d_f,
        e_cycle: cao.e_cycle,
        f_cycle: cao.f_cycle,
        n_check,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuhRow {
    pub stage: usize,
    #[serde(with = "serde_bigint")]
    pub horizon: BigInt,
    #[serde(with = "serde_rational")]
    pub avg_e: BigRational,
    #[serde(with = "serde_rational")]
    pub avg_f: BigRational,
    pub ok: bool,
}

/// Checkpoint averages of `phi_E` and `phi_F`; the verdict requires both
/// to be at most `-eta` at every stage from `onset` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuhCertificate {
    #[serde(with = "serde_rational")]
    pub eta: BigRational,
    pub block: usize,
    pub onset: usize,
    pub rows: Vec<NuhRow>,
    pub pass: bool,
}

pub fn nuh_check(up: &UniversalPoint, c: &DiagonalCocycle, eta: &BigRational, onset: usize, sft: &Sft) -> NuhCertificate {
    let phi_e = c.phi_e(sft);
    let phi_f = c.phi_f(sft);
    let threshold = -eta.clone();
    let rows: Vec<NuhRow> = up
        .schedule
        .stages
        .iter()
        .map(|st| {
            let b = from_int(&st.b);
            let avg_e = up.point.window_sum(&BigInt::zero(), &st.b, &phi_e) / &b;
            let avg_f = up.point.window_sum(&BigInt::zero(), &st.b, &phi_f) / &b;
            let ok = avg_e <= threshold && avg_f <= threshold;
            NuhRow { stage: st.n, horizon: st.b.clone(), avg_e, avg_f, ok }
        })
        .collect();
    let pass = rows.iter().filter(|r| r.stage >= onset).all(|r| r.ok);
    NuhCertificate { eta: eta.clone(), block: c.block, onset, rows, pass }
}

/// Largest distance between a checkpoint average of `xi` and the mean of
/// `xi` over the stage target: modulus term plus tail term.
fn stage_tolerance(up: &UniversalPoint, n: usize, xi: &LocallyConstant, sft: &Sft) -> Result<BigRational> {
    let st = up.schedule.stage(n)?;
    let modulus = xi.oscillation(up.schedule.k0 + n - 1, sft);
    let tail = BigRational::new(BigInt::from(2) * &st.a, &st.b - &st.a);
    Ok(modulus + xi.sup_norm(sft) * tail)
}

/// Spread of checkpoint averages of `xi` over the stages that target
/// either orbit of the pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Oscillation {
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    /// `(beta - alpha)` minus the smallest stage tolerance on each side.
    #[serde(with = "serde_rational")]
    pub lower_bound: BigRational,
    pub stages: Vec<usize>,
    #[serde(with = "serde_rational_vec")]
    pub averages: Vec<BigRational>,
}

pub fn irregular_detect(
    up: &UniversalPoint,
    xi: &LocallyConstant,
    pair: (&PeriodicOrbit, &PeriodicOrbit),
    sft: &Sft,
) -> Result<Oscillation> {
    let (mut lo_orbit, mut hi_orbit) = pair;
    let (mut alpha, mut beta) = (xi.orbit_mean(lo_orbit), xi.orbit_mean(hi_orbit));
    if alpha > beta {
        std::mem::swap(&mut alpha, &mut beta);
        std::mem::swap(&mut lo_orbit, &mut hi_orbit);
    }
    let mut stages = Vec::new();
    let mut averages = Vec::new();
    let mut tol_lo: Option<BigRational> = None;
    let mut tol_hi: Option<BigRational> = None;
    for st in &up.schedule.stages {
        let on_lo = st.orbit == *lo_orbit;
        let on_hi = st.orbit == *hi_orbit;
        if !on_lo && !on_hi {
            continue;
        }
        let tol = stage_tolerance(up, st.n, xi, sft)?;
        for (hit, slot) in [(on_lo, &mut tol_lo), (on_hi, &mut tol_hi)] {
            if hit && slot.as_ref().is_none_or(|t| tol < *t) {
                *slot = Some(tol.clone());
            }
        }
        stages.push(st.n);
        averages.push(up.point.window_sum(&BigInt::zero(), &st.b, xi) / from_int(&st.b));
    }
    let tol_lo = tol_lo.ok_or_else(|| Error::PairNotInTargets(lo_orbit.word().clone()))?;
    let tol_hi = tol_hi.ok_or_else(|| Error::PairNotInTargets(hi_orbit.word().clone()))?;
    let value = match (averages.iter().max(), averages.iter().min()) {
        (Some(mx), Some(mn)) => mx - mn,
        _ => BigRational::zero(),
    };
    Ok(Oscillation { value, lower_bound: beta - alpha - tol_lo - tol_hi, stages, averages })
}

/// Everything computed for one cylinder by [`theorem2_pipeline`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem2Report {
    pub cylinder: Word,
    pub cocycle: DiagonalCocycle,
    pub nuh: NuhCertificate,
    pub cao: CaoVerdict,
    /// Cycle means clear the level `eta` used for the point.
    pub cao_at_eta: bool,
    /// Mean-cycle bounds alone force the point check to pass.
    pub predicted_nuh: bool,
    pub uniform: Option<HyperbolicityCertificate>,
}

/// Options for [`theorem2_pipeline`].
#[derive(Clone, Debug)]
pub struct Theorem2Options {
    pub eta: BigRational,
    pub onset: usize,
    pub n_check: usize,
    pub growth: Option<Vec<BigInt>>,
    /// Reverses the point verdict before the consistency checks; used to
    /// exercise the inconsistency path.
    pub flip_nuh: bool,
}

/// Builds a glued point in the cylinder `[w]` that follows `targets`, checks
/// it for non-uniform hyperbolicity, runs the mean-cycle criterion and
/// extracts uniform constants, then cross-checks the verdicts.
///
/// The point verdict and the cycle means are tied by two exact bounds:
/// each checkpoint average lies within the stage tolerance of its target's
/// mean, and never exceeds `L * MMC + L * D / b_n` with `D` the largest
/// path sum of the weights reduced by their maximum cycle mean. A verdict
/// contradicting either bound is reported as `InconsistentVerdicts`.
pub fn theorem2_pipeline(
    sft: &Sft,
    w: &Word,
    c: &DiagonalCocycle,
    targets: &[GluingTarget],
    opts: &Theorem2Options,
) -> Result<Theorem2Report> {
    let up = density_witness(w, targets, opts.growth.as_deref(), sft)?;
    let mut nuh = nuh_check(&up, c, &opts.eta, opts.onset, sft);
    if opts.flip_nuh {
        nuh.pass = !nuh.pass;
    }
    let cao = cao_check(sft, c);
    let l = BigRational::from_integer(BigInt::from(c.block));
    let neg_v: Vec<BigRational> = c.v.iter().map(|x| -x).collect();
    let e_top = &l * &cao.e_cycle.mean;
    let f_top = -(&l * &cao.f_cycle.mean);
    let threshold = -opts.eta.clone();
    let cao_at_eta = e_top <= threshold && f_top <= threshold;

    let deviation = |weights: &[BigRational], top: &BigRational| -> Result<BigRational> {
        let reduced: Vec<BigRational> = weights.iter().map(|x| x - top).collect();
        max_path_sum(sft, &reduced)
    };
    let d_e = deviation(&c.u, &cao.e_cycle.mean)?;
    let d_f = deviation(&neg_v, &(-cao.f_cycle.mean.clone()))?;

    let phi_e = c.phi_e(sft);
    let phi_f = c.phi_f(sft);
    let mut predicted_nuh = true;
    for (row, st) in nuh.rows.iter().zip(&up.schedule.stages) {
        let b = from_int(&st.b);
        let cap_e = &e_top + &l * &d_e / &b;
        let cap_f = &f_top + &l * &d_f / &b;
        if row.avg_e > cap_e || row.avg_f > cap_f {
            return Err(Error::InconsistentVerdicts(format!("stage {} average exceeds its cycle-mean bound", st.n)));
        }
        let tol_e = stage_tolerance(&up, st.n, &phi_e, sft)?;
        let tol_f = stage_tolerance(&up, st.n, &phi_f, sft)?;
        let mean_e = phi_e.orbit_mean(&st.orbit);
        let mean_f = phi_f.orbit_mean(&st.orbit);
        if (&row.avg_e - &mean_e).abs() > tol_e || (&row.avg_f - &mean_f).abs() > tol_f {
            return Err(Error::InconsistentVerdicts(format!("stage {} average is far from its target", st.n)));
        }
        if st.n >= opts.onset {
            if nuh.pass && (mean_e > &threshold + &tol_e || mean_f > &threshold + &tol_f) {
                return Err(Error::InconsistentVerdicts(format!(
                    "point passes but the stage {} target {} violates the level",
                    st.n, st.orbit
                )));
            }
            if cap_e > threshold || cap_f > threshold {
                predicted_nuh = false;
            }
        }
    }
    if predicted_nuh && !nuh.pass {
        return Err(Error::InconsistentVerdicts("cycle means force a pass but the point check failed".into()));
    }
    let uniform = if cao.pass { Some(uniform_constants(sft, c, opts.n_check)?) } else { None };
    Ok(Theorem2Report { cylinder: w.clone(), cocycle: c.clone(), nuh, cao, cao_at_eta, predicted_nuh, uniform })
}

/// Largest `|u|` and `|v|`, used for stage tolerances in reports.
pub fn cocycle_norm(c: &DiagonalCocycle) -> BigRational {
    max_abs(c.u.iter().chain(c.v.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glue::GluingTargetSequence;
    use crate::rational::ratio;
    use crate::sft::PeriodicPoint;

    fn orbit(w: &str) -> PeriodicOrbit {
        PeriodicOrbit::canonical(&Word::from(w)).unwrap()
    }

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| ratio(x, 1)).collect()
    }

    #[test]
    fn birkhoff_examples() {
        let zero = ScheduledPoint::periodic(PeriodicPoint::new(orbit("0"), 0));
        let n = BigInt::from(10u64).pow(12);
        assert_eq!(birkhoff_sum(&zero, &r(&[-1, 0]), &n).unwrap(), -from_int(&n));
        let alt = ScheduledPoint::periodic(PeriodicPoint::new(orbit("01"), 0));
        assert_eq!(birkhoff_sum(&alt, &r(&[-1, -3]), &BigInt::from(10)).unwrap(), ratio(-20, 1));
    }

    #[test]
    fn mean_cycle_examples() {
        let full = Sft::full(2);
        let m = max_mean_cycle(&full, &r(&[-1, -3]));
        assert_eq!((m.mean, m.cycle), (ratio(-1, 1), orbit("0")));
        let gm = Sft::golden_mean();
        let m = max_mean_cycle(&gm, &r(&[-2, 0]));
        assert_eq!((m.mean, m.cycle), (ratio(-1, 1), orbit("01")));
        let one = Sft::full(1);
        assert_eq!(max_mean_cycle(&one, &[ratio(7, 3)]).mean, ratio(7, 3));
    }

    #[test]
    fn cao_examples() {
        let full = Sft::full(2);
        let c = DiagonalCocycle::new(&full, r(&[-1, -3]), r(&[2, 1]), 1).unwrap();
        let v = cao_check(&full, &c);
        assert!(v.pass);
        assert_eq!(v.eta, ratio(1, 1));
        let bad = DiagonalCocycle::new(&full, r(&[-1, 1]), r(&[2, 1]), 1).unwrap();
        assert!(!cao_check(&full, &bad).pass);
        let flat = DiagonalCocycle::new(&full, r(&[0, 0]), r(&[2, 1]), 1).unwrap();
        assert!(!cao_check(&full, &flat).pass);
    }

    #[test]
    fn exponent_examples() {
        let full = Sft::full(2);
        let c = DiagonalCocycle::new(&full, r(&[-1, -3]), r(&[2, 1]), 1).unwrap();
        assert_eq!(periodic_exponents(&orbit("0"), &c).0, ratio(-1, 1));
        assert_eq!(periodic_exponents(&orbit("01"), &c).0, ratio(-2, 1));
        let c3 = DiagonalCocycle::new(&full, r(&[-1, -3]), r(&[2, 1]), 3).unwrap();
        for o in full.enumerate_periodic(5) {
            assert_eq!(c3.phi_e(&full).orbit_mean(&o), ratio(3, 1) * periodic_exponents(&o, &c).0);
        }
    }

    #[test]
    fn uniform_examples() {
        let full = Sft::full(2);
        let c = DiagonalCocycle::new(&full, r(&[-1, -3]), r(&[2, 1]), 1).unwrap();
        let cert = uniform_constants(&full, &c, DEFAULT_N_CHECK).unwrap();
        assert_eq!(cert.d_e, BigRational::zero());
        assert_eq!(cert.log_lambda, ratio(-1, 1));
        let gm = Sft::golden_mean();
        let c = DiagonalCocycle::new(&gm, r(&[-2, 0]), r(&[1, 1]), 1).unwrap();
        let cert = uniform_constants(&gm, &c, DEFAULT_N_CHECK).unwrap();
        assert_eq!(cert.d_e, ratio(1, 1));
        let bad = DiagonalCocycle::new(&full, r(&[-1, 1]), r(&[2, 1]), 1).unwrap();
        assert_eq!(uniform_constants(&full, &bad, 5), Err(Error::NotHyperbolic));
    }

    fn glued(sft: &Sft, ws: &[&str]) -> UniversalPoint {
        let entries = ws.iter().map(|w| GluingTarget { orbit: orbit(w), radius: ratio(1, 4) }).collect();
        let t = GluingTargetSequence::new(sft, PeriodicPoint::new(orbit(ws[0]), 0), 2, entries).unwrap();
        UniversalPoint::build(&t, sft).unwrap()
    }

    #[test]
    fn nuh_examples() {
        let full = Sft::full(2);
        let up = glued(&full, &["0", "01", "1", "0"]);
        let contracting = DiagonalCocycle::new(&full, r(&[-1, -1]), r(&[1, 1]), 1).unwrap();
        let cert = nuh_check(&up, &contracting, &ratio(1, 1), 1, &full);
        assert!(cert.pass);
        assert!(cert.rows.iter().all(|row| row.avg_e == ratio(-1, 1)));
        let mixed = DiagonalCocycle::new(&full, r(&[-1, 1]), r(&[1, 1]), 1).unwrap();
        assert!(!nuh_check(&up, &mixed, &ratio(1, 10), 1, &full).pass);
    }

    #[test]
    fn irregular_examples() {
        let full = Sft::full(2);
        let up = glued(&full, &["1", "0", "1", "0", "1"]);
        let xi = LocallyConstant::indicator(&Word::from("1"));
        let osc = irregular_detect(&up, &xi, (&orbit("0"), &orbit("1")), &full).unwrap();
        assert_eq!(osc.lower_bound, ratio(1, 1) - ratio(1, 8) - ratio(1, 16));
        assert!(osc.value >= osc.lower_bound);
        let one = LocallyConstant::constant(1, ratio(1, 1), &full);
        assert_eq!(irregular_detect(&up, &one, (&orbit("0"), &orbit("1")), &full).unwrap().value, BigRational::zero());
        assert!(matches!(
            irregular_detect(&up, &xi, (&orbit("0"), &orbit("01")), &full),
            Err(Error::PairNotInTargets(_))
        ));
    }

    #[test]
    fn pipeline_verdicts() {
        let full = Sft::full(2);
        let targets: Vec<GluingTarget> = ["0", "1", "01", "0", "1", "01"]
            .iter()
            .map(|w| GluingTarget { orbit: orbit(w), radius: ratio(1, 4) })
            .collect();
        let mut opts = Theorem2Options { eta: ratio(1, 2), onset: 3, n_check: 10, growth: None, flip_nuh: false };
        let good = DiagonalCocycle::new(&full, r(&[-1, -3]), r(&[2, 1]), 1).unwrap();
        let rep = theorem2_pipeline(&full, &Word::from("0"), &good, &targets, &opts).unwrap();
        assert!(rep.nuh.pass && rep.cao.pass && rep.uniform.is_some());
        let bad = DiagonalCocycle::new(&full, r(&[-1, 1]), r(&[2, 1]), 1).unwrap();
        let rep = theorem2_pipeline(&full, &Word::from("0"), &bad, &targets, &opts).unwrap();
        assert!(!rep.nuh.pass && !rep.cao.pass);
        opts.flip_nuh = true;
        assert!(matches!(
            theorem2_pipeline(&full, &Word::from("0"), &good, &targets, &opts),
            Err(Error::InconsistentVerdicts(_))
        ));
        assert!(matches!(
            theorem2_pipeline(&full, &Word::from("0"), &bad, &targets, &opts),
            Err(Error::InconsistentVerdicts(_))
        ));
    }
}
