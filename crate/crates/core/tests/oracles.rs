//! Brute-force cross-checks of the closed-form and graph algorithms.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symdyn::glue::{barycenter_connect, eq6_bound, IndexSet};
use symdyn::hyperbolicity::{cao_check, max_mean_cycle, max_word_sums, periodic_exponents, DiagonalCocycle};
use symdyn::measures::{cylinder_marginals, sample_invariant, sigmund_approximate, weak_star_distance, invariant_polytope_vertices};
use symdyn::rational::ratio;
use symdyn::{LocallyConstant, PeriodicOrbit, PeriodicPoint, ScheduledPoint, Segment, Sft, Word};

fn random_sft(rng: &mut impl Rng, k: usize) -> Sft {
    loop {
        let m: Vec<Vec<bool>> = (0..k).map(|_| (0..k).map(|_| rng.gen_bool(0.6)).collect()).collect();
        if let Ok(s) = Sft::new(m) {
            return s;
        }
    }
}

fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<BigRational> {
    (0..k).map(|_| ratio(rng.gen_range(-20..=20), rng.gen_range(1..=6))).collect()
}

/// All words of length `n` over `k` symbols, lexicographically.
fn all_words(k: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as u8).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

fn admissible(sft: &Sft, w: &[u8]) -> bool {
    w.windows(2).all(|p| sft.transitions()[p[0] as usize][p[1] as usize])
}

fn cyclic(sft: &Sft, w: &[u8]) -> bool {
    admissible(sft, w) && sft.transitions()[w[w.len() - 1] as usize][w[0] as usize]
}

#[test]
fn mean_cycle_matches_simple_cycle_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let k = rng.gen_range(1..=5);
        let sft = random_sft(&mut rng, k);
        let w = random_weights(&mut rng, k);
        // every simple cycle has length <= k; closed walks decompose into them
        let mut best: Option<BigRational> = None;
        for n in 1..=k {
            for word in all_words(k, n) {
                if cyclic(&sft, &word) {
                    let s: BigRational = word.iter().map(|&x| w[x as usize].clone()).sum();
                    let mean = s / BigRational::from_integer(BigInt::from(n));
                    if best.as_ref().is_none_or(|b| mean > *b) {
                        best = Some(mean);
                    }
                }
            }
        }
        let got = max_mean_cycle(&sft, &w);
        assert_eq!(got.mean, best.unwrap());
        assert_eq!(LocallyConstant::from_symbol_weights(&w).orbit_mean(&got.cycle), got.mean);
        assert!(sft.is_cyclically_admissible(&got.cycle.word().0));
    }
}

#[test]
fn cao_matches_short_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let k = rng.gen_range(1..=5);
        let sft = random_sft(&mut rng, k);
        let c = DiagonalCocycle::new(&sft, random_weights(&mut rng, k), random_weights(&mut rng, k), 1).unwrap();
        let all_good = sft.enumerate_periodic(k).iter().all(|o| {
            let (e, f) = periodic_exponents(o, &c);
            e.is_negative() && f.is_positive()
        });
        assert_eq!(cao_check(&sft, &c).pass, all_good);
    }
}

#[test]
fn necklaces_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 1..=4 {
        for _ in 0..3 {
            let sft = random_sft(&mut rng, k);
            let cap = if k == 4 { 6 } else { 7 };
            let mut expect: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
            for n in 1..=cap {
                for w in all_words(k, n) {
                    let primitive = (1..n).all(|d| n % d != 0 || (0..n).any(|i| w[i] != w[i % d]));
                    if !primitive || !cyclic(&sft, &w) {
                        continue;
                    }
                    let least = (0..n).map(|r| [&w[r..], &w[..r]].concat()).min().unwrap();
                    expect.insert((n, least));
                }
            }
            let got: Vec<(usize, Vec<u8>)> = sft.enumerate_periodic(cap).into_iter().map(|o| (o.period(), o.word().0.clone())).collect();
            assert_eq!(got, expect.into_iter().collect::<Vec<_>>());
        }
    }
    // the golden-mean orbits of period at most 5
    let gm: Vec<String> = Sft::golden_mean().enumerate_periodic(5).iter().map(|o| o.word().to_string()).collect();
    assert_eq!(gm, ["0", "01", "001", "0001", "00001", "00101"]);
}

#[test]
fn connectors_are_lexicographically_least() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let k = rng.gen_range(1..=5);
        let sft = random_sft(&mut rng, k);
        let m = sft.mixing_time();
        for g in m..=2 * m {
            for a in 0..k as u8 {
                for b in 0..k as u8 {
                    let want = all_words(k, g - 1).into_iter().find(|mid| {
                        let mut full = vec![a];
                        full.extend(mid);
                        full.push(b);
                        admissible(&sft, &full)
                    });
                    let got = sft.connector(a, b, g).unwrap();
                    assert_eq!(Some(got.0), want);
                }
            }
        }
        assert!(sft.connector(0, 0, m - 1).is_err() || m == 1);
    }
}

/// Eager expansion of a point on `[0, len)`, independent of the lookup code.
fn expand(x: &ScheduledPoint, len: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for seg in x.segments() {
        match seg {
            Segment::Periodic { orbit, phase, len } => {
                let n: usize = len.try_into().unwrap();
                out.extend((0..n).map(|i| orbit.word().0[(phase + i) % orbit.period()]));
            }
            Segment::Connector { word } => out.extend(&word.0),
        }
    }
    let tail = x.right_tail();
    while out.len() < len {
        let j = out.len();
        out.push(tail.orbit.word().0[(tail.phase + j) % tail.orbit.period()]);
    }
    out.truncate(len);
    out
}

fn random_point(rng: &mut impl Rng, k: usize) -> ScheduledPoint {
    let orbits = Sft::full(k).enumerate_periodic(4);
    let pick = |rng: &mut dyn rand::RngCore| orbits[rng.gen_range(0..orbits.len())].clone();
    let mut segs = Vec::new();
    for _ in 0..rng.gen_range(0..8) {
        if rng.gen_bool(0.7) {
            let o = pick(rng);
            let phase = rng.gen_range(0..o.period());
            segs.push(Segment::Periodic { orbit: o, phase, len: BigInt::from(rng.gen_range(0..900)) });
        } else {
            let w: Vec<u8> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..k as u8)).collect();
            segs.push(Segment::Connector { word: Word(w) });
        }
    }
    let left = PeriodicPoint::new(pick(rng), 0);
    let o = pick(rng);
    let right = PeriodicPoint::new(o.clone(), rng.gen_range(0..o.period()));
    ScheduledPoint::new(left, segs, right)
}

#[test]
fn block_sums_match_eager_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let k = rng.gen_range(1..=3);
        let x = random_point(&mut rng, k);
        let n: usize = rng.gen_range(1..=10_000);
        let depth = rng.gen_range(1..=3);
        let from = rng.gen_range(0..50usize);
        let eager = expand(&x, from + n + depth);
        let mut counts: BTreeMap<Word, BigInt> = BTreeMap::new();
        for j in from..from + n {
            *counts.entry(Word(eager[j..j + depth].to_vec())).or_insert_with(BigInt::zero) += 1;
        }
        assert_eq!(x.window_counts(&BigInt::from(from), &BigInt::from(n), depth), counts);
        let w = random_weights(&mut rng, k);
        let direct: BigRational = eager[..n].iter().map(|&s| w[s as usize].clone()).sum();
        assert_eq!(symdyn::hyperbolicity::birkhoff_sum(&x, &w, &BigInt::from(n)).unwrap(), direct);
        for j in [0, n / 2, n - 1] {
            assert_eq!(x.coordinate_i64(j as i64), eager[j]);
        }
    }
}

#[test]
fn index_set_bound_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let sft = Sft::full(k);
        let depth = rng.gen_range(1..=3);
        let values: BTreeMap<Word, BigRational> = sft
            .admissible_words(depth)
            .into_iter()
            .map(|w| (w, ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))))
            .collect();
        let xi = LocallyConstant::new(depth, values.clone()).unwrap();
        let y = random_point(&mut rng, k);
        let points: BTreeSet<u64> = (0..rng.gen_range(1..40)).map(|_| rng.gen_range(0..=200)).collect();
        let a = IndexSet::from_points(points.iter().copied()).unwrap();
        let (lhs, rhs) = eq6_bound(&a, &xi, &y, &sft).unwrap();

        let max_a = *points.iter().max().unwrap() as usize;
        let eager = expand(&y, max_a + 1 + depth);
        let f = |j: usize| values[&Word(eager[j..j + depth].to_vec())].clone();
        let card = BigRational::from_integer(BigInt::from(points.len()));
        let mean_a: BigRational = points.iter().map(|&j| f(j as usize)).sum::<BigRational>() / &card;
        let mean_full: BigRational = (0..=max_a).map(f).sum::<BigRational>() / BigRational::from_integer(BigInt::from(max_a + 1));
        let norm = values.values().map(|v| v.abs()).max().unwrap();
        let want_rhs = BigRational::from_integer(BigInt::from(2 * (max_a + 1 - points.len()))) * norm / card;
        assert_eq!(lhs, (mean_a - mean_full).abs());
        assert_eq!(rhs, want_rhs);
        assert!(lhs <= rhs);
    }
}

#[test]
fn dp_extrema_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let k = rng.gen_range(1..=3);
        let sft = random_sft(&mut rng, k);
        let w = random_weights(&mut rng, k);
        let dp = max_word_sums(&sft, &w, 12);
        let cap = if k == 3 { 9 } else { 12 };
        for n in 1..=cap {
            let best = all_words(k, n)
                .into_iter()
                .filter(|word| admissible(&sft, word))
                .map(|word| word.iter().map(|&s| w[s as usize].clone()).sum::<BigRational>())
                .max()
                .unwrap();
            assert_eq!(dp[n - 1], best);
        }
    }
}

#[test]
fn sigmund_hits_random_depth_two_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let eps = ratio(1, 20);
    for i in 0..20 {
        let sft = if i % 2 == 0 { Sft::full(2) } else { Sft::golden_mean() };
        let vertices: Vec<_> = invariant_polytope_vertices(&sft, 2).iter().map(|o| cylinder_marginals(o, 2).unwrap()).collect();
        let mu = sample_invariant(&mut rng, &vertices);
        let orbit = sigmund_approximate(&sft, &mu, &eps, 1 << 14).unwrap();
        assert!(sft.is_cyclically_admissible(&orbit.word().0));
        let got = cylinder_marginals(&orbit, 2).unwrap();
        assert!(got.is_consistent());
        assert!(weak_star_distance(&got, &mu, 2).unwrap() <= eps);
    }
}

#[test]
fn barycenter_windows_check_out() {
    let gm = Sft::golden_mean();
    let orbits = gm.enumerate_periodic(6);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..30 {
        let p = &orbits[rng.gen_range(0..orbits.len())];
        let q = &orbits[rng.gen_range(0..orbits.len())];
        let (k, n1, n2) = (rng.gen_range(0..5usize), rng.gen_range(0..6usize), rng.gen_range(0..6usize));
        let bc = barycenter_connect(&gm, p, q, k, n1, n2).unwrap();
        let z = &bc.z;
        assert!(gm.is_cyclically_admissible(&z.orbit.word().0));
        let sym = |pt: &PeriodicOrbit, phase: usize, t: i64| {
            let per = pt.period() as i64;
            pt.word().0[(((phase as i64 + t) % per + per) % per) as usize]
        };
        let (k, n1, n2, n) = (k as i64, n1 as i64, n2 as i64, bc.n as i64);
        for i in -n1..=0 {
            for t in -k..=k {
                assert_eq!(sym(&z.orbit, z.phase, i + t), sym(p, 0, i + t));
            }
        }
        for i in 0..=n2 {
            for t in -k..=k {
                assert_eq!(sym(&z.orbit, z.phase, i + n + t), sym(q, 0, i + t));
            }
        }
        if p != q {
            assert_eq!(bc.n, 2 * k as usize + gm.mixing_time());
        }
    }
}
