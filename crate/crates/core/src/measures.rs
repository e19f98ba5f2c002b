//! Invariant measures at finite cylinder depth.
//!
//! A measure is identified with its marginals on words of a fixed length
//! `L`; lower-depth marginals are obtained by summing over right
//! extensions. Distances use the depth-weighted total variation
//! `rho_L(mu, nu) = sum_{l=1..L} 2^{-l} TV_l(mu, nu)`, which is exactly
//! computable over the rationals and bounded by 1.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::point::{LocallyConstant, ScheduledPoint};
use crate::rational::{self, dyadic};
use crate::sft::{PeriodicOrbit, Sft, Symbol, Word};

/// Exact nonnegative weights on words of length `depth`, summing to 1.
/// Zero weights are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderDistribution {
    depth: usize,
    weights: BTreeMap<Word, BigRational>,
}

impl CylinderDistribution {
    pub fn new(depth: usize, weights: BTreeMap<Word, BigRational>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let mut total = BigRational::zero();
        let mut kept = BTreeMap::new();
        for (w, v) in weights {
            if w.len() != depth {
                return Err(Error::DepthMismatch { have: w.len(), want: depth });
            }
            if v.is_negative() {
                return Err(Error::NegativeWeight(w));
            }
            if !v.is_zero() {
                total += &v;
                kept.insert(w, v);
            }
        }
        if !total.is_one() {
            return Err(Error::NotNormalised(rational::format(&total)));
        }
        Ok(CylinderDistribution { depth, weights: kept })
    }

    /// Normalises integer window counts by their total.
    pub fn from_counts(depth: usize, counts: BTreeMap<Word, BigInt>) -> Result<Self> {
        let total: BigInt = counts.values().sum();
        if !total.is_positive() {
            return Err(Error::EmptyHorizon);
        }
        let weights = counts
            .into_iter()
            .map(|(w, c)| (w, BigRational::new(c, total.clone())))
            .collect();
        CylinderDistribution::new(depth, weights)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weights(&self) -> &BTreeMap<Word, BigRational> {
        &self.weights
    }

    pub fn weight(&self, w: &Word) -> BigRational {
        self.weights.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Depth-`l` marginal obtained by summing over right extensions.
    pub fn marginal(&self, l: usize) -> Result<CylinderDistribution> {
        if l == 0 {
            return Err(Error::ZeroDepth);
        }
        if l > self.depth {
            return Err(Error::DepthMismatch { have: self.depth, want: l });
        }
        if l == self.depth {
            return Ok(self.clone());
        }
        let mut out: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (w, v) in &self.weights {
            *out.entry(Word(w.0[..l].to_vec())).or_insert_with(BigRational::zero) += v;
        }
        Ok(CylinderDistribution { depth: l, weights: out })
    }

    fn suffix_marginal(&self) -> BTreeMap<Word, BigRational> {
        let mut out: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (w, v) in &self.weights {
            *out.entry(Word(w.0[1..].to_vec())).or_insert_with(BigRational::zero) += v;
        }
        out
    }

    /// Left and right marginals on words of length `depth - 1` agree.
    pub fn is_consistent(&self) -> bool {
        if self.depth == 1 {
            return true;
        }
        let left = self.marginal(self.depth - 1).expect("depth >= 2").weights;
        left == self.suffix_marginal()
    }

    /// Checks that the distribution is the depth-`L` marginal of a
    /// shift-invariant measure supported on the SFT. For depth 1 this asks
    /// for a circulation on the transition graph with the given symbol
    /// throughputs.
    pub fn check_invariant(&self, sft: &Sft) -> Result<()> {
        if let Some(w) = self.weights.keys().find(|w| !sft.is_admissible(&w.0)) {
            return Err(Error::NotInvariant(format!("word {w} is not admissible")));
        }
        if self.depth == 1 {
            return lift_to_depth_two(self, sft).map(|_| ());
        }
        if self.is_consistent() {
            Ok(())
        } else {
            Err(Error::NotInvariant("left and right marginals differ".into()))
        }
    }

    /// `integral of f` for an observable of depth at most `self.depth`.
    pub fn integrate(&self, f: &LocallyConstant) -> Result<BigRational> {
        let m = self.marginal(f.depth())?;
        Ok(m.weights.iter().map(|(w, v)| f.value(w) * v).fold(BigRational::zero(), |a, b| a + b))
    }

    /// CSV lines `word,numerator/denominator`, ordered by word.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (w, v) in &self.weights {
            s.push_str(&format!("{},{}\n", w, rational::format(v)));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut weights = BTreeMap::new();
        let mut depth = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |msg: &str| Error::ParseDistribution { line: i + 1, msg: msg.to_string() };
            let (w, v) = line.split_once(',').ok_or_else(|| bad("expected word,weight"))?;
            let w: Word = w.trim().parse().map_err(|_| bad("bad word"))?;
            let v = rational::parse(v).ok_or_else(|| bad("bad rational"))?;
            if *depth.get_or_insert(w.len()) != w.len() {
                return Err(bad("words of different lengths"));
            }
            if weights.insert(w, v).is_some() {
                return Err(bad("duplicate word"));
            }
        }
        CylinderDistribution::new(depth.ok_or(Error::ParseDistribution { line: 0, msg: "empty".into() })?, weights)
    }
}

/// Circulation on the transition graph with the given symbol throughputs,
/// found by max-flow on the bipartite split graph.
fn lift_to_depth_two(mu: &CylinderDistribution, sft: &Sft) -> Result<CylinderDistribution> {
    let k = sft.alphabet_size();
    let n = 2 * k + 2;
    let (src, sink) = (0, 2 * k + 1);
    let mut cap = vec![vec![BigRational::zero(); n]; n];
    for a in 0..k {
        let m = mu.weight(&Word(vec![a as Symbol]));
        cap[src][1 + a] = m.clone();
        cap[1 + k + a][sink] = m;
        for b in 0..k {
            if sft.allowed(a as Symbol, b as Symbol) {
                cap[1 + a][1 + k + b] = BigRational::one();
            }
        }
    }
    let original = cap.clone();
    let mut total = BigRational::zero();
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in scan_order(u, k) {
                if parent[v] == usize::MAX && cap[u][v].is_positive() {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            break;
        }
        let mut bottleneck: Option<BigRational> = None;
        let mut v = sink;
        while v != src {
            let u = parent[v];
            bottleneck = Some(match bottleneck {
                Some(b) if b < cap[u][v] => b,
                _ => cap[u][v].clone(),
            });
            v = u;
        }
        let b = bottleneck.expect("path has edges");
        let mut v = sink;
        while v != src {
            let u = parent[v];
            cap[u][v] -= &b;
            cap[v][u] += &b;
            v = u;
        }
        total += b;
    }
    if !total.is_one() {
        return Err(Error::NotInvariant(
            "symbol frequencies are not realisable by an invariant measure".into(),
        ));
    }
    let mut weights = BTreeMap::new();
    for a in 0..k {
        for b in 0..k {
            let f = &original[1 + a][1 + k + b] - &cap[1 + a][1 + k + b];
            if f.is_positive() {
                weights.insert(Word(vec![a as Symbol, b as Symbol]), f);
            }
        }
    }
    CylinderDistribution::new(2, weights)
}

/// Neighbour order for the split graph. Out-copies try successors in
/// cyclic order starting after themselves, so self-loops are used last.
fn scan_order(u: usize, k: usize) -> Vec<usize> {
    let n = 2 * k + 2;
    if (1..=k).contains(&u) {
        let a = u - 1;
        let mut order: Vec<usize> = (1..k + 1).map(|i| 1 + k + (a + i) % k).collect();
        order.extend((0..=k).chain([n - 1]));
        order
    } else {
        (0..n).collect()
    }
}

/// Exact cyclic window frequencies of a periodic orbit.
pub fn cylinder_marginals(orbit: &PeriodicOrbit, depth: usize) -> Result<CylinderDistribution> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let p = orbit.period();
    let mut counts: BTreeMap<Word, BigInt> = BTreeMap::new();
    for r in 0..p {
        let w = Word((0..depth).map(|i| orbit.symbol(r + i)).collect());
        *counts.entry(w).or_insert_with(BigInt::zero) += 1;
    }
    CylinderDistribution::from_counts(depth, counts)
}

/// Total variation `1/2 sum |mu[w] - nu[w]|` of two same-depth distributions.
pub fn total_variation(mu: &CylinderDistribution, nu: &CylinderDistribution) -> BigRational {
    let words: BTreeSet<&Word> = mu.weights.keys().chain(nu.weights.keys()).collect();
    let sum = words
        .into_iter()
        .map(|w| (mu.weight(w) - nu.weight(w)).abs())
        .fold(BigRational::zero(), |a, b| a + b);
    sum / BigRational::from_integer(BigInt::from(2))
}

/// `rho_L(mu, nu) = sum_{l=1..L} 2^{-l} TV_l(mu, nu)`.
pub fn weak_star_distance(mu: &CylinderDistribution, nu: &CylinderDistribution, depth: usize) -> Result<BigRational> {
    for d in [mu.depth, nu.depth] {
        if d < depth {
            return Err(Error::DepthMismatch { have: d, want: depth });
        }
    }
    let mut rho = BigRational::zero();
    for l in 1..=depth {
        let tv = total_variation(&mu.marginal(l)?, &nu.marginal(l)?);
        rho += dyadic(l as u32) * tv;
    }
    Ok(rho)
}

/// The invariant measure equidistributed on a periodic orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicMeasure {
    pub orbit: PeriodicOrbit,
    pub marginals: CylinderDistribution,
}

impl PeriodicMeasure {
    pub fn new(orbit: PeriodicOrbit, depth: usize) -> Result<Self> {
        let marginals = cylinder_marginals(&orbit, depth)?;
        Ok(PeriodicMeasure { orbit, marginals })
    }
}

/// `(1/N) sum_{j<N} delta_{f^j x}` at cylinder depth `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    pub horizon: BigInt,
    pub marginals: CylinderDistribution,
}

/// Exact empirical measure by closed-form block counting; the cost does
/// not depend on the size of `horizon`.
pub fn empirical_measure(x: &ScheduledPoint, horizon: &BigInt, depth: usize) -> Result<EmpiricalMeasure> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    if !horizon.is_positive() {
        return Err(Error::EmptyHorizon);
    }
    let counts = x.window_counts(&BigInt::zero(), horizon, depth);
    Ok(EmpiricalMeasure {
        horizon: horizon.clone(),
        marginals: CylinderDistribution::from_counts(depth, counts)?,
    })
}

/// Closed ball in the depth-`L` weak* metric. A zero radius is allowed and
/// means exact membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureBall {
    pub center: CylinderDistribution,
    pub radius: BigRational,
}

impl MeasureBall {
    pub fn new(center: CylinderDistribution, radius: BigRational) -> Self {
        assert!(!radius.is_negative(), "ball radius must be nonnegative");
        MeasureBall { center, radius }
    }

    pub fn distance(&self, mu: &CylinderDistribution, depth: usize) -> Result<BigRational> {
        weak_star_distance(mu, &self.center, depth)
    }

    pub fn contains(&self, mu: &CylinderDistribution, depth: usize) -> Result<bool> {
        Ok(self.distance(mu, depth)? <= self.radius)
    }
}

/// Default largest edge multiplicity total tried by [`sigmund_approximate`].
pub const DEFAULT_DENOMINATOR_CAP: u64 = 1 << 14;

/// Periodic orbit whose depth-`L` marginals are within `epsilon` of an
/// invariant distribution.
///
/// Depth-`L` words are edges between depth-`(L-1)` words. Edge weights are
/// scaled by a common denominator and floored; vertex imbalances are then
/// repaired with shortest correction paths, separate components are
/// joined by a closed tour, and an Eulerian circuit of the resulting
/// multigraph spells the orbit word. Denominators are doubled until the
/// distance target is met or `cap` is exceeded.
pub fn sigmund_approximate(
    sft: &Sft,
    mu: &CylinderDistribution,
    epsilon: &BigRational,
    cap: u64,
) -> Result<PeriodicOrbit> {
    mu.check_invariant(sft)?;
    let target_depth = mu.depth;
    let work = if mu.depth == 1 { lift_to_depth_two(mu, sft)? } else { mu.clone() };
    let graph = WordGraph::new(sft, work.depth - 1);

    let lcm = work
        .weights
        .values()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut candidates: Vec<BigInt> = Vec::new();
    let cap_big = BigInt::from(cap);
    if lcm <= cap_big {
        let mut d = lcm.clone();
        while d <= cap_big {
            candidates.push(d.clone());
            d *= 2;
        }
    } else {
        let mut d = BigInt::from(16);
        while d <= cap_big {
            candidates.push(d.clone());
            d *= 2;
        }
    }
    for d in candidates {
        let Some(word) = graph.round_and_trace(&work, &d) else { continue };
        let orbit = PeriodicOrbit::canonical(&word)?;
        let got = cylinder_marginals(&orbit, target_depth)?;
        if weak_star_distance(&got, mu, target_depth)? <= *epsilon {
            return Ok(orbit);
        }
    }
    Err(Error::InfeasibleEpsilon { epsilon: rational::format(epsilon), cap })
}

/// Higher-block graph: vertices are admissible words of length `order`,
/// edges admissible words of length `order + 1`.
struct WordGraph<'a> {
    sft: &'a Sft,
    vertices: Vec<Word>,
    index: BTreeMap<Word, usize>,
    succ: Vec<Vec<usize>>,
}

impl<'a> WordGraph<'a> {
    fn new(sft: &'a Sft, order: usize) -> Self {
        let vertices = sft.admissible_words(order);
        let index: BTreeMap<Word, usize> = vertices.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let succ = vertices
            .iter()
            .map(|v| {
                sft.admissible_words(order + 1)
                    .into_iter()
                    .filter(|e| e.0[..order] == v.0[..])
                    .map(|e| index[&Word(e.0[1..].to_vec())])
                    .collect()
            })
            .collect();
        WordGraph { sft, vertices, index, succ }
    }

    fn edge(&self, from: usize, to: usize) -> Word {
        let mut w = self.vertices[from].0.clone();
        match self.vertices[to].0.last() {
            Some(&s) => w.push(s),
            // order 0: the single vertex is the empty word; unreachable for depth >= 2
            None => unreachable!("edges between empty words are not used"),
        }
        Word(w)
    }

    fn tail(&self, e: &Word) -> usize {
        self.index[&Word(e.0[..e.len() - 1].to_vec())]
    }

    fn head(&self, e: &Word) -> usize {
        self.index[&Word(e.0[1..].to_vec())]
    }

    /// Lexicographically smallest shortest path of at least one edge.
    fn shortest_path(&self, from: usize, to: usize) -> Vec<Word> {
        let n = self.vertices.len();
        // distance to `to`, computed backwards
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, s) in self.succ.iter().enumerate() {
            for &v in s {
                pred[v].push(u);
            }
        }
        let mut dist = vec![usize::MAX; n];
        dist[to] = 0;
        let mut queue = VecDeque::from([to]);
        while let Some(v) = queue.pop_front() {
            for &u in &pred[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = from;
        if from == to {
            // closed path: leave along the smallest edge that can return
            let next = *self.succ[cur]
                .iter()
                .filter(|&&v| dist[v] != usize::MAX)
                .min_by(|&&a, &&b| dist[a].cmp(&dist[b]).then(self.vertices[a].cmp(&self.vertices[b])))
                .expect("mixing graph has cycles");
            path.push(self.edge(cur, next));
            cur = next;
        }
        while cur != to {
            let next = *self.succ[cur]
                .iter()
                .filter(|&&v| dist[v] != usize::MAX && dist[v] + 1 == dist[cur])
                .min_by(|&&a, &&b| self.vertices[a].cmp(&self.vertices[b]))
                .expect("strongly connected");
            path.push(self.edge(cur, next));
            cur = next;
        }
        path
    }

    fn round_and_trace(&self, mu: &CylinderDistribution, scale: &BigInt) -> Option<Word> {
        let n = self.vertices.len();
        let mut mult: BTreeMap<Word, u64> = BTreeMap::new();
        for (w, v) in &mu.weights {
            let c = (v * BigRational::from_integer(scale.clone())).floor().to_integer();
            let c = c.to_u64()?;
            if c > 0 {
                mult.insert(w.clone(), c);
            }
        }
        if mult.is_empty() {
            return None;
        }
        let mut balance = vec![0i64; n];
        for (e, &c) in &mult {
            balance[self.tail(e)] += c as i64;
            balance[self.head(e)] -= c as i64;
        }
        // vertices with surplus in-degree must emit, surplus out-degree must absorb
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for v in 0..n {
            for _ in 0..(-balance[v]).max(0) {
                sources.push(v);
            }
            for _ in 0..balance[v].max(0) {
                targets.push(v);
            }
        }
        for (&s, &t) in sources.iter().zip(&targets) {
            for e in self.shortest_path(s, t) {
                *mult.entry(e).or_insert(0) += 1;
            }
        }
        // join weakly connected components with one closed tour
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut used = vec![false; n];
        for e in mult.keys() {
            let (a, b) = (self.tail(e), self.head(e));
            used[a] = true;
            used[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut reps: Vec<usize> = (0..n).filter(|&v| used[v] && find(&mut parent, v) == v).collect();
        reps.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        if reps.len() > 1 {
            for i in 0..reps.len() {
                let (s, t) = (reps[i], reps[(i + 1) % reps.len()]);
                for e in self.shortest_path(s, t) {
                    *mult.entry(e).or_insert(0) += 1;
                }
            }
        }
        Some(self.euler_word(mult))
    }

    fn euler_word(&self, mult: BTreeMap<Word, u64>) -> Word {
        let n = self.vertices.len();
        let mut out: Vec<BTreeMap<Word, u64>> = vec![BTreeMap::new(); n];
        for (e, c) in mult {
            out[self.tail(&e)].insert(e, c);
        }
        let start = (0..n).find(|&v| !out[v].is_empty()).expect("nonempty multigraph");
        let mut stack: Vec<(usize, Option<Word>)> = vec![(start, None)];
        let mut circuit: Vec<Word> = Vec::new();
        while let Some((v, _)) = stack.last().cloned() {
            let next = out[v].iter_mut().next().map(|(e, c)| {
                *c -= 1;
                e.clone()
            });
            match next {
                Some(e) => {
                    if out[v][&e] == 0 {
                        out[v].remove(&e);
                    }
                    let h = self.head(&e);
                    stack.push((h, Some(e)));
                }
                None => {
                    if let Some((_, Some(e))) = stack.pop() {
                        circuit.push(e);
                    }
                }
            }
        }
        circuit.reverse();
        debug_assert!(self.sft.is_admissible(&circuit.iter().map(|e| *e.0.last().unwrap()).collect::<Vec<_>>()));
        Word(circuit.iter().map(|e| *e.0.last().expect("edges are nonempty")).collect())
    }
}

/// Vertices of the depth-`L` invariant polytope: normalised simple cycles
/// of the higher-block graph at depth `max(L, 2)`, i.e. periodic orbits
/// whose cyclic windows of length `max(L, 2) - 1` are pairwise distinct.
pub fn invariant_polytope_vertices(sft: &Sft, depth: usize) -> Vec<PeriodicOrbit> {
    let order = depth.max(2) - 1;
    let n_vertices = sft.admissible_words(order).len();
    sft.enumerate_periodic(n_vertices)
        .into_iter()
        .filter(|o| {
            let p = o.period();
            let windows: BTreeSet<Vec<Symbol>> =
                (0..p).map(|r| (0..order).map(|i| o.symbol(r + i)).collect()).collect();
            windows.len() == p
        })
        .collect()
}

/// Random point of the depth-`L` invariant polytope: a convex combination
/// of a few polytope vertices with random integer weights.
pub fn sample_invariant(rng: &mut impl Rng, vertices: &[CylinderDistribution]) -> CylinderDistribution {
    let depth = vertices[0].depth;
    let picks = rng.gen_range(1..=3.min(vertices.len()));
    let mut mix: BTreeMap<Word, BigRational> = BTreeMap::new();
    let chosen: Vec<(usize, u32)> = (0..picks).map(|_| (rng.gen_range(0..vertices.len()), rng.gen_range(1..=64))).collect();
    let total: u32 = chosen.iter().map(|c| c.1).sum();
    for (i, w) in chosen {
        let lam = BigRational::new(BigInt::from(w), BigInt::from(total));
        for (word, v) in &vertices[i].weights {
            *mix.entry(word.clone()).or_insert_with(BigRational::zero) += &lam * v;
        }
    }
    CylinderDistribution::new(depth, mix).expect("convex combination is normalised")
}

/// A pruned set of periodic measures together with its sampling check.
#[derive(Clone, Debug)]
pub struct EpsilonNet {
    pub elements: Vec<PeriodicMeasure>,
    pub samples_checked: usize,
    /// Largest sample-to-net distance observed.
    pub worst_sample_distance: BigRational,
}

/// Periodic measures of period at most `max_period`, greedily pruned (in
/// sorted orbit order) so that no two kept elements lie within
/// `epsilon / 2`, then certified against `samples` random points of the
/// invariant polytope drawn with the given seed.
pub fn epsilon_net(
    sft: &Sft,
    epsilon: &BigRational,
    depth: usize,
    max_period: usize,
    samples: usize,
    seed: u64,
) -> Result<EpsilonNet> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let candidates: Vec<PeriodicMeasure> = sft
        .enumerate_periodic(max_period)
        .into_par_iter()
        .map(|o| PeriodicMeasure::new(o, depth))
        .collect::<Result<_>>()?;
    let half = epsilon / BigRational::from_integer(BigInt::from(2));
    let mut elements: Vec<PeriodicMeasure> = Vec::new();
    for c in candidates {
        let far = elements
            .iter()
            .all(|e| weak_star_distance(&e.marginals, &c.marginals, depth).expect("same depth") > half);
        if far {
            elements.push(c);
        }
    }
    let vertices: Vec<CylinderDistribution> = invariant_polytope_vertices(sft, depth)
        .iter()
        .map(|o| cylinder_marginals(o, depth))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = BigRational::zero();
    for sample in 0..samples {
        let mu = sample_invariant(&mut rng, &vertices);
        let best = elements
            .iter()
            .map(|e| weak_star_distance(&e.marginals, &mu, depth).expect("same depth"))
            .min()
            .ok_or(Error::EmptyNet)?;
        if best > *epsilon {
            return Err(Error::CoverageFailure {
                sample,
                distance: rational::format(&best),
                epsilon: rational::format(epsilon),
            });
        }
        if best > worst {
            worst = best;
        }
    }
    Ok(EpsilonNet { elements, samples_checked: samples, worst_sample_distance: worst })
}
