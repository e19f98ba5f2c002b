//! Subshifts of finite type: transition matrices, admissible words,
//! connectors realising the mixing gap, and periodic orbit inventories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Symbol = u8;

const MAX_ALPHABET: usize = 36;

fn symbol_char(s: Symbol) -> char {
    std::char::from_digit(s as u32, 36).expect("symbol below 36")
}

/// A finite word over the alphabet. Ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Shortest `d` dividing the length with `w[i] = w[i mod d]`.
    pub fn primitive_period(&self) -> usize {
        let n = self.len();
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| (d..n).all(|i| self.0[i] == self.0[i - d]))
            .unwrap_or(0)
    }

    /// Index of the lexicographically least rotation.
    pub fn least_rotation(&self) -> usize {
        let s = &self.0;
        let n = s.len();
        if n == 0 {
            return 0;
        }
        let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
        while i < n && j < n && k < n {
            let a = s[(i + k) % n];
            let b = s[(j + k) % n];
            if a == b {
                k += 1;
                continue;
            }
            if a > b {
                i += k + 1;
            } else {
                j += k + 1;
            }
            if i == j {
                j += 1;
            }
            k = 0;
        }
        i.min(j)
    }

    pub fn rotated(&self, by: usize) -> Word {
        let n = self.len();
        Word((0..n).map(|i| self.0[(by + i) % n]).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", symbol_char(s))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| Error::ParseWord(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        s.parse().expect("valid word literal")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A mixing subshift of finite type given by a 0/1 transition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sft {
    transitions: Vec<Vec<bool>>,
    mixing_time: usize,
}

impl Sft {
    /// Validates the matrix and computes its minimal mixing time.
    pub fn new(matrix: Vec<Vec<bool>>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if k > MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge(k));
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != k {
                return Err(Error::RaggedMatrix { row, len: r.len(), expected: k });
            }
        }
        for i in 0..k {
            if !matrix[i].iter().any(|&x| x) || !(0..k).any(|a| matrix[a][i]) {
                return Err(Error::EmptyRowOrColumn(i));
            }
        }
        let bound = k * k + 1;
        let mut power = matrix.clone();
        for n in 1..=bound {
            if power.iter().all(|r| r.iter().all(|&x| x)) {
                return Ok(Sft { transitions: matrix, mixing_time: n });
            }
            power = bool_mul(&power, &matrix);
        }
        Err(Error::NotMixing { bound })
    }

    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        Sft::new(rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect())
    }

    /// The full shift on `k` symbols.
    pub fn full(k: usize) -> Self {
        Sft::new(vec![vec![true; k]; k]).expect("full shift is mixing")
    }

    /// The golden-mean shift: `1` may not follow `1`.
    pub fn golden_mean() -> Self {
        Sft::from_rows(&[&[1, 1], &[1, 0]]).expect("golden mean shift is mixing")
    }

    pub fn alphabet_size(&self) -> usize {
        self.transitions.len()
    }

    pub fn mixing_time(&self) -> usize {
        self.mixing_time
    }

    pub fn transitions(&self) -> &[Vec<bool>] {
        &self.transitions
    }

    pub fn allowed(&self, a: Symbol, b: Symbol) -> bool {
        self.transitions[a as usize][b as usize]
    }

    pub fn check_symbol(&self, s: Symbol) -> Result<()> {
        if (s as usize) < self.alphabet_size() {
            Ok(())
        } else {
            Err(Error::BadSymbol(s))
        }
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| (s as usize) < self.alphabet_size())
            && w.windows(2).all(|p| self.allowed(p[0], p[1]))
    }

    pub fn is_cyclically_admissible(&self, w: &[Symbol]) -> bool {
        !w.is_empty() && self.is_admissible(w) && self.allowed(w[w.len() - 1], w[0])
    }

    pub fn check_admissible(&self, w: &Word) -> Result<()> {
        if self.is_admissible(&w.0) {
            Ok(())
        } else {
            Err(Error::Inadmissible(w.clone()))
        }
    }

    /// All admissible words of the given length in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Word> {
        let k = self.alphabet_size() as Symbol;
        let mut words = vec![Word::default()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &words {
                for s in 0..k {
                    if w.0.last().is_none_or(|&l| self.allowed(l, s)) {
                        let mut v = w.0.clone();
                        v.push(s);
                        next.push(Word(v));
                    }
                }
            }
            words = next;
        }
        words
    }

    /// `reach[r][s]`: a path of exactly `r` steps leads from `s` to `target`.
    fn reach_table(&self, target: Symbol, steps: usize) -> Vec<Vec<bool>> {
        let k = self.alphabet_size();
        let mut reach = Vec::with_capacity(steps + 1);
        reach.push((0..k).map(|s| s == target as usize).collect::<Vec<_>>());
        for r in 1..=steps {
            let prev: &Vec<bool> = &reach[r - 1];
            let row = (0..k)
                .map(|s| (0..k).any(|c| self.transitions[s][c] && prev[c]))
                .collect();
            reach.push(row);
        }
        reach
    }

    /// Lexicographically smallest path of exactly `gap` steps from `a` to
    /// `b`, returned as its `gap - 1` intermediate symbols, if one exists.
    pub fn path_between(&self, a: Symbol, b: Symbol, gap: usize) -> Option<Word> {
        if gap == 0 {
            return (a == b).then(Word::default);
        }
        let reach = self.reach_table(b, gap);
        if !reach[gap][a as usize] {
            return None;
        }
        let mut cur = a;
        let mut out = Vec::with_capacity(gap - 1);
        for remaining in (1..gap).rev() {
            let next = (0..self.alphabet_size() as Symbol)
                .find(|&c| self.allowed(cur, c) && reach[remaining][c as usize])
                .expect("reach table guarantees a continuation");
            out.push(next);
            cur = next;
        }
        Some(Word(out))
    }

    /// Connector of a gap `g >= mixing_time` from `a` to `b`: the `g - 1`
    /// intermediate symbols of the lexicographically smallest path.
    pub fn connector(&self, a: Symbol, b: Symbol, gap: usize) -> Result<Word> {
        self.check_symbol(a)?;
        self.check_symbol(b)?;
        if gap < self.mixing_time {
            return Err(Error::GapTooSmall { gap, mixing_time: self.mixing_time });
        }
        Ok(self.path_between(a, b, gap).expect("mixing guarantees a path for gap >= m"))
    }

    /// Smallest gap `g >= 1` admitting a path from `a` to `b`, with its
    /// lexicographically smallest connector.
    pub fn shortest_connector(&self, a: Symbol, b: Symbol) -> (usize, Word) {
        (1..=self.mixing_time)
            .find_map(|g| self.path_between(a, b, g).map(|w| (g, w)))
            .expect("a path of length mixing_time always exists")
    }

    /// Canonical primitive cyclically admissible orbits of period at most
    /// `max_period`, sorted by period then lexicographically.
    pub fn enumerate_periodic(&self, max_period: usize) -> Vec<PeriodicOrbit> {
        let mut out = Vec::new();
        for n in 1..=max_period {
            let mut a = vec![0 as Symbol; n + 1];
            self.lyndon_rec(1, 1, n, &mut a, &mut out);
        }
        out
    }

    // Fredricksen-Kessler-Maiorana recursion with admissibility pruning.
    fn lyndon_rec(&self, t: usize, p: usize, n: usize, a: &mut Vec<Symbol>, out: &mut Vec<PeriodicOrbit>) {
        if t > n {
            if p == n && self.allowed(a[n], a[1]) {
                out.push(PeriodicOrbit { word: Word(a[1..=n].to_vec()) });
            }
            return;
        }
        let k = self.alphabet_size() as Symbol;
        let start = if t == 1 { 0 } else { a[t - p] };
        let fits = |a: &Vec<Symbol>, s: Symbol| t == 1 || self.allowed(a[t - 1], s);
        if t > 1 {
            a[t] = start;
            if fits(a, start) {
                self.lyndon_rec(t + 1, p, n, a, out);
            }
        }
        let first = if t == 1 { 0 } else { start + 1 };
        for s in first..k {
            a[t] = s;
            if fits(a, s) {
                self.lyndon_rec(t + 1, t, n, a, out);
            }
        }
    }

    /// Plain-text form: `k` on the first line, then `k` rows of 0/1 digits.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.alphabet_size());
        for row in &self.transitions {
            s.extend(row.iter().map(|&x| if x { '1' } else { '0' }));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let k: usize = lines
            .next()
            .ok_or_else(|| Error::ParseSft("missing alphabet size".into()))?
            .parse()
            .map_err(|_| Error::ParseSft("first line must be the alphabet size".into()))?;
        let mut rows = Vec::with_capacity(k);
        for i in 0..k {
            let line = lines.next().ok_or_else(|| Error::ParseSft(format!("missing row {i}")))?;
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::ParseSft(format!("row {i}: unexpected character {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(Error::ParseSft("trailing rows after the matrix".into()));
        }
        Sft::new(rows)
    }
}

fn bool_mul(x: &[Vec<bool>], y: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let k = x.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).any(|l| x[i][l] && y[l][j])).collect())
        .collect()
}

/// A periodic orbit, stored as its canonical word: primitive and
/// lexicographically least among its rotations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodicOrbit {
    word: Word,
}

impl PeriodicOrbit {
    /// The orbit of the periodic point spelled by `word` (any rotation,
    /// repetitions allowed).
    pub fn from_word(sft: &Sft, word: &Word) -> Result<Self> {
        PeriodicPoint::from_cyclic_word(sft, word).map(|p| p.orbit)
    }

    /// Canonicalises without consulting an SFT.
    pub fn canonical(word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let root = Word(word.0[..word.primitive_period()].to_vec());
        let rot = root.least_rotation();
        Ok(PeriodicOrbit { word: root.rotated(rot) })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn symbol(&self, phase: usize) -> Symbol {
        self.word.0[phase % self.period()]
    }

    pub fn check(&self, sft: &Sft) -> Result<()> {
        if sft.is_cyclically_admissible(&self.word.0) {
            Ok(())
        } else {
            Err(Error::NotCyclicallyAdmissible(self.word.clone()))
        }
    }
}

impl fmt::Display for PeriodicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.word)
    }
}

/// A point on a periodic orbit: position `j` carries `orbit.symbol(phase + j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub orbit: PeriodicOrbit,
    pub phase: usize,
}

impl PeriodicPoint {
    pub fn new(orbit: PeriodicOrbit, phase: usize) -> Self {
        let phase = phase % orbit.period();
        PeriodicPoint { orbit, phase }
    }

    /// The periodic point `...www.www...` with `w[0]` at position 0.
    pub fn from_cyclic_word(sft: &Sft, word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !sft.is_cyclically_admissible(&word.0) {
            return Err(Error::NotCyclicallyAdmissible(word.clone()));
        }
        let p = word.primitive_period();
        let root = Word(word.0[..p].to_vec());
        let rot = root.least_rotation();
        let orbit = PeriodicOrbit { word: root.rotated(rot) };
        Ok(PeriodicPoint { orbit, phase: (p - rot) % p })
    }

    /// Symbol at an arbitrary-precision position.
    pub fn symbol_at(&self, j: &num_bigint::BigInt) -> Symbol {
        let p = num_bigint::BigInt::from(self.orbit.period());
        let r = num_integer::Integer::mod_floor(&(j + self.phase), &p);
        let idx: usize = r.try_into().expect("residue below period");
        self.orbit.word.0[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn mixing_times() {
        assert_eq!(Sft::full(2).mixing_time(), 1);
        assert_eq!(Sft::golden_mean().mixing_time(), 2);
        assert_eq!(
            Sft::from_rows(&[&[1, 0], &[0, 1]]),
            Err(Error::NotMixing { bound: 5 })
        );
        assert_eq!(Sft::from_rows(&[&[1, 1], &[0, 0]]), Err(Error::EmptyRowOrColumn(1)));
        // periodic (bipartite) matrix is irreducible but not mixing
        assert!(matches!(Sft::from_rows(&[&[0, 1], &[1, 0]]), Err(Error::NotMixing { .. })));
    }

    #[test]
    fn connector_examples() {
        let full = Sft::full(2);
        assert_eq!(full.connector(0, 1, 1).unwrap(), Word::default());
        let gm = Sft::golden_mean();
        assert_eq!(gm.connector(1, 1, 2).unwrap(), Word::from("0"));
        assert_eq!(gm.connector(1, 1, 1), Err(Error::GapTooSmall { gap: 1, mixing_time: 2 }));
        assert_eq!(gm.shortest_connector(1, 1), (2, Word::from("0")));
        assert_eq!(gm.shortest_connector(0, 1), (1, Word::default()));
    }

    #[test]
    fn enumerate_examples() {
        let words = |v: Vec<PeriodicOrbit>| v.iter().map(|o| o.word().to_string()).collect::<Vec<_>>();
        assert_eq!(words(Sft::full(2).enumerate_periodic(2)), ["0", "1", "01"]);
        assert_eq!(words(Sft::golden_mean().enumerate_periodic(2)), ["0", "01"]);
        assert!(Sft::full(3).enumerate_periodic(0).is_empty());
        assert_eq!(
            words(Sft::golden_mean().enumerate_periodic(5)),
            ["0", "01", "001", "0001", "00001", "00101"]
        );
    }

    #[test]
    fn canonical_points() {
        let gm = Sft::golden_mean();
        let p = PeriodicPoint::from_cyclic_word(&gm, &Word::from("1010")).unwrap();
        assert_eq!(p.orbit.word(), &Word::from("01"));
        assert_eq!(p.symbol_at(&BigInt::from(0)), 1);
        assert_eq!(p.symbol_at(&BigInt::from(-1)), 0);
        assert!(PeriodicPoint::from_cyclic_word(&gm, &Word::from("11")).is_err());
        assert!(PeriodicPoint::from_cyclic_word(&gm, &Word::from("101")).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let gm = Sft::golden_mean();
        assert_eq!(gm.to_text(), "2\n11\n10\n");
        assert_eq!(Sft::parse_text(&gm.to_text()).unwrap(), gm);
        assert_eq!(Sft::parse_text("2\n1 1\n1 0\n").unwrap(), gm);
        assert!(Sft::parse_text("2\n12\n10\n").is_err());
        assert!(Sft::parse_text("3\n111\n").is_err());
    }
}
