//! One-sided subshifts of finite type, eventually periodic points and the
//! shift metric `d(x, y) = 2^-k`, `k` the first index where `x` and `y` differ.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::{Error, Rational, Result};

/// A finite word over the alphabet `0..k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    /// Parses a word written with one character per symbol (`0-9` then `a-z`).
    pub fn parse(text: &str) -> Result<Word> {
        text.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Invalid(alloc::format!("bad symbol character {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            let c = char::from_digit(u32::from(s), 36).unwrap_or('?');
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A dyadic value `0` or `2^-k`, the value set of the shift metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dyadic {
    Zero,
    /// `2^-k`.
    Pow(u32),
}

impl Dyadic {
    pub const ONE: Dyadic = Dyadic::Pow(0);

    pub fn to_f64(self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow(k) => libm::ldexp(1.0, -(k as i32)),
        }
    }

    pub fn to_rational(self) -> Rational {
        match self {
            Dyadic::Zero => Rational::from_integer(BigInt::from(0)),
            Dyadic::Pow(k) => Rational::new(BigInt::one(), BigInt::one() << k as usize),
        }
    }

    /// Halves the value (`2^-k` becomes `2^-(k+1)`).
    pub fn half(self) -> Dyadic {
        match self {
            Dyadic::Zero => Dyadic::Zero,
            Dyadic::Pow(k) => Dyadic::Pow(k + 1),
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Ordering::Equal,
            (Dyadic::Zero, _) => Ordering::Less,
            (_, Dyadic::Zero) => Ordering::Greater,
            (Dyadic::Pow(a), Dyadic::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => write!(f, "0"),
            Dyadic::Pow(0) => write!(f, "1"),
            Dyadic::Pow(k) => write!(f, "2^-{k}"),
        }
    }
}

/// Length `r` such that the Bowen ball `B_n(x, 2^-m)` is the cylinder
/// `[x_0 .. x_{r-1}]`.
///
/// `d(T^i x, T^i y) < 2^-m` holds iff `x` and `y` agree on positions
/// `i..=i+m`; intersecting over `i < n` gives agreement on `0..n+m`.
pub fn bowen_resolution(n: usize, m: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    Ok(n + m as usize)
}

/// A one-sided subshift of finite type given by a 0/1 transition matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subshift {
    alphabet: usize,
    allowed: Vec<bool>,
    successors: Vec<Vec<u8>>,
    predecessors: Vec<Vec<u8>>,
    one_sided: bool,
}

impl Subshift {
    /// Builds the SFT whose admissible transitions are the `true` entries of
    /// `rows`. Every symbol needs a successor and a predecessor.
    pub fn new(alphabet: usize, rows: &[Vec<bool>]) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if alphabet > 36 {
            return Err(Error::Invalid(String::from(
                "alphabets larger than 36 symbols are not supported",
            )));
        }
        if rows.len() != alphabet || rows.iter().any(|r| r.len() != alphabet) {
            return Err(Error::BadMatrixShape { expected: alphabet });
        }
        let allowed: Vec<bool> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let successors: Vec<Vec<u8>> = (0..alphabet)
            .map(|a| {
                (0..alphabet)
                    .filter(|&b| allowed[a * alphabet + b])
                    .map(|b| b as u8)
                    .collect()
            })
            .collect();
        let predecessors: Vec<Vec<u8>> = (0..alphabet)
            .map(|b| {
                (0..alphabet)
                    .filter(|&a| allowed[a * alphabet + b])
                    .map(|a| a as u8)
                    .collect()
            })
            .collect();
        if let Some(a) = successors.iter().position(|s| s.is_empty()) {
            return Err(Error::NoSuccessor(a));
        }
        if let Some(b) = predecessors.iter().position(|p| p.is_empty()) {
            return Err(Error::NoPredecessor(b));
        }
        Ok(Subshift {
            alphabet,
            allowed,
            successors,
            predecessors,
            one_sided: true,
        })
    }

    /// Builds an SFT from a matrix of 0/1 integers.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v != 0).collect())
            .collect();
        Subshift::new(rows.len(), &bools)
    }

    /// The full shift on `k` symbols.
    pub fn full(k: usize) -> Self {
        Subshift::new(k, &vec![vec![true; k]; k]).expect("full shift is valid")
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn is_one_sided(&self) -> bool {
        self.one_sided
    }

    pub fn allows(&self, a: u8, b: u8) -> bool {
        self.allowed[a as usize * self.alphabet + b as usize]
    }

    pub fn successors(&self, a: u8) -> &[u8] {
        &self.successors[a as usize]
    }

    pub fn predecessors(&self, a: u8) -> &[u8] {
        &self.predecessors[a as usize]
    }

    /// Transition matrix as 0/1 rows.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.alphabet)
            .map(|a| {
                (0..self.alphabet)
                    .map(|b| u8::from(self.allowed[a * self.alphabet + b]))
                    .collect()
            })
            .collect()
    }

    pub fn check_symbols(&self, word: &[u8]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= self.alphabet) {
            Some(&s) => Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                alphabet: self.alphabet,
            }),
            None => Ok(()),
        }
    }

    pub fn is_admissible(&self, word: &[u8]) -> bool {
        word.iter().all(|&s| (s as usize) < self.alphabet)
            && word.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Visits every admissible word of length `len` in lexicographic order.
    pub fn for_each_word<F: FnMut(&[u8])>(&self, len: usize, mut visit: F) {
        let mut buf = Vec::with_capacity(len);
        self.for_each_extension_inner(&mut buf, len, &mut visit);
    }

    /// Visits every admissible word of length `len` that starts with `prefix`.
    pub fn for_each_extension<F: FnMut(&[u8])>(&self, prefix: &[u8], len: usize, mut visit: F) {
        if prefix.len() > len || !self.is_admissible(prefix) {
            return;
        }
        let mut buf = prefix.to_vec();
        self.for_each_extension_inner(&mut buf, len, &mut visit);
    }

    fn for_each_extension_inner<F: FnMut(&[u8])>(
        &self,
        buf: &mut Vec<u8>,
        len: usize,
        visit: &mut F,
    ) {
        if buf.len() == len {
            visit(buf);
            return;
        }
        let next: &[u8] = match buf.last() {
            None => &[],
            Some(&a) => &self.successors[a as usize],
        };
        if buf.is_empty() {
            for s in 0..self.alphabet as u8 {
                buf.push(s);
                self.for_each_extension_inner(buf, len, visit);
                buf.pop();
            }
        } else {
            for &s in next {
                buf.push(s);
                self.for_each_extension_inner(buf, len, visit);
                buf.pop();
            }
        }
    }

    /// All admissible words of length `len`, lexicographically ordered.
    pub fn words(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        self.for_each_word(len, |w| out.push(Word::from(w)));
        out
    }

    /// Admissible words of length `len` extending `prefix`.
    pub fn extensions(&self, prefix: &[u8], len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        self.for_each_extension(prefix, len, |w| out.push(Word::from(w)));
        out
    }

    /// Number of admissible words of length `len`.
    pub fn word_count(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        let mut ending = vec![1u128; self.alphabet];
        for _ in 1..len {
            let mut next = vec![0u128; self.alphabet];
            for a in 0..self.alphabet {
                for &b in &self.successors[a] {
                    next[b as usize] += ending[a];
                }
            }
            ending = next;
        }
        ending.iter().sum()
    }

    /// Base-`k` index of a word, used for lookup tables over `k^len` slots.
    pub fn word_index(&self, word: &[u8]) -> usize {
        word.iter()
            .fold(0usize, |acc, &s| acc * self.alphabet + s as usize)
    }

    /// An eventually periodic point whose prefix is `word`, following the
    /// smallest successor after the word ends.
    pub fn extend_to_point(&self, word: &[u8]) -> Result<PointRep> {
        if word.is_empty() {
            return self.extend_to_point(&[0]);
        }
        if !self.is_admissible(word) {
            return Err(Error::Inadmissible(Word::from(word).to_string()));
        }
        let mut walk: Vec<u8> = vec![*word.last().unwrap()];
        loop {
            let cur = *walk.last().unwrap();
            let next = self.successors[cur as usize][0];
            if let Some(i) = walk.iter().position(|&s| s == next) {
                // walk[i] == next: the tail walk[i..] repeats forever after `word` reaches walk[i].
                let mut pre = word.to_vec();
                pre.extend_from_slice(&walk[1..]);
                let cycle_start = word.len() - 1 + i;
                let cycle = pre.split_off(cycle_start);
                if cycle.is_empty() {
                    // only happens when i == walk.len(), impossible
                    unreachable!();
                }
                return PointRep::new(self, pre, cycle);
            }
            walk.push(next);
        }
    }

    /// Preimages of `x` under the shift: `a x` for every predecessor `a` of `x_0`.
    pub fn preimages(&self, x: &PointRep) -> Vec<PointRep> {
        self.predecessors(x.symbol(0))
            .iter()
            .map(|&a| {
                let mut pre = vec![a];
                pre.extend_from_slice(&x.preperiod);
                PointRep::new_unchecked(pre, x.cycle.clone())
            })
            .collect()
    }

    /// Higher-block presentation: states are the admissible `k`-words, with
    /// `u -> v` allowed iff `u` and `v` overlap in `k - 1` symbols.
    pub fn higher_block(&self, k: usize) -> Result<(Subshift, Vec<Word>)> {
        if k == 0 {
            return Err(Error::ZeroSteps);
        }
        let states = self.words(k);
        if states.len() > 36 {
            return Err(Error::Invalid(alloc::format!(
                "{k}-block presentation has {} states; at most 36 are supported",
                states.len()
            )));
        }
        let rows: Vec<Vec<bool>> = states
            .iter()
            .map(|u| {
                states
                    .iter()
                    .map(|v| {
                        u.0[1..] == v.0[..k - 1]
                            && self.allows(*u.0.last().unwrap(), *v.0.last().unwrap())
                    })
                    .collect()
            })
            .collect();
        Ok((Subshift::new(states.len(), &rows)?, states))
    }

    /// Strongly connected components of the transition graph that carry a
    /// cycle, i.e. the supports of ergodic Markov measures. Sorted by their
    /// smallest symbol.
    pub fn irreducible_components(&self) -> Vec<Vec<u8>> {
        let k = self.alphabet;
        let mut assigned = vec![false; k];
        let mut comps = Vec::new();
        for a in 0..k as u8 {
            if assigned[a as usize] {
                continue;
            }
            let fwd = reachable(k, a, |s| self.successors(s));
            let bwd = reachable(k, a, |s| self.predecessors(s));
            let comp: Vec<u8> = (0..k as u8)
                .filter(|&b| fwd[b as usize] && bwd[b as usize])
                .collect();
            for &b in &comp {
                assigned[b as usize] = true;
            }
            let has_cycle = comp.len() > 1 || self.allows(a, a);
            if has_cycle {
                comps.push(comp);
            }
        }
        comps
    }

    /// True when the transition graph is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let comps = self.irreducible_components();
        comps.len() == 1 && comps[0].len() == self.alphabet
    }

    /// Irreducible and aperiodic (some power of the matrix is positive).
    pub fn is_mixing(&self) -> bool {
        self.is_irreducible() && period_of(self.alphabet, |a| self.successors(a)) == 1
    }
}

fn reachable<'a, F: Fn(u8) -> &'a [u8]>(k: usize, from: u8, succ: F) -> Vec<bool> {
    let mut seen = vec![false; k];
    let mut stack = vec![from];
    seen[from as usize] = true;
    while let Some(a) = stack.pop() {
        for &b in succ(a) {
            if !seen[b as usize] {
                seen[b as usize] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// Period of a strongly connected graph (gcd of cycle lengths through node 0).
pub(crate) fn period_of<'a, F: Fn(u8) -> &'a [u8]>(k: usize, succ: F) -> usize {
    let mut level = vec![usize::MAX; k];
    level[0] = 0;
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(0u8);
    let mut g = 0usize;
    while let Some(a) = queue.pop_front() {
        for &b in succ(a) {
            if level[b as usize] == usize::MAX {
                level[b as usize] = level[a as usize] + 1;
                queue.push_back(b);
            } else {
                let diff = (level[a as usize] + 1).abs_diff(level[b as usize]);
                g = num_integer::gcd(g, diff);
            }
        }
    }
    g
}

/// An eventually periodic point `preperiod · cycle · cycle · …`, kept in a
/// canonical form (primitive cycle, shortest preperiod) so structural
/// equality is equality of sequences.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRep {
    preperiod: Vec<u8>,
    cycle: Vec<u8>,
}

impl PointRep {
    pub fn new(sys: &Subshift, preperiod: Vec<u8>, cycle: Vec<u8>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        sys.check_symbols(&preperiod)?;
        sys.check_symbols(&cycle)?;
        let mut probe = preperiod.clone();
        probe.extend_from_slice(&cycle);
        probe.push(cycle[0]);
        if !sys.is_admissible(&probe) {
            return Err(Error::Inadmissible(alloc::format!(
                "{}({})",
                Word(preperiod),
                Word(cycle)
            )));
        }
        Ok(Self::new_unchecked(preperiod, cycle))
    }

    /// The purely periodic point `cycle^∞`.
    pub fn periodic(sys: &Subshift, cycle: Vec<u8>) -> Result<Self> {
        PointRep::new(sys, Vec::new(), cycle)
    }

    pub(crate) fn new_unchecked(mut preperiod: Vec<u8>, mut cycle: Vec<u8>) -> Self {
        // primitive root of the cycle
        let p = cycle.len();
        if let Some(d) = (1..p).find(|&d| p % d == 0 && (d..p).all(|i| cycle[i] == cycle[i - d])) {
            cycle.truncate(d);
        }
        while let (Some(&last), Some(&clast)) = (preperiod.last(), cycle.last()) {
            if last != clast {
                break;
            }
            preperiod.pop();
            cycle.rotate_right(1);
        }
        PointRep { preperiod, cycle }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn cycle(&self) -> &[u8] {
        &self.cycle
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.cycle[(i - self.preperiod.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<u8> {
        (0..len).map(|i| self.symbol(i)).collect()
    }

    pub fn shift(&self) -> PointRep {
        if self.preperiod.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            PointRep {
                preperiod: Vec::new(),
                cycle,
            }
        } else {
            PointRep::new_unchecked(self.preperiod[1..].to_vec(), self.cycle.clone())
        }
    }

    /// `T^k x`.
    pub fn shift_by(&self, k: usize) -> PointRep {
        let mut x = self.clone();
        for _ in 0..k {
            x = x.shift();
        }
        x
    }

    /// Number of leading symbols shared with `other`; `None` when the points
    /// are equal. Comparing `max preperiod + lcm(cycle lengths)` symbols
    /// decides equality of eventually periodic sequences.
    pub fn common_prefix_len(&self, other: &PointRep) -> Option<usize> {
        let bound = self.preperiod.len().max(other.preperiod.len())
            + num_integer::lcm(self.cycle.len(), other.cycle.len())
            + 1;
        (0..bound).find(|&i| self.symbol(i) != other.symbol(i))
    }

    /// Shift-metric distance `2^-k`, `k` the first index of disagreement.
    pub fn dist(&self, other: &PointRep) -> Dyadic {
        match self.common_prefix_len(other) {
            None => Dyadic::Zero,
            Some(k) => Dyadic::Pow(k as u32),
        }
    }

    /// Whether `y` lies in the Bowen ball `B_n(self, eps)`, checked orbit
    /// point by orbit point from the metric.
    pub fn in_bowen_ball(&self, y: &PointRep, n: usize, eps: Dyadic) -> bool {
        let mut a = self.clone();
        let mut b = y.clone();
        for _ in 0..n {
            if a.dist(&b) >= eps {
                return false;
            }
            a = a.shift();
            b = b.shift();
        }
        true
    }

    /// Distinct points of the orbit `x, Tx, T^2x, …`.
    pub fn orbit(&self) -> Vec<PointRep> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut x = self.clone();
        while seen.insert(x.clone()) {
            out.push(x.clone());
            x = x.shift();
        }
        out
    }
}

impl fmt::Display for PointRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})",
            Word(self.preperiod.clone()),
            Word(self.cycle.clone())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Subshift {
        Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn split_fixed_point() -> Subshift {
        Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(Subshift::full(2).words(3).len(), 8);
        let g: Vec<String> = golden().words(3).iter().map(|w| w.to_string()).collect();
        assert_eq!(g, ["000", "001", "010", "100", "101"]);
        let r: Vec<String> = split_fixed_point().words(2).iter().map(|w| w.to_string()).collect();
        assert_eq!(r, ["00", "01", "10", "11", "22"]);
        assert_eq!(golden().word_count(3), 5);
        assert_eq!(split_fixed_point().word_count(5), 33);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Subshift::from_matrix(&[vec![1, 1], vec![0, 0]]),
            Err(Error::NoSuccessor(1))
        );
        assert_eq!(
            Subshift::from_matrix(&[vec![1, 0], vec![1, 0]]),
            Err(Error::NoPredecessor(1))
        );
        assert_eq!(
            Subshift::from_matrix(&[vec![1, 0]]),
            Err(Error::BadMatrixShape { expected: 1 })
        );
    }

    #[test]
    fn shift_examples() {
        let s = split_fixed_point();
        let fixed = PointRep::periodic(&s, vec![2]).unwrap();
        assert_eq!(fixed.shift(), fixed);
        let x = PointRep::periodic(&s, vec![0, 1]).unwrap();
        assert_eq!(x.shift(), PointRep::periodic(&s, vec![1, 0]).unwrap());
        assert_eq!(x.shift().shift(), x);
        let y = PointRep::new(&s, vec![0], vec![1]).unwrap();
        assert_eq!(y.shift(), PointRep::periodic(&s, vec![1]).unwrap());
    }

    #[test]
    fn canonical_form() {
        let s = Subshift::full(2);
        let a = PointRep::new(&s, vec![0, 1], vec![0, 1, 0, 1]).unwrap();
        let b = PointRep::periodic(&s, vec![0, 1]).unwrap();
        assert_eq!(a, b);
        assert!(PointRep::new(&split_fixed_point(), vec![2], vec![0]).is_err());
    }

    #[test]
    fn distances() {
        let s = Subshift::full(2);
        let zero = PointRep::periodic(&s, vec![0]).unwrap();
        let one = PointRep::periodic(&s, vec![1]).unwrap();
        let alt = PointRep::periodic(&s, vec![0, 1]).unwrap();
        assert_eq!(zero.dist(&zero), Dyadic::Zero);
        assert_eq!(zero.dist(&one), Dyadic::ONE);
        assert_eq!(alt.dist(&zero), Dyadic::Pow(1));
        assert_eq!(alt.dist(&zero).to_f64(), 0.5);
    }

    #[test]
    fn bowen_resolution_values() {
        assert_eq!(bowen_resolution(1, 0), Ok(1));
        assert_eq!(bowen_resolution(1, 1), Ok(2));
        assert_eq!(bowen_resolution(3, 2), Ok(5));
        assert_eq!(bowen_resolution(0, 2), Err(Error::ZeroSteps));
    }

    #[test]
    fn extension_to_points() {
        let s = Subshift::from_matrix(&[vec![0, 1], vec![0, 1]]).unwrap_err();
        assert_eq!(s, Error::NoPredecessor(0));
        let t = Subshift::from_matrix(&[vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]).unwrap();
        for w in t.words(4) {
            let x = t.extend_to_point(&w.0).unwrap();
            assert_eq!(x.prefix(4), w.0);
        }
        let r = split_fixed_point();
        for w in r.words(3) {
            assert_eq!(r.extend_to_point(&w.0).unwrap().prefix(3), w.0);
        }
    }

    #[test]
    fn preimages_shift_back() {
        let s = golden();
        let x = PointRep::new(&s, vec![1], vec![0]).unwrap();
        let pre = s.preimages(&x);
        assert_eq!(pre.len(), 1);
        assert!(pre.iter().all(|p| p.shift() == x));
    }

    #[test]
    fn components_and_mixing() {
        assert_eq!(split_fixed_point().irreducible_components(), vec![vec![0, 1], vec![2]]);
        assert!(golden().is_mixing());
        let rot = Subshift::from_matrix(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(rot.is_irreducible());
        assert!(!rot.is_mixing());
    }

    #[test]
    fn higher_block_recoding() {
        let (g2, states) = golden().higher_block(2).unwrap();
        assert_eq!(states.len(), 3);
        assert_eq!(g2.word_count(4), golden().word_count(5));
    }
}
