//! Finitely supported measures with exact weights and stationary Markov
//! measures of finite memory.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::cylinder::CylSet;
use crate::rational::to_f64;
use crate::subshift::{PointRep, Subshift, Word};
use crate::{Error, Rational, Result};

/// Anything that assigns masses to cylinders.
pub trait Measure {
    /// `μ([w])`.
    fn cylinder_mass(&self, word: &[u8]) -> f64;

    /// Masses of every admissible word of length `len`.
    fn marginal(&self, sys: &Subshift, len: usize) -> Vec<(Word, f64)> {
        let mut out = Vec::new();
        sys.for_each_word(len, |w| out.push((Word::from(w), self.cylinder_mass(w))));
        out
    }

    /// `μ(A)` for a cylinder union `A`.
    fn measure_of(&self, a: &CylSet) -> f64 {
        a.words().iter().map(|w| self.cylinder_mass(&w.0)).sum()
    }
}

/// A probability measure with finitely many atoms and exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure {
    atoms: Vec<(PointRep, Rational)>,
}

impl AtomicMeasure {
    /// Merges repeated points; weights must be positive and sum to exactly 1.
    pub fn new(atoms: Vec<(PointRep, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if atoms.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidMeasure("weights must be positive".into()));
        }
        let m = Self::merged(atoms);
        let total: Rational = m.atoms.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(alloc::format!(
                "total mass {total} is not 1"
            )));
        }
        Ok(m)
    }

    fn merged(atoms: Vec<(PointRep, Rational)>) -> Self {
        let mut map: BTreeMap<PointRep, Rational> = BTreeMap::new();
        for (x, w) in atoms {
            *map.entry(x).or_insert_with(Rational::zero) += w;
        }
        AtomicMeasure {
            atoms: map.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
        }
    }

    pub fn dirac(x: PointRep) -> Self {
        AtomicMeasure {
            atoms: vec![(x, Rational::one())],
        }
    }

    /// `Δ_x^n = (1/n) Σ_{i<n} δ_{T^i x}`.
    pub fn empirical(x: &PointRep, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSteps);
        }
        let w = Rational::new(1.into(), (n as i64).into());
        let mut atoms = Vec::with_capacity(n);
        let mut y = x.clone();
        for _ in 0..n {
            atoms.push((y.clone(), w.clone()));
            y = y.shift();
        }
        Ok(Self::merged(atoms))
    }

    /// Atoms sorted by point.
    pub fn atoms(&self) -> &[(PointRep, Rational)] {
        &self.atoms
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn weight_of(&self, x: &PointRep) -> Rational {
        match self.atoms.binary_search_by(|(p, _)| p.cmp(x)) {
            Ok(i) => self.atoms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// `T_* μ`.
    pub fn pushforward(&self) -> Self {
        self.map_points(PointRep::shift)
    }

    /// Image under a point map, masses carried along and merged.
    pub fn map_points<F: Fn(&PointRep) -> PointRep>(&self, f: F) -> Self {
        Self::merged(self.atoms.iter().map(|(x, w)| (f(x), w.clone())).collect())
    }

    /// `Σ λ_i μ_i` for positive weights summing to exactly 1.
    pub fn convex_combine(pairs: &[(Rational, AtomicMeasure)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidMeasure("empty combination".into()));
        }
        if pairs.iter().any(|(l, _)| !l.is_positive()) {
            return Err(Error::InvalidMeasure(
                "combination weights must be positive".into(),
            ));
        }
        let total: Rational = pairs.iter().map(|(l, _)| l.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(alloc::format!(
                "combination weights sum to {total}"
            )));
        }
        let atoms = pairs
            .iter()
            .flat_map(|(l, m)| m.atoms.iter().map(move |(x, w)| (x.clone(), l * w)))
            .collect();
        Ok(Self::merged(atoms))
    }

    pub fn cylinder_mass_exact(&self, word: &[u8]) -> Rational {
        self.atoms
            .iter()
            .filter(|(x, _)| (0..word.len()).all(|i| x.symbol(i) == word[i]))
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn measure_of_exact(&self, a: &CylSet) -> Rational {
        self.atoms
            .iter()
            .filter(|(x, _)| a.contains_point(x))
            .map(|(_, w)| w.clone())
            .sum()
    }

    /// Total variation `½ Σ |μ(x) − ν(x)|`.
    pub fn tv(&self, other: &AtomicMeasure) -> Rational {
        let mut diff: BTreeMap<&PointRep, Rational> = BTreeMap::new();
        for (x, w) in &self.atoms {
            *diff.entry(x).or_insert_with(Rational::zero) += w;
        }
        for (x, w) in &other.atoms {
            *diff.entry(x).or_insert_with(Rational::zero) -= w;
        }
        diff.values().map(|d| d.abs()).sum::<Rational>() / Rational::from_integer(2.into())
    }

    /// Wasserstein-1 distance for the shift metric, exact.
    pub fn w1(&self, other: &AtomicMeasure) -> Rational {
        crate::transport::w1(self, other)
    }
}

impl Measure for AtomicMeasure {
    fn cylinder_mass(&self, word: &[u8]) -> f64 {
        to_f64(&self.cylinder_mass_exact(word))
    }

    fn measure_of(&self, a: &CylSet) -> f64 {
        to_f64(&self.measure_of_exact(a))
    }
}

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-12;

/// A stationary Markov measure of memory `k`, presented as a first-order
/// chain on admissible `k`-words.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure {
    sys: Subshift,
    memory: usize,
    states: Vec<Word>,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MarkovMeasure {
    /// Memory-1 chain with the given row-stochastic symbol matrix; the
    /// stationary vector is computed.
    pub fn new(sys: &Subshift, transition: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_memory(sys, 1, transition)
    }

    /// Memory-`k` chain; `transition` is indexed by the admissible `k`-words
    /// in lexicographic order.
    pub fn with_memory(sys: &Subshift, k: usize, transition: Vec<Vec<f64>>) -> Result<Self> {
        let mut m = Self::unsolved(sys, k, transition)?;
        m.stationary = stationary_distribution(&m.transition)?;
        Ok(m)
    }

    /// Chain with a caller-supplied stationary vector (needed when the chain
    /// has several closed classes), checked for stationarity.
    pub fn with_stationary(
        sys: &Subshift,
        k: usize,
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let mut m = Self::unsolved(sys, k, transition)?;
        check_probability(&stationary)?;
        if stationary.len() != m.states.len() {
            return Err(Error::InvalidProbability(
                "stationary vector has the wrong length".into(),
            ));
        }
        let res = residual(&m.transition, &stationary);
        if res > STATIONARY_TOL {
            return Err(Error::InvalidMeasure(alloc::format!(
                "stationarity residual {res:e}"
            )));
        }
        m.stationary = stationary;
        Ok(m)
    }

    fn unsolved(sys: &Subshift, k: usize, transition: Vec<Vec<f64>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroSteps);
        }
        let states = sys.words(k);
        let s = states.len();
        if transition.len() != s || transition.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidMeasure(alloc::format!(
                "transition matrix must be {s}x{s}"
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidMeasure(alloc::format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidMeasure(alloc::format!(
                    "row {i} sums to {sum}"
                )));
            }
            for (j, &p) in row.iter().enumerate() {
                if p > 0.0 && !block_allowed(sys, &states[i], &states[j]) {
                    return Err(Error::InvalidMeasure(alloc::format!(
                        "transition {} -> {} is not allowed",
                        states[i],
                        states[j]
                    )));
                }
            }
        }
        Ok(MarkovMeasure {
            sys: sys.clone(),
            memory: k,
            states,
            transition,
            stationary: Vec::new(),
        })
    }

    /// Independent identically distributed symbols on the full shift.
    pub fn bernoulli(sys: &Subshift, p: &[f64]) -> Result<Self> {
        check_probability(p)?;
        if p.len() != sys.alphabet() {
            return Err(Error::InvalidProbability(
                "length differs from the alphabet".into(),
            ));
        }
        Self::new(sys, vec![p.to_vec(); sys.alphabet()])
    }

    /// Each state moves uniformly to its admissible successors.
    pub fn uniform_kernel(sys: &Subshift, k: usize) -> Result<Self> {
        let states = sys.words(k);
        let rows = states
            .iter()
            .map(|u| {
                let allowed: Vec<bool> = states.iter().map(|v| block_allowed(sys, u, v)).collect();
                let c = allowed.iter().filter(|&&a| a).count() as f64;
                allowed
                    .iter()
                    .map(|&a| if a { 1.0 / c } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::with_memory(sys, k, rows)
    }

    pub fn subshift(&self) -> &Subshift {
        &self.sys
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    fn state_index(&self, w: &[u8]) -> Option<usize> {
        self.states.binary_search_by(|s| s.0[..].cmp(w)).ok()
    }

    /// Entropy rate `−Σ_s π_s Σ_t P_st log P_st` of the chain.
    pub fn entropy_rate(&self) -> f64 {
        let mut h = 0.0;
        for (s, row) in self.transition.iter().enumerate() {
            let pi = self.stationary[s];
            if pi <= 0.0 {
                continue;
            }
            for &p in row {
                if p > 0.0 {
                    h -= pi * p * libm::log(p);
                }
            }
        }
        h
    }

    /// Graph of positive transitions restricted to states of positive mass.
    fn support_successors(&self) -> Vec<Vec<u8>> {
        (0..self.states.len())
            .map(|i| {
                if self.stationary[i] <= 0.0 {
                    return Vec::new();
                }
                (0..self.states.len())
                    .filter(|&j| self.transition[i][j] > 0.0)
                    .map(|j| j as u8)
                    .collect()
            })
            .collect()
    }

    /// Irreducible on the support of its stationary vector, i.e. ergodic.
    pub fn is_ergodic(&self) -> bool {
        let succ = self.support_successors();
        let support: Vec<usize> = (0..self.states.len())
            .filter(|&i| self.stationary[i] > 0.0)
            .collect();
        let Some(&start) = support.first() else {
            return false;
        };
        let reach = |forward: bool| {
            let mut seen = vec![false; self.states.len()];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(a) = stack.pop() {
                for b in 0..self.states.len() {
                    let edge = if forward {
                        succ[a].contains(&(b as u8))
                    } else {
                        succ[b].contains(&(a as u8))
                    };
                    if edge && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen
        };
        let f = reach(true);
        let b = reach(false);
        support.iter().all(|&i| f[i] && b[i])
    }

    /// Ergodic and aperiodic on its support.
    pub fn is_mixing(&self) -> bool {
        if !self.is_ergodic() {
            return false;
        }
        let support: Vec<usize> = (0..self.states.len())
            .filter(|&i| self.stationary[i] > 0.0)
            .collect();
        let pos = |i: usize| support.iter().position(|&s| s == i);
        let succ: Vec<Vec<u8>> = support
            .iter()
            .map(|&i| {
                (0..self.states.len())
                    .filter(|&j| self.transition[i][j] > 0.0)
                    .filter_map(|j| pos(j).map(|p| p as u8))
                    .collect()
            })
            .collect();
        crate::subshift::period_of(support.len(), |a| &succ[a as usize]) == 1
    }

    /// Rows written as text, for reports.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (w, row) in self.states.iter().zip(&self.transition) {
            s.push_str(&alloc::format!("{w}: {row:?}\n"));
        }
        s
    }
}

impl Measure for MarkovMeasure {
    fn cylinder_mass(&self, word: &[u8]) -> f64 {
        let k = self.memory;
        if !self.sys.is_admissible(word) {
            return 0.0;
        }
        if word.len() < k {
            let mut total = 0.0;
            self.sys
                .for_each_extension(word, k, |w| total += self.cylinder_mass(w));
            return total;
        }
        let Some(mut s) = self.state_index(&word[..k]) else {
            return 0.0;
        };
        let mut mass = self.stationary[s];
        for i in 1..=word.len() - k {
            let Some(t) = self.state_index(&word[i..i + k]) else {
                return 0.0;
            };
            mass *= self.transition[s][t];
            s = t;
        }
        mass
    }
}

fn block_allowed(sys: &Subshift, u: &Word, v: &Word) -> bool {
    let k = u.len();
    u.0[1..] == v.0[..k - 1] && sys.allows(u.0[k - 1], v.0[k - 1])
}

fn check_probability(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidProbability(
            "entries must be finite and nonnegative".into(),
        ));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > ROW_TOL {
        return Err(Error::InvalidProbability(alloc::format!(
            "entries sum to {s}"
        )));
    }
    Ok(())
}

fn residual(p: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = pi.len();
    (0..n)
        .map(|j| {
            let v: f64 = (0..n).map(|i| pi[i] * p[i][j]).sum();
            (v - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

/// Stationary vector of a row-stochastic matrix: solves `π(P − I) = 0`,
/// `Σπ = 1` by Gaussian elimination with partial pivoting, falling back to
/// lazy power iteration when the system is singular, then checks the
/// residual.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let pi = solve_stationary(p).unwrap_or_else(|| lazy_power(p));
    let res = residual(p, &pi);
    if res > STATIONARY_TOL || pi.iter().any(|&x| x < -1e-15) {
        return Err(Error::InvalidMeasure(alloc::format!(
            "stationary vector did not converge (residual {res:e})"
        )));
    }
    let mut pi: Vec<f64> = pi.into_iter().map(|x| x.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    for x in pi.iter_mut() {
        *x /= s;
    }
    debug_assert_eq!(pi.len(), n);
    Ok(pi)
}

fn solve_stationary(p: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = p.len();
    // rows of A are equations: column j of (P^T − I), last equation Σπ = 1
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut row: Vec<f64> = (0..n)
                .map(|i| p[i][j] - if i == j { 1.0 } else { 0.0 })
                .collect();
            row.push(0.0);
            row
        })
        .collect();
    a[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let mut pi: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    // one power-iteration sweep to polish rounding
    for _ in 0..2 {
        pi = (0..n)
            .map(|j| (0..n).map(|i| pi[i] * p[i][j]).sum())
            .collect();
    }
    Some(pi)
}

fn lazy_power(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| 0.5 * pi[j] + 0.5 * (0..n).map(|i| pi[i] * p[i][j]).sum::<f64>())
            .collect();
        let delta = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    pi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn split_fixed_point() -> Subshift {
        Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
    }

    #[test]
    fn empirical_measures() {
        let r = split_fixed_point();
        let fixed = PointRep::periodic(&r, vec![2]).unwrap();
        assert_eq!(
            AtomicMeasure::empirical(&fixed, 5).unwrap(),
            AtomicMeasure::dirac(fixed.clone())
        );
        let s = Subshift::full(2);
        let x = PointRep::periodic(&s, vec![0, 1]).unwrap();
        let m2 = AtomicMeasure::empirical(&x, 2).unwrap();
        assert_eq!(m2.weight_of(&x), ratio(1, 2));
        let m3 = AtomicMeasure::empirical(&x, 3).unwrap();
        assert_eq!(m3.weight_of(&x), ratio(2, 3));
        assert_eq!(m3.weight_of(&x.shift()), ratio(1, 3));
        assert_eq!(m2.pushforward(), m2);
    }

    #[test]
    fn convex_combinations() {
        let s = Subshift::full(2);
        let x = PointRep::new(&s, vec![1, 1, 0], vec![0, 1]).unwrap();
        let d = AtomicMeasure::dirac(x.clone());
        assert_eq!(
            AtomicMeasure::convex_combine(&[(ratio(1, 2), d.clone()), (ratio(1, 2), d.clone())])
                .unwrap(),
            d
        );
        let n = 4;
        let pairs: Vec<(Rational, AtomicMeasure)> = (0..n)
            .map(|i| (ratio(1, n as i64), AtomicMeasure::dirac(x.shift_by(i))))
            .collect();
        assert_eq!(
            AtomicMeasure::convex_combine(&pairs).unwrap(),
            AtomicMeasure::empirical(&x, n).unwrap()
        );
        assert!(AtomicMeasure::convex_combine(&[(ratio(1, 3), d)]).is_err());
    }

    #[test]
    fn masses() {
        let r = split_fixed_point();
        let fixed = AtomicMeasure::dirac(PointRep::periodic(&r, vec![2]).unwrap());
        assert_eq!(
            fixed.measure_of_exact(&CylSet::parse(&r, &["2"]).unwrap()),
            Rational::one()
        );
        let s = Subshift::full(2);
        let b = MarkovMeasure::bernoulli(&s, &[0.5, 0.5]).unwrap();
        assert!((b.cylinder_mass(&[0, 1]) - 0.25).abs() < 1e-15);
        let g = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let parry =
            MarkovMeasure::new(&g, vec![vec![1.0 / phi, 1.0 / (phi * phi)], vec![1.0, 0.0]])
                .unwrap();
        assert!((parry.cylinder_mass(&[0]) - phi * phi / (phi * phi + 1.0)).abs() < 1e-12);
        assert!((parry.entropy_rate() - libm::log(phi)).abs() < 1e-12);
    }

    #[test]
    fn total_variation() {
        let s = Subshift::full(2);
        let x = AtomicMeasure::dirac(PointRep::periodic(&s, vec![0]).unwrap());
        let y = AtomicMeasure::dirac(PointRep::periodic(&s, vec![1]).unwrap());
        assert!(x.tv(&x).is_zero());
        assert_eq!(x.tv(&y), Rational::one());
        let half =
            AtomicMeasure::convex_combine(&[(ratio(1, 2), x.clone()), (ratio(1, 2), y)]).unwrap();
        assert_eq!(half.tv(&x), ratio(1, 2));
    }

    #[test]
    fn reducible_chains() {
        let r = split_fixed_point();
        let p = vec![
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let delta = MarkovMeasure::with_stationary(&r, 1, p.clone(), vec![0.0, 0.0, 1.0]).unwrap();
        assert!(delta.is_ergodic());
        assert_eq!(delta.entropy_rate(), 0.0);
        assert!(MarkovMeasure::with_stationary(&r, 1, p.clone(), vec![1.0, 0.0, 0.0]).is_err());
        let mixed = MarkovMeasure::new(&r, p).unwrap();
        assert!(!mixed.is_ergodic());
    }

    #[test]
    fn rejects_bad_rows() {
        let g = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert!(MarkovMeasure::new(&g, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(MarkovMeasure::new(&g, vec![vec![0.6, 0.5], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn higher_memory() {
        let s = Subshift::full(2);
        let m = MarkovMeasure::uniform_kernel(&s, 2).unwrap();
        assert!((m.cylinder_mass(&[0, 1, 1]) - 0.125).abs() < 1e-14);
        assert!((m.cylinder_mass(&[1]) - 0.5).abs() < 1e-14);
        assert!((m.entropy_rate() - libm::log(2.0)).abs() < 1e-14);
        assert!(m.is_mixing());
    }
}
