//! Shannon entropy of partitions, entropy of covers and their rates, the
//! topological cover entropy, and the log-sum inequality.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::{Cover, Partition};
use crate::energy::EnergyFunctional;
use crate::expsum::log_sum_exp;
use crate::join::{scan, AtomTable, Homes, SignatureTable};
use crate::measure::Measure;
use crate::pressure::{CoverPressure, PressureOptions};
use crate::subshift::Subshift;
use crate::{Error, Result};

/// Largest number of members of `U*` that `h_plus` will enumerate.
pub const MAX_U_STAR: u128 = 1 << 16;

fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * libm::log(x)
    }
}

/// `H_μ(α) = −Σ μ(A) log μ(A)`.
pub fn shannon<M: Measure + ?Sized>(mu: &M, alpha: &Partition) -> f64 {
    alpha.elements().iter().map(|a| phi(mu.measure_of(a))).sum()
}

/// A finite-`n` sequence `(n, value)` with summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyRateEstimate {
    pub per_n: Vec<(usize, f64)>,
    /// Whether the values are nonincreasing in `n` (up to `1e-12`).
    pub monotone: bool,
    /// Value at the largest `n`.
    pub final_value: f64,
    /// Smallest value over the computed `n`.
    pub inf_value: f64,
    /// `−Σ π_i Σ_j P_ij log P_ij` when it applies, for cross-checking.
    pub closed_form: Option<f64>,
}

impl EntropyRateEstimate {
    pub fn new(per_n: Vec<(usize, f64)>) -> Self {
        let monotone = per_n.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
        let final_value = per_n.last().map_or(0.0, |p| p.1);
        let inf_value = per_n.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        EntropyRateEstimate {
            per_n,
            monotone,
            final_value,
            inf_value,
            closed_form: None,
        }
    }
}

/// Masses of the atoms of `U_0^{n-1}` (in `AtomTable` order) and their homes.
fn atom_masses<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    n: usize,
    opts: &PressureOptions,
) -> Result<(Vec<f64>, Homes)> {
    let zero = EnergyFunctional::zero().compile(sys)?;
    let table = AtomTable::build(sys, cover, &zero, n, opts.resolution_cap)?;
    let sig = SignatureTable::new(sys, cover)?;
    let index: BTreeMap<&[u64], usize> = table
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (&a.signature[..], i))
        .collect();
    let mut masses = vec![0.0; table.len()];
    scan(sys, table.resolution, n, &zero, Some(&sig), |w, _, s| {
        masses[index[s]] += mu.cylinder_mass(w)
    });
    Ok((masses, table.homes()?))
}

/// `H_μ(U_0^{n-1})`: the least Shannon entropy of a partition in
/// `P*(U_0^{n-1})`.
fn min_entropy<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    n: usize,
    opts: &PressureOptions,
) -> Result<f64> {
    let (masses, homes) = atom_masses(sys, mu, cover, n, opts)?;
    MinEntropy::solve(&masses, &homes, opts.node_budget)
}

/// Branch-and-bound over atom-to-home assignments minimising
/// `Σ_classes φ(mass)`.
///
/// Bound: the remaining mass `R` can at best be poured into a single class,
/// `φ` being concave, so `Σ_c φ(M_c) + min(φ(R), min_c φ(M_c + R) − φ(M_c))`
/// never exceeds any completion.
struct MinEntropy<'a> {
    homes: &'a Homes,
    order: Vec<usize>,
    masses: &'a [f64],
    /// Mass still to place after position `i`.
    suffix: Vec<f64>,
    class: Vec<f64>,
    open: Vec<usize>,
    best: f64,
    nodes: u64,
    budget: u64,
}

impl<'a> MinEntropy<'a> {
    fn solve(masses: &'a [f64], homes: &'a Homes, budget: u64) -> Result<f64> {
        let mut order: Vec<usize> = (0..masses.len()).filter(|&a| masses[a] > 0.0).collect();
        order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]).then(a.cmp(&b)));
        let mut suffix = vec![0.0; order.len() + 1];
        for i in (0..order.len()).rev() {
            suffix[i] = suffix[i + 1] + masses[order[i]];
        }
        let mut s = MinEntropy {
            homes,
            order,
            masses,
            suffix,
            class: vec![0.0; homes.len()],
            open: Vec::new(),
            best: f64::INFINITY,
            nodes: 0,
            budget,
        };
        s.best = s.greedy();
        s.run(0, 0.0)?;
        Ok(s.best)
    }

    fn greedy(&self) -> f64 {
        let mut class = vec![0.0f64; self.homes.len()];
        for &a in &self.order {
            let h = *self.homes.of_atom[a]
                .iter()
                .max_by(|&&x, &&y| {
                    class[x as usize]
                        .total_cmp(&class[y as usize])
                        .then(y.cmp(&x))
                })
                .expect("every atom has a home");
            class[h as usize] += self.masses[a];
        }
        class.iter().map(|&m| phi(m)).sum()
    }

    fn run(&mut self, pos: usize, value: f64) -> Result<()> {
        if pos == self.order.len() {
            if value < self.best {
                self.best = value;
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudget(self.budget));
        }
        let rest = self.suffix[pos];
        let mut pour = phi(rest);
        for &h in &self.open {
            let m = self.class[h];
            pour = pour.min(phi(m + rest) - phi(m));
        }
        if value + pour >= self.best - 1e-15 {
            return Ok(());
        }
        let a = self.order[pos];
        let mass = self.masses[a];
        let mut cands: Vec<usize> = self.homes.of_atom[a].iter().map(|&h| h as usize).collect();
        cands.sort_by(|&x, &y| self.class[y].total_cmp(&self.class[x]).then(x.cmp(&y)));
        for h in cands {
            let old = self.class[h];
            let opened = old == 0.0;
            if opened {
                self.open.push(h);
            }
            self.class[h] = old + mass;
            let next = value - phi(old) + phi(old + mass);
            let r = self.run(pos + 1, next);
            self.class[h] = old;
            if opened {
                self.open.pop();
            }
            r?;
        }
        Ok(())
    }
}

/// `(1/n) H_μ(U_0^{n-1})` at a single `n`.
pub fn cover_entropy_at<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    n: usize,
    opts: &PressureOptions,
) -> Result<f64> {
    Ok(min_entropy(sys, mu, cover, n, opts)? / n as f64)
}

/// `H_μ(U)`.
pub fn h_cover_static<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    opts: &PressureOptions,
) -> Result<f64> {
    min_entropy(sys, mu, cover, 1, opts)
}

/// `(1/n) H_μ(α_0^{n-1})` for `n = 1..=n_max`; `μ` should be invariant.
pub fn h_rate<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    alpha: &Partition,
    n_max: usize,
    opts: &PressureOptions,
) -> Result<EntropyRateEstimate> {
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (masses, _) = atom_masses(sys, mu, alpha.as_cover(), n, opts)?;
        per_n.push((n, masses.iter().map(|&m| phi(m)).sum::<f64>() / n as f64));
    }
    Ok(EntropyRateEstimate::new(per_n))
}

/// [`h_rate`] for a Markov measure, with the closed form attached when
/// `α` is the partition into 1-cylinders and the chain has memory 1.
pub fn h_rate_markov(
    mu: &crate::MarkovMeasure,
    alpha: &Partition,
    n_max: usize,
    opts: &PressureOptions,
) -> Result<EntropyRateEstimate> {
    let sys = mu.subshift();
    let mut est = h_rate(sys, mu, alpha, n_max, opts)?;
    if mu.memory() == 1 && *alpha == Partition::cylinders(sys, 1) {
        est.closed_form = Some(mu.entropy_rate());
    }
    Ok(est)
}

/// `(1/n) H_μ(U_0^{n-1})` for `n = 1..=n_max`.
pub fn h_rate_cover<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    n_max: usize,
    opts: &PressureOptions,
) -> Result<EntropyRateEstimate> {
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        per_n.push((n, cover_entropy_at(sys, mu, cover, n, opts)?));
    }
    Ok(EntropyRateEstimate::new(per_n))
}

/// `h_μ^+(T, U)` truncated at `n_max`: the least `h_rate` over the members
/// `{A_1, …, A_d}` of `U*`, `A_i ⊂ U_i`, each evaluated by its smallest
/// value over `n ≤ n_max`. Returns the value and the minimising partition.
pub fn h_plus<M: Measure + ?Sized>(
    sys: &Subshift,
    mu: &M,
    cover: &Cover,
    n_max: usize,
    opts: &PressureOptions,
) -> Result<(f64, Partition)> {
    let count = cover.assignment_count(sys);
    if count > MAX_U_STAR {
        return Err(Error::SearchBudget(MAX_U_STAR as u64));
    }
    let mut seen = alloc::collections::BTreeSet::new();
    let mut best: Option<(f64, Partition)> = None;
    for alpha in cover.enumerate_assignments(sys) {
        let mut key = alpha.elements().to_vec();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        let v = h_rate(sys, mu, &alpha, n_max, opts)?.inf_value;
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, alpha));
        }
    }
    best.ok_or_else(|| Error::NotACover("cover has no atoms".into()))
}

/// `(1/n) log N(U_0^{n-1})` for `n = 1..=n_max`.
pub fn htop_cover(
    sys: &Subshift,
    cover: &Cover,
    n_max: usize,
    opts: &PressureOptions,
) -> Result<EntropyRateEstimate> {
    let zero = EnergyFunctional::zero().compile(sys)?;
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let count = CoverPressure::new(sys, cover, &zero, n, opts)?.subcover_count()?;
        per_n.push((n, libm::log(count as f64) / n as f64));
    }
    Ok(EntropyRateEstimate::new(per_n))
}

/// Both sides of `Σ b_i (a_i − log b_i) ≤ log Σ e^{a_i}` and the maximising
/// weights `e^{a_i} / Σ_j e^{a_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSum {
    pub lhs: f64,
    pub rhs: f64,
    pub gibbs: Vec<f64>,
}

pub fn logsum_bound(a: &[f64], b: &[f64]) -> Result<LogSum> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidProbability(
            "a and b must be nonempty and of equal length".into(),
        ));
    }
    if b.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidProbability(
            "entries must be finite and b nonnegative".into(),
        ));
    }
    let total: f64 = b.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbability(alloc::format!(
            "b sums to {total}"
        )));
    }
    let lhs = a
        .iter()
        .zip(b)
        .map(|(&ai, &bi)| {
            if bi > 0.0 {
                bi * (ai - libm::log(bi))
            } else {
                0.0
            }
        })
        .sum();
    let rhs = log_sum_exp(a.iter().copied());
    let gibbs = a.iter().map(|&ai| libm::exp(ai - rhs)).collect();
    Ok(LogSum { lhs, rhs, gibbs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{AtomicMeasure, MarkovMeasure};
    use crate::subshift::PointRep;

    fn split_fixed_point() -> (Subshift, Cover) {
        let r = Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        let u = Cover::from_words(&r, &[&["0", "2"], &["1", "2"]]).unwrap();
        (r, u)
    }

    #[test]
    fn shannon_basics() {
        let s = Subshift::full(2);
        let alpha = Partition::cylinders(&s, 1);
        let b = MarkovMeasure::bernoulli(&s, &[0.3, 0.7]).unwrap();
        let want = -0.3 * libm::log(0.3) - 0.7 * libm::log(0.7);
        assert!((shannon(&b, &alpha) - want).abs() < 1e-12);
        let uni = MarkovMeasure::bernoulli(&s, &[0.5, 0.5]).unwrap();
        assert!((shannon(&uni, &Partition::cylinders(&s, 3)) - libm::log(8.0)).abs() < 1e-12);
        let dirac = AtomicMeasure::dirac(PointRep::periodic(&s, vec![1]).unwrap());
        assert_eq!(shannon(&dirac, &alpha), 0.0);
    }

    #[test]
    fn split_fixed_point_cover_entropy() {
        let (r, u) = split_fixed_point();
        let opts = PressureOptions::default();
        let fixed = AtomicMeasure::dirac(PointRep::periodic(&r, vec![2]).unwrap());
        assert_eq!(h_cover_static(&r, &fixed, &u, &opts).unwrap(), 0.0);
        let p = vec![
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let ext = MarkovMeasure::with_stationary(&r, 1, p, vec![0.5, 0.5, 0.0]).unwrap();
        assert!((h_cover_static(&r, &ext, &u, &opts).unwrap() - libm::log(2.0)).abs() < 1e-12);
        let est = h_rate_cover(&r, &ext, &u, 4, &opts).unwrap();
        for (_, v) in &est.per_n {
            assert!((v - libm::log(2.0)).abs() < 1e-12);
        }
        let (hp, _) = h_plus(&r, &fixed, &u, 3, &opts).unwrap();
        assert_eq!(hp, 0.0);
    }

    #[test]
    fn static_entropy_matches_enumeration() {
        let s = Subshift::full(3);
        let u = Cover::from_words(&s, &[&["0", "1"], &["1", "2"], &["0", "2"]]).unwrap();
        let mu = MarkovMeasure::bernoulli(&s, &[0.2, 0.3, 0.5]).unwrap();
        let brute = u
            .enumerate_assignments(&s)
            .map(|a| shannon(&mu, &a))
            .fold(f64::INFINITY, f64::min);
        let got = h_cover_static(&s, &mu, &u, &PressureOptions::default()).unwrap();
        assert!((got - brute).abs() < 1e-12);
    }

    #[test]
    fn markov_rates() {
        let g = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let mu = MarkovMeasure::uniform_kernel(&g, 1).unwrap();
        let alpha = Partition::cylinders(&g, 1);
        let est = h_rate_markov(&mu, &alpha, 6, &PressureOptions::default()).unwrap();
        assert!(est.monotone);
        let h = est.closed_form.unwrap();
        // H_n − H_{n−1} is the closed form for a memory-one chain
        for w in est.per_n.windows(2) {
            let (n, v) = w[1];
            let (m, u) = w[0];
            assert!((n as f64 * v - m as f64 * u - h).abs() < 1e-10);
        }
    }

    #[test]
    fn topological_cover_entropy() {
        let g = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let est = htop_cover(
            &g,
            &Partition::cylinders(&g, 1),
            6,
            &PressureOptions::default(),
        )
        .unwrap();
        for &(n, v) in &est.per_n {
            assert!((v - libm::log(g.word_count(n) as f64) / n as f64).abs() < 1e-12);
        }
        let trivial = htop_cover(&g, &Cover::trivial(&g), 3, &PressureOptions::default()).unwrap();
        assert_eq!(trivial.final_value, 0.0);
    }

    #[test]
    fn log_sum() {
        let r = logsum_bound(&[0.0; 4], &[0.25; 4]).unwrap();
        assert!((r.lhs - libm::log(4.0)).abs() < 1e-12 && (r.rhs - r.lhs).abs() < 1e-12);
        let a = [1.0, -2.0, 0.5];
        let g = logsum_bound(&a, &[1.0, 0.0, 0.0]).unwrap().gibbs;
        let eq = logsum_bound(&a, &g).unwrap();
        assert!((eq.lhs - eq.rhs).abs() < 1e-12);
        assert!(logsum_bound(&a, &[0.5, 0.6, -0.1]).is_err());
    }
}
