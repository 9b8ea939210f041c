//! The measure side of the variational principle: maximise
//! `h_μ(T, U) + E(μ)` over stationary Markov measures of fixed memory.
//!
//! Each ergodic Markov measure lives on one irreducible component, so the
//! search covers ergodic chains one component at a time. Within a component
//! the free parameters are the transition rows; one coordinate move slides a
//! row along the segment between a vertex `e_j` and the row with `j` removed,
//! and a golden-section search picks the best point on it.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{Cover, Partition};
use crate::energy::EnergyFunctional;
use crate::entropy::cover_entropy_at;
use crate::measure::{stationary_distribution, MarkovMeasure};
use crate::pressure::PressureOptions;
use crate::subshift::{Subshift, Word};
use crate::{Error, Result};

/// Rows are kept this far from the boundary of the simplex so that every
/// visited chain stays irreducible on its component.
const EDGE: f64 = 1e-9;
const GOLDEN_TOL: f64 = 1e-10;

/// `h_μ(T, U) + E(μ)` with the entropy term truncated at `n_ent`; the exact
/// entropy rate replaces the truncation when `U` is a cylinder partition,
/// which generates.
pub fn objective(
    mu: &MarkovMeasure,
    cover: &Cover,
    energy: &EnergyFunctional,
    n_ent: usize,
    opts: &PressureOptions,
) -> Result<f64> {
    let (h, e) = objective_terms(mu, cover, energy, n_ent, opts)?;
    Ok(h + e)
}

fn objective_terms(
    mu: &MarkovMeasure,
    cover: &Cover,
    energy: &EnergyFunctional,
    n_ent: usize,
    opts: &PressureOptions,
) -> Result<(f64, f64)> {
    let sys = mu.subshift();
    let h = if is_cylinder_partition(sys, cover) {
        mu.entropy_rate()
    } else {
        cover_entropy_at(sys, mu, cover, n_ent, opts)?
    };
    Ok((h, energy.eval(sys, mu)))
}

fn is_cylinder_partition(sys: &Subshift, cover: &Cover) -> bool {
    let r = cover.resolution();
    if r == 0 {
        return false;
    }
    let mut mine = cover.elements().to_vec();
    mine.sort();
    let mut cyl = Partition::cylinders(sys, r)
        .into_cover()
        .elements()
        .to_vec();
    cyl.sort();
    mine == cyl
}

/// Search settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationalConfig {
    pub memory: usize,
    /// Truncation level of the cover entropy.
    pub n_ent: usize,
    pub starts: usize,
    pub max_sweeps: usize,
    /// Cap on objective evaluations over the whole search.
    pub max_evaluations: u64,
    pub seed: u64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        VariationalConfig {
            memory: 1,
            n_ent: 4,
            starts: 4,
            max_sweeps: 60,
            max_evaluations: 200_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalReport {
    pub best_measure: MarkovMeasure,
    pub best_value: f64,
    pub entropy_term: f64,
    pub energy_term: f64,
    pub memory: usize,
    pub n_ent: usize,
    /// Symbols of the irreducible component carrying the best measure.
    pub component: Vec<u8>,
    pub evaluations: u64,
    pub budget_exhausted: bool,
    /// Trailing-window range of a pressure rate, when supplied.
    pub pressure_window: Option<(f64, f64)>,
    pub abundance_note: String,
}

impl VariationalReport {
    /// Attaches the `[liminf, limsup]` window of a pressure rate.
    pub fn with_pressure_window(mut self, lo: f64, hi: f64) -> Self {
        self.pressure_window = Some((lo, hi));
        self
    }

    /// Upper end of the pressure window minus the best value.
    pub fn gap(&self) -> Option<f64> {
        self.pressure_window.map(|(_, hi)| hi - self.best_value)
    }
}

/// Memory-`k` states and the chains supported on one component.
struct Chains {
    sys: Subshift,
    k: usize,
    states: Vec<Word>,
    /// Allowed successor states of each state.
    succ: Vec<Vec<usize>>,
}

impl Chains {
    fn new(sys: &Subshift, k: usize) -> Self {
        let states = sys.words(k);
        let succ = states
            .iter()
            .map(|u| {
                (0..states.len())
                    .filter(|&j| {
                        u.0[1..] == states[j].0[..k - 1]
                            && sys.allows(u.0[k - 1], states[j].0[k - 1])
                    })
                    .collect()
            })
            .collect();
        Chains {
            sys: sys.clone(),
            k,
            states,
            succ,
        }
    }

    /// Component states and, per state, its successors inside the component.
    fn component(&self, comp: &[u8]) -> (Vec<usize>, Vec<Vec<usize>>) {
        let inside: Vec<bool> = self
            .states
            .iter()
            .map(|w| w.0.iter().all(|s| comp.contains(s)))
            .collect();
        let members: Vec<usize> = (0..self.states.len()).filter(|&i| inside[i]).collect();
        let succ = members
            .iter()
            .map(|&i| {
                self.succ[i]
                    .iter()
                    .copied()
                    .filter(|&j| inside[j])
                    .collect()
            })
            .collect();
        (members, succ)
    }

    /// The chain moving by `rows` on the component and uniformly elsewhere,
    /// with its stationary vector supported on the component.
    fn build(
        &self,
        members: &[usize],
        succ: &[Vec<usize>],
        rows: &[Vec<f64>],
    ) -> Result<MarkovMeasure> {
        let s = self.states.len();
        let mut p = vec![vec![0.0; s]; s];
        for (i, out) in self.succ.iter().enumerate() {
            for &j in out {
                p[i][j] = 1.0 / out.len() as f64;
            }
        }
        let local = |j: usize| {
            members
                .binary_search(&j)
                .expect("successor inside the component")
        };
        let mut sub = vec![vec![0.0; members.len()]; members.len()];
        for (a, &i) in members.iter().enumerate() {
            p[i] = vec![0.0; s];
            for (&j, &q) in succ[a].iter().zip(&rows[a]) {
                p[i][j] = q;
                sub[a][local(j)] = q;
            }
        }
        let pi_sub = stationary_distribution(&sub)?;
        let mut pi = vec![0.0; s];
        for (a, &i) in members.iter().enumerate() {
            pi[i] = pi_sub[a];
        }
        MarkovMeasure::with_stationary(&self.sys, self.k, p, pi)
    }
}

fn uniform_rows(succ: &[Vec<usize>]) -> Vec<Vec<f64>> {
    succ.iter()
        .map(|out| vec![1.0 / out.len() as f64; out.len()])
        .collect()
}

/// `row` with coordinate `j` set to `t` and the others rescaled to fill
/// `1 − t`.
fn slide(row: &[f64], j: usize, t: f64) -> Vec<f64> {
    let rest: f64 = row
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &x)| x)
        .sum();
    let others = row.len() - 1;
    row.iter()
        .enumerate()
        .map(|(i, &x)| {
            if i == j {
                t
            } else if rest > 0.0 {
                (1.0 - t) * x / rest
            } else {
                (1.0 - t) / others as f64
            }
        })
        .collect()
}

/// Golden-section maximisation of a unimodal-ish `f` on `[lo, hi]`.
fn golden_max<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

struct Search<'a> {
    chains: &'a Chains,
    cover: &'a Cover,
    energy: &'a EnergyFunctional,
    n_ent: usize,
    opts: &'a PressureOptions,
    evaluations: u64,
    max_evaluations: u64,
}

impl Search<'_> {
    fn value(&mut self, members: &[usize], succ: &[Vec<usize>], rows: &[Vec<f64>]) -> Result<f64> {
        if self.evaluations >= self.max_evaluations {
            return Err(Error::SearchBudget(self.max_evaluations));
        }
        self.evaluations += 1;
        let mu = self.chains.build(members, succ, rows)?;
        objective(&mu, self.cover, self.energy, self.n_ent, self.opts)
    }

    /// Coordinate ascent from `rows`; returns the final rows and value, and
    /// whether the evaluation budget ran out.
    fn ascend(
        &mut self,
        members: &[usize],
        succ: &[Vec<usize>],
        mut rows: Vec<Vec<f64>>,
        sweeps: usize,
    ) -> Result<(Vec<Vec<f64>>, f64, bool)> {
        let mut best = self.value(members, succ, &rows)?;
        for _ in 0..sweeps {
            let before = best;
            for a in 0..rows.len() {
                if rows[a].len() < 2 {
                    continue;
                }
                for j in 0..rows[a].len() {
                    let base = rows.clone();
                    let found = golden_max(
                        |t| {
                            let mut trial = base.clone();
                            trial[a] = slide(&base[a], j, t);
                            self.value(members, succ, &trial)
                        },
                        EDGE,
                        1.0 - EDGE,
                    );
                    match found {
                        Ok((t, v)) if v > best => {
                            rows[a] = slide(&rows[a], j, t);
                            best = v;
                        }
                        Ok(_) => {}
                        Err(Error::SearchBudget(_)) => return Ok((rows, best, true)),
                        Err(e) => return Err(e),
                    }
                }
            }
            if best - before < 1e-13 {
                break;
            }
        }
        Ok((rows, best, false))
    }
}

/// Multi-start coordinate ascent over memory-`k` Markov measures on every
/// irreducible component; returns the best measure found, a lower bound for
/// the supremum.
pub fn optimize(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    config: &VariationalConfig,
    opts: &PressureOptions,
) -> Result<VariationalReport> {
    if config.memory == 0 {
        return Err(Error::ZeroSteps);
    }
    let chains = Chains::new(sys, config.memory);
    let mut search = Search {
        chains: &chains,
        cover,
        energy,
        n_ent: config.n_ent.max(1),
        opts,
        evaluations: 0,
        max_evaluations: config.max_evaluations,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(f64, Vec<u8>, Vec<usize>, Vec<Vec<usize>>, Vec<Vec<f64>>)> = None;
    let mut exhausted = false;
    'components: for comp in sys.irreducible_components() {
        let (members, succ) = chains.component(&comp);
        let free = succ.iter().any(|out| out.len() > 1);
        let starts = if free { config.starts.max(1) } else { 1 };
        for start in 0..starts {
            let rows = if start == 0 {
                uniform_rows(&succ)
            } else {
                succ.iter()
                    .map(|out| {
                        let raw: Vec<f64> =
                            (0..out.len()).map(|_| 0.05 + rng.random::<f64>()).collect();
                        let total: f64 = raw.iter().sum();
                        raw.into_iter().map(|x| x / total).collect()
                    })
                    .collect()
            };
            let (rows, value, out) = if free {
                search.ascend(&members, &succ, rows, config.max_sweeps)?
            } else {
                let v = search.value(&members, &succ, &rows)?;
                (rows, v, false)
            };
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, comp.clone(), members.clone(), succ.clone(), rows));
            }
            if out {
                exhausted = true;
                break 'components;
            }
        }
    }
    let (_, component, members, succ, rows) =
        best.ok_or_else(|| Error::Invalid("subshift has no invariant measure".into()))?;
    let best_measure = chains.build(&members, &succ, &rows)?;
    let (entropy_term, energy_term) =
        objective_terms(&best_measure, cover, energy, search.n_ent, opts)?;
    Ok(VariationalReport {
        best_measure,
        best_value: entropy_term + energy_term,
        entropy_term,
        energy_term,
        memory: config.memory,
        n_ent: search.n_ent,
        component,
        evaluations: search.evaluations,
        budget_exhausted: exhausted,
        pressure_window: None,
        abundance_note: abundance_note(sys),
    })
}

fn abundance_note(sys: &Subshift) -> String {
    if sys.is_mixing() {
        "mixing SFT: every Markov measure is an objective-limit of ergodic Markov measures, so abundance holds structurally".into()
    } else {
        "SFT is not mixing: abundance of ergodic measures is an unverified hypothesis; ergodic witnesses are searched per component".into()
    }
}

/// Outcome for one candidate of [`abundance_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct AbundanceResult {
    pub candidate_value: f64,
    pub witness: MarkovMeasure,
    pub witness_value: f64,
    /// `witness_value > candidate_value − ε`.
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbundanceReport {
    /// The subshift is mixing, which settles abundance without search.
    pub structural: bool,
    pub note: String,
    pub results: Vec<AbundanceResult>,
}

/// Period of a strongly connected digraph given by successor lists.
fn period(succ: &[Vec<usize>]) -> usize {
    let mut level = vec![usize::MAX; succ.len()];
    let mut queue = alloc::collections::VecDeque::from([0usize]);
    level[0] = 0;
    let mut g = 0;
    while let Some(a) = queue.pop_front() {
        for &b in &succ[a] {
            if level[b] == usize::MAX {
                level[b] = level[a] + 1;
                queue.push_back(b);
            } else {
                g = num_integer::gcd(g, (level[a] + 1).abs_diff(level[b]));
            }
        }
    }
    g
}

/// For each candidate, looks for an ergodic and aperiodic Markov measure
/// whose objective is within `ε` of the candidate's, by mixing the
/// candidate's rows (restricted to each aperiodic component) with the
/// uniform kernel.
pub fn abundance_check(
    sys: &Subshift,
    candidates: &[MarkovMeasure],
    cover: &Cover,
    energy: &EnergyFunctional,
    eps: f64,
    n_ent: usize,
    opts: &PressureOptions,
) -> Result<AbundanceReport> {
    let mut results = Vec::with_capacity(candidates.len());
    for mu in candidates {
        let candidate_value = objective(mu, cover, energy, n_ent, opts)?;
        if mu.is_mixing() {
            results.push(AbundanceResult {
                candidate_value,
                witness: mu.clone(),
                witness_value: candidate_value,
                passed: true,
            });
            continue;
        }
        let chains = Chains::new(mu.subshift(), mu.memory());
        let mut best: Option<(f64, MarkovMeasure)> = None;
        for comp in mu.subshift().irreducible_components() {
            let (members, succ) = chains.component(&comp);
            let local: Vec<Vec<usize>> = succ
                .iter()
                .map(|out| {
                    out.iter()
                        .map(|j| members.binary_search(j).unwrap())
                        .collect()
                })
                .collect();
            if period(&local) != 1 {
                continue;
            }
            let base: Vec<Vec<f64>> = members
                .iter()
                .zip(&succ)
                .map(|(&i, out)| {
                    let raw: Vec<f64> = out.iter().map(|&j| mu.transition()[i][j]).collect();
                    let total: f64 = raw.iter().sum();
                    if total > 0.0 {
                        raw.into_iter().map(|x| x / total).collect()
                    } else {
                        vec![1.0 / out.len() as f64; out.len()]
                    }
                })
                .collect();
            for t in [0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
                let rows: Vec<Vec<f64>> = base
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&x| (1.0 - t) * x + t / row.len() as f64)
                            .collect()
                    })
                    .collect();
                let nu = chains.build(&members, &succ, &rows)?;
                let v = objective(&nu, cover, energy, n_ent, opts)?;
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, nu));
                }
            }
        }
        let (witness_value, witness) =
            best.ok_or_else(|| Error::Invalid("no aperiodic component carries a witness".into()))?;
        results.push(AbundanceResult {
            candidate_value,
            witness,
            witness_value,
            passed: witness_value > candidate_value - eps,
        });
    }
    Ok(AbundanceReport {
        structural: sys.is_mixing(),
        note: abundance_note(sys),
        results,
    })
}
