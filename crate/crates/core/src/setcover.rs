//! Exact minimum-weight set cover by branch-and-bound.
//!
//! The objective is `Σ_{s chosen} exp(w_s)` for log-weights `w_s`; unit
//! weights (`w_s = 0`) give the minimum subcover cardinality.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::expsum::log_sum_exp;
use crate::{Error, Result};

/// Default node budget for the exact searches in this crate.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct WeightedSetCover {
    universe: usize,
    sets: Vec<FixedBitSet>,
    log_cost: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetCoverSolution {
    /// Indices of the chosen sets, ascending.
    pub chosen: Vec<usize>,
    /// `log Σ exp(w_s)` over the chosen sets.
    pub log_value: f64,
    pub nodes: u64,
}

impl WeightedSetCover {
    pub fn new(universe: usize, sets: Vec<FixedBitSet>, log_cost: Vec<f64>) -> Self {
        assert_eq!(sets.len(), log_cost.len());
        WeightedSetCover {
            universe,
            sets,
            log_cost,
        }
    }

    /// Builds the problem from membership lists.
    pub fn from_lists(universe: usize, lists: &[Vec<usize>], log_cost: Vec<f64>) -> Self {
        let sets = lists
            .iter()
            .map(|l| {
                let mut b = FixedBitSet::with_capacity(universe);
                for &e in l {
                    b.insert(e);
                }
                b
            })
            .collect();
        WeightedSetCover::new(universe, sets, log_cost)
    }

    pub fn solve(&self, budget: u64) -> Result<SetCoverSolution> {
        let u = self.universe;
        if u == 0 {
            return Ok(SetCoverSolution {
                chosen: Vec::new(),
                log_value: f64::NEG_INFINITY,
                nodes: 0,
            });
        }
        let shift = self
            .log_cost
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let cost: Vec<f64> = self
            .log_cost
            .iter()
            .map(|&w| libm::exp(w - shift))
            .collect();

        let mut elem_sets: Vec<Vec<usize>> = vec![Vec::new(); u];
        for (s, set) in self.sets.iter().enumerate() {
            for e in set.ones() {
                elem_sets[e].push(s);
            }
        }
        if let Some(e) = elem_sets.iter().position(Vec::is_empty) {
            return Err(Error::NotACover(alloc::format!(
                "element {e} lies in no set"
            )));
        }

        // sets forced by elements with a single candidate
        let mut chosen: Vec<usize> = Vec::new();
        let mut covered = FixedBitSet::with_capacity(u);
        for list in &elem_sets {
            if list.len() == 1 && !chosen.contains(&list[0]) {
                chosen.push(list[0]);
                covered.union_with(&self.sets[list[0]]);
            }
        }

        // surviving sets restricted to the uncovered elements, with dominated
        // sets removed (a cheaper-or-equal superset always does at least as well)
        let mut candidates: Vec<usize> = (0..self.sets.len())
            .filter(|&s| !chosen.contains(&s) && self.sets[s].ones().any(|e| !covered.contains(e)))
            .collect();
        candidates.sort_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(a.cmp(&b)));
        let restricted: Vec<FixedBitSet> = self
            .sets
            .iter()
            .map(|s| {
                let mut r = s.clone();
                r.difference_with(&covered);
                r
            })
            .collect();
        let mut kept: Vec<usize> = Vec::new();
        if candidates.len() <= 4096 {
            for &s in &candidates {
                let dominated = kept
                    .iter()
                    .any(|&t| cost[t] <= cost[s] && restricted[s].is_subset(&restricted[t]));
                if !dominated {
                    kept.push(s);
                }
            }
        } else {
            kept = candidates;
        }

        // an element whose candidate sets all contain another uncovered
        // element makes that other element redundant
        let mut elem_lists: Vec<Vec<usize>> = vec![Vec::new(); u];
        for &s in &kept {
            for e in restricted[s].ones() {
                elem_lists[e].push(s);
            }
        }
        let mut live: Vec<usize> = (0..u).filter(|&e| !covered.contains(e)).collect();
        live.sort_by_key(|&e| (elem_lists[e].len(), e));
        let mut essential: Vec<usize> = Vec::new();
        if live.len() <= 4096 {
            for &e in &live {
                // lists are sorted ascending, so subset tests are merges
                let implied = essential
                    .iter()
                    .any(|&f| is_sorted_subset(&elem_lists[f], &elem_lists[e]));
                if !implied {
                    essential.push(e);
                }
            }
        } else {
            essential = live;
        }

        let mut search = Search {
            sets: &restricted,
            cost: &cost,
            elem_sets: vec![Vec::new(); u],
            uncovered_in: vec![0; self.sets.len()],
            order: Vec::new(),
            covered,
            banned: FixedBitSet::with_capacity(self.sets.len()),
            selection: Vec::new(),
            best: f64::INFINITY,
            best_selection: Vec::new(),
            nodes: 0,
            budget,
            unit: kept.iter().all(|&s| cost[s] == 1.0),
        };
        let essential_set: FixedBitSet = essential.iter().copied().collect();
        for &e in &essential {
            search.elem_sets[e] = elem_lists[e].clone();
        }
        for &s in &kept {
            search.uncovered_in[s] = restricted[s]
                .ones()
                .filter(|e| essential_set.contains(*e))
                .count();
        }
        let mut order = essential;
        let min_cost = |e: usize| {
            elem_lists[e]
                .iter()
                .map(|&s| cost[s])
                .fold(f64::INFINITY, f64::min)
        };
        // expensive, then rarely covered elements first: this packs more
        // pairwise disjoint candidate lists into the bound
        order.sort_by(|&a, &b| {
            min_cost(b)
                .total_cmp(&min_cost(a))
                .then(elem_lists[a].len().cmp(&elem_lists[b].len()))
                .then(a.cmp(&b))
        });
        search.order = order;
        let remaining = search.order.len();

        if remaining > 0 {
            let (greedy_cost, greedy_sel) = search.greedy();
            search.best = greedy_cost * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            search.best_selection = greedy_sel;
            search.run(0.0, remaining)?;
        } else {
            search.best = 0.0;
        }
        let nodes = search.nodes;
        chosen.extend(search.best_selection);
        chosen.sort_unstable();
        let log_value = log_sum_exp(chosen.iter().map(|&s| self.log_cost[s]));
        Ok(SetCoverSolution {
            chosen,
            log_value,
            nodes,
        })
    }
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

struct Search<'a> {
    sets: &'a [FixedBitSet],
    cost: &'a [f64],
    elem_sets: Vec<Vec<usize>>,
    /// Uncovered essential elements per set.
    uncovered_in: Vec<usize>,
    /// Essential elements in bound order.
    order: Vec<usize>,
    covered: FixedBitSet,
    /// Sets already explored by an earlier sibling branch.
    banned: FixedBitSet,
    selection: Vec<usize>,
    best: f64,
    best_selection: Vec<usize>,
    nodes: u64,
    budget: u64,
    unit: bool,
}

impl Search<'_> {
    fn greedy(&self) -> (f64, Vec<usize>) {
        let mut covered = self.covered.clone();
        let mut sel = Vec::new();
        let mut total = 0.0;
        while self.order.iter().any(|&e| !covered.contains(e)) {
            let mut best: Option<(f64, usize)> = None;
            let mut seen = FixedBitSet::with_capacity(self.sets.len());
            for &e2 in &self.order {
                if covered.contains(e2) {
                    continue;
                }
                for &s in &self.elem_sets[e2] {
                    if seen.put(s) {
                        continue;
                    }
                    let gain = self.sets[s]
                        .ones()
                        .filter(|&x| !covered.contains(x) && !self.elem_sets[x].is_empty())
                        .count();
                    let ratio = self.cost[s] / gain as f64;
                    if best.is_none_or(|(r, _)| ratio < r) {
                        best = Some((ratio, s));
                    }
                }
            }
            let (_, s) = best.expect("feasible instance");
            covered.union_with(&self.sets[s]);
            total += self.cost[s];
            sel.push(s);
        }
        (total, sel)
    }

    /// A feasible solution of the dual LP (`Σ_{e∈s} y_e ≤ c_s`), or
    /// `None` when some element has no live candidate left.
    fn lower_bound(&self) -> Option<f64> {
        let mut open: Vec<(usize, f64, usize)> = Vec::new();
        let mut slack: Vec<f64> = self.cost.to_vec();
        let mut dual = 0.0;
        for &e in &self.order {
            if self.covered.contains(e) {
                continue;
            }
            let mut cheapest = f64::INFINITY;
            let mut ratio = f64::INFINITY;
            let mut live = 0;
            for &s in self.elem_sets[e]
                .iter()
                .filter(|&&s| !self.banned.contains(s))
            {
                cheapest = cheapest.min(self.cost[s]);
                ratio = ratio.min(self.cost[s] / self.uncovered_in[s] as f64);
                live += 1;
            }
            if live == 0 {
                return None;
            }
            for &s in &self.elem_sets[e] {
                slack[s] -= ratio;
            }
            dual += ratio;
            open.push((live, cheapest, e));
        }
        // raise each dual variable while every set through it has slack:
        // once from the proportional start, once from zero with expensive
        // and rarely covered elements first (a greedy packing at least)
        let ascend = |order: &[(usize, f64, usize)], slack: &mut [f64], mut total: f64| {
            for &(_, _, e) in order {
                let live = self.elem_sets[e]
                    .iter()
                    .filter(|&&s| !self.banned.contains(s));
                let inc = live
                    .clone()
                    .map(|&s| slack[s])
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0);
                if inc > 0.0 {
                    total += inc;
                    for &s in live {
                        slack[s] -= inc;
                    }
                }
            }
            total
        };
        open.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let from_proportional = ascend(&open, &mut slack, dual);
        let mut fresh: Vec<f64> = self.cost.to_vec();
        let from_zero = ascend(&open, &mut fresh, 0.0);
        let dual = from_proportional.max(from_zero);
        // with equal costs the optimum is a whole number of sets
        Some(if self.unit {
            libm::ceil(dual - 1e-9)
        } else {
            dual
        })
    }

    fn cover_with(&mut self, s: usize) -> Vec<usize> {
        // only essential elements are tracked; they have nonempty lists
        let newly: Vec<usize> = self.sets[s]
            .ones()
            .filter(|&e| !self.covered.contains(e) && !self.elem_sets[e].is_empty())
            .collect();
        for &e in &newly {
            self.covered.insert(e);
            for &t in &self.elem_sets[e] {
                self.uncovered_in[t] -= 1;
            }
        }
        newly
    }

    fn uncover(&mut self, newly: &[usize]) {
        for &e in newly {
            self.covered.set(e, false);
            for &t in &self.elem_sets[e] {
                self.uncovered_in[t] += 1;
            }
        }
    }

    fn run(&mut self, cost: f64, remaining: usize) -> Result<()> {
        if remaining == 0 {
            if cost < self.best {
                self.best = cost;
                self.best_selection = self.selection.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudget(self.budget));
        }
        match self.lower_bound() {
            Some(lb) if cost + lb < self.best * (1.0 - 1e-12) => {}
            _ => return Ok(()),
        }
        // branch on the uncovered element with the fewest live candidates
        let e = self
            .order
            .iter()
            .copied()
            .filter(|&e| !self.covered.contains(e))
            .min_by_key(|&e| {
                (
                    self.elem_sets[e]
                        .iter()
                        .filter(|&&s| !self.banned.contains(s))
                        .count(),
                    e,
                )
            })
            .expect("remaining > 0");
        let mut branches: Vec<usize> = self.elem_sets[e]
            .iter()
            .copied()
            .filter(|&s| !self.banned.contains(s))
            .collect();
        branches.sort_by(|&a, &b| {
            self.cost[a]
                .total_cmp(&self.cost[b])
                .then(self.uncovered_in[b].cmp(&self.uncovered_in[a]))
                .then(a.cmp(&b))
        });
        // once a set's branch is done, later siblings may assume it unused
        let mut banned_here = Vec::new();
        let mut result = Ok(());
        for s in branches {
            if cost + self.cost[s] < self.best * (1.0 - 1e-12) {
                let newly = self.cover_with(s);
                self.selection.push(s);
                result = self.run(cost + self.cost[s], remaining - newly.len());
                self.selection.pop();
                self.uncover(&newly);
                if result.is_err() {
                    break;
                }
            }
            self.banned.insert(s);
            banned_here.push(s);
        }
        for s in banned_here {
            self.banned.set(s, false);
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(universe: usize, lists: &[Vec<usize>], w: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << lists.len()) {
            let mut cov = vec![false; universe];
            let mut total = 0.0;
            for (s, l) in lists.iter().enumerate() {
                if mask >> s & 1 == 1 {
                    total += libm::exp(w[s]);
                    for &e in l {
                        cov[e] = true;
                    }
                }
            }
            if cov.iter().all(|&c| c) {
                best = best.min(total);
            }
        }
        libm::log(best)
    }

    #[test]
    fn unit_costs_count() {
        let lists = vec![
            vec![0, 1],
            vec![1, 2],
            vec![2, 3],
            vec![0, 3],
            vec![0, 1, 2],
        ];
        let p = WeightedSetCover::from_lists(4, &lists, vec![0.0; 5]);
        let sol = p.solve(DEFAULT_BUDGET).unwrap();
        assert_eq!(sol.chosen.len(), 2);
        assert!((sol.log_value - libm::log(2.0)).abs() < 1e-12);
    }

    #[test]
    fn weighted_matches_brute_force() {
        let lists = vec![
            vec![0, 1, 2],
            vec![0],
            vec![1],
            vec![2],
            vec![2, 3],
            vec![3],
        ];
        let w = vec![3.0, 0.5, 0.2, 0.1, 1.0, 0.0];
        let p = WeightedSetCover::from_lists(4, &lists, w.clone());
        let sol = p.solve(DEFAULT_BUDGET).unwrap();
        assert!((sol.log_value - brute(4, &lists, &w)).abs() < 1e-12);
    }

    #[test]
    fn uncoverable_element() {
        let p = WeightedSetCover::from_lists(2, &[vec![0]], vec![0.0]);
        assert!(matches!(p.solve(10), Err(Error::NotACover(_))));
    }

    #[test]
    fn pseudo_random_instances() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 33) as usize
        };
        for _ in 0..200 {
            let universe = 1 + next() % 7;
            let nsets = 1 + next() % 8;
            let mut lists: Vec<Vec<usize>> = (0..nsets)
                .map(|_| (0..universe).filter(|_| next() % 3 == 0).collect())
                .collect();
            lists.push((0..universe).filter(|_| next() % 2 == 0).collect());
            for e in 0..universe {
                if !lists.iter().any(|l| l.contains(&e)) {
                    let k = next() % lists.len();
                    lists[k].push(e);
                }
            }
            let w: Vec<f64> = lists
                .iter()
                .map(|_| (next() % 1000) as f64 / 250.0 - 2.0)
                .collect();
            let p = WeightedSetCover::from_lists(universe, &lists, w.clone());
            let sol = p.solve(DEFAULT_BUDGET).unwrap();
            assert!((sol.log_value - brute(universe, &lists, &w)).abs() < 1e-9);
        }
    }
}
