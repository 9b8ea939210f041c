//! The cover pressures `p_n^1 … p_n^4` and `N(U_0^{n-1})`.

use alloc::vec;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::cover::Cover;
use crate::energy::CompiledEnergy;
use crate::expsum::ExpSum;
use crate::join::{AtomTable, Homes};
use crate::setcover::WeightedSetCover;
use crate::subshift::Subshift;
use crate::{Error, Rational, Result};

use super::{PressureOptions, PressureValue};

/// Atoms and homes of `U_0^{n-1}` for one `n`, shared by all four sums.
#[derive(Clone, Debug)]
pub struct CoverPressure {
    pub table: AtomTable,
    pub homes: Homes,
    budget: u64,
}

/// Optimal assignment for `p1`: each opened home with the atoms placed in it.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentSolution {
    pub value: PressureValue,
    /// `(home, atoms)`, the first atom being the one that opened the class.
    pub classes: Vec<(usize, Vec<usize>)>,
    pub nodes: u64,
}

/// Optimal subcover for `p3`, `p4` or `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubcoverSolution {
    pub value: PressureValue,
    pub homes: Vec<usize>,
    pub nodes: u64,
}

impl CoverPressure {
    pub fn new(
        sys: &Subshift,
        cover: &Cover,
        energy: &CompiledEnergy,
        n: usize,
        opts: &PressureOptions,
    ) -> Result<Self> {
        let table = AtomTable::build(sys, cover, energy, n, opts.resolution_cap)?;
        let homes = table.homes()?;
        Ok(CoverPressure {
            table,
            homes,
            budget: opts.node_budget,
        })
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    /// Largest `sup` over the atoms of a home.
    pub fn home_sup(&self, h: usize) -> &Rational {
        self.homes.members[h]
            .iter()
            .map(|&a| &self.table.atoms[a as usize].sup)
            .max()
            .expect("homes are nonempty")
    }

    /// Smallest `inf` over the atoms of a home.
    pub fn home_inf(&self, h: usize) -> &Rational {
        self.homes.members[h]
            .iter()
            .map(|&a| &self.table.atoms[a as usize].inf)
            .min()
            .expect("homes are nonempty")
    }

    /// `p_n^1`: the minimum over `P*(U_0^{n-1})` of `Σ_classes exp(sup)`.
    ///
    /// Atoms are placed in decreasing order of `sup`, so the first atom of a
    /// class fixes its cost. An atom lying in an already opened home joins it
    /// for free; otherwise one of its homes is opened, and homes whose still
    /// uncovered atoms form a subset of another candidate's are skipped.
    pub fn p1(&self) -> Result<AssignmentSolution> {
        let atoms = &self.table.atoms;
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by(|&a, &b| {
            atoms[b]
                .sup
                .cmp(&atoms[a].sup)
                .then(atoms[a].rep.cmp(&atoms[b].rep))
        });
        let shift = atoms
            .iter()
            .map(|a| a.sup_f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let cost: Vec<f64> = atoms.iter().map(|a| libm::exp(a.sup_f64 - shift)).collect();
        let mut search = AssignSearch {
            homes: &self.homes,
            order: &order,
            cost: &cost,
            covered: FixedBitSet::with_capacity(atoms.len()),
            open: Vec::new(),
            best: f64::INFINITY,
            best_open: Vec::new(),
            nodes: 0,
            budget: self.budget,
        };
        search.run(0, 0.0)?;
        let nodes = search.nodes;
        let opened = search.best_open;

        // place every atom in the first opened home containing it
        let mut classes: Vec<(usize, Vec<usize>)> =
            opened.iter().map(|&(h, a)| (h, vec![a])).collect();
        for &a in &order {
            if opened.iter().any(|&(_, opener)| opener == a) {
                continue;
            }
            let slot = classes
                .iter_mut()
                .find(|(h, _)| self.homes.of_atom[a].binary_search(&(*h as u32)).is_ok())
                .expect("optimal assignment covers every atom");
            slot.1.push(a);
        }
        let mut exact = ExpSum::new();
        for (_, members) in &classes {
            exact.add(atoms[members[0]].sup.clone(), 1);
        }
        Ok(AssignmentSolution {
            value: PressureValue::from_exact(exact),
            classes,
            nodes,
        })
    }

    fn subcover(&self, weight: impl Fn(usize) -> Rational) -> Result<SubcoverSolution> {
        let weights: Vec<Rational> = (0..self.homes.len()).map(&weight).collect();
        let log_cost: Vec<f64> = weights.iter().map(crate::rational::to_f64).collect();
        let lists: Vec<Vec<usize>> = self
            .homes
            .members
            .iter()
            .map(|m| m.iter().map(|&a| a as usize).collect())
            .collect();
        let problem = WeightedSetCover::from_lists(self.table.len(), &lists, log_cost);
        let sol = problem.solve(self.budget)?;
        let mut exact = ExpSum::new();
        for &h in &sol.chosen {
            exact.add(weights[h].clone(), 1);
        }
        Ok(SubcoverSolution {
            value: PressureValue::from_exact(exact),
            homes: sol.chosen,
            nodes: sol.nodes,
        })
    }

    /// `p_n^3`: minimum over subcovers of `Σ exp(sup over the element)`.
    pub fn p3(&self) -> Result<SubcoverSolution> {
        self.subcover(|h| self.home_sup(h).clone())
    }

    /// `p_n^4`: minimum over subcovers of `Σ exp(inf over the element)`.
    pub fn p4(&self) -> Result<SubcoverSolution> {
        self.subcover(|h| self.home_inf(h).clone())
    }

    /// `p_n^2`: infimum over covers finer than `U_0^{n-1}` of
    /// `Σ exp(inf over the element)`.
    ///
    /// Every element of such a cover sits inside an element of `U_0^{n-1}`
    /// whose infimum is no larger, and the chosen containers form a subcover,
    /// so the infimum equals `p_n^4`; a subcover is itself admissible.
    pub fn p2(&self) -> Result<SubcoverSolution> {
        self.p4()
    }

    /// `N(U_0^{n-1})`.
    pub fn subcover_count(&self) -> Result<usize> {
        Ok(self
            .subcover(|_| Rational::from_integer(0.into()))?
            .homes
            .len())
    }
}

struct AssignSearch<'a> {
    homes: &'a Homes,
    order: &'a [usize],
    cost: &'a [f64],
    covered: FixedBitSet,
    /// `(home, opener atom)`.
    open: Vec<(usize, usize)>,
    best: f64,
    best_open: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
}

impl AssignSearch<'_> {
    fn run(&mut self, mut pos: usize, cost: f64) -> Result<()> {
        while pos < self.order.len() && self.covered.contains(self.order[pos]) {
            pos += 1;
        }
        if pos == self.order.len() {
            if cost < self.best {
                self.best = cost;
                self.best_open = self.open.clone();
            }
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudget(self.budget));
        }
        let a = self.order[pos];
        let next_cost = cost + self.cost[a];
        if next_cost >= self.best * (1.0 - 1e-12) {
            return Ok(());
        }
        let candidates = self.candidates(a);
        if candidates.len() > 1 && cost + self.packing_bound(pos) >= self.best * (1.0 - 1e-12) {
            return Ok(());
        }
        for (h, newly) in candidates {
            for &b in &newly {
                self.covered.insert(b);
            }
            self.open.push((h, a));
            let r = self.run(pos + 1, next_cost);
            self.open.pop();
            for &b in &newly {
                self.covered.set(b, false);
            }
            r?;
        }
        Ok(())
    }

    /// Homes of `a` with the atoms they would newly cover, dominated homes
    /// removed, largest gain first.
    fn candidates(&self, a: usize) -> Vec<(usize, Vec<usize>)> {
        let mut cands: Vec<(usize, Vec<usize>)> = self.homes.of_atom[a]
            .iter()
            .map(|&h| {
                let newly = self.homes.members[h as usize]
                    .iter()
                    .map(|&b| b as usize)
                    .filter(|&b| !self.covered.contains(b))
                    .collect();
                (h as usize, newly)
            })
            .collect();
        if cands.len() == 1 {
            return cands;
        }
        cands.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then(x.0.cmp(&y.0)));
        let mut kept: Vec<(usize, Vec<usize>)> = Vec::new();
        for c in cands {
            let dominated = kept.iter().any(|k| is_sorted_subset(&c.1, &k.1));
            if !dominated {
                kept.push(c);
            }
        }
        kept
    }

    /// Uncovered atoms from `pos` on that pairwise share no home each need
    /// a class of their own costing at least their own weight.
    fn packing_bound(&self, pos: usize) -> f64 {
        let mut blocked = FixedBitSet::with_capacity(self.homes.len());
        let mut total = 0.0;
        for &b in &self.order[pos..] {
            if self.covered.contains(b) {
                continue;
            }
            let hs = &self.homes.of_atom[b];
            if hs.iter().all(|&h| !blocked.contains(h as usize)) {
                total += self.cost[b];
                for &h in hs {
                    blocked.insert(h as usize);
                }
            }
        }
        total
    }
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}
