//! Pressure sums for one `n` and the per-`n` report with its inequality
//! audit.
//!
//! Every sum is kept both as a floating log and as an exact [`ExpSum`]; the
//! optimisation runs in floating point and the chosen configuration is then
//! re-evaluated exactly.

mod cover_sums;
mod greedy;
mod report;
mod separated;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use cover_sums::{AssignmentSolution, CoverPressure, SubcoverSolution};
pub use greedy::{
    greedy_bn, greedy_disjointify, DisjointCertificate, DisjointClass, Disjointified, GreedyBn,
};
pub use report::{
    assemble, pressure_report, pressure_row, Audit, EpsilonRow, PressureReport, PressureRow,
    RateEstimate, ReportConfig,
};
pub use separated::{extremal_sums, pn_separated, qn_spanning, ExtremalSums, Radius};

use crate::cover::Cover;
use crate::cylinder::CylSet;
use crate::energy::EnergyFunctional;
use crate::expsum::ExpSum;
use crate::join::{scan, working_resolution, SignatureTable, DEFAULT_RESOLUTION_CAP};
use crate::setcover::DEFAULT_BUDGET;
use crate::subshift::{Subshift, Word};
use crate::{Error, Rational, Result};

/// Limits shared by the exact searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PressureOptions {
    /// Longest word length enumerated.
    pub resolution_cap: usize,
    /// Branch-and-bound node budget per search.
    pub node_budget: u64,
}

impl Default for PressureOptions {
    fn default() -> Self {
        PressureOptions {
            resolution_cap: DEFAULT_RESOLUTION_CAP,
            node_budget: DEFAULT_BUDGET,
        }
    }
}

/// A positive sum of exponentials with its natural log.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureValue {
    pub log: f64,
    pub exact: ExpSum,
}

impl PressureValue {
    pub fn from_exact(exact: ExpSum) -> Self {
        PressureValue {
            log: exact.log(),
            exact,
        }
    }

    pub fn rate(&self, n: usize) -> f64 {
        self.log / n as f64
    }
}

/// An atom of the partition generated by `U_0^{n-1}` with the exact range
/// of `n·E(Δ_x^n)` over it and the elements of `U_0^{n-1}` containing it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedAtom {
    pub atom: CylSet,
    pub sup_weight: Rational,
    pub inf_weight: Rational,
    /// Indices into the distinct homes of [`CoverPressure::homes`].
    pub homes: Vec<usize>,
}

/// The atoms of `U_0^{n-1}` as explicit cylinder sets, in order of their
/// smallest word.
pub fn atom_weights(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<Vec<WeightedAtom>> {
    let compiled = energy.compile(sys)?;
    let cp = CoverPressure::new(sys, cover, &compiled, n, opts)?;
    let table = SignatureTable::new(sys, cover)?;
    let index: BTreeMap<&[u64], usize> = cp
        .table
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (&a.signature[..], i))
        .collect();
    let mut words: Vec<Vec<Word>> = alloc::vec![Vec::new(); cp.table.len()];
    let len = working_resolution(cover, &compiled, n);
    scan(sys, len, n, &compiled, Some(&table), |w, _, sig| {
        words[index[sig]].push(Word::from(w))
    });
    Ok(cp
        .table
        .atoms
        .iter()
        .zip(words)
        .enumerate()
        .map(|(i, (a, ws))| WeightedAtom {
            atom: CylSet::from_level(sys, len, ws),
            sup_weight: a.sup.clone(),
            inf_weight: a.inf.clone(),
            homes: cp.homes.of_atom[i].iter().map(|&h| h as usize).collect(),
        })
        .collect())
}

fn prepare(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<CoverPressure> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    CoverPressure::new(sys, cover, &energy.compile(sys)?, n, opts)
}

/// `p_n^1(T, E; U)`.
pub fn p1(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(prepare(sys, cover, energy, n, opts)?.p1()?.value)
}

/// `p_n^2(T, E; U)`.
pub fn p2(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(prepare(sys, cover, energy, n, opts)?.p2()?.value)
}

/// `p_n^3(T, E; U)`.
pub fn p3(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(prepare(sys, cover, energy, n, opts)?.p3()?.value)
}

/// `p_n^4(T, E; U)`.
pub fn p4(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(prepare(sys, cover, energy, n, opts)?.p4()?.value)
}
