//! The two greedy constructions used to compare cover pressures with
//! separated-set sums, run on finite data with their certificates checked.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::{Cover, Partition};
use crate::cylinder::CylSet;
use crate::energy::CompiledEnergy;
use crate::expsum::ExpSum;
use crate::join::{scan, EnergyCache, SignatureTable};
use crate::subshift::{Dyadic, PointRep, Subshift, Word};
use crate::{Error, Rational, Result};

use super::{PressureOptions, PressureValue};

/// All words of length `len` with their exact `n·E(Δ)`, heaviest first,
/// ties broken by the word.
fn weighted_words(
    sys: &Subshift,
    energy: &CompiledEnergy,
    n: usize,
    len: usize,
) -> Vec<(Word, Rational)> {
    let mut cache = EnergyCache::new(energy, n);
    let mut out = Vec::new();
    scan(sys, len, n, energy, None, |w, sums, _| {
        out.push((Word::from(w), cache.get(sums).clone()))
    });
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

fn check_cap(len: usize, opts: &PressureOptions) -> Result<()> {
    if len > opts.resolution_cap {
        return Err(Error::ResolutionCap {
            resolution: len,
            cap: opts.resolution_cap,
        });
    }
    Ok(())
}

/// Output of [`greedy_bn`].
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyBn {
    pub points: Vec<PointRep>,
    pub weights: Vec<Rational>,
    pub sum: PressureValue,
    /// Every atom of every `(α_l)_0^{n-1}` holds at most one chosen point.
    pub at_most_one_per_atom: bool,
}

impl GreedyBn {
    /// `Σ_{x ∈ B_n} e^{nE(Δ_x^n)} ≥ p1(n) / (2n)`, compared in log space.
    pub fn certifies(&self, p1: &PressureValue, n: usize) -> bool {
        let rhs = p1.log - libm::log(2.0 * n as f64);
        self.at_most_one_per_atom && self.sum.log >= rhs - 1e-12 * rhs.abs().max(1.0)
    }
}

/// Greedy choice of `B_n`: take the heaviest remaining point, then discard
/// the atom of `(α_l)_0^{n-1}` containing it for every `l < n`, and repeat
/// until nothing is left. The list of partitions is cycled if shorter than
/// `n`. Weights are exact, so every pick attains the supremum of the
/// remainder.
pub fn greedy_bn(
    sys: &Subshift,
    energy: &CompiledEnergy,
    n: usize,
    partitions: &[Partition],
    opts: &PressureOptions,
) -> Result<GreedyBn> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    if partitions.is_empty() {
        return Err(Error::Invalid(
            "greedy_bn needs at least one partition".into(),
        ));
    }
    let r = partitions.iter().map(|p| p.resolution()).max().unwrap_or(0);
    let len = n + r.max(energy.window()).max(1) - 1;
    check_cap(len, opts)?;
    let tables: Vec<SignatureTable> = partitions
        .iter()
        .map(|p| SignatureTable::new(sys, p.as_cover()))
        .collect::<Result<_>>()?;
    let atom_key = |l: usize, w: &[u8]| -> (usize, Vec<u8>) {
        let t = &tables[l % tables.len()];
        // partition elements are disjoint, so each mask has a single bit
        (
            l % tables.len(),
            (0..n)
                .map(|i| t.mask(&w[i..]).trailing_zeros() as u8)
                .collect(),
        )
    };
    let mut removed: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut sum = ExpSum::new();
    let mut chosen_words: Vec<Word> = Vec::new();
    for (w, v) in weighted_words(sys, energy, n, len) {
        if (0..n).any(|l| removed.contains(&atom_key(l, &w.0))) {
            continue;
        }
        for l in 0..n {
            removed.insert(atom_key(l, &w.0));
        }
        points.push(sys.extend_to_point(&w.0)?);
        sum.add(v.clone(), 1);
        weights.push(v);
        chosen_words.push(w);
    }

    let mut counts: BTreeMap<(usize, Vec<u8>), usize> = BTreeMap::new();
    for w in &chosen_words {
        let keys: BTreeSet<_> = (0..n).map(|l| atom_key(l, &w.0)).collect();
        for k in keys {
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    let at_most_one_per_atom = counts.values().all(|&c| c <= 1);
    Ok(GreedyBn {
        points,
        weights,
        sum: PressureValue::from_exact(sum),
        at_most_one_per_atom,
    })
}

/// One class `V_k` of the disjointified cover.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointClass {
    /// Choice sequence of the element `U_{i_k}` of `U_0^{n-1}` it lies in.
    pub choice: Vec<u8>,
    pub set: CylSet,
    /// Largest `n·E(Δ)` over the class.
    pub sup: Rational,
}

/// Checks on the output of [`greedy_disjointify`].
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointCertificate {
    /// The classes are disjoint, cover `X`, and each lies in its element.
    pub disjoint_refinement: bool,
    /// The chosen points are pairwise outside each other's Bowen balls.
    pub separated: bool,
    pub class_sum: ExpSum,
    pub point_sum: ExpSum,
}

impl DisjointCertificate {
    pub fn passes(&self) -> bool {
        self.disjoint_refinement && self.separated && self.class_sum == self.point_sum
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disjointified {
    pub points: Vec<PointRep>,
    pub classes: Vec<DisjointClass>,
    pub certificate: DisjointCertificate,
}

/// The sweep turning `U_0^{n-1}` into a disjoint cover whose sup-sum equals
/// the weight of an `(n, δ/2)`-separated set, `δ = 2^-m`.
///
/// Repeatedly take the heaviest point `x_k` not yet covered, an element
/// `U_{i_k}` of `U_0^{n-1}` containing `B_n(x_k, δ/2)` (the first in choice
/// order), and set `V_k = U_{i_k} \ ∪_{j<k} U_{i_j}`.
pub fn greedy_disjointify(
    sys: &Subshift,
    cover: &Cover,
    energy: &CompiledEnergy,
    n: usize,
    m: u32,
    opts: &PressureOptions,
) -> Result<Disjointified> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    let lebesgue_exp = cover.lebesgue_exponent(sys);
    if m < lebesgue_exp {
        return Err(Error::AboveLebesgue { m, lebesgue_exp });
    }
    let table = SignatureTable::new(sys, cover)?;
    // B_n(x, 2^-(m+1)) is the cylinder on the first n + m + 1 symbols
    let ball = n + m as usize + 1;
    let len = ball.max(n + table.resolution().max(energy.window()) - 1);
    check_cap(len, opts)?;

    let words = weighted_words(sys, energy, n, len);
    let sigs: Vec<Vec<u64>> = words
        .iter()
        .map(|(w, _)| (0..n).map(|i| table.mask(&w.0[i..])).collect())
        .collect();
    // lexicographic positions, so a Bowen cylinder is a contiguous range
    let mut lex: Vec<usize> = (0..words.len()).collect();
    lex.sort_by(|&a, &b| words[a].0.cmp(&words[b].0));
    let mut class_of: Vec<Option<usize>> = vec![None; words.len()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut choices: Vec<Vec<u8>> = Vec::new();

    let in_element = |sig: &[u64], c: &[u8]| sig.iter().zip(c).all(|(&m, &ci)| m >> ci & 1 == 1);
    for k in 0..words.len() {
        if class_of[k].is_some() {
            continue;
        }
        let prefix = &words[k].0 .0[..ball];
        let lo = lex.partition_point(|&i| words[i].0 .0[..ball] < *prefix);
        let hi = lex.partition_point(|&i| words[i].0 .0[..ball] <= *prefix);
        let mut common = vec![u64::MAX; n];
        for &i in &lex[lo..hi] {
            for (c, s) in common.iter_mut().zip(&sigs[i]) {
                *c &= s;
            }
        }
        if common.iter().any(|&c| c == 0) {
            return Err(Error::AboveLebesgue { m, lebesgue_exp });
        }
        let choice: Vec<u8> = common.iter().map(|c| c.trailing_zeros() as u8).collect();
        let class = chosen.len();
        for (i, sig) in sigs.iter().enumerate() {
            if class_of[i].is_none() && in_element(sig, &choice) {
                class_of[i] = Some(class);
            }
        }
        chosen.push(k);
        choices.push(choice);
    }

    let mut members: Vec<Vec<Word>> = vec![Vec::new(); chosen.len()];
    let mut sups: Vec<Option<Rational>> = vec![None; chosen.len()];
    let mut refinement = true;
    for (i, (w, v)) in words.iter().enumerate() {
        let Some(c) = class_of[i] else {
            refinement = false;
            continue;
        };
        refinement &= in_element(&sigs[i], &choices[c]);
        if sups[c].as_ref().is_none_or(|s| v > s) {
            sups[c] = Some(v.clone());
        }
        members[c].push(w.clone());
    }

    let points: Vec<PointRep> = chosen
        .iter()
        .map(|&k| sys.extend_to_point(&words[k].0 .0))
        .collect::<Result<_>>()?;
    let radius = Dyadic::Pow(m + 1);
    let mut separated = true;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if points[a].in_bowen_ball(&points[b], n, radius) {
                separated = false;
            }
        }
    }

    let mut point_sum = ExpSum::new();
    for &k in &chosen {
        point_sum.add(words[k].1.clone(), 1);
    }
    let mut class_sum = ExpSum::new();
    let mut classes = Vec::with_capacity(chosen.len());
    for ((choice, ws), sup) in choices.into_iter().zip(members).zip(sups) {
        let sup = sup.expect("each class holds its own point");
        class_sum.add(sup.clone(), 1);
        classes.push(DisjointClass {
            choice,
            set: CylSet::from_level(sys, len, ws),
            sup,
        });
    }
    Ok(Disjointified {
        points,
        classes,
        certificate: DisjointCertificate {
            disjoint_refinement: refinement,
            separated,
            class_sum,
            point_sum,
        },
    })
}
