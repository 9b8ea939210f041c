//! Finite covers and partitions by cylinder unions, refinement, joins, the
//! iterated join `U_0^{n-1}` and the assignment family `P*(V)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use fixedbitset::FixedBitSet;

use crate::cylinder::CylSet;
use crate::setcover::{WeightedSetCover, DEFAULT_BUDGET};
use crate::subshift::{Dyadic, Subshift, Word};
use crate::{Error, Result};

/// A finite family of nonempty cylinder unions whose union is `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    elements: Vec<CylSet>,
}

impl Cover {
    pub fn new(sys: &Subshift, elements: Vec<CylSet>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::NotACover("no elements".into()));
        }
        if let Some(i) = elements.iter().position(CylSet::is_empty) {
            return Err(Error::NotACover(alloc::format!("element {i} is empty")));
        }
        let cover = Cover { elements };
        let r = cover.resolution();
        let mut missing = None;
        sys.for_each_word(r, |w| {
            if missing.is_none() && !cover.elements.iter().any(|e| e.contains_prefix(w)) {
                missing = Some(Word::from(w));
            }
        });
        match missing {
            Some(w) => Err(Error::NotACover(alloc::format!(
                "word {w} is in no element"
            ))),
            None => Ok(cover),
        }
    }

    /// Builds a cover from elements given as lists of cylinder words.
    pub fn from_words(sys: &Subshift, elements: &[&[&str]]) -> Result<Self> {
        let sets = elements
            .iter()
            .map(|ws| CylSet::parse(sys, ws))
            .collect::<Result<Vec<_>>>()?;
        Cover::new(sys, sets)
    }

    /// `{X}`.
    pub fn trivial(sys: &Subshift) -> Self {
        Cover {
            elements: vec![CylSet::full(sys)],
        }
    }

    pub fn elements(&self) -> &[CylSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Common resolution: the largest element resolution.
    pub fn resolution(&self) -> usize {
        self.elements
            .iter()
            .map(CylSet::resolution)
            .max()
            .unwrap_or(0)
    }

    /// Whether every element of `self` lies in some element of `other`.
    pub fn is_finer(&self, sys: &Subshift, other: &Cover) -> bool {
        self.elements
            .iter()
            .all(|a| other.elements.iter().any(|b| a.is_subset(sys, b)))
    }

    /// Nonempty pairwise intersections, duplicates removed, in order of first
    /// appearance.
    pub fn join(&self, sys: &Subshift, other: &Cover) -> Cover {
        let mut out: Vec<CylSet> = Vec::new();
        for a in &self.elements {
            for b in &other.elements {
                let c = a.intersection(sys, b);
                if !c.is_empty() && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        Cover { elements: out }
    }

    /// `T^{-1} U`.
    pub fn preimage(&self, sys: &Subshift) -> Cover {
        Cover {
            elements: self.elements.iter().map(|e| e.preimage(sys)).collect(),
        }
    }

    /// Removes repeated elements, keeping first occurrences.
    pub fn dedup(&self) -> Cover {
        let mut out: Vec<CylSet> = Vec::new();
        for e in &self.elements {
            if !out.contains(e) {
                out.push(e.clone());
            }
        }
        Cover { elements: out }
    }

    pub fn is_partition(&self, sys: &Subshift) -> bool {
        let r = self.resolution();
        let mut ok = true;
        sys.for_each_word(r, |w| {
            ok &= self
                .elements
                .iter()
                .filter(|e| e.contains_prefix(w))
                .count()
                == 1
        });
        ok
    }

    /// For every word of length `resolution()`, the elements containing it.
    fn incidence(&self, sys: &Subshift) -> Vec<(Word, FixedBitSet)> {
        let r = self.resolution();
        let mut out = Vec::new();
        sys.for_each_word(r, |w| {
            let mut sig = FixedBitSet::with_capacity(self.elements.len());
            for (i, e) in self.elements.iter().enumerate() {
                if e.contains_prefix(w) {
                    sig.insert(i);
                }
            }
            out.push((Word::from(w), sig));
        });
        out
    }

    /// Atoms of the partition generated by the cover, each with the indices
    /// of the elements containing it, ordered by their smallest word.
    pub fn atoms(&self, sys: &Subshift) -> Vec<(CylSet, Vec<usize>)> {
        let r = self.resolution();
        let mut groups: BTreeMap<Vec<usize>, Vec<Word>> = BTreeMap::new();
        let mut first: Vec<Vec<usize>> = Vec::new();
        for (w, sig) in self.incidence(sys) {
            let key: Vec<usize> = sig.ones().collect();
            let entry = groups.entry(key.clone()).or_default();
            if entry.is_empty() {
                first.push(key);
            }
            entry.push(w);
        }
        first
            .into_iter()
            .map(|key| {
                let words = groups.remove(&key).unwrap_or_default();
                (CylSet::from_level(sys, r, words), key)
            })
            .collect()
    }

    /// The partition generated by the cover.
    pub fn generated_partition(&self, sys: &Subshift) -> Partition {
        Partition {
            cover: Cover {
                elements: self.atoms(sys).into_iter().map(|(a, _)| a).collect(),
            },
        }
    }

    /// Streams `P*(V)`: one partition per assignment of atoms to containing
    /// elements, classes ordered by element index.
    pub fn enumerate_assignments(&self, sys: &Subshift) -> Assignments {
        let atoms = self.atoms(sys);
        let choice = vec![0; atoms.len()];
        Assignments {
            sys: sys.clone(),
            atoms,
            choice,
            done: false,
            slots: self.elements.len(),
        }
    }

    /// `|P*(V)|` = product over atoms of their number of homes.
    pub fn assignment_count(&self, sys: &Subshift) -> u128 {
        self.atoms(sys)
            .iter()
            .map(|(_, h)| h.len() as u128)
            .product()
    }

    /// `N(V)`: the smallest number of elements that still cover `X`.
    pub fn minimal_subcover_count(&self, sys: &Subshift) -> Result<usize> {
        let atoms = self.atoms(sys);
        let mut lists = vec![Vec::new(); self.elements.len()];
        for (a, (_, homes)) in atoms.iter().enumerate() {
            for &h in homes {
                lists[h].push(a);
            }
        }
        let problem = WeightedSetCover::from_lists(atoms.len(), &lists, vec![0.0; lists.len()]);
        Ok(problem.solve(DEFAULT_BUDGET)?.chosen.len())
    }

    /// Largest element diameter.
    pub fn diam(&self, sys: &Subshift) -> Dyadic {
        self.elements
            .iter()
            .map(|e| e.diam(sys))
            .max()
            .unwrap_or(Dyadic::Zero)
    }

    /// Smallest `k` such that every `k`-cylinder lies inside one element; the
    /// Lebesgue number is then `2^-k`, closed balls of radius `2^-k` being
    /// `k`-cylinders.
    pub fn lebesgue_exponent(&self, sys: &Subshift) -> u32 {
        for k in 0..=self.resolution() {
            let mut ok = true;
            sys.for_each_word(k, |w| {
                ok &= self.elements.iter().any(|e| e.contains_cylinder(sys, w))
            });
            if ok {
                return k as u32;
            }
        }
        unreachable!("a cover contains every word at its own resolution")
    }

    pub fn diam_and_lebesgue(&self, sys: &Subshift) -> (Dyadic, Dyadic) {
        (self.diam(sys), Dyadic::Pow(self.lebesgue_exponent(sys)))
    }
}

/// A cover with pairwise disjoint elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cover: Cover,
}

impl Partition {
    pub fn new(sys: &Subshift, elements: Vec<CylSet>) -> Result<Self> {
        let cover = Cover::new(sys, elements).map_err(|e| match e {
            Error::NotACover(m) => Error::NotAPartition(m),
            other => other,
        })?;
        Partition::from_cover(sys, cover)
    }

    pub fn from_cover(sys: &Subshift, cover: Cover) -> Result<Self> {
        if cover.is_partition(sys) {
            Ok(Partition { cover })
        } else {
            Err(Error::NotAPartition("elements overlap".into()))
        }
    }

    /// The partition into `r`-cylinders.
    pub fn cylinders(sys: &Subshift, r: usize) -> Self {
        let elements = sys
            .words(r)
            .into_iter()
            .map(|w| CylSet::from_level(sys, r, vec![w]))
            .collect();
        Partition {
            cover: Cover { elements },
        }
    }

    pub fn as_cover(&self) -> &Cover {
        &self.cover
    }

    pub fn into_cover(self) -> Cover {
        self.cover
    }
}

impl Deref for Partition {
    type Target = Cover;
    fn deref(&self) -> &Cover {
        &self.cover
    }
}

/// Iterator over the members of `P*(V)`.
pub struct Assignments {
    sys: Subshift,
    atoms: Vec<(CylSet, Vec<usize>)>,
    choice: Vec<usize>,
    slots: usize,
    done: bool,
}

impl Iterator for Assignments {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let mut classes: Vec<Option<CylSet>> = vec![None; self.slots];
        for (i, (atom, homes)) in self.atoms.iter().enumerate() {
            let slot = &mut classes[homes[self.choice[i]]];
            *slot = Some(match slot.take() {
                None => atom.clone(),
                Some(c) => c.union(&self.sys, atom),
            });
        }
        // odometer step, last atom fastest
        self.done = true;
        for i in (0..self.atoms.len()).rev() {
            self.choice[i] += 1;
            if self.choice[i] < self.atoms[i].1.len() {
                self.done = false;
                break;
            }
            self.choice[i] = 0;
        }
        let elements = classes.into_iter().flatten().collect();
        Some(Partition {
            cover: Cover { elements },
        })
    }
}

/// `U_0^{n-1}` with elements indexed by their choice sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IteratedJoin {
    n: usize,
    choices: Vec<Vec<usize>>,
    elements: Vec<CylSet>,
}

impl IteratedJoin {
    /// Elements `∩_i T^{-i} U_{c_i}` for all choice sequences `c` of length
    /// `n`, empty intersections dropped, lexicographic in `c`.
    pub fn new(sys: &Subshift, u: &Cover, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSteps);
        }
        let r = u.resolution().max(1);
        let len = n + r - 1;
        let mut by_choice: BTreeMap<Vec<usize>, Vec<Word>> = BTreeMap::new();
        sys.for_each_word(len, |w| {
            let sigs: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    let window = &w[i..i + r];
                    (0..u.len())
                        .filter(|&e| u.elements[e].contains_prefix(window))
                        .collect()
                })
                .collect();
            let mut idx = vec![0usize; n];
            loop {
                let c: Vec<usize> = (0..n).map(|i| sigs[i][idx[i]]).collect();
                by_choice.entry(c).or_default().push(Word::from(w));
                let mut i = n;
                loop {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < sigs[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
        });
        let (choices, elements) = by_choice
            .into_iter()
            .map(|(c, words)| (c, CylSet::from_level(sys, len, words)))
            .unzip();
        Ok(IteratedJoin {
            n,
            choices,
            elements,
        })
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn choices(&self) -> &[Vec<usize>] {
        &self.choices
    }

    pub fn elements(&self) -> &[CylSet] {
        &self.elements
    }

    /// The join as a cover, one element per nonempty choice sequence.
    pub fn to_cover(&self) -> Cover {
        Cover {
            elements: self.elements.clone(),
        }
    }
}

/// `U_0^{n-1}` as a plain cover.
pub fn iterated_join(sys: &Subshift, u: &Cover, n: usize) -> Result<Cover> {
    Ok(IteratedJoin::new(sys, u, n)?.to_cover())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_fixed_point() -> Subshift {
        Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
    }

    fn split_fixed_point_cover(s: &Subshift) -> Cover {
        Cover::from_words(s, &[&["0", "2"], &["1", "2"]]).unwrap()
    }

    #[test]
    fn cover_validation() {
        let s = Subshift::full(2);
        assert!(matches!(
            Cover::from_words(&s, &[&["0"], &["10"]]),
            Err(Error::NotACover(_))
        ));
        assert!(matches!(
            Partition::new(
                &s,
                vec![CylSet::full(&s), CylSet::parse(&s, &["0"]).unwrap()]
            ),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn refinement() {
        let s = Subshift::full(2);
        let one = Partition::cylinders(&s, 1);
        let two = Partition::cylinders(&s, 2);
        assert!(one.is_finer(&s, &one));
        assert!(two.is_finer(&s, &one));
        assert!(!one.is_finer(&s, &two));
    }

    #[test]
    fn joins() {
        let s = Subshift::full(2);
        let one = Partition::cylinders(&s, 1);
        let j = one.join(&s, &one.preimage(&s));
        assert_eq!(j.len(), 4);
        assert!(j.is_partition(&s));
        assert_eq!(one.join(&s, &one), *one.as_cover());
        let r = split_fixed_point();
        let u = split_fixed_point_cover(&r);
        let uu = u.join(&r, &u);
        let expected: Vec<CylSet> = [&["0", "2"][..], &["2"], &["1", "2"]]
            .iter()
            .map(|w| CylSet::parse(&r, w).unwrap())
            .collect();
        assert_eq!(uu.elements(), &expected[..]);
    }

    #[test]
    fn iterated_joins() {
        let s = Subshift::full(2);
        assert_eq!(
            iterated_join(&s, &Partition::cylinders(&s, 1), 3)
                .unwrap()
                .len(),
            8
        );
        let r = split_fixed_point();
        let u = split_fixed_point_cover(&r);
        let j = IteratedJoin::new(&r, &u, 2).unwrap();
        assert_eq!(j.elements().len(), 4);
        let p = crate::PointRep::periodic(&r, vec![2]).unwrap();
        assert!(j.elements().iter().all(|e| e.contains_point(&p)));
        assert_eq!(iterated_join(&r, &u, 1).unwrap(), u);
    }

    #[test]
    fn generated_partitions() {
        let s = Subshift::full(2);
        let one = Partition::cylinders(&s, 1);
        assert_eq!(one.generated_partition(&s), one);
        let r = split_fixed_point();
        let atoms = split_fixed_point_cover(&r).generated_partition(&r);
        assert_eq!(atoms.len(), 3);
        let v = Cover::new(
            &s,
            vec![CylSet::full(&s), CylSet::parse(&s, &["0"]).unwrap()],
        )
        .unwrap();
        assert_eq!(v.generated_partition(&s), one);
    }

    #[test]
    fn assignments() {
        let s = Subshift::full(2);
        let one = Partition::cylinders(&s, 1);
        let all: Vec<Partition> = one.enumerate_assignments(&s).collect();
        assert_eq!(all, vec![one.clone()]);
        let r = split_fixed_point();
        let u = split_fixed_point_cover(&r);
        assert_eq!(u.enumerate_assignments(&r).count(), 2);
        for beta in u.enumerate_assignments(&r) {
            assert!(beta.is_partition(&r));
            assert!(beta.is_finer(&r, &u));
        }
        let v = Cover::from_words(&s, &[&["0", "1"], &["1"]]).unwrap();
        assert_eq!(v.enumerate_assignments(&s).count(), 2);
        assert_eq!(v.assignment_count(&s), 2);
    }

    #[test]
    fn subcover_counts() {
        let s = Subshift::full(2);
        assert_eq!(
            Partition::cylinders(&s, 2).minimal_subcover_count(&s),
            Ok(4)
        );
        let one = Partition::cylinders(&s, 1);
        for n in 1..=4 {
            assert_eq!(
                iterated_join(&s, &one, n)
                    .unwrap()
                    .minimal_subcover_count(&s),
                Ok(1 << n)
            );
        }
        let r = split_fixed_point();
        let u = split_fixed_point_cover(&r);
        for n in 1..=4 {
            assert_eq!(
                iterated_join(&r, &u, n).unwrap().minimal_subcover_count(&r),
                Ok(1 << n)
            );
        }
    }

    #[test]
    fn diameter_and_lebesgue() {
        let s = Subshift::full(2);
        let half = Dyadic::Pow(1);
        assert_eq!(
            Partition::cylinders(&s, 1).diam_and_lebesgue(&s),
            (half, half)
        );
        assert_eq!(
            Cover::trivial(&s).diam_and_lebesgue(&s),
            (Dyadic::ONE, Dyadic::ONE)
        );
        assert_eq!(
            Partition::cylinders(&s, 3).diam_and_lebesgue(&s),
            (Dyadic::Pow(3), Dyadic::Pow(3))
        );
    }
}
