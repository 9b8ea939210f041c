//! Clopen subsets of a subshift written as finite unions of cylinders.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::subshift::{Dyadic, PointRep, Subshift, Word};
use crate::{Error, Result};

/// A finite union of cylinders `[w]`, all words of one length `resolution`.
///
/// Always stored in canonical form: the smallest resolution at which the set
/// is a union of cylinders, words sorted. `X` itself is the empty word at
/// resolution 0, the empty set has no words at resolution 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CylSet {
    resolution: usize,
    words: Vec<Word>,
}

impl CylSet {
    /// Builds the union of the cylinders of `words`, which may have mixed
    /// lengths; shorter words are padded with all admissible extensions.
    pub fn new(sys: &Subshift, words: &[Word]) -> Result<Self> {
        for w in words {
            sys.check_symbols(&w.0)?;
            if !sys.is_admissible(&w.0) {
                return Err(Error::Inadmissible(w.to_string()));
            }
        }
        let r = words.iter().map(Word::len).max().unwrap_or(0);
        let mut lifted = Vec::new();
        for w in words {
            sys.for_each_extension(&w.0, r, |e| lifted.push(Word::from(e)));
        }
        Ok(Self::from_level(sys, r, lifted))
    }

    /// Parses words written as digit strings.
    pub fn parse(sys: &Subshift, words: &[&str]) -> Result<Self> {
        let ws = words
            .iter()
            .map(|w| Word::parse(w))
            .collect::<Result<Vec<_>>>()?;
        CylSet::new(sys, &ws)
    }

    /// Union of the given admissible words, all of length `r`.
    pub(crate) fn from_level(sys: &Subshift, r: usize, mut words: Vec<Word>) -> Self {
        debug_assert!(words.iter().all(|w| w.len() == r));
        words.sort();
        words.dedup();
        let mut set = CylSet {
            resolution: r,
            words,
        };
        set.canonicalize(sys);
        set
    }

    pub fn full(_sys: &Subshift) -> Self {
        CylSet {
            resolution: 0,
            words: vec![Word::default()],
        }
    }

    pub fn empty() -> Self {
        CylSet {
            resolution: 0,
            words: Vec::new(),
        }
    }

    /// The cylinder `[w]`.
    pub fn cylinder(sys: &Subshift, w: &[u8]) -> Result<Self> {
        CylSet::new(sys, &[Word::from(w)])
    }

    fn canonicalize(&mut self, sys: &Subshift) {
        if self.words.is_empty() {
            self.resolution = 0;
            return;
        }
        let r = self.resolution;
        for k in 0..r {
            let mut prefixes: Vec<&[u8]> = self.words.iter().map(|w| &w.0[..k]).collect();
            prefixes.dedup();
            let mut total = 0usize;
            let mut ok = true;
            for p in &prefixes {
                let mut count = 0usize;
                sys.for_each_extension(p, r, |_| count += 1);
                total += count;
                if total > self.words.len() {
                    ok = false;
                    break;
                }
            }
            if ok && total == self.words.len() {
                self.words = prefixes.into_iter().map(Word::from).collect();
                self.resolution = k;
                return;
            }
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.resolution == 0 && !self.words.is_empty()
    }

    /// The admissible words of length `r >= resolution` whose cylinders make
    /// up this set.
    pub fn lift(&self, sys: &Subshift, r: usize) -> Vec<Word> {
        assert!(
            r >= self.resolution,
            "cannot lift below the canonical resolution"
        );
        let mut out = Vec::new();
        for w in &self.words {
            sys.for_each_extension(&w.0, r, |e| out.push(Word::from(e)));
        }
        out
    }

    /// Membership of any point whose prefix is `word`; `word` must be at
    /// least `resolution` long.
    pub fn contains_prefix(&self, word: &[u8]) -> bool {
        word.len() >= self.resolution
            && self
                .words
                .binary_search_by(|w| w.0[..].cmp(&word[..self.resolution]))
                .is_ok()
    }

    pub fn contains_point(&self, x: &PointRep) -> bool {
        self.contains_prefix(&x.prefix(self.resolution))
    }

    /// Whether the cylinder `[w]` lies inside this set.
    pub fn contains_cylinder(&self, sys: &Subshift, w: &[u8]) -> bool {
        if w.len() >= self.resolution {
            return self.contains_prefix(w);
        }
        let mut all = true;
        sys.for_each_extension(w, self.resolution, |e| all &= self.contains_prefix(e));
        all
    }

    fn binary(&self, sys: &Subshift, other: &CylSet, keep: impl Fn(bool, bool) -> bool) -> CylSet {
        let r = self.resolution.max(other.resolution);
        let mut out = Vec::new();
        sys.for_each_word(r, |w| {
            if keep(self.contains_prefix(w), other.contains_prefix(w)) {
                out.push(Word::from(w));
            }
        });
        CylSet::from_level(sys, r, out)
    }

    pub fn union(&self, sys: &Subshift, other: &CylSet) -> CylSet {
        self.binary(sys, other, |a, b| a || b)
    }

    pub fn intersection(&self, sys: &Subshift, other: &CylSet) -> CylSet {
        if self.is_empty() || other.is_empty() {
            return CylSet::empty();
        }
        // lift the coarser side onto the finer one's words
        let (fine, coarse) = if self.resolution >= other.resolution {
            (self, other)
        } else {
            (other, self)
        };
        let words: Vec<Word> = fine
            .words
            .iter()
            .filter(|w| coarse.contains_prefix(&w.0))
            .cloned()
            .collect();
        CylSet::from_level(sys, fine.resolution, words)
    }

    pub fn difference(&self, sys: &Subshift, other: &CylSet) -> CylSet {
        self.binary(sys, other, |a, b| a && !b)
    }

    pub fn complement(&self, sys: &Subshift) -> CylSet {
        CylSet::full(sys).difference(sys, self)
    }

    pub fn is_subset(&self, sys: &Subshift, other: &CylSet) -> bool {
        self.words
            .iter()
            .all(|w| other.contains_cylinder(sys, &w.0))
    }

    pub fn intersects(&self, sys: &Subshift, other: &CylSet) -> bool {
        !self.intersection(sys, other).is_empty()
    }

    /// `T^{-1} A`: points whose shift lies in `A`.
    pub fn preimage(&self, sys: &Subshift) -> CylSet {
        if self.resolution == 0 {
            return self.clone();
        }
        let mut out = Vec::new();
        for w in &self.words {
            for &a in sys.predecessors(w.0[0]) {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(a);
                v.extend_from_slice(&w.0);
                out.push(Word(v));
            }
        }
        CylSet::from_level(sys, self.resolution + 1, out)
    }

    /// Largest distance between two of its points; zero for empty sets and
    /// singletons.
    pub fn diam(&self, sys: &Subshift) -> Dyadic {
        match self.words.len() {
            0 => Dyadic::Zero,
            1 => {
                let w = &self.words[0].0;
                // every point of [w] shares w and then any forced continuation
                let mut cur = match w.last() {
                    Some(&c) => c,
                    None => {
                        if sys.alphabet() > 1 {
                            return Dyadic::ONE;
                        }
                        0
                    }
                };
                let mut agreed = w.len().max(1);
                let mut seen = vec![false; sys.alphabet()];
                loop {
                    let succ = sys.successors(cur);
                    if succ.len() > 1 {
                        return Dyadic::Pow(agreed as u32);
                    }
                    if seen[cur as usize] {
                        return Dyadic::Zero;
                    }
                    seen[cur as usize] = true;
                    cur = succ[0];
                    agreed += 1;
                }
            }
            _ => {
                let first = &self.words[0].0;
                let last = &self.words[self.words.len() - 1].0;
                let common = first.iter().zip(last).take_while(|(a, b)| a == b).count();
                Dyadic::Pow(common as u32)
            }
        }
    }

    /// Formats as `[w1]∪[w2]…`.
    pub fn display(&self) -> CylSetDisplay<'_> {
        CylSetDisplay(self)
    }
}

pub struct CylSetDisplay<'a>(&'a CylSet);

impl fmt::Display for CylSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.words.is_empty() {
            return write!(f, "∅");
        }
        if self.0.resolution == 0 {
            return write!(f, "X");
        }
        for (i, w) in self.0.words.iter().enumerate() {
            if i > 0 {
                write!(f, "∪")?;
            }
            write!(f, "[{w}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full2() -> Subshift {
        Subshift::full(2)
    }

    #[test]
    fn canonical_resolution() {
        let s = full2();
        let a = CylSet::parse(&s, &["00", "01"]).unwrap();
        assert_eq!(a, CylSet::parse(&s, &["0"]).unwrap());
        assert_eq!(a.resolution(), 1);
        let all = CylSet::parse(&s, &["0", "10", "11"]).unwrap();
        assert!(all.is_full());
        let golden = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        // [1] = [10] in the golden mean shift
        assert_eq!(CylSet::parse(&golden, &["10"]).unwrap().resolution(), 1);
    }

    #[test]
    fn boolean_operations() {
        let s = full2();
        let a = CylSet::parse(&s, &["0"]).unwrap();
        let b = CylSet::parse(&s, &["01", "11"]).unwrap();
        assert_eq!(a.intersection(&s, &b), CylSet::parse(&s, &["01"]).unwrap());
        assert_eq!(a.union(&s, &b), CylSet::parse(&s, &["0", "11"]).unwrap());
        assert_eq!(a.complement(&s), CylSet::parse(&s, &["1"]).unwrap());
        assert!(CylSet::parse(&s, &["01"]).unwrap().is_subset(&s, &a));
        assert!(!a.is_subset(&s, &b));
    }

    #[test]
    fn preimage_of_cylinder() {
        let s = full2();
        let a = CylSet::parse(&s, &["1"]).unwrap();
        assert_eq!(a.preimage(&s), CylSet::parse(&s, &["01", "11"]).unwrap());
        let r = Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(
            CylSet::parse(&r, &["2"]).unwrap().preimage(&r),
            CylSet::parse(&r, &["2"]).unwrap()
        );
    }

    #[test]
    fn diameters() {
        let s = full2();
        assert_eq!(CylSet::parse(&s, &["0"]).unwrap().diam(&s), Dyadic::Pow(1));
        assert_eq!(CylSet::full(&s).diam(&s), Dyadic::ONE);
        assert_eq!(
            CylSet::parse(&s, &["010"]).unwrap().diam(&s),
            Dyadic::Pow(3)
        );
        let r = Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(CylSet::parse(&r, &["2"]).unwrap().diam(&r), Dyadic::Zero);
        assert_eq!(
            CylSet::parse(&r, &["0", "2"]).unwrap().diam(&r),
            Dyadic::ONE
        );
    }

    #[test]
    fn point_membership() {
        let s = full2();
        let a = CylSet::parse(&s, &["01"]).unwrap();
        assert!(a.contains_point(&PointRep::periodic(&s, vec![0, 1]).unwrap()));
        assert!(!a.contains_point(&PointRep::periodic(&s, vec![0]).unwrap()));
    }
}
