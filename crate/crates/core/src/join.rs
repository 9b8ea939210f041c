//! Implicit iterated joins.
//!
//! For a cover `U` at resolution `r`, a word `x` of length at least
//! `n + r − 1` lies in the element of `U_0^{n-1}` with choice sequence `c`
//! iff `c_i ∈ σ(x_i … x_{i+r-1})` for every `i < n`, where `σ(v)` is the set
//! of elements of `U` containing `[v]`. Atoms of the generated partition are
//! therefore the classes of words with equal signature `(σ_0, …, σ_{n-1})`,
//! and the elements containing an atom form the product `Π σ_i`. Nothing
//! here materialises the join itself.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::Cover;
use crate::energy::CompiledEnergy;
use crate::rational::to_f64;
use crate::subshift::{Subshift, Word};
use crate::{CylSet, Error, Rational, Result};

/// Default cap on the working resolution.
pub const DEFAULT_RESOLUTION_CAP: usize = 22;

/// Budget on the total number of (atom, home) incidences enumerated.
const HOME_ENUMERATION_CAP: u64 = 20_000_000;

/// `σ` for every word of length `r`, as a bitmask over the cover elements.
#[derive(Clone, Debug)]
pub struct SignatureTable {
    resolution: usize,
    alphabet: usize,
    masks: Vec<u64>,
    elements: usize,
}

impl SignatureTable {
    pub fn new(sys: &Subshift, cover: &Cover) -> Result<Self> {
        if cover.len() > 64 {
            return Err(Error::Invalid(alloc::format!(
                "covers with more than 64 elements are not supported (got {})",
                cover.len()
            )));
        }
        let r = cover.resolution().max(1);
        let k = sys.alphabet();
        let size = k
            .checked_pow(r as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| {
                Error::Invalid(alloc::format!("cover resolution {r} too large to tabulate"))
            })?;
        let mut masks = vec![0u64; size];
        sys.for_each_word(r, |w| {
            let mut m = 0u64;
            for (i, e) in cover.elements().iter().enumerate() {
                if e.contains_prefix(w) {
                    m |= 1 << i;
                }
            }
            masks[sys.word_index(w)] = m;
        });
        Ok(SignatureTable {
            resolution: r,
            alphabet: k,
            masks,
            elements: cover.len(),
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    /// `σ` of the window starting at `word[0]`.
    pub fn mask(&self, word: &[u8]) -> u64 {
        let idx = word[..self.resolution]
            .iter()
            .fold(0usize, |a, &s| a * self.alphabet + s as usize);
        self.masks[idx]
    }
}

/// Depth-first scan of all admissible words of length `len`, reporting for
/// each the energy sums over the first `n` positions and the signature.
pub fn scan<F>(
    sys: &Subshift,
    len: usize,
    n: usize,
    energy: &CompiledEnergy,
    sig: Option<&SignatureTable>,
    mut visit: F,
) where
    F: FnMut(&[u8], &[i64], &[u64]),
{
    let terms = energy.terms.len();
    let mut st = ScanState {
        word: Vec::with_capacity(len),
        sums: vec![vec![0i64; terms]; len + 1],
        sig: Vec::with_capacity(n),
    };
    scan_rec(sys, len, n, energy, sig, &mut st, &mut visit);
}

struct ScanState {
    word: Vec<u8>,
    // sums[d] = energy sums after the word reached length d
    sums: Vec<Vec<i64>>,
    sig: Vec<u64>,
}

fn scan_rec<F>(
    sys: &Subshift,
    len: usize,
    n: usize,
    energy: &CompiledEnergy,
    sig: Option<&SignatureTable>,
    st: &mut ScanState,
    visit: &mut F,
) where
    F: FnMut(&[u8], &[i64], &[u64]),
{
    let d = st.word.len();
    if d == len {
        visit(&st.word, &st.sums[d], &st.sig);
        return;
    }
    let last = st.word.last().copied();
    let count = match last {
        None => sys.alphabet(),
        Some(a) => sys.successors(a).len(),
    };
    for idx in 0..count {
        let s = match last {
            None => idx as u8,
            Some(a) => sys.successors(a)[idx],
        };
        st.word.push(s);
        let depth = d + 1;
        // energy windows completed at this depth
        let (lo, hi) = st.sums.split_at_mut(depth);
        hi[0].copy_from_slice(&lo[depth - 1]);
        for (j, t) in energy.terms.iter().enumerate() {
            if depth >= t.window {
                let start = depth - t.window;
                if start < n {
                    hi[0][j] += energy.term_value(j, &st.word[start..]);
                }
            }
        }
        let mut pushed = false;
        if let Some(table) = sig {
            if depth >= table.resolution() {
                let start = depth - table.resolution();
                if start < n {
                    st.sig.push(table.mask(&st.word[start..]));
                    pushed = true;
                }
            }
        }
        scan_rec(sys, len, n, energy, sig, st, visit);
        if pushed {
            st.sig.pop();
        }
        st.word.pop();
    }
}

/// Cache of exact `n·E(Δ)` keyed by the integer sums.
pub struct EnergyCache<'a> {
    energy: &'a CompiledEnergy,
    n: usize,
    values: BTreeMap<Vec<i64>, Rational>,
}

impl<'a> EnergyCache<'a> {
    pub fn new(energy: &'a CompiledEnergy, n: usize) -> Self {
        EnergyCache {
            energy,
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, sums: &[i64]) -> &Rational {
        if !self.values.contains_key(sums) {
            let v = self.energy.n_energy_exact(self.n, sums);
            self.values.insert(sums.to_vec(), v);
        }
        &self.values[sums]
    }
}

/// An atom of the partition generated by `U_0^{n-1}` with the exact range of
/// `n·E(Δ_x^n)` over its points.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    /// `σ_i` masks, `i < n`; the containing elements are their product.
    pub signature: Vec<u64>,
    /// Smallest working-resolution word in the atom.
    pub rep: Word,
    pub word_count: u64,
    pub sup: Rational,
    pub inf: Rational,
    pub sup_f64: f64,
    pub inf_f64: f64,
    /// Working-resolution words attaining `sup` and `inf`.
    pub argmax: Word,
    pub argmin: Word,
}

impl Atom {
    /// Number of elements of `U_0^{n-1}` containing the atom.
    pub fn home_count(&self) -> u128 {
        self.signature
            .iter()
            .map(|m| u128::from(m.count_ones()))
            .product()
    }

    pub fn in_home(&self, choice: &[u8]) -> bool {
        self.signature
            .iter()
            .zip(choice)
            .all(|(&m, &c)| m >> c & 1 == 1)
    }
}

/// All atoms of `U_0^{n-1}` with weights, in order of their smallest word.
#[derive(Clone, Debug)]
pub struct AtomTable {
    pub n: usize,
    pub resolution: usize,
    pub cover_len: usize,
    pub atoms: Vec<Atom>,
}

/// Working resolution `n + max(r, w) − 1`.
pub fn working_resolution(cover: &Cover, energy: &CompiledEnergy, n: usize) -> usize {
    n + cover.resolution().max(energy.window()).max(1) - 1
}

impl AtomTable {
    pub fn build(
        sys: &Subshift,
        cover: &Cover,
        energy: &CompiledEnergy,
        n: usize,
        cap: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSteps);
        }
        let len = working_resolution(cover, energy, n);
        if len > cap {
            return Err(Error::ResolutionCap {
                resolution: len,
                cap,
            });
        }
        let table = SignatureTable::new(sys, cover)?;
        let mut cache = EnergyCache::new(energy, n);
        let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let mut atoms: Vec<Atom> = Vec::new();
        scan(sys, len, n, energy, Some(&table), |w, sums, sig| {
            let value = cache.get(sums).clone();
            match index.get(sig) {
                Some(&i) => {
                    let a = &mut atoms[i];
                    a.word_count += 1;
                    if value > a.sup {
                        a.sup = value.clone();
                        a.argmax = Word::from(w);
                    }
                    if value < a.inf {
                        a.inf = value;
                        a.argmin = Word::from(w);
                    }
                }
                None => {
                    index.insert(sig.to_vec(), atoms.len());
                    atoms.push(Atom {
                        signature: sig.to_vec(),
                        rep: Word::from(w),
                        word_count: 1,
                        sup: value.clone(),
                        inf: value,
                        sup_f64: 0.0,
                        inf_f64: 0.0,
                        argmax: Word::from(w),
                        argmin: Word::from(w),
                    });
                }
            }
        });
        for a in &mut atoms {
            a.sup_f64 = to_f64(&a.sup);
            a.inf_f64 = to_f64(&a.inf);
        }
        Ok(AtomTable {
            n,
            resolution: len,
            cover_len: cover.len(),
            atoms,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The atom as a cylinder union at the working resolution.
    pub fn atom_set(&self, sys: &Subshift, cover: &Cover, i: usize) -> Result<CylSet> {
        let table = SignatureTable::new(sys, cover)?;
        let target = &self.atoms[i].signature;
        let mut words = Vec::new();
        sys.for_each_word(self.resolution, |w| {
            if (0..self.n).all(|p| table.mask(&w[p..]) == target[p]) {
                words.push(Word::from(w));
            }
        });
        CylSet::new(sys, &words)
    }

    /// Elements of `U_0^{n-1}` that contain at least one atom, with equal
    /// elements merged.
    pub fn homes(&self) -> Result<Homes> {
        let mut by_choice: BTreeMap<Vec<u8>, Vec<u32>> = BTreeMap::new();
        let mut work = 0u64;
        for (a, atom) in self.atoms.iter().enumerate() {
            work = work.saturating_add(u64::try_from(atom.home_count()).unwrap_or(u64::MAX));
            if work > HOME_ENUMERATION_CAP {
                return Err(Error::SearchBudget(HOME_ENUMERATION_CAP));
            }
            let options: Vec<Vec<u8>> = atom
                .signature
                .iter()
                .map(|&m| (0..64u8).filter(|&c| m >> c & 1 == 1).collect())
                .collect();
            let mut idx = vec![0usize; self.n];
            'outer: loop {
                let c: Vec<u8> = (0..self.n).map(|i| options[i][idx[i]]).collect();
                by_choice.entry(c).or_default().push(a as u32);
                let mut i = self.n;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < options[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
        }
        let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        let mut choices = Vec::new();
        let mut members: Vec<Vec<u32>> = Vec::new();
        let mut multiplicity = Vec::new();
        for (c, atoms) in by_choice {
            match seen.get(&atoms) {
                Some(&h) => multiplicity[h] += 1,
                None => {
                    seen.insert(atoms.clone(), members.len());
                    choices.push(c);
                    members.push(atoms);
                    multiplicity.push(1u64);
                }
            }
        }
        let mut of_atom = vec![Vec::new(); self.atoms.len()];
        for (h, m) in members.iter().enumerate() {
            for &a in m {
                of_atom[a as usize].push(h as u32);
            }
        }
        Ok(Homes {
            choices,
            members,
            of_atom,
            multiplicity,
        })
    }
}

/// Distinct nonempty elements of `U_0^{n-1}` as sets of atoms.
#[derive(Clone, Debug)]
pub struct Homes {
    /// Lexicographically first choice sequence realising each home.
    pub choices: Vec<Vec<u8>>,
    /// Atoms inside each home, ascending.
    pub members: Vec<Vec<u32>>,
    /// Homes containing each atom, ascending.
    pub of_atom: Vec<Vec<u32>>,
    /// Number of choice sequences giving the same set.
    pub multiplicity: Vec<u64>,
}

impl Homes {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
