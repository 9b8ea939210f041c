//! Sliding block codes between subshifts of finite type, with the induced
//! maps on points, covers, energies and measures.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::Cover;
use crate::cylinder::CylSet;
use crate::energy::{CylinderFunction, EnergyFunctional};
use crate::measure::{AtomicMeasure, MarkovMeasure, Measure};
use crate::pressure::{CoverPressure, PressureOptions, PressureValue};
use crate::subshift::{PointRep, Subshift, Word};
use crate::{Error, Result};

/// `π(x)_i = φ(x_i … x_{i+w-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockCode {
    source: Subshift,
    target: Subshift,
    window: usize,
    /// Indexed by the base-`k` value of the source window word; entries for
    /// inadmissible words are unused.
    map: Vec<u8>,
}

impl SlidingBlockCode {
    /// Builds a code from a table covering every admissible window word and
    /// checks that images of admissible words are admissible.
    pub fn new(
        source: &Subshift,
        target: &Subshift,
        window: usize,
        table: &[(Word, u8)],
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidCode("window must be at least 1".into()));
        }
        let size = source
            .alphabet()
            .checked_pow(window as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| Error::InvalidCode(alloc::format!("window {window} too large")))?;
        let mut map = vec![u8::MAX; size];
        for (w, b) in table {
            if w.len() != window {
                return Err(Error::InvalidCode(alloc::format!(
                    "block {w} does not have length {window}"
                )));
            }
            source.check_symbols(&w.0)?;
            target.check_symbols(&[*b])?;
            map[source.word_index(&w.0)] = *b;
        }
        let mut missing = None;
        source.for_each_word(window, |w| {
            if missing.is_none() && map[source.word_index(w)] == u8::MAX {
                missing = Some(Word::from(w));
            }
        });
        if let Some(w) = missing {
            return Err(Error::InvalidCode(alloc::format!("no image for block {w}")));
        }
        let code = SlidingBlockCode {
            source: source.clone(),
            target: target.clone(),
            window,
            map,
        };
        // the target has memory one, so admissible 2-symbol images suffice
        let mut bad = None;
        source.for_each_word(window + 1, |w| {
            let img = code.apply_word(w);
            if bad.is_none() && !target.allows(img[0], img[1]) {
                bad = Some(Word::from(w));
            }
        });
        if let Some(w) = bad {
            return Err(Error::InvalidCode(alloc::format!(
                "image of {w} is not admissible in the target"
            )));
        }
        Ok(code)
    }

    pub fn from_fn<F: Fn(&[u8]) -> u8>(
        source: &Subshift,
        target: &Subshift,
        window: usize,
        phi: F,
    ) -> Result<Self> {
        let table: Vec<(Word, u8)> = source
            .words(window)
            .into_iter()
            .map(|w| {
                let b = phi(&w.0);
                (w, b)
            })
            .collect();
        Self::new(source, target, window, &table)
    }

    pub fn identity(sys: &Subshift) -> Self {
        Self::from_fn(sys, sys, 1, |w| w[0]).expect("identity is a valid code")
    }

    /// The 1-block code sending symbol `a` to `relabel[a]`.
    pub fn one_block(source: &Subshift, target: &Subshift, relabel: &[u8]) -> Result<Self> {
        if relabel.len() != source.alphabet() {
            return Err(Error::InvalidCode(
                "relabelling must list one image per source symbol".into(),
            ));
        }
        Self::from_fn(source, target, 1, |w| relabel[w[0] as usize])
    }

    /// The conjugacy from `sys` onto its `k`-block presentation, and the
    /// presentation itself.
    pub fn to_higher_block(sys: &Subshift, k: usize) -> Result<(Self, Subshift)> {
        let (hb, states) = sys.higher_block(k)?;
        let index: BTreeMap<Word, u8> = states
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, i as u8))
            .collect();
        let code = Self::from_fn(sys, &hb, k, |w| index[&Word::from(w)])?;
        Ok((code, hb))
    }

    /// The 1-block code from the `k`-block presentation back onto `sys`.
    pub fn from_higher_block(sys: &Subshift, k: usize) -> Result<(Self, Subshift)> {
        let (hb, states) = sys.higher_block(k)?;
        let firsts: Vec<u8> = states.iter().map(|w| w.0[0]).collect();
        let code = Self::one_block(&hb, sys, &firsts)?;
        Ok((code, hb))
    }

    pub fn source(&self) -> &Subshift {
        &self.source
    }

    pub fn target(&self) -> &Subshift {
        &self.target
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn image(&self, block: &[u8]) -> u8 {
        self.map[self.source.word_index(&block[..self.window])]
    }

    /// Image of a source word of length `L ≥ window`: a word of length
    /// `L − window + 1`.
    pub fn apply_word(&self, word: &[u8]) -> Vec<u8> {
        if word.len() < self.window {
            return Vec::new();
        }
        (0..=word.len() - self.window)
            .map(|i| self.image(&word[i..]))
            .collect()
    }

    /// Image of an eventually periodic point.
    pub fn apply(&self, x: &PointRep) -> Result<PointRep> {
        let pre = x.preperiod().len();
        let cyc = x.cycle().len();
        let window: Vec<u8> = (0..pre + cyc + self.window - 1)
            .map(|i| x.symbol(i))
            .collect();
        let img = self.apply_word(&window);
        PointRep::new(
            &self.target,
            img[..pre].to_vec(),
            img[pre..pre + cyc].to_vec(),
        )
    }

    /// `π ∘ S = T ∘ π` on every admissible word of length `len`.
    pub fn commutes_on_words(&self, len: usize) -> bool {
        let mut ok = true;
        self.source.for_each_word(len.max(self.window + 1), |w| {
            ok &= self.apply_word(&w[1..]) == self.apply_word(w)[1..];
        });
        ok
    }

    /// Every admissible target word of length `len` has a preimage.
    pub fn is_surjective_up_to(&self, len: usize) -> bool {
        let mut images = alloc::collections::BTreeSet::new();
        self.source.for_each_word(len + self.window - 1, |w| {
            images.insert(self.apply_word(w));
        });
        let mut ok = true;
        self.target.for_each_word(len, |w| ok &= images.contains(w));
        ok
    }

    /// Source words of length `|v| + window − 1` mapping onto `v`.
    pub fn preimage_words(&self, v: &[u8]) -> Vec<Vec<u8>> {
        let len = v.len() + self.window - 1;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.preimage_rec(v, len, &mut cur, &mut out);
        out
    }

    fn preimage_rec(&self, v: &[u8], len: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let d = cur.len();
        if d >= self.window && self.image(&cur[d - self.window..]) != v[d - self.window] {
            return;
        }
        if d == len {
            out.push(cur.clone());
            return;
        }
        let next: Vec<u8> = match cur.last() {
            None => (0..self.source.alphabet() as u8).collect(),
            Some(&a) => self.source.successors(a).to_vec(),
        };
        for s in next {
            cur.push(s);
            self.preimage_rec(v, len, cur, out);
            cur.pop();
        }
    }

    /// `π^{-1} A`.
    pub fn pullback_set(&self, a: &CylSet) -> CylSet {
        if a.is_full() || a.is_empty() {
            return a.clone();
        }
        let r = a.resolution() + self.window - 1;
        let mut words = Vec::new();
        self.source.for_each_word(r, |w| {
            if a.contains_prefix(&self.apply_word(w)) {
                words.push(Word::from(w));
            }
        });
        CylSet::from_level(&self.source, r, words)
    }

    /// `π^{-1} U`, elements in the order of `U`.
    pub fn pullback_cover(&self, cover: &Cover) -> Result<Cover> {
        Cover::new(
            &self.source,
            cover
                .elements()
                .iter()
                .map(|a| self.pullback_set(a))
                .collect(),
        )
    }

    /// `E ∘ π_*`: each `∫ f d(π_* μ)` becomes `∫ f∘π dμ`.
    pub fn pullback_energy(&self, energy: &EnergyFunctional) -> Result<EnergyFunctional> {
        let terms = energy
            .terms()
            .iter()
            .map(|(p, f)| {
                let w = f.window() + self.window - 1;
                let g = CylinderFunction::from_fn(&self.source, w, |word| {
                    f.value(&self.apply_word(word)).clone()
                })?;
                Ok((p.clone(), g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EnergyFunctional::new(terms))
    }

    /// `π_* μ` for a finitely supported measure.
    pub fn pushforward_atomic(&self, mu: &AtomicMeasure) -> Result<AtomicMeasure> {
        let images = mu
            .atoms()
            .iter()
            .map(|(x, w)| Ok((self.apply(x)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(images)
    }

    /// `π_* μ` for a Markov measure. A 1-block code that is injective on
    /// symbols maps memory-1 chains to memory-1 chains; otherwise the image
    /// is returned as an exact cylinder-mass oracle, which need not be Markov.
    pub fn pushforward_markov(&self, mu: &MarkovMeasure) -> Result<Pushforward> {
        if let Some(relabel) = self.injective_relabel() {
            if mu.memory() == 1 && mu.subshift() == &self.source {
                let k = self.target.alphabet();
                let mut p = vec![vec![0.0; k]; k];
                let mut pi = vec![0.0; k];
                // target symbols outside the image get a uniform row and no mass
                for (b, row) in p.iter_mut().enumerate() {
                    let succ = self.target.successors(b as u8);
                    for &c in succ {
                        row[c as usize] = 1.0 / succ.len() as f64;
                    }
                }
                for a in 0..self.source.alphabet() {
                    let b = relabel[a] as usize;
                    p[b] = vec![0.0; k];
                    for c in 0..self.source.alphabet() {
                        p[b][relabel[c] as usize] = mu.transition()[a][c];
                    }
                    pi[b] = mu.stationary()[a];
                }
                return Ok(Pushforward::Markov(MarkovMeasure::with_stationary(
                    &self.target,
                    1,
                    p,
                    pi,
                )?));
            }
        }
        Ok(Pushforward::Image(ImageMeasure {
            code: self.clone(),
            source: mu.clone(),
        }))
    }

    fn injective_relabel(&self) -> Option<Vec<u8>> {
        if self.window != 1 {
            return None;
        }
        let relabel: Vec<u8> = (0..self.source.alphabet() as u8)
            .map(|a| self.image(&[a]))
            .collect();
        let mut seen = relabel.clone();
        seen.sort();
        seen.dedup();
        (seen.len() == relabel.len()).then_some(relabel)
    }
}

/// Result of pushing a Markov measure through a code.
#[derive(Clone, Debug, PartialEq)]
pub enum Pushforward {
    Markov(MarkovMeasure),
    /// Exact cylinder masses, but no finite Markov presentation is claimed.
    Image(ImageMeasure),
}

impl Pushforward {
    pub fn is_markov(&self) -> bool {
        matches!(self, Pushforward::Markov(_))
    }

    pub fn as_measure(&self) -> &dyn Measure {
        match self {
            Pushforward::Markov(m) => m,
            Pushforward::Image(m) => m,
        }
    }
}

/// `π_* μ` evaluated on cylinders by summing `μ` over preimage words.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageMeasure {
    code: SlidingBlockCode,
    source: MarkovMeasure,
}

impl Measure for ImageMeasure {
    fn cylinder_mass(&self, word: &[u8]) -> f64 {
        if word.is_empty() {
            return 1.0;
        }
        self.code
            .preimage_words(word)
            .iter()
            .map(|u| self.source.cylinder_mass(u))
            .sum()
    }
}

/// `p1` on both sides of a factor map for each `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorRow {
    pub n: usize,
    /// `p_n(S, E∘π_*; π^{-1}U)`.
    pub source: PressureValue,
    /// `p_n(T, E; U)`.
    pub target: PressureValue,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorAudit {
    pub rows: Vec<FactorRow>,
    /// Word length up to which surjectivity was checked.
    pub surjectivity_checked_to: usize,
    pub surjective: bool,
    pub first_failure: Option<usize>,
}

impl FactorAudit {
    pub fn passes(&self) -> bool {
        self.surjective && self.first_failure.is_none()
    }
}

/// Compares `p_n(S, E∘π_*; π^{-1}U)` with `p_n(T, E; U)`; equal exactly,
/// or within `1e-9` in log.
pub fn factor_pressure_identity(
    code: &SlidingBlockCode,
    cover: &Cover,
    energy: &EnergyFunctional,
    n_values: &[usize],
    opts: &PressureOptions,
) -> Result<FactorAudit> {
    let src_cover = code.pullback_cover(cover)?;
    let src_energy = code.pullback_energy(energy)?.compile(code.source())?;
    let tgt_energy = energy.compile(code.target())?;
    let mut rows = Vec::with_capacity(n_values.len());
    let mut first_failure = None;
    for &n in n_values {
        let source = CoverPressure::new(code.source(), &src_cover, &src_energy, n, opts)?
            .p1()?
            .value;
        let target = CoverPressure::new(code.target(), cover, &tgt_energy, n, opts)?
            .p1()?
            .value;
        let equal = source.exact == target.exact || (source.log - target.log).abs() <= 1e-9;
        if !equal && first_failure.is_none() {
            first_failure = Some(n);
        }
        rows.push(FactorRow {
            n,
            source,
            target,
            equal,
        });
    }
    let check = n_values.iter().copied().max().unwrap_or(1) + cover.resolution();
    Ok(FactorAudit {
        rows,
        surjectivity_checked_to: check,
        surjective: code.is_surjective_up_to(check),
        first_failure,
    })
}
