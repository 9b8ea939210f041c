//! Energies `E(μ) = Σ_j F_j(∫ f_j dμ)` with polynomial `F_j` and cylinder
//! functions `f_j` carrying exact rational values.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::measure::{AtomicMeasure, Measure};
use crate::rational::{int, pow2, to_f64};
use crate::subshift::{Dyadic, Subshift, Word};
use crate::{Error, Rational, Result};

/// A univariate polynomial `c_0 + c_1 x + … + c_d x^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Polynomial { coeffs }
    }

    /// `x`.
    pub fn identity() -> Self {
        Polynomial::new(vec![Rational::zero(), Rational::one()])
    }

    /// `c x^2`.
    pub fn square(c: Rational) -> Self {
        Polynomial::new(vec![Rational::zero(), Rational::zero(), c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// `Σ |c_k| k R^{k-1}` with `R = max(|lo|, |hi|)`, an upper bound for
    /// `|F'|` on `[lo, hi]`.
    pub fn derivative_bound(&self, lo: &Rational, hi: &Rational) -> Rational {
        let r = if lo.abs() > hi.abs() {
            lo.abs()
        } else {
            hi.abs()
        };
        let mut total = Rational::zero();
        let mut rpow = Rational::one();
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            total += c.abs() * int(k as i64) * &rpow;
            rpow *= &r;
        }
        total
    }

    pub fn is_identity(&self) -> bool {
        *self == Polynomial::identity()
    }
}

/// A function of the first `window` symbols, tabulated on admissible words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderFunction {
    window: usize,
    values: BTreeMap<Word, Rational>,
}

impl CylinderFunction {
    /// `entries` must list every admissible `window`-word exactly once.
    pub fn new(sys: &Subshift, window: usize, entries: Vec<(Word, Rational)>) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidEnergy("window must be at least 1".into()));
        }
        let mut values = BTreeMap::new();
        for (w, v) in entries {
            if w.len() != window || !sys.is_admissible(&w.0) {
                return Err(Error::InvalidEnergy(alloc::format!(
                    "{w} is not an admissible {window}-word"
                )));
            }
            if values.insert(w.clone(), v).is_some() {
                return Err(Error::InvalidEnergy(alloc::format!("{w} listed twice")));
            }
        }
        let expected = sys.word_count(window);
        if values.len() as u128 != expected {
            return Err(Error::InvalidEnergy(alloc::format!(
                "table has {} entries but there are {expected} admissible {window}-words",
                values.len()
            )));
        }
        Ok(CylinderFunction { window, values })
    }

    pub fn from_fn<F: Fn(&[u8]) -> Rational>(sys: &Subshift, window: usize, f: F) -> Result<Self> {
        let entries = sys.words(window).into_iter().map(|w| {
            let v = f(&w.0);
            (w, v)
        });
        CylinderFunction::new(sys, window, entries.collect())
    }

    pub fn constant(sys: &Subshift, c: Rational) -> Self {
        CylinderFunction::from_fn(sys, 1, |_| c.clone()).expect("constant table is complete")
    }

    /// Indicator of the cylinder `[w]`.
    pub fn indicator(sys: &Subshift, w: &[u8]) -> Result<Self> {
        let w = w.to_vec();
        CylinderFunction::from_fn(sys, w.len().max(1), move |x| {
            if x.starts_with(&w) {
                int(1)
            } else {
                int(0)
            }
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn table(&self) -> &BTreeMap<Word, Rational> {
        &self.values
    }

    /// Value at any point whose prefix is `word` (at least `window` long).
    pub fn value(&self, word: &[u8]) -> &Rational {
        let key = Word::from(&word[..self.window]);
        self.values.get(&key).expect("word is admissible")
    }

    pub fn range(&self) -> (Rational, Rational) {
        let lo = self
            .values
            .values()
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        let hi = self
            .values
            .values()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero);
        (lo, hi)
    }

    /// `max f − min f`.
    pub fn oscillation(&self) -> Rational {
        let (lo, hi) = self.range();
        hi - lo
    }

    /// `∫ f dμ` against any measure, in floating point.
    pub fn integral<M: Measure + ?Sized>(&self, sys: &Subshift, mu: &M) -> f64 {
        mu.marginal(sys, self.window)
            .iter()
            .map(|(w, m)| m * to_f64(self.value(&w.0)))
            .sum()
    }

    pub fn integral_exact(&self, mu: &AtomicMeasure) -> Rational {
        mu.atoms()
            .iter()
            .map(|(x, w)| w * self.value(&x.prefix(self.window)))
            .sum()
    }

    /// Lipschitz constant `osc · 2^{w-1}`: points where `f` differs are at
    /// distance at least `2^{-(w-1)}`.
    pub fn lipschitz(&self) -> Rational {
        self.oscillation() * pow2(self.window as u32 - 1)
    }
}

/// `E(μ) = Σ_j F_j(∫ f_j dμ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyFunctional {
    terms: Vec<(Polynomial, CylinderFunction)>,
}

impl EnergyFunctional {
    pub fn new(terms: Vec<(Polynomial, CylinderFunction)>) -> Self {
        EnergyFunctional { terms }
    }

    /// `E ≡ 0`.
    pub fn zero() -> Self {
        EnergyFunctional { terms: Vec::new() }
    }

    /// `E(μ) = ∫ f dμ`.
    pub fn linear(f: CylinderFunction) -> Self {
        EnergyFunctional {
            terms: vec![(Polynomial::identity(), f)],
        }
    }

    pub fn terms(&self) -> &[(Polynomial, CylinderFunction)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|(p, _)| p.coeffs().iter().all(Zero::is_zero))
    }

    pub fn is_linear(&self) -> bool {
        self.terms.iter().all(|(p, _)| p.degree() <= 1)
    }

    /// Largest window, at least 1.
    pub fn window(&self) -> usize {
        self.terms.iter().map(|(_, f)| f.window).max().unwrap_or(1)
    }

    pub fn eval<M: Measure + ?Sized>(&self, sys: &Subshift, mu: &M) -> f64 {
        self.terms
            .iter()
            .map(|(p, f)| p.eval_f64(f.integral(sys, mu)))
            .sum()
    }

    pub fn eval_exact(&self, mu: &AtomicMeasure) -> Rational {
        self.terms
            .iter()
            .map(|(p, f)| p.eval(&f.integral_exact(mu)))
            .sum()
    }

    /// `n · E(Δ_x^n)` for any `x` starting with `word`, which must have
    /// length at least `n + window − 1`.
    pub fn n_energy(&self, word: &[u8], n: usize) -> Rational {
        let nq = int(n as i64);
        self.terms
            .iter()
            .map(|(p, f)| {
                let s: Rational = (0..n).map(|i| f.value(&word[i..]).clone()).sum();
                &nq * p.eval(&(s / &nq))
            })
            .sum()
    }

    /// Certified `τ̂_ε ≥ sup{|E(μ) − E(ν)| : W(μ, ν) ≤ ε}`:
    /// `Σ_j L_{F_j} L_{f_j} ε` with `L_F` bounding `|F'|` on the range of `f`.
    pub fn modulus_bound(&self, eps: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(p, f)| {
                let (lo, hi) = f.range();
                p.derivative_bound(&lo, &hi) * f.lipschitz() * eps
            })
            .sum()
    }

    pub fn modulus_bound_dyadic(&self, eps: Dyadic) -> Rational {
        self.modulus_bound(&eps.to_rational())
    }

    /// Integer tables for fast exact evaluation of `n · E(Δ)` along words.
    pub fn compile(&self, sys: &Subshift) -> Result<CompiledEnergy> {
        let k = sys.alphabet();
        let terms = self
            .terms
            .iter()
            .map(|(p, f)| {
                let denom = f
                    .values
                    .values()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let size = k
                    .checked_pow(f.window as u32)
                    .filter(|&s| s <= 1 << 26)
                    .ok_or_else(|| {
                        Error::InvalidEnergy(alloc::format!(
                            "window {} too large to tabulate",
                            f.window
                        ))
                    })?;
                let mut table = vec![0i64; size];
                for (w, v) in &f.values {
                    let scaled = v * Rational::from_integer(denom.clone());
                    let iv = scaled
                        .to_integer()
                        .to_i64()
                        .filter(|x| x.abs() < 1 << 40)
                        .ok_or_else(|| {
                            Error::InvalidEnergy(
                                "energy table entries too large for exact tabulation".into(),
                            )
                        })?;
                    table[sys.word_index(&w.0)] = iv;
                }
                Ok(CompiledTerm {
                    window: f.window,
                    denom: Rational::from_integer(denom),
                    table,
                    poly: p.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledEnergy { alphabet: k, terms })
    }
}

#[derive(Clone, Debug)]
pub struct CompiledTerm {
    pub window: usize,
    /// Common denominator `D` of the table; `table = D · f`.
    pub denom: Rational,
    /// Indexed by the base-`k` value of the window word.
    pub table: Vec<i64>,
    pub poly: Polynomial,
}

/// Integer-scaled energy tables: the sums `S_j = Σ_{i<n} D_j f_j(x_i …)` are
/// integers and `n·E(Δ) = Σ_j n·F_j(S_j / (n D_j))`.
#[derive(Clone, Debug)]
pub struct CompiledEnergy {
    alphabet: usize,
    pub terms: Vec<CompiledTerm>,
}

impl CompiledEnergy {
    pub fn window(&self) -> usize {
        self.terms.iter().map(|t| t.window).max().unwrap_or(1)
    }

    /// Table value of term `j` at the window starting at `word[0]`.
    pub fn term_value(&self, j: usize, word: &[u8]) -> i64 {
        let t = &self.terms[j];
        let idx = word[..t.window]
            .iter()
            .fold(0usize, |a, &s| a * self.alphabet + s as usize);
        t.table[idx]
    }

    pub fn sums(&self, word: &[u8], n: usize) -> Vec<i64> {
        (0..self.terms.len())
            .map(|j| (0..n).map(|i| self.term_value(j, &word[i..])).sum())
            .collect()
    }

    pub fn n_energy_exact(&self, n: usize, sums: &[i64]) -> Rational {
        let nq = int(n as i64);
        self.terms
            .iter()
            .zip(sums)
            .map(|(t, &s)| {
                let x = int(s) / (&nq * &t.denom);
                &nq * t.poly.eval(&x)
            })
            .sum()
    }

    pub fn n_energy_f64(&self, n: usize, sums: &[i64]) -> f64 {
        let nf = n as f64;
        self.terms
            .iter()
            .zip(sums)
            .map(|(t, &s)| nf * t.poly.eval_f64(s as f64 / (nf * to_f64(&t.denom))))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MarkovMeasure;
    use crate::rational::ratio;
    use crate::subshift::PointRep;

    fn split_fixed_point() -> Subshift {
        Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
    }

    fn split_fixed_point_f(s: &Subshift) -> CylinderFunction {
        CylinderFunction::from_fn(s, 1, |w| if w[0] == 2 { int(10) } else { int(0) }).unwrap()
    }

    #[test]
    fn integrals() {
        let s = Subshift::full(2);
        let c = CylinderFunction::constant(&s, ratio(3, 2));
        let b = MarkovMeasure::bernoulli(&s, &[0.3, 0.7]).unwrap();
        assert!((c.integral(&s, &b) - 1.5).abs() < 1e-15);
        let ind = CylinderFunction::indicator(&s, &[1]).unwrap();
        assert!((ind.integral(&s, &b) - 0.7).abs() < 1e-15);
        let r = split_fixed_point();
        let p = AtomicMeasure::dirac(PointRep::periodic(&r, vec![2]).unwrap());
        assert_eq!(split_fixed_point_f(&r).integral_exact(&p), int(10));
    }

    #[test]
    fn evaluation() {
        let r = split_fixed_point();
        let p = AtomicMeasure::dirac(PointRep::periodic(&r, vec![2]).unwrap());
        assert_eq!(EnergyFunctional::zero().eval_exact(&p), int(0));
        assert_eq!(
            EnergyFunctional::linear(split_fixed_point_f(&r)).eval_exact(&p),
            int(10)
        );
        let s = Subshift::full(2);
        let e = EnergyFunctional::new(vec![(
            Polynomial::square(int(1)),
            CylinderFunction::indicator(&s, &[1]).unwrap(),
        )]);
        let b = MarkovMeasure::bernoulli(&s, &[0.5, 0.5]).unwrap();
        assert!((e.eval(&s, &b) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn modulus_bounds() {
        let s = Subshift::full(2);
        let eps = ratio(1, 4);
        assert!(
            EnergyFunctional::linear(CylinderFunction::constant(&s, int(7)))
                .modulus_bound(&eps)
                .is_zero()
        );
        let r = split_fixed_point();
        assert_eq!(
            EnergyFunctional::linear(split_fixed_point_f(&r)).modulus_bound(&eps),
            int(10) * &eps
        );
        let e = EnergyFunctional::new(vec![(
            Polynomial::square(int(1)),
            CylinderFunction::indicator(&s, &[1]).unwrap(),
        )]);
        assert_eq!(e.modulus_bound(&eps), int(2) * &eps);
    }

    #[test]
    fn compiled_matches_direct() {
        let s = Subshift::from_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let f =
            CylinderFunction::from_fn(&s, 2, |w| ratio(w[0] as i64 * 3 - w[1] as i64, 7)).unwrap();
        let g = CylinderFunction::from_fn(&s, 1, |w| ratio(w[0] as i64, 2)).unwrap();
        let e = EnergyFunctional::new(vec![
            (Polynomial::new(vec![int(1), int(-2), ratio(1, 3)]), f),
            (Polynomial::identity(), g),
        ]);
        let c = e.compile(&s).unwrap();
        for w in s.words(6) {
            let n = 5;
            assert_eq!(c.n_energy_exact(n, &c.sums(&w.0, n)), e.n_energy(&w.0, n));
            let x = s.extend_to_point(&w.0).unwrap();
            let emp = AtomicMeasure::empirical(&x, n).unwrap();
            assert_eq!(e.eval_exact(&emp) * int(n as i64), e.n_energy(&w.0, n));
        }
    }

    #[test]
    fn rejects_incomplete_tables() {
        let s = Subshift::full(2);
        assert!(CylinderFunction::new(&s, 1, vec![(Word(vec![0]), int(1))]).is_err());
    }
}
