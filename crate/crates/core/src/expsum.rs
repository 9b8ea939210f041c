//! Sums of exponentials: a stable floating log-sum-exp and an exact
//! representation `Σ c_q · e^q` over rational exponents `q`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::Rational;

/// `log Σ e^{x_i}`, `-inf` for an empty sum.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| libm::exp(v - max)).sum();
    max + libm::log(sum)
}

/// `log(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count · e^x`.
    pub fn add(&mut self, x: f64, count: f64) {
        if count <= 0.0 || x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * libm::exp(self.max - x) + count;
            self.max = x;
        } else {
            self.scaled += count * libm::exp(x - self.max);
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + libm::log(self.scaled)
        }
    }
}

/// Exact `Σ_q c_q e^q` with rational exponents and positive integer counts.
///
/// Distinct rationals have linearly independent exponentials over the
/// rationals, so two `ExpSum`s denote the same real number exactly when
/// their term maps coincide; derived equality is exact equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpSum {
    terms: BTreeMap<Rational, u64>,
}

impl ExpSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// `count · e^q`.
    pub fn single(q: Rational, count: u64) -> Self {
        let mut s = ExpSum::new();
        s.add(q, count);
        s
    }

    pub fn add(&mut self, q: Rational, count: u64) {
        if count > 0 {
            *self.terms.entry(q).or_insert(0) += count;
        }
    }

    pub fn merge(&mut self, other: &ExpSum) {
        for (q, &c) in &other.terms {
            self.add(q.clone(), c);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(exponent, count)` pairs, ascending by exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, u64)> {
        self.terms.iter().map(|(q, &c)| (q, c))
    }

    pub fn max_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next_back()
    }

    /// Natural logarithm of the sum, in floating point.
    pub fn log(&self) -> f64 {
        let mut acc = LogSumExp::new();
        for (q, &c) in &self.terms {
            acc.add(rational_to_f64(q), c as f64);
        }
        acc.value()
    }

    /// Exact value of `log` when the sum has one term: `log c + q`, returned
    /// as `(c, q)`.
    pub fn as_single(&self) -> Option<(u64, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(q, &c)| (c, q))
        } else {
            None
        }
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (q, &c) in self.terms.iter().rev() {
            let e = if q.is_zero() {
                String::from("1")
            } else {
                alloc::format!("e^({q})")
            };
            parts.push(match (c, q.is_zero()) {
                (1, _) => e,
                (c, true) => alloc::format!("{c}"),
                (c, false) => alloc::format!("{c}*{e}"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.numer().sign() == num_bigint::Sign::Minus {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
