//! Separated-set and spanning-set sums `P_n(ε)` and `Q_n(ε)`.
//!
//! In the shift metric every Bowen ball `B_n(x, 2^-m)` is the cylinder of
//! `x`'s first `n + m` symbols, and two such balls are equal or disjoint. An
//! `(n, ε)`-separated set therefore holds at most one point per
//! `(n+m)`-cylinder, a spanning set at least one, and both extremal sums are
//! attained by choosing per cylinder a point of largest (smallest) weight.

use alloc::vec::Vec;

use crate::energy::CompiledEnergy;
use crate::expsum::ExpSum;
use crate::join::{scan, EnergyCache};
use crate::subshift::{bowen_resolution, Subshift, Word};
use crate::{Error, Rational, Result};

use super::{PressureOptions, PressureValue};

/// A separation radius `ε`: either `2^-m` or any `ε > 1`, where every Bowen
/// ball is all of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Radius {
    Pow(u32),
    Whole,
}

impl Radius {
    /// Length of the cylinder equal to `B_n(x, ε)`.
    pub fn cylinder_len(self, n: usize) -> Result<usize> {
        match self {
            Radius::Pow(m) => bowen_resolution(n, m),
            Radius::Whole if n == 0 => Err(Error::ZeroSteps),
            Radius::Whole => Ok(0),
        }
    }
}

/// `P_n(ε)` and `Q_n(ε)` with a witness point word per Bowen cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalSums {
    pub separated: PressureValue,
    pub spanning: PressureValue,
    /// Per cylinder, the extension of largest weight (a maximal separated set).
    pub argmax: Vec<Word>,
    /// Per cylinder, the extension of smallest weight (a minimal spanning set).
    pub argmin: Vec<Word>,
}

/// Both sums in one pass over the words of length
/// `max(cylinder length, n + window − 1)`.
pub fn extremal_sums(
    sys: &Subshift,
    energy: &CompiledEnergy,
    n: usize,
    eps: Radius,
    opts: &PressureOptions,
) -> Result<ExtremalSums> {
    let cyl = eps.cylinder_len(n)?;
    let len = cyl.max(n + energy.window() - 1);
    if len > opts.resolution_cap {
        return Err(Error::ResolutionCap {
            resolution: len,
            cap: opts.resolution_cap,
        });
    }
    let mut cache = EnergyCache::new(energy, n);
    let mut sep = ExpSum::new();
    let mut span = ExpSum::new();
    let mut argmax = Vec::new();
    let mut argmin = Vec::new();
    // the scan is lexicographic, so a cylinder's extensions are contiguous
    let mut group: Option<(Vec<u8>, Rational, Word, Rational, Word)> = None;
    let mut flush = |g: (Vec<u8>, Rational, Word, Rational, Word)| {
        sep.add(g.1, 1);
        argmax.push(g.2);
        span.add(g.3, 1);
        argmin.push(g.4);
    };
    scan(sys, len, n, energy, None, |w, sums, _| {
        let v = cache.get(sums);
        match &mut group {
            Some(g) if g.0[..] == w[..cyl] => {
                if *v > g.1 {
                    g.1 = v.clone();
                    g.2 = Word::from(w);
                }
                if *v < g.3 {
                    g.3 = v.clone();
                    g.4 = Word::from(w);
                }
            }
            _ => {
                if let Some(done) = group.take() {
                    flush(done);
                }
                group = Some((
                    w[..cyl].to_vec(),
                    v.clone(),
                    Word::from(w),
                    v.clone(),
                    Word::from(w),
                ));
            }
        }
    });
    if let Some(done) = group.take() {
        flush(done);
    }
    Ok(ExtremalSums {
        separated: PressureValue::from_exact(sep),
        spanning: PressureValue::from_exact(span),
        argmax,
        argmin,
    })
}

/// `P_n(2^-m)`: the largest `Σ e^{nE(Δ_x^n)}` over `(n, 2^-m)`-separated sets.
pub fn pn_separated(
    sys: &Subshift,
    energy: &CompiledEnergy,
    n: usize,
    m: u32,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(extremal_sums(sys, energy, n, Radius::Pow(m), opts)?.separated)
}

/// `Q_n(2^-m)`: the smallest `Σ e^{nE(Δ_x^n)}` over `(n, 2^-m)`-spanning sets.
pub fn qn_spanning(
    sys: &Subshift,
    energy: &CompiledEnergy,
    n: usize,
    m: u32,
    opts: &PressureOptions,
) -> Result<PressureValue> {
    Ok(extremal_sums(sys, energy, n, Radius::Pow(m), opts)?.spanning)
}
