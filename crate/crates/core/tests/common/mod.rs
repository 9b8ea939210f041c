//! Random instance generators and brute-force oracles shared by the
//! integration tests. The oracles work from definitions (word sets, point
//! sets, empirical measures) and do not call the solvers they check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nlpress_core::rational::{int, ratio};
use nlpress_core::{
    AtomicMeasure, Cover, CylSet, CylinderFunction, EnergyFunctional, ExpSum, PointRep, Polynomial,
    Rational, Subshift, Word,
};
use rand::Rng;

pub fn split_fixed_point() -> Subshift {
    Subshift::from_matrix(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap()
}

pub fn split_fixed_point_cover(sys: &Subshift) -> Cover {
    Cover::from_words(sys, &[&["0", "2"], &["1", "2"]]).unwrap()
}

pub fn split_fixed_point_energy(sys: &Subshift) -> EnergyFunctional {
    let f =
        CylinderFunction::from_fn(sys, 1, |w| if w[0] == 2 { int(10) } else { int(0) }).unwrap();
    EnergyFunctional::linear(f)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub sys: Subshift,
    pub cover: Cover,
    pub energy: EnergyFunctional,
}

pub fn random_sft<R: Rng>(rng: &mut R, max_symbols: usize) -> Subshift {
    loop {
        let k = rng.random_range(1..=max_symbols);
        let rows: Vec<Vec<bool>> = (0..k)
            .map(|_| (0..k).map(|_| rng.random_bool(0.6)).collect())
            .collect();
        if let Ok(s) = Subshift::new(k, &rows) {
            return s;
        }
    }
}

/// Two to four random unions of `r`-cylinders, patched so they cover `X`.
pub fn random_cover<R: Rng>(rng: &mut R, sys: &Subshift, max_res: usize) -> Cover {
    let r = rng.random_range(1..=max_res);
    let words = sys.words(r);
    let count = rng.random_range(2..=4);
    let mut parts: Vec<Vec<Word>> = vec![Vec::new(); count];
    for w in &words {
        let mut placed = false;
        for p in parts.iter_mut() {
            if rng.random_bool(0.45) {
                p.push(w.clone());
                placed = true;
            }
        }
        if !placed {
            let i = rng.random_range(0..count);
            parts[i].push(w.clone());
        }
    }
    let elements = parts
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| CylSet::new(sys, p).unwrap())
        .collect();
    Cover::new(sys, elements).unwrap()
}

/// One or two terms `F_j(∫ f_j)` with `F_j` of degree at most two.
pub fn random_energy<R: Rng>(rng: &mut R, sys: &Subshift, max_window: usize) -> EnergyFunctional {
    let terms = (0..rng.random_range(1..=2))
        .map(|_| {
            let w = rng.random_range(1..=max_window);
            let vals: Vec<i64> = (0..sys.alphabet().pow(w as u32))
                .map(|_| rng.random_range(-2..=3))
                .collect();
            let k = sys.alphabet();
            let f = CylinderFunction::from_fn(sys, w, |word| {
                let idx = word.iter().fold(0usize, |acc, &s| acc * k + s as usize);
                ratio(vals[idx], 2)
            })
            .unwrap();
            let coeffs: Vec<Rational> = (0..=rng.random_range(1..=2))
                .map(|_| int(rng.random_range(-1..=2)))
                .collect();
            (Polynomial::new(coeffs), f)
        })
        .collect();
    EnergyFunctional::new(terms)
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let sys = random_sft(rng, 3);
    let cover = random_cover(rng, &sys, 2);
    let energy = random_energy(rng, &sys, 2);
    Instance { sys, cover, energy }
}

/// A random eventually periodic point with short preperiod and cycle.
pub fn random_point<R: Rng>(rng: &mut R, sys: &Subshift) -> PointRep {
    let len = rng.random_range(1..=5);
    let words = sys.words(len);
    let w = &words[rng.random_range(0..words.len())];
    let cyc = sys.words(rng.random_range(1..=3));
    let c = &cyc[rng.random_range(0..cyc.len())];
    PointRep::new(sys, w.0.clone(), c.0.clone())
        .unwrap_or_else(|_| sys.extend_to_point(&w.0).unwrap())
}

/// Up to 12 atoms with random rational weights.
pub fn random_atomic<R: Rng>(rng: &mut R, sys: &Subshift) -> AtomicMeasure {
    let k = rng.random_range(1..=12);
    let atoms: Vec<(PointRep, Rational)> = (0..k)
        .map(|_| (random_point(rng, sys), int(rng.random_range(1..=9))))
        .collect();
    let total: Rational = atoms.iter().map(|(_, w)| w.clone()).sum();
    AtomicMeasure::new(atoms.into_iter().map(|(x, w)| (x, w / &total)).collect()).unwrap()
}

/// The exponent `n E(Δ_x^n)`, from the empirical measure of `x`.
pub fn point_exponent(energy: &EnergyFunctional, x: &PointRep, n: usize) -> Rational {
    let delta = AtomicMeasure::empirical(x, n).unwrap();
    energy.eval_exact(&delta) * int(n as i64)
}

pub fn word_exponent(sys: &Subshift, energy: &EnergyFunctional, word: &[u8], n: usize) -> Rational {
    point_exponent(energy, &sys.extend_to_point(word).unwrap(), n)
}

/// The join `U_0^{n-1}` as distinct nonempty sets of words of length `len`
/// (at least `res(U) + n − 1`).
pub fn join_word_sets(
    sys: &Subshift,
    cover: &Cover,
    n: usize,
    len: usize,
) -> (Vec<Word>, Vec<Vec<bool>>) {
    let words = sys.words(len);
    let k = cover.len();
    let mut sets: Vec<Vec<bool>> = Vec::new();
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let choice: Vec<usize> = (0..n)
            .map(|_| {
                let d = c % k;
                c /= k;
                d
            })
            .collect();
        let member: Vec<bool> = words
            .iter()
            .map(|w| (0..n).all(|i| cover.elements()[choice[i]].contains_prefix(&w.0[i..])))
            .collect();
        if member.iter().any(|&b| b) && !sets.contains(&member) {
            sets.push(member);
        }
    }
    (words, sets)
}

/// Smallest number of sets covering every index, by branching on the
/// element with fewest covering sets.
pub fn min_set_cover(universe: usize, sets: &[Vec<bool>]) -> usize {
    fn rec(covered: &mut Vec<bool>, sets: &[Vec<bool>], used: usize, best: &mut usize) {
        if used >= *best {
            return;
        }
        let mut pick = None;
        let mut fewest = usize::MAX;
        for e in 0..covered.len() {
            if !covered[e] {
                let c = sets.iter().filter(|s| s[e]).count();
                if c < fewest {
                    fewest = c;
                    pick = Some(e);
                }
            }
        }
        let Some(e) = pick else {
            *best = used;
            return;
        };
        for s in sets.iter().filter(|s| s[e]) {
            let before = covered.clone();
            for (c, &b) in covered.iter_mut().zip(s) {
                *c |= b;
            }
            rec(covered, sets, used + 1, best);
            *covered = before;
        }
    }
    let mut best = sets.len() + 1;
    rec(&mut vec![false; universe], sets, 0, &mut best);
    best
}

/// `N(U_0^{n-1})` from word sets.
pub fn subcover_count_oracle(sys: &Subshift, cover: &Cover, n: usize) -> usize {
    let (words, sets) = join_word_sets(sys, cover, n, cover.resolution() + n - 1);
    min_set_cover(words.len(), &sets)
}

fn exp_sum(exponents: &[Rational]) -> ExpSum {
    let mut s = ExpSum::new();
    for q in exponents {
        s.add(q.clone(), 1);
    }
    s
}

fn exp_f64(exponents: &[Rational]) -> f64 {
    let m = exponents
        .iter()
        .map(nlpress_core::rational::to_f64)
        .fold(f64::NEG_INFINITY, f64::max);
    m + exponents
        .iter()
        .map(|q| (nlpress_core::rational::to_f64(q) - m).exp())
        .sum::<f64>()
        .ln()
}

/// Brute-force `p1`, `p3`, `p4` on tiny instances, or `None` when the
/// search space is too large.
pub struct CoverOracle {
    pub p1: ExpSum,
    pub p3: ExpSum,
    pub p4: ExpSum,
}

pub fn cover_oracle(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
) -> Option<CoverOracle> {
    let len = (cover.resolution() + n - 1).max(n + energy.window() - 1);
    let (words, sets) = join_word_sets(sys, cover, n, len);
    if sets.len() > 14 {
        return None;
    }
    let weight: Vec<Rational> = words
        .iter()
        .map(|w| word_exponent(sys, energy, &w.0, n))
        .collect();
    // classes of words with the same membership pattern
    let mut classes: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for i in 0..words.len() {
        classes
            .entry(sets.iter().map(|s| s[i]).collect())
            .or_default()
            .push(i);
    }
    let classes: Vec<(Vec<usize>, Vec<usize>)> = classes
        .into_iter()
        .map(|(sig, ws)| ((0..sets.len()).filter(|&h| sig[h]).collect(), ws))
        .collect();
    let space: f64 = classes.iter().map(|(h, _)| h.len() as f64).product();
    if space > 2e5 {
        return None;
    }
    // p1: every assignment of classes to homes
    let mut best1: Option<(f64, Vec<Rational>)> = None;
    let mut idx = vec![0usize; classes.len()];
    loop {
        let mut top: BTreeMap<usize, Rational> = BTreeMap::new();
        for (c, (homes, ws)) in classes.iter().enumerate() {
            let h = homes[idx[c]];
            for &w in ws {
                let e = top.entry(h).or_insert_with(|| weight[w].clone());
                if weight[w] > *e {
                    *e = weight[w].clone();
                }
            }
        }
        let ex: Vec<Rational> = top.into_values().collect();
        let v = exp_f64(&ex);
        if best1.as_ref().is_none_or(|(b, _)| v < *b) {
            best1 = Some((v, ex));
        }
        let mut c = 0;
        while c < classes.len() {
            idx[c] += 1;
            if idx[c] < classes[c].0.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
        if c == classes.len() {
            break;
        }
    }
    // p3, p4: every subcover
    let mut best3: Option<(f64, Vec<Rational>)> = None;
    let mut best4: Option<(f64, Vec<Rational>)> = None;
    for mask in 1u32..(1 << sets.len()) {
        let chosen: Vec<usize> = (0..sets.len()).filter(|&h| mask >> h & 1 == 1).collect();
        if !(0..words.len()).all(|i| chosen.iter().any(|&h| sets[h][i])) {
            continue;
        }
        let sup: Vec<Rational> = chosen
            .iter()
            .map(|&h| {
                (0..words.len())
                    .filter(|&i| sets[h][i])
                    .map(|i| weight[i].clone())
                    .max()
                    .unwrap()
            })
            .collect();
        let inf: Vec<Rational> = chosen
            .iter()
            .map(|&h| {
                (0..words.len())
                    .filter(|&i| sets[h][i])
                    .map(|i| weight[i].clone())
                    .min()
                    .unwrap()
            })
            .collect();
        let (v3, v4) = (exp_f64(&sup), exp_f64(&inf));
        if best3.as_ref().is_none_or(|(b, _)| v3 < *b) {
            best3 = Some((v3, sup));
        }
        if best4.as_ref().is_none_or(|(b, _)| v4 < *b) {
            best4 = Some((v4, inf));
        }
    }
    Some(CoverOracle {
        p1: exp_sum(&best1?.1),
        p3: exp_sum(&best3?.1),
        p4: exp_sum(&best4?.1),
    })
}

/// Brute-force `P_n(2^-m)` and `Q_n(2^-m)` over a finite set of eventually
/// periodic points: a maximum-weight set of pairwise separated points and a
/// minimum-weight spanning set, found by exhaustive branching on each
/// connected component of the "not separated" graph. Returns the two sums
/// as float logs and exact sums.
pub fn separated_spanning_oracle(
    sys: &Subshift,
    energy: &EnergyFunctional,
    n: usize,
    m: u32,
) -> ((f64, ExpSum), (f64, ExpSum)) {
    let len = (n + m as usize).max(n + energy.window() - 1);
    let points: Vec<PointRep> = sys
        .words(len)
        .iter()
        .map(|w| sys.extend_to_point(&w.0).unwrap())
        .collect();
    let q: Vec<Rational> = points
        .iter()
        .map(|x| point_exponent(energy, x, n))
        .collect();
    let w: Vec<f64> = q.iter().map(nlpress_core::rational::to_f64).collect();
    let eps = nlpress_core::Dyadic::Pow(m);
    let near: Vec<Vec<usize>> = (0..points.len())
        .map(|i| {
            (0..points.len())
                .filter(|&j| points[i].in_bowen_ball(&points[j], n, eps))
                .collect()
        })
        .collect();
    // connected components
    let mut comp = vec![usize::MAX; points.len()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..points.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = id;
        while let Some(v) = stack.pop() {
            members.push(v);
            for &u in &near[v] {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    stack.push(u);
                }
            }
        }
        comps.push(members);
    }
    let mut sep = Vec::new();
    let mut span = Vec::new();
    for c in &comps {
        sep.extend(mwis(c, &near, &w));
        span.extend(min_dominating(c, &near, &w));
    }
    let pick = |set: &[usize]| -> (f64, ExpSum) {
        let ex: Vec<Rational> = set.iter().map(|&i| q[i].clone()).collect();
        (exp_f64(&ex), exp_sum(&ex))
    };
    (pick(&sep), pick(&span))
}

fn mwis(vertices: &[usize], near: &[Vec<usize>], w: &[f64]) -> Vec<usize> {
    fn rec(
        rest: &[usize],
        near: &[Vec<usize>],
        w: &[f64],
        cur: &mut Vec<usize>,
        val: f64,
        best: &mut (f64, Vec<usize>),
    ) {
        let bound = val + rest.iter().map(|&v| w[v].exp()).sum::<f64>();
        if bound <= best.0 {
            return;
        }
        let Some((&v, tail)) = rest.split_first() else {
            *best = (val, cur.clone());
            return;
        };
        let kept: Vec<usize> = tail
            .iter()
            .copied()
            .filter(|u| !near[v].contains(u))
            .collect();
        cur.push(v);
        rec(&kept, near, w, cur, val + w[v].exp(), best);
        cur.pop();
        rec(tail, near, w, cur, val, best);
    }
    // weights are shifted by the component maximum to keep exp finite
    let top = vertices
        .iter()
        .map(|&v| w[v])
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = w.iter().map(|x| x - top).collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    rec(vertices, near, &shifted, &mut Vec::new(), 0.0, &mut best);
    best.1
}

fn min_dominating(vertices: &[usize], near: &[Vec<usize>], w: &[f64]) -> Vec<usize> {
    fn rec(
        vertices: &[usize],
        near: &[Vec<usize>],
        w: &[f64],
        dominated: &mut BTreeMap<usize, usize>,
        cur: &mut Vec<usize>,
        val: f64,
        best: &mut (f64, Vec<usize>),
    ) {
        if val >= best.0 {
            return;
        }
        let open = vertices.iter().copied().find(|v| dominated[v] == 0);
        let Some(u) = open else {
            *best = (val, cur.clone());
            return;
        };
        // some point within the ball of u must be chosen
        for &s in vertices.iter().filter(|s| near[**s].contains(&u)) {
            for t in &near[s] {
                if let Some(d) = dominated.get_mut(t) {
                    *d += 1;
                }
            }
            cur.push(s);
            rec(vertices, near, w, dominated, cur, val + w[s].exp(), best);
            cur.pop();
            for t in &near[s] {
                if let Some(d) = dominated.get_mut(t) {
                    *d -= 1;
                }
            }
        }
    }
    let top = vertices
        .iter()
        .map(|&v| w[v])
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = w.iter().map(|x| x - top).collect();
    let mut dominated: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    let mut best = (f64::INFINITY, Vec::new());
    rec(
        vertices,
        near,
        &shifted,
        &mut dominated,
        &mut Vec::new(),
        0.0,
        &mut best,
    );
    best.1
}

/// `Σ_k C(n,k) e^{k a + (n−k) b}`: the partition function of the full
/// 2-shift with `f(1) = a`, `f(0) = b`.
pub fn binomial_sum(n: usize, a: &Rational, b: &Rational) -> ExpSum {
    let mut s = ExpSum::new();
    let mut c: u64 = 1;
    for k in 0..=n {
        s.add(a * int(k as i64) + b * int((n - k) as i64), c);
        c = c * (n - k) as u64 / (k + 1) as u64;
    }
    s
}

/// `max_p H(p) + p²` on a grid of step `1e-6`.
pub fn grid_oracle() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 1..1_000_000u32 {
        let p = i as f64 * 1e-6;
        let h = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        best = best.max(h + p * p);
    }
    best.max(1.0)
}
