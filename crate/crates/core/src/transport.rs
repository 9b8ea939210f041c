//! Wasserstein-1 distance between atomic measures under the shift metric.
//!
//! Two independent routes: the transportation LP solved by exact
//! MODI pivoting, and the closed form for tree metrics, which applies because
//! the shift metric is an ultrametric whose balls are cylinders.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::measure::AtomicMeasure;
use crate::rational::pow2;
use crate::subshift::Dyadic;
use crate::{Error, Rational, Result};

/// Largest support handled by the exact LP.
pub const LP_MAX_SUPPORT: usize = 64;
const PIVOT_CAP: usize = 100_000;

/// Exact `W(μ, ν)`: the LP when both supports are small, otherwise the
/// ultrametric closed form (the two agree; see the tests).
pub fn w1(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Rational {
    match w1_lp(mu, nu) {
        Some(Ok(v)) => v,
        _ => w1_hierarchical(mu, nu),
    }
}

/// The transportation LP with cost `d(x, y)`; `None` above the size limit.
pub fn w1_lp(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Option<Result<Rational>> {
    if mu.support_len() > LP_MAX_SUPPORT || nu.support_len() > LP_MAX_SUPPORT {
        return None;
    }
    let supply: Vec<Rational> = mu.atoms().iter().map(|(_, w)| w.clone()).collect();
    let demand: Vec<Rational> = nu.atoms().iter().map(|(_, w)| w.clone()).collect();
    let cost: Vec<Vec<Rational>> = mu
        .atoms()
        .iter()
        .map(|(x, _)| {
            nu.atoms()
                .iter()
                .map(|(y, _)| x.dist(y).to_rational())
                .collect()
        })
        .collect();
    Some(transport(&supply, &demand, &cost).map(|(v, _)| v))
}

/// `W` on a tree: each edge contributes its length times the mass imbalance
/// of the subtree below it. Cylinders `[w]`, `|w| = j ≥ 1`, hang from their
/// parent by an edge of length `2^{-j-1}`; a point hangs from its depth-`J`
/// cylinder by `2^{-J-1}`, `J` large enough to separate the support.
pub fn w1_hierarchical(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Rational {
    let points: Vec<_> = mu
        .atoms()
        .iter()
        .chain(nu.atoms())
        .map(|(x, _)| x)
        .collect();
    let mut depth = 1usize;
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            if let Some(k) = x.common_prefix_len(y) {
                depth = depth.max(k + 1);
            }
        }
    }
    let mut total = Rational::zero();
    for j in 1..=depth {
        let mut diff: BTreeMap<Vec<u8>, Rational> = BTreeMap::new();
        for (x, w) in mu.atoms() {
            *diff.entry(x.prefix(j)).or_insert_with(Rational::zero) += w;
        }
        for (x, w) in nu.atoms() {
            *diff.entry(x.prefix(j)).or_insert_with(Rational::zero) -= w;
        }
        let level: Rational = diff.values().map(|d| d.abs()).sum();
        total += level / pow2(j as u32 + 1);
    }
    let leaf: Rational = mu.tv(nu) * Rational::from_integer(2.into());
    total + leaf / pow2(depth as u32 + 1)
}

/// Distance as a dyadic when `μ` and `ν` are Dirac masses.
pub fn dirac_distance(mu: &AtomicMeasure, nu: &AtomicMeasure) -> Option<Dyadic> {
    match (mu.atoms(), nu.atoms()) {
        ([(x, _)], [(y, _)]) => Some(x.dist(y)),
        _ => None,
    }
}

/// Balanced transportation problem `min Σ c_ij t_ij` with row sums `supply`
/// and column sums `demand`, solved exactly by the MODI method from a
/// northwest-corner start with Bland's rule. Returns the value and the plan.
pub fn transport(
    supply: &[Rational],
    demand: &[Rational],
    cost: &[Vec<Rational>],
) -> Result<(Rational, Vec<Vec<Rational>>)> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::InvalidMeasure("empty transport problem".into()));
    }
    if supply.iter().sum::<Rational>() != demand.iter().sum::<Rational>() {
        return Err(Error::InvalidMeasure("supply and demand differ".into()));
    }
    let mut flow = vec![vec![Rational::zero(); n]; m];
    let mut basic = vec![vec![false; n]; m];

    // northwest corner, keeping exactly m + n - 1 basic cells
    let (mut s, mut d) = (supply.to_vec(), demand.to_vec());
    let (mut i, mut j) = (0, 0);
    loop {
        let t = if s[i] < d[j] {
            s[i].clone()
        } else {
            d[j].clone()
        };
        flow[i][j] = t.clone();
        basic[i][j] = true;
        s[i] -= &t;
        d[j] -= &t;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if (s[i].is_zero() && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }

    for _ in 0..PIVOT_CAP {
        let (u, v) = potentials(&basic, cost);
        // Bland: first cell with negative reduced cost
        let entering = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !basic[i][j] && (&cost[i][j] - &u[i] - &v[j]).is_negative());
        let Some((ei, ej)) = entering else {
            let value = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| &flow[i][j] * &cost[i][j])
                .sum();
            return Ok((value, flow));
        };
        let cycle = basis_path(&basic, ei, ej);
        // cycle[0] is the entering cell (+), then alternating signs
        let theta = cycle
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&(i, j)| flow[i][j].clone())
            .min()
            .expect("cycle has a minus cell");
        let leaving = cycle
            .iter()
            .skip(1)
            .step_by(2)
            .filter(|&&(i, j)| flow[i][j] == theta)
            .min()
            .copied()
            .expect("some minus cell attains theta");
        for (k, &(i, j)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                flow[i][j] += &theta;
            } else {
                flow[i][j] -= &theta;
            }
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
    }
    Err(Error::SearchBudget(PIVOT_CAP as u64))
}

fn potentials(basic: &[Vec<bool>], cost: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Rational>) {
    let m = basic.len();
    let n = basic[0].len();
    let mut u: Vec<Option<Rational>> = vec![None; m];
    let mut v: Vec<Option<Rational>> = vec![None; n];
    u[0] = Some(Rational::zero());
    let mut queue = VecDeque::from([(true, 0usize)]);
    while let Some((is_row, k)) = queue.pop_front() {
        if is_row {
            for j in 0..n {
                if basic[k][j] && v[j].is_none() {
                    v[j] = Some(&cost[k][j] - u[k].as_ref().unwrap());
                    queue.push_back((false, j));
                }
            }
        } else {
            for i in 0..m {
                if basic[i][k] && u[i].is_none() {
                    u[i] = Some(&cost[i][k] - v[k].as_ref().unwrap());
                    queue.push_back((true, i));
                }
            }
        }
    }
    (
        u.into_iter()
            .map(|x| x.expect("basis spans all rows"))
            .collect(),
        v.into_iter()
            .map(|x| x.expect("basis spans all columns"))
            .collect(),
    )
}

/// The cycle closed by adding `(ei, ej)` to the basis tree, starting with the
/// entering cell and alternating between row and column moves.
fn basis_path(basic: &[Vec<bool>], ei: usize, ej: usize) -> Vec<(usize, usize)> {
    let m = basic.len();
    let n = basic[0].len();
    // tree search from column ej to row ei over basic cells
    let node_count = m + n;
    let mut parent: Vec<Option<usize>> = vec![None; node_count];
    let start = m + ej;
    let target = ei;
    let mut seen = vec![false; node_count];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        if a == target {
            break;
        }
        let neighbours: Vec<usize> = if a < m {
            (0..n).filter(|&j| basic[a][j]).map(|j| m + j).collect()
        } else {
            (0..m).filter(|&i| basic[i][a - m]).collect()
        };
        for b in neighbours {
            if !seen[b] {
                seen[b] = true;
                parent[b] = Some(a);
                queue.push_back(b);
            }
        }
    }
    let mut cells = vec![(ei, ej)];
    let mut a = target;
    while let Some(p) = parent[a] {
        let cell = if a < m { (a, p - m) } else { (p, a - m) };
        cells.push(cell);
        a = p;
    }
    cells
}
