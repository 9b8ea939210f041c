//! Property tests for the structural invariants of each module. Instances
//! are drawn from a proptest seed so failures shrink to a reproducible seed.

mod common;

use common::*;
use nlpress_core::cover::iterated_join;
use nlpress_core::entropy::{cover_entropy_at, h_cover_static, h_rate};
use nlpress_core::factor::SlidingBlockCode;
use nlpress_core::pressure::{
    greedy_bn, greedy_disjointify, pressure_row, CoverPressure, PressureOptions, ReportConfig,
};
use nlpress_core::rational::{abs, int, ratio};
use nlpress_core::subshift::bowen_resolution;
use nlpress_core::transport::w1;
use nlpress_core::variational::objective;
use nlpress_core::{
    AtomicMeasure, Cover, CylinderFunction, Dyadic, EnergyFunctional, MarkovMeasure, Partition,
    PointRep, Subshift,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn opts() -> PressureOptions {
    PressureOptions::default()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Every periodic point of period at most `p`.
fn periodic_points(sys: &Subshift, p: usize) -> Vec<PointRep> {
    let mut out: Vec<PointRep> = Vec::new();
    for len in 1..=p {
        for w in sys.words(len) {
            if let Ok(x) = PointRep::periodic(sys, w.0) {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    out
}

#[test]
fn bowen_balls_are_cylinders() {
    for sys in [
        Subshift::full(2),
        split_fixed_point(),
        Subshift::from_matrix(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap(),
    ] {
        let pts = periodic_points(&sys, 4);
        for n in 1..=3 {
            for m in 0..=2u32 {
                let len = bowen_resolution(n, m).unwrap();
                for x in &pts {
                    for y in &pts {
                        assert_eq!(
                            x.in_bowen_ball(y, n, Dyadic::Pow(m)),
                            x.prefix(len) == y.prefix(len)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn bowen_step_of_the_sandwich() {
    // same element of U_0^{n-1} and diam(U) ≤ ε ⇒ W(Δ_x^n, Δ_y^n) ≤ ε
    let mut r = rng(7);
    for _ in 0..20 {
        let sys = random_sft(&mut r, 3);
        let cover = random_cover(&mut r, &sys, 2);
        let eps = cover.diam(&sys).to_rational();
        for n in 1..=3 {
            let join = iterated_join(&sys, &cover, n).unwrap();
            let len = cover.resolution() + n;
            let pts: Vec<PointRep> = sys
                .words(len)
                .iter()
                .map(|w| sys.extend_to_point(&w.0).unwrap())
                .collect();
            for a in join.elements() {
                let inside: Vec<&PointRep> = pts.iter().filter(|x| a.contains_point(x)).collect();
                for x in &inside {
                    for y in &inside {
                        let d = w1(
                            &AtomicMeasure::empirical(x, n).unwrap(),
                            &AtomicMeasure::empirical(y, n).unwrap(),
                        );
                        assert!(d <= eps, "W = {d} > diam = {eps}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn ultrametric_and_preimages(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let (x, y, z) = (random_point(&mut r, &sys), random_point(&mut r, &sys), random_point(&mut r, &sys));
        let d = |a: &PointRep, b: &PointRep| a.dist(b).to_rational();
        prop_assert!(d(&x, &z) <= d(&x, &y).max(d(&y, &z)));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        let pre = sys.preimages(&x);
        prop_assert!(!pre.is_empty());
        for p in pre {
            prop_assert_eq!(p.shift(), x.clone());
        }
    }

    #[test]
    fn assignments_are_finer_partitions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let v = random_cover(&mut r, &sys, 2);
        let atoms = v.generated_partition(&sys);
        let n_v = v.minimal_subcover_count(&sys).unwrap();
        for beta in v.enumerate_assignments(&sys).take(64) {
            prop_assert!(beta.is_partition(&sys));
            prop_assert!(beta.is_finer(&sys, &v));
            prop_assert!(beta.len() >= n_v);
            for class in beta.elements() {
                // a union of atoms: each atom lies inside or outside
                for a in atoms.elements() {
                    prop_assert!(a.is_subset(&sys, class) || !a.intersects(&sys, class));
                }
            }
        }
    }

    #[test]
    fn joins_refine_and_compose(seed in any::<u64>(), a in 1usize..3, b in 1usize..3) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let u = random_cover(&mut r, &sys, 2);
        let v = random_cover(&mut r, &sys, 2);
        let uv = u.join(&sys, &v);
        prop_assert!(uv.is_finer(&sys, &u) && uv.is_finer(&sys, &v));
        let whole = iterated_join(&sys, &u, a + b).unwrap();
        let mut tail = iterated_join(&sys, &u, b).unwrap();
        for _ in 0..a {
            tail = tail.preimage(&sys);
        }
        let split = iterated_join(&sys, &u, a).unwrap().join(&sys, &tail);
        let mut lhs = whole.dedup().elements().to_vec();
        let mut rhs = split.dedup().elements().to_vec();
        lhs.sort();
        rhs.sort();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn transport_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let (mu, nu, rho) = (random_atomic(&mut r, &sys), random_atomic(&mut r, &sys), random_atomic(&mut r, &sys));
        let (mn, nr, mr) = (w1(&mu, &nu), w1(&nu, &rho), w1(&mu, &rho));
        prop_assert!(mn <= mu.tv(&nu));
        prop_assert_eq!(mn.clone(), w1(&nu, &mu));
        prop_assert!(mr <= mn + nr);
    }

    #[test]
    fn energy_modulus_and_locality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let e = random_energy(&mut r, &sys, 2);
        let (mu, nu) = (random_atomic(&mut r, &sys), random_atomic(&mut r, &sys));
        let gap = abs(&(e.eval_exact(&mu) - e.eval_exact(&nu)));
        prop_assert!(gap <= e.modulus_bound(&w1(&mu, &nu)));
        // Δ_x^n only sees the first n + w − 1 symbols
        let n = r.random_range(1..=4);
        let x = random_point(&mut r, &sys);
        let head = x.prefix(n + e.window() - 1);
        let y = sys.extend_to_point(&head).unwrap();
        let ex = e.eval_exact(&AtomicMeasure::empirical(&x, n).unwrap());
        prop_assert_eq!(ex, e.eval_exact(&AtomicMeasure::empirical(&y, n).unwrap()));
    }

    #[test]
    fn linear_energy_is_affine(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let f = CylinderFunction::from_fn(&sys, 2, |w| int(w[0] as i64 - 2 * w[1] as i64)).unwrap();
        let e = EnergyFunctional::linear(f);
        let (mu, nu) = (random_atomic(&mut r, &sys), random_atomic(&mut r, &sys));
        let t = ratio(r.random_range(1..8), 8);
        let mix = AtomicMeasure::convex_combine(&[(t.clone(), mu.clone()), (int(1) - &t, nu.clone())]).unwrap();
        prop_assert_eq!(e.eval_exact(&mix), &t * e.eval_exact(&mu) + (int(1) - &t) * e.eval_exact(&nu));
    }

    #[test]
    fn cover_entropy_properties(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let u = random_cover(&mut r, &sys, 2);
        let v = random_cover(&mut r, &sys, 2);
        let mu = random_atomic(&mut r, &sys);
        let h = |c: &Cover| h_cover_static(&sys, &mu, c, &opts()).unwrap();
        let hu = h(&u);
        prop_assert!(hu >= -1e-12);
        prop_assert!(hu <= (u.minimal_subcover_count(&sys).unwrap() as f64).ln() + 1e-12);
        let uv = u.join(&sys, &v);
        prop_assert!(h(&uv) >= hu - 1e-12);
        prop_assert!(h(&uv) <= hu + h(&v) + 1e-12);
        let pulled = h_cover_static(&sys, &mu, &u.preimage(&sys), &opts()).unwrap();
        prop_assert!(pulled <= h_cover_static(&sys, &mu.pushforward(), &u, &opts()).unwrap() + 1e-12);
    }

    #[test]
    fn partition_entropy_rate_is_nonincreasing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = Subshift::full(2);
        let p: f64 = r.random_range(0.05..0.95);
        let q: f64 = r.random_range(0.05..0.95);
        let mu = MarkovMeasure::new(&sys, vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]).unwrap();
        let est = h_rate(&sys, &mu, &Partition::cylinders(&sys, 1), 6, &opts()).unwrap();
        prop_assert!(est.monotone);
        let least = est.per_n.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
        prop_assert!(close(least, est.final_value));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn pressure_chains_and_certificates(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let config = ReportConfig { n_values: vec![], m_list: vec![0, 1], window: None, greedy: true };
        let row = pressure_row(&inst.sys, &inst.cover, &inst.energy, n, &config, &opts()).unwrap();
        for a in &row.audits {
            prop_assert!(a.holds, "{} fails: {} vs {}", a.name, a.lhs, a.rhs);
        }
        let e = inst.energy.compile(&inst.sys).unwrap();
        let parts: Vec<Partition> = inst.cover.enumerate_assignments(&inst.sys).take(n).collect();
        let p1 = CoverPressure::new(&inst.sys, &inst.cover, &e, n, &opts()).unwrap().p1().unwrap().value;
        prop_assert!(greedy_bn(&inst.sys, &e, n, &parts, &opts()).unwrap().certifies(&p1, n));
        let m = inst.cover.lebesgue_exponent(&inst.sys);
        prop_assert!(greedy_disjointify(&inst.sys, &inst.cover, &e, n, m, &opts()).unwrap().certificate.passes());
    }

    #[test]
    fn separated_sums_match_brute_force(seed in any::<u64>(), n in 1usize..=3, m in 0u32..=2) {
        let mut r = rng(seed);
        let sys = random_sft(&mut r, 3);
        let energy = random_energy(&mut r, &sys, 2);
        let e = energy.compile(&sys).unwrap();
        let got = nlpress_core::pressure::extremal_sums(&sys, &e, n, nlpress_core::pressure::Radius::Pow(m), &opts()).unwrap();
        let ((_, sep), (_, span)) = separated_spanning_oracle(&sys, &energy, n, m);
        prop_assert_eq!(got.separated.exact, sep);
        prop_assert_eq!(got.spanning.exact, span);
    }

    #[test]
    fn pullback_commutes_with_join(seed in any::<u64>()) {
        let mut r = rng(seed);
        let target = random_sft(&mut r, 3);
        let (down, hb) = SlidingBlockCode::from_higher_block(&target, 2).unwrap();
        let u = random_cover(&mut r, &target, 2);
        let v = random_cover(&mut r, &target, 2);
        let joined = down.pullback_cover(&u.join(&target, &v)).unwrap();
        let separately = down.pullback_cover(&u).unwrap().join(&hb, &down.pullback_cover(&v).unwrap());
        let (mut a, mut b) = (joined.dedup().elements().to_vec(), separately.dedup().elements().to_vec());
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn factor_entropy_at_finite_level(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let target = random_sft(&mut r, 3);
        let (code, hb) = SlidingBlockCode::from_higher_block(&target, 2).unwrap();
        let u = random_cover(&mut r, &target, 2);
        let nu = random_atomic(&mut r, &hb);
        let lhs = cover_entropy_at(&hb, &nu, &code.pullback_cover(&u).unwrap(), n, &opts()).unwrap();
        let rhs = cover_entropy_at(&target, &code.pushforward_atomic(&nu).unwrap(), &u, n, &opts()).unwrap();
        prop_assert!(close(lhs, rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn objective_respects_the_flip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = Subshift::full(2);
        let u = Partition::cylinders(&sys, 1).into_cover();
        let f0 = CylinderFunction::indicator(&sys, &[0]).unwrap();
        let f1 = CylinderFunction::indicator(&sys, &[1]).unwrap();
        let sq = nlpress_core::Polynomial::square(int(1));
        let e = EnergyFunctional::new(vec![(sq.clone(), f0), (sq, f1)]);
        let p: f64 = r.random_range(0.05..0.95);
        let q: f64 = r.random_range(0.05..0.95);
        let mu = MarkovMeasure::new(&sys, vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]).unwrap();
        let flip = SlidingBlockCode::one_block(&sys, &sys, &[1, 0]).unwrap();
        let nlpress_core::factor::Pushforward::Markov(flipped) = flip.pushforward_markov(&mu).unwrap() else {
            panic!("a relabelling keeps the chain Markov");
        };
        let a = objective(&mu, &u, &e, 3, &opts()).unwrap();
        let b = objective(&flipped, &u, &e, 3, &opts()).unwrap();
        prop_assert!(close(a, b), "{} vs {}", a, b);
    }
}
