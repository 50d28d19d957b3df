//! Library results checked against independent, deliberately naive reference implementations.

use obfevo_core::evolution::non_dominated_sort;
use obfevo_core::metrics::{gd_plus, igd_plus, rank_biserial, wilcoxon_signed_rank};
use obfevo_core::problem::tsplib::{euc_2d, euclidean_instance};
use obfevo_core::problem::{
    brute_force_optimum, compute_ground_truth, generate_ap_instance, solve_ap_exact, BruteForceOptimum,
    GroundTruthSet,
};
use obfevo_core::{Direction, Permutation, WeightMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Heap's algorithm, independent of the library's lexicographic enumeration.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k % 2 == 0 { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

#[test]
fn hungarian_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let n = rng.gen_range(1..=7);
        let direction = if trial % 3 == 0 { Direction::Minimize } else { Direction::Maximize };
        let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-50..=100)).collect();
        let m = WeightMatrix::new(n, n, direction, entries.clone()).unwrap();
        let (perm, value) = solve_ap_exact(&m).unwrap();
        let cost = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| entries[i * n + j]).sum::<i64>();
        let costs = all_permutations(n).iter().map(|p| cost(p)).collect::<Vec<_>>();
        let best = match direction {
            Direction::Maximize => *costs.iter().max().unwrap(),
            Direction::Minimize => *costs.iter().min().unwrap(),
        };
        assert_eq!(value, best, "trial {trial}");
        assert_eq!(cost(perm.as_slice()), best);
    }
}

#[test]
fn brute_force_single_objective_matches_hungarian() {
    for seed in 0..20 {
        let inst = generate_ap_instance(seed, 6, 6, 1, 0, 30).unwrap();
        let (_, value) = solve_ap_exact(&inst.objectives[0]).unwrap();
        match brute_force_optimum(&inst).unwrap() {
            BruteForceOptimum::Single { value: v, .. } => assert_eq!(v, value),
            other => panic!("unexpected {other:?}"),
        }
    }
}

/// Front index of each point by repeated peeling with a full dominance scan.
fn peel_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let dom = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y);
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> =
            left.iter().copied().filter(|&i| !left.iter().any(|&j| dom(&points[j], &points[i]))).collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

#[test]
fn non_dominated_sort_matches_peeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n_obj = rng.gen_range(2..=3);
        let points: Vec<Vec<f64>> =
            (0..30).map(|_| (0..n_obj).map(|_| rng.gen_range(0..8) as f64).collect()).collect();
        assert_eq!(non_dominated_sort(&points), peel_fronts(&points));
    }
}

fn reference_distance(found: &[Vec<f64>], truth: &[Vec<f64>], scale: &[f64], inverted: bool) -> f64 {
    let (from, to) = if inverted { (truth, found) } else { (found, truth) };
    let mut total = 0.0;
    for p in from {
        let mut best = f64::INFINITY;
        for q in to {
            let (a, z) = if inverted { (q, p) } else { (p, q) };
            let mut s = 0.0;
            for k in 0..a.len() {
                let d = if z[k] > a[k] { (z[k] - a[k]) / scale[k] } else { 0.0 };
                s += d * d;
            }
            best = best.min(s.sqrt());
        }
        total += best;
    }
    total / from.len() as f64
}

#[test]
fn gd_igd_match_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let truth_points = random_set(&mut rng, 6);
        let found = random_set(&mut rng, k);
        let truth = GroundTruthSet::from_points(truth_points).unwrap();
        let pts = truth.points().to_vec();
        let ones = [1.0, 1.0];
        let spans: Vec<f64> = truth.ideal().iter().zip(truth.nadir()).map(|(i, n)| i - n).collect();
        for (normalized, scale) in [(false, &ones[..]), (true, &spans[..])] {
            if normalized && spans.iter().any(|&s| s == 0.0) {
                continue;
            }
            let gd = gd_plus(&found, &truth, normalized).unwrap();
            let igd = igd_plus(&found, &truth, normalized).unwrap();
            assert!((gd - reference_distance(&found, &pts, scale, false)).abs() < 1e-9);
            assert!((igd - reference_distance(&found, &pts, scale, true)).abs() < 1e-9);
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|_| vec![rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)]).collect()
}

/// Two-sided p-value by enumerating all 2^n sign patterns of the ranks.
fn enumerated_p(diffs: &[f64]) -> (f64, f64) {
    let mut abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank_of = |x: f64| {
        let lo = abs.iter().position(|&v| v == x).unwrap();
        let hi = abs.iter().rposition(|&v| v == x).unwrap();
        (lo + hi + 2) as f64 / 2.0
    };
    let ranks: Vec<f64> = diffs.iter().map(|d| rank_of(d.abs())).collect();
    let w: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let n = diffs.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s <= w + 1e-9 {
            le += 1;
        }
        if s >= w - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (w, (2.0 * (le.min(ge) as f64 / total)).min(1.0))
}

#[test]
fn wilcoxon_ten_pairs_matches_enumeration() {
    let diffs = [1.5, -0.5, 2.5, 3.0, -1.0, 4.5, 5.0, 2.0, -3.5, 6.0];
    let t = wilcoxon_signed_rank(&diffs);
    let (w, p) = enumerated_p(&diffs);
    assert_eq!(t.w_plus, w);
    assert_eq!(t.w_minus, 10.0);
    assert!((t.p_value - p).abs() < 1e-12);
    // scipy.stats.wilcoxon(method="exact") gives W = 10, p = 0.083984375 for this sample.
    assert!((t.p_value - 0.083984375).abs() < 5e-4);
}

#[test]
fn wilcoxon_random_small_samples_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let diffs: Vec<f64> = (0..n)
            .map(|_| {
                let v = rng.gen_range(1..=6) as f64;
                if rng.gen_bool(0.5) { v } else { -v }
            })
            .collect();
        let t = wilcoxon_signed_rank(&diffs);
        let (_, p) = enumerated_p(&diffs);
        assert!((t.p_value - p).abs() < 1e-12, "{diffs:?}");
    }
}

#[test]
fn rank_biserial_from_rank_sums() {
    let diffs = [1.5, -0.5, 2.5, 3.0, -1.0, 4.5, 5.0, 2.0, -3.5, 6.0];
    let t = wilcoxon_signed_rank(&diffs);
    let (r, degenerate) = rank_biserial(&diffs);
    assert!(!degenerate);
    assert_eq!(r, (t.w_plus - t.w_minus) / 55.0);
}

#[test]
fn tour_length_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let n = rng.gen_range(3..=12);
        let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))).collect();
        let inst = euclidean_instance("random", &coords).unwrap();
        let tour = Permutation::random(n, &mut rng);
        let t = tour.as_slice();
        let direct: i64 = (0..n)
            .map(|i| {
                let (a, b) = (coords[t[i]], coords[t[(i + 1) % n]]);
                (((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() + 0.5).floor() as i64
            })
            .sum();
        assert_eq!(inst.evaluate(0, &tour).unwrap(), direct);
        assert_eq!(euc_2d(coords[0], coords[1]), euc_2d(coords[1], coords[0]));
    }
}

#[test]
fn tsp_brute_force_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let n = rng.gen_range(4..=8);
        let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
        let inst = euclidean_instance("random", &coords).unwrap();
        let best = all_permutations(n)
            .into_iter()
            .map(|p| inst.evaluate(0, &Permutation::new(p).unwrap()).unwrap())
            .min()
            .unwrap();
        match brute_force_optimum(&inst).unwrap() {
            BruteForceOptimum::Single { value, .. } => assert_eq!(value, best),
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn ground_truth_lies_on_brute_force_front() {
    for seed in 0..5 {
        let inst = generate_ap_instance(seed, 6, 6, 2, 0, 20).unwrap();
        let truth = compute_ground_truth(&inst).unwrap();
        let BruteForceOptimum::Front(front) = brute_force_optimum(&inst).unwrap() else {
            panic!("expected a front");
        };
        for p in truth.points() {
            assert!(front.contains(p), "seed {seed}: {p:?} not Pareto optimal");
        }
    }
}
