//! Parent and survivor selection on estimated fitness (larger is better).

use std::cmp::Ordering;

use rand::Rng;

use crate::pareto::dominates;

/// Draws `k` contestants uniformly with replacement and returns the index of
/// the best one; ties go to the contestant drawn first.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], k: usize, rng: &mut R) -> usize {
    assert!(!fitness.is_empty() && k >= 1, "tournament needs contestants");
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..k {
        let c = rng.gen_range(0..fitness.len());
        if fitness[c] > fitness[best] {
            best = c;
        }
    }
    best
}

fn descending(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Indices of the `mu` individuals with the best fitness, best first; stable on ties.
pub fn truncation_survivors(fitness: &[f64], mu: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| descending(fitness[a], fitness[b]));
    idx.truncate(mu);
    idx
}

/// Fast non-dominated sorting. Each front lists indices in ascending order.
pub fn non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominators = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&points[i], &points[j]) {
                dominated_by_me[i].push(j);
                dominators[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by_me[j].push(i);
                dominators[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominators[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                dominators[j] -= 1;
                if dominators[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
///
/// Fronts of at most two members are all infinite. Boundary members of an
/// objective get +∞ unless that objective is constant over the front, in
/// which case it contributes nothing.
pub fn crowding_distance(points: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let len = front.len();
    if len <= 2 {
        return vec![f64::INFINITY; len];
    }
    let mut dist = vec![0.0; len];
    let n_obj = points[front[0]].len();
    let mut order: Vec<usize> = (0..len).collect();
    for m in 0..n_obj {
        let value = |k: usize| points[front[k]][m];
        order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap_or(Ordering::Equal));
        let (lo, hi) = (value(order[0]), value(order[len - 1]));
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        for w in 1..len - 1 {
            dist[order[w]] += (value(order[w + 1]) - value(order[w - 1])) / span;
        }
    }
    dist
}

/// Rank (front number) and crowding distance of the individuals chosen by
/// [`nsga2_survivors`], in survivor order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NsgaRanking {
    pub survivors: Vec<usize>,
    pub rank: Vec<usize>,
    pub crowding: Vec<f64>,
}

/// Fills `mu` slots front by front; the last admitted front is ordered by
/// descending crowding distance.
pub fn nsga2_survivors(points: &[Vec<f64>], mu: usize) -> NsgaRanking {
    let mut out = NsgaRanking::default();
    for (r, front) in non_dominated_sort(points).into_iter().enumerate() {
        if out.survivors.len() >= mu {
            break;
        }
        let crowd = crowding_distance(points, &front);
        let mut members: Vec<(usize, f64)> = front.into_iter().zip(crowd).collect();
        let room = mu - out.survivors.len();
        if members.len() > room {
            members.sort_by(|a, b| descending(a.1, b.1));
            members.truncate(room);
        }
        for (i, c) in members {
            out.survivors.push(i);
            out.rank.push(r);
            out.crowding.push(c);
        }
    }
    out
}

/// Binary tournament on (lower rank, then larger crowding); ties go to the first contestant.
pub fn crowded_tournament<R: Rng + ?Sized>(rank: &[usize], crowding: &[f64], rng: &mut R) -> usize {
    let a = rng.gen_range(0..rank.len());
    let b = rng.gen_range(0..rank.len());
    if rank[b] < rank[a] || (rank[b] == rank[a] && crowding[b] > crowding[a]) {
        b
    } else {
        a
    }
}
