//! Permutation crossover and mutation operators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossoverOp {
    Cycle,
    Edge,
    Order,
    PartiallyMapped,
    UniformOrderBased,
}

impl CrossoverOp {
    pub const ALL: [CrossoverOp; 5] = [
        CrossoverOp::Cycle,
        CrossoverOp::Edge,
        CrossoverOp::Order,
        CrossoverOp::PartiallyMapped,
        CrossoverOp::UniformOrderBased,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MutationOp {
    Swap,
    Insert,
    Scramble,
    Inversion,
}

impl MutationOp {
    pub const ALL: [MutationOp; 4] = [MutationOp::Swap, MutationOp::Insert, MutationOp::Scramble, MutationOp::Inversion];
}

/// Applies `op` with probability `prob_percent / 100`; otherwise returns copies of the parents.
pub fn crossover<R: Rng + ?Sized>(
    p1: &[usize],
    p2: &[usize],
    op: CrossoverOp,
    prob_percent: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    debug_assert_eq!(p1.len(), p2.len());
    if !rng.gen_bool((prob_percent / 100.0).clamp(0.0, 1.0)) {
        return (p1.to_vec(), p2.to_vec());
    }
    match op {
        CrossoverOp::Cycle => cycle_crossover(p1, p2),
        CrossoverOp::Edge => (edge_crossover(p1, p2, rng), edge_crossover(p1, p2, rng)),
        CrossoverOp::Order => {
            let (a, b) = cut_points(p1.len(), rng);
            (order_child(p1, p2, a, b), order_child(p2, p1, a, b))
        }
        CrossoverOp::PartiallyMapped => {
            let (a, b) = cut_points(p1.len(), rng);
            (pmx_child(p1, p2, a, b), pmx_child(p2, p1, a, b))
        }
        CrossoverOp::UniformOrderBased => {
            let mask: Vec<bool> = (0..p1.len()).map(|_| rng.gen_bool(0.5)).collect();
            (uniform_order_child(p1, p2, &mask), uniform_order_child(p2, p1, &mask))
        }
    }
}

/// Two cut points `a ≤ b` (inclusive segment `a..=b`).
fn cut_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    (a.min(b), a.max(b))
}

fn positions(p: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Cycles are copied alternately from each parent.
pub fn cycle_crossover(p1: &[usize], p2: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = p1.len();
    let pos1 = positions(p1);
    let mut c1 = vec![0; n];
    let mut c2 = vec![0; n];
    let mut visited = vec![false; n];
    let mut cycle = 0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut i = start;
        loop {
            visited[i] = true;
            if cycle % 2 == 0 {
                c1[i] = p1[i];
                c2[i] = p2[i];
            } else {
                c1[i] = p2[i];
                c2[i] = p1[i];
            }
            i = pos1[p2[i]];
            if i == start {
                break;
            }
        }
        cycle += 1;
    }
    (c1, c2)
}

/// OX1: keeps `p1[a..=b]` in place and fills the rest in `p2` order,
/// both starting after the second cut and wrapping around.
pub fn order_child(p1: &[usize], p2: &[usize], a: usize, b: usize) -> Vec<usize> {
    let n = p1.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in a..=b {
        child[i] = p1[i];
        used[p1[i]] = true;
    }
    let mut write = (b + 1) % n;
    for k in 0..n {
        let v = p2[(b + 1 + k) % n];
        if !used[v] {
            child[write] = v;
            used[v] = true;
            write = (write + 1) % n;
        }
    }
    child
}

/// PMX: keeps `p1[a..=b]` in place, places the displaced segment genes of
/// `p2` through the segment mapping, and copies the rest from `p2`.
pub fn pmx_child(p1: &[usize], p2: &[usize], a: usize, b: usize) -> Vec<usize> {
    let n = p1.len();
    let pos2 = positions(p2);
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in a..=b {
        child[i] = p1[i];
        used[p1[i]] = true;
    }
    for i in a..=b {
        let gene = p2[i];
        if used[gene] {
            continue;
        }
        let mut k = i;
        while (a..=b).contains(&k) {
            k = pos2[p1[k]];
        }
        child[k] = gene;
        used[gene] = true;
    }
    for i in 0..n {
        if child[i] == usize::MAX {
            child[i] = p2[i];
        }
    }
    child
}

/// Keeps `p1` genes where `mask` is set and fills the other positions with
/// the missing genes in the order they appear in `p2`.
pub fn uniform_order_child(p1: &[usize], p2: &[usize], mask: &[bool]) -> Vec<usize> {
    let mut used = vec![false; p1.len()];
    for (i, &keep) in mask.iter().enumerate() {
        if keep {
            used[p1[i]] = true;
        }
    }
    let mut fill = p2.iter().copied().filter(|&v| !used[v]);
    mask.iter()
        .enumerate()
        .map(|(i, &keep)| if keep { p1[i] } else { fill.next().expect("fill genes match free slots") })
        .collect()
}

/// Edge recombination producing one child from the union of both parents'
/// (cyclic) adjacencies. Shared edges are preferred, then the neighbour
/// with the shortest remaining edge list; remaining ties and dead ends are
/// resolved at random.
pub fn edge_crossover<R: Rng + ?Sized>(p1: &[usize], p2: &[usize], rng: &mut R) -> Vec<usize> {
    let n = p1.len();
    if n <= 1 {
        return p1.to_vec();
    }
    // Each list holds (neighbour, shared) entries, at most four.
    let mut table: Vec<Vec<(usize, bool)>> = vec![Vec::with_capacity(4); n];
    for (parent, p) in [p1, p2].into_iter().enumerate() {
        for i in 0..n {
            let v = p[i];
            for w in [p[(i + n - 1) % n], p[(i + 1) % n]] {
                if w == v {
                    continue;
                }
                match table[v].iter_mut().find(|e| e.0 == w) {
                    Some(e) => e.1 |= parent == 1,
                    None => table[v].push((w, false)),
                }
            }
        }
    }
    let mut placed = vec![false; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut child = Vec::with_capacity(n);
    let mut current = p1[rng.gen_range(0..n)];
    loop {
        child.push(current);
        placed[current] = true;
        if let Some(k) = remaining.iter().position(|&v| v == current) {
            remaining.swap_remove(k);
        }
        if child.len() == n {
            break;
        }
        let neighbours: Vec<(usize, bool)> = table[current].iter().copied().filter(|e| !placed[e.0]).collect();
        for (w, _) in &neighbours {
            table[*w].retain(|e| e.0 != current);
        }
        let next = if neighbours.is_empty() {
            *remaining.choose(rng).expect("unplaced genes remain")
        } else {
            let shared: Vec<usize> = neighbours.iter().filter(|e| e.1).map(|e| e.0).collect();
            if !shared.is_empty() {
                *shared.choose(rng).expect("non-empty")
            } else {
                let live = |w: usize| table[w].iter().filter(|e| !placed[e.0]).count();
                let shortest = neighbours.iter().map(|e| live(e.0)).min().expect("non-empty");
                let best: Vec<usize> = neighbours.iter().map(|e| e.0).filter(|&w| live(w) == shortest).collect();
                *best.choose(rng).expect("non-empty")
            }
        };
        current = next;
    }
    child
}

/// Applies `op` with probability `prob_percent / 100` in place.
pub fn mutate<R: Rng + ?Sized>(genome: &mut [usize], op: MutationOp, prob_percent: f64, rng: &mut R) {
    if !rng.gen_bool((prob_percent / 100.0).clamp(0.0, 1.0)) || genome.len() < 2 {
        return;
    }
    match op {
        MutationOp::Swap => {
            let (i, j) = distinct_pair(genome.len(), rng);
            genome.swap(i, j);
        }
        MutationOp::Insert => {
            let (from, to) = distinct_pair(genome.len(), rng);
            insert_gene(genome, from, to);
        }
        MutationOp::Scramble => {
            let (a, b) = segment(genome.len(), rng);
            genome[a..=b].shuffle(rng);
        }
        MutationOp::Inversion => {
            let (a, b) = segment(genome.len(), rng);
            invert_segment(genome, a, b);
        }
    }
}

/// Two distinct positions in random order; requires `n ≥ 2`.
fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// A random segment `a < b` (inclusive) of a genome of length `n ≥ 2`.
pub fn segment<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let (i, j) = distinct_pair(n, rng);
    (i.min(j), i.max(j))
}

/// Reverses `genome[a..=b]`.
pub fn invert_segment(genome: &mut [usize], a: usize, b: usize) {
    genome[a..=b].reverse();
}

/// Removes the gene at `from` and reinserts it so that it ends up at `to`.
pub fn insert_gene(genome: &mut [usize], from: usize, to: usize) {
    if from < to {
        genome[from..=to].rotate_left(1);
    } else {
        genome[to..=from].rotate_right(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::is_permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_keeps_positions() {
        let p1 = [0, 1, 2, 3];
        let p2 = [3, 2, 1, 0];
        let (c1, c2) = cycle_crossover(&p1, &p2);
        for c in [&c1, &c2] {
            assert!(is_permutation(c));
            for i in 0..4 {
                assert!(c[i] == p1[i] || c[i] == p2[i]);
            }
        }
        // Textbook example.
        let a = [0, 1, 2, 3, 4, 5, 6, 7, 8];
        let b = [8, 2, 6, 7, 1, 5, 4, 0, 3];
        let (x, y) = cycle_crossover(&a, &b);
        assert_eq!(x, vec![0, 2, 6, 3, 1, 5, 4, 7, 8]);
        assert_eq!(y, vec![8, 1, 2, 7, 4, 5, 6, 0, 3]);
    }

    #[test]
    fn order_textbook() {
        let p1 = [0, 1, 2, 3, 4, 5, 6, 7, 8];
        let p2 = [8, 2, 6, 7, 1, 5, 4, 0, 3];
        assert_eq!(order_child(&p1, &p2, 3, 6), vec![2, 7, 1, 3, 4, 5, 6, 0, 8]);
    }

    #[test]
    fn pmx_textbook() {
        let p1 = [0, 1, 2, 3, 4, 5, 6, 7, 8];
        let p2 = [8, 2, 6, 7, 1, 5, 4, 0, 3];
        assert_eq!(pmx_child(&p1, &p2, 3, 6), vec![8, 2, 1, 3, 4, 5, 6, 0, 7]);
    }

    #[test]
    fn uniform_order() {
        let p1 = [0, 1, 2, 3, 4];
        let p2 = [4, 3, 2, 1, 0];
        let mask = [true, false, true, false, false];
        assert_eq!(uniform_order_child(&p1, &p2, &mask), vec![0, 4, 2, 3, 1]);
    }

    #[test]
    fn edge_child_uses_parent_edges_when_possible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = [0, 1, 2, 3, 4, 5];
        for _ in 0..50 {
            let c = edge_crossover(&p, &p, &mut rng);
            assert!(is_permutation(&c));
            // Identical parents: every edge is shared, so the tour is preserved up to rotation and direction.
            for i in 0..6 {
                let (a, b) = (c[i], c[(i + 1) % 6]);
                assert!((a + 1) % 6 == b || (b + 1) % 6 == a, "{c:?}");
            }
        }
    }

    #[test]
    fn zero_probability_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p1 = [2, 0, 1];
        let p2 = [1, 2, 0];
        for op in CrossoverOp::ALL {
            assert_eq!(crossover(&p1, &p2, op, 0.0, &mut rng), (p1.to_vec(), p2.to_vec()));
        }
        for op in MutationOp::ALL {
            let mut g = p1;
            mutate(&mut g, op, 0.0, &mut rng);
            assert_eq!(g, p1);
        }
    }

    #[test]
    fn swap_on_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut g = [0, 1];
        mutate(&mut g, MutationOp::Swap, 100.0, &mut rng);
        assert_eq!(g, [1, 0]);
    }

    #[test]
    fn inversion_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let original: Vec<usize> = (0..10).collect();
        let mut g = original.clone();
        let (a, b) = segment(g.len(), &mut rng);
        invert_segment(&mut g, a, b);
        invert_segment(&mut g, a, b);
        assert_eq!(g, original);
    }

    #[test]
    fn insert_moves_one_gene() {
        let mut g = [0, 1, 2, 3, 4];
        insert_gene(&mut g, 1, 3);
        assert_eq!(g, [0, 2, 3, 1, 4]);
        insert_gene(&mut g, 3, 0);
        assert_eq!(g, [1, 0, 2, 3, 4]);
    }
}
