//! Non-dominated sorting, crowding distance and the multi-party layer rule.

use crate::model::{dominates_slice, Solution};

/// Front index of every vector (0 = non-dominated).
pub fn fast_nondominated_sort<V: AsRef<[f64]>>(vectors: &[V]) -> Vec<usize> {
    let n = vectors.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (vectors[i].as_ref(), vectors[j].as_ref());
            if dominates_slice(a, b, 0.0) {
                dominates[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_slice(b, a, 0.0) {
                dominates[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut current: Vec<usize> = (0..n).filter(|i| dominated_by_count[*i] == 0).collect();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = level;
            for &j in &dominates[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        level += 1;
    }
    rank
}

/// Crowding distance of each member of `front` (indices into `vectors`),
/// returned in the order of `front`. Boundary members get infinity.
pub fn crowding_distance<V: AsRef<[f64]>>(vectors: &[V], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = vectors[front[0]].as_ref().len();
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..k {
        let val = |p: usize| vectors[front[p]].as_ref()[obj];
        order.sort_by(|a, b| val(*a).total_cmp(&val(*b)).then(a.cmp(b)));
        let (lo, hi) = (val(order[0]), val(order[n - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi - lo <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            dist[order[w]] += (val(order[w + 1]) - val(order[w - 1])) / (hi - lo);
        }
    }
    dist
}

/// Replaces values by their dense rank (0 for the smallest).
fn dense_ranks(keys: &[usize]) -> Vec<usize> {
    let mut distinct = keys.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    keys.iter().map(|k| distinct.binary_search(k).unwrap_or(0)).collect()
}

/// Multi-party layer index: each party sorts on its own block, the layer key
/// is the sum of party front indices, and layers are numbered densely so
/// members of every party's first front form layer 0 whenever any exist.
pub fn multiparty_ranks(pop: &[Solution]) -> Vec<usize> {
    let parties = pop.first().map_or(0, Solution::num_parties);
    let mut sum = vec![0usize; pop.len()];
    for m in 0..parties {
        let blocks: Vec<&[f64]> = pop.iter().map(|s| s.block(m)).collect();
        for (acc, r) in sum.iter_mut().zip(fast_nondominated_sort(&blocks)) {
            *acc += r;
        }
    }
    dense_ranks(&sum)
}
