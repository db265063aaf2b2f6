//! Exhaustive enumeration of small connected graphs up to isomorphism, and
//! random samplers for trees and high-girth graphs. Test infrastructure for
//! the exhaustive invariants, exposed because the acceptance suite needs it.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dist, Graph};

/// Pair bitmask of the edge set under a vertex relabeling; the canonical
/// form of a graph is the minimum over all permutations. Only usable for
/// n <= 11 (bitmask in u64).
fn relabeled_mask(edges: &[(usize, usize)], perm: &[usize]) -> u64 {
    let mut mask = 0u64;
    for &(u, v) in edges {
        let (a, b) = (perm[u].min(perm[v]), perm[u].max(perm[v]));
        mask |= 1 << (b * (b - 1) / 2 + a);
    }
    mask
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k % 2 == 0 {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out
}

fn canonical(n: usize, edges: &[(usize, usize)], perms: &[Vec<usize>]) -> u64 {
    debug_assert!(perms.len() == (1..=n).product::<usize>());
    perms
        .iter()
        .map(|p| relabeled_mask(edges, p))
        .min()
        .unwrap()
}

/// All connected graphs with 1..=n_max vertices, one representative per
/// isomorphism class. Built by vertex augmentation: every connected graph
/// on n vertices arises from a connected graph on n-1 vertices by adding a
/// vertex joined to a nonempty neighbor subset.
pub fn connected_graphs_up_to(n_max: usize) -> Vec<Graph> {
    assert!((1..=7).contains(&n_max), "enumeration supported for n <= 7");
    let mut result = vec![Graph::new(1, []).unwrap()];
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()]; // edge lists, n-1 vertices
    for n in 2..=n_max {
        let perms = permutations(n);
        let mut seen = HashSet::new();
        let mut next_level = Vec::new();
        for parent in &level {
            for subset in 1u32..1 << (n - 1) {
                let mut edges = parent.clone();
                for v in 0..n - 1 {
                    if subset >> v & 1 == 1 {
                        edges.push((v, n - 1));
                    }
                }
                if seen.insert(canonical(n, &edges, &perms)) {
                    result.push(Graph::new(n, edges.iter().copied()).unwrap());
                    next_level.push(edges);
                }
            }
        }
        level = next_level;
    }
    result
}

/// Uniform random labeled tree on n vertices via its Prüfer sequence.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    assert!(n >= 1);
    if n == 1 {
        return Graph::new(1, []).unwrap();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&v| degree[v] == 1);
    let (u, v) = (last.next().unwrap(), last.next().unwrap());
    edges.push((u, v));
    Graph::new(n, edges).unwrap()
}

/// A random connected graph with girth >= 5: a random spanning tree plus
/// chords accepted only while they close cycles of length >= 5.
pub fn random_girth5_graph(n: usize, extra_edges: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = random_tree(n, rng);
    let mut attempts = 0;
    let mut added = 0;
    let mut verts: Vec<usize> = (0..n).collect();
    while added < extra_edges && attempts < 50 * extra_edges.max(1) {
        attempts += 1;
        verts.shuffle(rng);
        let (u, v) = (verts[0], verts[1]);
        if g.has_edge(u, v) {
            continue;
        }
        // The new cycle through (u, v) has length 1 + d(u, v).
        if g.distances_from(u)[v] >= Dist::Finite(4) {
            let mut edges: Vec<(usize, usize)> = g.edges().collect();
            edges.push((u.min(v), u.max(v)));
            g = Graph::new(n, edges).unwrap();
            added += 1;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::trial_rng;

    #[test]
    fn enumeration_counts_match_oeis() {
        // Connected graphs up to isomorphism on 1..=7 vertices.
        let graphs = connected_graphs_up_to(7);
        let mut counts = [0usize; 8];
        for g in &graphs {
            counts[g.n()] += 1;
        }
        assert_eq!(&counts[1..], &[1, 1, 2, 6, 21, 112, 853]);
        assert_eq!(graphs.len(), 996);
        for g in &graphs {
            assert_eq!(g.components().components.len(), 1);
        }
    }

    #[test]
    fn random_tree_is_tree() {
        let mut rng = trial_rng(11, 0);
        for n in [1, 2, 5, 30] {
            let g = random_tree(n, &mut rng);
            assert_eq!(g.edge_count(), n - 1);
            assert_eq!(g.components().components.len(), 1);
        }
    }

    #[test]
    fn girth5_sampler_respects_girth() {
        let mut rng = trial_rng(12, 0);
        for _ in 0..20 {
            let g = random_girth5_graph(12, 3, &mut rng);
            assert!(g.girth() >= Dist::Finite(5));
            assert_eq!(g.components().components.len(), 1);
        }
    }
}
