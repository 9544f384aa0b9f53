//! Synthetic graphs for tests, demos and benchmarks. Labels equal indices
//! within each layer: upper `u_i` has label `i`, lower `v_j` has label `j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{BipartiteGraph, VertexId};

fn build(r: usize, l: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> BipartiteGraph {
    let lower = (0..l as u64).collect();
    let upper = (0..r as u64).collect();
    let edges = edges
        .into_iter()
        .map(|(u, v)| ((u + l) as VertexId, v as VertexId));
    BipartiteGraph::from_internal_edges(lower, upper, edges).expect("generator emits valid edges")
}

/// Complete bipartite graph with `r` upper and `l` lower vertices.
pub fn complete(r: usize, l: usize) -> BipartiteGraph {
    build(r, l, (0..r).flat_map(|u| (0..l).map(move |v| (u, v))))
}

/// Two upper hubs `u0, u1` joined to `v0..v(a-1)`, and two lower hubs
/// `va, v(a+1)` joined to `u2..u(b+1)`.
pub fn hub(a: usize, b: usize) -> BipartiteGraph {
    let left = (0..a).flat_map(|i| [(0, i), (1, i)]);
    let right = (2..b + 2).flat_map(move |j| [(j, a), (j, a + 1)]);
    build(b + 2, a + 2, left.chain(right))
}

/// Upper hub `u0` joined to `v0..v(a-1)`, lower hub `va` joined to
/// `u1..ua`, plus the matching `v_i - u(i+1)`.
pub fn hub_path(a: usize) -> BipartiteGraph {
    let upper_hub = (0..a).map(|i| (0, i));
    let lower_hub = (1..=a).map(move |j| (j, a));
    let matching = (0..a).map(|i| (i + 1, i));
    build(a + 1, a + 1, upper_hub.chain(lower_hub).chain(matching))
}

/// Star with one upper center and `k` lower leaves.
pub fn star(k: usize) -> BipartiteGraph {
    build(1, k, (0..k).map(|v| (0, v)))
}

/// Every upper/lower pair present independently with probability `p`.
pub fn random(r: usize, l: usize, p: f64, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..r {
        for v in 0..l {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    build(r, l, edges)
}

/// Random graph with exactly `m` distinct edges (or all pairs if fewer exist).
pub fn random_with_edges(r: usize, l: usize, m: usize, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = m.min(r * l);
    let mut seen = std::collections::HashSet::with_capacity(target);
    let mut edges = Vec::with_capacity(target);
    while edges.len() < target {
        let e = (rng.gen_range(0..r), rng.gen_range(0..l));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    build(r, l, edges)
}

/// Two disjoint 4-cycles.
pub fn two_four_cycles() -> BipartiteGraph {
    build(
        4,
        4,
        [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (3, 3),
        ],
    )
}

/// Path `u0 - v0 - u1 - v1`... with `edges` edges (alternating layers).
pub fn path(edges: usize) -> BipartiteGraph {
    let r = edges / 2 + 1;
    let l = edges.div_ceil(2);
    build(r, l, (0..edges).map(|i| (i.div_ceil(2), i / 2)))
}
