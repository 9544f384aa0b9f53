//! Vertex priorities: degree-major, ID-minor total order, and graphs whose
//! adjacency lists are sorted by it.

use crate::graph::{BipartiteGraph, VertexId};

/// Priorities are a permutation of `1..=n`; a larger value means higher
/// priority.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityMap {
    priority: Vec<u32>,
}

impl PriorityMap {
    /// Bin sort over degrees; within one degree, lower IDs get lower priority.
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut bins = vec![0u32; max_degree + 2];
        for &d in degrees {
            bins[d as usize + 1] += 1;
        }
        for d in 0..=max_degree {
            bins[d + 1] += bins[d];
        }
        let mut priority = vec![0u32; degrees.len()];
        for (v, &d) in degrees.iter().enumerate() {
            bins[d as usize] += 1;
            priority[v] = bins[d as usize];
        }
        Self { priority }
    }

    pub(crate) fn from_raw(priority: Vec<u32>) -> Self {
        Self { priority }
    }

    #[inline]
    pub fn of(&self, v: VertexId) -> u32 {
        self.priority[v as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.priority
    }

    pub fn len(&self) -> usize {
        self.priority.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priority.is_empty()
    }

    /// Vertices from lowest to highest priority.
    pub fn ascending(&self) -> Vec<VertexId> {
        let mut order = vec![0 as VertexId; self.priority.len()];
        for (v, &p) in self.priority.iter().enumerate() {
            order[p as usize - 1] = v as VertexId;
        }
        order
    }
}

pub fn assign_priorities(g: &BipartiteGraph) -> PriorityMap {
    PriorityMap::from_degrees(&g.degrees())
}

/// A graph paired with a priority map, every adjacency list ascending by
/// neighbor priority.
#[derive(Clone, Debug)]
pub struct RankedGraph {
    graph: BipartiteGraph,
    priority: PriorityMap,
}

impl RankedGraph {
    /// Assigns priorities and sorts adjacency.
    pub fn new(g: &BipartiteGraph) -> Self {
        let p = assign_priorities(g);
        sort_adjacency(g, p)
    }

    pub(crate) fn from_sorted(graph: BipartiteGraph, priority: PriorityMap) -> Self {
        debug_assert!(is_priority_sorted(&graph, &priority));
        Self { graph, priority }
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn priority(&self) -> &PriorityMap {
        &self.priority
    }

    pub fn into_parts(self) -> (BipartiteGraph, PriorityMap) {
        (self.graph, self.priority)
    }
}

/// Re-sorts every adjacency list ascending by neighbor priority in O(n + m).
pub fn sort_adjacency(g: &BipartiteGraph, p: PriorityMap) -> RankedGraph {
    assert_eq!(g.n(), p.len(), "priority map does not cover the graph");
    let graph = g.reorder_adjacency(&p.ascending());
    RankedGraph { graph, priority: p }
}

pub fn is_priority_sorted(g: &BipartiteGraph, p: &PriorityMap) -> bool {
    g.vertices()
        .all(|v| g.neighbors(v).windows(2).all(|w| p.of(w[0]) < p.of(w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn definition_order(g: &BipartiteGraph) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = g.vertices().collect();
        vs.sort_by_key(|&v| (g.degree(v), v));
        vs
    }

    #[test]
    fn complete_three_by_two() {
        let g = gen::complete(3, 2);
        let p = assign_priorities(&g);
        let v0 = 0;
        let v1 = 1;
        let (u0, u1, u2) = (2, 3, 4);
        assert!(p.of(v1) > p.of(v0));
        assert!(p.of(v0) > p.of(u2));
        assert!(p.of(u2) > p.of(u1));
        assert!(p.of(u1) > p.of(u0));
        assert_eq!(p.ascending(), definition_order(&g));
    }

    #[test]
    fn distinct_degrees_follow_degree() {
        // upper 0: 3 edges, upper 1: 1 edge; lower degrees 2, 1, 1
        let g = BipartiteGraph::from_labeled_edges([(0, 0), (0, 1), (0, 2), (1, 0)]).unwrap();
        let p = assign_priorities(&g);
        let mut by_degree: Vec<VertexId> = g.vertices().collect();
        by_degree.sort_by_key(|&v| (g.degree(v), v));
        assert_eq!(p.ascending(), by_degree);
    }

    #[test]
    fn singleton_vertex() {
        let p = PriorityMap::from_degrees(&[0]);
        assert_eq!(p.as_slice(), &[1]);
    }

    #[test]
    fn sorted_adjacency_of_complete_graph() {
        let g = gen::complete(3, 2);
        let rg = RankedGraph::new(&g);
        assert_eq!(rg.graph().neighbors(0), &[2, 3, 4]);
        assert!(is_priority_sorted(rg.graph(), rg.priority()));
        let again = sort_adjacency(rg.graph(), rg.priority().clone());
        for v in g.vertices() {
            assert_eq!(again.graph().neighbors(v), rg.graph().neighbors(v));
        }
    }

    #[test]
    fn isolated_vertex_keeps_empty_list() {
        let g = BipartiteGraph::from_internal_edges(vec![0, 1], vec![0], [(2, 0)]).unwrap();
        let rg = RankedGraph::new(&g);
        assert!(rg.graph().neighbors(1).is_empty());
        assert_eq!(rg.priority().len(), 3);
    }
}
