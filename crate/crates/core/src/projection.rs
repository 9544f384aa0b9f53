//! Cache-aware relabeling: within each layer, vertices are renumbered by
//! descending priority so that the hottest vertices sit at the front of the
//! layer's ID range. Lower IDs stay in `[0, l)` and upper IDs in `[l, l + r)`.

use crate::graph::{Layer, VertexId};
use crate::priority::{PriorityMap, RankedGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMapping {
    forward: Vec<VertexId>,
    inverse: Vec<VertexId>,
}

impl ProjectionMapping {
    #[inline]
    pub fn forward(&self, v: VertexId) -> VertexId {
        self.forward[v as usize]
    }

    #[inline]
    pub fn inverse(&self, v: VertexId) -> VertexId {
        self.inverse[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .iter()
            .enumerate()
            .all(|(v, &f)| v as VertexId == f)
    }
}

/// Returns the projected graph, carrying the original priorities over to the
/// new IDs, and the mapping. Edge indices are unchanged.
pub fn project(rg: &RankedGraph) -> (RankedGraph, ProjectionMapping) {
    let g = rg.graph();
    let p = rg.priority();
    let n = g.n();
    let mut forward = vec![0 as VertexId; n];
    let mut inverse = vec![0 as VertexId; n];
    let mut next_lower: VertexId = 0;
    let mut next_upper = g.lower_count() as VertexId;
    for &v in p.ascending().iter().rev() {
        let slot = match g.layer(v) {
            Layer::Lower => &mut next_lower,
            Layer::Upper => &mut next_upper,
        };
        forward[v as usize] = *slot;
        inverse[*slot as usize] = v;
        *slot += 1;
    }

    let mut moved = vec![0u32; n];
    for v in 0..n {
        moved[forward[v] as usize] = p.of(v as VertexId);
    }
    let priority = PriorityMap::from_raw(moved);
    let projected = g.relabel(&forward, &priority.ascending());
    (
        RankedGraph::from_sorted(projected, priority),
        ProjectionMapping { forward, inverse },
    )
}
