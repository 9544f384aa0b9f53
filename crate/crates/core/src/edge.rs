//! Per-edge butterfly counts.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{add, choose2, vpp_fill, WedgeCounter, BRUTE_FORCE_EDGE_LIMIT};
use crate::graph::{BipartiteGraph, EdgeId, VertexId};
use crate::priority::RankedGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCounts {
    /// Indexed by edge index.
    pub counts: Vec<u64>,
    pub butterflies: u128,
}

impl EdgeCounts {
    pub fn sum(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// One `upper<TAB>lower<TAB>count` line per edge, in edge order, using the
    /// graph's original labels.
    pub fn write_tsv<W: Write>(&self, g: &BipartiteGraph, mut out: W) -> Result<()> {
        for (e, &c) in self.counts.iter().enumerate() {
            let (u, v) = g.edge(e as EdgeId);
            writeln!(out, "{}\t{}\t{}", g.label(u), g.label(v), c)?;
        }
        Ok(())
    }
}

#[inline]
fn bump(counts: &mut [u64], e: EdgeId, delta: u64) -> Result<()> {
    let slot = &mut counts[e as usize];
    *slot = slot.checked_add(delta).ok_or(Error::Overflow)?;
    Ok(())
}

/// Two cache-aware wedge passes per start vertex: the first fills the wedge
/// counter, the second credits `count(w) - 1` to both edges of each wedge.
/// Edge indices of a projected graph equal those of the original, so the
/// result lines up with the input edge order.
pub fn count_per_edge_evpp(rg: &RankedGraph) -> Result<EdgeCounts> {
    let (g, p) = (rg.graph(), rg.priority());
    let mut counter = WedgeCounter::new(g.n());
    let mut counts = vec![0u64; g.m()];
    let mut butterflies = 0u128;
    for u in g.vertices() {
        vpp_fill(g, p, u, &mut counter);
        for (&v, &uv) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            let floor = p.of(u).max(p.of(v));
            let (nbrs, inc) = (g.neighbors(v), g.incident_edges(v));
            for (&w, &vw) in nbrs.iter().zip(inc).rev() {
                if p.of(w) <= floor {
                    break;
                }
                let delta = counter.get(w) as u64 - 1;
                if delta > 0 {
                    bump(&mut counts, uv, delta)?;
                    bump(&mut counts, vw, delta)?;
                }
            }
        }
        for &w in counter.touched() {
            butterflies = add(butterflies, choose2(counter.get(w) as u64))?;
        }
        counter.clear();
    }
    Ok(EdgeCounts {
        counts,
        butterflies,
    })
}

/// Oracle: enumerates every butterfly as a quadruple and credits its four
/// edges.
pub fn brute_force_per_edge(g: &BipartiteGraph) -> Result<EdgeCounts> {
    if g.m() > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::GuardExceeded {
            edges: g.m(),
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    let index: HashMap<(VertexId, VertexId), EdgeId> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &uv)| (uv, e as EdgeId))
        .collect();
    let lower: Vec<VertexId> = g.lower_ids().collect();
    let mut counts = vec![0u64; g.m()];
    let mut butterflies = 0u128;
    for u in g.upper_ids() {
        for w in (u + 1)..g.n() as VertexId {
            for (i, &v) in lower.iter().enumerate() {
                let (Some(&uv), Some(&wv)) = (index.get(&(u, v)), index.get(&(w, v))) else {
                    continue;
                };
                for &x in &lower[i + 1..] {
                    if let (Some(&ux), Some(&wx)) = (index.get(&(u, x)), index.get(&(w, x))) {
                        butterflies += 1;
                        for e in [uv, wv, ux, wx] {
                            counts[e as usize] += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(EdgeCounts {
        counts,
        butterflies,
    })
}

/// Each butterfly through `u` uses exactly two of `u`'s edges, so
/// `⋈_u = ½ Σ_{e ∋ u} ⋈_e`.
pub fn per_vertex_from_edges(ec: &EdgeCounts, g: &BipartiteGraph) -> Result<Vec<u128>> {
    if ec.counts.len() != g.m() {
        return Err(Error::Inconsistent(format!(
            "{} edge counts for a graph with {} edges",
            ec.counts.len(),
            g.m()
        )));
    }
    g.vertices()
        .map(|v| {
            let sum: u128 = g
                .incident_edges(v)
                .iter()
                .map(|&e| ec.counts[e as usize] as u128)
                .sum();
            if sum % 2 == 1 {
                Err(Error::Inconsistent(format!(
                    "odd incident edge sum {sum} at vertex {v}"
                )))
            } else {
                Ok(sum / 2)
            }
        })
        .collect()
}
