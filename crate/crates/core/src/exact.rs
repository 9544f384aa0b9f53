//! Exact global butterfly counting.
//!
//! Three wedge-based engines share the same accounting:
//!
//! * [`count_ibs`] starts every wedge from one whole layer, chosen to minimize
//!   the squared-degree sum of the opposite (middle) layer.
//! * [`count_vp`] starts each wedge from the vertex with the highest priority,
//!   so hubs are rarely used as middle vertices.
//! * [`count_vpp`] processes the same number of wedges but lets the highest
//!   priority vertex be the *end* vertex, which concentrates the counter
//!   updates on few hot vertices.
//!
//! A wedge `(u, v, w)` is counted once it increments the counter of `w`.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Layer, VertexId};
use crate::priority::RankedGraph;
use crate::projection::project;

pub const BRUTE_FORCE_EDGE_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ibs,
    Vp,
    Vpp,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ibs => "ibs",
            Algorithm::Vp => "vp",
            Algorithm::Vpp => "vpp",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub butterflies: u128,
    pub wedges_processed: u64,
    pub start_accesses: u64,
    pub middle_accesses: u64,
    pub end_accesses: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_millis")]
    pub elapsed: Duration,
}

impl CountReport {
    /// Equality on everything but wall time.
    pub fn same_counts(&self, other: &Self) -> bool {
        Self {
            elapsed: Duration::ZERO,
            ..self.clone()
        } == Self {
            elapsed: Duration::ZERO,
            ..other.clone()
        }
    }
}

fn serialize_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[inline]
pub(crate) fn choose2(c: u64) -> u128 {
    let c = c as u128;
    c * c.saturating_sub(1) / 2
}

#[inline]
pub(crate) fn add(acc: u128, x: u128) -> Result<u128> {
    acc.checked_add(x).ok_or(Error::Overflow)
}

/// Dense per-vertex wedge counter with a touched list, so a reset costs only
/// the entries written since the last one.
#[derive(Clone, Debug)]
pub struct WedgeCounter {
    counts: Vec<u32>,
    touched: Vec<VertexId>,
}

impl WedgeCounter {
    pub fn new(n: usize) -> Self {
        Self {
            counts: vec![0; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn hit(&mut self, w: VertexId) {
        let c = &mut self.counts[w as usize];
        if *c == 0 {
            self.touched.push(w);
        }
        *c += 1;
    }

    #[inline]
    pub fn get(&self, w: VertexId) -> u32 {
        self.counts[w as usize]
    }

    pub fn touched(&self) -> &[VertexId] {
        &self.touched
    }

    /// Σ C(count, 2) over touched vertices, then zeroes them.
    pub fn drain_pairs(&mut self) -> Result<u128> {
        let mut sum = 0u128;
        for &w in &self.touched {
            let c = std::mem::take(&mut self.counts[w as usize]);
            sum = add(sum, choose2(c as u64))?;
        }
        self.touched.clear();
        Ok(sum)
    }

    pub fn clear(&mut self) {
        for &w in &self.touched {
            self.counts[w as usize] = 0;
        }
        self.touched.clear();
    }

    pub fn is_clear(&self) -> bool {
        self.touched.is_empty() && self.counts.iter().all(|&c| c == 0)
    }
}

/// Layer-priority baseline: every vertex of the chosen start layer, all of its
/// wedges with `w.id > u.id`.
pub fn count_ibs(g: &BipartiteGraph) -> Result<CountReport> {
    let clock = Instant::now();
    // Middles come from the other layer; exact ties start from the upper layer.
    let start = if g.sum_squared_degrees(Layer::Upper) < g.sum_squared_degrees(Layer::Lower) {
        g.lower_ids()
    } else {
        g.upper_ids()
    };
    let mut counter = WedgeCounter::new(g.n());
    let mut report = CountReport::default();
    for u in start {
        report.start_accesses += 1;
        for &v in g.neighbors(u) {
            report.middle_accesses += 1;
            for &w in g.neighbors(v) {
                if w > u {
                    counter.hit(w);
                    report.wedges_processed += 1;
                }
            }
        }
        report.butterflies = add(report.butterflies, counter.drain_pairs()?)?;
    }
    report.end_accesses = report.wedges_processed;
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Vertex-priority counting: wedges `(u, v, w)` with `p(v) < p(u)` and
/// `p(w) < p(u)`, scanning ascending adjacency with early exit.
pub fn count_vp(rg: &RankedGraph) -> Result<CountReport> {
    let clock = Instant::now();
    let (g, p) = (rg.graph(), rg.priority());
    let mut counter = WedgeCounter::new(g.n());
    let mut report = CountReport::default();
    for u in g.vertices() {
        report.start_accesses += 1;
        let pu = p.of(u);
        for &v in g.neighbors(u) {
            if p.of(v) >= pu {
                break;
            }
            report.middle_accesses += 1;
            for &w in g.neighbors(v) {
                if p.of(w) >= pu {
                    break;
                }
                counter.hit(w);
                report.wedges_processed += 1;
            }
        }
        report.butterflies = add(report.butterflies, counter.drain_pairs()?)?;
    }
    report.end_accesses = report.wedges_processed;
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Work from one start vertex under the cache-aware rule. Returns
/// `(middle accesses, wedges)`.
#[inline]
pub(crate) fn vpp_fill(
    g: &BipartiteGraph,
    p: &crate::priority::PriorityMap,
    u: VertexId,
    counter: &mut WedgeCounter,
) -> (u64, u64) {
    let pu = p.of(u);
    let mut wedges = 0;
    let nbrs = g.neighbors(u);
    for &v in nbrs {
        let floor = pu.max(p.of(v));
        for &w in g.neighbors(v).iter().rev() {
            if p.of(w) <= floor {
                break;
            }
            counter.hit(w);
            wedges += 1;
        }
    }
    (nbrs.len() as u64, wedges)
}

/// Cache-aware vertex-priority counting: wedges `(u, v, w)` with
/// `p(w) > p(u)` and `p(w) > p(v)`, scanning each middle vertex's list from
/// its high-priority end. Intended for projected graphs (see [`prepare_vpp`]).
pub fn count_vpp(rg: &RankedGraph) -> Result<CountReport> {
    let clock = Instant::now();
    let (g, p) = (rg.graph(), rg.priority());
    let mut counter = WedgeCounter::new(g.n());
    let mut report = CountReport::default();
    for u in g.vertices() {
        report.start_accesses += 1;
        let (middles, wedges) = vpp_fill(g, p, u, &mut counter);
        report.middle_accesses += middles;
        report.wedges_processed += wedges;
        report.butterflies = add(report.butterflies, counter.drain_pairs()?)?;
    }
    report.end_accesses = report.wedges_processed;
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Priorities, sorted adjacency and projection: the input expected by
/// [`count_vpp`] and the parallel engine.
pub fn prepare_vpp(g: &BipartiteGraph) -> (RankedGraph, crate::projection::ProjectionMapping) {
    project(&RankedGraph::new(g))
}

/// Runs one engine end to end, including its preprocessing. `elapsed`
/// covers the whole pipeline.
pub fn count(g: &BipartiteGraph, algo: Algorithm) -> Result<CountReport> {
    let clock = Instant::now();
    let mut report = match algo {
        Algorithm::Ibs => count_ibs(g)?,
        Algorithm::Vp => count_vp(&RankedGraph::new(g))?,
        Algorithm::Vpp => count_vpp(&prepare_vpp(g).0)?,
    };
    report.elapsed = clock.elapsed();
    Ok(report)
}

/// Every wedge the vertex-priority engine processes, in processing order.
pub fn for_each_wedge_vp(rg: &RankedGraph, mut f: impl FnMut(VertexId, VertexId, VertexId)) {
    let (g, p) = (rg.graph(), rg.priority());
    for u in g.vertices() {
        let pu = p.of(u);
        for &v in g.neighbors(u).iter().take_while(|&&v| p.of(v) < pu) {
            for &w in g.neighbors(v).iter().take_while(|&&w| p.of(w) < pu) {
                f(u, v, w);
            }
        }
    }
}

/// Every wedge the cache-aware engine processes, in processing order.
pub fn for_each_wedge_vpp(rg: &RankedGraph, mut f: impl FnMut(VertexId, VertexId, VertexId)) {
    let (g, p) = (rg.graph(), rg.priority());
    for u in g.vertices() {
        for &v in g.neighbors(u) {
            let floor = p.of(u).max(p.of(v));
            for &w in g
                .neighbors(v)
                .iter()
                .rev()
                .take_while(|&&w| p.of(w) > floor)
            {
                f(u, v, w);
            }
        }
    }
}

/// Independent oracle: enumerates upper pairs `u < w` and lower pairs
/// `v < x` and tests all four edges by set membership.
pub fn brute_force_count(g: &BipartiteGraph) -> Result<u128> {
    if g.m() > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::GuardExceeded {
            edges: g.m(),
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    let edges: std::collections::HashSet<(VertexId, VertexId)> =
        g.edges().iter().copied().collect();
    let lower: Vec<VertexId> = g.lower_ids().collect();
    let mut total = 0u128;
    for u in g.upper_ids() {
        for w in (u + 1)..g.n() as VertexId {
            for (i, &v) in lower.iter().enumerate() {
                if !(edges.contains(&(u, v)) && edges.contains(&(w, v))) {
                    continue;
                }
                for &x in &lower[i + 1..] {
                    if edges.contains(&(u, x)) && edges.contains(&(w, x)) {
                        total += 1;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Butterflies containing each vertex, from an unpruned wedge pass out of
/// every vertex.
pub fn count_per_vertex(g: &BipartiteGraph) -> Result<Vec<u128>> {
    let mut counter = WedgeCounter::new(g.n());
    let mut out = Vec::with_capacity(g.n());
    for u in g.vertices() {
        for &v in g.neighbors(u) {
            for &w in g.neighbors(v) {
                if w != u {
                    counter.hit(w);
                }
            }
        }
        out.push(counter.drain_pairs()?);
    }
    Ok(out)
}

/// Number of three-edge paths: each is counted once at its middle edge.
pub fn count_caterpillars(g: &BipartiteGraph) -> Result<u128> {
    g.edges().iter().try_fold(0u128, |acc, &(u, v)| {
        let a = g.degree(u) as u128 - 1;
        let b = g.degree(v) as u128 - 1;
        let term = a.checked_mul(b).ok_or(Error::Overflow)?;
        add(acc, term)
    })
}

/// `4·butterflies / caterpillars`, or `None` when there are no caterpillars.
pub fn clustering_coefficient(g: &BipartiteGraph) -> Result<Option<f64>> {
    let butterflies = count(g, Algorithm::Vpp)?.butterflies;
    Ok(coefficient(butterflies, count_caterpillars(g)?))
}

pub(crate) fn coefficient(butterflies: u128, caterpillars: u128) -> Option<f64> {
    (caterpillars > 0).then(|| (4 * butterflies) as f64 / caterpillars as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub upper_vertices: usize,
    pub lower_vertices: usize,
    pub edges: usize,
    pub duplicates_removed: usize,
    pub butterflies: u128,
    pub caterpillars: u128,
    pub clustering_coefficient: Option<f64>,
}

pub fn stats(g: &BipartiteGraph) -> Result<GraphStats> {
    let butterflies = count(g, Algorithm::Vpp)?.butterflies;
    let caterpillars = count_caterpillars(g)?;
    Ok(GraphStats {
        upper_vertices: g.upper_count(),
        lower_vertices: g.lower_count(),
        edges: g.m(),
        duplicates_removed: g.duplicates_removed(),
        butterflies,
        caterpillars,
        clustering_coefficient: coefficient(butterflies, caterpillars),
    })
}
