//! Immutable two-layer adjacency structure.
//!
//! Internal vertex IDs are dense: lower-layer vertices occupy `[0, l)` and
//! upper-layer vertices `[l, l + r)`, so every upper ID exceeds every lower ID.
//! Each vertex keeps the label it had in the input so graphs can be written
//! back out unchanged.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::ops::Range;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    Upper,
    Lower,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Reject data lines carrying more than two columns. KONECT files often
    /// append weights or timestamps, so extra columns are ignored by default.
    pub strict_columns: bool,
}

#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    upper_count: usize,
    lower_count: usize,
    /// `(upper, lower)` pairs in canonical edge order.
    edges: Vec<(VertexId, VertexId)>,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    /// Edge index for every adjacency slot, parallel to `neighbors`.
    incident: Vec<EdgeId>,
    labels: Vec<u64>,
    duplicates_removed: usize,
}

impl BipartiteGraph {
    /// Builds a graph from edges given in internal IDs. `lower_labels` and
    /// `upper_labels` fix the layer sizes. Duplicate edges are dropped, keeping
    /// the first occurrence.
    pub fn from_internal_edges(
        lower_labels: Vec<u64>,
        upper_labels: Vec<u64>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let lower_count = lower_labels.len();
        let upper_count = upper_labels.len();
        let n = lower_count + upper_count;
        if n > VertexId::MAX as usize {
            return Err(Error::config(format!(
                "{n} vertices exceed the 32-bit ID space"
            )));
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut duplicates_removed = 0;
        for (u, v) in edges {
            let (ui, vi) = (u as usize, v as usize);
            if ui < lower_count || ui >= n || vi >= lower_count {
                return Err(Error::Inconsistent(format!(
                    "edge ({u}, {v}) does not join an upper vertex to a lower vertex"
                )));
            }
            if seen.insert((u, v)) {
                kept.push((u, v));
            } else {
                duplicates_removed += 1;
            }
        }
        if kept.len() > EdgeId::MAX as usize {
            return Err(Error::config(
                "edge count exceeds the 32-bit edge index space",
            ));
        }
        let mut labels = lower_labels;
        labels.extend(upper_labels);
        let identity: Vec<VertexId> = (0..n as VertexId).collect();
        let (offsets, neighbors, incident) = build_csr(n, &kept, &identity);
        Ok(Self {
            upper_count,
            lower_count,
            edges: kept,
            offsets,
            neighbors,
            incident,
            labels,
            duplicates_removed,
        })
    }

    /// Builds a graph from `(upper label, lower label)` pairs. Each layer has its
    /// own label namespace; internal IDs follow ascending label order.
    pub fn from_labeled_edges(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
        let mut upper: Vec<u64> = pairs.iter().map(|&(u, _)| u).collect();
        let mut lower: Vec<u64> = pairs.iter().map(|&(_, v)| v).collect();
        upper.sort_unstable();
        upper.dedup();
        lower.sort_unstable();
        lower.dedup();
        let l = lower.len() as u32;
        let edges: Vec<(VertexId, VertexId)> = pairs
            .iter()
            .map(|(u, v)| {
                let ui = upper.binary_search(u).expect("label collected above") as u32;
                let vi = lower.binary_search(v).expect("label collected above") as u32;
                (ui + l, vi)
            })
            .collect();
        Self::from_internal_edges(lower, upper, edges)
    }

    pub fn parse_edge_list<R: BufRead>(reader: R, options: &ParseOptions) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            match parse_data_line(&line, idx + 1, options)? {
                Some(pair) => pairs.push(pair),
                None => continue,
            }
        }
        let g = Self::from_labeled_edges(pairs)?;
        if g.duplicates_removed > 0 {
            log::warn!("removed {} duplicate edges", g.duplicates_removed);
        }
        Ok(g)
    }

    /// Writes the graph back in edge-list form using the original labels.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "% bip unweighted")?;
        writeln!(
            out,
            "% {} {} {}",
            self.m(),
            self.upper_count,
            self.lower_count
        )?;
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", self.label(u), self.label(v))?;
        }
        Ok(())
    }

    pub fn upper_count(&self) -> usize {
        self.upper_count
    }

    pub fn lower_count(&self) -> usize {
        self.lower_count
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.upper_count + self.lower_count
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    pub fn lower_ids(&self) -> Range<VertexId> {
        0..self.lower_count as VertexId
    }

    pub fn upper_ids(&self) -> Range<VertexId> {
        self.lower_count as VertexId..self.n() as VertexId
    }

    pub fn vertices(&self) -> Range<VertexId> {
        0..self.n() as VertexId
    }

    pub fn layer(&self, v: VertexId) -> Layer {
        if (v as usize) < self.lower_count {
            Layer::Lower
        } else {
            Layer::Upper
        }
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge indices parallel to [`Self::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        let v = v as usize;
        &self.incident[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.offsets
            .windows(2)
            .map(|w| (w[1] - w[0]) as u32)
            .collect()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e as usize]
    }

    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn vertex_by_label(&self, layer: Layer, label: u64) -> Option<VertexId> {
        let ids = match layer {
            Layer::Lower => self.lower_ids(),
            Layer::Upper => self.upper_ids(),
        };
        ids.into_iter().find(|&v| self.labels[v as usize] == label)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let (x, y) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(x).contains(&y)
    }

    /// Canonical edge multiset in label space, sorted.
    pub fn labeled_edges(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = self
            .edges
            .iter()
            .map(|&(u, v)| (self.label(u), self.label(v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Σ deg(x)² over one layer.
    pub fn sum_squared_degrees(&self, layer: Layer) -> u128 {
        let ids = match layer {
            Layer::Lower => self.lower_ids(),
            Layer::Upper => self.upper_ids(),
        };
        ids.map(|v| (self.degree(v) as u128).pow(2)).sum()
    }

    /// Σ over edges of min{deg(u), deg(v)}.
    pub fn sum_min_degree(&self) -> u128 {
        self.edges
            .iter()
            .map(|&(u, v)| self.degree(u).min(self.degree(v)) as u128)
            .sum()
    }

    /// The same graph with the roles of the two layers exchanged.
    pub fn swap_layers(&self) -> Self {
        let l = self.lower_count as VertexId;
        let r = self.upper_count as VertexId;
        let lower_labels = self.labels[self.lower_count..].to_vec();
        let upper_labels = self.labels[..self.lower_count].to_vec();
        let edges = self.edges.iter().map(|&(u, v)| (v + r, u - l));
        Self::from_internal_edges(lower_labels, upper_labels, edges)
            .expect("swapping layers preserves validity")
    }

    /// Rebuilds adjacency so that every list follows `order`, a permutation of
    /// the vertex set.
    pub(crate) fn reorder_adjacency(&self, order: &[VertexId]) -> Self {
        let (offsets, neighbors, incident) = build_csr(self.n(), &self.edges, order);
        Self {
            offsets,
            neighbors,
            incident,
            ..self.clone()
        }
    }

    /// Renames every vertex `v` to `forward[v]`; adjacency lists of the result
    /// follow `order`, given in new IDs.
    pub(crate) fn relabel(&self, forward: &[VertexId], order: &[VertexId]) -> Self {
        let n = self.n();
        let mut labels = vec![0; n];
        for v in 0..n {
            labels[forward[v] as usize] = self.labels[v];
        }
        let edges: Vec<(VertexId, VertexId)> = self
            .edges
            .iter()
            .map(|&(u, v)| (forward[u as usize], forward[v as usize]))
            .collect();
        let (offsets, neighbors, incident) = build_csr(n, &edges, order);
        Self {
            upper_count: self.upper_count,
            lower_count: self.lower_count,
            edges,
            offsets,
            neighbors,
            incident,
            labels,
            duplicates_removed: self.duplicates_removed,
        }
    }
}

/// Parses one line; `Ok(None)` for blank and comment lines.
pub(crate) fn parse_data_line(
    line: &str,
    line_no: usize,
    options: &ParseOptions,
) -> Result<Option<(u64, u64)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    let mut next_label = |what: &str| -> Result<u64> {
        let tok = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("missing {what} label"),
        })?;
        tok.parse::<u64>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("malformed {what} label {tok:?}"),
        })
    };
    let u = next_label("upper")?;
    let v = next_label("lower")?;
    if options.strict_columns {
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected extra column {extra:?}"),
            });
        }
    }
    Ok(Some((u, v)))
}

/// CSR whose lists follow `order`, in O(n + m): vertices are visited in that
/// order and appended to each neighbor's list.
fn build_csr(
    n: usize,
    edges: &[(VertexId, VertexId)],
    order: &[VertexId],
) -> (Vec<usize>, Vec<VertexId>, Vec<EdgeId>) {
    let mut offsets = vec![0usize; n + 1];
    for &(u, v) in edges {
        offsets[u as usize + 1] += 1;
        offsets[v as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    // Unordered adjacency first.
    let mut raw = vec![0 as VertexId; 2 * edges.len()];
    let mut raw_edge = vec![0 as EdgeId; 2 * edges.len()];
    let mut fill = offsets.clone();
    for (e, &(u, v)) in edges.iter().enumerate() {
        raw[fill[u as usize]] = v;
        raw_edge[fill[u as usize]] = e as EdgeId;
        fill[u as usize] += 1;
        raw[fill[v as usize]] = u;
        raw_edge[fill[v as usize]] = e as EdgeId;
        fill[v as usize] += 1;
    }
    let mut neighbors = vec![0 as VertexId; 2 * edges.len()];
    let mut incident = vec![0 as EdgeId; 2 * edges.len()];
    fill.copy_from_slice(&offsets);
    for &x in order {
        let x = x as usize;
        for slot in offsets[x]..offsets[x + 1] {
            let y = raw[slot] as usize;
            neighbors[fill[y]] = x as VertexId;
            incident[fill[y]] = raw_edge[slot];
            fill[y] += 1;
        }
    }
    (offsets, neighbors, incident)
}
