//! Butterfly (2×2 biclique) counting on bipartite graphs.
//!
//! The engines share one graph representation ([`BipartiteGraph`]) and one
//! report type ([`CountReport`]):
//!
//! * [`exact`]: global counts by layer priority, vertex priority and the
//!   cache-aware vertex-priority variant, plus a brute-force oracle and
//!   clustering statistics.
//! * [`edge`]: per-edge counts.
//! * [`parallel`]: shared-memory counting with static and dynamic schedules.
//! * [`extmem`]: out-of-core counting under a memory budget.
//! * [`approx`]: edge-sparsification estimates built on the exact counter.

pub mod approx;
pub mod cli;
pub mod edge;
pub mod error;
pub mod exact;
pub mod extmem;
pub mod gen;
pub mod graph;
pub mod parallel;
pub mod priority;
pub mod projection;

pub use edge::EdgeCounts;
pub use error::{Error, Result};
pub use exact::{Algorithm, CountReport};
pub use graph::{BipartiteGraph, Layer, ParseOptions, VertexId};
pub use priority::{PriorityMap, RankedGraph};
pub use projection::ProjectionMapping;
