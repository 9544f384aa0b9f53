//! C interface to the butterfly counting engines.
//!
//! Graphs are opaque `BflyGraph` handles created by `bfly_graph_parse_file`
//! or `bfly_graph_from_edges` and released with `bfly_graph_free`. Every
//! fallible call returns a `BflyStatus`; on failure the message is available
//! from `bfly_last_error` on the same thread until the next failing call.
//! Panics never cross the boundary; they surface as `BFLY_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use bfly_core::edge::count_per_edge_evpp;
use bfly_core::exact::{self, Algorithm, CountReport};
use bfly_core::extmem::{em_count, EmConfig};
use bfly_core::parallel::{count_parallel, ScheduleConfig, ScheduleMode, Strategy};
use bfly_core::{approx, BipartiteGraph, Error, ParseOptions};

/// Opaque graph handle.
pub struct BflyGraph {
    graph: BipartiteGraph,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BflyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Overflow = 5,
    Config = 6,
    Inconsistent = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BflyAlgorithm {
    Ibs = 0,
    Vp = 1,
    Vpp = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BflyScheduleMode {
    Dynamic = 0,
    Static = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BflyStrategy {
    Priority = 0,
    Random = 1,
    Heuristic = 2,
}

/// Count plus instrumentation. The 128-bit count is split into two halves:
/// `butterflies = butterflies_hi * 2^64 + butterflies_lo`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BflyCountReport {
    pub butterflies_lo: u64,
    pub butterflies_hi: u64,
    pub wedges_processed: u64,
    pub start_accesses: u64,
    pub middle_accesses: u64,
    pub end_accesses: u64,
    pub elapsed_ns: u64,
}

impl From<&CountReport> for BflyCountReport {
    fn from(r: &CountReport) -> Self {
        Self {
            butterflies_lo: r.butterflies as u64,
            butterflies_hi: (r.butterflies >> 64) as u64,
            wedges_processed: r.wedges_processed,
            start_accesses: r.start_accesses,
            middle_accesses: r.middle_accesses,
            end_accesses: r.end_accesses,
            elapsed_ns: r.elapsed.as_nanos().min(u64::MAX as u128) as u64,
        }
    }
}

/// Block-transfer counters of an out-of-core run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BflyIoStats {
    pub blocks_read: u64,
    pub blocks_written: u64,
    pub pairs_emitted: u64,
    pub merge_passes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> BflyStatus {
    match err {
        Error::Parse { .. } => BflyStatus::Parse,
        Error::Io(_) => BflyStatus::Io,
        Error::Overflow => BflyStatus::Overflow,
        Error::Config(_) | Error::GuardExceeded { .. } => BflyStatus::Config,
        Error::Inconsistent(_) => BflyStatus::Inconsistent,
    }
}

struct Fail(BflyStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BflyStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(BflyStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BflyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BflyStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            BflyStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const BflyGraph) -> Result<&'a BipartiteGraph, Fail> {
    g.as_ref().map(|h| &h.graph).ok_or_else(|| null("graph"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

fn into_handle(graph: BipartiteGraph) -> *mut BflyGraph {
    Box::into_raw(Box::new(BflyGraph { graph }))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bfly_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bfly_status_str(status: BflyStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BflyStatus::Ok => c"ok",
        BflyStatus::NullPointer => c"null pointer argument",
        BflyStatus::InvalidArgument => c"invalid argument",
        BflyStatus::Parse => c"parse error",
        BflyStatus::Io => c"I/O error",
        BflyStatus::Overflow => c"counter overflow",
        BflyStatus::Config => c"invalid configuration",
        BflyStatus::Inconsistent => c"internal consistency check failed",
        BflyStatus::BufferTooSmall => c"buffer too small",
        BflyStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Reads an edge-list file ("upper lower" per line, '%' or '#' comments).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_graph_parse_file(
    path: *const c_char,
    out: *mut *mut BflyGraph,
) -> BflyStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let path = path_arg(path, "path")?;
        let file = std::fs::File::open(&path).map_err(Error::from)?;
        let g = BipartiteGraph::parse_edge_list(
            std::io::BufReader::new(file),
            &ParseOptions::default(),
        )?;
        *out = into_handle(g);
        Ok(())
    })
}

/// Builds a graph from `len` label pairs `(upper[i], lower[i])`. Duplicate
/// pairs are dropped.
///
/// # Safety
/// `upper` and `lower` must point to `len` readable values (or be NULL when
/// `len` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_graph_from_edges(
    upper: *const u64,
    lower: *const u64,
    len: usize,
    out: *mut *mut BflyGraph,
) -> BflyStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let pairs: Vec<(u64, u64)> = if len == 0 {
            Vec::new()
        } else {
            if upper.is_null() || lower.is_null() {
                return Err(null("edge array"));
            }
            let u = std::slice::from_raw_parts(upper, len);
            let l = std::slice::from_raw_parts(lower, len);
            u.iter().copied().zip(l.iter().copied()).collect()
        };
        *out = into_handle(BipartiteGraph::from_labeled_edges(pairs)?);
        Ok(())
    })
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bfly_graph_free(g: *mut BflyGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Layer sizes and edge count; any output pointer may be NULL.
///
/// # Safety
/// `g` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_graph_size(
    g: *const BflyGraph,
    upper: *mut usize,
    lower: *mut usize,
    edges: *mut usize,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        for (p, v) in [
            (upper, g.upper_count()),
            (lower, g.lower_count()),
            (edges, g.m()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Labels of edge `index`, in the order used by `bfly_count_per_edge`.
///
/// # Safety
/// `g` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_graph_edge(
    g: *const BflyGraph,
    index: usize,
    upper: *mut u64,
    lower: *mut u64,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (u_out, l_out) = (out_ref(upper, "upper")?, out_ref(lower, "lower")?);
        let &(u, v) = g
            .edges()
            .get(index)
            .ok_or_else(|| invalid(format!("edge {index} out of range")))?;
        *u_out = g.label(u);
        *l_out = g.label(v);
        Ok(())
    })
}

/// Exact count with one engine.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_count(
    g: *const BflyGraph,
    algorithm: BflyAlgorithm,
    out: *mut BflyCountReport,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let out = out_ref(out, "out")?;
        let algo = match algorithm {
            BflyAlgorithm::Ibs => Algorithm::Ibs,
            BflyAlgorithm::Vp => Algorithm::Vp,
            BflyAlgorithm::Vpp => Algorithm::Vpp,
        };
        *out = (&exact::count(g, algo)?).into();
        Ok(())
    })
}

/// Multi-threaded exact count.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_count_parallel(
    g: *const BflyGraph,
    threads: usize,
    mode: BflyScheduleMode,
    strategy: BflyStrategy,
    seed: u64,
    out: *mut BflyCountReport,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let out = out_ref(out, "out")?;
        let cfg = ScheduleConfig {
            mode: match mode {
                BflyScheduleMode::Dynamic => ScheduleMode::Dynamic,
                BflyScheduleMode::Static => ScheduleMode::Static,
            },
            strategy: match strategy {
                BflyStrategy::Priority => Strategy::Priority,
                BflyStrategy::Random => Strategy::Random,
                BflyStrategy::Heuristic => Strategy::Heuristic,
            },
            threads,
            seed,
        };
        cfg.validate()?;
        let (rg, _) = exact::prepare_vpp(g);
        *out = (&count_parallel(&rg, &cfg)?.report).into();
        Ok(())
    })
}

/// Butterflies per edge, written to `counts[0..m]` in edge order (see
/// `bfly_graph_edge`). Returns `BFLY_STATUS_BUFFER_TOO_SMALL` if `capacity`
/// is below the edge count.
///
/// # Safety
/// `g` must be a live handle; `counts` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn bfly_count_per_edge(
    g: *const BflyGraph,
    counts: *mut u64,
    capacity: usize,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if capacity < g.m() {
            return Err(Fail(
                BflyStatus::BufferTooSmall,
                format!("need room for {} counts, got {capacity}", g.m()),
            ));
        }
        if counts.is_null() && g.m() > 0 {
            return Err(null("counts"));
        }
        let ec = count_per_edge_evpp(&exact::prepare_vpp(g).0)?;
        if !ec.counts.is_empty() {
            std::slice::from_raw_parts_mut(counts, ec.counts.len()).copy_from_slice(&ec.counts);
        }
        Ok(())
    })
}

/// `4·butterflies / caterpillars`. `*defined` is set to false (and
/// `*coefficient` to 0) when the graph has no three-paths.
///
/// # Safety
/// `g` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_clustering_coefficient(
    g: *const BflyGraph,
    coefficient: *mut f64,
    defined: *mut bool,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (c_out, d_out) = (
            out_ref(coefficient, "coefficient")?,
            out_ref(defined, "defined")?,
        );
        let c = exact::clustering_coefficient(g)?;
        *c_out = c.unwrap_or(0.0);
        *d_out = c.is_some();
        Ok(())
    })
}

/// Sparsification estimate over `trials` samples with edge probability `p`.
/// `variance` may be NULL.
///
/// # Safety
/// `g` must be a live handle; `mean` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_estimate(
    g: *const BflyGraph,
    p: f64,
    trials: usize,
    seed: u64,
    mean: *mut f64,
    variance: *mut f64,
) -> BflyStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let mean = out_ref(mean, "mean")?;
        let set = approx::run_trials(g, p, trials, seed)?;
        *mean = set.mean();
        if let Some(v) = variance.as_mut() {
            *v = set.variance();
        }
        Ok(())
    })
}

/// Out-of-core count of the edge-list file at `path`. `scratch_dir` may be
/// NULL for the system temporary directory; `io` may be NULL.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfly_em_count(
    path: *const c_char,
    memory_budget: usize,
    block_size: usize,
    scratch_dir: *const c_char,
    out: *mut BflyCountReport,
    io: *mut BflyIoStats,
) -> BflyStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let input = path_arg(path, "path")?;
        let dir = if scratch_dir.is_null() {
            std::env::temp_dir()
        } else {
            path_arg(scratch_dir, "scratch_dir")?
        };
        let cfg = EmConfig {
            memory_budget,
            block_size,
            ..EmConfig::new(dir)
        };
        let report = em_count(&input, &cfg)?;
        *out = (&report.report).into();
        if let Some(io) = io.as_mut() {
            *io = BflyIoStats {
                blocks_read: report.io.blocks_read,
                blocks_written: report.io.blocks_written,
                pairs_emitted: report.io.pairs_emitted,
                merge_passes: report.io.merge_passes,
            };
        }
        Ok(())
    })
}
