//! Out-of-core butterfly counting under a memory budget.
//!
//! The pipeline keeps only O(n) per-vertex state in memory (labels, degrees,
//! priorities); everything proportional to `m` or to the wedge count lives in
//! scratch files of 16-byte records (two big-endian `u64`s):
//!
//! 1. `<run-id>.edges`: `(upper, lower)` internal IDs, externally sorted so
//!    duplicates are adjacent.
//! 2. Degrees and priorities from one scan of the sorted edges.
//! 3. `<run-id>.adj`: both orientations of every edge as
//!    `(p(a), p(b))`, externally sorted so each vertex's neighbors form one
//!    group in ascending priority.
//! 4. `<run-id>.pairs`: for every middle vertex `v` and neighbors `u, w`
//!    with `p(w) > p(v)` and `p(w) > p(u)`, the pair `(p(w), p(u))`.
//! 5. The sorted pairs are scanned in runs; each run of length `c`
//!    contributes `C(c, 2)`.
//!
//! Big-endian encoding makes byte order equal numeric order, which step 4
//! relies on.

mod io;
pub mod sort;

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use self::io::{decode_pair, encode_pair, BlockReader, BlockWriter, IoCounter};
use crate::error::{Error, Result};
use crate::exact::{add, choose2, CountReport};
use crate::graph::{parse_data_line, ParseOptions};
use crate::priority::PriorityMap;

pub use self::sort::external_sort;

const RECORD: usize = 16;
pub const MIN_BLOCK_SIZE: usize = 4096;

#[derive(Clone, Debug)]
pub struct EmConfig {
    /// Main-memory budget `M` in bytes.
    pub memory_budget: usize,
    /// Disk block size `B` in bytes.
    pub block_size: usize,
    pub scratch_dir: PathBuf,
    pub keep_scratch: bool,
    /// Prefix for scratch file names; generated when `None`.
    pub run_id: Option<String>,
}

impl EmConfig {
    pub fn new(scratch_dir: impl Into<PathBuf>) -> Self {
        Self {
            memory_budget: 64 << 20,
            block_size: 64 << 10,
            scratch_dir: scratch_dir.into(),
            keep_scratch: false,
            run_id: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size < MIN_BLOCK_SIZE {
            return Err(Error::config(format!(
                "block size {} is below the {MIN_BLOCK_SIZE}-byte minimum",
                self.block_size
            )));
        }
        if self.memory_budget < 4 * self.block_size {
            return Err(Error::config(format!(
                "memory budget {} must be at least four blocks ({})",
                self.memory_budget,
                4 * self.block_size
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IoStats {
    pub blocks_read: u64,
    pub blocks_written: u64,
    pub pairs_emitted: u64,
    pub merge_passes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmReport {
    #[serde(flatten)]
    pub report: CountReport,
    pub io: IoStats,
    pub duplicates_removed: u64,
}

struct Scratch {
    dir: PathBuf,
    run_id: String,
    files: Vec<PathBuf>,
    keep: bool,
}

impl Scratch {
    fn path(&mut self, suffix: &str) -> PathBuf {
        let p = self.dir.join(format!("{}.{suffix}", self.run_id));
        self.files.push(p.clone());
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        if !self.keep {
            for f in &self.files {
                let _ = fs::remove_file(f);
            }
        }
    }
}

fn default_run_id() -> String {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.subsec_nanos())
        .unwrap_or(0);
    format!("bfly-{}-{nanos:08x}", std::process::id())
}

/// Counts butterflies in the edge-list file at `input` without loading its
/// edges into memory.
pub fn em_count(input: &Path, cfg: &EmConfig) -> Result<EmReport> {
    cfg.validate()?;
    let clock = Instant::now();
    let io = IoCounter::default();
    let mut scratch = Scratch {
        dir: cfg.scratch_dir.clone(),
        run_id: cfg.run_id.clone().unwrap_or_else(default_run_id),
        files: Vec::new(),
        keep: cfg.keep_scratch,
    };
    let block = cfg.block_size;
    let mut merge_passes = 0;

    // Label dictionaries, then the edge file in internal IDs.
    let (upper, lower) = collect_labels(input)?;
    let n = upper.len() + lower.len();
    let resident = 16 * n;
    if resident > cfg.memory_budget {
        return Err(Error::config(format!(
            "{n} vertices need {resident} bytes of per-vertex state, over the {} byte budget",
            cfg.memory_budget
        )));
    }
    let l = lower.len() as u64;
    let edges = scratch.path("edges");
    {
        let mut w = BlockWriter::create(&edges, block, &io)?;
        for_each_labeled_edge(input, |u, v| {
            let ui = upper.binary_search(&u).expect("collected in first pass") as u64 + l;
            let vi = lower.binary_search(&v).expect("collected in first pass") as u64;
            w.write_record(&encode_pair(ui, vi))?;
            Ok(())
        })?;
        w.finish()?;
    }
    drop((upper, lower));
    let sorted_edges = scratch.path("edges.sorted");
    merge_passes += sort::sort_with(&edges, &sorted_edges, RECORD, cfg, &io)?;

    let mut degrees = vec![0u32; n];
    let duplicates_removed = scan_distinct(&sorted_edges, block, &io, |a, b| {
        degrees[a as usize] += 1;
        degrees[b as usize] += 1;
        Ok(())
    })?;
    let priority = PriorityMap::from_degrees(&degrees);
    drop(degrees);

    let adj = scratch.path("adj");
    {
        let mut w = BlockWriter::create(&adj, block, &io)?;
        scan_distinct(&sorted_edges, block, &io, |a, b| {
            let (pa, pb) = (priority.of(a as u32) as u64, priority.of(b as u32) as u64);
            w.write_record(&encode_pair(pa, pb))?;
            w.write_record(&encode_pair(pb, pa))?;
            Ok(())
        })?;
        w.finish()?;
    }
    drop(priority);
    let sorted_adj = scratch.path("adj.sorted");
    merge_passes += sort::sort_with(&adj, &sorted_adj, RECORD, cfg, &io)?;

    let pairs = scratch.path("pairs");
    // Group members are 8-byte priorities; half the budget holds the buffer.
    let buffer_cap = cfg.memory_budget / 2 / 8;
    let (pairs_emitted, middles) = emit_pairs(&sorted_adj, &pairs, block, buffer_cap, &io)?;
    let sorted_pairs = scratch.path("pairs.sorted");
    merge_passes += sort::sort_with(&pairs, &sorted_pairs, RECORD, cfg, &io)?;

    let butterflies = count_runs(&sorted_pairs, block, &io)?;

    let report = CountReport {
        butterflies,
        wedges_processed: pairs_emitted,
        start_accesses: pairs_emitted,
        middle_accesses: middles,
        end_accesses: pairs_emitted,
        elapsed: clock.elapsed(),
    };
    Ok(EmReport {
        report,
        io: IoStats {
            blocks_read: io.blocks_read(),
            blocks_written: io.blocks_written(),
            pairs_emitted,
            merge_passes,
        },
        duplicates_removed,
    })
}

fn for_each_labeled_edge(input: &Path, mut f: impl FnMut(u64, u64) -> Result<()>) -> Result<()> {
    let reader = BufReader::new(File::open(input)?);
    let opts = ParseOptions::default();
    for (idx, line) in reader.lines().enumerate() {
        if let Some((u, v)) = parse_data_line(&line?, idx + 1, &opts)? {
            f(u, v)?;
        }
    }
    Ok(())
}

fn collect_labels(input: &Path) -> Result<(Vec<u64>, Vec<u64>)> {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for_each_labeled_edge(input, |u, v| {
        upper.push(u);
        lower.push(v);
        if upper.len() > 1 << 16 {
            upper.sort_unstable();
            upper.dedup();
            lower.sort_unstable();
            lower.dedup();
        }
        Ok(())
    })?;
    upper.sort_unstable();
    upper.dedup();
    lower.sort_unstable();
    lower.dedup();
    Ok((upper, lower))
}

/// Calls `f` once per distinct record of a sorted file; returns how many
/// duplicates were skipped.
fn scan_distinct(
    path: &Path,
    block: usize,
    io: &IoCounter,
    mut f: impl FnMut(u64, u64) -> Result<()>,
) -> Result<u64> {
    let mut r = BlockReader::open(path, block, io)?;
    let mut rec = [0u8; RECORD];
    let mut last = None;
    let mut dups = 0;
    while r.read_record(&mut rec)? {
        if last == Some(rec) {
            dups += 1;
            continue;
        }
        last = Some(rec);
        let (a, b) = decode_pair(&rec);
        f(a, b)?;
    }
    Ok(dups)
}

/// Streams adjacency groups. A member `w` of the group of `v` with
/// `p(w) > p(v)` pairs with every earlier (lower-priority) member. Groups
/// are buffered up to `buffer_cap` members; past that the prefix is re-read
/// from disk for each such `w`.
fn emit_pairs(
    sorted_adj: &Path,
    pairs: &Path,
    block: usize,
    buffer_cap: usize,
    io: &IoCounter,
) -> Result<(u64, u64)> {
    let mut reader = BlockReader::open(sorted_adj, block, io)?;
    let mut writer = BlockWriter::create(pairs, block, io)?;
    let mut rec = [0u8; RECORD];
    let mut emitted = 0u64;
    let mut groups = 0u64;

    let mut current: Option<u64> = None;
    let mut members: Vec<u64> = Vec::new();
    let mut spilled = false;
    let mut group_len = 0u64;
    let mut group_start = 0u64;
    let mut index = 0u64;

    while reader.read_record(&mut rec)? {
        let (pv, pw) = decode_pair(&rec);
        if current != Some(pv) {
            current = Some(pv);
            groups += 1;
            members.clear();
            spilled = false;
            group_len = 0;
            group_start = index;
        }
        if pw > pv && group_len > 0 {
            if spilled {
                let mut prefix = BlockReader::open_range(
                    sorted_adj,
                    group_start * RECORD as u64,
                    group_len * RECORD as u64,
                    block,
                    io,
                )?;
                let mut prev = [0u8; RECORD];
                while prefix.read_record(&mut prev)? {
                    writer.write_record(&encode_pair(pw, decode_pair(&prev).1))?;
                }
            } else {
                for &pu in &members {
                    writer.write_record(&encode_pair(pw, pu))?;
                }
            }
            emitted += group_len;
        }
        if !spilled {
            if members.len() < buffer_cap {
                members.push(pw);
            } else {
                spilled = true;
                members.clear();
            }
        }
        group_len += 1;
        index += 1;
    }
    writer.finish()?;
    Ok((emitted, groups))
}

fn count_runs(sorted_pairs: &Path, block: usize, io: &IoCounter) -> Result<u128> {
    let mut r = BlockReader::open(sorted_pairs, block, io)?;
    let mut rec = [0u8; RECORD];
    let mut last = [0u8; RECORD];
    let mut run = 0u64;
    let mut total = 0u128;
    while r.read_record(&mut rec)? {
        if run > 0 && rec == last {
            run += 1;
        } else {
            total = add(total, choose2(run))?;
            run = 1;
            last = rec;
        }
    }
    add(total, choose2(run))
}
