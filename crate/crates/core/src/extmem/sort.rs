//! Two-phase external merge sort over fixed-width records, ordered
//! lexicographically by record bytes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::path::{Path, PathBuf};

use super::io::{BlockReader, BlockWriter, IoCounter};
use super::{EmConfig, IoStats};
use crate::error::{Error, Result};

pub const MAX_RECORD_WIDTH: usize = 32;

type Key = [u8; MAX_RECORD_WIDTH];

/// Merge fan-in for a budget: one block per input stream plus one for output.
pub fn fan_in(cfg: &EmConfig) -> usize {
    cfg.memory_budget / cfg.block_size - 1
}

/// Sorts `input` into `output`. Runs hold at most `M` bytes each; merging
/// uses `floor(M/B) - 1` input streams per pass.
pub fn external_sort(input: &Path, output: &Path, width: usize, cfg: &EmConfig) -> Result<IoStats> {
    let io = IoCounter::default();
    let merge_passes = sort_with(input, output, width, cfg, &io)?;
    Ok(IoStats {
        blocks_read: io.blocks_read(),
        blocks_written: io.blocks_written(),
        pairs_emitted: 0,
        merge_passes,
    })
}

pub(crate) fn sort_with(
    input: &Path,
    output: &Path,
    width: usize,
    cfg: &EmConfig,
    io: &IoCounter,
) -> Result<u64> {
    cfg.validate()?;
    if width == 0 || width > MAX_RECORD_WIDTH {
        return Err(Error::config(format!(
            "record width {width} outside 1..={MAX_RECORD_WIDTH}"
        )));
    }
    let mut runs = form_runs(input, output, width, cfg, io)?;
    let k = fan_in(cfg);
    let mut passes = 0u64;
    while runs.len() > 1 {
        let mut next = Vec::with_capacity(runs.len().div_ceil(k));
        for (i, group) in runs.chunks(k).enumerate() {
            let target = scratch_name(output, &format!("p{}.{}", passes + 1, i));
            merge(group, &target, width, cfg.block_size, io)?;
            for run in group {
                fs::remove_file(run)?;
            }
            next.push(target);
        }
        runs = next;
        passes += 1;
    }
    match runs.pop() {
        Some(run) => fs::rename(run, output)?,
        None => {
            BlockWriter::create(output, cfg.block_size, io)?.finish()?;
        }
    }
    Ok(passes)
}

fn scratch_name(output: &Path, tag: &str) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(format!(".{tag}"));
    PathBuf::from(name)
}

fn form_runs(
    input: &Path,
    output: &Path,
    width: usize,
    cfg: &EmConfig,
    io: &IoCounter,
) -> Result<Vec<PathBuf>> {
    let capacity = (cfg.memory_budget / width) * width;
    let mut reader = BlockReader::open(input, cfg.block_size, io)?;
    let mut buf = Vec::with_capacity(capacity);
    let mut runs = Vec::new();
    loop {
        if reader.read_records(&mut buf, width, capacity)? == 0 {
            break;
        }
        let mut records: Vec<&[u8]> = buf.chunks_exact(width).collect();
        records.sort_unstable();
        let path = scratch_name(output, &format!("run{}", runs.len()));
        let mut writer = BlockWriter::create(&path, cfg.block_size, io)?;
        for rec in records {
            writer.write_record(rec)?;
        }
        writer.finish()?;
        runs.push(path);
        if buf.len() < capacity {
            break;
        }
    }
    Ok(runs)
}

fn merge(
    runs: &[PathBuf],
    target: &Path,
    width: usize,
    block: usize,
    io: &IoCounter,
) -> Result<()> {
    let mut readers = runs
        .iter()
        .map(|p| BlockReader::open(p, block, io))
        .collect::<std::io::Result<Vec<_>>>()?;
    let mut heap: BinaryHeap<Reverse<(Key, usize)>> = BinaryHeap::with_capacity(runs.len());
    let mut key: Key = [0; MAX_RECORD_WIDTH];
    for (i, r) in readers.iter_mut().enumerate() {
        if r.read_record(&mut key[..width])? {
            heap.push(Reverse((key, i)));
        }
    }
    let mut writer = BlockWriter::create(target, block, io)?;
    while let Some(Reverse((head, i))) = heap.pop() {
        writer.write_record(&head[..width])?;
        let mut next: Key = [0; MAX_RECORD_WIDTH];
        if readers[i].read_record(&mut next[..width])? {
            heap.push(Reverse((next, i)));
        }
    }
    writer.finish()?;
    Ok(())
}
