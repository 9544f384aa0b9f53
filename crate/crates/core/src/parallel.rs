//! Shared-memory parallel counting.
//!
//! Workers share the ranked graph read-only. Each owns a wedge counter and a
//! partial sum; the master adds the partial sums in thread order once every
//! worker has finished. Start vertices are handed out either dynamically,
//! through an atomic cursor over a fixed queue, or statically, from
//! precomputed per-thread lists.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{add, vpp_fill, CountReport, WedgeCounter};
use crate::graph::VertexId;
use crate::priority::RankedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Dynamic,
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Priority,
    Random,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleConfig {
    pub mode: ScheduleMode,
    pub strategy: Strategy,
    pub threads: usize,
    pub seed: u64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            mode: ScheduleMode::Dynamic,
            strategy: Strategy::Priority,
            threads: 1,
            seed: 0,
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::config("thread count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ThreadReport {
    pub thread: usize,
    pub butterflies: u128,
    pub wedges_processed: u64,
    pub vertices: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParallelReport {
    #[serde(flatten)]
    pub report: CountReport,
    pub schedule: ScheduleConfig,
    pub threads: Vec<ThreadReport>,
}

/// Heuristic workload of start vertex `u`: the number of distinct `w` with
/// `w ∈ N(v)`, `v ∈ N(u)` and `p(w) > p(v)`.
pub fn estimate_workload(rg: &RankedGraph, u: VertexId) -> u64 {
    let mut seen = std::collections::HashSet::new();
    let (g, p) = (rg.graph(), rg.priority());
    for &v in g.neighbors(u) {
        for &w in g
            .neighbors(v)
            .iter()
            .rev()
            .take_while(|&&w| p.of(w) > p.of(v))
        {
            seen.insert(w);
        }
    }
    seen.len() as u64
}

/// [`estimate_workload`] for every vertex, sharing one stamp array.
pub fn estimate_workloads(rg: &RankedGraph) -> Vec<u64> {
    let (g, p) = (rg.graph(), rg.priority());
    let mut stamp = vec![u32::MAX; g.n()];
    g.vertices()
        .map(|u| {
            let mut distinct = 0;
            for &v in g.neighbors(u) {
                for &w in g
                    .neighbors(v)
                    .iter()
                    .rev()
                    .take_while(|&&w| p.of(w) > p.of(v))
                {
                    if stamp[w as usize] != u {
                        stamp[w as usize] = u;
                        distinct += 1;
                    }
                }
            }
            distinct
        })
        .collect()
}

/// Wedges the cache-aware engine processes from each start vertex.
pub fn vpp_workloads(rg: &RankedGraph) -> Vec<u64> {
    let mut counter = WedgeCounter::new(rg.graph().n());
    rg.graph()
        .vertices()
        .map(|u| {
            let (_, wedges) = vpp_fill(rg.graph(), rg.priority(), u, &mut counter);
            counter.clear();
            wedges
        })
        .collect()
}

/// List scheduling: jobs in `order`, each to the least-loaded thread (lowest
/// index on ties). Returns job indices per thread.
pub fn list_schedule(order: &[usize], workloads: &[u64], threads: usize) -> Vec<Vec<usize>> {
    let mut loads = vec![0u64; threads];
    let mut out = vec![Vec::new(); threads];
    for &job in order {
        let (t, _) = loads
            .iter()
            .enumerate()
            .min_by_key(|&(i, &load)| (load, i))
            .expect("at least one thread");
        loads[t] += workloads[job];
        out[t].push(job);
    }
    out
}

/// Longest-job-first greedy assignment.
pub fn greedy_assign(workloads: &[u64], threads: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..workloads.len()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(workloads[j]));
    list_schedule(&order, workloads, threads)
}

/// Largest per-thread workload sum. Every job must appear exactly once.
pub fn makespan(assignment: &[Vec<usize>], workloads: &[u64]) -> Result<u64> {
    let mut seen = vec![false; workloads.len()];
    for &job in assignment.iter().flatten() {
        match seen.get_mut(job) {
            Some(s) if !*s => *s = true,
            Some(_) => return Err(Error::Inconsistent(format!("job {job} assigned twice"))),
            None => return Err(Error::Inconsistent(format!("unknown job {job}"))),
        }
    }
    if let Some(job) = seen.iter().position(|s| !s) {
        return Err(Error::Inconsistent(format!("job {job} is not assigned")));
    }
    Ok(assignment
        .iter()
        .map(|jobs| jobs.iter().map(|&j| workloads[j]).sum())
        .max()
        .unwrap_or(0))
}

fn descending_priority(rg: &RankedGraph) -> Vec<VertexId> {
    let mut order = rg.priority().ascending();
    order.reverse();
    order
}

/// Queue order for dynamic scheduling.
pub fn dynamic_order(rg: &RankedGraph, cfg: &ScheduleConfig) -> Vec<VertexId> {
    let mut order = descending_priority(rg);
    match cfg.strategy {
        Strategy::Priority => {}
        Strategy::Random => order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
        Strategy::Heuristic => {
            let est = estimate_workloads(rg);
            order.sort_by_key(|&u| std::cmp::Reverse(est[u as usize]));
        }
    }
    order
}

/// Per-thread start-vertex lists for static scheduling.
pub fn make_static_assignment(rg: &RankedGraph, cfg: &ScheduleConfig) -> Vec<Vec<VertexId>> {
    let t = cfg.threads.max(1);
    let mut lists = vec![Vec::new(); t];
    match cfg.strategy {
        Strategy::Priority => {
            for u in descending_priority(rg) {
                lists[rg.priority().of(u) as usize % t].push(u);
            }
        }
        Strategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for u in rg.graph().vertices() {
                lists[rng.gen_range(0..t)].push(u);
            }
        }
        Strategy::Heuristic => {
            let est = estimate_workloads(rg);
            // Stable sort keeps descending priority among equal estimates.
            let mut order = descending_priority(rg);
            order.sort_by_key(|&u| std::cmp::Reverse(est[u as usize]));
            let jobs: Vec<usize> = order.iter().map(|&u| u as usize).collect();
            for (t, list) in list_schedule(&jobs, &est, t).into_iter().enumerate() {
                lists[t] = list.into_iter().map(|u| u as VertexId).collect();
            }
        }
    }
    lists
}

/// Caps the thread count so that per-thread counters (4 bytes per vertex)
/// fit in half of the available memory.
pub fn effective_threads(requested: usize, n: usize) -> usize {
    let Some(avail) = available_memory() else {
        return requested;
    };
    let per_thread = (4 * n as u64).max(1);
    let cap = ((avail / 2) / per_thread).max(1) as usize;
    if cap < requested {
        log::warn!("capping threads from {requested} to {cap} to fit wedge counters in memory");
    }
    requested.min(cap)
}

fn available_memory() -> Option<u64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

struct Worker<'a> {
    rg: &'a RankedGraph,
    counter: WedgeCounter,
    report: ThreadReport,
    middles: u64,
}

impl<'a> Worker<'a> {
    fn new(rg: &'a RankedGraph, thread: usize) -> Self {
        Self {
            rg,
            counter: WedgeCounter::new(rg.graph().n()),
            report: ThreadReport {
                thread,
                ..Default::default()
            },
            middles: 0,
        }
    }

    fn process(&mut self, u: VertexId) -> Result<()> {
        let (middles, wedges) = vpp_fill(self.rg.graph(), self.rg.priority(), u, &mut self.counter);
        self.middles += middles;
        self.report.wedges_processed += wedges;
        self.report.vertices += 1;
        self.report.butterflies = add(self.report.butterflies, self.counter.drain_pairs()?)?;
        Ok(())
    }
}

/// Parallel cache-aware counting; `rg` should come from
/// [`crate::exact::prepare_vpp`].
pub fn count_parallel(rg: &RankedGraph, cfg: &ScheduleConfig) -> Result<ParallelReport> {
    cfg.validate()?;
    let clock = Instant::now();
    let t = effective_threads(cfg.threads, rg.graph().n());
    let schedule = ScheduleConfig {
        threads: t,
        ..cfg.clone()
    };

    let results: Vec<Result<(ThreadReport, u64)>> = match cfg.mode {
        ScheduleMode::Dynamic => {
            let order = dynamic_order(rg, &schedule);
            let cursor = AtomicUsize::new(0);
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..t)
                    .map(|i| {
                        let (order, cursor) = (&order, &cursor);
                        s.spawn(move || {
                            let mut worker = Worker::new(rg, i);
                            loop {
                                let next = cursor.fetch_add(1, Ordering::Relaxed);
                                let Some(&u) = order.get(next) else { break };
                                worker.process(u)?;
                            }
                            Ok((worker.report, worker.middles))
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        }
        ScheduleMode::Static => {
            let lists = make_static_assignment(rg, &schedule);
            std::thread::scope(|s| {
                let handles: Vec<_> = lists
                    .iter()
                    .enumerate()
                    .map(|(i, list)| {
                        s.spawn(move || {
                            let mut worker = Worker::new(rg, i);
                            for &u in list {
                                worker.process(u)?;
                            }
                            Ok((worker.report, worker.middles))
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        }
    };

    let mut report = CountReport::default();
    let mut threads = Vec::with_capacity(t);
    for r in results {
        let (tr, middles) = r?;
        report.butterflies = add(report.butterflies, tr.butterflies)?;
        report.wedges_processed += tr.wedges_processed;
        report.start_accesses += tr.vertices;
        report.middle_accesses += middles;
        threads.push(tr);
    }
    report.end_accesses = report.wedges_processed;
    report.elapsed = clock.elapsed();
    Ok(ParallelReport {
        report,
        schedule,
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{count_vpp, prepare_vpp};
    use crate::gen;
    use crate::graph::BipartiteGraph;

    fn cfg(mode: ScheduleMode, strategy: Strategy, threads: usize) -> ScheduleConfig {
        ScheduleConfig {
            mode,
            strategy,
            threads,
            seed: 42,
        }
    }

    #[test]
    fn isolated_vertex_has_no_workload() {
        let g = BipartiteGraph::from_internal_edges(vec![0, 1], vec![0], [(2, 0)]).unwrap();
        let rg = RankedGraph::new(&g);
        assert_eq!(estimate_workload(&rg, 1), 0);
    }

    #[test]
    fn workload_matches_direct_enumeration() {
        for g in [
            gen::complete(2, 2),
            gen::random(8, 9, 0.4, 5),
            gen::hub(20, 30),
        ] {
            let rg = RankedGraph::new(&g);
            let (gg, p) = (rg.graph(), rg.priority());
            let all = estimate_workloads(&rg);
            for u in gg.vertices() {
                let mut s: Vec<VertexId> = gg
                    .neighbors(u)
                    .iter()
                    .flat_map(|&v| gg.neighbors(v).iter().filter(move |&&w| p.of(w) > p.of(v)))
                    .copied()
                    .collect();
                s.sort_unstable();
                s.dedup();
                assert_eq!(estimate_workload(&rg, u), s.len() as u64);
                assert_eq!(all[u as usize], s.len() as u64);
            }
        }
    }

    #[test]
    fn star_leaves_have_no_workload() {
        let rg = RankedGraph::new(&gen::star(6));
        for leaf in rg.graph().lower_ids() {
            assert_eq!(estimate_workload(&rg, leaf), 0);
        }
    }

    #[test]
    fn priority_assignment_by_residue() {
        let g = gen::path(3);
        let rg = RankedGraph::new(&g);
        let one = make_static_assignment(&rg, &cfg(ScheduleMode::Static, Strategy::Priority, 1));
        assert_eq!(one[0].len(), 4);
        let two = make_static_assignment(&rg, &cfg(ScheduleMode::Static, Strategy::Priority, 2));
        for (i, list) in two.iter().enumerate() {
            assert_eq!(list.len(), 2);
            assert!(list.iter().all(|&u| rg.priority().of(u) as usize % 2 == i));
        }
    }

    #[test]
    fn greedy_longest_first() {
        let a = greedy_assign(&[5, 3, 2], 2);
        assert_eq!(a, vec![vec![0], vec![1, 2]]);
        assert_eq!(makespan(&a, &[5, 3, 2]).unwrap(), 5);
    }

    #[test]
    fn makespan_edge_cases() {
        assert_eq!(makespan(&[vec![0, 1, 2]], &[5, 3, 2]).unwrap(), 10);
        assert_eq!(makespan(&[vec![], vec![]], &[]).unwrap(), 0);
        assert!(makespan(&[vec![0]], &[1, 1]).is_err());
        assert!(makespan(&[vec![0], vec![0]], &[1]).is_err());
    }

    #[test]
    fn static_assignments_partition_vertices() {
        let rg = RankedGraph::new(&gen::random(12, 10, 0.3, 1));
        for strategy in [Strategy::Priority, Strategy::Random, Strategy::Heuristic] {
            let lists = make_static_assignment(&rg, &cfg(ScheduleMode::Static, strategy, 3));
            let mut all: Vec<VertexId> = lists.concat();
            all.sort_unstable();
            assert_eq!(all, rg.graph().vertices().collect::<Vec<_>>());
        }
    }

    #[test]
    fn random_strategy_is_seeded() {
        let rg = RankedGraph::new(&gen::random(12, 10, 0.3, 1));
        let c = cfg(ScheduleMode::Static, Strategy::Random, 3);
        assert_eq!(
            make_static_assignment(&rg, &c),
            make_static_assignment(&rg, &c)
        );
        let d = cfg(ScheduleMode::Dynamic, Strategy::Random, 3);
        assert_eq!(dynamic_order(&rg, &d), dynamic_order(&rg, &d));
    }

    #[test]
    fn single_thread_matches_sequential() {
        let (rg, _) = prepare_vpp(&gen::random(20, 25, 0.3, 4));
        let seq = count_vpp(&rg).unwrap();
        for mode in [ScheduleMode::Dynamic, ScheduleMode::Static] {
            let par = count_parallel(&rg, &cfg(mode, Strategy::Priority, 1)).unwrap();
            assert!(par.report.same_counts(&seq));
        }
    }

    #[test]
    fn complete_graph_all_schedules() {
        let (rg, _) = prepare_vpp(&gen::complete(3, 2));
        for mode in [ScheduleMode::Dynamic, ScheduleMode::Static] {
            for strategy in [Strategy::Priority, Strategy::Random, Strategy::Heuristic] {
                let par = count_parallel(&rg, &cfg(mode, strategy, 2)).unwrap();
                assert_eq!(par.report.butterflies, 3);
                let per_thread: u128 = par.threads.iter().map(|t| t.butterflies).sum();
                assert_eq!(per_thread, 3);
            }
        }
    }

    #[test]
    fn zero_threads_rejected() {
        let (rg, _) = prepare_vpp(&gen::complete(2, 2));
        assert!(count_parallel(&rg, &cfg(ScheduleMode::Dynamic, Strategy::Priority, 0)).is_err());
    }
}
