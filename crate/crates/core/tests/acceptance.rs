//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines are always
//! printed.

use std::time::{Duration, Instant};

use bfly_core::edge::{count_per_edge_evpp, per_vertex_from_edges};
use bfly_core::exact::{
    brute_force_count, clustering_coefficient, count_caterpillars, count_ibs, count_per_vertex,
    count_vp, count_vpp, prepare_vpp, CountReport,
};
use bfly_core::extmem::{em_count, EmConfig};
use bfly_core::parallel::{count_parallel, ScheduleConfig, ScheduleMode, Strategy};
use bfly_core::{approx, gen, BipartiteGraph, Layer, RankedGraph};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

struct Engines {
    ibs: CountReport,
    vp: CountReport,
    vpp: CountReport,
}

fn run_engines(g: &BipartiteGraph) -> Engines {
    Engines {
        ibs: count_ibs(g).unwrap(),
        vp: count_vp(&RankedGraph::new(g)).unwrap(),
        vpp: count_vpp(&prepare_vpp(g).0).unwrap(),
    }
}

/// 200 seeded graphs: 50 per edge probability, layer sizes up to 40.
fn corpus() -> Vec<BipartiteGraph> {
    let mut graphs = Vec::new();
    for (k, p) in [0.05, 0.1, 0.25, 0.5].into_iter().enumerate() {
        for i in 0..50u64 {
            let seed = 1000 * k as u64 + i;
            let r = 1 + (seed * 7 % 40) as usize;
            let l = 1 + (seed * 13 % 40) as usize;
            graphs.push(gen::random(r, l, p, seed));
        }
    }
    graphs
}

/// Three-paths enumerated from one end, each seen once per direction.
fn three_paths(g: &BipartiteGraph) -> u128 {
    let mut total = 0u128;
    for a in g.vertices() {
        for &b in g.neighbors(a) {
            for &c in g.neighbors(b).iter().filter(|&&c| c != a) {
                total += g.neighbors(c).iter().filter(|&&d| d != b).count() as u128;
            }
        }
    }
    total / 2
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn c1_oracle(graphs: &[BipartiteGraph]) -> Check {
    let start = Instant::now();
    for (i, g) in graphs.iter().enumerate() {
        let truth = brute_force_count(g).map_err(|e| e.to_string())?;
        let e = run_engines(g);
        ensure!(
            e.ibs.butterflies == truth && e.vp.butterflies == truth && e.vpp.butterflies == truth,
            "graph {i}: oracle {truth}, ibs {}, vp {}, vpp {}",
            e.ibs.butterflies,
            e.vp.butterflies,
            e.vpp.butterflies
        );
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{} graphs, {:.2?}", graphs.len(), start.elapsed()))
}

fn c2_hub() -> Check {
    let start = Instant::now();
    let g = gen::hub(1000, 1000);
    let e = run_engines(&g);
    let wedges = [
        e.ibs.wedges_processed,
        e.vp.wedges_processed,
        e.vpp.wedges_processed,
    ];
    ensure!(
        wedges == [1_000_000, 2_000, 2_000],
        "wedges ibs/vp/vpp = {wedges:?}"
    );
    for r in [&e.ibs, &e.vp, &e.vpp] {
        ensure!(r.butterflies == 999_000, "butterflies {}", r.butterflies);
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "{} vertices, {} edges, {:.2?}",
        g.n(),
        g.m(),
        start.elapsed()
    ))
}

fn c3_hub_path() -> Check {
    let g = gen::hub_path(1000);
    let ibs = count_ibs(&g).unwrap().wedges_processed;
    let vp = count_vp(&RankedGraph::new(&g)).unwrap().wedges_processed;
    ensure!(ibs == 500_500 && vp == 2_000, "ibs {ibs}, vp {vp}");
    Ok(format!("{} vertices, {} edges", g.n(), g.m()))
}

fn c4_equal_wedges(graphs: &[BipartiteGraph]) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let e = run_engines(g);
        ensure!(
            e.vp.wedges_processed == e.vpp.wedges_processed,
            "graph {i}: vp {} vs vpp {}",
            e.vp.wedges_processed,
            e.vpp.wedges_processed
        );
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn c5_degree_bound(graphs: &[BipartiteGraph]) -> Check {
    let bound = |g: &BipartiteGraph| {
        g.sum_squared_degrees(Layer::Upper)
            .min(g.sum_squared_degrees(Layer::Lower))
    };
    for (i, g) in graphs.iter().enumerate() {
        let w = u128::from(count_vp(&RankedGraph::new(g)).unwrap().wedges_processed);
        ensure!(w <= bound(g), "graph {i}: {w} wedges > bound {}", bound(g));
        ensure!(
            g.sum_min_degree() <= bound(g),
            "graph {i}: min-degree sum above bound"
        );
    }
    let star = gen::star(100);
    ensure!(
        star.sum_min_degree() == bound(&star),
        "star does not reach the bound"
    );
    Ok(format!("{} graphs, star equality", graphs.len()))
}

fn c6_conservation(graphs: &[BipartiteGraph]) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let ec = count_per_edge_evpp(&prepare_vpp(g).0).map_err(|e| e.to_string())?;
        ensure!(
            ec.sum() == 4 * ec.butterflies,
            "graph {i}: edge sum {} vs 4·{}",
            ec.sum(),
            ec.butterflies
        );
        let per_vertex = count_per_vertex(g).unwrap();
        let derived = per_vertex_from_edges(&ec, g).map_err(|e| e.to_string())?;
        ensure!(derived == per_vertex, "graph {i}: per-vertex mismatch");
        let upper: u128 = g.upper_ids().map(|u| per_vertex[u as usize]).sum();
        ensure!(upper == 2 * ec.butterflies, "graph {i}: upper sum {upper}");
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn c7_parallel() -> Check {
    let start = Instant::now();
    let mut graphs: Vec<BipartiteGraph> = (0..20)
        .map(|i| gen::random(30 + i, 40 - i, 0.05 + 0.02 * i as f64, 500 + i as u64))
        .collect();
    graphs.push(gen::hub(1000, 1000));
    let mut runs = 0;
    for (i, g) in graphs.iter().enumerate() {
        let (rg, _) = prepare_vpp(g);
        let seq = count_vpp(&rg).unwrap();
        for threads in [1, 2, 4, 8] {
            for mode in [ScheduleMode::Dynamic, ScheduleMode::Static] {
                for strategy in [Strategy::Priority, Strategy::Random, Strategy::Heuristic] {
                    for seed in 0..3 {
                        let cfg = ScheduleConfig {
                            mode,
                            strategy,
                            threads,
                            seed,
                        };
                        let par = count_parallel(&rg, &cfg).map_err(|e| e.to_string())?;
                        ensure!(
                            par.report.butterflies == seq.butterflies
                                && par.report.wedges_processed == seq.wedges_processed,
                            "graph {i}, {cfg:?}: {} vs {}",
                            par.report.butterflies,
                            seq.butterflies
                        );
                        runs += 1;
                    }
                }
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{runs} runs, {:.2?}", start.elapsed()))
}

fn c8_external_memory() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let g = gen::random_with_edges(2000, 2000, 100_000, 8);
    let input = dir.path().join("g.txt");
    g.write_edge_list(std::fs::File::create(&input).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let vpp = count_vpp(&prepare_vpp(&g).0).unwrap();
    let mut passes = Vec::new();
    for mib in [1usize, 4, 64] {
        let cfg = EmConfig {
            memory_budget: mib << 20,
            ..EmConfig::new(dir.path())
        };
        let em = em_count(&input, &cfg).map_err(|e| e.to_string())?;
        ensure!(
            em.report.butterflies == vpp.butterflies,
            "{mib} MiB: {} vs {}",
            em.report.butterflies,
            vpp.butterflies
        );
        ensure!(
            em.io.pairs_emitted == vpp.wedges_processed,
            "{mib} MiB: {} pairs vs {} wedges",
            em.io.pairs_emitted,
            vpp.wedges_processed
        );
        passes.push(em.io.merge_passes);
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "m = {}, merge passes {passes:?}, {:.2?}",
        g.m(),
        start.elapsed()
    ))
}

fn c9_approx() -> Check {
    let start = Instant::now();
    let g = gen::hub(1000, 1000);
    let set = approx::run_trials(&g, 0.5, 200, 2024).map_err(|e| e.to_string())?;
    let (mean, se) = (set.mean(), set.std_error());
    ensure!(
        (mean - 999_000.0).abs() <= 3.0 * se,
        "mean {mean:.0}, 3·SE {:.0}",
        3.0 * se
    );
    let exact = approx::estimate_butterflies(&g, 1.0, 0).map_err(|e| e.to_string())?;
    ensure!(exact == 999_000.0, "p = 1 gave {exact}");
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "mean {mean:.0} ± {se:.0} (SE), {:.2?}",
        start.elapsed()
    ))
}

fn c10_clustering(graphs: &[BipartiteGraph]) -> Check {
    let c4 = clustering_coefficient(&gen::complete(2, 2)).unwrap();
    ensure!(c4 == Some(1.0), "4-cycle coefficient {c4:?}");
    let p3 = clustering_coefficient(&gen::path(3)).unwrap();
    ensure!(p3 == Some(0.0), "3-path coefficient {p3:?}");
    for (i, g) in graphs.iter().enumerate() {
        let cat = count_caterpillars(g).unwrap();
        ensure!(
            cat == three_paths(g),
            "graph {i}: caterpillars {cat} vs {}",
            three_paths(g)
        );
        if let Some(c) = clustering_coefficient(g).unwrap() {
            ensure!((0.0..=1.0).contains(&c), "graph {i}: coefficient {c}");
        }
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn c11_scaling() -> Check {
    let start = Instant::now();
    let mut ratios = Vec::new();
    for h in [100usize, 300, 1000] {
        let g = gen::hub(h, h);
        let ibs = count_ibs(&g).unwrap().wedges_processed as f64;
        let vp = count_vp(&RankedGraph::new(&g)).unwrap().wedges_processed as f64;
        ratios.push((h as f64, ibs / vp));
    }
    for w in ratios.windows(2) {
        let ((h0, r0), (h1, r1)) = (w[0], w[1]);
        ensure!(
            r1 / r0 >= h1 / h0,
            "ratio grew {:.2}× while h grew {:.2}×",
            r1 / r0,
            h1 / h0
        );
    }
    let last = ratios.last().unwrap().1;
    ensure!(last > 100.0, "ratio {last:.1} at h = 1000");
    within(Duration::from_secs(10), start)?;
    let shown: Vec<String> = ratios
        .iter()
        .map(|(h, r)| format!("h={h}: {r:.0}×"))
        .collect();
    Ok(shown.join(", "))
}

fn main() {
    let graphs = corpus();
    let criteria: Vec<Criterion> = vec![
        ("1 oracle equivalence", Box::new(|| c1_oracle(&graphs))),
        ("2 hub graph wedges and count", Box::new(c2_hub)),
        ("3 hub-path wedges", Box::new(c3_hub_path)),
        (
            "4 equal wedge counts, vp and vpp",
            Box::new(|| c4_equal_wedges(&graphs)),
        ),
        ("5 squared-degree bound", Box::new(|| c5_degree_bound(&graphs))),
        (
            "6 per-edge and per-vertex conservation",
            Box::new(|| c6_conservation(&graphs)),
        ),
        ("7 parallel determinism", Box::new(c7_parallel)),
        (
            "8 external-memory equivalence",
            Box::new(c8_external_memory),
        ),
        ("9 approximate unbiasedness", Box::new(c9_approx)),
        (
            "10 clustering coefficient",
            Box::new(|| c10_clustering(&graphs)),
        ),
        ("11 wedge-ratio scaling", Box::new(c11_scaling)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
