use std::collections::BTreeSet;
use std::time::Instant;

use anyhow::Result;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use snsr_core::exec::Exec;
use snsr_core::filter::{cheb_apply_with, AnalyticResponse, ChebyshevFilter};
use snsr_core::graph::*;
use snsr_core::taskgen::{evaluate, gen_community_task, CommunityParams, EvalConfig, Model};
use snsr_core::BeliefVector;

use super::{manifest_config, reject_config};
use crate::output::{sci17, Run};
use crate::spec::parse_list;
use crate::Global;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepConfig {
    pub nodes: usize,
    /// Edge count of the smallest graph in the edge sweep.
    pub base_edges: usize,
    /// Order held fixed during the edge sweep; first order of the order sweep.
    pub base_order: usize,
    pub doublings: usize,
    /// Timed repetitions per point; the median is reported.
    pub reps: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nodes: 1 << 14,
            base_edges: 1 << 16,
            base_order: 4,
            doublings: 3,
            reps: 15,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    /// `edges` or `order`.
    pub sweep: &'static str,
    pub order: usize,
    pub nodes: usize,
    pub edges: usize,
    pub median_ms: f64,
    /// Median time over the previous row of the same sweep.
    pub ratio: Option<f64>,
}

/// Ring over `n` nodes plus distinct random chords up to `m` edges.
pub fn bench_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    anyhow::ensure!(n >= 3 && m >= n && m <= n * (n - 1) / 2, "need n >= 3 and n <= m <= n(n-1)/2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<(usize, usize)> = (0..n).map(|i| { let j = (i + 1) % n; (i.min(j), i.max(j)) }).collect();
    while seen.len() < m {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            seen.insert((i.min(j), i.max(j)));
        }
    }
    Ok(Graph::new(n, seen.into_iter().map(|(i, j)| (i, j, 1.0)), WeightSign::Unsigned)?)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
}

/// Median serial `cheb_apply` time in milliseconds.
fn time_apply(g: &Graph, order: usize, reps: usize, seed: u64) -> Result<f64> {
    let l = build_laplacian(g, LaplacianKind::Combinatorial)?;
    let lt = scale_laplacian(&l, estimate_lambda_max_default(&l).value)?;
    let f = ChebyshevFilter::new(vec![1.0 / (order + 1) as f64; order + 1], lt.lambda_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = BeliefVector::vertex((0..g.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    // One untimed run warms caches and the allocator.
    std::hint::black_box(cheb_apply_with(Exec::Serial, &f, &lt, &x, false)?);
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        std::hint::black_box(cheb_apply_with(Exec::Serial, &f, &lt, &x, false)?);
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(median(times))
}

/// Doubling sweeps: `|E|` at fixed order, then order at fixed `|E|`.
pub fn scaling_sweep(cfg: &SweepConfig) -> Result<Vec<BenchRow>> {
    let mut rows: Vec<BenchRow> = Vec::new();
    let push = |rows: &mut Vec<BenchRow>, sweep, order, g: &Graph| -> Result<()> {
        let ms = time_apply(g, order, cfg.reps, cfg.seed)?;
        let ratio = rows.last().filter(|r| r.sweep == sweep).map(|r| ms / r.median_ms);
        rows.push(BenchRow { sweep, order, nodes: g.node_count(), edges: g.edge_count(), median_ms: ms, ratio });
        Ok(())
    };
    for d in 0..=cfg.doublings {
        let g = bench_graph(cfg.nodes, cfg.base_edges << d, cfg.seed)?;
        push(&mut rows, "edges", cfg.base_order, &g)?;
    }
    let g = bench_graph(cfg.nodes, cfg.base_edges, cfg.seed)?;
    for d in 0..=cfg.doublings {
        push(&mut rows, "order", cfg.base_order << d, &g)?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1 << 14)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1 << 16)]
    pub edges: usize,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long, default_value_t = 3)]
    pub doublings: usize,
    #[arg(long, default_value_t = 15)]
    pub reps: usize,
    /// Orders for the accuracy-latency table on community tasks.
    #[arg(long, default_value = "2,4,8,16")]
    pub tradeoff_orders: String,
    /// Community instances per tradeoff point.
    #[arg(long, default_value_t = 4)]
    pub tradeoff_tasks: usize,
}

pub fn bench(g: &Global, a: &BenchArgs) -> Result<()> {
    reject_config(g, "bench")?;
    let mut run = Run::new(&g.out_dir, "bench", manifest_config::<_, ()>(g, a, None)?)?;
    let cfg = SweepConfig {
        nodes: a.nodes,
        base_edges: a.edges,
        base_order: a.order,
        doublings: a.doublings,
        reps: a.reps,
        seed: g.seed,
    };
    let rows = scaling_sweep(&cfg)?;
    run.write_with("scaling.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["sweep", "order", "nodes", "edges", "median_ms", "ratio"])?;
        for r in &rows {
            c.write_record([
                r.sweep.to_string(),
                r.order.to_string(),
                r.nodes.to_string(),
                r.edges.to_string(),
                format!("{:.6}", r.median_ms),
                r.ratio.map(|v| format!("{v:.4}")).unwrap_or_default(),
            ])?;
        }
        c.flush()?;
        Ok(())
    })?;

    let tasks = (0..a.tradeoff_tasks)
        .map(|i| gen_community_task(&CommunityParams::default(), g.seed.wrapping_add(i as u64)))
        .collect::<snsr_core::Result<Vec<_>>>()?;
    let mut tradeoff = Vec::new();
    for k in parse_list::<usize>(&a.tradeoff_orders)? {
        let model = Model::Response { response: AnalyticResponse::Diffusion { tau: 1.0 }, order: Some(k) };
        let r = evaluate(&model, &tasks, &EvalConfig::default())?;
        tradeoff.push((k, r.accuracy, r.latency_ms));
    }
    run.write_with("tradeoff.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["order", "accuracy", "latency_ms"])?;
        for (k, acc, ms) in &tradeoff {
            c.write_record([k.to_string(), sci17(*acc), format!("{ms:.6}")])?;
        }
        c.flush()?;
        Ok(())
    })?;
    run.finish()?;
    let worst = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    println!("largest doubling ratio {worst:.3}");
    Ok(())
}
