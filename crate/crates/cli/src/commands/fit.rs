use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;
use snsr_core::analysis::{band_energy, write_band_reports, BandPartition};
use snsr_core::filter::*;
use snsr_core::graph::*;
use snsr_core::rules::{forward_chain, project_predicates, ProjectionMode, RuleBase};
use snsr_core::taskgen::node_atom;

use super::{manifest_config, read_json, reject_config};
use crate::output::{sci17, Run};
use crate::spec::{parse_laplacian, read_beliefs, read_graph};
use crate::Global;

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// `identity`, `diffusion:TAU`, `highpass:BETA`, `bandpass:C,W` or `poly:C0,C1,...`.
    #[arg(long, default_value = "diffusion:1")]
    pub response: String,
    /// Chebyshev order K.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    #[arg(long, default_value = "combinatorial")]
    pub laplacian: String,
}

/// Laplacian and its default `λ_max` estimate, shared by `fit` and `infer` so
/// a fitted filter always matches the graph it was fitted on.
fn operator(graph: &Graph, kind: &str) -> Result<(Laplacian, ScaledLaplacian)> {
    let l = build_laplacian(graph, parse_laplacian(kind)?)?;
    let lm = estimate_lambda_max_default(&l).value;
    let lt = scale_laplacian(&l, lm)?;
    Ok((l, lt))
}

pub fn fit(g: &Global, a: &FitArgs) -> Result<()> {
    reject_config(g, "fit")?;
    let mut run = Run::new(&g.out_dir, "fit", manifest_config::<_, ()>(g, a, None)?)?;
    run.input("graph", &a.graph)?;
    let graph = read_graph(&a.graph, parse_laplacian(&a.laplacian)?)?;
    let (_, lt) = operator(&graph, &a.laplacian)?;
    let response = AnalyticResponse::parse_spec(&a.response)?;
    let f = fit_chebyshev(&response, a.order, lt.lambda_max, default_quadrature_nodes(a.order))?;
    let err = max_grid_error(&f, &response, FIT_GRID_POINTS);
    run.write_with("filter.json", |w| Ok(write_filter(&f, w)?))?;
    run.finish()?;
    println!("max grid error: {err:.6e}");
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InferArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Filter file written by `fit` or `train`.
    #[arg(long)]
    pub filter: PathBuf,
    /// One belief per line, in node order.
    #[arg(long)]
    pub beliefs: PathBuf,
    /// Rulebase JSON; node `i` is the atom `n{i}`.
    #[arg(long)]
    pub rulebase: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// `hard` or `soft`.
    #[arg(long, default_value = "hard")]
    pub mode: String,
    /// Sigmoid temperature in soft mode.
    #[arg(long, default_value_t = 10.0)]
    pub temperature: f64,
    #[arg(long, default_value = "combinatorial")]
    pub laplacian: String,
}

pub fn infer(g: &Global, a: &InferArgs) -> Result<()> {
    reject_config(g, "infer")?;
    let mut run = Run::new(&g.out_dir, "infer", manifest_config::<_, ()>(g, a, None)?)?;
    run.input("graph", &a.graph)?;
    run.input("filter", &a.filter)?;
    run.input("beliefs", &a.beliefs)?;
    if let Some(r) = &a.rulebase {
        run.input("rulebase", r)?;
    }
    let graph = read_graph(&a.graph, parse_laplacian(&a.laplacian)?)?;
    let (l, lt) = operator(&graph, &a.laplacian)?;
    let f = read_filter(crate::output::open_input(&a.filter)?)?;
    let tol = 1e-9 * lt.lambda_max;
    if (f.lambda_max() - lt.lambda_max).abs() > tol {
        return Err(snsr_core::Error::LambdaMaxMismatch {
            filter: f.lambda_max(),
            operator: lt.lambda_max,
        }
        .into());
    }
    // Use the graph's own scaling; the check above bounds the difference.
    let f = f.with_lambda_max(lt.lambda_max)?;
    let x = read_beliefs(&a.beliefs)?;
    let y = cheb_apply(&f, &lt, &x, false)?.0;
    let mode = match a.mode.as_str() {
        "hard" => ProjectionMode::Hard,
        "soft" => ProjectionMode::Soft { temperature: a.temperature },
        m => anyhow::bail!("unknown mode `{m}` (hard, soft)"),
    };
    let p = project_predicates(&y, a.threshold, mode)?;
    let atoms: Vec<String> = (0..graph.node_count()).map(node_atom).collect();
    let rb = match &a.rulebase {
        Some(path) => read_json::<RuleBase>(path)?,
        None => RuleBase::empty(),
    }
    .with_atoms(atoms.iter().cloned());
    let facts: BTreeSet<String> = p.true_indices().into_iter().map(|i| atoms[i].clone()).collect();
    let closure = forward_chain(&rb, &facts)?;

    run.write_with("predicates.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["node", "y", "soft", "hard"])?;
        for i in 0..y.len() {
            c.write_record([i.to_string(), sci17(y[i]), sci17(p.soft[i]), u8::from(p.hard[i]).to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    run.write_with("closure.txt", |w| {
        for atom in &closure {
            writeln!(w, "{atom}")?;
        }
        Ok(())
    })?;
    if l.dim() <= DEFAULT_ORACLE_CAP {
        let basis = eigendecompose(&l, DEFAULT_ORACLE_CAP)?;
        let partition = BandPartition::three_band(basis.lambda_max().max(f64::MIN_POSITIVE))?;
        let report = band_energy(&basis, &y, &partition)?;
        println!(
            "band fractions (low, mid, high): {}",
            report.fractions.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
        );
        run.write_with("band_report.csv", |w| Ok(write_band_reports(&[("output".to_string(), report)], w)?))?;
    }
    run.finish()?;
    println!("{} predicates true, closure has {} atoms", facts.len(), closure.len());
    Ok(())
}
