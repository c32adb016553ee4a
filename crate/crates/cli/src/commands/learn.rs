use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use snsr_core::filter::{write_filter, ChebyshevFilter};
use snsr_core::graph::{build_laplacian, estimate_lambda_max_default, LaplacianKind};
use snsr_core::taskgen::*;
use snsr_core::training::*;
use snsr_core::BeliefVector;

use super::{load_config, manifest_config, read_json};
use crate::output::{sci17, Run};
use crate::spec::parse_model;
use crate::Global;


#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Task file written by `gen`.
    #[arg(long)]
    pub tasks: PathBuf,
    /// Chebyshev order of each expert.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// 1 trains a single filter; more trains a gated mixture.
    #[arg(long, default_value_t = 1)]
    pub experts: usize,
}

/// Regression target per task: the labels in the oracle's encoding.
fn target(task: &TaskInstance) -> Result<BeliefVector> {
    let neg = if task.kind == TaskKind::Community { -1.0 } else { 0.0 };
    Ok(BeliefVector::vertex(task.labels.iter().map(|&l| if l { 1.0 } else { neg }).collect())?)
}

pub fn train(g: &Global, a: &TrainArgs) -> Result<()> {
    let mut config: TrainConfig = load_config(g)?;
    config.seed = g.seed;
    let mut run = Run::new(&g.out_dir, "train", manifest_config(g, a, Some(&config))?)?;
    run.input("tasks", &a.tasks)?;
    if let Some(c) = &g.config {
        run.input("config", c)?;
    }
    let tasks: Vec<TaskInstance> = read_json(&a.tasks)?;
    anyhow::ensure!(!tasks.is_empty(), "task file is empty");
    anyhow::ensure!(a.experts >= 1, "--experts must be at least 1");
    let data = tasks
        .iter()
        .map(|t| -> Result<TrainingGraph> {
            Ok(TrainingGraph {
                laplacian: build_laplacian(&t.graph, LaplacianKind::Combinatorial)?,
                examples: vec![TrainingExample {
                    x: t.seed_beliefs.clone(),
                    loss: LossKind::SquaredError { target: target(t)? },
                    allowed_bands: Some(t.allowed_bands.clone()),
                    transfer_reference: None,
                }],
                rule_target: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lm = estimate_lambda_max_default(&data[0].laplacian).value;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut init = |scale: f64| -> Result<ChebyshevFilter> {
        let mut theta: Vec<f64> = (0..=a.order).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        theta[0] += 0.5;
        Ok(ChebyshevFilter::new(theta, lm)?)
    };
    let model = if a.experts == 1 {
        TrainableModel::Filter(init(0.0)?)
    } else {
        let experts = (0..a.experts).map(|_| init(0.1)).collect::<Result<Vec<_>>>()?;
        TrainableModel::Mose(MoSEModel::uniform(experts, FeatureSpec { bands: config.bands })?)
    };
    let out = train_model(model, &data, &config)?;
    match &out.model {
        TrainableModel::Filter(f) => {
            run.write_with("model.json", |w| Ok(write_filter(f, w)?))?;
        }
        TrainableModel::Mose(m) => {
            run.write_json("model.json", m)?;
        }
    }
    run.write_with("loss_history.csv", |w| Ok(out.history.write_csv(w)?))?;
    run.finish()?;
    let totals = out.history.totals();
    if let (Some(first), Some(last)) = (totals.first(), totals.last()) {
        println!("loss {first:.6e} -> {last:.6e} over {} epochs", totals.len());
    }
    Ok(())
}

fn train_model(model: TrainableModel, data: &[TrainingGraph], config: &TrainConfig) -> Result<TrainOutput> {
    Ok(snsr_core::training::train(model, data, config)?)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    /// `community`, `contradiction` or `chain`; ignored when --config holds parameters.
    #[arg(long, default_value = "community")]
    pub kind: String,
    /// Instances to generate; instance `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

pub fn gen(g: &Global, a: &GenArgs) -> Result<()> {
    let params: TaskParams = match &g.config {
        Some(p) => read_json(p)?,
        None => match a.kind.as_str() {
            "community" => TaskParams::Community(CommunityParams::default()),
            "contradiction" => TaskParams::Contradiction(ContradictionParams::default()),
            "chain" => TaskParams::Chain(ChainParams::default()),
            k => anyhow::bail!("unknown task kind `{k}` (community, contradiction, chain)"),
        },
    };
    anyhow::ensure!(a.count >= 1, "--count must be at least 1");
    let mut run = Run::new(&g.out_dir, "gen", manifest_config(g, a, Some(&params))?)?;
    if let Some(c) = &g.config {
        run.input("config", c)?;
    }
    let tasks = (0..a.count)
        .map(|i| gen_task(&params, g.seed.wrapping_add(i as u64)))
        .collect::<snsr_core::Result<Vec<_>>>()?;
    run.write_json("tasks.json", &tasks)?;
    run.finish()?;
    println!("generated {} instance(s)", tasks.len());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// `oracle`, `zero`, `rational:TAU`, `filter:PATH`, `mose:PATH` or a response such as `diffusion:1[@K]`.
    #[arg(long)]
    pub model: String,
    /// Overrides the per-kind default threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub latency_runs: Option<usize>,
    /// Perturb this band of every input (with --perturb-magnitude).
    #[arg(long, requires = "perturb_magnitude")]
    pub perturb_band: Option<usize>,
    #[arg(long, requires = "perturb_band")]
    pub perturb_magnitude: Option<f64>,
}

pub fn eval(g: &Global, a: &EvalArgs) -> Result<()> {
    let mut config: EvalConfig = load_config(g)?;
    if a.threshold.is_some() {
        config.threshold = a.threshold;
    }
    if let Some(r) = a.latency_runs {
        config.latency_runs = r;
    }
    if let (Some(band), Some(magnitude)) = (a.perturb_band, a.perturb_magnitude) {
        config.perturbation = Some(PerturbationConfig { band, magnitude, seed: g.seed });
    }
    let mut run = Run::new(&g.out_dir, "eval", manifest_config(g, a, Some(&config))?)?;
    run.input("tasks", &a.tasks)?;
    if let Some(c) = &g.config {
        run.input("config", c)?;
    }
    if let Some(p) = a.model.split_once(':').filter(|(k, _)| *k == "filter" || *k == "mose").map(|(_, p)| p) {
        run.input("model", std::path::Path::new(p))?;
    }
    let model = parse_model(&a.model)?;
    let tasks: Vec<TaskInstance> = read_json(&a.tasks)?;
    let report = evaluate(&model, &tasks, &config)?;
    let set = a.tasks.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    run.write_with("eval.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record([
            "model",
            "task_set",
            "instances",
            "accuracy",
            "latency_ms",
            "band_fractions",
            "robustness_drop",
            "proof_band_agreement",
            "auc",
        ])?;
        c.write_record([
            a.model.clone(),
            set.clone(),
            report.instances.to_string(),
            sci17(report.accuracy),
            format!("{:.6}", report.latency_ms),
            report.band_report.fractions.iter().map(|v| sci17(*v)).collect::<Vec<_>>().join(";"),
            sci17(report.robustness_drop),
            sci17(report.proof_band_agreement),
            report.auc.map(sci17).unwrap_or_default(),
        ])?;
        c.flush()?;
        Ok(())
    })?;
    run.finish()?;
    println!(
        "accuracy {:.4}  latency {:.3} ms  agreement {:.4}{}",
        report.accuracy,
        report.latency_ms,
        report.proof_band_agreement,
        report.auc.map(|v| format!("  auc {v:.4}")).unwrap_or_default()
    );
    Ok(())
}
