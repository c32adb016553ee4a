use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;
use snsr_core::analysis::*;
use snsr_core::graph::{build_laplacian, eigendecompose, LaplacianKind, DEFAULT_ORACLE_CAP};
use snsr_core::taskgen::*;

use super::{manifest_config, read_json, reject_config};
use crate::output::{sci17, Run};
use crate::spec::{parse_list, parse_model, read_beliefs, read_graph};
use crate::Global;

fn model_input(run: &mut Run, spec: &str) -> Result<()> {
    if let Some((_, p)) = spec.split_once(':').filter(|(k, _)| *k == "filter" || *k == "mose") {
        run.input("model", std::path::Path::new(p))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AttributeArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub model: String,
}

/// Band energies of each instance's output, plus a certificate when the
/// model is a single filter or response.
pub fn attribute(g: &Global, a: &AttributeArgs) -> Result<()> {
    reject_config(g, "attribute")?;
    let mut run = Run::new(&g.out_dir, "attribute", manifest_config::<_, ()>(g, a, None)?)?;
    run.input("tasks", &a.tasks)?;
    model_input(&mut run, &a.model)?;
    let model = parse_model(&a.model)?;
    let tasks: Vec<TaskInstance> = read_json(&a.tasks)?;
    let mut bands = Vec::new();
    let mut certs = Vec::new();
    for (i, t) in tasks.iter().enumerate() {
        let id = format!("task{i}");
        let ctx = InstanceContext::new(t)?;
        let y = apply_model(&model, &ctx, t, &t.seed_beliefs)?;
        if let (Some(b), Some(p)) = (&ctx.basis, &ctx.partition) {
            bands.push((id.clone(), band_energy(b, &y, p)?));
        }
        let lm = ctx.lt.lambda_max;
        let cert = match &model {
            Model::Filter(f) => Some(robustness_certificate((&f.with_lambda_max(lm)?).into(), lm, DEFAULT_CERTIFICATE_GRID)?),
            Model::Response { response, .. } => Some(robustness_certificate(response.into(), lm, DEFAULT_CERTIFICATE_GRID)?),
            Model::Rational { tau } => Some(robustness_certificate(
                (&snsr_core::filter::AnalyticResponse::Diffusion { tau: *tau }).into(),
                lm,
                DEFAULT_CERTIFICATE_GRID,
            )?),
            _ => None,
        };
        if let Some(c) = cert {
            certs.push((id, c));
        }
    }
    run.write_with("attribution.csv", |w| Ok(write_band_reports(&bands, w)?))?;
    if !certs.is_empty() {
        run.write_with("certificates.csv", |w| Ok(write_certificates(&certs, w)?))?;
    }
    run.finish()?;
    println!("attributed {} instance(s), {} certificate(s)", bands.len(), certs.len());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PerturbArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub model: String,
    /// Band of the three-band partition receiving the noise.
    #[arg(long, default_value_t = 2)]
    pub band: usize,
    /// Comma-separated noise norms.
    #[arg(long, default_value = "0,0.5,1,2,4")]
    pub magnitudes: String,
    #[arg(long)]
    pub threshold: Option<f64>,
}

/// Accuracy-drop curve over perturbation magnitudes.
pub fn perturb(g: &Global, a: &PerturbArgs) -> Result<()> {
    reject_config(g, "perturb")?;
    let mut run = Run::new(&g.out_dir, "perturb", manifest_config::<_, ()>(g, a, None)?)?;
    run.input("tasks", &a.tasks)?;
    model_input(&mut run, &a.model)?;
    let model = parse_model(&a.model)?;
    let tasks: Vec<TaskInstance> = read_json(&a.tasks)?;
    let mags: Vec<f64> = parse_list(&a.magnitudes)?;
    let clean = mean_accuracy(&model, &tasks, a.threshold, None)?;
    let mut rows = Vec::new();
    for m in mags {
        let p = PerturbationConfig { band: a.band, magnitude: m, seed: g.seed };
        let acc = mean_accuracy(&model, &tasks, a.threshold, Some(&p))?;
        rows.push((m, acc, 100.0 * (clean - acc)));
    }
    run.write_with("perturb.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["band", "magnitude", "clean_accuracy", "perturbed_accuracy", "drop_pp"])?;
        for (m, acc, drop) in &rows {
            c.write_record([a.band.to_string(), sci17(*m), sci17(clean), sci17(*acc), sci17(*drop)])?;
        }
        c.flush()?;
        Ok(())
    })?;
    run.finish()?;
    for (m, _, drop) in rows {
        println!("magnitude {m}: drop {drop:.2} pp");
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransferArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub source_beliefs: PathBuf,
    #[arg(long)]
    pub target_beliefs: PathBuf,
}

/// Co-spectral loss; graphs of different size are compared on a common grid.
pub fn transfer(g: &Global, a: &TransferArgs) -> Result<()> {
    reject_config(g, "transfer")?;
    let mut run = Run::new(&g.out_dir, "transfer", manifest_config::<_, ()>(g, a, None)?)?;
    for (name, p) in [
        ("source", &a.source),
        ("target", &a.target),
        ("source_beliefs", &a.source_beliefs),
        ("target_beliefs", &a.target_beliefs),
    ] {
        run.input(name, p)?;
    }
    let basis = |p: &PathBuf| -> Result<_> {
        let l = build_laplacian(&read_graph(p, LaplacianKind::Combinatorial)?, LaplacianKind::Combinatorial)?;
        Ok(eigendecompose(&l, DEFAULT_ORACLE_CAP)?)
    };
    let (bs, bt) = (basis(&a.source)?, basis(&a.target)?);
    let (xs, xt) = (read_beliefs(&a.source_beliefs)?, read_beliefs(&a.target_beliefs)?);
    let loss = cospectral_loss_across(&bs, &xs, &bt, &xt)?;
    let resampled = bs.dim() != bt.dim();
    run.write_with("transfer.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["n_source", "n_target", "resampled", "grid", "loss"])?;
        let grid = if resampled { TRANSFER_GRID } else { bs.dim() };
        c.write_record([bs.dim().to_string(), bt.dim().to_string(), resampled.to_string(), grid.to_string(), sci17(loss)])?;
        c.flush()?;
        Ok(())
    })?;
    run.finish()?;
    println!("co-spectral loss {loss:.6e}{}", if resampled { " (resampled)" } else { "" });
    Ok(())
}
