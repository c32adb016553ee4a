//! Compact specifications accepted on the command line.

use std::io::BufRead;
use std::path::Path;

use anyhow::{Context, Result};
use snsr_core::filter::{read_filter, AnalyticResponse};
use snsr_core::graph::{load_graph, Graph, LaplacianKind, WeightSign};
use snsr_core::taskgen::Model;
use snsr_core::training::MoSEModel;
use snsr_core::BeliefVector;

use crate::output::open_input;

/// Parse a model:
/// `oracle`, `zero`, `rational:TAU`, `filter:PATH`, `mose:PATH`, or a
/// response (`diffusion:1`, `highpass:1`, ...) optionally suffixed with
/// `@K` to force a Chebyshev fit of order `K`.
pub fn parse_model(spec: &str) -> Result<Model> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match kind {
        "oracle" => Model::Oracle,
        "zero" => Model::Zero,
        "rational" => Model::Rational {
            tau: rest.parse().with_context(|| format!("bad tau in `{spec}`"))?,
        },
        "filter" => Model::Filter(read_filter(open_input(Path::new(rest))?)?),
        "mose" => {
            let m: MoSEModel = serde_json::from_reader(open_input(Path::new(rest))?)
                .with_context(|| format!("cannot parse mixture {rest}"))?;
            Model::Mose(m)
        }
        _ => {
            let (resp, order) = match spec.rsplit_once('@') {
                Some((r, k)) => (r, Some(k.parse().with_context(|| format!("bad order in `{spec}`"))?)),
                None => (spec, None),
            };
            Model::Response {
                response: AnalyticResponse::parse_spec(resp)?,
                order,
            }
        }
    })
}

pub fn parse_laplacian(s: &str) -> Result<LaplacianKind> {
    Ok(match s {
        "combinatorial" => LaplacianKind::Combinatorial,
        "normalized" => LaplacianKind::Normalized,
        "signed" => LaplacianKind::Signed,
        _ => anyhow::bail!("unknown Laplacian `{s}` (combinatorial, normalized, signed)"),
    })
}

/// Signed Laplacians read signed edge lists; the others unsigned ones.
pub fn read_graph(path: &Path, kind: LaplacianKind) -> Result<Graph> {
    let sign = match kind {
        LaplacianKind::Signed => WeightSign::Signed,
        _ => WeightSign::Unsigned,
    };
    load_graph(open_input(path)?, sign).with_context(|| format!("in graph {}", path.display()))
}

/// Beliefs file: one real per line in node order; `#` lines and blanks skipped.
pub fn read_beliefs(path: &Path) -> Result<BeliefVector> {
    let mut values = Vec::new();
    for (i, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        values.push(
            t.parse::<f64>()
                .with_context(|| format!("{} line {}: bad value `{t}`", path.display(), i + 1))?,
        );
    }
    Ok(BeliefVector::vertex(values)?)
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad list entry `{p}` in `{s}`")))
        .collect()
}
