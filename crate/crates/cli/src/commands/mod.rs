pub mod bench;
pub mod fit;
pub mod learn;
pub mod study;

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::open_input;
use crate::Global;

/// Parse the `--config` file, or fall back to the default.
pub(crate) fn load_config<T: DeserializeOwned + Default>(g: &Global) -> Result<T> {
    match &g.config {
        Some(p) => serde_json::from_reader(open_input(p)?).with_context(|| format!("invalid config {}", p.display())),
        None => Ok(T::default()),
    }
}

pub(crate) fn reject_config(g: &Global, command: &str) -> Result<()> {
    anyhow::ensure!(g.config.is_none(), "`{command}` takes no --config file");
    Ok(())
}

/// Manifest `config` block: global flags, command flags and resolved config.
pub(crate) fn manifest_config<A: Serialize, C: Serialize>(g: &Global, args: &A, config: Option<&C>) -> Result<Value> {
    Ok(json!({
        "seed": g.seed,
        "args": serde_json::to_value(args)?,
        "config": match config {
            Some(c) => serde_json::to_value(c)?,
            None => Value::Null,
        },
    }))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open_input(path)?).with_context(|| format!("cannot parse {}", path.display()))
}
