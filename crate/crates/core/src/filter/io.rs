//! Filter file: `{"lambda_max": <real>, "theta": [<real>, ...]}`.
//!
//! Numbers are written with 17 significant digits so every coefficient
//! reads back bit-identical.

use std::io::{Read, Write};

use serde::Deserialize;

use super::ChebyshevFilter;
use crate::error::Result;

#[derive(Deserialize)]
struct FilterFile {
    lambda_max: f64,
    theta: Vec<f64>,
}

pub(crate) fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_filter<W: Write>(f: &ChebyshevFilter, mut out: W) -> Result<()> {
    let theta: Vec<String> = f.theta().iter().map(|&t| sci17(t)).collect();
    writeln!(
        out,
        "{{\"lambda_max\": {}, \"theta\": [{}]}}",
        sci17(f.lambda_max()),
        theta.join(", ")
    )?;
    Ok(())
}

pub fn read_filter<R: Read>(src: R) -> Result<ChebyshevFilter> {
    let file: FilterFile = serde_json::from_reader(src)?;
    ChebyshevFilter::new(file.theta, file.lambda_max)
}
