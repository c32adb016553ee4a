//! CSV rows for band reports and certificates.
//!
//! Vector-valued fields are joined with `;` inside one cell.

use std::io::Write;

use super::{BandReport, RobustnessCertificate};
use crate::error::Result;
use crate::filter::sci17;

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| sci17(*x)).collect::<Vec<_>>().join(";")
}

/// Columns: `instance, band_edges, energies, fractions, degenerate`.
pub fn write_band_reports<W: Write>(rows: &[(String, BandReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "band_edges", "energies", "fractions", "degenerate"])?;
    for (id, r) in rows {
        w.write_record([
            id.as_str(),
            &joined(r.partition.edges()),
            &joined(&r.energies),
            &joined(&r.fractions),
            if r.degenerate { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: `instance, bound, grid_points`.
pub fn write_certificates<W: Write>(rows: &[(String, RobustnessCertificate)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "bound", "grid_points"])?;
    for (id, c) in rows {
        w.write_record([id.as_str(), &sci17(c.bound), &c.grid_points.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
