use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use pairwalk_core::spacetime::{Geodesic, GeodesicKind};

use crate::error::CliError;

pub const GEODESIC_HEADER: [&str; 4] = ["seed", "kind", "t", "x"];

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(file))
}

/// Binary 8-bit PGM with one row per frame, each row scaled by its own maximum.
pub fn write_heatmap(out: impl Write, frames: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = out;
    let width = frames.first().map_or(0, Vec::len);
    write!(out, "P5\n{width} {}\n255\n", frames.len())?;
    for frame in frames {
        let max = frame.iter().cloned().fold(0.0, f64::max);
        let row: Vec<u8> = frame
            .iter()
            .map(|&v| if max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) as u8 } else { 0 })
            .collect();
        out.write_all(&row)?;
    }
    out.flush()
}

/// Polylines as `seed,kind,t,x` rows.
pub fn write_geodesics(out: impl Write, geodesics: &[Geodesic]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GEODESIC_HEADER)?;
    for g in geodesics {
        let kind = match g.kind {
            GeodesicKind::Outgoing => "outgoing",
            GeodesicKind::Ingoing => "ingoing",
        };
        for &(t, x) in &g.samples {
            w.write_record([format!("{:e}", g.seed), kind.to_string(), format!("{t:e}"), format!("{x:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
