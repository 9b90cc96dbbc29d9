use std::io::Write;

use serde::{Deserialize, Serialize};

use super::FineState;

pub const SNAPSHOT_HEADER: [&str; 7] =
    ["t", "x", "density", "re_psi_plus", "im_psi_plus", "re_psi_minus", "im_psi_minus"];

/// Writes one row per fine site.
pub fn write_snapshot(out: impl Write, fine: &FineState) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for (k, v) in fine.psi.iter().enumerate() {
        let row = [
            fine.t,
            fine.lattice.fine_x(k),
            v.norm_squared(),
            v[0].re,
            v[0].im,
            v[1].re,
            v[1].im,
        ];
        w.write_record(row.iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Description of a run, written next to its snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    pub metric: String,
    pub mass: f64,
    pub eps: f64,
    pub steps: usize,
    pub seed: Option<u64>,
    pub time_scale: f64,
    /// Horizon guard width; zero when the metric has no horizon.
    pub horizon_guard: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub final_norm: f64,
    /// Largest relative change of the norm over the run.
    pub norm_drift: f64,
    pub max_certificate_residual: f64,
    pub near_boundary_points: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::matrix::{CVec2, C64};

    #[test]
    fn rows_match_sites() {
        let lattice = Lattice::new(0.0, 0.5, 2).unwrap();
        let fine = FineState::sample(lattice, 1.0, |x| CVec2::new(C64::new(x, 1.0), C64::new(0.0, -x)));
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &fine).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x,density,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus");
        assert_eq!(lines.len(), 5);
        let second: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(second, vec![1.0, 1.5, 1.5f64.powi(2) * 2.0 + 1.0, 1.5, 1.0, 0.0, -1.5]);
    }
}
