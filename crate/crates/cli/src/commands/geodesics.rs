use pairwalk_core::spacetime::null_geodesics;

use super::Context;
use crate::error::CliError;
use crate::output::{create, write_geodesics};

/// Integrates over the walk time of the configured run.
pub fn run(ctx: &Context, seeds: &[f64]) -> Result<(), CliError> {
    let metric = ctx.config.metric()?;
    let lattice = &ctx.config.lattice;
    let t_max = lattice.steps as f64 * 2.0 * lattice.eps;
    let geodesics = null_geodesics(&metric, seeds, t_max, ctx.config.geodesics.dt)?;
    let path = ctx.output("geodesics.csv")?;
    write_geodesics(create(&path)?, &geodesics)?;
    println!("{} geodesics written to {}", geodesics.len(), path.display());
    Ok(())
}
