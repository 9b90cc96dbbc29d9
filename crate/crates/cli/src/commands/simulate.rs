use serde::Serialize;

use pairwalk_core::lattice::{density, gaussian_wavepacket, pair, unpair, write_snapshot, Parity, RunMetadata, Walk};
use pairwalk_core::spacetime::null_geodesics;
use pairwalk_core::synthesis::SynthesisOptions;

use super::{write_text, Context};
use crate::config::SimConfig;
use crate::error::CliError;
use crate::output::{create, write_geodesics, write_heatmap};

#[derive(Serialize)]
struct RunFile<'a> {
    run: &'a RunMetadata,
    config: &'a SimConfig,
}

pub fn snapshot_name(step: usize) -> String {
    format!("snapshot_{step:06}.csv")
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let config = &ctx.config;
    let (metric, b1, c) = ctx.fields()?;
    let lattice = ctx.lattice()?;
    let fine = gaussian_wavepacket(&config.packet(), &metric.representation, lattice)?;
    let walk = Walk::new(b1, c, lattice, SynthesisOptions::default())?;

    let steps = config.lattice.steps;
    let stride = config.lattice.stride;
    let n0 = fine.psi.iter().map(|v| v.norm_squared()).sum::<f64>() * lattice.spacing();
    let mut drift = 0.0f64;
    let mut frames = vec![density(&fine)];
    let mut failure = None;
    let start = pair(&fine, Parity::Even)?;
    let end = walk.run(start, steps, |n, state| {
        drift = drift.max(((state.norm_squared() - n0) / n0).abs());
        if n == 0 || failure.is_some() || (n % stride != 0 && n != steps) {
            return;
        }
        let fine = unpair(state);
        frames.push(density(&fine));
        let written = ctx.output(&snapshot_name(n)).and_then(|path| Ok(write_snapshot(create(&path)?, &fine)?));
        if let Err(e) = written {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let report = walk.report();
    let meta = RunMetadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        metric: config.metric_name(),
        mass: config.particle.m,
        eps: lattice.eps,
        steps,
        seed: None,
        time_scale: metric.time_scale,
        horizon_guard: metric.horizon_guard(),
        x_min: lattice.x_min,
        x_max: lattice.x_max(),
        final_norm: end.norm_squared().sqrt(),
        norm_drift: drift,
        max_certificate_residual: report.max_residual,
        near_boundary_points: report.near_boundary_points,
    };
    let text = toml::to_string(&RunFile { run: &meta, config })
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    write_text(&ctx.output("run.toml")?, &text)?;
    write_heatmap(create(&ctx.output("density.pgm")?)?, &frames)?;

    let seeds: Vec<f64> =
        config.geodesics.seeds.iter().copied().filter(|&x| metric.contains(0.0, x)).collect();
    if !seeds.is_empty() {
        let geodesics = null_geodesics(&metric, &seeds, end.t, config.geodesics.dt)?;
        write_geodesics(create(&ctx.output("geodesics.csv")?)?, &geodesics)?;
    }
    println!(
        "{steps} steps to t = {:.6}, {} snapshots in {}; norm drift {drift:.3e}",
        end.t,
        frames.len() - 1,
        ctx.out.display()
    );
    Ok(())
}
