use pairwalk_core::lattice::{LatticeError, Wavepacket};
use pairwalk_core::oracle::{convergence_sweep, SweepSetup};
use pairwalk_core::synthesis::SynthesisOptions;

use super::{write_text, Context};
use crate::error::CliError;

pub const MIN_EPS_VALUES: usize = 3;

pub fn run(ctx: &Context, eps_list: &[f64]) -> Result<(), CliError> {
    if eps_list.len() < MIN_EPS_VALUES {
        return Err(CliError::Config(format!(
            "a convergence sweep needs at least {MIN_EPS_VALUES} eps values, got {}",
            eps_list.len()
        )));
    }
    if let Some(eps) = eps_list.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(CliError::Config(format!("eps values must be positive, got {eps}")));
    }
    let config = &ctx.config;
    let (metric, b1, c) = ctx.fields()?;
    let setup = SweepSetup {
        x_min: config.domain.x_min,
        x_max: config.domain.x_max,
        t_final: config.converge.t_final,
        pde_dx: config.converge.pde_dx,
        cfl: config.converge.cfl,
    };
    let period = setup.x_max - setup.x_min;
    let max_modes = (period / setup.pde_dx) as usize / 2;
    let params = config.packet();
    let packet = Wavepacket::new(&params, &metric.representation, period, max_modes);
    let peak = packet.eval(params.x0).norm_squared();
    let boundary = packet.eval(setup.x_min).norm_squared();
    if boundary > params.tail_tolerance * peak {
        return Err(LatticeError::PacketTruncated { boundary, peak }.into());
    }

    let report =
        convergence_sweep(&b1, &c, &|x| packet.eval(x), &setup, eps_list, &SynthesisOptions::default())?;
    let text = report.to_string();
    print!("{text}");
    write_text(&ctx.output("convergence.txt")?, &text)?;
    Ok(())
}
