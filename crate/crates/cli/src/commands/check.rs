use serde::Serialize;

use pairwalk_core::lattice::{pair, FineState, Lattice, Parity, PairedState, Walk};
use pairwalk_core::matrix::{block, CVec2, CVec4, IDENTITY2, C64};
use pairwalk_core::spacetime::DiracField;
use pairwalk_core::synthesis::general::{block_conditions, general_b, EtaSign};
use pairwalk_core::synthesis::{synthesize_point, HermitianField, SynthesisOptions, TAU_SYN};

use super::{write_text, Context};
use crate::error::CliError;

/// Relative norm change accepted over the unitarity run.
pub const NORM_TOLERANCE: f64 = 1e-10;
const UNITARITY_STEPS: usize = 1000;
const CAUSALITY_STEPS: usize = 100;
// Every this many cell centres is used for the general-family check.
const GENERAL_STRIDE: usize = 10;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &'static str, value: f64, tolerance: f64, detail: String) -> Self {
        Self { name, passed: value <= tolerance, value, tolerance, detail }
    }

    fn failed(name: &'static str, tolerance: f64, e: impl std::fmt::Display) -> Self {
        Self { name, passed: false, value: f64::NAN, tolerance, detail: e.to_string() }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    passed: bool,
    check: Vec<CheckResult>,
}

fn centres(lattice: &Lattice) -> impl Iterator<Item = f64> + '_ {
    [Parity::Even, Parity::Odd].into_iter().flat_map(move |p| (0..lattice.cells).map(move |j| lattice.center(j, p)))
}

fn certificates(b1: &DiracField, c: &DiracField, lattice: &Lattice) -> CheckResult {
    let opts = SynthesisOptions::default();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for x in centres(lattice) {
        match synthesize_point(b1, c, 0.0, x, &opts) {
            Ok(ops) => worst = worst.max(ops.certificates.max_residual()),
            Err(e) => return CheckResult::failed("certificates", TAU_SYN, format!("at x={x}: {e}")),
        }
        points += 1;
    }
    CheckResult::measured("certificates", worst, TAU_SYN, format!("{points} cell centres"))
}

fn general_family(b1: &DiracField, lattice: &Lattice) -> CheckResult {
    use EtaSign::{Minus, Plus};
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for x in centres(lattice).step_by(GENERAL_STRIDE) {
        let value = b1.value(0.0, x);
        for signs in [[Plus, Plus], [Plus, Minus], [Minus, Plus], [Minus, Minus]] {
            match general_b(&value, signs, &IDENTITY2) {
                Ok(b) => {
                    let r = block_conditions(&value, &block(&b, 2), &block(&b, 4));
                    worst = r.iter().cloned().fold(worst, f64::max);
                }
                Err(e) => return CheckResult::failed("general_b", TAU_SYN, format!("at x={x}: {e}")),
            }
        }
        points += 1;
    }
    CheckResult::measured("general_b", worst, TAU_SYN, format!("{points} points, 4 sign choices"))
}

/// A fixed, irregular state on every fine site.
fn probe_state(lattice: Lattice) -> FineState {
    let psi = (0..lattice.fine_sites())
        .map(|k| {
            let k = k as f64;
            CVec2::new(C64::new((1.3 * k).sin(), (0.7 * k).cos()), C64::new((2.1 * k).cos(), (0.3 * k).sin()))
        })
        .collect();
    FineState::new(lattice, 0.0, psi).expect("sized to the lattice")
}

fn unitarity(walk: &Walk<DiracField, DiracField>, lattice: Lattice, steps: usize) -> CheckResult {
    let start = match pair(&probe_state(lattice), Parity::Even) {
        Ok(s) => s,
        Err(e) => return CheckResult::failed("unitarity", NORM_TOLERANCE, e),
    };
    let n0 = start.norm_squared();
    let mut drift: f64 = 0.0;
    match walk.run(start, steps, |_, s| drift = drift.max(((s.norm_squared() - n0) / n0).abs())) {
        Ok(_) => CheckResult::measured("unitarity", drift, NORM_TOLERANCE, format!("{steps} steps")),
        Err(e) => CheckResult::failed("unitarity", NORM_TOLERANCE, e),
    }
}

/// Distance in cells from `centre` to the farthest non-zero cell, periodic.
fn support_radius(state: &PairedState, centre: usize) -> usize {
    let cells = state.phi.len();
    state
        .phi
        .iter()
        .enumerate()
        .filter(|(_, v)| v.iter().any(|z| *z != C64::from(0.0)))
        .map(|(j, _)| {
            let d = (j + cells - centre) % cells;
            d.min(cells - d)
        })
        .max()
        .unwrap_or(0)
}

/// A single excited cell may spread by at most one cell per step.
fn causality(walk: &Walk<DiracField, DiracField>, lattice: Lattice, steps: usize) -> CheckResult {
    let centre = lattice.cells / 2;
    let mut phi = vec![CVec4::zeros(); lattice.cells];
    phi[centre] = CVec4::new(C64::new(0.6, 0.1), C64::new(-0.3, 0.4), C64::new(0.2, -0.5), C64::new(0.1, 0.3));
    let start = PairedState { lattice, t: 0.0, parity: Parity::Even, phi };
    let mut excess = 0usize;
    let result = walk.run(start, steps, |n, s| {
        excess = excess.max(support_radius(s, centre).saturating_sub(n));
    });
    match result {
        Ok(_) => CheckResult::measured("causality", excess as f64, 0.0, format!("{steps} steps from one cell")),
        Err(e) => CheckResult::failed("causality", 0.0, e),
    }
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let (_, b1, c) = ctx.fields()?;
    let lattice = ctx.lattice()?;
    let mut checks = vec![certificates(&b1, &c, &lattice), general_family(&b1, &lattice)];
    match Walk::new(b1, c, lattice, SynthesisOptions::default()) {
        Ok(walk) => {
            let steps = ctx.config.lattice.steps.min(UNITARITY_STEPS);
            checks.push(unitarity(&walk, lattice, steps));
            let steps = CAUSALITY_STEPS.min(lattice.cells / 2 - 1);
            checks.push(causality(&walk, lattice, steps));
        }
        Err(e) => {
            checks.push(CheckResult::failed("unitarity", NORM_TOLERANCE, &e));
            checks.push(CheckResult::failed("causality", 0.0, &e));
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let summary = Summary { passed: failed.is_empty(), check: checks };
    let text = toml::to_string(&summary).map_err(|e| CliError::Numerical(e.to_string()))?;
    print!("{text}");
    write_text(&ctx.output("check.toml")?, &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certificate(format!("failed checks: {}", failed.join(", "))))
    }
}
