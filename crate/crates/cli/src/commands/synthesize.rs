use std::collections::BTreeMap;

use serde::Serialize;

use pairwalk_core::matrix::{CMat2, CMat4, C64};
use pairwalk_core::synthesis::{synthesize_point, DerivativeMethod, SynthesisOptions, WalkOperators, TAU_SYN};

use super::{write_text, Context};
use crate::error::CliError;

#[derive(Debug, Serialize)]
struct MatrixDump {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixDump {
    fn from_fn(n: usize, get: impl Fn(usize, usize) -> C64) -> Self {
        let part = |f: fn(C64) -> f64| (0..n).map(|r| (0..n).map(|c| f(get(r, c))).collect()).collect();
        Self { re: part(|z| z.re), im: part(|z| z.im) }
    }

    fn two(m: &CMat2) -> Self {
        Self::from_fn(2, |r, c| m[(r, c)])
    }

    fn four(m: &CMat4) -> Self {
        Self::from_fn(4, |r, c| m[(r, c)])
    }
}

#[derive(Debug, Serialize)]
struct CertificateDump {
    residuals: BTreeMap<&'static str, f64>,
    max_residual: f64,
    tolerance: f64,
    passed: bool,
    near_boundary: bool,
}

#[derive(Debug, Serialize)]
struct OperatorDump {
    t: f64,
    x: f64,
    eigenvalues: [f64; 2],
    eta: [f64; 2],
    /// Derivative method along `t` and `x`.
    derivatives: [&'static str; 2],
    certificates: CertificateDump,
    matrices: BTreeMap<&'static str, MatrixDump>,
}

impl OperatorDump {
    fn new(ops: &WalkOperators) -> Self {
        let method = |m: DerivativeMethod| match m {
            DerivativeMethod::Analytic => "analytic",
            DerivativeMethod::FiniteDifference => "finite_difference",
        };
        let certs = &ops.certificates;
        let matrices = BTreeMap::from([
            ("B1", MatrixDump::two(&ops.b1)),
            ("C", MatrixDump::two(&ops.c)),
            ("U", MatrixDump::two(&ops.u)),
            ("B", MatrixDump::four(&ops.b)),
            ("E0", MatrixDump::four(&ops.e0)),
            ("W0", MatrixDump::four(&ops.w0)),
            ("N", MatrixDump::four(&ops.n)),
            ("M", MatrixDump::four(&ops.m)),
            ("T", MatrixDump::four(&ops.t_matrix)),
            ("Wtilde", MatrixDump::four(&ops.wtilde)),
        ]);
        Self {
            t: ops.t,
            x: ops.x,
            eigenvalues: [ops.spectrum.d1, ops.spectrum.d2],
            eta: ops.eta,
            derivatives: ops.derivatives.map(method),
            certificates: CertificateDump {
                residuals: certs.residuals().into_iter().collect(),
                max_residual: certs.max_residual(),
                tolerance: TAU_SYN,
                passed: certs.all_within(TAU_SYN),
                near_boundary: certs.near_boundary,
            },
            matrices,
        }
    }
}

pub fn run(ctx: &Context, t: f64, x: f64) -> Result<(), CliError> {
    let (_, b1, c) = ctx.fields()?;
    let ops = synthesize_point(&b1, &c, t, x, &SynthesisOptions::default())?;
    let dump = OperatorDump::new(&ops);
    let text = toml::to_string(&dump).map_err(|e| CliError::Numerical(e.to_string()))?;
    print!("{text}");
    write_text(&ctx.output("operators.toml")?, &text)?;
    if !dump.certificates.passed {
        return Err(CliError::Certificate(format!(
            "max residual {:.3e} exceeds {TAU_SYN:e} at (t={t}, x={x})",
            dump.certificates.max_residual
        )));
    }
    Ok(())
}
