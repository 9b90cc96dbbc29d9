//! One-step expansion of the local rule around a smooth input.
//!
//! For a smooth two-component field `ψ`, pair the values at `x ± ε` into
//! `u = (ψ(x+ε) + ψ(x-ε))/√2` and `u' = (ψ(x+ε) - ψ(x-ε))/√2`. One application
//! of the local rule to the pairs at `x ∓ 2ε` then agrees, up to `O(ε²)`, with
//!
//! ```text
//! (u ⊕ 0) + (I ⊕ U)(0 ⊕ u') + (I ⊕ U) B (2u' ⊕ 0) + ε (2N(I ⊕ U) + 2(I ⊕ U)M + T)(u ⊕ 0)
//! ```
//!
//! evaluated at `(t, x)`.

use crate::matrix::{direct_sum, CVec2, CVec4, IDENTITY2};

use super::{local_rule, synthesize_point, HermitianField, SynthesisError, SynthesisOptions};

/// The paired vector `(u, u')` of `ψ` around `x` with half-spacing `eps`.
pub fn paired_input(psi: &impl Fn(f64) -> CVec2, x: f64, eps: f64) -> CVec4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (psi(x + eps), psi(x - eps));
    let u = (a + b).scale(s);
    let up = (a - b).scale(s);
    CVec4::new(u[0], u[1], up[0], up[1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCheck {
    pub eps: f64,
    /// Output of one step of the local rule.
    pub discrete: CVec4,
    /// The first-order prediction.
    pub predicted: CVec4,
    pub residual: f64,
}

/// Compares one step of the walk against its first-order prediction at `(t, x)`.
pub fn first_order_check(
    b1: &(impl HermitianField + ?Sized),
    c: &(impl HermitianField + ?Sized),
    psi: &impl Fn(f64) -> CVec2,
    t: f64,
    x: f64,
    eps: f64,
    opts: &SynthesisOptions,
) -> Result<ExpansionCheck, SynthesisError> {
    let here = synthesize_point(b1, c, t, x, opts)?;
    let left = synthesize_point(b1, c, t, x - 2.0 * eps, opts)?;
    let right = synthesize_point(b1, c, t, x + 2.0 * eps, opts)?;
    let next = synthesize_point(b1, c, t + 2.0 * eps, x, opts)?;

    let (w, _) = here.finite_walk(eps);
    let discrete = local_rule(
        &next.e0,
        &w,
        &left.e0,
        &right.e0,
        &paired_input(psi, x - 2.0 * eps, eps),
        &paired_input(psi, x + 2.0 * eps, eps),
    );

    let phi = paired_input(psi, x, eps);
    let zero = CVec2::zeros();
    let u = CVec2::new(phi[0], phi[1]);
    let up = CVec2::new(phi[2], phi[3]);
    let stack = |a: &CVec2, b: &CVec2| CVec4::new(a[0], a[1], b[0], b[1]);
    let iu = direct_sum(&IDENTITY2, &here.u);
    let drift = (here.n * iu + iu * here.m).scale(2.0) + here.t_matrix;
    let predicted = stack(&u, &zero)
        + iu * stack(&zero, &up)
        + iu * here.b * stack(&up.scale(2.0), &zero)
        + drift * stack(&u, &zero).scale(eps);
    let residual = (discrete - predicted).norm();
    Ok(ExpansionCheck { eps, discrete, predicted, residual })
}
