//! The general family of involutions `B` with a prescribed upper-left block.
//!
//! Any hermitian `B` with `B² = I` and `block₁(B) = B1` has the form
//! `[[B1, B2†], [B2, B4]]` where `B2` and `B4` are fixed by the spectrum of
//! `B1`, a choice of signs for the angles `η_i`, and, in the degenerate
//! cases, a unitary `K`. [`build_b`](super::build_b) picks one member; this
//! module exposes the rest.

use crate::matrix::{
    hermitian_eig2, is_unitary, max_abs, Blocks, CMat2, CMat4, Spectral2, C64,
    IDENTITY2, SIGMA_X, SIGMA_Z, TAU_ALG,
};

use super::{SynthesisError, TAU_SYN};

/// Sign of an angle `η_i`, with `sin η_i = sign · |d_i|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaSign {
    Plus,
    Minus,
}

impl EtaSign {
    fn apply(self, angle: f64) -> f64 {
        match self {
            EtaSign::Plus => angle,
            EtaSign::Minus => -angle,
        }
    }
}

fn angles(spec: &Spectral2, signs: [EtaSign; 2]) -> ([f64; 2], [f64; 2]) {
    let d = spec.eigenvalues().map(|d| d.clamp(-1.0, 1.0));
    let lambda = d.map(|d| (1.0 - d * d).sqrt());
    let eta = [signs[0].apply(d[0].abs().asin()), signs[1].apply(d[1].abs().asin())];
    (lambda, eta)
}

fn diag(a: C64, b: C64) -> CMat2 {
    CMat2::new(a, C64::from(0.0), C64::from(0.0), b)
}

/// `exp(i θ σ_z)`.
pub fn phase_z(theta: f64) -> CMat2 {
    diag(C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta))
}

/// The lower-left block `B2`.
///
/// - `d1² ≠ d2²`: `-V diag(λ1 e^{iη1}, λ2 e^{iη2}) V†`; `k` is ignored.
/// - `d1² = d2²`, `η1 = η2`: `-λ e^{iη} I`.
/// - `d1² = d2²`, `η1 = -η2`: `-λ K e^{iη1 σz} K†`.
pub fn general_b2(spec: &Spectral2, signs: [EtaSign; 2], k: &CMat2) -> Result<CMat2, SynthesisError> {
    let (lambda, eta) = angles(spec, signs);
    if !spec.is_square_degenerate(TAU_ALG) {
        let inner = diag(C64::from_polar(lambda[0], eta[0]), C64::from_polar(lambda[1], eta[1]));
        return Ok(-(spec.v * inner * spec.v.adjoint()));
    }
    if (eta[0] - eta[1]).abs() <= TAU_ALG {
        return Ok(IDENTITY2 * -C64::from_polar(lambda[0], eta[0]));
    }
    if !is_unitary(k, TAU_SYN) {
        return Err(SynthesisError::InvalidCase("K must be unitary"));
    }
    Ok(k * phase_z(eta[0]) * k.adjoint() * C64::from(-lambda[0]))
}

/// The lower-right block `B4`: `d1 K σz K†` when `d1 = -d2 ≠ 0`, otherwise `-B1`.
pub fn general_b4(spec: &Spectral2, k: &CMat2) -> Result<CMat2, SynthesisError> {
    let (d1, d2) = (spec.d1, spec.d2);
    if (d1 + d2).abs() <= TAU_ALG && d1.abs() > TAU_ALG {
        if !is_unitary(k, TAU_SYN) {
            return Err(SynthesisError::InvalidCase("K must be unitary"));
        }
        return Ok(k * SIGMA_Z * k.adjoint() * C64::from(d1));
    }
    Ok(-spec.reconstruct())
}

/// Assembles an involution from `b1` with the given signs and gauge `k`.
///
/// When `d1 = -d2 ≠ 0` the gauge of `B4` is not free once `B2` is chosen: the
/// off-diagonal conditions force `B4 = -W B1 W†` with `W = -B2 / λ`, that is
/// `K4 = W V σx`. The supplied `k` is then used for `B2` only, except at
/// `λ = 0` where `B2` vanishes and `k` sets `B4`.
pub fn general_b(b1: &CMat2, signs: [EtaSign; 2], k: &CMat2) -> Result<CMat4, SynthesisError> {
    let spec = hermitian_eig2(b1)?;
    if spec.d1.abs() > 1.0 + TAU_ALG || spec.d2.abs() > 1.0 + TAU_ALG {
        return Err(SynthesisError::SpectrumOutOfRange { d1: spec.d1, d2: spec.d2 });
    }
    let b2 = general_b2(&spec, signs, k)?;
    let (lambda, _) = angles(&spec, signs);
    let opposed = (spec.d1 + spec.d2).abs() <= TAU_ALG && spec.d1.abs() > TAU_ALG;
    let b4 = if opposed && lambda[0] > TAU_ALG {
        let w = b2 * C64::from(-1.0 / lambda[0]);
        general_b4(&spec, &(w * spec.v * SIGMA_X))?
    } else {
        general_b4(&spec, k)?
    };
    Ok(Blocks { b1: *b1, b2, b3: b2.adjoint(), b4 }.assemble())
}

/// Residuals of the four block conditions equivalent to `B² = I` for
/// hermitian `B = [[B1, B2†], [B2, B4]]`:
/// `B1² + B2†B2 = I`, `B4² + B2B2† = I`, `B2B1 + B4B2 = 0`, `B1B2† + B2†B4 = 0`.
pub fn block_conditions(b1: &CMat2, b2: &CMat2, b4: &CMat2) -> [f64; 4] {
    let b2h = b2.adjoint();
    [
        max_abs(&(b1 * b1 + b2h * b2 - IDENTITY2)),
        max_abs(&(b4 * b4 + b2 * b2h - IDENTITY2)),
        max_abs(&(b2 * b1 + b4 * b2)),
        max_abs(&(b1 * b2h + b2h * b4)),
    ]
}
