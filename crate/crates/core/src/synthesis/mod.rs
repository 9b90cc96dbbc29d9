//! Operator synthesis: from the hermitian fields `B1(t,x)` and `C(t,x)` of the
//! target equation
//!
//! ```text
//! ∂t ψ = B1 ∂x ψ + ½ (∂x B1) ψ + i C ψ
//! ```
//!
//! build, at each spacetime point, the encoding `E` and the coin `W'` of a
//! paired walk whose continuum limit is that equation.
//!
//! The construction runs in a fixed order. `B1` determines the involution `B`
//! and, through the compatibility constraint `U (I + 2 B2) = I`, the unitary
//! `U`. The canonical eigenbasis of `B` gives `E0`, and the zeroth-order
//! condition `E0† W0 X E0 = I ⊕ U` gives `W0`. Derivatives of `E0` give `N`
//! and `M`; together with `C` they fix `T`, and `T` fixes the hermitian
//! generator `W̃` of `W' = W0 exp(iε W̃)`. The encoding correction is taken to
//! be zero, so `E = E0`.

mod field;
pub mod expansion;
pub mod general;

pub use field::{ConstantField, FnField, HermitianField};

use thiserror::Error;

use crate::matrix::{
    self, direct_sum, hermitian_eig2, im_part, max_abs, re_part, unitary_exp, Blocks,
    CMat2, CMat4, CVec2, CVec4, MatrixError, Spectral2, BIG_X, BIG_Z, C64, IDENTITY2, TAU_ALG,
};

/// Tolerance for synthesis certificates.
pub const TAU_SYN: f64 = 1e-10;
/// Tolerance on the estimated error of finite-difference derivatives.
pub const TAU_DER: f64 = 1e-6;
/// Central-difference step, in continuum units.
pub const H_DER: f64 = 1e-5;
/// Eigenvalues of `B1` closer than this to `±1` raise the boundary warning.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

// Distance from eigenvalue crossings, from zero and from ±1 below which the
// closed-form derivative of E0 is not trusted and finite differences are used.
const ANALYTIC_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("eigenvalues ({d1}, {d2}) of B1 leave [-1, 1]")]
    SpectrumOutOfRange { d1: f64, d2: f64 },
    #[error("I + 2 B2 is not unitary (residual {residual:.3e})")]
    ConstraintUnsatisfiable { residual: f64 },
    #[error("field is not smooth at (t={t}, x={x}): derivative error estimate {estimate:.3e}")]
    NonSmoothField { t: f64, x: f64, estimate: f64 },
    #[error("T1 is not skew-hermitian (residual {residual:.3e})")]
    SkewnessViolation { residual: f64 },
    #[error("invalid case: {0}")]
    InvalidCase(&'static str),
    #[error("point (t={t}, x={x}) lies outside the field domain")]
    OutsideDomain { t: f64, x: f64 },
}

/// The involution `B = E0† Z E0` built from `B1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Involution {
    pub b: CMat4,
    pub spectrum: Spectral2,
    /// Angles with `sin η_i = |d_i|`, in `[0, π/2]`.
    pub eta: [f64; 2],
    /// Set when an eigenvalue is within [`BOUNDARY_MARGIN`] of `±1`.
    pub near_boundary: bool,
}

fn clamp_unit(d: f64) -> f64 {
    d.clamp(-1.0, 1.0)
}

/// Builds `B = (V ⊕ V) B̄ (V ⊕ V)†` with the canonical `B̄`, taking the branch
/// `sin η_i = +|d_i|`.
pub fn build_b(b1: &CMat2) -> Result<Involution, SynthesisError> {
    let spectrum = hermitian_eig2(b1)?;
    let (d1, d2) = (spectrum.d1, spectrum.d2);
    if d1.abs() > 1.0 + TAU_ALG || d2.abs() > 1.0 + TAU_ALG {
        return Err(SynthesisError::SpectrumOutOfRange { d1, d2 });
    }
    let d = [clamp_unit(d1), clamp_unit(d2)];
    let eta = d.map(|di| di.abs().asin());
    let mut bbar = CMat4::zeros();
    for i in 0..2 {
        let lambda = (1.0 - d[i] * d[i]).sqrt();
        let off = C64::from_polar(lambda, eta[i]);
        bbar[(i, i)] = d[i].into();
        bbar[(i + 2, i + 2)] = (-d[i]).into();
        bbar[(i, i + 2)] = -off;
        bbar[(i + 2, i)] = -off.conj();
    }
    let w = direct_sum(&spectrum.v, &spectrum.v);
    let b = w * bbar * w.adjoint();
    let near_boundary = d.iter().any(|di| di.abs() > 1.0 - BOUNDARY_MARGIN);
    Ok(Involution { b, spectrum, eta, near_boundary })
}

fn canonical_encoding(d: [f64; 2], eta: [f64; 2]) -> CMat4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut e = CMat4::zeros();
    for i in 0..2 {
        let plus = (1.0 + d[i]).max(0.0).sqrt();
        let minus = (1.0 - d[i]).max(0.0).sqrt();
        let phase = C64::from_polar(1.0, eta[i]);
        e[(i, i)] = (s * plus).into();
        e[(i, i + 2)] = -phase * (s * minus);
        e[(i + 2, i)] = (s * minus).into();
        e[(i + 2, i + 2)] = phase * (s * plus);
    }
    e
}

/// `E0 = Ē0 (V ⊕ V)†`, unitary with `E0† Z E0 = B`.
pub fn build_e0(spectrum: &Spectral2, eta: [f64; 2]) -> CMat4 {
    let d = [clamp_unit(spectrum.d1), clamp_unit(spectrum.d2)];
    let w = direct_sum(&spectrum.v, &spectrum.v);
    canonical_encoding(d, eta) * w.adjoint()
}

/// `U = (I + 2 B2)†`, the unique solution of `U (I + 2 B2) = I`.
pub fn build_u(b: &CMat4) -> Result<CMat2, SynthesisError> {
    let shifted = IDENTITY2 + matrix::block(b, 2) * C64::from(2.0);
    let residual = matrix::unitarity_residual(&shifted);
    if residual > TAU_SYN {
        return Err(SynthesisError::ConstraintUnsatisfiable { residual });
    }
    Ok(shifted.adjoint())
}

/// `W0 = E0 (I ⊕ U) E0† X`.
pub fn build_w0(e0: &CMat4, u: &CMat2) -> CMat4 {
    e0 * direct_sum(&IDENTITY2, u) * e0.adjoint() * BIG_X
}

/// The encoding `E0` at a point, with the involution it diagonalizes.
pub fn encoding_at(
    field: &(impl HermitianField + ?Sized),
    t: f64,
    x: f64,
) -> Result<(Involution, CMat4), SynthesisError> {
    let inv = build_b(&field.value(t, x))?;
    let e0 = build_e0(&inv.spectrum, inv.eta);
    Ok((inv, e0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Closed-form derivatives when the field supplies `∂B1` and the spectrum
    /// is away from crossings; finite differences otherwise.
    Auto,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub derivatives: DerivativeMode,
    pub fd_step: f64,
    pub fd_tolerance: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { derivatives: DerivativeMode::Auto, fd_step: H_DER, fd_tolerance: TAU_DER }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMethod {
    Analytic,
    FiniteDifference,
}

/// `N = (∂t E0†) E0` and `M = E0† Z (∂x E0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBlocks {
    /// Skew-hermitian projection of the computed `N`.
    pub n: CMat4,
    pub m: CMat4,
    /// `max |N + N†|` before projection.
    pub n_skew_residual: f64,
    /// Largest Richardson error estimate over both axes (zero if analytic).
    pub error_estimate: f64,
    pub method: [DerivativeMethod; 2],
}

fn pivot_derivative(q: &CVec2, raw: CVec2) -> Option<CVec2> {
    let (a, b) = (q[0].norm(), q[1].norm());
    if (a - b).abs() <= ANALYTIC_GUARD {
        return None;
    }
    let p = if a > b { 0 } else { 1 };
    // Keep the pivot component real: Im(d q_p) = 0.
    let theta = -raw[p].im / q[p].re;
    Some(raw + q * C64::new(0.0, theta))
}

/// Closed-form `∂E0` from `∂B1` by first-order eigenvector perturbation.
fn encoding_derivative_analytic(inv: &Involution, db1: &CMat2) -> Option<CMat4> {
    if max_abs(db1) == 0.0 {
        return Some(CMat4::zeros());
    }
    let spec = &inv.spectrum;
    let d = spec.eigenvalues();
    let gap = d[0] - d[1];
    if gap <= ANALYTIC_GUARD
        || d.iter().any(|di| di.abs() <= ANALYTIC_GUARD || di.abs() >= 1.0 - ANALYTIC_GUARD)
    {
        return None;
    }
    let q = spec.v;
    let a = q.adjoint() * db1 * q;
    let dd = [a[(0, 0)].re, a[(1, 1)].re];
    let q0: CVec2 = q.column(0).into_owned();
    let q1: CVec2 = q.column(1).into_owned();
    let dq0 = pivot_derivative(&q0, q1 * (a[(1, 0)] / gap))?;
    let dq1 = pivot_derivative(&q1, q0 * (-a[(0, 1)] / gap))?;
    let mut dq = CMat2::zeros();
    dq.set_column(0, &dq0);
    dq.set_column(1, &dq1);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut dbar = CMat4::zeros();
    for i in 0..2 {
        let plus = (1.0 + d[i]).sqrt();
        let minus = (1.0 - d[i]).sqrt();
        let dplus = dd[i] / (2.0 * plus);
        let dminus = -dd[i] / (2.0 * minus);
        let deta = d[i].signum() * dd[i] / (1.0 - d[i] * d[i]).sqrt();
        let phase = C64::from_polar(1.0, inv.eta[i]);
        dbar[(i, i)] = (s * dplus).into();
        dbar[(i, i + 2)] = -phase * C64::new(dminus, minus * deta) * s;
        dbar[(i + 2, i)] = (s * dminus).into();
        dbar[(i + 2, i + 2)] = phase * C64::new(dplus, plus * deta) * s;
    }
    let w = direct_sum(&q, &q);
    let dw = direct_sum(&dq, &dq);
    let ebar = canonical_encoding(d, inv.eta);
    Some(dbar * w.adjoint() + ebar * dw.adjoint())
}

/// Central difference with a Richardson error estimate from the doubled step.
fn central_difference(
    f: impl Fn(f64) -> Result<CMat4, SynthesisError>,
    h: f64,
) -> Result<(CMat4, f64), SynthesisError> {
    let fine = (f(h)? - f(-h)?) / C64::from(2.0 * h);
    let coarse = (f(2.0 * h)? - f(-2.0 * h)?) / C64::from(4.0 * h);
    Ok((fine, max_abs(&(fine - coarse)) / 3.0))
}

#[derive(Clone, Copy)]
enum Axis {
    Time,
    Space,
}

fn encoding_derivative(
    field: &(impl HermitianField + ?Sized),
    inv: &Involution,
    t: f64,
    x: f64,
    axis: Axis,
    opts: &SynthesisOptions,
) -> Result<(CMat4, f64, DerivativeMethod), SynthesisError> {
    if opts.derivatives == DerivativeMode::Auto {
        let db1 = match axis {
            Axis::Time => field.dt_value(t, x),
            Axis::Space => field.dx_value(t, x),
        };
        if let Some(de) = db1.and_then(|db1| encoding_derivative_analytic(inv, &db1)) {
            return Ok((de, 0.0, DerivativeMethod::Analytic));
        }
    }
    if matches!(axis, Axis::Time) && field.is_static() {
        return Ok((CMat4::zeros(), 0.0, DerivativeMethod::Analytic));
    }
    let (de, estimate) = central_difference(
        |s| {
            let (tt, xx) = match axis {
                Axis::Time => (t + s, x),
                Axis::Space => (t, x + s),
            };
            Ok(encoding_at(field, tt, xx)?.1)
        },
        opts.fd_step,
    )?;
    if estimate > opts.fd_tolerance {
        return Err(SynthesisError::NonSmoothField { t, x, estimate });
    }
    Ok((de, estimate, DerivativeMethod::FiniteDifference))
}

/// Computes `N` and `M` at `(t, x)`.
pub fn derivative_blocks(
    field: &(impl HermitianField + ?Sized),
    t: f64,
    x: f64,
    opts: &SynthesisOptions,
) -> Result<DerivativeBlocks, SynthesisError> {
    let (inv, e0) = encoding_at(field, t, x)?;
    let (dt_e0, est_t, method_t) = encoding_derivative(field, &inv, t, x, Axis::Time, opts)?;
    let (dx_e0, est_x, method_x) = encoding_derivative(field, &inv, t, x, Axis::Space, opts)?;
    let n_raw = dt_e0.adjoint() * e0;
    let n_skew_residual = max_abs(&(n_raw + n_raw.adjoint()));
    let n = (n_raw - n_raw.adjoint()) * C64::from(0.5);
    let m = e0.adjoint() * BIG_Z * dx_e0;
    Ok(DerivativeBlocks {
        n,
        m,
        n_skew_residual,
        error_estimate: est_t.max(est_x),
        method: [method_t, method_x],
    })
}

/// Solves for `T` and `W̃` given `E0`, `U`, `N`, `M` and the target `C`.
///
/// `T1 = 2(iC - N1 - i Im M1)`, `T2 = -2(N2 + U M2)`, `T3 = -T2† U`, `T4 = 0`,
/// and `W̃ = -i X E0 (I ⊕ U†) T E0† X`.
pub fn build_t_and_wtilde(
    e0: &CMat4,
    u: &CMat2,
    n: &CMat4,
    m: &CMat4,
    c: &CMat2,
) -> Result<(CMat4, CMat4), SynthesisError> {
    let residual = matrix::hermitian_residual(c);
    if residual > TAU_SYN {
        return Err(MatrixError::NonHermitianInput { residual }.into());
    }
    let i = C64::new(0.0, 1.0);
    let nb = Blocks::split(n);
    let mb = Blocks::split(m);
    let t1 = (c * i - nb.b1 - im_part(&mb.b1) * i) * C64::from(2.0);
    let skew = max_abs(&(t1 + t1.adjoint()));
    if skew > TAU_SYN {
        return Err(SynthesisError::SkewnessViolation { residual: skew });
    }
    let t2 = (nb.b2 + u * mb.b2) * C64::from(-2.0);
    let t3 = -(t2.adjoint() * u);
    let t = Blocks { b1: t1, b2: t2, b3: t3, b4: CMat2::zeros() }.assemble();
    let s = direct_sum(&IDENTITY2, &u.adjoint()) * t;
    let wtilde = BIG_X * e0 * s * e0.adjoint() * BIG_X * (-i);
    Ok((t, wtilde))
}

/// Residuals of the defining equations of a synthesized operator set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Certificates {
    /// `B² = I`
    pub b_involution: f64,
    /// `B† = B`
    pub b_hermitian: f64,
    /// `E0† Z E0 = B`
    pub b_encoding: f64,
    /// `E0† W0 X E0 = I ⊕ U`
    pub zeroth_order: f64,
    /// `U (I + 2 B2) = I`
    pub u_constraint: f64,
    /// `2 N2 + 2 U M2 + T2 = 0`
    pub nmt_constraint: f64,
    /// `W̃† = W̃`
    pub wtilde_hermitian: f64,
    pub e0_unitary: f64,
    pub w0_unitary: f64,
    /// Set when an eigenvalue of `B1` sits within [`BOUNDARY_MARGIN`] of `±1`.
    pub near_boundary: bool,
}

impl Certificates {
    pub fn residuals(&self) -> [(&'static str, f64); 9] {
        [
            ("b_involution", self.b_involution),
            ("b_hermitian", self.b_hermitian),
            ("b_encoding", self.b_encoding),
            ("zeroth_order", self.zeroth_order),
            ("u_constraint", self.u_constraint),
            ("nmt_constraint", self.nmt_constraint),
            ("wtilde_hermitian", self.wtilde_hermitian),
            ("e0_unitary", self.e0_unitary),
            ("w0_unitary", self.w0_unitary),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn all_within(&self, tol: f64) -> bool {
        self.residuals().iter().all(|(_, r)| *r <= tol)
    }
}

/// The full operator set at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOperators {
    pub t: f64,
    pub x: f64,
    pub b1: CMat2,
    pub c: CMat2,
    pub b: CMat4,
    pub spectrum: Spectral2,
    pub eta: [f64; 2],
    pub e0: CMat4,
    pub u: CMat2,
    pub w0: CMat4,
    pub n: CMat4,
    pub m: CMat4,
    pub t_matrix: CMat4,
    pub wtilde: CMat4,
    pub derivatives: [DerivativeMethod; 2],
    pub certificates: Certificates,
}

impl WalkOperators {
    pub fn n1(&self) -> CMat2 {
        matrix::block(&self.n, 1)
    }
    pub fn n2(&self) -> CMat2 {
        matrix::block(&self.n, 2)
    }
    pub fn m1(&self) -> CMat2 {
        matrix::block(&self.m, 1)
    }
    pub fn m2(&self) -> CMat2 {
        matrix::block(&self.m, 2)
    }

    fn certify(&mut self, near_boundary: bool) {
        let id4 = CMat4::identity();
        let b2 = matrix::block(&self.b, 2);
        let nmt = (self.n2() + self.u * self.m2()) * C64::from(2.0) + matrix::block(&self.t_matrix, 2);
        self.certificates = Certificates {
            b_involution: max_abs(&(self.b * self.b - id4)),
            b_hermitian: matrix::hermitian_residual(&self.b),
            b_encoding: max_abs(&(self.e0.adjoint() * BIG_Z * self.e0 - self.b)),
            zeroth_order: max_abs(
                &(self.e0.adjoint() * self.w0 * BIG_X * self.e0 - direct_sum(&IDENTITY2, &self.u)),
            ),
            u_constraint: max_abs(&(self.u * (IDENTITY2 + b2 * C64::from(2.0)) - IDENTITY2)),
            nmt_constraint: max_abs(&nmt),
            wtilde_hermitian: matrix::hermitian_residual(&self.wtilde),
            e0_unitary: matrix::unitarity_residual(&self.e0),
            w0_unitary: matrix::unitarity_residual(&self.w0),
            near_boundary,
        };
    }

    /// `W' = W0 exp(iε W̃)` and `E = E0`.
    pub fn finite_walk(&self, eps: f64) -> (CMat4, CMat4) {
        let generator = re_part(&self.wtilde);
        let w = self.w0 * unitary_exp(&generator, eps).expect("re_part is hermitian");
        (w, self.e0)
    }
}

/// Runs the whole construction at `(t, x)`.
pub fn synthesize_point(
    b1_field: &(impl HermitianField + ?Sized),
    c_field: &(impl HermitianField + ?Sized),
    t: f64,
    x: f64,
    opts: &SynthesisOptions,
) -> Result<WalkOperators, SynthesisError> {
    if !b1_field.contains(t, x) || !c_field.contains(t, x) {
        return Err(SynthesisError::OutsideDomain { t, x });
    }
    let b1 = b1_field.value(t, x);
    let c = c_field.value(t, x);
    let inv = build_b(&b1)?;
    let e0 = build_e0(&inv.spectrum, inv.eta);
    let u = build_u(&inv.b)?;
    let w0 = build_w0(&e0, &u);
    let der = derivative_blocks(b1_field, t, x, opts)?;
    let (t_matrix, wtilde) = build_t_and_wtilde(&e0, &u, &der.n, &der.m, &c)?;
    let mut ops = WalkOperators {
        t,
        x,
        b1,
        c,
        b: inv.b,
        spectrum: inv.spectrum,
        eta: inv.eta,
        e0,
        u,
        w0,
        n: der.n,
        m: der.m,
        t_matrix,
        wtilde,
        derivatives: der.method,
        certificates: Certificates::default(),
    };
    ops.certify(inv.near_boundary);
    Ok(ops)
}

/// The local rule `G = E†(t+2, x) W'(t, x) (P' ⊕ P) (E(t, x-2) ⊕ E(t, x+2))`
/// applied to the two neighbouring cells.
pub fn local_rule(
    e_out: &CMat4,
    w: &CMat4,
    e_left: &CMat4,
    e_right: &CMat4,
    left: &CVec4,
    right: &CVec4,
) -> CVec4 {
    let a = e_left * left;
    let b = e_right * right;
    let gathered = CVec4::new(a[2], a[3], b[0], b[1]);
    e_out.adjoint() * (w * gathered)
}
