//! Fixed-size complex linear algebra for the 2×2 and 4×4 operators of the walk.
//!
//! Every 4×4 matrix is read in block form
//!
//! ```text
//! A = | A1  A3 |
//!     | A2  A4 |
//! ```
//!
//! where the first two coordinates span the unprimed subspace `(u, d)` and the
//! last two the primed subspace `(u', d')`. Note that block 2 is the
//! lower-left one.

use nalgebra::{Matrix2, Matrix4, SMatrix, SymmetricEigen, Vector2, Vector4};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;
pub type CVec2 = Vector2<C64>;
pub type CVec4 = Vector4<C64>;

/// Tolerance for structural checks (hermiticity, unitarity, reconstruction).
pub const TAU_ALG: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const NEG_ONE: C64 = C64::new(-1.0, 0.0);
const NEG_I: C64 = C64::new(0.0, -1.0);
const I: C64 = C64::new(0.0, 1.0);
const H: C64 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);

pub const IDENTITY2: CMat2 = CMat2::new(ONE, ZERO, ZERO, ONE);
pub const SIGMA_X: CMat2 = CMat2::new(ZERO, ONE, ONE, ZERO);
pub const SIGMA_Y: CMat2 = CMat2::new(ZERO, NEG_I, I, ZERO);
pub const SIGMA_Z: CMat2 = CMat2::new(ONE, ZERO, ZERO, NEG_ONE);
pub const HADAMARD: CMat2 = CMat2::new(H, H, H, C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0));

/// `σ_x ⊗ I`: swaps the unprimed and primed subspaces.
#[rustfmt::skip]
pub const BIG_X: CMat4 = CMat4::new(
    ZERO, ZERO, ONE, ZERO,
    ZERO, ZERO, ZERO, ONE,
    ONE, ZERO, ZERO, ZERO,
    ZERO, ONE, ZERO, ZERO,
);

/// `σ_y ⊗ I`. Provided for completeness; nothing in the walk construction uses it.
#[rustfmt::skip]
pub const BIG_Y: CMat4 = CMat4::new(
    ZERO, ZERO, C64::new(0.0, -1.0), ZERO,
    ZERO, ZERO, ZERO, C64::new(0.0, -1.0),
    I, ZERO, ZERO, ZERO,
    ZERO, I, ZERO, ZERO,
);

/// `σ_z ⊗ I`: `+1` on the unprimed subspace, `-1` on the primed one.
#[rustfmt::skip]
pub const BIG_Z: CMat4 = CMat4::new(
    ONE, ZERO, ZERO, ZERO,
    ZERO, ONE, ZERO, ZERO,
    ZERO, ZERO, NEG_ONE, ZERO,
    ZERO, ZERO, ZERO, NEG_ONE,
);

/// Projector onto the unprimed coordinates `(u, d)`.
#[rustfmt::skip]
pub const PROJ_UNPRIMED: SMatrix<C64, 2, 4> = SMatrix::<C64, 2, 4>::new(
    ONE, ZERO, ZERO, ZERO,
    ZERO, ONE, ZERO, ZERO,
);

/// Projector onto the primed coordinates `(u', d')`.
#[rustfmt::skip]
pub const PROJ_PRIMED: SMatrix<C64, 2, 4> = SMatrix::<C64, 2, 4>::new(
    ZERO, ZERO, ONE, ZERO,
    ZERO, ZERO, ZERO, ONE,
);

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not hermitian (max |h - h†| = {residual:.3e})")]
    NonHermitianInput { residual: f64 },
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_residual<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m.adjoint() * m - SMatrix::<C64, N, N>::identity()))
}

pub fn is_hermitian<const N: usize>(m: &SMatrix<C64, N, N>, tol: f64) -> bool {
    hermitian_residual(m) <= tol
}

pub fn is_unitary<const N: usize>(m: &SMatrix<C64, N, N>, tol: f64) -> bool {
    unitarity_residual(m) <= tol
}

/// Hermitian part `(A + A†) / 2`.
pub fn re_part<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// `(A - A†) / 2i`, itself hermitian.
pub fn im_part<const N: usize>(a: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    (a - a.adjoint()) * C64::new(0.0, -0.5)
}

/// The four 2×2 blocks of a 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blocks {
    pub b1: CMat2,
    pub b2: CMat2,
    pub b3: CMat2,
    pub b4: CMat2,
}

impl Blocks {
    pub fn split(m: &CMat4) -> Self {
        Self {
            b1: m.fixed_view::<2, 2>(0, 0).into_owned(),
            b2: m.fixed_view::<2, 2>(2, 0).into_owned(),
            b3: m.fixed_view::<2, 2>(0, 2).into_owned(),
            b4: m.fixed_view::<2, 2>(2, 2).into_owned(),
        }
    }

    pub fn assemble(&self) -> CMat4 {
        let mut m = CMat4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.b1);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.b2);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.b3);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b4);
        m
    }
}

/// Block `j` (1 to 4) of `m`.
///
/// Panics if `j` is outside `1..=4`.
pub fn block(m: &CMat4, j: usize) -> CMat2 {
    let (r, c) = match j {
        1 => (0, 0),
        2 => (2, 0),
        3 => (0, 2),
        4 => (2, 2),
        _ => panic!("block index must be in 1..=4, got {j}"),
    };
    m.fixed_view::<2, 2>(r, c).into_owned()
}

pub fn assemble(b1: &CMat2, b2: &CMat2, b3: &CMat2, b4: &CMat2) -> CMat4 {
    Blocks { b1: *b1, b2: *b2, b3: *b3, b4: *b4 }.assemble()
}

/// `A ⊕ B`, block diagonal with `A` on the unprimed subspace.
pub fn direct_sum(a: &CMat2, b: &CMat2) -> CMat4 {
    assemble(a, &CMat2::zeros(), &CMat2::zeros(), b)
}

/// Spectral decomposition `h = V diag(d1, d2) V†` of a hermitian 2×2 matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector column is scaled so that
/// its first component of largest modulus is real and non-negative, which
/// makes the decomposition a deterministic function of `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral2 {
    pub v: CMat2,
    pub d1: f64,
    pub d2: f64,
}

impl Spectral2 {
    pub fn eigenvalues(&self) -> [f64; 2] {
        [self.d1, self.d2]
    }

    pub fn diag(&self) -> CMat2 {
        CMat2::from_diagonal(&CVec2::new(self.d1.into(), self.d2.into()))
    }

    pub fn reconstruct(&self) -> CMat2 {
        self.v * self.diag() * self.v.adjoint()
    }

    /// Whether `d1² = d2²` within `tol`.
    pub fn is_square_degenerate(&self, tol: f64) -> bool {
        (self.d1 * self.d1 - self.d2 * self.d2).abs() <= tol
    }
}

// Relative slack used when deciding which eigenvector component is "largest".
// Without it, entries of equal modulus (σ_x, for instance) would pick their
// pivot from rounding noise.
const PIVOT_TIE: f64 = 1e-12;

fn fix_phase(v: CVec2) -> CVec2 {
    let (a, b) = (v[0].norm(), v[1].norm());
    let pivot = if a >= b - PIVOT_TIE * a.max(b) { v[0] } else { v[1] };
    let n = pivot.norm();
    if n == 0.0 {
        return v;
    }
    v * (pivot.conj() / n)
}

/// Closed-form eigendecomposition of a hermitian 2×2 matrix.
pub fn hermitian_eig2(h: &CMat2) -> Result<Spectral2, MatrixError> {
    let residual = hermitian_residual(h);
    if residual > TAU_ALG {
        return Err(MatrixError::NonHermitianInput { residual });
    }
    let a = h[(0, 0)].re;
    let c = h[(1, 1)].re;
    let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + c);
    let delta = 0.5 * (a - c);
    let r = delta.hypot(b.norm());
    if r == 0.0 {
        return Ok(Spectral2 { v: IDENTITY2, d1: mean, d2: mean });
    }
    // Of the two algebraically equivalent eigenvector formulas for the upper
    // eigenvalue, take the one whose norm is bounded below by r.
    let first = if delta >= 0.0 {
        CVec2::new((r + delta).into(), b.conj())
    } else {
        CVec2::new(b, (r - delta).into())
    };
    let first = first / C64::from(first.norm());
    let second = CVec2::new(-first[1].conj(), first[0].conj());
    let mut v = CMat2::zeros();
    v.set_column(0, &fix_phase(first));
    v.set_column(1, &fix_phase(second));
    Ok(Spectral2 { v, d1: mean + r, d2: mean - r })
}

/// `exp(i·s·h)` for hermitian `h`, via the hermitian eigendecomposition.
pub fn unitary_exp(h: &CMat4, s: f64) -> Result<CMat4, MatrixError> {
    let residual = hermitian_residual(h);
    if residual > TAU_ALG {
        return Err(MatrixError::NonHermitianInput { residual });
    }
    let eig = SymmetricEigen::new(re_part(h));
    let phases = eig.eigenvalues.map(|lambda| C64::from_polar(1.0, s * lambda));
    let q = eig.eigenvectors;
    Ok(q * CMat4::from_diagonal(&phases) * q.adjoint())
}
