#![allow(dead_code)]

use pairwalk_core::matrix::{CMat2, C64, IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z};
use pairwalk_core::synthesis::HermitianField;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a + b sin(k x + w t + phase)`.
#[derive(Debug, Clone, Copy)]
pub struct Wave {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub w: f64,
    pub phase: f64,
}

impl Wave {
    pub fn random(rng: &mut impl Rng, a: (f64, f64), b: f64, k: f64, w: f64) -> Self {
        Self {
            a: rng.random_range(a.0..=a.1),
            b: rng.random_range(-b..=b),
            k: rng.random_range(-k..=k),
            w: rng.random_range(-w..=w),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    fn arg(&self, t: f64, x: f64) -> f64 {
        self.k * x + self.w * t + self.phase
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.a + self.b * self.arg(t, x).sin()
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        self.b * self.w * self.arg(t, x).cos()
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.b * self.k * self.arg(t, x).cos()
    }
}

/// `s I + r (n · σ)` with `n = (sin θ cos φ, sin θ sin φ, cos θ)`.
///
/// The eigenvalues are `s ± r`; keeping `|s| + r < 1` and `r` away from zero
/// gives a spectrum inside `(-1, 1)` without crossings.
#[derive(Debug, Clone, Copy)]
pub struct SmoothB1 {
    pub s: Wave,
    pub r: Wave,
    pub theta: Wave,
    pub phi: Wave,
    pub analytic: bool,
}

impl SmoothB1 {
    /// Eigenvalues stay within `[-0.99, 0.99]` and at least `0.3` apart.
    pub fn random(rng: &mut impl Rng, k: f64, w: f64) -> Self {
        let s_amp = rng.random_range(0.0..0.04);
        let r_amp = rng.random_range(0.0..0.05);
        Self {
            s: Wave::random(rng, (-0.3, 0.3), s_amp, k, w),
            r: Wave::random(rng, (0.2, 0.6), r_amp, k, w),
            theta: Wave::random(rng, (0.0, std::f64::consts::PI), 0.5, k, w),
            phi: Wave::random(rng, (0.0, std::f64::consts::TAU), 0.5, k, w),
            analytic: true,
        }
    }

    pub fn without_derivatives(self) -> Self {
        Self { analytic: false, ..self }
    }

    fn parts(&self, t: f64, x: f64) -> (f64, f64, [f64; 3]) {
        let (th, ph) = (self.theta.value(t, x), self.phi.value(t, x));
        (self.s.value(t, x), self.r.value(t, x), [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])
    }

    fn derivative(&self, t: f64, x: f64, d: impl Fn(&Wave) -> f64) -> CMat2 {
        let (_, r, n) = self.parts(t, x);
        let (th, ph) = (self.theta.value(t, x), self.phi.value(t, x));
        let (dth, dph) = (d(&self.theta), d(&self.phi));
        let dn = [
            th.cos() * ph.cos() * dth - th.sin() * ph.sin() * dph,
            th.cos() * ph.sin() * dth + th.sin() * ph.cos() * dph,
            -th.sin() * dth,
        ];
        let dr = d(&self.r);
        let v = |i: usize| dr * n[i] + r * dn[i];
        IDENTITY2 * C64::from(d(&self.s)) + pauli([v(0), v(1), v(2)])
    }
}

pub fn pauli(n: [f64; 3]) -> CMat2 {
    SIGMA_X * C64::from(n[0]) + SIGMA_Y * C64::from(n[1]) + SIGMA_Z * C64::from(n[2])
}

impl HermitianField for SmoothB1 {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        let (s, r, n) = self.parts(t, x);
        IDENTITY2 * C64::from(s) + pauli(n.map(|v| r * v))
    }

    fn dt_value(&self, t: f64, x: f64) -> Option<CMat2> {
        self.analytic.then(|| self.derivative(t, x, |w| w.dt(t, x)))
    }

    fn dx_value(&self, t: f64, x: f64) -> Option<CMat2> {
        self.analytic.then(|| self.derivative(t, x, |w| w.dx(t, x)))
    }

    fn is_static(&self) -> bool {
        [self.s, self.r, self.theta, self.phi].iter().all(|w| w.w == 0.0)
    }
}

/// A hermitian field `C0 + sin(k x + w t) C1` with entries bounded by `bound`.
#[derive(Debug, Clone, Copy)]
pub struct SmoothC {
    pub c0: CMat2,
    pub c1: CMat2,
    pub k: f64,
    pub w: f64,
}

impl SmoothC {
    pub fn random(rng: &mut impl Rng, bound: f64, k: f64, w: f64) -> Self {
        Self {
            c0: random_hermitian(rng, 0.8 * bound),
            c1: random_hermitian(rng, 0.2 * bound),
            k: rng.random_range(-k..=k),
            w: rng.random_range(-w..=w),
        }
    }
}

impl HermitianField for SmoothC {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        self.c0 + self.c1 * C64::from((self.k * x + self.w * t).sin())
    }

    fn is_static(&self) -> bool {
        self.w == 0.0
    }
}

/// Entries with real and imaginary parts in `[-bound, bound]`.
pub fn random_hermitian(rng: &mut impl Rng, bound: f64) -> CMat2 {
    let mut u = || rng.random_range(-bound..=bound);
    let (a, d) = (u(), u());
    let b = C64::new(u(), u());
    CMat2::new(C64::from(a), b.conj(), b, C64::from(d))
}

/// `e^{iα} (cos θ I + i sin θ (n · σ))` for random `α`, `θ`, `n`.
pub fn random_unitary(rng: &mut impl Rng) -> CMat2 {
    let alpha = rng.random_range(0.0..std::f64::consts::TAU);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    let rho = (1.0 - z * z).sqrt();
    let n = [rho * phi.cos(), rho * phi.sin(), z];
    (IDENTITY2 * C64::from(theta.cos()) + pauli(n) * C64::new(0.0, theta.sin())) * C64::from_polar(1.0, alpha)
}

/// A hermitian matrix with eigenvalues `d1`, `d2` and eigenvectors `v`.
pub fn with_spectrum(v: &CMat2, d1: f64, d2: f64) -> CMat2 {
    let d = CMat2::new(C64::from(d1), C64::from(0.0), C64::from(0.0), C64::from(d2));
    v * d * v.adjoint()
}
