//! A finite-difference solver for the continuum equation
//! `∂ₜψ = B₁∂ₓψ + ½(∂ₓB₁)ψ + iCψ`, used as a reference for the walk.
//!
//! Space is discretized with fourth-order central differences in the
//! skew-symmetric form `½(B₁Dψ + D(B₁ψ)) + iCψ`, which is the same operator in
//! the continuum and keeps the semi-discrete generator anti-hermitian. Time is
//! integrated with the classical fourth-order Runge-Kutta scheme. The grid is
//! periodic.

mod convergence;

use rayon::prelude::*;
use thiserror::Error;

pub use convergence::{
    compare, compare_grids, convergence_sweep, ConvergenceReport, ConvergenceRow, ErrorNorms, SweepSetup,
};

use crate::lattice::LatticeError;
use crate::matrix::{hermitian_eig2, CMat2, CVec2, MatrixError, C64};
use crate::synthesis::HermitianField;

/// Largest accepted `dt / dx`.
pub const CFL_MAX: f64 = 0.5;
pub const DEFAULT_CFL: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("time step {dt:e} exceeds {cfl} times the grid spacing {dx:e}")]
    CflViolation { dt: f64, dx: f64, cfl: f64 },
    #[error("grids do not match: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Walk(#[from] LatticeError),
}

/// `ψ` on the periodic grid `x_k = x_min + k dx`, `k < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeGrid {
    pub x_min: f64,
    pub dx: f64,
    pub dt: f64,
    pub t: f64,
    pub psi: Vec<CVec2>,
}

impl PdeGrid {
    pub fn new(x_min: f64, dx: f64, dt: f64, t: f64, psi: Vec<CVec2>) -> Result<Self, OracleError> {
        if !(dx > 0.0) || !(dt > 0.0) || !x_min.is_finite() || !t.is_finite() {
            return Err(OracleError::InvalidGrid(format!("x_min={x_min}, dx={dx}, dt={dt}, t={t}")));
        }
        if psi.len() < 5 {
            return Err(OracleError::InvalidGrid(format!("{} points, need at least 5", psi.len())));
        }
        if dt > CFL_MAX * dx {
            return Err(OracleError::CflViolation { dt, dx, cfl: CFL_MAX });
        }
        Ok(Self { x_min, dx, dt, t, psi })
    }

    /// Samples `f` on `n` points with `dt = DEFAULT_CFL · dx`.
    pub fn sample(x_min: f64, dx: f64, n: usize, f: impl Fn(f64) -> CVec2) -> Result<Self, OracleError> {
        let psi = (0..n).map(|k| f(x_min + k as f64 * dx)).collect();
        Self::new(x_min, dx, DEFAULT_CFL * dx, 0.0, psi)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn period(&self) -> f64 {
        self.psi.len() as f64 * self.dx
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|v| v.norm_squared()).collect()
    }

    /// `Σ |ψ|² dx`.
    pub fn norm_squared(&self) -> f64 {
        self.psi.iter().map(|v| v.norm_squared()).sum::<f64>() * self.dx
    }
}

/// Coefficients `B₁`, `C` sampled on the grid.
struct Coefficients {
    b1: Vec<CMat2>,
    c: Vec<CMat2>,
}

/// Integrator for fixed fields `B₁`, `C`.
#[derive(Debug, Clone)]
pub struct PdeSolver<B, C> {
    b1: B,
    c: C,
}

impl<B: HermitianField, C: HermitianField> PdeSolver<B, C> {
    pub fn new(b1: B, c: C) -> Self {
        Self { b1, c }
    }

    fn coefficients(&self, t: f64, grid: &PdeGrid) -> Coefficients {
        Coefficients {
            b1: (0..grid.len()).map(|k| self.b1.value(t, grid.x(k))).collect(),
            c: (0..grid.len()).map(|k| self.c.value(t, grid.x(k))).collect(),
        }
    }

    fn is_static(&self) -> bool {
        self.b1.is_static() && self.c.is_static()
    }

    /// Advances the grid by its own `dt`.
    pub fn step(&self, grid: &PdeGrid) -> Result<PdeGrid, OracleError> {
        if grid.dt > CFL_MAX * grid.dx {
            return Err(OracleError::CflViolation { dt: grid.dt, dx: grid.dx, cfl: CFL_MAX });
        }
        let fixed = self.is_static().then(|| self.coefficients(grid.t, grid));
        Ok(self.rk4(grid, fixed.as_ref()))
    }

    /// Integrates to `t_final` with `dt` no larger than `cfl · dx`, adjusted so
    /// the steps land exactly on `t_final`.
    pub fn evolve(&self, grid: &PdeGrid, t_final: f64, cfl: f64) -> Result<PdeGrid, OracleError> {
        if !(cfl > 0.0 && cfl <= CFL_MAX) {
            return Err(OracleError::CflViolation { dt: cfl * grid.dx, dx: grid.dx, cfl: CFL_MAX });
        }
        let span = t_final - grid.t;
        if span < 0.0 {
            return Err(OracleError::InvalidGrid(format!("final time {t_final} precedes {}", grid.t)));
        }
        let steps = (span / (cfl * grid.dx)).ceil().max(1.0) as usize;
        let mut state = PdeGrid { dt: span / steps as f64, ..grid.clone() };
        if span == 0.0 {
            return Ok(state);
        }
        let fixed = self.is_static().then(|| self.coefficients(grid.t, grid));
        for n in 1..=steps {
            state = self.rk4(&state, fixed.as_ref());
            state.t = grid.t + n as f64 * state.dt;
        }
        Ok(state)
    }

    fn rk4(&self, grid: &PdeGrid, fixed: Option<&Coefficients>) -> PdeGrid {
        let (t, dt) = (grid.t, grid.dt);
        let sampled = match fixed {
            Some(_) => None,
            None => Some([t, t + 0.5 * dt, t + dt].map(|time| self.coefficients(time, grid))),
        };
        let [c0, c1, c2] = match (fixed, &sampled) {
            (Some(f), _) => [f, f, f],
            (None, Some([a, b, c])) => [a, b, c],
            (None, None) => unreachable!(),
        };
        let shifted = |k: &[CVec2], h: f64| -> Vec<CVec2> {
            grid.psi.iter().zip(k).map(|(p, k)| p + k * C64::from(h)).collect()
        };
        let k1 = rhs(c0, grid.dx, &grid.psi);
        let k2 = rhs(c1, grid.dx, &shifted(&k1, 0.5 * dt));
        let k3 = rhs(c1, grid.dx, &shifted(&k2, 0.5 * dt));
        let k4 = rhs(c2, grid.dx, &shifted(&k3, dt));
        let w = C64::from(dt / 6.0);
        let two = C64::from(2.0);
        let psi = (0..grid.len())
            .map(|i| grid.psi[i] + (k1[i] + k2[i] * two + k3[i] * two + k4[i]) * w)
            .collect();
        PdeGrid { t: t + dt, psi, ..*grid }
    }
}

/// `½(B₁Dψ + D(B₁ψ)) + iCψ` with `D` the fourth-order central difference.
fn rhs(coefficients: &Coefficients, dx: f64, psi: &[CVec2]) -> Vec<CVec2> {
    let n = psi.len();
    let flux: Vec<CVec2> = coefficients.b1.iter().zip(psi).map(|(b, p)| b * p).collect();
    let scale = 1.0 / (12.0 * dx);
    let d = |f: &[CVec2], k: usize| -> CVec2 {
        let (m2, m1, p1, p2) = if k >= 2 && k + 2 < n {
            (k - 2, k - 1, k + 1, k + 2)
        } else {
            ((k + n - 2) % n, (k + n - 1) % n, (k + 1) % n, (k + 2) % n)
        };
        ((f[p1] - f[m1]) * C64::from(8.0) - f[p2] + f[m2]) * C64::from(scale)
    };
    (0..n)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| {
            (coefficients.b1[k] * d(psi, k) + d(&flux, k)) * C64::from(0.5) + coefficients.c[k] * psi[k] * C64::i()
        })
        .collect()
}

/// Advances `grid` by its `dt` under the fields `b1`, `c`.
pub fn pde_step(grid: &PdeGrid, b1: impl HermitianField, c: impl HermitianField) -> Result<PdeGrid, OracleError> {
    PdeSolver::new(b1, c).step(grid)
}

/// `√(p² + m²)`, the magnitude of the eigenvalues of `αp + mβ`.
pub fn dispersion_check(m: f64, p: f64) -> f64 {
    p.hypot(m)
}

/// `S(p) = ipB₁ + iC`: a plane wave `e^{ipx}v` evolves as `e^{S(p)t}v` for
/// constant coefficients.
pub fn symbol(b1: &CMat2, c: &CMat2, p: f64) -> CMat2 {
    (b1 * C64::from(p) + c) * C64::i()
}

/// Frequencies `ω` of the modes `e^{i(px + ωt)}`, largest first.
pub fn symbol_frequencies(b1: &CMat2, c: &CMat2, p: f64) -> Result<[f64; 2], MatrixError> {
    let generator = symbol(b1, c, p) * -C64::i();
    let spec = hermitian_eig2(&generator)?;
    Ok([spec.d1, spec.d2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{SIGMA_X, SIGMA_Z};
    use crate::synthesis::ConstantField;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::from(re)
    }

    #[test]
    fn right_mover_phase_velocity() {
        let p = 3.0;
        let grid = PdeGrid::sample(0.0, 2.0 * PI / 512.0, 512, |x| CVec2::new(C64::from_polar(1.0, p * x), c(0.0))).unwrap();
        let solver = PdeSolver::new(ConstantField(-SIGMA_Z), ConstantField(CMat2::zeros()));
        let end = solver.evolve(&grid, 0.5, DEFAULT_CFL).unwrap();
        let phase = (end.psi[0][0] / grid.psi[0][0]).arg();
        let velocity = -phase / (p * 0.5);
        assert!((velocity - 1.0).abs() < 1e-6, "{velocity}");
        assert!(end.psi.iter().all(|v| v[1].norm() < 1e-14));
    }

    #[test]
    fn plane_waves_oscillate_at_symbol_frequencies() {
        let m = 1.5;
        let (b1, cm) = (-SIGMA_Z, SIGMA_X * c(-m));
        let solver = PdeSolver::new(ConstantField(b1), ConstantField(cm));
        for p in [1.0, 2.0, 3.0] {
            let generator = b1 * c(p) + cm;
            let spec = hermitian_eig2(&generator).unwrap();
            let freqs = symbol_frequencies(&b1, &cm, p).unwrap();
            assert!((freqs[0] - dispersion_check(m, p)).abs() < 1e-12);
            assert!((freqs[1] + dispersion_check(m, p)).abs() < 1e-12);
            for (i, omega) in freqs.iter().enumerate() {
                let v: CVec2 = spec.v.column(i).into_owned();
                let grid = PdeGrid::sample(0.0, 2.0 * PI / 512.0, 512, |x| v * C64::from_polar(1.0, p * x)).unwrap();
                let t = 0.3;
                let end = solver.evolve(&grid, t, DEFAULT_CFL).unwrap();
                let measured = (v.dotc(&end.psi[0]) / v.dotc(&grid.psi[0])).arg() / t;
                assert!((measured - omega).abs() < 1e-6, "p={p}: {measured} vs {omega}");
            }
        }
    }

    #[test]
    fn zero_stays_zero() {
        let grid = PdeGrid::sample(0.0, 0.1, 40, |_| CVec2::zeros()).unwrap();
        let solver = PdeSolver::new(ConstantField(-SIGMA_Z), ConstantField(SIGMA_X));
        let end = solver.evolve(&grid, 1.0, DEFAULT_CFL).unwrap();
        assert!(end.psi.iter().all(|v| *v == CVec2::zeros()));
    }

    #[test]
    fn cfl_violation() {
        let psi = vec![CVec2::zeros(); 10];
        assert!(matches!(PdeGrid::new(0.0, 0.1, 0.06, 0.0, psi.clone()), Err(OracleError::CflViolation { .. })));
        let mut grid = PdeGrid::new(0.0, 0.1, 0.05, 0.0, psi).unwrap();
        grid.dt = 0.2;
        let r = pde_step(&grid, ConstantField(-SIGMA_Z), ConstantField(SIGMA_X));
        assert!(matches!(r, Err(OracleError::CflViolation { .. })));
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion_check(0.0, 1.0), 1.0);
        assert!((dispersion_check(50.0, 50.0) - 70.7107).abs() < 1e-4);
    }
}
