use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use super::{OracleError, PdeGrid, PdeSolver};
use crate::lattice::{density, pair, unpair, FineState, Lattice, Parity, Walk};
use crate::matrix::CVec2;
use crate::synthesis::{HermitianField, SynthesisOptions};

// Relative tolerance on matching times and interval lengths.
const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
}

fn norms(reference: &[f64], other: impl Iterator<Item = f64>, dx: f64) -> ErrorNorms {
    let (mut sum, mut linf) = (0.0, 0.0f64);
    for (a, b) in reference.iter().zip(other) {
        let d = (a - b).abs();
        sum += d * d;
        linf = linf.max(d);
    }
    ErrorNorms { l2: (sum * dx).sqrt(), linf }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= GRID_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Density error of a walk state against the PDE solution, after resampling
/// the walk density onto the PDE grid by linear interpolation.
pub fn compare(walk: &FineState, pde: &PdeGrid) -> Result<ErrorNorms, OracleError> {
    let lattice = walk.lattice;
    if !same(walk.t, pde.t) {
        return Err(OracleError::GridMismatch(format!("walk at t={}, pde at t={}", walk.t, pde.t)));
    }
    if !same(lattice.length(), pde.period()) {
        return Err(OracleError::GridMismatch(format!(
            "walk period {} vs pde period {}",
            lattice.length(),
            pde.period()
        )));
    }
    if (pde.x_min - lattice.x_min).abs() > pde.dx.max(lattice.spacing()) {
        return Err(OracleError::GridMismatch(format!("walk starts at {}, pde at {}", lattice.x_min, pde.x_min)));
    }
    let rho = density(walk);
    let n = rho.len() as isize;
    let resampled = (0..pde.len()).map(|k| {
        let s = (pde.x(k) - lattice.fine_x(0)) / lattice.spacing();
        let i = s.floor();
        let f = s - i;
        let i = i as isize;
        let at = |j: isize| rho[j.rem_euclid(n) as usize];
        (1.0 - f) * at(i) + f * at(i + 1)
    });
    Ok(norms(&pde.density(), resampled, pde.dx))
}

/// Density error between two PDE solutions on the same grid.
pub fn compare_grids(reference: &PdeGrid, other: &PdeGrid) -> Result<ErrorNorms, OracleError> {
    if reference.len() != other.len() || !same(reference.dx, other.dx) || !same(reference.x_min, other.x_min) {
        return Err(OracleError::GridMismatch("different spatial grids".into()));
    }
    if !same(reference.t, other.t) {
        return Err(OracleError::GridMismatch(format!("t={} vs t={}", reference.t, other.t)));
    }
    Ok(norms(&reference.density(), other.density().into_iter(), reference.dx))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub l2_error: f64,
    pub linf_error: f64,
}

/// Errors per `ε` with a least-squares fit of `log(l2_error)` against
/// `log(ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slope: f64,
    pub r_squared: f64,
}

impl ConvergenceReport {
    /// Rows are sorted by decreasing `ε`. With fewer than two rows, or any
    /// zero error, the fit is `NaN`.
    pub fn from_rows(mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps.ln(), r.l2_error.ln())).collect();
        let (slope, r_squared) = fit(&points);
        Self { rows, slope, r_squared }
    }

    /// Whether the L² error strictly decreases as `ε` decreases.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error)
    }

    pub fn write(&self, mut out: impl Write) -> io::Result<()> {
        write!(out, "{self}")
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps,l2_error,linf_error")?;
        for r in &self.rows {
            writeln!(f, "{:e},{:e},{:e}", r.eps, r.l2_error, r.linf_error)?;
        }
        writeln!(f, "slope = {:.6}, r_squared = {:.6}", self.slope, self.r_squared)
    }
}

fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return (f64::NAN, f64::NAN);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r_squared)
}

/// Geometry of a walk-versus-PDE sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSetup {
    pub x_min: f64,
    pub x_max: f64,
    pub t_final: f64,
    /// Spacing of the reference grid, which starts at `x_min + pde_dx / 2`.
    pub pde_dx: f64,
    pub cfl: f64,
}

fn whole(value: f64, what: &str) -> Result<usize, OracleError> {
    let n = value.round();
    if n < 1.0 || !same(n, value) {
        return Err(OracleError::GridMismatch(format!("{what} is {value}, not a whole number")));
    }
    Ok(n as usize)
}

/// Runs the walk for every `ε` from the same initial data and compares its
/// final density with one reference PDE solution.
///
/// Each `ε` must divide the domain into whole cells and `t_final` into whole
/// steps of `2ε`.
pub fn convergence_sweep<B: HermitianField, C: HermitianField>(
    b1: &B,
    c: &C,
    initial: &(dyn Fn(f64) -> CVec2 + Sync),
    setup: &SweepSetup,
    eps_list: &[f64],
    opts: &SynthesisOptions,
) -> Result<ConvergenceReport, OracleError> {
    let length = setup.x_max - setup.x_min;
    let points = whole(length / setup.pde_dx, "pde point count")?;
    let grid = PdeGrid::sample(setup.x_min + 0.5 * setup.pde_dx, setup.pde_dx, points, initial)?;
    let reference = PdeSolver::new(b1, c).evolve(&grid, setup.t_final, setup.cfl)?;

    let rows = eps_list
        .par_iter()
        .map(|&eps| {
            let cells = whole(length / (4.0 * eps), "cell count")?;
            let steps = whole(setup.t_final / (2.0 * eps), "step count")?;
            let lattice = Lattice::new(setup.x_min, eps, cells)?;
            let walk = Walk::new(b1, c, lattice, *opts)?;
            let start = pair(&FineState::sample(lattice, 0.0, initial), Parity::Even)?;
            let end = unpair(&walk.run(start, steps, |_, _| {})?);
            let errors = compare(&end, &reference)?;
            Ok(ConvergenceRow { eps, l2_error: errors.l2, linf_error: errors.linf })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(ConvergenceReport::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, SIGMA_X, SIGMA_Z};
    use crate::synthesis::ConstantField;

    fn bump(x: f64) -> CVec2 {
        CVec2::new(C64::from((-(x * x) * 4.0).exp()), C64::new(0.0, 0.3 * (-(x * x) * 4.0).exp()))
    }

    #[test]
    fn identical_inputs_have_zero_error() {
        let grid = PdeGrid::sample(-3.0, 0.01, 600, bump).unwrap();
        let solver = PdeSolver::new(ConstantField(-SIGMA_Z), ConstantField(-SIGMA_X));
        let end = solver.evolve(&grid, 0.5, 0.25).unwrap();
        let e = compare_grids(&end, &end).unwrap();
        assert_eq!((e.l2, e.linf), (0.0, 0.0));
        assert!(compare_grids(&grid, &end).is_err());
    }

    #[test]
    fn walk_on_the_pde_grid_resamples_exactly() {
        let lattice = Lattice::new(-3.0, 0.005, 300).unwrap();
        let walk = FineState::sample(lattice, 0.0, bump);
        let pde = PdeGrid::sample(-3.0 + 0.005, 0.01, 600, bump).unwrap();
        let e = compare(&walk, &pde).unwrap();
        assert!(e.linf < 1e-14, "{}", e.linf);
    }

    #[test]
    fn mismatched_time_is_rejected() {
        let lattice = Lattice::new(-3.0, 0.005, 300).unwrap();
        let walk = FineState::sample(lattice, 0.1, bump);
        let pde = PdeGrid::sample(-3.0 + 0.005, 0.01, 600, bump).unwrap();
        assert!(matches!(compare(&walk, &pde), Err(OracleError::GridMismatch(_))));
    }

    #[test]
    fn report_fit_and_format() {
        let rows = [1e-3, 4e-3, 2e-3]
            .map(|eps| ConvergenceRow { eps, l2_error: 3.0 * eps, linf_error: eps })
            .to_vec();
        let report = ConvergenceReport::from_rows(rows);
        assert!((report.slope - 1.0).abs() < 1e-12);
        assert!((report.r_squared - 1.0).abs() < 1e-12);
        assert!(report.strictly_decreasing());
        let text = report.to_string();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("eps,l2_error,linf_error\n4e-3,"));
        assert!(text.lines().last().unwrap().starts_with("slope = 1.000000"));
    }

    #[test]
    fn sweep_rejects_incommensurate_eps() {
        let setup = SweepSetup { x_min: -2.0, x_max: 2.0, t_final: 0.1, pde_dx: 0.01, cfl: 0.25 };
        let r = convergence_sweep(
            &ConstantField(-SIGMA_Z),
            &ConstantField(-SIGMA_X),
            &bump,
            &setup,
            &[0.03],
            &SynthesisOptions::default(),
        );
        assert!(matches!(r, Err(OracleError::GridMismatch(_))));
    }
}
