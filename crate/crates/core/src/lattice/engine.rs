use std::sync::Mutex;

use rayon::prelude::*;

use super::{Lattice, LatticeError, PairedState, Parity};
use crate::matrix::{CMat4, CVec4};
use crate::synthesis::{
    encoding_at, synthesize_point, HermitianField, SynthesisOptions, WalkOperators, TAU_SYN,
};

/// The linear map of one cell update, `out = left · φ_L + right · φ_R`.
#[derive(Debug, Clone, Copy)]
struct CellOps {
    left: CMat4,
    right: CMat4,
}

impl CellOps {
    /// `E_out† W' (P' E_L ⊕ P E_R)` split into its action on each neighbour.
    fn new(e_out: &CMat4, w: &CMat4, e_left: &CMat4, e_right: &CMat4) -> Self {
        let a = e_out.adjoint() * w;
        let mut pl = CMat4::zeros();
        let mut pr = CMat4::zeros();
        for col in 0..4 {
            pl[(0, col)] = e_left[(2, col)];
            pl[(1, col)] = e_left[(3, col)];
            pr[(2, col)] = e_right[(0, col)];
            pr[(3, col)] = e_right[(1, col)];
        }
        Self { left: a * pl, right: a * pr }
    }

    fn apply(&self, left: &CVec4, right: &CVec4) -> CVec4 {
        self.left * left + self.right * right
    }
}

/// Summary of the operator synthesis performed by a walk.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthesisReport {
    pub points: usize,
    pub max_residual: f64,
    pub near_boundary_points: usize,
    pub max_n_skew_residual: f64,
}

impl SynthesisReport {
    fn record(&mut self, ops: &WalkOperators) {
        self.points += 1;
        self.max_residual = self.max_residual.max(ops.certificates.max_residual());
        if ops.certificates.near_boundary {
            self.near_boundary_points += 1;
        }
    }

    fn merge(&mut self, other: &SynthesisReport) {
        self.points += other.points;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.near_boundary_points += other.near_boundary_points;
        self.max_n_skew_residual = self.max_n_skew_residual.max(other.max_n_skew_residual);
    }
}

/// A paired walk for the fields `B1`, `C` on a fixed lattice.
///
/// Static fields are synthesized once, on construction; otherwise every step
/// synthesizes the operators it needs.
pub struct Walk<B, C> {
    b1: B,
    c: C,
    lattice: Lattice,
    opts: SynthesisOptions,
    // Indexed by the parity of the output cells.
    cache: Option<[Vec<CellOps>; 2]>,
    report: Mutex<SynthesisReport>,
}

impl<B: HermitianField, C: HermitianField> Walk<B, C> {
    pub fn new(b1: B, c: C, lattice: Lattice, opts: SynthesisOptions) -> Result<Self, LatticeError> {
        let mut walk = Self { b1, c, lattice, opts, cache: None, report: Mutex::new(SynthesisReport::default()) };
        if walk.b1.is_static() && walk.c.is_static() {
            walk.cache = Some(walk.build_static_cache()?);
        }
        Ok(walk)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn is_cached(&self) -> bool {
        self.cache.is_some()
    }

    pub fn report(&self) -> SynthesisReport {
        *self.report.lock().unwrap()
    }

    fn synthesize(&self, t: f64, x: f64) -> Result<WalkOperators, LatticeError> {
        let ops = synthesize_point(&self.b1, &self.c, t, x, &self.opts)
            .map_err(|source| LatticeError::Synthesis { t, x, source })?;
        for (name, residual) in ops.certificates.residuals() {
            if !(residual <= TAU_SYN) {
                return Err(LatticeError::Certificate { t, x, name, residual });
            }
        }
        Ok(ops)
    }

    fn encoding(&self, t: f64, x: f64) -> Result<CMat4, LatticeError> {
        if !self.b1.contains(t, x) {
            return Err(LatticeError::Synthesis {
                t,
                x,
                source: crate::synthesis::SynthesisError::OutsideDomain { t, x },
            });
        }
        encoding_at(&self.b1, t, x)
            .map(|(_, e)| e)
            .map_err(|source| LatticeError::Synthesis { t, x, source })
    }

    fn finite_step(&self, ops: &WalkOperators) -> CMat4 {
        ops.finite_walk(self.lattice.eps).0
    }

    fn build_static_cache(&self) -> Result<[Vec<CellOps>; 2], LatticeError> {
        let lattice = self.lattice;
        let mut report = SynthesisReport::default();
        let mut e = [Vec::new(), Vec::new()];
        let mut w = [Vec::new(), Vec::new()];
        for parity in [Parity::Even, Parity::Odd] {
            let ops: Vec<WalkOperators> = (0..lattice.cells)
                .into_par_iter()
                .map(|j| self.synthesize(0.0, lattice.center(j, parity)))
                .collect::<Result<_, _>>()?;
            for o in &ops {
                report.record(o);
            }
            e[parity.index()] = ops.iter().map(|o| o.e0).collect();
            w[parity.index()] = ops.iter().map(|o| self.finite_step(o)).collect();
        }
        self.report.lock().unwrap().merge(&report);
        let build = |out: Parity| -> Vec<CellOps> {
            let (o, i) = (out.index(), out.flip().index());
            (0..lattice.cells)
                .map(|j| {
                    let (l, r) = lattice.neighbours(j, out);
                    CellOps::new(&e[o][j], &w[o][j], &e[i][l], &e[i][r])
                })
                .collect()
        };
        Ok([build(Parity::Even), build(Parity::Odd)])
    }

    fn dynamic_ops(&self, t: f64, out: Parity) -> Result<Vec<CellOps>, LatticeError> {
        let lattice = self.lattice;
        let input = out.flip();
        let e_in: Vec<CMat4> = (0..lattice.cells)
            .into_par_iter()
            .map(|j| self.encoding(t, lattice.center(j, input)))
            .collect::<Result<_, _>>()?;
        let t_next = t + 2.0 * lattice.eps;
        let per_cell: Vec<(WalkOperators, CMat4)> = (0..lattice.cells)
            .into_par_iter()
            .map(|j| {
                let x = lattice.center(j, out);
                Ok((self.synthesize(t, x)?, self.encoding(t_next, x)?))
            })
            .collect::<Result<_, LatticeError>>()?;
        let mut report = SynthesisReport::default();
        for (o, _) in &per_cell {
            report.record(o);
        }
        self.report.lock().unwrap().merge(&report);
        Ok(per_cell
            .iter()
            .enumerate()
            .map(|(j, (ops, e_out))| {
                let (l, r) = lattice.neighbours(j, out);
                CellOps::new(e_out, &self.finite_step(ops), &e_in[l], &e_in[r])
            })
            .collect())
    }

    /// `φ(t + 2ε) = G(φ(t, x-2) ⊕ φ(t, x+2))` on every cell.
    pub fn step(&self, state: &PairedState) -> Result<PairedState, LatticeError> {
        if state.lattice != self.lattice || state.phi.len() != self.lattice.cells {
            return Err(LatticeError::LatticeMismatch);
        }
        let out = state.parity.flip();
        let dynamic;
        let ops: &[CellOps] = match &self.cache {
            Some(cache) => &cache[out.index()],
            None => {
                dynamic = self.dynamic_ops(state.t, out)?;
                &dynamic
            }
        };
        let phi = (0..self.lattice.cells)
            .into_par_iter()
            .map(|j| {
                let (l, r) = self.lattice.neighbours(j, out);
                ops[j].apply(&state.phi[l], &state.phi[r])
            })
            .collect();
        Ok(PairedState { lattice: self.lattice, t: state.t + 2.0 * self.lattice.eps, parity: out, phi })
    }

    /// Runs `steps` steps, calling `observe` on the initial state and after
    /// every step.
    pub fn run(
        &self,
        state: PairedState,
        steps: usize,
        mut observe: impl FnMut(usize, &PairedState),
    ) -> Result<PairedState, LatticeError> {
        let mut state = state;
        observe(0, &state);
        for n in 1..=steps {
            state = self.step(&state)?;
            observe(n, &state);
        }
        Ok(state)
    }
}

impl<B, C> std::fmt::Debug for Walk<B, C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Walk")
            .field("lattice", &self.lattice)
            .field("cached", &self.cache.is_some())
            .finish()
    }
}
