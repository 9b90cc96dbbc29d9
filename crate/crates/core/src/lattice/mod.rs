//! The discrete dynamics on the lattice.
//!
//! Lattice coordinates are integers `ℓ`; a coordinate maps to the continuum
//! point `x_min + ℓ ε` and each step advances time by `2ε`. The physical field
//! `ψ` lives on the odd coordinates, so consecutive fine sites are `2ε` apart.
//! Pairs of neighbouring fine sites `(ℓ-1, ℓ+1)` form a cell centred on the
//! even coordinate `ℓ`, and the cells alternate between steps: at
//! [`Parity::Even`] cell `j` is centred on `4j + 2`, at [`Parity::Odd`] on
//! `4j`. Each step maps cells of one parity to the other, output cell `ℓ`
//! reading its neighbours at `ℓ ∓ 2`.
//!
//! The lattice is periodic with `2L` fine sites and `L` cells, covering the
//! interval `[x_min, x_min + 4Lε)`.

mod engine;
mod observables;
mod packet;
mod snapshot;

use thiserror::Error;

pub use engine::{SynthesisReport, Walk};
pub use observables::{density, mean_position, norm, peak_position, peak_trajectory, spatial_std};
pub use packet::{free_hamiltonian, gaussian_wavepacket, EnergyBranch, PacketParams, Wavepacket, TAIL_TOLERANCE};
pub use snapshot::{write_snapshot, RunMetadata, SNAPSHOT_HEADER};

use crate::matrix::{CVec2, CVec4, C64};
use crate::synthesis::SynthesisError;

/// Tolerance on the relative norm change of one step.
pub const TAU_EVO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("a paired lattice needs an even number of fine sites, got {0}")]
    OddLattice(usize),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("synthesis failed at (t={t}, x={x}): {source}")]
    Synthesis { t: f64, x: f64, source: SynthesisError },
    #[error("certificate {name} failed at (t={t}, x={x}): residual {residual:.3e}")]
    Certificate { t: f64, x: f64, name: &'static str, residual: f64 },
    #[error("wavepacket does not fit the lattice: boundary density {boundary:.3e} of peak {peak:.3e}")]
    PacketTruncated { boundary: f64, peak: f64 },
    #[error("state and walk use different lattices")]
    LatticeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// Geometry of a periodic paired lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub x_min: f64,
    pub eps: f64,
    /// Number of cells `L`; there are `2L` fine sites.
    pub cells: usize,
}

impl Lattice {
    pub fn new(x_min: f64, eps: f64, cells: usize) -> Result<Self, LatticeError> {
        if !(eps > 0.0) || !x_min.is_finite() {
            return Err(LatticeError::InvalidLattice(format!("eps={eps}, x_min={x_min}")));
        }
        if cells < 2 {
            return Err(LatticeError::InvalidLattice("need at least two cells".into()));
        }
        Ok(Self { x_min, eps, cells })
    }

    /// The lattice with spacing `eps` covering `[x_min, x_max)` as closely as
    /// a whole number of cells allows.
    pub fn covering(x_min: f64, x_max: f64, eps: f64) -> Result<Self, LatticeError> {
        let cells = ((x_max - x_min) / (4.0 * eps)).floor();
        if !cells.is_finite() || cells < 2.0 {
            return Err(LatticeError::InvalidLattice(format!("[{x_min}, {x_max}) holds fewer than two cells")));
        }
        Self::new(x_min, eps, cells as usize)
    }

    pub fn fine_sites(&self) -> usize {
        2 * self.cells
    }

    /// Distance between neighbouring fine sites, `2ε`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.eps
    }

    pub fn length(&self) -> f64 {
        4.0 * self.cells as f64 * self.eps
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.length()
    }

    pub fn coordinate(&self, l: i64) -> f64 {
        self.x_min + l as f64 * self.eps
    }

    /// Position of fine site `k`, on coordinate `2k + 1`.
    pub fn fine_x(&self, k: usize) -> f64 {
        self.coordinate(2 * k as i64 + 1)
    }

    pub fn center_coordinate(&self, j: usize, parity: Parity) -> i64 {
        match parity {
            Parity::Even => 4 * j as i64 + 2,
            Parity::Odd => 4 * j as i64,
        }
    }

    pub fn center(&self, j: usize, parity: Parity) -> f64 {
        self.coordinate(self.center_coordinate(j, parity))
    }

    /// Fine sites `(left, right)` of cell `j`.
    pub fn fine_pair(&self, j: usize, parity: Parity) -> (usize, usize) {
        let n = self.fine_sites();
        match parity {
            Parity::Even => (2 * j, 2 * j + 1),
            Parity::Odd => ((2 * j + n - 1) % n, 2 * j),
        }
    }

    /// Input cells `(left, right)` feeding output cell `j` of parity `out`.
    pub fn neighbours(&self, j: usize, out: Parity) -> (usize, usize) {
        match out {
            Parity::Odd => ((j + self.cells - 1) % self.cells, j),
            Parity::Even => (j, (j + 1) % self.cells),
        }
    }
}

/// `ψ = (ψ⁺, ψ⁻)` on the fine sites at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FineState {
    pub lattice: Lattice,
    pub t: f64,
    pub psi: Vec<CVec2>,
}

impl FineState {
    pub fn new(lattice: Lattice, t: f64, psi: Vec<CVec2>) -> Result<Self, LatticeError> {
        if psi.len() % 2 == 1 {
            return Err(LatticeError::OddLattice(psi.len()));
        }
        if psi.len() != lattice.fine_sites() {
            return Err(LatticeError::InvalidLattice(format!(
                "{} values for {} fine sites",
                psi.len(),
                lattice.fine_sites()
            )));
        }
        Ok(Self { lattice, t, psi })
    }

    /// Builds a state on the lattice implied by the number of values.
    pub fn from_values(x_min: f64, eps: f64, t: f64, psi: Vec<CVec2>) -> Result<Self, LatticeError> {
        if psi.len() % 2 == 1 {
            return Err(LatticeError::OddLattice(psi.len()));
        }
        let lattice = Lattice::new(x_min, eps, psi.len() / 2)?;
        Ok(Self { lattice, t, psi })
    }

    /// Samples `f` at the fine-site positions.
    pub fn sample(lattice: Lattice, t: f64, f: impl Fn(f64) -> CVec2) -> Self {
        let psi = (0..lattice.fine_sites()).map(|k| f(lattice.fine_x(k))).collect();
        Self { lattice, t, psi }
    }
}

/// `φ = (u, d, u', d')` on the cells of one parity at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedState {
    pub lattice: Lattice,
    pub t: f64,
    pub parity: Parity,
    pub phi: Vec<CVec4>,
}

impl PairedState {
    /// `Σ |φ|² · 2ε`, summed in cell order.
    pub fn norm_squared(&self) -> f64 {
        self.phi.iter().map(|v| v.norm_squared()).sum::<f64>() * self.lattice.spacing()
    }
}

/// `(u, u') = H (ψ⁺(ℓ+1), ψ⁺(ℓ-1))` and likewise for `(d, d')`.
pub fn pair(fine: &FineState, parity: Parity) -> Result<PairedState, LatticeError> {
    if fine.psi.len() % 2 == 1 {
        return Err(LatticeError::OddLattice(fine.psi.len()));
    }
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let lattice = fine.lattice;
    let phi = (0..lattice.cells)
        .map(|j| {
            let (l, r) = lattice.fine_pair(j, parity);
            let (a, b) = (fine.psi[r], fine.psi[l]);
            CVec4::new((a[0] + b[0]) * s, (a[1] + b[1]) * s, (a[0] - b[0]) * s, (a[1] - b[1]) * s)
        })
        .collect();
    Ok(PairedState { lattice, t: fine.t, parity, phi })
}

/// Inverse of [`pair`].
pub fn unpair(paired: &PairedState) -> FineState {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let lattice = paired.lattice;
    let mut psi = vec![CVec2::zeros(); lattice.fine_sites()];
    for (j, v) in paired.phi.iter().enumerate() {
        let (l, r) = lattice.fine_pair(j, paired.parity);
        psi[r] = CVec2::new((v[0] + v[2]) * s, (v[1] + v[3]) * s);
        psi[l] = CVec2::new((v[0] - v[2]) * s, (v[1] - v[3]) * s);
    }
    FineState { lattice, t: paired.t, psi }
}
