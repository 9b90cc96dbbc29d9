use super::{density, FineState, Lattice, LatticeError};
use crate::matrix::{hermitian_eig2, CMat2, CVec2, C64};
use crate::spacetime::Representation;

/// Which eigenvectors of the free Hamiltonian make up the packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyBranch {
    /// `u₊(p) + u₋(p)`.
    #[default]
    Both,
    Positive,
    Negative,
}

/// A gaussian in momentum, `exp(-(p - p0)² / (2σ²))`, centred on `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    pub mass: f64,
    pub branch: EnergyBranch,
    /// Largest boundary density accepted, relative to the peak density.
    pub tail_tolerance: f64,
}

impl PacketParams {
    pub fn new(x0: f64, p0: f64, sigma: f64, mass: f64) -> Self {
        Self { x0, p0, sigma, mass, branch: EnergyBranch::Both, tail_tolerance: TAIL_TOLERANCE }
    }

    pub fn with_branch(self, branch: EnergyBranch) -> Self {
        Self { branch, ..self }
    }
}

// Modes whose gaussian weight is below this relative to the peak are dropped.
const WEIGHT_CUTOFF: f64 = 1e-18;
/// Default for [`PacketParams::tail_tolerance`].
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// The packet as a continuum function: a trigonometric polynomial over the
/// Fourier modes of a periodic interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    x0: f64,
    modes: Vec<(f64, CVec2)>,
}

impl Wavepacket {
    /// `φ(x) ∝ Σ_p g(p) e^{i(x - x0)p} (u₊(p) + u₋(p))` over the modes
    /// `p = 2πk / period`, with `u±(p)` the unit eigenvectors of `αp + mβ`
    /// and the normalization `∫ |φ|² = 1` over one period.
    ///
    /// The phase of each eigenvector is aligned with its value at `p0`, so the
    /// packet is a smooth function of position. `max_modes` bounds `|k|`.
    pub fn new(params: &PacketParams, representation: &Representation, period: f64, max_modes: usize) -> Self {
        let dp = 2.0 * std::f64::consts::PI / period;
        let half_width = params.sigma * (-2.0 * WEIGHT_CUTOFF.ln()).sqrt();
        let limit = max_modes as i64;
        let lo = (((params.p0 - half_width) / dp).floor() as i64).max(-limit);
        let hi = (((params.p0 + half_width) / dp).ceil() as i64).min(limit);

        let spinors = |p: f64| -> (CVec2, CVec2) {
            let spec = hermitian_eig2(&free_hamiltonian(representation, p, params.mass))
                .expect("free hamiltonian is hermitian");
            (spec.v.column(0).into_owned(), spec.v.column(1).into_owned())
        };
        let (ref_plus, ref_minus) = spinors(params.p0);
        let align = |v: CVec2, reference: &CVec2| -> CVec2 {
            let overlap = reference.dotc(&v);
            if overlap.norm() > 0.0 {
                v * (overlap.conj() / overlap.norm())
            } else {
                v
            }
        };
        let mut modes: Vec<(f64, CVec2)> = (lo..=hi)
            .filter_map(|k| {
                let p = k as f64 * dp;
                let weight = (-(p - params.p0).powi(2) / (2.0 * params.sigma.powi(2))).exp();
                if weight < WEIGHT_CUTOFF {
                    return None;
                }
                let (plus, minus) = spinors(p);
                let spinor = match params.branch {
                    EnergyBranch::Both => align(plus, &ref_plus) + align(minus, &ref_minus),
                    EnergyBranch::Positive => align(plus, &ref_plus),
                    EnergyBranch::Negative => align(minus, &ref_minus),
                };
                Some((p, spinor * C64::from(weight)))
            })
            .collect();
        // Parseval: ∫ |φ|² over a period is period · Σ |c_k|².
        let total: f64 = modes.iter().map(|(_, c)| c.norm_squared()).sum::<f64>() * period;
        let scale = C64::from(1.0 / total.sqrt());
        for (_, c) in &mut modes {
            *c *= scale;
        }
        Self { x0: params.x0, modes }
    }

    pub fn eval(&self, x: f64) -> CVec2 {
        let x = x - self.x0;
        self.modes.iter().fold(CVec2::zeros(), |acc, (p, c)| acc + c * C64::from_polar(1.0, x * p))
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

/// Samples a [`Wavepacket`] built on the lattice's own Fourier modes at the
/// fine sites; the result has `Σ |ψ|² · 2ε = 1`.
pub fn gaussian_wavepacket(
    params: &PacketParams,
    representation: &Representation,
    lattice: Lattice,
) -> Result<FineState, LatticeError> {
    if !(params.sigma > 0.0) {
        return Err(LatticeError::InvalidLattice(format!("sigma must be positive, got {}", params.sigma)));
    }
    let n = lattice.fine_sites();
    let packet = Wavepacket::new(params, representation, lattice.length(), n / 2 - 1);
    let state = FineState::sample(lattice, 0.0, |x| packet.eval(x));
    let rho = density(&state);
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    let boundary = rho[0].max(rho[n - 1]);
    if boundary > params.tail_tolerance * peak {
        return Err(LatticeError::PacketTruncated { boundary, peak });
    }
    Ok(state)
}

/// The free Dirac Hamiltonian `αp + mβ`.
pub fn free_hamiltonian(representation: &Representation, p: f64, mass: f64) -> CMat2 {
    representation.alpha * C64::from(p) + representation.beta * C64::from(mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mean_position, spatial_std};

    fn params(p0: f64, mass: f64, branch: EnergyBranch) -> PacketParams {
        PacketParams::new(3.0, p0, 1.56, mass).with_branch(branch)
    }

    #[test]
    fn normalized_and_centred() {
        let lattice = Lattice::covering(-1.0, 7.0, 1e-3).unwrap();
        let state = gaussian_wavepacket(&params(50.0, 50.0, EnergyBranch::Both), &Representation::CHIRAL, lattice).unwrap();
        let rho = density(&state);
        let total: f64 = rho.iter().sum::<f64>() * lattice.spacing();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((mean_position(&state) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn massless_positive_momentum_is_upper_component() {
        let lattice = Lattice::covering(-1.0, 7.0, 1e-3).unwrap();
        let state = gaussian_wavepacket(&params(20.0, 0.0, EnergyBranch::Positive), &Representation::CHIRAL, lattice).unwrap();
        let lower: f64 = state.psi.iter().map(|v| v[1].norm_sqr()).sum();
        assert!(lower < 1e-20);
    }

    #[test]
    fn width_matches_fourier_width() {
        let lattice = Lattice::covering(-1.0, 7.0, 1e-3).unwrap();
        let state = gaussian_wavepacket(&params(5.0, 5.0, EnergyBranch::Positive), &Representation::CHIRAL, lattice).unwrap();
        // |ψ|² ∝ exp(-σ² (x - x0)²), standard deviation 1/(√2 σ).
        let expected = 1.0 / (2f64.sqrt() * 1.56);
        assert!((spatial_std(&state) - expected).abs() / expected < 0.02);
    }

    #[test]
    fn truncated_packet_is_rejected() {
        // The Schwarzschild setup: x0 = 3 with the domain cut just outside
        // the horizon guard.
        let lattice = Lattice::covering(1.05, 7.0, 1e-3).unwrap();
        let p = params(-5.0, 5.0, EnergyBranch::Positive);
        assert!(matches!(
            gaussian_wavepacket(&p, &Representation::CHIRAL, lattice),
            Err(LatticeError::PacketTruncated { .. })
        ));
        let loose = PacketParams { tail_tolerance: 1e-3, ..p };
        assert!(gaussian_wavepacket(&loose, &Representation::CHIRAL, lattice).is_ok());
    }
}
