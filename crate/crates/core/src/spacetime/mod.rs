//! Metrics, dyads, and the fields `B1`, `C` they induce on a Dirac particle.
//!
//! In Hamiltonian form the curved-space Dirac equation of mass `m` reads
//! `∂t ψ = B1 ∂x ψ + ½ (∂x B1) ψ + i C ψ` with
//!
//! ```text
//! B1 = -(e¹₁ / e⁰₀) α - e¹₀ I,        C = -(m / e⁰₀) β
//! ```
//!
//! where `e^μ_a` are the dyads of the metric and `α`, `β` a representation of
//! the Clifford algebra.

mod geodesic;
mod tabulated;

use std::sync::Arc;

use thiserror::Error;

pub use geodesic::{integrate_characteristic, null_geodesics, Geodesic, GeodesicKind};
pub use tabulated::{TabulatedDyads, TabulatedError};

use crate::matrix::{hermitian_eig2, max_abs, CMat2, C64, IDENTITY2, SIGMA_X, SIGMA_Z};
use crate::synthesis::HermitianField;

/// Margin kept below the unit speed bound after rescaling.
pub const CAUSALITY_MARGIN: f64 = 0.01;
/// Number of samples used to estimate the supremum of the spectral radius.
pub const CAUSALITY_SAMPLES: usize = 10_000;
/// Spectral radii above this are treated as unbounded.
const UNBOUNDED: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpacetimeError {
    #[error("point (t={t}, x={x}) lies outside the metric domain")]
    Domain { t: f64, x: f64 },
    #[error("domain starts at x={x_min}, inside the horizon guard x <= {limit}")]
    HorizonDomain { x_min: f64, limit: f64 },
    #[error("spectral radius of B1 is unbounded on the domain (sampled {estimate:e})")]
    UnboundedMetric { estimate: f64 },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error(transparent)]
    Tabulated(#[from] TabulatedError),
}

/// The dyad components `e^μ_a` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dyads {
    pub e00: f64,
    pub e11: f64,
    pub e01: f64,
    pub e10: f64,
}

impl Dyads {
    pub const FLAT: Dyads = Dyads { e00: 1.0, e11: 1.0, e01: 0.0, e10: 0.0 };

    /// The metric `g = E^{-T} η E^{-1}` these dyads orthonormalize, with
    /// `E[μ][a] = e^μ_a` and `η = diag(1, -1)`.
    pub fn metric(&self) -> [[f64; 2]; 2] {
        let det = self.e00 * self.e11 - self.e01 * self.e10;
        // Rows of E^{-1}, indexed [a][μ].
        let inv = [[self.e11 / det, -self.e01 / det], [-self.e10 / det, self.e00 / det]];
        let mut g = [[0.0; 2]; 2];
        for (mu, row) in g.iter_mut().enumerate() {
            for (nu, g_mn) in row.iter_mut().enumerate() {
                *g_mn = inv[0][mu] * inv[0][nu] - inv[1][mu] * inv[1][nu];
            }
        }
        g
    }

    fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.e00, self.e01], [self.e10, self.e11]]
    }
}

/// `max |g_{μν} e^μ_a e^ν_b - η_ab|`.
pub fn dyad_residual(g: &[[f64; 2]; 2], dyads: &Dyads) -> f64 {
    let e = dyads.matrix();
    let eta = [[1.0, 0.0], [0.0, -1.0]];
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut s = 0.0;
            for mu in 0..2 {
                for nu in 0..2 {
                    s += g[mu][nu] * e[mu][a] * e[nu][b];
                }
            }
            worst = worst.max((s - eta[a][b]).abs());
        }
    }
    worst
}

/// Matrices `α`, `β` with `α² = β² = I` and `αβ + βα = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representation {
    pub alpha: CMat2,
    pub beta: CMat2,
}

impl Representation {
    /// `α = σz`, `β = σx`.
    pub const CHIRAL: Representation = Representation { alpha: SIGMA_Z, beta: SIGMA_X };

    pub fn new(alpha: CMat2, beta: CMat2) -> Result<Self, SpacetimeError> {
        let rep = Self { alpha, beta };
        let residual = rep.clifford_residual();
        if residual > crate::matrix::TAU_ALG {
            return Err(SpacetimeError::InvalidMetric(format!(
                "alpha and beta violate the Clifford relations (residual {residual:.3e})"
            )));
        }
        Ok(rep)
    }

    pub fn clifford_residual(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        max_abs(&(a * a - IDENTITY2))
            .max(max_abs(&(b * b - IDENTITY2)))
            .max(max_abs(&(a * b + b * a)))
            .max(crate::matrix::hermitian_residual(&a))
            .max(crate::matrix::hermitian_residual(&b))
    }
}

impl Default for Representation {
    fn default() -> Self {
        Self::CHIRAL
    }
}

/// A closed rectangle in `(t, x)`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Domain {
    pub const ALL: Domain = Domain {
        t_min: f64::NEG_INFINITY,
        t_max: f64::INFINITY,
        x_min: f64::NEG_INFINITY,
        x_max: f64::INFINITY,
    };

    pub fn spatial(x_min: f64, x_max: f64) -> Self {
        Self { x_min, x_max, ..Self::ALL }
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        (self.t_min..=self.t_max).contains(&t) && (self.x_min..=self.x_max).contains(&x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Flat,
    Schwarzschild { mass: f64 },
    Tabulated(Arc<TabulatedDyads>),
}

/// A metric given by its dyads, with the particle mass and Clifford
/// representation used to build the Dirac fields.
///
/// `time_scale` is the factor `s` set by [`rescale_for_causality`]: walk time
/// is `s` times coordinate time, and the fields are divided by `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub mass: f64,
    pub representation: Representation,
    pub domain: Domain,
    pub time_scale: f64,
}

impl MetricSpec {
    pub fn flat(mass: f64) -> Self {
        Self {
            kind: MetricKind::Flat,
            mass,
            representation: Representation::CHIRAL,
            domain: Domain::ALL,
            time_scale: 1.0,
        }
    }

    pub fn tabulated(table: TabulatedDyads, mass: f64) -> Self {
        let domain = table.domain();
        Self {
            kind: MetricKind::Tabulated(Arc::new(table)),
            mass,
            representation: Representation::CHIRAL,
            domain,
            time_scale: 1.0,
        }
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn is_static(&self) -> bool {
        match &self.kind {
            MetricKind::Flat | MetricKind::Schwarzschild { .. } => true,
            MetricKind::Tabulated(table) => table.is_static(),
        }
    }

    /// Whether the walk-time point `(t, x)` is in the domain.
    pub fn contains(&self, t: f64, x: f64) -> bool {
        self.domain.contains(t / self.time_scale, x)
    }

    /// Dyads at coordinate time `t`.
    pub fn dyads(&self, t: f64, x: f64) -> Dyads {
        match &self.kind {
            MetricKind::Flat => Dyads::FLAT,
            MetricKind::Schwarzschild { mass } => {
                let f = 1.0 - 2.0 * mass / x;
                Dyads { e00: f.powf(-0.5), e11: f.sqrt(), e01: 0.0, e10: 0.0 }
            }
            MetricKind::Tabulated(table) => table.eval(t, x).0,
        }
    }

    /// Coordinate-time and space derivatives of the dyads.
    pub fn dyad_derivatives(&self, t: f64, x: f64) -> (Dyads, Dyads) {
        match &self.kind {
            MetricKind::Flat => (Dyads::default(), Dyads::default()),
            MetricKind::Schwarzschild { mass } => {
                let f = 1.0 - 2.0 * mass / x;
                let df = 2.0 * mass / (x * x);
                let dx = Dyads {
                    e00: -0.5 * f.powf(-1.5) * df,
                    e11: 0.5 * df / f.sqrt(),
                    e01: 0.0,
                    e10: 0.0,
                };
                (Dyads::default(), dx)
            }
            MetricKind::Tabulated(table) => {
                let (_, dt, dx) = table.eval(t, x);
                (dt, dx)
            }
        }
    }

    /// The metric tensor at coordinate time `t`. Exact for the builtin
    /// metrics; derived from the dyads for tabulated ones.
    pub fn metric_tensor(&self, t: f64, x: f64) -> [[f64; 2]; 2] {
        match &self.kind {
            MetricKind::Flat => [[1.0, 0.0], [0.0, -1.0]],
            MetricKind::Schwarzschild { mass } => {
                let f = 1.0 - 2.0 * mass / x;
                [[f, 0.0], [0.0, -1.0 / f]]
            }
            MetricKind::Tabulated(_) => self.dyads(t, x).metric(),
        }
    }

    /// Horizon guard width `δ_h` for Schwarzschild metrics, zero otherwise.
    pub fn horizon_guard(&self) -> f64 {
        match self.kind {
            MetricKind::Schwarzschild { mass } => HORIZON_GUARD * 2.0 * mass,
            _ => 0.0,
        }
    }
}

/// Relative width of the excluded region outside the horizon, `δ_h = 0.05 · 2M`.
pub const HORIZON_GUARD: f64 = 0.05;

/// Schwarzschild radial metric `ds² = f dt² - f⁻¹ dx²`, `f = 1 - 2M/x`, on
/// `x ∈ [x_min, x_max]`.
pub fn schwarzschild(
    black_hole_mass: f64,
    particle_mass: f64,
    x_min: f64,
    x_max: f64,
) -> Result<MetricSpec, SpacetimeError> {
    if !(black_hole_mass > 0.0) {
        return Err(SpacetimeError::InvalidMetric("Schwarzschild mass must be positive".into()));
    }
    let limit = 2.0 * black_hole_mass * (1.0 + HORIZON_GUARD);
    if x_min <= limit {
        return Err(SpacetimeError::HorizonDomain { x_min, limit });
    }
    if !(x_max > x_min) {
        return Err(SpacetimeError::InvalidMetric(format!("empty domain [{x_min}, {x_max}]")));
    }
    Ok(MetricSpec {
        kind: MetricKind::Schwarzschild { mass: black_hole_mass },
        mass: particle_mass,
        representation: Representation::CHIRAL,
        domain: Domain::spatial(x_min, x_max),
        time_scale: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    B1,
    C,
}

/// `B1` or `C` as a field over walk time and space.
#[derive(Debug, Clone)]
pub struct DiracField {
    metric: Arc<MetricSpec>,
    role: Role,
}

impl DiracField {
    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    fn combine(&self, d: &Dyads, derivative: Option<&Dyads>) -> CMat2 {
        let rep = &self.metric.representation;
        let s = self.metric.time_scale;
        let m = self.metric.mass;
        let scaled = |a: CMat2| a * C64::from(1.0 / s);
        match (self.role, derivative) {
            (Role::B1, None) => scaled(-(rep.alpha * C64::from(d.e11 / d.e00)) - IDENTITY2 * C64::from(d.e10)),
            (Role::C, None) => scaled(-(rep.beta * C64::from(m / d.e00))),
            (Role::B1, Some(dd)) => {
                let ratio = (dd.e11 * d.e00 - d.e11 * dd.e00) / (d.e00 * d.e00);
                scaled(-(rep.alpha * C64::from(ratio)) - IDENTITY2 * C64::from(dd.e10))
            }
            (Role::C, Some(dd)) => scaled(rep.beta * C64::from(m * dd.e00 / (d.e00 * d.e00))),
        }
    }
}

impl HermitianField for DiracField {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        let tc = t / self.metric.time_scale;
        self.combine(&self.metric.dyads(tc, x), None)
    }

    fn dt_value(&self, t: f64, x: f64) -> Option<CMat2> {
        let s = self.metric.time_scale;
        let tc = t / s;
        let d = self.metric.dyads(tc, x);
        let (dt, _) = self.metric.dyad_derivatives(tc, x);
        Some(self.combine(&d, Some(&dt)) * C64::from(1.0 / s))
    }

    fn dx_value(&self, t: f64, x: f64) -> Option<CMat2> {
        let tc = t / self.metric.time_scale;
        let d = self.metric.dyads(tc, x);
        let (_, dx) = self.metric.dyad_derivatives(tc, x);
        Some(self.combine(&d, Some(&dx)))
    }

    fn is_static(&self) -> bool {
        self.metric.is_static()
    }

    fn contains(&self, t: f64, x: f64) -> bool {
        self.metric.contains(t, x)
    }
}

/// Builds the fields `B1` and `C` of a metric.
pub fn dirac_matching(metric: &MetricSpec) -> Result<(DiracField, DiracField), SpacetimeError> {
    let residual = metric.representation.clifford_residual();
    if residual > crate::matrix::TAU_ALG {
        return Err(SpacetimeError::InvalidMetric(format!(
            "alpha and beta violate the Clifford relations (residual {residual:.3e})"
        )));
    }
    if metric.mass < 0.0 {
        return Err(SpacetimeError::InvalidMetric("mass must be non-negative".into()));
    }
    let metric = Arc::new(metric.clone());
    Ok((
        DiracField { metric: metric.clone(), role: Role::B1 },
        DiracField { metric, role: Role::C },
    ))
}

/// Like [`HermitianField::value`] but returns an error outside the domain.
pub fn evaluate(field: &DiracField, t: f64, x: f64) -> Result<CMat2, SpacetimeError> {
    if !field.contains(t, x) {
        return Err(SpacetimeError::Domain { t, x });
    }
    Ok(field.value(t, x))
}

// Maps u ∈ [0, 1] onto [lo, hi], compactifying infinite ends.
fn sample_interval(lo: f64, hi: f64, u: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + (hi - lo) * u,
        (true, false) => lo + u / (1.0 - u).max(1e-12),
        (false, true) => hi - (1.0 - u) / u.max(1e-12),
        (false, false) => {
            let v = 2.0 * u - 1.0;
            v / (1.0 - v.abs()).max(1e-12)
        }
    }
}

/// Estimated supremum of the spectral radius of the unscaled `B1` over the
/// domain, and whether the metric needed no rescaling.
fn spectral_sup(metric: &MetricSpec) -> Result<f64, SpacetimeError> {
    let unscaled = MetricSpec { time_scale: 1.0, ..metric.clone() };
    let (b1, _) = dirac_matching(&unscaled)?;
    let (nt, nx) = if metric.is_static() {
        (1, CAUSALITY_SAMPLES)
    } else {
        (100, CAUSALITY_SAMPLES / 100)
    };
    let d = &metric.domain;
    let t_mid = if d.t_min.is_finite() && d.t_max.is_finite() {
        0.5 * (d.t_min + d.t_max)
    } else {
        0.0_f64.clamp(d.t_min, d.t_max)
    };
    let mut sup: f64 = 0.0;
    for i in 0..nt {
        let t = if nt == 1 { t_mid } else { sample_interval(d.t_min, d.t_max, i as f64 / (nt - 1) as f64) };
        for j in 0..nx {
            let x = sample_interval(d.x_min, d.x_max, j as f64 / (nx - 1) as f64);
            let value = b1.value(t, x);
            let radius = match hermitian_eig2(&value) {
                Ok(spec) => spec.d1.abs().max(spec.d2.abs()),
                Err(_) => f64::INFINITY,
            };
            if !radius.is_finite() || radius > UNBOUNDED {
                return Err(SpacetimeError::UnboundedMetric { estimate: radius });
            }
            sup = sup.max(radius);
        }
    }
    Ok(sup)
}

/// Rescales time so that the eigenvalues of `B1` lie within `1 - margin`.
///
/// Metrics whose sampled spectral radius is already at most one are returned
/// unchanged with scale `1`. Otherwise `s = sup / (1 - margin)`.
pub fn rescale_for_causality(metric: &MetricSpec) -> Result<(MetricSpec, f64), SpacetimeError> {
    let sup = spectral_sup(metric)?;
    let scale = if sup <= 1.0 { 1.0 } else { sup / (1.0 - CAUSALITY_MARGIN) };
    Ok((MetricSpec { time_scale: scale, ..metric.clone() }, scale))
}
