use rayon::prelude::*;

use super::{dirac_matching, MetricSpec, SpacetimeError};
use crate::matrix::hermitian_eig2;
use crate::synthesis::HermitianField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicKind {
    /// Follows the largest eigenvalue of `-B1`.
    Outgoing,
    /// Follows the smallest eigenvalue of `-B1`.
    Ingoing,
}

/// A sampled characteristic `x(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub kind: GeodesicKind,
    pub seed: f64,
    /// `(t, x)` pairs with strictly increasing `t`.
    pub samples: Vec<(f64, f64)>,
    /// Whether integration stopped at the domain boundary before `t_max`.
    pub exited: bool,
}

/// Integrates `dx/dt = speed(t, x)` from `(t0, x0)` to `t_max` with the
/// classical fourth-order Runge-Kutta scheme and fixed step `dt`.
///
/// Integration stops, with `exited` set, as soon as any stage leaves
/// `bounds` or the speed is not finite.
pub fn integrate_characteristic(
    kind: GeodesicKind,
    speed: impl Fn(f64, f64) -> f64,
    x0: f64,
    t0: f64,
    t_max: f64,
    dt: f64,
    (x_lo, x_hi): (f64, f64),
) -> Geodesic {
    let inside = |x: f64| x.is_finite() && x >= x_lo && x <= x_hi;
    let mut samples = vec![(t0, x0)];
    let (mut t, mut x) = (t0, x0);
    let mut exited = !inside(x0);
    while !exited && t < t_max {
        let h = dt.min(t_max - t);
        let k1 = speed(t, x);
        let x2 = x + 0.5 * h * k1;
        let k2 = if inside(x2) { speed(t + 0.5 * h, x2) } else { f64::NAN };
        let x3 = x + 0.5 * h * k2;
        let k3 = if inside(x3) { speed(t + 0.5 * h, x3) } else { f64::NAN };
        let x4 = x + h * k3;
        let k4 = if inside(x4) { speed(t + h, x4) } else { f64::NAN };
        let next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !inside(next) {
            exited = true;
            break;
        }
        t = if t_max - t <= dt { t_max } else { t + h };
        x = next;
        samples.push((t, x));
    }
    Geodesic { kind, seed: x0, samples, exited }
}

/// Outgoing and ingoing null geodesics from each seed, in walk time.
///
/// The characteristic speeds are the extreme eigenvalues of `-B1`; for the
/// Schwarzschild metric they are `±(1 - 2M/x)`.
pub fn null_geodesics(
    metric: &MetricSpec,
    seeds: &[f64],
    t_max: f64,
    dt: f64,
) -> Result<Vec<Geodesic>, SpacetimeError> {
    let (b1, _) = dirac_matching(metric)?;
    if let Some(&x) = seeds.iter().find(|&&x| !metric.contains(0.0, x)) {
        return Err(SpacetimeError::Domain { t: 0.0, x });
    }
    let bounds = (metric.domain.x_min, metric.domain.x_max);
    let t_end = t_max.min(metric.domain.t_max * metric.time_scale);
    let speed = |kind: GeodesicKind, t: f64, x: f64| -> f64 {
        if !b1.contains(t, x) {
            return f64::NAN;
        }
        match hermitian_eig2(&b1.value(t, x)) {
            Ok(spec) => match kind {
                GeodesicKind::Outgoing => -spec.d2,
                GeodesicKind::Ingoing => -spec.d1,
            },
            Err(_) => f64::NAN,
        }
    };
    Ok(seeds
        .par_iter()
        .flat_map_iter(|&x0| {
            [GeodesicKind::Outgoing, GeodesicKind::Ingoing].map(|kind| {
                integrate_characteristic(kind, |t, x| speed(kind, t, x), x0, 0.0, t_end, dt, bounds)
            })
        })
        .collect())
}
