use super::{FineState, Lattice};

/// `|ψ⁺|² + |ψ⁻|²` per fine site.
pub fn density(fine: &FineState) -> Vec<f64> {
    fine.psi.iter().map(|v| v.norm_squared()).collect()
}

/// `Σ |ψ|² · 2ε`, summed in site order.
pub fn norm(fine: &FineState) -> f64 {
    density(fine).iter().sum::<f64>() * fine.lattice.spacing()
}

/// Density-weighted mean of the fine-site positions.
pub fn mean_position(fine: &FineState) -> f64 {
    let rho = density(fine);
    let total: f64 = rho.iter().sum();
    rho.iter().enumerate().map(|(k, r)| r * fine.lattice.fine_x(k)).sum::<f64>() / total
}

/// Density-weighted standard deviation of the fine-site positions.
pub fn spatial_std(fine: &FineState) -> f64 {
    let rho = density(fine);
    let total: f64 = rho.iter().sum();
    let mean = mean_position(fine);
    let var = rho
        .iter()
        .enumerate()
        .map(|(k, r)| r * (fine.lattice.fine_x(k) - mean).powi(2))
        .sum::<f64>()
        / total;
    var.sqrt()
}

/// Position of the density maximum, refined by a parabola through the
/// maximum and its two neighbours.
pub fn peak_position(lattice: &Lattice, rho: &[f64]) -> f64 {
    let n = rho.len();
    let k = rho
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &r)| if r > best.1 { (k, r) } else { best })
        .0;
    let (a, b, c) = (rho[(k + n - 1) % n], rho[k], rho[(k + 1) % n]);
    let denom = a - 2.0 * b + c;
    let offset = if denom.abs() > 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    lattice.fine_x(k) + offset * lattice.spacing()
}

/// `(t, x_peak)` for each recorded `(t, density)`.
pub fn peak_trajectory(lattice: &Lattice, records: &[(f64, Vec<f64>)]) -> Vec<(f64, f64)> {
    records.iter().map(|(t, rho)| (*t, peak_position(lattice, rho))).collect()
}
