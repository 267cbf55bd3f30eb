//! Bound states of a single curve in the sine basis used by the propagator.

use super::SpatialGrid;
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::model::MorsePotential;
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Lowest `count` eigenpairs of `−(ħ/2μ)∂² + V(r)` on the grid, energies in
/// rad/s. The kinetic matrix is the exact sine-basis (DST-I) operator, so
/// the eigenvectors are stationary under the split-operator propagator up
/// to the splitting error.
pub fn discrete_spectrum(
    potential: impl Fn(f64) -> f64,
    reduced_mass: f64,
    grid: &SpatialGrid,
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = grid.intervals;
    let m = n - 1;
    if count > m {
        return Err(Error::config("more levels requested than grid points"));
    }
    let length = grid.r_max - grid.r_min;
    let pref = HBAR / (2.0 * reduced_mass) * PI * PI / (2.0 * length * length);
    let nn = n as f64;
    let mut h = DMatrix::<f64>::zeros(m, m);
    for i in 1..=m {
        let si = (PI * i as f64 / nn).sin();
        h[(i - 1, i - 1)] = pref * ((2.0 * nn * nn + 1.0) / 3.0 - 1.0 / (si * si)) + potential(grid.r(i - 1));
        for j in 1..i {
            let sign = if (i - j) % 2 == 0 { 1.0 } else { -1.0 };
            let a = (PI * (i - j) as f64 / (2.0 * nn)).sin();
            let b = (PI * (i + j) as f64 / (2.0 * nn)).sin();
            let v = pref * sign * (1.0 / (a * a) - 1.0 / (b * b));
            h[(i - 1, j - 1)] = v;
            h[(j - 1, i - 1)] = v;
        }
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order[..count].iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order[..count]
        .iter()
        .map(|&k| {
            let norm = grid.dr().sqrt();
            eig.eigenvectors.column(k).iter().map(|v| v / norm).collect()
        })
        .collect();
    Ok((values, vectors))
}

/// Analytic Morse levels above the well bottom,
/// `E_n = ω_e (n+½) − ω_e² (n+½)² / (4 D_e)` with `ω_e = a √(2ħD_e/μ)`.
/// Only bound levels are returned.
pub fn morse_levels(potential: &MorsePotential, reduced_mass: f64, count: usize) -> Vec<f64> {
    let d = potential.depth;
    let we = potential.width * (2.0 * HBAR * d / reduced_mass).sqrt();
    let lambda = 2.0 * d / we;
    (0..count)
        .map(|n| n as f64 + 0.5)
        .take_while(|&v| v < lambda)
        .map(|v| we * v - we * we * v * v / (4.0 * d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ANGSTROM;
    use crate::model::rb_ar;

    #[test]
    fn harmonic_limit_of_sine_basis() {
        // deep, wide well: low levels are nearly harmonic, check against the
        // Morse formula anyway
        let mu = rb_ar::REDUCED_MASS;
        let morse = MorsePotential::new(crate::constants::thz(20.0), 0.5 / ANGSTROM, 6.0 * ANGSTROM, 0.0).unwrap();
        let grid = SpatialGrid::new(2.0 * ANGSTROM, 30.0 * ANGSTROM, 700).unwrap();
        let (num, _) = discrete_spectrum(|r| morse.at(r), mu, &grid, 5).unwrap();
        let exact = morse_levels(&morse, mu, 5);
        for (a, b) in num.iter().zip(&exact) {
            assert!((a / b - 1.0).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn level_count_limited_by_binding() {
        let mu = rb_ar::REDUCED_MASS;
        let g = rb_ar::ground_potential();
        let levels = morse_levels(&g, mu, 100);
        assert!(levels.len() < 100 && levels.len() > 5);
        assert!(levels.windows(2).all(|w| w[1] > w[0]));
        assert!(*levels.last().unwrap() < g.depth);
    }
}
