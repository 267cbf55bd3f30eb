//! Axisymmetric buffer-gas cell closed by sapphire windows.

use super::solver::{series_conductivity, SolveStats, StructuredSystem};
use crate::error::{Error, Result};
use crate::model::{DriveSpec, ExciplexSpec, FibreGeometry, GasMixture};
use crate::propagation::{coefficients, power_at, PropagationCoefficients};
use std::f64::consts::PI;

/// Cylindrical cell: gas over `0 < z < length`, windows of thickness
/// `window_thickness` on both ends, outer window faces and the side wall at
/// `cell_radius` held at the ambient temperature. The beam is a flat-top
/// disc of radius `beam_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasCell {
    pub length: f64,
    pub window_thickness: f64,
    pub cell_radius: f64,
    pub beam_radius: f64,
    pub window_conductivity: f64,
    pub gas_conductivity: f64,
    pub ambient: f64,
    pub dopant_density: f64,
    pub buffer_density: f64,
    pub input_power: f64,
    pub spacing: f64,
}

impl Default for GasCell {
    fn default() -> Self {
        Self {
            length: 1e-2,
            window_thickness: 2e-3,
            cell_radius: 5e-3,
            beam_radius: 1.5e-3,
            window_conductivity: 2.0,
            gas_conductivity: crate::model::rb_ar::ARGON_CONDUCTIVITY,
            ambient: 620.0,
            dopant_density: 1e22,
            buffer_density: 1e27,
            input_power: 4.4,
            spacing: 1e-4,
        }
    }
}

impl GasCell {
    fn validate(&self) -> Result<()> {
        let positive = [
            self.length,
            self.window_thickness,
            self.cell_radius,
            self.beam_radius,
            self.window_conductivity,
            self.gas_conductivity,
            self.ambient,
            self.input_power,
            self.spacing,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::domain("gas cell dimensions, conductivities, power and T_e must be positive"));
        }
        if self.beam_radius >= self.cell_radius {
            return Err(Error::config("beam must fit inside the cell"));
        }
        for (name, v) in [("length", self.length), ("window thickness", self.window_thickness), ("cell radius", self.cell_radius)] {
            let m = v / self.spacing;
            if (m - m.round()).abs() > 1e-6 || m.round() < 4.0 {
                return Err(Error::config(format!("{name} must be at least 4 whole grid spacings")));
            }
        }
        Ok(())
    }

    pub fn mixture(&self, exciplex_masses: (f64, f64)) -> Result<GasMixture> {
        GasMixture::new(exciplex_masses.0, exciplex_masses.1, self.dopant_density, self.buffer_density, self.ambient)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasCellResult {
    pub coefficients: PropagationCoefficients,
    /// Axial node positions, window faces included.
    pub z: Vec<f64>,
    /// Laser power at each `z` (input power before the gas, the transmitted
    /// power after it).
    pub power: Vec<f64>,
    /// On-axis temperature at each `z`.
    pub axis_temperature: Vec<f64>,
    /// Radial node positions.
    pub rho: Vec<f64>,
    /// Temperatures, row-major in `z` (`temperature[i + rho.len() * j]`).
    pub temperature: Vec<f64>,
    pub absorbed_fraction: f64,
    pub max_drop: f64,
    pub stats: SolveStats,
}

/// Power profile and steady temperature field of the cell.
///
/// `A` and `ℬ` are evaluated at the ambient temperature with the beam radius
/// in place of the core radius. The fraction `Ω/ω_L` of the power absorbed in
/// each axial slab is removed uniformly over the beam disc.
pub fn gas_cell_scenario(
    cell: &GasCell,
    mix: &GasMixture,
    exciplex: &ExciplexSpec,
    drive: &DriveSpec,
) -> Result<GasCellResult> {
    cell.validate()?;
    let h = cell.spacing;
    let beam = FibreGeometry::new(cell.beam_radius, cell.cell_radius, cell.length, cell.window_conductivity, cell.gas_conductivity)?;
    let drive = drive.with_power(cell.input_power)?;
    let coeffs = coefficients(mix, &beam, exciplex, &drive);

    let n_rho = (cell.cell_radius / h).round() as usize + 1;
    let n_win = (cell.window_thickness / h).round() as usize;
    let n_gas = (cell.length / h).round() as usize;
    let n_z = n_gas + 2 * n_win + 1;
    let z: Vec<f64> = (0..n_z).map(|j| (j as f64 - n_win as f64) * h).collect();
    let rho: Vec<f64> = (0..n_rho).map(|i| i as f64 * h).collect();

    let p_at = |zz: f64| -> Result<f64> {
        if zz <= 0.0 {
            Ok(cell.input_power)
        } else {
            power_at(zz.min(cell.length), &coeffs, 1e-12)
        }
    };
    let power: Vec<f64> = z.iter().map(|&zz| p_at(zz)).collect::<Result<_>>()?;
    let p_out = p_at(cell.length)?;

    let k_of = |_r: f64, zz: f64| {
        if zz > 0.0 && zz < cell.length {
            cell.gas_conductivity
        } else {
            cell.window_conductivity
        }
    };
    // Ring areas of the radial control volumes.
    let ring = |i: usize| {
        let outer = rho[i] + 0.5 * h;
        let inner = (rho[i] - 0.5 * h).max(0.0);
        PI * (outer * outer - inner * inner)
    };
    let beam_share = |i: usize| {
        let outer = (rho[i] + 0.5 * h).min(cell.beam_radius);
        let inner = (rho[i] - 0.5 * h).max(0.0);
        if outer <= inner {
            0.0
        } else {
            (outer * outer - inner * inner) / (cell.beam_radius * cell.beam_radius)
        }
    };

    let mut sys = StructuredSystem::new(n_rho, n_z);
    for j in 1..n_z - 1 {
        for i in 0..n_rho - 1 {
            let k = sys.idx(i, j);
            sys.active[k] = true;
        }
    }
    for j in 0..n_z {
        // slab-averaged conductivity for radial links
        let k_rad = 0.5 * (k_of(0.0, z[j] - 0.25 * h) + k_of(0.0, z[j] + 0.25 * h));
        for i in 0..n_rho - 1 {
            let face = 2.0 * PI * (rho[i] + 0.5 * h) * h;
            sys.link_x(i, j, k_rad * face / h);
        }
    }
    for j in 0..n_z - 1 {
        let k_ax = series_conductivity(k_of, (0.0, z[j]), (0.0, z[j + 1]), 64);
        for i in 0..n_rho {
            sys.link_y(i, j, k_ax * ring(i) / h);
        }
    }
    let efficiency = exciplex.efficiency();
    for j in 1..n_z - 1 {
        let lo = (z[j] - 0.5 * h).max(0.0);
        let hi = (z[j] + 0.5 * h).min(cell.length);
        if hi <= lo {
            continue;
        }
        let absorbed = p_at(lo)? - p_at(hi)?;
        for i in 0..n_rho - 1 {
            let k = sys.idx(i, j);
            sys.rhs[k] -= efficiency * absorbed * beam_share(i);
        }
    }
    let (theta, stats) = sys.solve(1e-8 * cell.ambient, 200_000)?;
    let temperature: Vec<f64> = theta.iter().map(|t| t + cell.ambient).collect();
    let axis_temperature: Vec<f64> = (0..n_z).map(|j| temperature[n_rho * j]).collect();
    let max_drop = temperature.iter().map(|t| cell.ambient - t).fold(0.0, f64::max);
    Ok(GasCellResult {
        coefficients: coeffs,
        z,
        power,
        axis_temperature,
        rho,
        temperature,
        absorbed_fraction: 1.0 - p_out / cell.input_power,
        max_drop,
        stats,
    })
}
