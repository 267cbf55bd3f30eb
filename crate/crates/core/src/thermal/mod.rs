//! Heat balance: cooling and heating powers and rates, the maximum
//! temperature drop, analytic radial profiles of a single fibre, and a
//! finite-volume steady-state heat solver for fibre bundles and gas cells.

mod cross_section;
mod gas_cell;
mod solver;

pub use cross_section::{heat_solve_2d, hex_bundle, Core, GridSpec, TemperatureField, ThermalScenario};
pub use gas_cell::{gas_cell_scenario, GasCell, GasCellResult};
pub use solver::{SolveStats, StructuredSystem};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::model::{ExciplexSpec, FibreGeometry, GasMixture};
use crate::propagation::PropagationCoefficients;
use std::f64::consts::PI;

/// `P_cool = (Ω/ω_L)(P_out − P_in)`; negative when heat is extracted.
pub fn cooling_power(p_in: f64, p_out: f64, upconversion: f64, laser: f64) -> Result<f64> {
    if !(p_out >= 0.0 && p_out <= p_in) {
        return Err(Error::domain(format!("need 0 ≤ P_out ≤ P_in, got P_out = {p_out} W, P_in = {p_in} W")));
    }
    Ok(upconversion / laser * (p_out - p_in))
}

/// `β_lin = (ħΩ / k_B T) · n_M/(n_M + n_X) · γ`.
pub fn cooling_rate_linear(mix: &GasMixture, exciplex: &ExciplexSpec) -> f64 {
    let n = mix.total_density();
    if n == 0.0 {
        return 0.0;
    }
    HBAR * exciplex.upconversion / (K_B * mix.temperature) * mix.dopant_density / n * exciplex.linewidth
}

/// `β_exp = ℬ P_in · β_lin`.
pub fn cooling_rate_exponential(coeffs: &PropagationCoefficients, mix: &GasMixture, exciplex: &ExciplexSpec) -> f64 {
    coeffs.saturation() * cooling_rate_linear(mix, exciplex)
}

/// Thermal kinetic energy of the gas in a fibre section of length `length`,
/// `E_kin = (3/2)(n_X + n_M) π r² ℓ k_B T`.
pub fn kinetic_energy(mix: &GasMixture, fibre: &FibreGeometry, length: f64) -> f64 {
    1.5 * mix.total_density() * fibre.core_area() * length * K_B * mix.temperature
}

/// `β = −P_cool / E_kin` directly from a cooling power.
///
/// At full absorption over `ℓ = ℓ_depth` this is one third of
/// [`cooling_rate_linear`].
pub fn cooling_rate_from_power(p_cool: f64, mix: &GasMixture, fibre: &FibreGeometry, length: f64) -> f64 {
    -p_cool / kinetic_energy(mix, fibre, length)
}

/// `P_heat = 2π k_g (T_e − T) ℓ / ln(r_e/r)`.
pub fn heating_power(temperature: f64, fibre: &FibreGeometry, ambient: f64, length: f64) -> Result<f64> {
    if !(fibre.outer_radius > fibre.inner_radius) {
        return Err(Error::domain("outer radius must exceed inner radius"));
    }
    Ok(2.0 * PI * fibre.wall_conductivity * (ambient - temperature) / fibre.log_ratio() * length)
}

/// `β_heat = 4k_g / (3 k_B T (n_X + n_M)) · (T_e − T) / (r² ln(r_e/r))`.
pub fn heating_rate(mix: &GasMixture, fibre: &FibreGeometry, temperature: f64, ambient: f64) -> f64 {
    4.0 * fibre.wall_conductivity / (3.0 * K_B * temperature * mix.total_density()) * (ambient - temperature)
        / (fibre.inner_radius.powi(2) * fibre.log_ratio())
}

/// `δT_max = γ n_M ħΩ r² ln(r_e/r) / (4 k_g)`.
pub fn max_temperature_drop(mix: &GasMixture, fibre: &FibreGeometry, exciplex: &ExciplexSpec) -> f64 {
    exciplex.linewidth * mix.dopant_density * HBAR * exciplex.upconversion / (4.0 * fibre.wall_conductivity)
        * fibre.inner_radius.powi(2)
        * fibre.log_ratio()
}

/// `q_vol = −½ ħΩ γ n_M`, W/m³.
pub fn volumetric_cooling(mix: &GasMixture, exciplex: &ExciplexSpec) -> f64 {
    -0.5 * HBAR * exciplex.upconversion * exciplex.linewidth * mix.dopant_density
}

/// Analytic steady-state profile of a single fibre with a uniform source
/// `q_vol` in the gas core and the outer cladding surface held at `T_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub fibre: FibreGeometry,
    pub q_vol: f64,
    pub ambient: f64,
}

impl RadialProfile {
    pub fn new(fibre: FibreGeometry, q_vol: f64, ambient: f64) -> Result<Self> {
        if !(ambient > 0.0) {
            return Err(Error::domain("ambient temperature must be positive"));
        }
        Ok(Self { fibre, q_vol, ambient })
    }

    /// Cooling power per unit length, `q_vol π r²` (negative for cooling).
    pub fn cooling_power_per_length(&self) -> f64 {
        self.q_vol * self.fibre.core_area()
    }

    /// `T(ρ)`: parabolic in the gas, logarithmic in the glass.
    pub fn temperature(&self, rho: f64) -> Result<f64> {
        let (r, re) = (self.fibre.inner_radius, self.fibre.outer_radius);
        if !(rho >= 0.0) || rho > re * (1.0 + 1e-12) {
            return Err(Error::domain(format!("ρ = {rho} m outside [0, r_e]")));
        }
        let c = -self.cooling_power_per_length() / (2.0 * PI);
        let (ka, kg) = (self.fibre.gas_conductivity, self.fibre.wall_conductivity);
        Ok(if rho <= r {
            c * ((rho * rho / (r * r) - 1.0) / (2.0 * ka) + (r / re).ln() / kg) + self.ambient
        } else {
            c * (rho / re).ln() / kg + self.ambient
        })
    }

    /// Gas-branch expression evaluated at any ρ (used for continuity checks).
    pub fn gas_branch(&self, rho: f64) -> f64 {
        let (r, re) = (self.fibre.inner_radius, self.fibre.outer_radius);
        let c = -self.cooling_power_per_length() / (2.0 * PI);
        c * ((rho * rho / (r * r) - 1.0) / (2.0 * self.fibre.gas_conductivity) + (r / re).ln() / self.fibre.wall_conductivity)
            + self.ambient
    }

    /// Glass-branch expression evaluated at any ρ.
    pub fn glass_branch(&self, rho: f64) -> f64 {
        let c = -self.cooling_power_per_length() / (2.0 * PI);
        c * (rho / self.fibre.outer_radius).ln() / self.fibre.wall_conductivity + self.ambient
    }

    /// `T_e − T(r)` from the glass branch.
    pub fn wall_drop(&self) -> f64 {
        self.ambient - self.glass_branch(self.fibre.inner_radius)
    }

    /// `T_e − T(0)`.
    pub fn total_drop(&self) -> f64 {
        self.ambient - self.gas_branch(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rb_ar;
    use crate::propagation::coefficients;

    #[test]
    fn cooling_power_values() {
        let ex = rb_ar::exciplex();
        assert_eq!(cooling_power(1.0, 1.0, ex.upconversion, ex.laser_frequency()).unwrap(), 0.0);
        let full = cooling_power(1.0, 0.0, ex.upconversion, ex.laser_frequency()).unwrap();
        assert!((full + 6.7154 / (377.0 - 6.7154)).abs() < 1e-12);
        assert!((-full - 0.0181).abs() < 2e-4);
        let half = cooling_power(1.0, 0.0, 0.5 * ex.upconversion, ex.laser_frequency()).unwrap();
        assert!((half / full - 0.5).abs() < 1e-14);
        assert!(cooling_power(1.0, 1.5, ex.upconversion, ex.laser_frequency()).is_err());
    }

    #[test]
    fn linear_cooling_rate_oracle() {
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        let x = 1.054571817e-34 * 2.0 * PI * 6.7154e12 / (1.380649e-23 * 300.0);
        assert!((x - 1.0743).abs() < 1e-3);
        let oracle = x * (1.0 / 10001.0) * 2.0 * PI * 5.75e6;
        let beta = cooling_rate_linear(&mix, &ex);
        assert!((beta / oracle - 1.0).abs() < 1e-6, "{beta} vs {oracle}");
        assert!((beta - 3.9e3).abs() < 0.05e3);
        let empty = mix.with_densities(0.0, mix.buffer_density).unwrap();
        assert_eq!(cooling_rate_linear(&empty, &ex), 0.0);
    }

    #[test]
    fn exponential_rate_ratio() {
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        let c = coefficients(&mix, &rb_ar::fibre(0.01).unwrap(), &ex, &rb_ar::drive(0.01).unwrap());
        let r = cooling_rate_exponential(&c, &mix, &ex) / cooling_rate_linear(&mix, &ex);
        assert!((r / c.saturation() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_from_power_is_a_third_of_linear_rate() {
        // full absorption over the penetration depth
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        let fibre = rb_ar::fibre(0.01).unwrap();
        let drive = rb_ar::drive(1.0).unwrap();
        let c = coefficients(&mix, &fibre, &ex, &drive);
        let p_cool = cooling_power(1.0, 0.0, ex.upconversion, ex.laser_frequency()).unwrap();
        let beta = cooling_rate_from_power(p_cool, &mix, &fibre, c.penetration_depth());
        assert!((cooling_rate_linear(&mix, &ex) / beta - 3.0).abs() < 1e-9);
        assert!((beta * kinetic_energy(&mix, &fibre, c.penetration_depth()) + p_cool).abs() < 1e-15);
    }

    #[test]
    fn heating_power_oracle() {
        let fibre = rb_ar::fibre(0.01).unwrap();
        assert_eq!(heating_power(300.0, &fibre, 300.0, 0.01).unwrap(), 0.0);
        let p = heating_power(299.0, &fibre, 300.0, 0.01).unwrap();
        let oracle = 2.0 * PI * 0.8 * 0.01 / (70.0f64 / 20.0).ln();
        assert!((p / oracle - 1.0).abs() < 1e-12);
        assert!((p - 0.040).abs() < 5e-4);
        let p2 = heating_power(298.0, &fibre, 300.0, 0.02).unwrap();
        assert!((p2 / p - 4.0).abs() < 1e-12);
    }

    #[test]
    fn heating_rate_identity() {
        let mix = rb_ar::default_mixture();
        let fibre = rb_ar::fibre(0.01).unwrap();
        assert_eq!(heating_rate(&mix, &fibre, 300.0, 300.0), 0.0);
        let t = 299.0;
        let p = heating_power(t, &fibre, 300.0, 0.01).unwrap();
        let m = mix.with_temperature(t).unwrap();
        let beta = heating_rate(&m, &fibre, t, 300.0);
        assert!((beta * kinetic_energy(&m, &fibre, 0.01) / p - 1.0).abs() < 1e-12);
        let dense = m.with_densities(2.0 * m.dopant_density, 2.0 * m.buffer_density).unwrap();
        assert!((heating_rate(&dense, &fibre, t, 300.0) / beta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn max_drop_oracle() {
        let mix = rb_ar::default_mixture();
        let fibre = rb_ar::fibre(0.01).unwrap();
        let ex = rb_ar::exciplex();
        let d = max_temperature_drop(&mix, &fibre, &ex);
        let oracle = 2.0 * PI * 5.75e6 * 2.41432e22 * 1.054571817e-34 * 2.0 * PI * 6.7154e12 / 3.2
            * 4e-10
            * 3.5f64.ln();
        assert!((d / oracle - 1.0).abs() < 1e-4, "{d} vs {oracle}");
        assert!((d - 0.6077).abs() < 2e-3);
        let empty = mix.with_densities(0.0, mix.buffer_density).unwrap();
        assert_eq!(max_temperature_drop(&empty, &fibre, &ex), 0.0);
        // balance of heating and cooling power at the penetration depth
        let c = coefficients(&mix, &fibre, &ex, &rb_ar::drive(1.0).unwrap());
        let l = c.penetration_depth();
        let p_cool = cooling_power(1.0, 0.0, ex.upconversion, ex.laser_frequency()).unwrap();
        let p_heat = heating_power(300.0 - d, &fibre, 300.0, l).unwrap();
        assert!((p_heat + p_cool).abs() < 1e-10);
    }

    #[test]
    fn volumetric_source_identity() {
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        let fibre = rb_ar::fibre(0.01).unwrap();
        let c = coefficients(&mix, &fibre, &ex, &rb_ar::drive(1.0).unwrap());
        let q = volumetric_cooling(&mix, &ex);
        let alt = ex.efficiency() * (-c.a) / fibre.core_area();
        assert!((q / alt - 1.0).abs() < 1e-12);
        let empty = mix.with_densities(0.0, mix.buffer_density).unwrap();
        assert_eq!(volumetric_cooling(&empty, &ex), 0.0);
    }

    fn default_profile() -> RadialProfile {
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        RadialProfile::new(rb_ar::fibre(0.01).unwrap(), volumetric_cooling(&mix, &ex), 300.0).unwrap()
    }

    #[test]
    fn radial_profile_shape() {
        let p = default_profile();
        let re = p.fibre.outer_radius;
        assert!((p.temperature(re).unwrap() - 300.0).abs() < 1e-12);
        let r = p.fibre.inner_radius;
        assert!((p.gas_branch(r) - p.glass_branch(r)).abs() < 1e-12);
        assert!(p.temperature(re * 1.01).is_err());
        // bowl shape: minimum at the axis, increasing outward
        let mut last = p.temperature(0.0).unwrap();
        for i in 1..=140 {
            let t = p.temperature(re * i as f64 / 140.0).unwrap();
            assert!(t > last);
            last = t;
        }
    }

    #[test]
    fn flux_matching_at_wall() {
        let p = default_profile();
        let r = p.fibre.inner_radius;
        let h = 1e-6 * r;
        let target = p.cooling_power_per_length().abs();
        let d_gas = (p.gas_branch(r + h) - p.gas_branch(r - h)) / (2.0 * h);
        let d_glass = (p.glass_branch(r + h) - p.glass_branch(r - h)) / (2.0 * h);
        let f_gas = 2.0 * PI * r * p.fibre.gas_conductivity * d_gas;
        let f_glass = 2.0 * PI * r * p.fibre.wall_conductivity * d_glass;
        // the branches are a parabola and a logarithm, so analytic slopes are exact
        let exact_gas = 2.0 * PI * r * p.fibre.gas_conductivity * (-p.cooling_power_per_length() / (2.0 * PI)) / (p.fibre.gas_conductivity * r);
        assert!((exact_gas / target - 1.0).abs() < 1e-10);
        assert!((f_gas / target - 1.0).abs() < 1e-6);
        assert!((f_glass / target - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wall_drop_matches_max_drop() {
        let mix = rb_ar::default_mixture();
        let ex = rb_ar::exciplex();
        let p = default_profile();
        let d = max_temperature_drop(&mix, &p.fibre, &ex);
        assert!((p.wall_drop() / d - 1.0).abs() < 1e-10);
    }
}
