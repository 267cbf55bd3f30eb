//! Shared physical model: gas mixture, fibre geometry, exciplex potentials and
//! laser drive, plus the elementary derived quantities every other module uses.
//!
//! All frequencies are angular frequencies in rad/s and all other quantities
//! are SI. Energies on potential curves are likewise expressed as angular
//! frequencies (energy / ħ).

use crate::constants::{thz, mhz, AMU, ANGSTROM, ANGSTROM2, BAR, C, EPSILON_0, HBAR, K_B, MBAR, MICRON, PICOSECOND};
use crate::error::{Error, Result};

/// Dopant fraction above which the dilute-dopant assumption is flagged.
pub const DILUTION_WARNING_RATIO: f64 = 0.1;

/// Ideal-gas number density `p / (k_B T)` in m⁻³.
pub fn number_density(pressure: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::domain(format!("temperature must be positive, got {temperature} K")));
    }
    if !(pressure >= 0.0) {
        return Err(Error::domain(format!("pressure must be non-negative, got {pressure} Pa")));
    }
    Ok(pressure / (K_B * temperature))
}

/// Ideal-gas pressure `n k_B T` in Pa.
pub fn pressure(density: f64, temperature: f64) -> f64 {
    density * K_B * temperature
}

/// Mean thermal speed `sqrt(3 k_B T / μ)` of the relative motion.
pub fn mean_thermal_speed(temperature: f64, reduced_mass: f64) -> Result<f64> {
    if !(reduced_mass > 0.0) {
        return Err(Error::domain(format!("reduced mass must be positive, got {reduced_mass} kg")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::domain(format!("temperature must be non-negative, got {temperature} K")));
    }
    Ok((3.0 * K_B * temperature / reduced_mass).sqrt())
}

/// Collision rate `κ = n_X σ_cool v` in s⁻¹.
pub fn collision_rate(mix: &GasMixture, drive: &DriveSpec) -> f64 {
    mix.buffer_density * drive.collision_cross_section * mix.mean_speed()
}

/// Average time between cooling collisions, `1/κ`.
pub fn collision_time(mix: &GasMixture, drive: &DriveSpec) -> f64 {
    1.0 / collision_rate(mix, drive)
}

/// Dopant (M) and buffer (X) gas filling the fibre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasMixture {
    pub dopant_mass: f64,
    pub buffer_mass: f64,
    reduced_mass: f64,
    pub dopant_density: f64,
    pub buffer_density: f64,
    pub temperature: f64,
}

impl GasMixture {
    pub fn new(
        dopant_mass: f64,
        buffer_mass: f64,
        dopant_density: f64,
        buffer_density: f64,
        temperature: f64,
    ) -> Result<Self> {
        if !(dopant_mass > 0.0 && buffer_mass > 0.0) {
            return Err(Error::domain("atomic masses must be positive"));
        }
        if !(dopant_density >= 0.0 && buffer_density >= 0.0) {
            return Err(Error::domain("number densities must be non-negative"));
        }
        if !(temperature > 0.0) {
            return Err(Error::domain(format!("temperature must be positive, got {temperature} K")));
        }
        Ok(Self {
            dopant_mass,
            buffer_mass,
            reduced_mass: dopant_mass * buffer_mass / (dopant_mass + buffer_mass),
            dopant_density,
            buffer_density,
            temperature,
        })
    }

    /// Builds a mixture from partial pressures (Pa) at temperature `T`.
    pub fn from_pressures(
        dopant_mass: f64,
        buffer_mass: f64,
        dopant_pressure: f64,
        buffer_pressure: f64,
        temperature: f64,
    ) -> Result<Self> {
        let n_m = number_density(dopant_pressure, temperature)?;
        let n_x = number_density(buffer_pressure, temperature)?;
        Self::new(dopant_mass, buffer_mass, n_m, n_x, temperature)
    }

    pub fn reduced_mass(&self) -> f64 {
        self.reduced_mass
    }

    pub fn total_density(&self) -> f64 {
        self.dopant_density + self.buffer_density
    }

    /// Ideal-gas pressure of the mixture.
    pub fn pressure(&self) -> f64 {
        pressure(self.total_density(), self.temperature)
    }

    /// Mean relative thermal speed at the mixture temperature.
    pub fn mean_speed(&self) -> f64 {
        (3.0 * K_B * self.temperature / self.reduced_mass).sqrt()
    }

    /// True when `n_M / n_X` exceeds [`DILUTION_WARNING_RATIO`].
    pub fn dilution_warning(&self) -> bool {
        self.dopant_density > DILUTION_WARNING_RATIO * self.buffer_density
    }

    pub fn with_densities(&self, dopant_density: f64, buffer_density: f64) -> Result<Self> {
        Self::new(self.dopant_mass, self.buffer_mass, dopant_density, buffer_density, self.temperature)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.dopant_mass, self.buffer_mass, self.dopant_density, self.buffer_density, temperature)
    }
}

/// Hollow-core fibre cross-section and thermal properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreGeometry {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub length: f64,
    pub wall_conductivity: f64,
    pub gas_conductivity: f64,
}

impl FibreGeometry {
    pub fn new(
        inner_radius: f64,
        outer_radius: f64,
        length: f64,
        wall_conductivity: f64,
        gas_conductivity: f64,
    ) -> Result<Self> {
        if !(inner_radius > 0.0 && outer_radius > inner_radius) {
            return Err(Error::domain(format!(
                "fibre radii must satisfy 0 < r < r_e (r = {inner_radius}, r_e = {outer_radius})"
            )));
        }
        if !(length > 0.0) {
            return Err(Error::domain("fibre length must be positive"));
        }
        if !(wall_conductivity > 0.0 && gas_conductivity > 0.0) {
            return Err(Error::domain("thermal conductivities must be positive"));
        }
        Ok(Self {
            inner_radius,
            outer_radius,
            length,
            wall_conductivity,
            gas_conductivity,
        })
    }

    /// Core cross-section `π r²`.
    pub fn core_area(&self) -> f64 {
        std::f64::consts::PI * self.inner_radius * self.inner_radius
    }

    /// `ln(r_e / r)`.
    pub fn log_ratio(&self) -> f64 {
        (self.outer_radius / self.inner_radius).ln()
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.inner_radius, self.outer_radius, length, self.wall_conductivity, self.gas_conductivity)
    }

    pub fn with_inner_radius(&self, inner_radius: f64) -> Result<Self> {
        Self::new(inner_radius, self.outer_radius, self.length, self.wall_conductivity, self.gas_conductivity)
    }
}

/// Morse curve `U(r) = offset + D_e [1 − e^{−a (r − r_eq)}]²`, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorsePotential {
    pub depth: f64,
    pub width: f64,
    pub equilibrium: f64,
    pub offset: f64,
}

impl MorsePotential {
    pub fn new(depth: f64, width: f64, equilibrium: f64, offset: f64) -> Result<Self> {
        if !(depth >= 0.0) {
            return Err(Error::domain("Morse depth must be non-negative"));
        }
        if !(width > 0.0) {
            return Err(Error::domain("Morse width must be positive"));
        }
        if !(equilibrium > 0.0) {
            return Err(Error::domain("Morse equilibrium distance must be positive"));
        }
        Ok(Self {
            depth,
            width,
            equilibrium,
            offset,
        })
    }

    /// A Morse curve whose dissociation limit sits at `asymptote`.
    pub fn with_asymptote(depth: f64, width: f64, equilibrium: f64, asymptote: f64) -> Result<Self> {
        Self::new(depth, width, equilibrium, asymptote - depth)
    }

    /// Checked evaluation; `r` must be positive.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain(format!("interatomic distance must be positive, got {r} m")));
        }
        Ok(self.at(r))
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        let s = 1.0 - (-self.width * (r - self.equilibrium)).exp();
        self.offset + self.depth * s * s
    }

    /// dU/dr in rad s⁻¹ m⁻¹.
    #[inline]
    pub fn derivative(&self, r: f64) -> f64 {
        let e = (-self.width * (r - self.equilibrium)).exp();
        2.0 * self.depth * self.width * (1.0 - e) * e
    }

    /// Dissociation limit `offset + D_e`.
    pub fn asymptote(&self) -> f64 {
        self.offset + self.depth
    }

    /// Radius on the repulsive wall where the curve reaches `level`
    /// (requires `level > offset`).
    pub fn inner_turning_point(&self, level: f64) -> Option<f64> {
        let x = (level - self.offset) / self.depth;
        if !(x > 0.0) || self.depth == 0.0 {
            return None;
        }
        // 1 - e = -sqrt(x)  =>  e = 1 + sqrt(x)
        Some(self.equilibrium - (1.0 + x.sqrt()).ln() / self.width)
    }
}

/// Exciplex transition: ground/excited curves and optical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExciplexSpec {
    pub ground: MorsePotential,
    pub excited: MorsePotential,
    /// Bare dopant transition ω₀.
    pub bare_transition: f64,
    /// Spontaneous decay rate γ.
    pub linewidth: f64,
    /// Bare transition dipole d_eg, C m.
    pub dipole: f64,
    pub franck_condon: f64,
    /// Up-conversion shift Ω = ω₀ − ω_L.
    pub upconversion: f64,
}

impl ExciplexSpec {
    pub fn new(
        ground: MorsePotential,
        excited: MorsePotential,
        bare_transition: f64,
        linewidth: f64,
        dipole: f64,
        franck_condon: f64,
        upconversion: f64,
    ) -> Result<Self> {
        if !(franck_condon > 0.0 && franck_condon <= 1.0) {
            return Err(Error::domain(format!("Franck-Condon factor must lie in (0, 1], got {franck_condon}")));
        }
        if !(linewidth > 0.0 && dipole > 0.0 && bare_transition > 0.0) {
            return Err(Error::domain("linewidth, dipole and transition frequency must be positive"));
        }
        if !(upconversion > 0.0 && upconversion < bare_transition) {
            return Err(Error::domain("up-conversion shift must lie in (0, ω₀)"));
        }
        if upconversion > excited.depth * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "up-conversion shift {upconversion:.4e} rad/s exceeds the excited well depth {:.4e} rad/s",
                excited.depth
            )));
        }
        Ok(Self {
            ground,
            excited,
            bare_transition,
            linewidth,
            dipole,
            franck_condon,
            upconversion,
        })
    }

    /// Laser frequency ω_L = ω₀ − Ω.
    pub fn laser_frequency(&self) -> f64 {
        self.bare_transition - self.upconversion
    }

    /// Franck–Condon reduced dipole `f_FC d_eg`.
    pub fn effective_dipole(&self) -> f64 {
        self.franck_condon * self.dipole
    }

    /// Spontaneous emission time `1/γ`.
    pub fn decay_time(&self) -> f64 {
        1.0 / self.linewidth
    }

    /// Fraction of each absorbed photon that is extracted as heat, `Ω/ω_L`.
    pub fn efficiency(&self) -> f64 {
        self.upconversion / self.laser_frequency()
    }

    pub fn with_franck_condon(&self, f: f64) -> Result<Self> {
        Self::new(self.ground, self.excited, self.bare_transition, self.linewidth, self.dipole, f, self.upconversion)
    }

    pub fn with_upconversion(&self, omega: f64) -> Result<Self> {
        Self::new(self.ground, self.excited, self.bare_transition, self.linewidth, self.dipole, self.franck_condon, omega)
    }
}

/// Laser drive and collision window parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub input_power: f64,
    pub collision_cross_section: f64,
    pub pulse_duration: f64,
    /// Laser bandwidth δω; carried as metadata only.
    pub bandwidth: Option<f64>,
}

impl DriveSpec {
    pub fn new(input_power: f64, collision_cross_section: f64, pulse_duration: f64) -> Result<Self> {
        if !(input_power > 0.0 && collision_cross_section > 0.0 && pulse_duration > 0.0) {
            return Err(Error::domain("input power, cooling cross-section and pulse duration must be positive"));
        }
        Ok(Self {
            input_power,
            collision_cross_section,
            pulse_duration,
            bandwidth: None,
        })
    }

    /// Field amplitude with `E² = P / (ε₀ π r² c)` for power `power` in the core.
    pub fn field_amplitude_at(power: f64, fibre: &FibreGeometry) -> f64 {
        (power / (EPSILON_0 * fibre.core_area() * C)).sqrt()
    }

    /// Input field amplitude `E_in`.
    pub fn field_amplitude(&self, fibre: &FibreGeometry) -> f64 {
        Self::field_amplitude_at(self.input_power, fibre)
    }

    pub fn with_power(&self, input_power: f64) -> Result<Self> {
        let mut d = Self::new(input_power, self.collision_cross_section, self.pulse_duration)?;
        d.bandwidth = self.bandwidth;
        Ok(d)
    }
}

/// Rabi frequency magnitude `d E / ħ`.
pub fn rabi_frequency(dipole: f64, field: f64) -> f64 {
    (dipole * field / HBAR).abs()
}

/// Parameter sets for the rubidium–argon exciplex.
///
/// The Morse widths and the ground-state curve are an approximation set:
/// only the excited depth (2π × 6.72 THz) and the excited equilibrium
/// distance (3.731 Å) are fixed by the reference data. The remaining
/// values give a shallow, almost flat ground curve whose repulsive wall at
/// the 300 K mean collision energy lies near the excited equilibrium.
pub mod rb_ar {
    use super::*;

    pub const REDUCED_MASS: f64 = 4.5112e-26;
    pub const ARGON_MASS_AMU: f64 = 39.948;
    /// Total elastic cross-section reference, 572 Å².
    pub const TOTAL_CROSS_SECTION: f64 = 572.0 * ANGSTROM2;
    pub const COOLING_CROSS_SECTION: f64 = 20.0 * ANGSTROM2;
    pub const DIPOLE: f64 = 2.537e-29;
    pub const FRANCK_CONDON: f64 = 0.8;
    pub const EXCITED_EQUILIBRIUM: f64 = 3.731 * ANGSTROM;
    pub const PULSE_DURATION: f64 = 1.0 * PICOSECOND;
    pub const INNER_RADIUS: f64 = 20.0 * MICRON;
    pub const OUTER_RADIUS: f64 = 70.0 * MICRON;
    pub const SILICA_CONDUCTIVITY: f64 = 0.8;
    pub const ARGON_CONDUCTIVITY: f64 = 0.03;

    pub fn linewidth() -> f64 {
        mhz(5.75)
    }
    pub fn upconversion() -> f64 {
        thz(6.7154)
    }
    pub fn bare_transition() -> f64 {
        thz(377.0)
    }
    pub fn excited_depth() -> f64 {
        thz(6.72)
    }

    pub fn argon_mass() -> f64 {
        ARGON_MASS_AMU * AMU
    }

    /// Rubidium mass consistent with the tabulated reduced mass.
    pub fn rubidium_mass() -> f64 {
        1.0 / (1.0 / REDUCED_MASS - 1.0 / argon_mass())
    }

    pub fn ground_potential() -> MorsePotential {
        MorsePotential::with_asymptote(thz(1.5), 1.0 / ANGSTROM, 5.0 * ANGSTROM, 0.0).expect("valid preset")
    }

    pub fn excited_potential() -> MorsePotential {
        MorsePotential::with_asymptote(excited_depth(), 1.2 / ANGSTROM, EXCITED_EQUILIBRIUM, bare_transition())
            .expect("valid preset")
    }

    pub fn exciplex() -> ExciplexSpec {
        ExciplexSpec::new(
            ground_potential(),
            excited_potential(),
            bare_transition(),
            linewidth(),
            DIPOLE,
            FRANCK_CONDON,
            upconversion(),
        )
        .expect("valid preset")
    }

    /// Mixture with dopant pressure in mbar and buffer pressure in bar.
    pub fn mixture(dopant_mbar: f64, buffer_bar: f64, temperature: f64) -> Result<GasMixture> {
        GasMixture::from_pressures(
            rubidium_mass(),
            argon_mass(),
            dopant_mbar * MBAR,
            buffer_bar * BAR,
            temperature,
        )
    }

    /// 1 mbar Rb, 10 bar Ar at 300 K.
    pub fn default_mixture() -> GasMixture {
        mixture(1.0, 10.0, 300.0).expect("valid preset")
    }

    /// r = 20 µm, r_e = 70 µm silica fibre of length `length`.
    pub fn fibre(length: f64) -> Result<FibreGeometry> {
        FibreGeometry::new(INNER_RADIUS, OUTER_RADIUS, length, SILICA_CONDUCTIVITY, ARGON_CONDUCTIVITY)
    }

    pub fn drive(input_power: f64) -> Result<DriveSpec> {
        DriveSpec::new(input_power, COOLING_CROSS_SECTION, PULSE_DURATION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_bar_at_room_temperature() {
        let n = number_density(1.0 * BAR, 300.0).unwrap();
        assert!((n * 1e-6 / 2.414e19 - 1.0).abs() < 1e-3);
        assert_eq!(number_density(0.0, 300.0).unwrap(), 0.0);
        let n10 = number_density(10.0 * BAR, 300.0).unwrap();
        assert!((n10 / (10.0 * n) - 1.0).abs() < 1e-14);
        assert!(number_density(1.0, 0.0).is_err());
        assert!(number_density(1.0, -3.0).is_err());
    }

    #[test]
    fn thermal_speed_values() {
        let v = mean_thermal_speed(300.0, rb_ar::REDUCED_MASS).unwrap();
        assert!((v - 524.0).abs() < 1.5, "v = {v}");
        assert_eq!(mean_thermal_speed(0.0, rb_ar::REDUCED_MASS).unwrap(), 0.0);
        let v4 = mean_thermal_speed(1200.0, rb_ar::REDUCED_MASS).unwrap();
        assert!((v4 / v - 2.0).abs() < 1e-14);
        assert!(mean_thermal_speed(300.0, 0.0).is_err());
    }

    #[test]
    fn collision_rate_product() {
        let mix = rb_ar::default_mixture();
        let drive = rb_ar::drive(1.0).unwrap();
        let kappa = collision_rate(&mix, &drive);
        assert!((kappa * collision_time(&mix, &drive) - 1.0).abs() < 1e-15);
        // n_X = 2.414e26 m^-3, σ = 20 Å², v = 524 m/s
        let oracle = 2.414e26 * 20e-20 * 524.0;
        assert!((kappa / oracle - 1.0).abs() < 5e-3, "κ = {kappa:e}, oracle {oracle:e}");
        assert!((kappa / 2.53e10 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn reduced_mass_consistent() {
        let mix = rb_ar::default_mixture();
        let mu = mix.dopant_mass * mix.buffer_mass / (mix.dopant_mass + mix.buffer_mass);
        assert!((mix.reduced_mass() / mu - 1.0).abs() < 1e-12);
        assert!((mix.reduced_mass() / rb_ar::REDUCED_MASS - 1.0).abs() < 1e-12);
        assert!(!mix.dilution_warning());
        let dense = mix.with_densities(mix.buffer_density, mix.buffer_density).unwrap();
        assert!(dense.dilution_warning());
    }

    #[test]
    fn morse_limits() {
        let u = rb_ar::excited_potential();
        assert!((u.depth / thz(6.72) - 1.0).abs() < 1e-15);
        assert_eq!(u.eval(u.equilibrium).unwrap(), u.offset);
        let far = u.eval(u.equilibrium + 40.0 / u.width).unwrap();
        assert!((far - u.asymptote()).abs() < 1e-9 * u.depth);
        assert!(u.eval(0.0).is_err());
        assert!(u.eval(-1.0).is_err());
    }

    #[test]
    fn morse_turning_point_inverts_curve() {
        let u = rb_ar::ground_potential();
        let level = u.asymptote() + thz(9.0);
        let r = u.inner_turning_point(level).unwrap();
        assert!((u.at(r) - level).abs() < 1e-9 * level.abs());
        assert!(r < u.equilibrium);
    }

    #[test]
    fn exciplex_invariants() {
        let ex = rb_ar::exciplex();
        assert_eq!(ex.laser_frequency(), ex.bare_transition - ex.upconversion);
        assert!((ex.effective_dipole() - 0.8 * rb_ar::DIPOLE).abs() < 1e-40);
        assert!(ex.upconversion <= ex.excited.depth);
        assert!(ex.with_franck_condon(0.0).is_err());
        assert!(ex.with_franck_condon(1.2).is_err());
        assert!(ex.with_upconversion(thz(7.0)).is_err());
        // excited dissociation limit sits ω₀ above the ground limit
        assert!((ex.excited.asymptote() - ex.ground.asymptote() - ex.bare_transition).abs() < 1e-3);
    }

    #[test]
    fn field_amplitude_relation() {
        let fibre = rb_ar::fibre(0.01).unwrap();
        let drive = rb_ar::drive(1.0).unwrap();
        let e = drive.field_amplitude(&fibre);
        let p = e * e * EPSILON_0 * fibre.core_area() * C;
        assert!((p - 1.0).abs() < 1e-12);
        assert!(DriveSpec::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fibre_validation() {
        assert!(FibreGeometry::new(2e-5, 1e-5, 1.0, 1.0, 1.0).is_err());
        assert!(FibreGeometry::new(2e-5, 2e-5, 1.0, 1.0, 1.0).is_err());
        assert!(FibreGeometry::new(2e-5, 7e-5, 0.0, 1.0, 1.0).is_err());
        assert!(FibreGeometry::new(2e-5, 7e-5, 1.0, 0.0, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pressure_density_round_trip(n in 1e10f64..1e28, t in 1.0f64..3000.0) {
                let back = number_density(pressure(n, t), t).unwrap();
                prop_assert!((back / n - 1.0).abs() < 1e-12);
            }

            #[test]
            fn speed_monotone(t in 1.0f64..2000.0, dt in 0.1f64..100.0, mu in 1e-27f64..1e-24) {
                let v = mean_thermal_speed(t, mu).unwrap();
                prop_assert!(mean_thermal_speed(t + dt, mu).unwrap() > v);
                prop_assert!(mean_thermal_speed(t, mu * 1.5).unwrap() < v);
            }
        }

        #[test]
        fn morse_minimum_on_dense_grid() {
            for u in [rb_ar::ground_potential(), rb_ar::excited_potential()] {
                let n = 20_000;
                let (lo, hi) = (0.5 * u.equilibrium, u.equilibrium + 20.0 / u.width);
                let mut best = (f64::INFINITY, 0.0);
                for i in 0..=n {
                    let r = lo + (hi - lo) * i as f64 / n as f64;
                    let v = u.at(r);
                    assert!(v >= u.offset - 1e-9 * u.depth);
                    if v < best.0 {
                        best = (v, r);
                    }
                }
                assert!((best.1 - u.equilibrium).abs() <= (hi - lo) / n as f64);
            }
        }
    }
}
