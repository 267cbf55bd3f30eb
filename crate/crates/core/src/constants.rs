//! Physical constants (CODATA 2018, SI) and unit helpers.

use std::f64::consts::PI;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

pub const BAR: f64 = 1.0e5;
pub const MBAR: f64 = 1.0e2;
pub const ANGSTROM: f64 = 1.0e-10;
pub const ANGSTROM2: f64 = 1.0e-20;
pub const MICRON: f64 = 1.0e-6;
pub const PICOSECOND: f64 = 1.0e-12;
pub const FEMTOSECOND: f64 = 1.0e-15;

/// Converts an ordinary frequency in Hz into an angular frequency in rad/s.
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

#[inline]
pub fn thz(f: f64) -> f64 {
    angular(f * 1.0e12)
}

#[inline]
pub fn mhz(f: f64) -> f64 {
    angular(f * 1.0e6)
}

#[inline]
pub fn ghz(f: f64) -> f64 {
    angular(f * 1.0e9)
}
