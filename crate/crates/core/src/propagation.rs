//! Steady-state laser power along the fibre.
//!
//! The saturable loss `dP/dz = −A·BP/(1 + BP)` integrates to the closed form
//! `z(P) = (P_in − P)/A − ln(P/P_in)/(AB)`, which is inverted numerically.

use crate::constants::{C, EPSILON_0, HBAR, K_B};
use crate::error::{Error, Result};
use crate::model::{DriveSpec, ExciplexSpec, FibreGeometry, GasMixture};

/// Power is never pushed below this fraction of `P_in`.
pub const POWER_FLOOR: f64 = 1e-15;
/// `B·P_in` below this is the Beer–Lambert regime.
pub const EXPONENTIAL_THRESHOLD: f64 = 0.1;
/// `B·P_in` above this is the saturated, linear regime.
pub const LINEAR_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationCoefficients {
    /// 𝒜, W/m.
    pub a: f64,
    /// ℬ, W⁻¹.
    pub b: f64,
    pub input_power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Exponential,
    Intermediate,
    Linear,
}

impl Regime {
    pub fn classify(bp: f64) -> Self {
        if bp < EXPONENTIAL_THRESHOLD {
            Regime::Exponential
        } else if bp > LINEAR_THRESHOLD {
            Regime::Linear
        } else {
            Regime::Intermediate
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Exponential => "exponential",
            Regime::Intermediate => "intermediate",
            Regime::Linear => "linear",
        }
    }
}

/// `A = ½ ħω_L γ π r² n_M` and
/// `B = 2 d̃² σ_cool √(3k_B) / (ħ² π² ε₀ √μ γ c) · √T n_X τ² / r²`.
pub fn coefficients(
    mix: &GasMixture,
    fibre: &FibreGeometry,
    exciplex: &ExciplexSpec,
    drive: &DriveSpec,
) -> PropagationCoefficients {
    let pi = std::f64::consts::PI;
    let r2 = fibre.inner_radius * fibre.inner_radius;
    let gamma = exciplex.linewidth;
    let a = 0.5 * HBAR * exciplex.laser_frequency() * gamma * pi * r2 * mix.dopant_density;
    let d = exciplex.effective_dipole();
    let prefactor = 2.0 * d * d * drive.collision_cross_section * (3.0 * K_B).sqrt()
        / (HBAR * HBAR * pi * pi * EPSILON_0 * mix.reduced_mass().sqrt() * gamma * C);
    let b = prefactor * mix.temperature.sqrt() * mix.buffer_density * drive.pulse_duration.powi(2) / r2;
    PropagationCoefficients {
        a,
        b,
        input_power: drive.input_power,
    }
}

impl PropagationCoefficients {
    pub fn new(a: f64, b: f64, input_power: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && input_power > 0.0) {
            return Err(Error::domain("need A, B ≥ 0 and P_in > 0"));
        }
        Ok(Self { a, b, input_power })
    }

    /// Dimensionless saturation parameter ℬ·P_in.
    pub fn saturation(&self) -> f64 {
        self.b * self.input_power
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.saturation())
    }

    /// `P_in / A`; infinite without absorbers.
    pub fn penetration_depth(&self) -> f64 {
        if self.a == 0.0 {
            f64::INFINITY
        } else {
            self.input_power / self.a
        }
    }

    /// Beer–Lambert decay length `1/(AB)`.
    pub fn decay_length(&self) -> f64 {
        1.0 / (self.a * self.b)
    }

    fn z_of_log(&self, u: f64) -> f64 {
        // u = ln(P/P_in)
        (-self.input_power * u.exp_m1() - u / self.b) / self.a
    }
}

/// `z(P) = (P_in − P)/A − ln(P/P_in)/(AB)`.
pub fn position_of_power(p: f64, c: &PropagationCoefficients) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::domain(format!("power must be positive, got {p} W")));
    }
    if p > c.input_power * (1.0 + 1e-15) {
        return Err(Error::domain(format!("power {p} W exceeds the input power {} W", c.input_power)));
    }
    if p >= c.input_power {
        return Ok(0.0);
    }
    if c.a == 0.0 || c.b == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(c.z_of_log((p / c.input_power).ln()))
}

/// `P(z)` from the closed form by safeguarded Newton iteration in `ln P`.
///
/// Converges to `|z(P) − z| < tol · max(1 m, z)`; beyond the point where `P`
/// reaches [`POWER_FLOOR`]`·P_in` the floor value is returned.
pub fn power_at(z: f64, c: &PropagationCoefficients, tol: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain(format!("position must be non-negative, got {z} m")));
    }
    if z == 0.0 || c.a == 0.0 || c.b == 0.0 {
        return Ok(c.input_power);
    }
    let target = tol * z.max(1.0);
    let mut lo = POWER_FLOOR.ln();
    let mut hi = 0.0;
    if c.z_of_log(lo) <= z {
        return Ok(POWER_FLOOR * c.input_power);
    }
    // start from the smaller of the linear and exponential estimates
    let lin = 1.0 - z / c.penetration_depth();
    let mut u = if lin > 0.0 { lin.ln().max(-z / c.decay_length()) } else { -z / c.decay_length() };
    u = u.clamp(lo, hi);
    for _ in 0..200 {
        let f = c.z_of_log(u) - z;
        if f.abs() < target {
            return Ok(c.input_power * u.exp());
        }
        // z(u) is decreasing in u
        if f > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let df = -(c.input_power * u.exp() + 1.0 / c.b) / c.a;
        let mut next = u - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo).abs() < 1e-16 * lo.abs().max(1.0) {
            return Ok(c.input_power * next.exp());
        }
        u = next;
    }
    Err(Error::numerical(
        "power_propagation",
        format!("inversion of z(P) did not converge at z = {z:e} m (bracket [{lo:e}, {hi:e}] in ln P/P_in)"),
    ))
}

/// `dP/dz(0) = −A·B P_in / (B P_in + 1)`.
pub fn initial_slope(c: &PropagationCoefficients) -> f64 {
    let bp = c.saturation();
    -c.a * bp / (bp + 1.0)
}

/// `ℓ_depth = 2P_in / (ħω_L γ π r² n_M)`.
pub fn penetration_depth(drive: &DriveSpec, exciplex: &ExciplexSpec, mix: &GasMixture, fibre: &FibreGeometry) -> f64 {
    let denom = HBAR
        * exciplex.laser_frequency()
        * exciplex.linewidth
        * std::f64::consts::PI
        * fibre.inner_radius.powi(2)
        * mix.dopant_density;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        2.0 * drive.input_power / denom
    }
}

/// Sampled power along the fibre.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    pub z: Vec<f64>,
    pub power: Vec<f64>,
    pub coefficients: PropagationCoefficients,
    pub tolerance: f64,
    pub method: &'static str,
}

impl PowerProfile {
    /// Local regime from the local saturation ℬ·P(z).
    pub fn regimes(&self) -> Vec<Regime> {
        self.power.iter().map(|p| Regime::classify(self.coefficients.b * p)).collect()
    }
}

/// `n + 1` equally spaced samples on `[0, z_max]`.
pub fn power_profile(c: &PropagationCoefficients, z_max: f64, n: usize, tol: f64) -> Result<PowerProfile> {
    if !(z_max > 0.0) || n == 0 {
        return Err(Error::domain("profile needs z_max > 0 and at least one interval"));
    }
    let z: Vec<f64> = (0..=n).map(|i| z_max * i as f64 / n as f64).collect();
    let power = z.iter().map(|&zi| power_at(zi, c, tol)).collect::<Result<Vec<_>>>()?;
    Ok(PowerProfile {
        z,
        power,
        coefficients: *c,
        tolerance: tol,
        method: "closed-form inversion, safeguarded Newton in ln P",
    })
}
