//! Excitation dynamics of a single dopant atom under randomly timed Rabi
//! pulses: the analytic Legendre-series solution of the decaying diffusion on
//! the Bloch sphere and a Monte-Carlo trajectory simulator for the same process.
//!
//! Orientation: `cos θ = z = ρ_gg − ρ_ee`, so the ground state sits at
//! `θ = 0` (z = +1) and the excited state at `θ = π`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::legendre_all;

/// Default number of Legendre coefficients.
pub const DEFAULT_N_MAX: usize = 64;
/// Upper bound for adaptive doubling of the series length.
pub const MAX_N_MAX: usize = 1 << 16;

/// `D = χ̃_R² κ τ² / π`.
pub fn diffusion_rate(local_rabi: f64, collision_rate: f64, pulse_duration: f64) -> f64 {
    local_rabi * local_rabi * collision_rate * pulse_duration * pulse_duration / PI
}

/// Parameters of the diffusion model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    /// D, s⁻¹.
    pub diffusion_rate: f64,
    /// γ, s⁻¹.
    pub decay: f64,
    /// Magnitude of the local Rabi frequency χ̃_R.
    pub local_rabi: f64,
    /// κ, s⁻¹.
    pub collision_rate: f64,
    /// τ, s.
    pub pulse_duration: f64,
}

impl DiffusionParams {
    /// From the microscopic drive; D follows from the diffusion law.
    pub fn from_drive(local_rabi: f64, collision_rate: f64, pulse_duration: f64, decay: f64) -> Result<Self> {
        if !(local_rabi >= 0.0 && collision_rate >= 0.0 && pulse_duration >= 0.0 && decay >= 0.0) {
            return Err(Error::domain("diffusion inputs must be non-negative"));
        }
        Ok(Self {
            diffusion_rate: diffusion_rate(local_rabi, collision_rate, pulse_duration),
            decay,
            local_rabi: local_rabi.abs(),
            collision_rate,
            pulse_duration,
        })
    }

    /// From a target D; χ̃_R is back-computed so the diffusion law holds.
    pub fn from_rates(diffusion: f64, decay: f64, collision_rate: f64, pulse_duration: f64) -> Result<Self> {
        if !(diffusion >= 0.0 && decay >= 0.0 && collision_rate > 0.0 && pulse_duration > 0.0) {
            return Err(Error::domain("need D, γ ≥ 0 and κ, τ > 0"));
        }
        let chi = (PI * diffusion / collision_rate).sqrt() / pulse_duration;
        Ok(Self {
            diffusion_rate: diffusion,
            decay,
            local_rabi: chi,
            collision_rate,
            pulse_duration,
        })
    }

    /// Relaxation rate `ξ_n = D n(n+1) + γ` of the n-th Legendre mode.
    #[inline]
    pub fn xi(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.diffusion_rate * nf * (nf + 1.0) + self.decay
    }

    /// `ρ_ee(t → ∞) = D / (2D + γ)`.
    pub fn steady_state_population(&self) -> f64 {
        let s = 2.0 * self.diffusion_rate + self.decay;
        if s == 0.0 {
            0.0
        } else {
            self.diffusion_rate / s
        }
    }
}

/// `ρ_ee(t) = D/(2D+γ) · (1 − e^{−(2D+γ)t})`.
pub fn excited_population(params: &DiffusionParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let s = params.xi(1);
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(params.diffusion_rate / s * (-(-s * t).exp_m1()))
}

/// `⟨P_n(cos θ)⟩` at time t: `γ/ξ_n (1 − e^{−ξ_n t}) + e^{−ξ_n t}`.
fn legendre_moment(params: &DiffusionParams, n: usize, t: f64) -> f64 {
    let xi = params.xi(n);
    let e = (-xi * t).exp();
    if xi == 0.0 {
        return 1.0;
    }
    params.decay / xi * (1.0 - e) + e
}

/// Ensemble variance `⟨cos²θ⟩ − ⟨cosθ⟩²` in closed form.
pub fn cos_theta_variance(params: &DiffusionParams, t: f64) -> f64 {
    let d = params.diffusion_rate;
    let g = params.decay;
    let (s1, s2) = (2.0 * d + g, 6.0 * d + g);
    if s1 == 0.0 {
        return 0.0;
    }
    let second = 2.0 / 3.0 * (6.0 * d * (-s2 * t).exp() + g) / s2 + 1.0 / 3.0;
    let first = (g + 2.0 * d * (-s1 * t).exp()) / s1;
    second - first * first
}

/// Standard deviation of the excited population, `½ √(⟨cos²θ⟩ − ⟨cosθ⟩²)`.
pub fn population_variance(params: &DiffusionParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let v = cos_theta_variance(params, t);
    if v < -1e-12 {
        return Err(Error::numerical("bloch", format!("negative variance {v:e}")));
    }
    Ok(0.5 * v.max(0.0).sqrt())
}

/// Legendre-series representation of the spin distribution
/// `u(θ, t) = (1/2π) Σ w_n P_n(cos θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDistribution {
    pub coefficients: Vec<f64>,
    pub params: DiffusionParams,
    pub time: f64,
    /// False when the series was cut at [`MAX_N_MAX`] before the tail
    /// moment dropped below the requested tolerance.
    pub converged: bool,
}

fn coefficients(params: &DiffusionParams, t: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| (2.0 * n as f64 + 1.0) / 2.0 * legendre_moment(params, n, t))
        .collect()
}

/// Series truncated at a fixed `n_max`.
pub fn spin_distribution(params: &DiffusionParams, t: f64, n_max: usize) -> Result<SpinDistribution> {
    if n_max < 1 {
        return Err(Error::domain("N_max must be at least 1"));
    }
    if !(t >= 0.0) {
        return Err(Error::domain("time must be non-negative"));
    }
    Ok(SpinDistribution {
        coefficients: coefficients(params, t, n_max),
        params: *params,
        time: t,
        converged: true,
    })
}

/// Series whose length is doubled from [`DEFAULT_N_MAX`] until the last
/// Legendre moment `|⟨P_N⟩|` falls below `tol`.
pub fn spin_distribution_adaptive(params: &DiffusionParams, t: f64, tol: f64) -> Result<SpinDistribution> {
    let mut n = DEFAULT_N_MAX;
    loop {
        let mut dist = spin_distribution(params, t, n)?;
        let tail = legendre_moment(params, n, t).abs();
        if tail < tol {
            return Ok(dist);
        }
        if n >= MAX_N_MAX {
            dist.converged = false;
            return Ok(dist);
        }
        n *= 2;
    }
}

impl SpinDistribution {
    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `u` at `x = cos θ`.
    pub fn density(&self, x: f64) -> f64 {
        let mut p = Vec::with_capacity(self.coefficients.len());
        legendre_all(self.n_max(), x, &mut p);
        self.coefficients.iter().zip(&p).map(|(w, p)| w * p).sum::<f64>() / (2.0 * PI)
    }

    /// `⟨P_n(cos θ)⟩ = 2 w_n / (2n + 1)`.
    pub fn moment(&self, n: usize) -> f64 {
        2.0 * self.coefficients[n] / (2.0 * n as f64 + 1.0)
    }

    /// `⟨cos θ⟩ = (2/3) w_1`.
    pub fn mean_cos_theta(&self) -> f64 {
        self.moment(1)
    }

    pub fn excited_population(&self) -> f64 {
        0.5 * (1.0 - self.mean_cos_theta())
    }

    /// `P(cos θ ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let n_max = self.n_max();
        let mut p = Vec::with_capacity(n_max + 2);
        legendre_all(n_max + 1, x, &mut p);
        let mut f = self.coefficients[0] * (x + 1.0);
        for n in 1..=n_max {
            f += self.coefficients[n] * (p[n + 1] - p[n - 1]) / (2.0 * n as f64 + 1.0);
        }
        f
    }

    /// Smallest `u` on a uniform θ grid; negative values flag a series that is
    /// too short for the requested time.
    pub fn min_density(&self, n_theta: usize) -> f64 {
        (0..=n_theta)
            .map(|i| self.density((PI * i as f64 / n_theta as f64).cos()))
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the rotation angle of each Rabi pulse is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PulseAngle {
    /// Fixed `α = arccos(1 − 2D/κ)`, which reproduces the diffusion rate D
    /// exactly in the first Legendre mode.
    #[default]
    Calibrated,
    /// Fixed `α = χ̃_R τ`.
    Nominal,
    /// `α = c X` with `X ~ Exp(1)` and `c` chosen so that `E[1 − cos α] = 2D/κ`.
    Exponential,
}

/// Rotation angle for a pulse of the given kind.
fn pulse_scale(params: &DiffusionParams, kind: PulseAngle) -> Result<f64> {
    let q = if params.collision_rate > 0.0 {
        2.0 * params.diffusion_rate / params.collision_rate
    } else {
        0.0
    };
    match kind {
        PulseAngle::Nominal => Ok(params.local_rabi * params.pulse_duration),
        PulseAngle::Calibrated => {
            if q > 2.0 {
                return Err(Error::domain(format!(
                    "diffusion rate {:.3e} exceeds collision rate {:.3e}; no pulse angle reproduces it",
                    params.diffusion_rate, params.collision_rate
                )));
            }
            Ok((1.0 - q).acos())
        }
        PulseAngle::Exponential => {
            if q >= 1.0 {
                return Err(Error::domain("exponential pulse areas need 2D < κ"));
            }
            Ok((q / (1.0 - q)).sqrt())
        }
    }
}

/// Rotates `r` by `alpha` about the equatorial axis at azimuth `phi`.
#[inline]
fn rotate(r: [f64; 3], alpha: f64, phi: f64) -> [f64; 3] {
    let (sp, cp) = phi.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    let n = [cp, sp, 0.0];
    let cross = [n[1] * r[2], -n[0] * r[2], n[0] * r[1] - n[1] * r[0]];
    let dot = n[0] * r[0] + n[1] * r[1];
    let k = dot * (1.0 - ca);
    [
        r[0] * ca + cross[0] * sa + n[0] * k,
        r[1] * ca + cross[1] * sa + n[1] * k,
        r[2] * ca + cross[2] * sa,
    ]
}

const GROUND: [f64; 3] = [0.0, 0.0, 1.0];

/// Settings for [`monte_carlo_bloch`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub n_traj: usize,
    pub t_end: f64,
    /// Number of equally spaced sample times in `(0, t_end]`; `t = 0` is added.
    pub n_samples: usize,
    pub seed: u64,
    pub pulse_angle: PulseAngle,
    pub histogram_bins: usize,
    /// Up-conversion shift Ω, only used for the phase-randomisation check.
    pub upconversion: Option<f64>,
}

impl MonteCarloConfig {
    pub fn new(n_traj: usize, t_end: f64, seed: u64) -> Self {
        Self {
            n_traj,
            t_end,
            n_samples: 1,
            seed,
            pulse_angle: PulseAngle::Calibrated,
            histogram_bins: 50,
            upconversion: None,
        }
    }
}

/// Ensemble statistics of the Monte-Carlo simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub times: Vec<f64>,
    pub mean_excited: Vec<f64>,
    /// Standard error of `mean_excited`.
    pub mean_stderr: Vec<f64>,
    /// Ensemble standard deviation of the excited population, `½ std(cos θ)`.
    pub std_excited: Vec<f64>,
    /// Ensemble variance of `cos θ` and its standard error.
    pub cos_variance: Vec<f64>,
    pub cos_variance_stderr: Vec<f64>,
    /// `cos θ` of every trajectory at `t_end`, in trajectory order.
    pub final_cos_theta: Vec<f64>,
    /// Counts of `final_cos_theta` on equal bins over [-1, 1].
    pub histogram: Vec<u64>,
    /// False when `Ω τ_κ ≤ 1`, i.e. phases are not randomised between pulses.
    pub phase_randomised: bool,
}

/// One stored Bloch trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub vectors: Vec<[f64; 3]>,
    pub seed: u64,
}

fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Stepper {
    total_rate: f64,
    decay_fraction: f64,
    alpha: f64,
    kind: PulseAngle,
}

impl Stepper {
    fn new(params: &DiffusionParams, kind: PulseAngle) -> Result<Self> {
        let total_rate = params.collision_rate + params.decay;
        Ok(Self {
            total_rate,
            decay_fraction: if total_rate > 0.0 { params.decay / total_rate } else { 0.0 },
            alpha: pulse_scale(params, kind)?,
            kind,
        })
    }

    #[inline]
    fn wait<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.total_rate == 0.0 {
            return f64::INFINITY;
        }
        let u: f64 = rng.random();
        -(1.0 - u).ln() / self.total_rate
    }

    #[inline]
    fn event<R: Rng>(&self, rng: &mut R, r: [f64; 3]) -> [f64; 3] {
        let u: f64 = rng.random();
        if u < self.decay_fraction {
            return GROUND;
        }
        let alpha = match self.kind {
            PulseAngle::Exponential => {
                let x: f64 = rng.random();
                -self.alpha * (1.0 - x).ln()
            }
            _ => self.alpha,
        };
        let phi = 2.0 * PI * rng.random::<f64>();
        rotate(r, alpha, phi)
    }
}

/// A single trajectory recorded at every pulse or decay event up to `t_end`.
pub fn bloch_trajectory(
    params: &DiffusionParams,
    t_end: f64,
    seed: u64,
    index: u64,
    kind: PulseAngle,
) -> Result<BlochTrajectory> {
    let stepper = Stepper::new(params, kind)?;
    let mut rng = trajectory_rng(seed, index);
    let mut t = 0.0;
    let mut r = GROUND;
    let mut out = BlochTrajectory {
        times: vec![0.0],
        vectors: vec![r],
        seed,
    };
    loop {
        t += stepper.wait(&mut rng);
        if t > t_end {
            break;
        }
        r = stepper.event(&mut rng, r);
        out.times.push(t);
        out.vectors.push(r);
    }
    Ok(out)
}

/// Power sums of `z` per sample time.
#[derive(Clone)]
struct Moments {
    s: Vec<[f64; 4]>,
}

impl Moments {
    fn new(n: usize) -> Self {
        Self { s: vec![[0.0; 4]; n] }
    }

    fn add(&mut self, k: usize, z: f64) {
        let z2 = z * z;
        let m = &mut self.s[k];
        m[0] += z;
        m[1] += z2;
        m[2] += z2 * z;
        m[3] += z2 * z2;
    }

    fn merge(&mut self, other: &Moments) {
        for (a, b) in self.s.iter_mut().zip(&other.s) {
            for i in 0..4 {
                a[i] += b[i];
            }
        }
    }
}

const CHUNK: usize = 1024;

/// Monte-Carlo ensemble of Bloch-vector random walks.
///
/// Pulses arrive as a Poisson process at rate κ, each rotating the Bloch
/// vector about an equatorial axis of uniformly random azimuth. Spontaneous
/// decay resets the vector to the ground state at rate γ. Every trajectory
/// has its own random stream, so the result depends only on the seed.
pub fn monte_carlo_bloch(params: &DiffusionParams, cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    if cfg.n_traj == 0 {
        return Err(Error::domain("need at least one trajectory"));
    }
    if !(cfg.t_end > 0.0) || cfg.n_samples == 0 {
        return Err(Error::domain("t_end must be positive and at least one sample requested"));
    }
    let stepper = Stepper::new(params, cfg.pulse_angle)?;
    let ns = cfg.n_samples;
    let times: Vec<f64> = (0..=ns).map(|i| cfg.t_end * i as f64 / ns as f64).collect();

    let chunks: Vec<(Moments, Vec<f64>)> = (0..cfg.n_traj.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.n_traj);
            let mut mom = Moments::new(times.len());
            let mut finals = Vec::with_capacity(hi - lo);
            for idx in lo..hi {
                let mut rng = trajectory_rng(cfg.seed, idx as u64);
                let mut r = GROUND;
                let mut next = stepper.wait(&mut rng);
                for (k, &ts) in times.iter().enumerate() {
                    while next <= ts {
                        r = stepper.event(&mut rng, r);
                        next += stepper.wait(&mut rng);
                    }
                    mom.add(k, r[2]);
                }
                finals.push(r[2]);
            }
            (mom, finals)
        })
        .collect();

    let mut total = Moments::new(times.len());
    let mut final_cos_theta = Vec::with_capacity(cfg.n_traj);
    for (m, f) in &chunks {
        total.merge(m);
        final_cos_theta.extend_from_slice(f);
    }

    let n = cfg.n_traj as f64;
    let mut res = MonteCarloResult {
        times: times.clone(),
        mean_excited: Vec::with_capacity(times.len()),
        mean_stderr: Vec::with_capacity(times.len()),
        std_excited: Vec::with_capacity(times.len()),
        cos_variance: Vec::with_capacity(times.len()),
        cos_variance_stderr: Vec::with_capacity(times.len()),
        final_cos_theta,
        histogram: vec![0; cfg.histogram_bins.max(1)],
        phase_randomised: cfg
            .upconversion
            .map(|omega| params.collision_rate == 0.0 || omega / params.collision_rate > 1.0)
            .unwrap_or(true),
    };
    for m in &total.s {
        let (e1, e2, e3, e4) = (m[0] / n, m[1] / n, m[2] / n, m[3] / n);
        let var = (e2 - e1 * e1).max(0.0);
        let m4 = e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1.powi(4);
        let var_unbiased = if n > 1.0 { var * n / (n - 1.0) } else { 0.0 };
        res.mean_excited.push(0.5 * (1.0 - e1));
        res.mean_stderr.push(0.5 * (var_unbiased / n).sqrt());
        res.std_excited.push(0.5 * var_unbiased.sqrt());
        res.cos_variance.push(var_unbiased);
        res.cos_variance_stderr.push(((m4 - var * var).max(0.0) / n).sqrt());
    }
    let bins = res.histogram.len();
    for &z in &res.final_cos_theta {
        let b = (((z + 1.0) * 0.5 * bins as f64) as usize).min(bins - 1);
        res.histogram[b] += 1;
    }
    Ok(res)
}

/// Kolmogorov–Smirnov distance between samples and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}
