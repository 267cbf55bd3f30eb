//! Laser-driven head-on collision on coupled ground/excited curves.
//!
//! Radial amplitudes `ξ_g, ξ_e` obey
//! `i ξ̇_g = −(ħ/2μ) ξ_g'' + U_g ξ_g + (χ_R/2) ξ_e` and
//! `i ξ̇_e = −(ħ/2μ) ξ_e'' + (U_e − ω_L) ξ_e + (χ_R/2) ξ_g` (energies in rad/s),
//! propagated by Strang splitting: an exact 2×2 potential/coupling step and an
//! exact kinetic step in the sine basis (hard walls at both grid ends).

mod dst;
mod spectrum;

pub use spectrum::{discrete_spectrum, morse_levels};

use crate::constants::{thz, ANGSTROM, FEMTOSECOND, HBAR, K_B, PICOSECOND};
use crate::error::{Error, Result};
use crate::model::{rb_ar, MorsePotential};
use dst::Dst1;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Uniform radial grid; unknowns live on the `intervals − 1` interior points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub intervals: usize,
}

impl SpatialGrid {
    pub fn new(r_min: f64, r_max: f64, intervals: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::config("grid needs 0 < r_min < r_max"));
        }
        if intervals < 16 {
            return Err(Error::config("grid needs at least 16 intervals"));
        }
        Ok(Self { r_min, r_max, intervals })
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.intervals as f64
    }

    pub fn n_points(&self) -> usize {
        self.intervals - 1
    }

    /// Position of interior point `i` (`0 ≤ i < n_points`).
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.r_min + (i + 1) as f64 * self.dr()
    }
}

/// A potential curve in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Flat(f64),
    Morse(MorsePotential),
}

impl Curve {
    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        match self {
            Curve::Flat(v) => *v,
            Curve::Morse(m) => m.at(r),
        }
    }

    fn depth(&self) -> f64 {
        match self {
            Curve::Flat(_) => 0.0,
            Curve::Morse(m) => m.depth,
        }
    }
}

/// Incoming Gaussian: width parameter Γ, centre r₀, wavenumber k₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet {
    pub width: f64,
    pub center: f64,
    pub wavenumber: f64,
}

impl Packet {
    /// `ħ²k₀²/2μ = (3/2) k_B T`, with `Γ = spread·k₀`.
    pub fn thermal(temperature: f64, reduced_mass: f64, spread: f64, center: f64) -> Result<Self> {
        if !(temperature > 0.0 && reduced_mass > 0.0 && spread > 0.0) {
            return Err(Error::domain("temperature, mass and spread must be positive"));
        }
        let k0 = (3.0 * reduced_mass * K_B * temperature).sqrt() / HBAR;
        Ok(Self {
            width: spread * k0,
            center,
            wavenumber: k0,
        })
    }

    /// Position spread `1/(√2 Γ)` at `t = 0`.
    pub fn sigma(&self) -> f64 {
        1.0 / (2f64.sqrt() * self.width)
    }

    /// Free-particle width `σ(t) = σ₀ √(1 + (ħΓ²t/μ)²)`.
    pub fn free_sigma(&self, reduced_mass: f64, t: f64) -> f64 {
        let s = HBAR * self.width * self.width * t / reduced_mass;
        self.sigma() * (1.0 + s * s).sqrt()
    }

    pub fn group_velocity(&self, reduced_mass: f64) -> f64 {
        HBAR * self.wavenumber / reduced_mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Hard wall at `r_max`.
    Reflective,
    /// Smooth mask over the outer `width` metres; the removed norm is
    /// accounted as absorbed.
    Absorbing { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionConfig {
    pub ground: Curve,
    pub excited: Curve,
    pub reduced_mass: f64,
    /// ω₀; the excited curve in the rotating frame is `U_e − ω₀ + detuning`.
    pub bare_transition: f64,
    /// ω₀ − ω_L.
    pub detuning: f64,
    /// Bare Rabi frequency χ_R.
    pub rabi: f64,
    pub grid: SpatialGrid,
    pub packet: Packet,
    pub dt: f64,
    pub duration: f64,
    /// Observables are recorded every this many steps.
    pub sample_every: usize,
    /// Densities are stored every this many steps.
    pub snapshot_every: Option<usize>,
    pub boundary: Boundary,
    pub track_energy: bool,
}

/// Bare Rabi frequency used by default for the collision run, rad/s.
pub const DEFAULT_RABI: f64 = 2.0 * PI * 4.0e9;

impl CollisionConfig {
    /// Rb-Ar head-on collision at temperature `T`: r ∈ [1, 200] Å on 2¹²
    /// intervals, Γ = 0.02 k₀, r₀ = 30 Å, detuning 2π×5.2 THz, dt = 0.1 fs.
    pub fn rb_ar(temperature: f64) -> Result<Self> {
        let mu = rb_ar::REDUCED_MASS;
        let packet = Packet::thermal(temperature, mu, 0.02, 30.0 * ANGSTROM)?;
        // time for the round trip r₀ → wall → r₀ plus margin
        let v = packet.group_velocity(mu);
        let duration = (2.0 * 27.0 * ANGSTROM / v + 3.7 * PICOSECOND).max(4.0 * PICOSECOND);
        Ok(Self {
            ground: Curve::Morse(rb_ar::ground_potential()),
            excited: Curve::Morse(rb_ar::excited_potential()),
            reduced_mass: mu,
            bare_transition: rb_ar::bare_transition(),
            detuning: thz(5.2),
            rabi: DEFAULT_RABI,
            grid: SpatialGrid::new(1.0 * ANGSTROM, 200.0 * ANGSTROM, 1 << 12)?,
            packet,
            dt: 0.1 * FEMTOSECOND,
            duration,
            sample_every: 50,
            snapshot_every: None,
            boundary: Boundary::Reflective,
            track_energy: false,
        })
    }

    pub fn with_rabi(mut self, rabi: f64) -> Self {
        self.rabi = rabi;
        self
    }

    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    fn ground_v(&self, r: f64) -> f64 {
        self.ground.at(r)
    }

    fn excited_v(&self, r: f64) -> f64 {
        self.excited.at(r) - self.bare_transition + self.detuning
    }
}

/// `ξ_g, ξ_e` on the interior grid points at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoChannelWavefunction {
    pub grid: SpatialGrid,
    pub ground: Vec<Complex64>,
    pub excited: Vec<Complex64>,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Ground,
    Excited,
}

impl TwoChannelWavefunction {
    fn amplitudes(&self, c: Channel) -> &[Complex64] {
        match c {
            Channel::Ground => &self.ground,
            Channel::Excited => &self.excited,
        }
    }

    pub fn channel_norm(&self, c: Channel) -> f64 {
        self.amplitudes(c).iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dr()
    }

    pub fn norm(&self) -> f64 {
        self.channel_norm(Channel::Ground) + self.channel_norm(Channel::Excited)
    }

    /// Channel-normalised `⟨r⟩`; `None` when the channel holds at most 1e-12
    /// of the total norm (the excited channel of an undriven run).
    pub fn mean_r(&self, c: Channel) -> Option<f64> {
        let w = self.channel_norm(c);
        if !(w > 1e-12 * self.norm()) || w == 0.0 {
            return None;
        }
        let s: f64 = self.amplitudes(c).iter().enumerate().map(|(i, z)| self.grid.r(i) * z.norm_sqr()).sum();
        Some(s * self.grid.dr() / w)
    }

    /// Channel-normalised position spread.
    pub fn width(&self, c: Channel) -> Option<f64> {
        let mean = self.mean_r(c)?;
        let w = self.channel_norm(c);
        let s: f64 = self
            .amplitudes(c)
            .iter()
            .enumerate()
            .map(|(i, z)| (self.grid.r(i) - mean).powi(2) * z.norm_sqr())
            .sum();
        Some((s * self.grid.dr() / w).sqrt())
    }

    /// Channel-normalised `⟨p⟩`, evaluated spectrally (the packet must be
    /// away from the grid ends).
    pub fn mean_momentum(&self, c: Channel) -> Option<f64> {
        let amp = self.amplitudes(c);
        let n = amp.len();
        let mut buf = amp.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let dk = 2.0 * PI / (n as f64 * self.grid.dr());
        let (mut num, mut den) = (0.0, 0.0);
        for (m, z) in buf.iter().enumerate() {
            let idx = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
            num += idx * dk * z.norm_sqr();
            den += z.norm_sqr();
        }
        (den > 0.0).then(|| HBAR * num / den)
    }

    /// `⟨r|ξ⟩` overlap with a real function sampled on the grid.
    pub fn overlap(&self, c: Channel, f: &[f64]) -> Complex64 {
        self.amplitudes(c).iter().zip(f).map(|(z, v)| z * v).sum::<Complex64>() * self.grid.dr()
    }
}

/// Incoming packet on the ground curve,
/// `ξ_g = √(Γ/√π) e^{−Γ²(r−r₀)²/2} e^{−ik₀(r−r₀)}`, normalised on the grid.
pub fn gaussian_packet(config: &CollisionConfig) -> Result<TwoChannelWavefunction> {
    let grid = config.grid;
    let p = config.packet;
    let scale = config.ground.depth().max(config.excited.depth());
    let asymptote = config.ground_v(grid.r_max);
    if scale > 0.0 && (config.ground_v(p.center) - asymptote).abs() >= 1e-3 * scale {
        return Err(Error::config(format!(
            "packet centre {:.3e} m is not in the flat asymptotic region of the ground curve",
            p.center
        )));
    }
    let tail = |r: f64| (-(p.width * (r - p.center)).powi(2)).exp();
    if tail(grid.r_min) > 1e-10 || tail(grid.r_max) > 1e-10 {
        return Err(Error::config("packet tail reaches the grid edge above 1e-10 of its peak"));
    }
    let amp = (p.width / PI.sqrt()).sqrt();
    let mut ground: Vec<Complex64> = (0..grid.n_points())
        .map(|i| {
            let x = grid.r(i) - p.center;
            Complex64::from_polar(amp * (-0.5 * (p.width * x).powi(2)).exp(), -p.wavenumber * x)
        })
        .collect();
    let norm: f64 = ground.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dr();
    let s = 1.0 / norm.sqrt();
    ground.iter_mut().for_each(|z| *z *= s);
    Ok(TwoChannelWavefunction {
        grid,
        excited: vec![Complex64::default(); ground.len()],
        ground,
        time: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub ground_norm: f64,
    pub excited_norm: f64,
    pub mean_r_ground: Option<f64>,
    pub mean_r_excited: Option<f64>,
    /// `⟨H⟩` in rad/s when energy tracking is on.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub ground_density: Vec<f64>,
    pub excited_density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: TwoChannelWavefunction,
    pub absorbed_norm: f64,
    /// Largest `|norm + absorbed − 1|` seen at the sample points.
    pub max_norm_drift: f64,
}

/// Norm drift that aborts a run.
pub const NORM_TOLERANCE: f64 = 1e-6;

struct Propagator {
    dst: Dst1,
    kinetic: Vec<Complex64>,
    energies: Vec<f64>,
    u11: Vec<Complex64>,
    u12: Vec<Complex64>,
    u22: Vec<Complex64>,
    mask: Option<Vec<f64>>,
    vg: Vec<f64>,
    ve: Vec<f64>,
    coupling: f64,
    intervals: usize,
}

impl Propagator {
    fn new(config: &CollisionConfig) -> Self {
        let grid = config.grid;
        let n = grid.intervals;
        let length = grid.r_max - grid.r_min;
        let energies: Vec<f64> = (1..n)
            .map(|k| {
                let kk = PI * k as f64 / length;
                HBAR * kk * kk / (2.0 * config.reduced_mass)
            })
            .collect();
        let kinetic = energies.iter().map(|e| Complex64::from_polar(1.0, -e * config.dt)).collect();
        let vg: Vec<f64> = (0..grid.n_points()).map(|i| config.ground_v(grid.r(i))).collect();
        let ve: Vec<f64> = (0..grid.n_points()).map(|i| config.excited_v(grid.r(i))).collect();
        let c = 0.5 * config.rabi;
        let tau = 0.5 * config.dt;
        let (mut u11, mut u12, mut u22) = (Vec::new(), Vec::new(), Vec::new());
        for (g, e) in vg.iter().zip(&ve) {
            let m = 0.5 * (g + e);
            let d = 0.5 * (g - e);
            let w = (d * d + c * c).sqrt();
            let co = (w * tau).cos();
            let si = if w * tau == 0.0 { tau } else { (w * tau).sin() / w };
            let ph = Complex64::from_polar(1.0, -m * tau);
            u11.push(ph * Complex64::new(co, -si * d));
            u22.push(ph * Complex64::new(co, si * d));
            u12.push(ph * Complex64::new(0.0, -si * c));
        }
        let mask = match config.boundary {
            Boundary::Reflective => None,
            Boundary::Absorbing { width } => Some(
                (0..grid.n_points())
                    .map(|i| {
                        let x = (grid.r(i) - (grid.r_max - width)) / width;
                        if x <= 0.0 {
                            1.0
                        } else {
                            (0.5 * PI * x.min(1.0)).cos().max(0.0).powf(0.125)
                        }
                    })
                    .collect(),
            ),
        };
        Self {
            dst: Dst1::new(n),
            kinetic,
            energies,
            u11,
            u12,
            u22,
            mask,
            vg,
            ve,
            coupling: c,
            intervals: n,
        }
    }

    fn potential_half(&self, s: &mut TwoChannelWavefunction) {
        for i in 0..s.ground.len() {
            let (g, e) = (s.ground[i], s.excited[i]);
            s.ground[i] = self.u11[i] * g + self.u12[i] * e;
            s.excited[i] = self.u12[i] * g + self.u22[i] * e;
        }
    }

    fn kinetic_full(&mut self, x: &mut [Complex64]) {
        if x.iter().all(|z| *z == Complex64::default()) {
            return;
        }
        self.dst.apply(x);
        let scale = 2.0 / self.intervals as f64;
        for (z, k) in x.iter_mut().zip(&self.kinetic) {
            *z *= k * scale;
        }
        self.dst.apply(x);
    }

    fn step(&mut self, s: &mut TwoChannelWavefunction) {
        self.potential_half(s);
        self.kinetic_full(&mut s.ground);
        self.kinetic_full(&mut s.excited);
        self.potential_half(s);
    }

    fn kinetic_energy(&mut self, x: &[Complex64], dr: f64) -> f64 {
        let mut y = x.to_vec();
        self.dst.apply(&mut y);
        let scale = 2.0 / self.intervals as f64;
        y.iter().zip(&self.energies).map(|(z, e)| e * z.norm_sqr()).sum::<f64>() * scale * dr
    }

    fn energy(&mut self, s: &TwoChannelWavefunction) -> f64 {
        let dr = s.grid.dr();
        let mut h = self.kinetic_energy(&s.ground, dr) + self.kinetic_energy(&s.excited, dr);
        for i in 0..s.ground.len() {
            h += dr
                * (self.vg[i] * s.ground[i].norm_sqr()
                    + self.ve[i] * s.excited[i].norm_sqr()
                    + 2.0 * self.coupling * (s.ground[i].conj() * s.excited[i]).re);
        }
        h
    }
}

/// `⟨H⟩` in rad/s, total over both channels.
pub fn energy(state: &TwoChannelWavefunction, config: &CollisionConfig) -> f64 {
    Propagator::new(config).energy(state)
}

/// Propagates `state` by `n_steps` steps of `config.dt`.
pub fn evolve(state: TwoChannelWavefunction, config: &CollisionConfig, n_steps: usize) -> Result<Trajectory> {
    if state.grid != config.grid {
        return Err(Error::config("state and configuration grids differ"));
    }
    if !(config.dt > 0.0) || config.sample_every == 0 {
        return Err(Error::config("need dt > 0 and sample_every ≥ 1"));
    }
    let mut prop = Propagator::new(config);
    let mut s = state;
    let t0 = s.time;
    let reference = s.norm();
    let mut absorbed = 0.0;
    let mut out = Trajectory {
        samples: Vec::new(),
        snapshots: Vec::new(),
        final_state: s.clone(),
        absorbed_norm: 0.0,
        max_norm_drift: 0.0,
    };
    for step in 0..=n_steps {
        if step > 0 {
            prop.step(&mut s);
            s.time = t0 + step as f64 * config.dt;
            if let Some(mask) = &prop.mask {
                let before = s.norm();
                for (i, m) in mask.iter().enumerate() {
                    s.ground[i] *= *m;
                    s.excited[i] *= *m;
                }
                absorbed += before - s.norm();
            }
        }
        if step % config.sample_every == 0 || step == n_steps {
            let drift = (s.norm() + absorbed - reference).abs();
            out.max_norm_drift = out.max_norm_drift.max(drift);
            if drift > NORM_TOLERANCE {
                return Err(Error::numerical(
                    "wavepacket",
                    format!(
                        "norm drifted by {drift:.2e} at t = {:.3e} s; reduce dt (now {:.2e} s) or refine the grid",
                        s.time, config.dt
                    ),
                ));
            }
            out.samples.push(Sample {
                time: s.time,
                ground_norm: s.channel_norm(Channel::Ground),
                excited_norm: s.channel_norm(Channel::Excited),
                mean_r_ground: s.mean_r(Channel::Ground),
                mean_r_excited: s.mean_r(Channel::Excited),
                energy: config.track_energy.then(|| prop.energy(&s)),
            });
        }
        if let Some(every) = config.snapshot_every {
            if every > 0 && (step % every == 0 || step == n_steps) {
                out.snapshots.push(Snapshot {
                    time: s.time,
                    ground_density: s.ground.iter().map(|z| z.norm_sqr()).collect(),
                    excited_density: s.excited.iter().map(|z| z.norm_sqr()).collect(),
                });
            }
        }
    }
    out.absorbed_norm = absorbed;
    out.final_state = s;
    Ok(out)
}

/// Packet preparation plus a full run of `config.duration`.
pub fn run_collision(config: &CollisionConfig) -> Result<Trajectory> {
    let s = gaussian_packet(config)?;
    evolve(s, config, config.n_steps())
}

/// Channel-normalised `(⟨r⟩_g, ⟨r⟩_e)`; an empty channel is `None`.
pub fn expectation_separation(state: &TwoChannelWavefunction) -> (Option<f64>, Option<f64>) {
    (state.mean_r(Channel::Ground), state.mean_r(Channel::Excited))
}

/// `(t, P_e(t))` at the sample points.
pub fn excited_population_trace(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.samples.iter().map(|s| (s.time, s.excited_norm)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionWindow {
    pub start: f64,
    pub end: f64,
    pub peak_time: f64,
    pub peak_rate: f64,
}

impl AbsorptionWindow {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// The contiguous interval around the peak of `dP_e/dt` where the rate
/// exceeds `threshold` times its peak, with linearly interpolated edges.
pub fn absorption_window(traj: &Trajectory, threshold: f64) -> Option<AbsorptionWindow> {
    let tr = excited_population_trace(traj);
    if tr.len() < 3 {
        return None;
    }
    let n = tr.len();
    let rate: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (tr[b].1 - tr[a].1) / (tr[b].0 - tr[a].0)
        })
        .collect();
    let (ip, &peak) = rate.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(peak > 0.0) {
        return None;
    }
    let thr = threshold * peak;
    let edge = |i: usize, j: usize| {
        // rate crosses thr between samples i (above) and j (below)
        let f = (rate[i] - thr) / (rate[i] - rate[j]);
        tr[i].0 + f * (tr[j].0 - tr[i].0)
    };
    let mut i0 = ip;
    while i0 > 0 && rate[i0 - 1] > thr {
        i0 -= 1;
    }
    let mut i1 = ip;
    while i1 + 1 < n && rate[i1 + 1] > thr {
        i1 += 1;
    }
    let start = if i0 > 0 { edge(i0, i0 - 1) } else { tr[0].0 };
    let end = if i1 + 1 < n { edge(i1, i1 + 1) } else { tr[n - 1].0 };
    Some(AbsorptionWindow {
        start,
        end,
        peak_time: tr[ip].0,
        peak_rate: peak,
    })
}

/// Duration τ of the absorption window; `None` without a resonant crossing.
pub fn absorption_time(traj: &Trajectory, threshold: f64) -> Option<f64> {
    absorption_window(traj, threshold).map(|w| w.duration())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub mean: f64,
    /// Half the peak-to-peak excursion relative to the mean (off-resonant
    /// ripple plus any residual drift).
    pub ripple: f64,
    /// Relative change of the mean between the two halves of the window.
    pub drift: f64,
}

/// `P_e` statistics over the last `tail` fraction of the samples.
pub fn excited_plateau(traj: &Trajectory, tail: f64) -> Option<Plateau> {
    let n = traj.samples.len();
    let k = ((n as f64 * tail).ceil() as usize).min(n);
    if k < 4 {
        return None;
    }
    let xs: Vec<f64> = traj.samples[n - k..].iter().map(|s| s.excited_norm).collect();
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mean = avg(&xs);
    if !(mean > 0.0) {
        return None;
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let (first, second) = xs.split_at(k / 2);
    Some(Plateau {
        mean,
        ripple: 0.5 * (hi - lo) / mean,
        drift: (avg(second) - avg(first)).abs() / mean,
    })
}

/// Least-squares `d⟨r⟩/dt` of both channels over the last `tail` fraction of
/// the run.
pub fn outgoing_slopes(traj: &Trajectory, tail: f64) -> Option<(f64, f64)> {
    let n = traj.samples.len();
    let k = ((n as f64 * tail).ceil() as usize).min(n);
    let pts = &traj.samples[n - k..];
    let fit = |f: &dyn Fn(&Sample) -> Option<f64>| -> Option<f64> {
        let xy: Vec<(f64, f64)> = pts.iter().filter_map(|s| f(s).map(|y| (s.time, y))).collect();
        if xy.len() < 3 {
            return None;
        }
        let m = xy.len() as f64;
        let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
        let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    Some((fit(&|s| s.mean_r_ground)?, fit(&|s| s.mean_r_excited)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FranckCondon {
    pub value: f64,
    pub uncertainty: f64,
}

/// Largest plateau population treated as perturbative.
pub const PERTURBATIVE_LIMIT: f64 = 1e-2;

/// Effective-to-bare coupling ratio from the excited plateau.
///
/// A bare coupling χ_R acting resonantly for the interaction time τ
/// transfers `sin²(χ_R τ/2)`; inverting for the observed plateau gives
/// `f = 2 asin(√P_e) / (χ_R τ)`. The uncertainty is half the relative
/// plateau ripple plus drift (f ∝ √P_e).
pub fn franck_condon_reduction(plateau: &Plateau, rabi: f64, interaction_time: f64) -> Result<FranckCondon> {
    let p = plateau.mean;
    let spread = plateau.ripple + plateau.drift;
    if !(rabi > 0.0 && interaction_time > 0.0) {
        return Err(Error::domain("need χ_R > 0 and τ > 0"));
    }
    if !(p >= 0.0) || p > PERTURBATIVE_LIMIT {
        return Err(Error::domain(format!(
            "excited plateau {p:.3e} is outside the perturbative regime (≤ {PERTURBATIVE_LIMIT})"
        )));
    }
    let value = 2.0 * p.sqrt().asin() / (rabi * interaction_time);
    Ok(FranckCondon {
        value,
        uncertainty: 0.5 * spread * value,
    })
}

/// `p = exp(−π|χ̃_R|² / (2 ∂_a U_g v))`.
pub fn landau_zener_parameter(rabi: f64, slope: f64, velocity: f64) -> Result<f64> {
    let sv = slope * velocity;
    if !(sv > 0.0) {
        return Err(Error::domain("Landau-Zener parameter needs a positive slope × velocity"));
    }
    Ok((-PI * rabi * rabi / (2.0 * sv)).exp())
}

/// Classical inner turning point of the ground curve for the mean packet
/// energy `ħ²k₀²/2μ` above its asymptote.
pub fn classical_turning_point(config: &CollisionConfig) -> Option<f64> {
    let e = HBAR * config.packet.wavenumber.powi(2) / (2.0 * config.reduced_mass);
    match config.ground {
        Curve::Morse(m) => m.inner_turning_point(m.asymptote() + e),
        Curve::Flat(_) => None,
    }
}

/// Local Rabi frequency in the Landau–Zener sense for a field amplitude.
pub fn rabi_from_field(dipole: f64, field: f64) -> f64 {
    dipole * field / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_config() -> CollisionConfig {
        let mu = rb_ar::REDUCED_MASS;
        CollisionConfig {
            ground: Curve::Flat(0.0),
            excited: Curve::Flat(0.0),
            reduced_mass: mu,
            bare_transition: 0.0,
            detuning: 0.0,
            rabi: 0.0,
            grid: SpatialGrid::new(1.0 * ANGSTROM, 200.0 * ANGSTROM, 1 << 12).unwrap(),
            packet: Packet::thermal(300.0, mu, 0.02, 160.0 * ANGSTROM).unwrap(),
            dt: 10.0 * FEMTOSECOND,
            duration: 20.0 * PICOSECOND,
            sample_every: 100,
            snapshot_every: None,
            boundary: Boundary::Reflective,
            track_energy: false,
        }
    }

    #[test]
    fn thermal_wavenumber() {
        let p = Packet::thermal(300.0, rb_ar::REDUCED_MASS, 0.02, 30.0 * ANGSTROM).unwrap();
        let oracle = (3.0 * 4.5112e-26 * 1.380649e-23 * 300.0f64).sqrt() / 1.054571817e-34;
        assert!((p.wavenumber / oracle - 1.0).abs() < 1e-12);
        assert!((p.wavenumber / 2.245e11 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn initial_packet_properties() {
        let c = CollisionConfig::rb_ar(300.0).unwrap();
        let s = gaussian_packet(&c).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.mean_r(Channel::Ground).unwrap() / c.packet.center - 1.0).abs() < 1e-9);
        assert_eq!(s.mean_r(Channel::Excited), None);
        let p = s.mean_momentum(Channel::Ground).unwrap();
        assert!((p / (-HBAR * c.packet.wavenumber) - 1.0).abs() < 1e-6, "{p}");
    }

    #[test]
    fn packet_at_grid_edge_rejected() {
        let mut c = CollisionConfig::rb_ar(300.0).unwrap();
        c.packet.center = 198.0 * ANGSTROM;
        assert!(matches!(gaussian_packet(&c), Err(Error::Config(_))));
        let mut c = CollisionConfig::rb_ar(300.0).unwrap();
        c.packet.center = 6.0 * ANGSTROM;
        assert!(matches!(gaussian_packet(&c), Err(Error::Config(_))));
    }

    #[test]
    fn free_packet_spreads_analytically() {
        let c = free_config();
        let mut s = gaussian_packet(&c).unwrap();
        let v = c.packet.group_velocity(c.reduced_mass);
        for _ in 0..4 {
            let traj = evolve(s, &c, c.n_steps() / 4).unwrap();
            s = traj.final_state;
            let w = s.width(Channel::Ground).unwrap();
            let exact = c.packet.free_sigma(c.reduced_mass, s.time);
            assert!((w / exact - 1.0).abs() < 1e-3, "t = {:e}: {w:e} vs {exact:e}", s.time);
            let r = s.mean_r(Channel::Ground).unwrap();
            assert!((r - (c.packet.center - v * s.time)).abs() < 1e-3 * ANGSTROM);
        }
        assert!(s.width(Channel::Ground).unwrap() > 1.3 * c.packet.sigma());
    }

    #[test]
    fn degenerate_channels_give_full_overlap() {
        // identical curves and constant coupling: P_e = sin²(χ t / 2)
        let mut c = free_config();
        c.rabi = 2.0 * PI * 5e9;
        c.duration = 2.0 * PICOSECOND;
        let traj = run_collision(&c).unwrap();
        let t = traj.final_state.time;
        let p = traj.final_state.channel_norm(Channel::Excited);
        assert!((p - (0.5 * c.rabi * t).sin().powi(2)).abs() < 1e-12);
        let pl = Plateau { mean: p, ripple: 0.0, drift: 0.0 };
        let f = franck_condon_reduction(&pl, c.rabi, t).unwrap();
        assert!((f.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn undriven_run_stays_in_ground_channel() {
        let mut c = CollisionConfig::rb_ar(300.0).unwrap();
        c.rabi = 0.0;
        c.grid = SpatialGrid::new(1.0 * ANGSTROM, 60.0 * ANGSTROM, 1 << 11).unwrap();
        c.packet.center = 20.0 * ANGSTROM;
        c.dt = 0.2 * FEMTOSECOND;
        c.duration = 7.0 * PICOSECOND;
        c.track_energy = true;
        let traj = run_collision(&c).unwrap();
        assert!(excited_population_trace(&traj).iter().all(|&(_, p)| p == 0.0));
        assert!(traj.max_norm_drift < 1e-10);
        let e0 = traj.samples[0].energy.unwrap();
        let e1 = traj.samples.last().unwrap().energy.unwrap();
        assert!(((e1 - e0) / e0).abs() < 1e-6);
    }

    #[test]
    fn absorbing_boundary_accounts_for_lost_norm() {
        let mut c = free_config();
        c.packet.center = 150.0 * ANGSTROM;
        c.packet.wavenumber = -c.packet.wavenumber; // outgoing
        c.boundary = Boundary::Absorbing { width: 20.0 * ANGSTROM };
        c.duration = 15.0 * PICOSECOND;
        let traj = run_collision(&c).unwrap();
        assert!(traj.absorbed_norm > 0.9);
        assert!(traj.max_norm_drift < 1e-9);
    }

    #[test]
    fn lowest_morse_levels_on_the_propagation_basis() {
        let g = rb_ar::ground_potential();
        let grid = SpatialGrid::new(1.0 * ANGSTROM, 25.0 * ANGSTROM, 600).unwrap();
        let (num, vecs) = discrete_spectrum(|r| g.at(r), rb_ar::REDUCED_MASS, &grid, 5).unwrap();
        let exact = morse_levels(&g, rb_ar::REDUCED_MASS, 5);
        for (a, b) in num.iter().zip(&exact) {
            let above_bottom = a - g.offset;
            assert!((above_bottom / b - 1.0).abs() < 1e-4, "{above_bottom} vs {b}");
        }
        // eigenvectors are orthonormal on the grid
        let dr = grid.dr();
        for i in 0..5 {
            for j in 0..5 {
                let o: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum::<f64>() * dr;
                assert!((o - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bound_state_projection_is_stationary() {
        let g = rb_ar::ground_potential();
        let grid = SpatialGrid::new(1.0 * ANGSTROM, 25.0 * ANGSTROM, 600).unwrap();
        let (_, vecs) = discrete_spectrum(|r| g.at(r), rb_ar::REDUCED_MASS, &grid, 3).unwrap();
        let mut c = free_config();
        c.ground = Curve::Morse(g);
        c.grid = grid;
        c.dt = 0.2 * FEMTOSECOND;
        c.sample_every = 1000;
        // equal superposition of the two lowest levels
        let amp: Vec<Complex64> = vecs[0]
            .iter()
            .zip(&vecs[1])
            .map(|(a, b)| Complex64::new((a + b) / 2f64.sqrt(), 0.0))
            .collect();
        let s = TwoChannelWavefunction {
            grid,
            excited: vec![Complex64::default(); amp.len()],
            ground: amp,
            time: 0.0,
        };
        let traj = evolve(s, &c, 5000).unwrap();
        let f = &traj.final_state;
        for v in &vecs[..2] {
            assert!((f.overlap(Channel::Ground, v).norm_sqr() - 0.5).abs() < 1e-6);
        }
        assert!(f.overlap(Channel::Ground, &vecs[2]).norm_sqr() < 1e-10);
    }

    #[test]
    fn landau_zener_limits() {
        assert_eq!(landau_zener_parameter(0.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(landau_zener_parameter(1e20, 1.0, 1.0).unwrap() < 1e-300);
        assert!(landau_zener_parameter(1.0, 0.0, 1.0).is_err());
        assert!(landau_zener_parameter(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn franck_condon_refuses_strong_driving() {
        let strong = Plateau { mean: 0.2, ripple: 0.0, drift: 0.0 };
        assert!(franck_condon_reduction(&strong, 1e9, 1e-12).is_err());
        let weak = Plateau { mean: 1e-5, ..strong };
        assert!(franck_condon_reduction(&weak, 0.0, 1e-12).is_err());
    }
}
