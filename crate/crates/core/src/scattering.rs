//! Partial-wave elastic scattering: phase shifts by Numerov integration,
//! energy-dependent and thermally averaged cross sections, and the
//! centrifugal-barrier cut that defines the cooling cross section.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::model::MorsePotential;
use crate::special::{gauss_legendre_on, riccati_bessel};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Interaction potential for the radial equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    /// Impenetrable sphere of the given radius (m).
    HardSphere { radius: f64 },
    /// `V = −depth` (rad/s) for `r < radius`, zero outside.
    SquareWell { radius: f64, depth: f64 },
    /// Morse curve, measured from its dissociation limit.
    Morse(MorsePotential),
}

impl Potential {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Potential::Zero => true,
            Potential::HardSphere { radius } => radius > 0.0,
            Potential::SquareWell { radius, depth } => radius > 0.0 && depth.is_finite(),
            Potential::Morse(m) => m.depth > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid scattering potential {self:?}")))
        }
    }

    /// `2μV(r)/ħ` in m⁻², V in rad/s relative to the asymptote.
    fn reduced(&self, r: f64, mu: f64) -> f64 {
        let v = match *self {
            Potential::Zero | Potential::HardSphere { .. } => 0.0,
            Potential::SquareWell { radius, depth } => {
                if r < radius {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::Morse(m) => m.at(r) - m.asymptote(),
        };
        2.0 * mu * v / HBAR
    }

    /// Deepest attraction as `2μ|V_min|/ħ` (m⁻²).
    fn well(&self, mu: f64) -> f64 {
        match *self {
            Potential::SquareWell { depth, .. } => 2.0 * mu * depth.max(0.0) / HBAR,
            Potential::Morse(m) => 2.0 * mu * m.depth / HBAR,
            _ => 0.0,
        }
    }

    fn length_scale(&self) -> f64 {
        match *self {
            Potential::Zero => 1.0,
            Potential::HardSphere { radius } | Potential::SquareWell { radius, .. } => radius,
            Potential::Morse(m) => 1.0 / m.width,
        }
    }

    /// Beyond this radius the potential is treated as zero.
    pub fn range(&self) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::HardSphere { radius } | Potential::SquareWell { radius, .. } => radius,
            Potential::Morse(m) => m.equilibrium + 30.0 / m.width,
        }
    }
}

/// Step-size and truncation controls for the radial integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Steps per local de Broglie wavelength.
    pub steps_per_wavelength: f64,
    /// Steps per potential length scale (radius, or 1/a for Morse).
    pub steps_per_range: f64,
    /// Tail criterion on `|sin δ_l|` for the last partial waves.
    pub tail_tolerance: f64,
    pub min_partial_waves: usize,
    pub max_partial_waves: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            steps_per_wavelength: 60.0,
            steps_per_range: 100.0,
            tail_tolerance: 1e-6,
            min_partial_waves: 200,
            max_partial_waves: 1 << 15,
        }
    }
}

const TAIL_WINDOW: usize = 10;
const SEED: f64 = 1e-30;

/// Phase shifts `δ_l`, `l = 0..=l_max`, at one wavenumber. Values are
/// reduced to `(−π/2, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialWaveSet {
    pub wavenumber: f64,
    pub shifts: Vec<f64>,
    /// Whether the last partial waves satisfy the tail criterion.
    pub converged: bool,
}

impl PartialWaveSet {
    pub fn l_max(&self) -> usize {
        self.shifts.len() - 1
    }

    /// `σ(k) = (4π/k²) Σ (2l+1) sin²δ_l`; refuses an unconverged set.
    pub fn cross_section(&self) -> Result<f64> {
        self.cross_section_upto(usize::MAX)
    }

    /// Cross section restricted to `l ≤ l_cut`.
    pub fn cross_section_upto(&self, l_cut: usize) -> Result<f64> {
        if !self.converged {
            return Err(Error::numerical(
                "scattering",
                format!("partial-wave sum not converged at k = {:.4e} m⁻¹", self.wavenumber),
            ));
        }
        Ok(self.partial_cross_sections().take(l_cut.saturating_add(1)).sum())
    }

    /// Contributions `(4π/k²)(2l+1) sin²δ_l`.
    pub fn partial_cross_sections(&self) -> impl Iterator<Item = f64> + '_ {
        let pre = 4.0 * PI / (self.wavenumber * self.wavenumber);
        self.shifts
            .iter()
            .enumerate()
            .map(move |(l, d)| pre * (2 * l + 1) as f64 * d.sin().powi(2))
    }

    /// `(4π/k²) Σ_{l ≤ l_max} (2l+1)`.
    pub fn unitarity_bound(&self) -> f64 {
        let n = self.shifts.len() as f64;
        4.0 * PI * n * n / (self.wavenumber * self.wavenumber)
    }
}

/// `σ(k)` from a converged set.
pub fn cross_section(pw: &PartialWaveSet) -> Result<f64> {
    pw.cross_section()
}

/// `U(r) + ħ l(l+1)/(2μr²)` in rad/s.
pub fn effective_potential(u: &MorsePotential, l: usize, reduced_mass: f64, r: f64) -> f64 {
    u.at(r) + centrifugal(l, reduced_mass, r)
}

/// Centrifugal energy `ħ l(l+1)/(2μr²)` in rad/s.
pub fn centrifugal(l: usize, reduced_mass: f64, r: f64) -> f64 {
    let l = l as f64;
    HBAR * l * (l + 1.0) / (2.0 * reduced_mass * r * r)
}

/// Fractional loss of well depth when the centrifugal term for `l` is added:
/// `1 − (U(∞) − min U_eff)/D_e`, or 1 once the well has disappeared.
pub fn depth_reduction(u: &MorsePotential, l: usize, reduced_mass: f64) -> f64 {
    let f = |r: f64| effective_potential(u, l, reduced_mass, r);
    let (lo, hi) = (u.equilibrium - 1.0 / u.width, u.equilibrium + 6.0 / u.width);
    let lo = lo.max(0.1 * u.equilibrium);
    // coarse scan, then golden section around the best sample
    let n = 400;
    let step = (hi - lo) / n as f64;
    let best = (0..=n).map(|i| lo + i as f64 * step).min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let depth = u.asymptote() - f(0.5 * (a + b));
    (1.0 - depth / u.depth).clamp(0.0, 1.0)
}

struct Grid {
    start: f64,
    h: f64,
    steps: usize,
}

fn grid(pot: &Potential, mu: f64, k: f64, num: &Numerics) -> Grid {
    let k_local = (k * k + pot.well(mu)).sqrt().max(k);
    let mut h = (2.0 * PI / k_local / num.steps_per_wavelength).min(pot.length_scale() / num.steps_per_range);
    match *pot {
        Potential::SquareWell { radius, .. } => {
            // jump in f at the wall: keep it on a node and refine
            let m = (radius / (h / 40.0)).ceil();
            h = radius / m;
            Grid {
                start: 0.0,
                h,
                steps: 2 * m as usize,
            }
        }
        Potential::HardSphere { radius } => {
            let steps = (radius / h).ceil().max(20.0) as usize;
            Grid {
                start: radius,
                h: radius / steps as f64,
                steps,
            }
        }
        Potential::Morse(m) => {
            // inner start where h²U/12 ≤ 1/4, or 4/a inside r_eq
            let c = 3.0 * HBAR / (2.0 * mu * m.depth * h * h);
            let r_cap = m.equilibrium - (1.0 + (1.0 + c).sqrt()).ln() / m.width;
            let start = r_cap.max(m.equilibrium - 4.0 / m.width).max(0.02 * m.equilibrium);
            let end = pot.range();
            let steps = ((end - start) / h).ceil() as usize;
            Grid {
                start,
                h: (end - start) / steps as f64,
                steps,
            }
        }
        Potential::Zero => unreachable!(),
    }
}

/// Outward Numerov for `u'' = [l(l+1)/r² + U(r) − k²] u`, all `l ≤ l_max`
/// at once, in the form `w = (1 − h²f/12) u`. Each `l` starts from `u = 0`
/// where its centrifugal `h²f/12` has dropped to 1/4, which keeps the
/// recursion free of sign-alternating growth. Returns `u` at the last two
/// nodes and, when asked, the number of sign changes of each `u`.
fn numerov(
    pot: &Potential,
    mu: f64,
    k2: f64,
    l_max: usize,
    g: &Grid,
    count_nodes: bool,
) -> Result<(Vec<f64>, Vec<f64>, Vec<usize>)> {
    let h = g.h;
    let c = h * h / 12.0;
    let n = g.steps;
    // index at which each l starts from zero; nondecreasing in l
    let first: Vec<usize> = (0..=l_max)
        .map(|l| {
            let rl = h * ((l * (l + 1)) as f64 / 3.0).sqrt();
            ((rl - g.start) / h).ceil().max(0.0) as usize
        })
        .collect();
    let base = |i: usize| {
        let x = g.start + i as f64 * h;
        // the square-well jump sits on a node: use the mean of both sides
        let u = match *pot {
            Potential::SquareWell { radius, depth } if (x - radius).abs() < 0.5 * h => -mu * depth / HBAR,
            _ => pot.reduced(x, mu),
        };
        (u - k2, 1.0 / (x * x))
    };
    let ll: Vec<f64> = (0..=l_max).map(|l| (l * (l + 1)) as f64).collect();
    let mut wa = vec![0.0f64; l_max + 1];
    let mut wb = vec![0.0f64; l_max + 1];
    let mut nodes = vec![0usize; l_max + 1];
    let mut active = 0;
    for i in 1..n {
        let (fi, inv) = base(i);
        while active <= l_max && first[active] < i {
            wa[active] = 0.0;
            wb[active] = SEED * (1.0 - c * (fi + ll[active] * inv));
            active += 1;
        }
        let (pa, pb) = (&mut wa[..active], &mut wb[..active]);
        for ((a, b), q) in pa.iter_mut().zip(pb.iter_mut()).zip(&ll[..active]) {
            let f = fi + q * inv;
            let next = 2.0 * *b - *a + 12.0 * c * f * *b / (1.0 - c * f);
            *a = *b;
            *b = next;
        }
        if count_nodes {
            for l in 0..active {
                if wb[l] != 0.0 && wa[l] != 0.0 && wb[l].signum() != wa[l].signum() {
                    nodes[l] += 1;
                }
            }
        }
        if i % 16 == 0 {
            for l in 0..active {
                if wb[l].abs() > 1e100 {
                    wa[l] *= 1e-100;
                    wb[l] *= 1e-100;
                }
            }
        }
    }
    let (f1, i1) = base(n - 1);
    let (f2, i2) = base(n);
    let u1: Vec<f64> = (0..=l_max).map(|l| wa[l] / (1.0 - c * (f1 + ll[l] * i1))).collect();
    let u2: Vec<f64> = (0..=l_max).map(|l| wb[l] / (1.0 - c * (f2 + ll[l] * i2))).collect();
    if u1.iter().chain(&u2).any(|v| !v.is_finite()) {
        return Err(Error::numerical("scattering", "radial integration produced non-finite values"));
    }
    Ok((u1, u2, nodes))
}

fn shifts_at(pot: &Potential, mu: f64, k: f64, l_max: usize, num: &Numerics) -> Result<Vec<f64>> {
    if let Potential::Zero = pot {
        return Ok(vec![0.0; l_max + 1]);
    }
    let g = grid(pot, mu, k, num);
    let (u1, u2, _) = numerov(pot, mu, k * k, l_max, &g, false)?;
    let r2 = g.start + g.steps as f64 * g.h;
    let r1 = r2 - g.h;
    let (j1, y1) = riccati_bessel(l_max, k * r1);
    let (j2, y2) = riccati_bessel(l_max, k * r2);
    Ok((0..=l_max)
        .map(|l| {
            if u2[l] == 0.0 || !(y1[l].is_finite() && y2[l].is_finite()) {
                return 0.0;
            }
            let ratio = u1[l] / u2[l];
            let num = ratio * j2[l] - j1[l];
            let den = ratio * y2[l] - y1[l];
            reduce(num.atan2(den))
        })
        .collect())
}

/// Reduces an angle modulo π into `(−π/2, π/2]`.
fn reduce(x: f64) -> f64 {
    let y = x - PI * (x / PI).round();
    if y <= -0.5 * PI {
        y + PI
    } else {
        y
    }
}

fn validate_k(k: f64, mu: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("wavenumber must be positive, got {k}")));
    }
    if !(mu > 0.0) {
        return Err(Error::domain("reduced mass must be positive"));
    }
    Ok(())
}

/// Phase shifts at wavenumber `k`. `l_max` starts at
/// `max(min_partial_waves, k·range + 30)` and doubles until the last
/// partial waves satisfy the tail criterion or the cap is reached.
pub fn partial_waves(k: f64, potential: &Potential, reduced_mass: f64, num: &Numerics) -> Result<PartialWaveSet> {
    validate_k(k, reduced_mass)?;
    potential.validate()?;
    let mut l_max = num.min_partial_waves.max((k * potential.range()).ceil() as usize + 30);
    l_max = l_max.min(num.max_partial_waves);
    loop {
        let shifts = shifts_at(potential, reduced_mass, k, l_max, num)?;
        let tail = shifts.iter().rev().take(TAIL_WINDOW).all(|d| d.sin().abs() < num.tail_tolerance);
        if tail || l_max >= num.max_partial_waves {
            return Ok(PartialWaveSet {
                wavenumber: k,
                shifts,
                converged: tail,
            });
        }
        l_max = (2 * l_max).min(num.max_partial_waves);
    }
}

/// Single phase shift `δ_l(k)`, reduced modulo π.
pub fn phase_shift(k: f64, l: usize, potential: &Potential, reduced_mass: f64, num: &Numerics) -> Result<f64> {
    validate_k(k, reduced_mass)?;
    potential.validate()?;
    Ok(shifts_at(potential, reduced_mass, k, l, num)?[l])
}

/// Number of bound states with angular momentum `l`, from the nodes of the
/// zero-energy solution (including a node of its free continuation
/// `αr^{l+1} + βr^{−l}` beyond the matching radius).
pub fn bound_state_count(l: usize, potential: &Potential, reduced_mass: f64, num: &Numerics) -> Result<usize> {
    potential.validate()?;
    if matches!(potential, Potential::Zero | Potential::HardSphere { .. }) {
        return Ok(0);
    }
    // step from the well wavelength alone
    let g = grid(potential, reduced_mass, 0.0, num);
    let (u1, u2, nodes) = numerov(potential, reduced_mass, 0.0, l, &g, true)?;
    let r2 = g.start + g.steps as f64 * g.h;
    let r1 = r2 - g.h;
    let (p, q) = (l as f64 + 1.0, -(l as f64));
    // u = α r^p + β r^q through both points
    let det = r1.powf(p) * r2.powf(q) - r2.powf(p) * r1.powf(q);
    let alpha = (u1[l] * r2.powf(q) - u2[l] * r1.powf(q)) / det;
    let beta = (r1.powf(p) * u2[l] - r2.powf(p) * u1[l]) / det;
    let extra = alpha != 0.0 && -beta / alpha > r2.powf(p - q);
    Ok(nodes[l] + extra as usize)
}

/// `δ_l` along an ascending wavenumber grid with the branch chosen
/// continuous in k and anchored by Levinson's theorem,
/// `δ_l(0) = N_l π` with `N_l` the number of bound states. The grid must
/// resolve every jump of less than π/2 between neighbours.
pub fn phase_shift_curve(
    wavenumbers: &[f64],
    l: usize,
    potential: &Potential,
    reduced_mass: f64,
    num: &Numerics,
) -> Result<Vec<f64>> {
    if wavenumbers.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("wavenumbers must be strictly ascending"));
    }
    let n_bound = bound_state_count(l, potential, reduced_mass, num)? as f64;
    let mut out: Vec<f64> = Vec::with_capacity(wavenumbers.len());
    let mut prev = n_bound * PI;
    for &k in wavenumbers {
        let d = phase_shift(k, l, potential, reduced_mass, num)?;
        let v = d + PI * ((prev - d) / PI).round();
        out.push(v);
        prev = v;
    }
    Ok(out)
}

/// Maxwell distribution of relative speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityDistribution {
    pub temperature: f64,
    pub reduced_mass: f64,
}

impl VelocityDistribution {
    pub fn new(temperature: f64, reduced_mass: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::domain(format!("temperature must be positive, got {temperature} K")));
        }
        if !(reduced_mass > 0.0) {
            return Err(Error::domain("reduced mass must be positive"));
        }
        Ok(Self {
            temperature,
            reduced_mass,
        })
    }

    /// `4πv²(μ/2πk_BT)^{3/2} e^{−μv²/2k_BT}`, in s/m.
    pub fn density(&self, v: f64) -> f64 {
        let s = self.reduced_mass / (2.0 * K_B * self.temperature);
        4.0 * PI * v * v * (s / PI).powf(1.5) * (-s * v * v).exp()
    }

    /// `√(2k_BT/μ)`.
    pub fn most_probable_speed(&self) -> f64 {
        (2.0 * K_B * self.temperature / self.reduced_mass).sqrt()
    }

    /// Gauss–Legendre nodes on `[0, cutoff·v_mp]` with weights that
    /// already include `P(v)`.
    pub fn quadrature(&self, nodes: usize, cutoff: f64) -> (Vec<f64>, Vec<f64>) {
        let (v, w) = gauss_legendre_on(nodes, 0.0, cutoff * self.most_probable_speed());
        let w = v.iter().zip(&w).map(|(v, w)| w * self.density(*v)).collect();
        (v, w)
    }

    /// `∫ P(v) f(v) dv` over the truncated quadrature.
    pub fn average(&self, nodes: usize, cutoff: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (v, w) = self.quadrature(nodes, cutoff);
        v.iter().zip(&w).map(|(v, w)| w * f(*v)).sum()
    }
}

/// `maxwell_density(v, dist)`.
pub fn maxwell_density(v: f64, dist: &VelocityDistribution) -> f64 {
    dist.density(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOptions {
    pub nodes: usize,
    /// Upper speed limit in units of the most probable speed.
    pub cutoff: f64,
    pub numerics: Numerics,
}

impl Default for ThermalOptions {
    fn default() -> Self {
        Self {
            nodes: 64,
            cutoff: 5.0,
            numerics: Numerics::default(),
        }
    }
}

/// Thermally averaged cross sections and the per-node data behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalCrossSection {
    pub temperature: f64,
    /// `∫ P(v) σ(μv/ħ) dv`, m².
    pub elastic: f64,
    /// The same average restricted to `l ≤ l_cut`, when requested.
    pub restricted: Option<f64>,
    pub l_cut: Option<usize>,
    pub speeds: Vec<f64>,
    pub weights: Vec<f64>,
    /// `σ(k)` at each node.
    pub sigma: Vec<f64>,
    pub sigma_restricted: Vec<f64>,
    /// Largest l_max used at any node.
    pub max_partial_wave: usize,
    /// Quadrature value of `∫ P(v) dv`.
    pub normalisation: f64,
}

/// `σ_el = ∫ P(v) σ(μv/ħ) dv`, optionally also restricted to `l ≤ l_cut`.
/// Refuses if the partial-wave sum fails to converge at any node.
pub fn thermal_cross_sections(
    temperature: f64,
    potential: &Potential,
    reduced_mass: f64,
    l_cut: Option<usize>,
    opts: &ThermalOptions,
) -> Result<ThermalCrossSection> {
    let dist = VelocityDistribution::new(temperature, reduced_mass)?;
    if opts.nodes == 0 || !(opts.cutoff > 0.0) {
        return Err(Error::config("thermal quadrature needs nodes > 0 and a positive cutoff"));
    }
    let (speeds, weights) = dist.quadrature(opts.nodes, opts.cutoff);
    let sets: Vec<PartialWaveSet> = speeds
        .par_iter()
        .map(|v| partial_waves(reduced_mass * v / HBAR, potential, reduced_mass, &opts.numerics))
        .collect::<Result<_>>()?;
    let sigma: Vec<f64> = sets.iter().map(|s| s.cross_section()).collect::<Result<_>>()?;
    let sigma_restricted: Vec<f64> = match l_cut {
        Some(lc) => sets.iter().map(|s| s.cross_section_upto(lc)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    let avg = |s: &[f64]| s.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>();
    Ok(ThermalCrossSection {
        temperature,
        elastic: avg(&sigma),
        restricted: l_cut.map(|_| avg(&sigma_restricted)),
        l_cut,
        max_partial_wave: sets.iter().map(|s| s.l_max()).max().unwrap_or(0),
        normalisation: weights.iter().sum(),
        speeds,
        weights,
        sigma,
        sigma_restricted,
    })
}

/// `σ_el` at temperature T.
pub fn thermal_cross_section(temperature: f64, potential: &Potential, reduced_mass: f64, opts: &ThermalOptions) -> Result<f64> {
    Ok(thermal_cross_sections(temperature, potential, reduced_mass, None, opts)?.elastic)
}

/// How the largest admissible angular momentum is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierCriterion {
    /// Centrifugal energy at the resonance radius at most this fraction of
    /// the excited well depth.
    DepthFraction(f64),
    /// Centrifugal energy at most the mean thermal energy (3/2)k_BT.
    MeanEnergy,
}

impl Default for BarrierCriterion {
    fn default() -> Self {
        BarrierCriterion::DepthFraction(1.0 / 3.0)
    }
}

/// Largest `l` whose centrifugal energy at `radius` satisfies the criterion.
pub fn barrier_l_cut(
    excited: &MorsePotential,
    reduced_mass: f64,
    radius: f64,
    temperature: f64,
    criterion: BarrierCriterion,
) -> Result<usize> {
    if !(radius > 0.0) {
        return Err(Error::domain("resonance radius must be positive"));
    }
    let limit = match criterion {
        BarrierCriterion::DepthFraction(f) if f > 0.0 => f * excited.depth,
        BarrierCriterion::DepthFraction(f) => {
            return Err(Error::domain(format!("depth fraction must be positive, got {f}")));
        }
        BarrierCriterion::MeanEnergy => {
            VelocityDistribution::new(temperature, reduced_mass)?;
            1.5 * K_B * temperature / HBAR
        }
    };
    // l(l+1) ≤ x
    let x = limit / centrifugal(1, reduced_mass, radius) * 2.0;
    let mut l = ((0.25 + x).sqrt() - 0.5).floor().max(0.0) as usize;
    while ((l + 1) * (l + 2)) as f64 <= x {
        l += 1;
    }
    while l > 0 && ((l * (l + 1)) as f64) > x {
        l -= 1;
    }
    Ok(l)
}

/// Cooling cross section and the quantities that fix it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingEstimate {
    pub l_cut: usize,
    pub sigma_cool: f64,
    pub sigma_elastic: f64,
    /// Excited well-depth reduction at `l_cut`.
    pub depth_reduction: f64,
    pub thermal: ThermalCrossSection,
}

/// Thermal ground-state elastic cross section restricted to `l ≤ l_cut`.
pub fn cooling_cross_section(
    temperature: f64,
    potential: &Potential,
    reduced_mass: f64,
    l_cut: usize,
    opts: &ThermalOptions,
) -> Result<f64> {
    thermal_cross_sections(temperature, potential, reduced_mass, Some(l_cut), opts)?
        .restricted
        .ok_or_else(|| Error::numerical("scattering", "restricted average missing"))
}

/// Full cooling estimate: `l_cut` from the barrier criterion on the excited
/// curve at its equilibrium distance, then the restricted thermal average of
/// ground-state scattering.
pub fn cooling_estimate(
    temperature: f64,
    ground: &MorsePotential,
    excited: &MorsePotential,
    reduced_mass: f64,
    criterion: BarrierCriterion,
    opts: &ThermalOptions,
) -> Result<CoolingEstimate> {
    let l_cut = barrier_l_cut(excited, reduced_mass, excited.equilibrium, temperature, criterion)?;
    let thermal = thermal_cross_sections(temperature, &Potential::Morse(*ground), reduced_mass, Some(l_cut), opts)?;
    Ok(CoolingEstimate {
        l_cut,
        sigma_cool: thermal.restricted.unwrap_or(0.0),
        sigma_elastic: thermal.elastic,
        depth_reduction: depth_reduction(excited, l_cut, reduced_mass),
        thermal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ANGSTROM, ANGSTROM2};
    use crate::model::rb_ar;

    const MU: f64 = rb_ar::REDUCED_MASS;

    fn wrapped(a: f64, b: f64) -> f64 {
        let d = a - b;
        (d - PI * (d / PI).round()).abs()
    }

    // independent Riccati–Bessel values for low orders
    fn jy(l: usize, x: f64) -> (f64, f64) {
        let (s, c) = x.sin_cos();
        match l {
            0 => (s, -c),
            1 => (s / x - c, -c / x - s),
            2 => ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x, -(3.0 / (x * x) - 1.0) * c - 3.0 * s / x),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_potential_has_no_phase_shift() {
        let pw = partial_waves(3e10, &Potential::Zero, MU, &Numerics::default()).unwrap();
        assert!(pw.shifts.iter().all(|&d| d == 0.0));
        assert!(pw.converged);
        assert_eq!(pw.cross_section().unwrap(), 0.0);
    }

    #[test]
    fn hard_sphere_matches_closed_form() {
        let a = 3.0 * ANGSTROM;
        let pot = Potential::HardSphere { radius: a };
        for ka in [0.2, 1.0, 2.5, 6.0] {
            let k = ka / a;
            let pw = partial_waves(k, &pot, MU, &Numerics::default()).unwrap();
            assert!(pw.converged);
            assert!(wrapped(pw.shifts[0], -ka) < 1e-6, "ka={ka}: {}", pw.shifts[0]);
            for l in 1..=2 {
                let (j, y) = jy(l, ka);
                let exact = (j / y).atan();
                assert!(wrapped(pw.shifts[l], exact) < 1e-6, "ka={ka} l={l}");
            }
        }
    }

    #[test]
    fn square_well_matches_closed_form() {
        let a = 4.0 * ANGSTROM;
        // K₀a = 2.3: one s-wave bound state
        let k0 = 2.3 / a;
        let depth = HBAR * k0 * k0 / (2.0 * MU);
        let pot = Potential::SquareWell { radius: a, depth };
        for ka in [0.05, 0.4, 1.3, 3.0] {
            let k = ka / a;
            let big_k = (k * k + k0 * k0).sqrt();
            let exact = -ka + ((k / big_k) * (big_k * a).tan()).atan();
            let d = phase_shift(k, 0, &pot, MU, &Numerics::default()).unwrap();
            assert!(wrapped(d, exact) < 1e-6, "ka={ka}: {d} vs {exact}");
        }
        assert_eq!(bound_state_count(0, &pot, MU, &Numerics::default()).unwrap(), 1);
    }

    #[test]
    fn zero_energy_resonance_saturates_s_wave() {
        let a = 4.0 * ANGSTROM;
        let k0 = 0.5 * PI / a;
        let pot = Potential::SquareWell {
            radius: a,
            depth: HBAR * k0 * k0 / (2.0 * MU),
        };
        let k = 1e-3 / a;
        let d = phase_shift(k, 0, &pot, MU, &Numerics::default()).unwrap();
        assert!(wrapped(d, 0.5 * PI) < 2e-3, "{d}");
        let pw = partial_waves(k, &pot, MU, &Numerics::default()).unwrap();
        let s_wave = pw.partial_cross_sections().next().unwrap();
        assert!((s_wave * k * k / (4.0 * PI) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn levinson_anchored_curve_is_continuous() {
        let a = 4.0 * ANGSTROM;
        let k0 = 5.0 / a; // two s-wave bound states
        let pot = Potential::SquareWell {
            radius: a,
            depth: HBAR * k0 * k0 / (2.0 * MU),
        };
        let ks: Vec<f64> = (1..=400).map(|i| i as f64 * 0.02 / a).collect();
        let curve = phase_shift_curve(&ks, 0, &pot, MU, &Numerics::default()).unwrap();
        assert!(wrapped(curve[0], 0.0) < 0.05);
        assert!((curve[0] - 2.0 * PI).abs() < 0.05, "{}", curve[0]);
        assert!(curve.windows(2).all(|w| (w[1] - w[0]).abs() < 0.2));
        // the unwrapped curve follows the closed form branch by branch
        for (&k, &d) in ks.iter().zip(&curve) {
            let big_k = (k * k + k0 * k0).sqrt();
            let exact = -k * a + ((k / big_k) * (big_k * a).tan()).atan();
            assert!(wrapped(d, exact) < 1e-5);
        }
    }

    #[test]
    fn centrifugal_term() {
        let u = rb_ar::excited_potential();
        let r = 4.0 * ANGSTROM;
        assert_eq!(effective_potential(&u, 0, MU, r), u.at(r));
        let mut last = u.at(r);
        for l in 1..60 {
            let v = effective_potential(&u, l, MU, r);
            assert!(v > last);
            last = v;
        }
        assert_eq!(depth_reduction(&u, 0, MU), 0.0);
    }

    #[test]
    fn depth_reduction_matches_brute_force_scan() {
        let u = rb_ar::excited_potential();
        for l in [10usize, 40, 83] {
            let scan = (0..1_000_000)
                .map(|i| 2.0 * ANGSTROM + i as f64 * 1e-5 * ANGSTROM)
                .map(|r| effective_potential(&u, l, MU, r))
                .fold(f64::INFINITY, f64::min);
            let brute = 1.0 - (u.asymptote() - scan) / u.depth;
            assert!((depth_reduction(&u, l, MU) - brute.min(1.0)).abs() < 1e-6, "l={l}: {} vs {brute}", depth_reduction(&u, l, MU));
        }
    }

    #[test]
    fn barrier_cut_values() {
        let e = rb_ar::excited_potential();
        let a0 = rb_ar::EXCITED_EQUILIBRIUM;
        let l = barrier_l_cut(&e, MU, a0, 300.0, BarrierCriterion::default()).unwrap();
        let c = |l: usize| centrifugal(l, MU, a0);
        assert!(c(l) <= e.depth / 3.0 && c(l + 1) > e.depth / 3.0);
        assert_eq!(l, 40);
        let lm = barrier_l_cut(&e, MU, a0, 300.0, BarrierCriterion::MeanEnergy).unwrap();
        let eav = 1.5 * K_B * 300.0 / HBAR;
        assert!(c(lm) <= eav && c(lm + 1) > eav);
        assert!(barrier_l_cut(&e, MU, a0, 300.0, BarrierCriterion::DepthFraction(0.0)).is_err());
    }

    #[test]
    fn maxwell_normalisation_and_peak() {
        let d = VelocityDistribution::new(300.0, MU).unwrap();
        assert!((d.average(64, 5.0, |_| 1.0) - 1.0).abs() < 1e-8);
        let vp = d.most_probable_speed();
        let mu = MU;
        assert!(((2.0 * K_B * 300.0 / mu).sqrt() - vp).abs() < 1e-9);
        assert!((vp - 428.0).abs() < 1.0, "{vp}");
        let h = 1e-3 * vp;
        let slope = (d.density(vp + h) - d.density(vp - h)) / (2.0 * h);
        assert!(slope.abs() * vp / d.density(vp) < 1e-5);
        assert!(VelocityDistribution::new(0.0, MU).is_err());
    }

    #[test]
    fn cold_hard_sphere_gas_approaches_s_wave_limit() {
        let a = 3.0 * ANGSTROM;
        let pot = Potential::HardSphere { radius: a };
        // k_mp a ≈ 2e-3
        let t = 1e-6;
        let s = thermal_cross_section(t, &pot, MU, &ThermalOptions::default()).unwrap();
        assert!((s / (4.0 * PI * a * a) - 1.0).abs() < 1e-4, "{}", s / (4.0 * PI * a * a));
    }

    #[test]
    fn unconverged_sets_are_refused() {
        let pot = Potential::Morse(rb_ar::ground_potential());
        let num = Numerics {
            min_partial_waves: 5,
            max_partial_waves: 5,
            ..Numerics::default()
        };
        let pw = partial_waves(20.0 / ANGSTROM, &pot, MU, &num).unwrap();
        assert!(!pw.converged);
        assert!(pw.cross_section().is_err());
        let opts = ThermalOptions {
            numerics: num,
            ..ThermalOptions::default()
        };
        assert!(thermal_cross_section(300.0, &pot, MU, &opts).is_err());
    }

    #[test]
    fn morse_partial_wave_truncation() {
        let pot = Potential::Morse(rb_ar::ground_potential());
        let k = MU * 600.0 / HBAR;
        let pw = partial_waves(k, &pot, MU, &Numerics::default()).unwrap();
        assert!(pw.converged);
        let s = pw.cross_section().unwrap();
        assert!(s <= pw.unitarity_bound());
        let doubled = partial_waves(
            k,
            &pot,
            MU,
            &Numerics {
                min_partial_waves: 2 * pw.l_max(),
                ..Numerics::default()
            },
        )
        .unwrap();
        assert!((doubled.cross_section().unwrap() / s - 1.0).abs() < 1e-3);
        assert!(s > 10.0 * ANGSTROM2);
    }

    #[test]
    fn invalid_inputs() {
        let num = Numerics::default();
        assert!(partial_waves(0.0, &Potential::Zero, MU, &num).is_err());
        assert!(partial_waves(1e10, &Potential::HardSphere { radius: -1.0 }, MU, &num).is_err());
        assert!(phase_shift_curve(&[2e10, 1e10], 0, &Potential::Zero, MU, &num).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn unitarity_never_violated(ka in 0.01f64..8.0, k0a in 0.0f64..6.0, hard in any::<bool>()) {
                let a = 3.0 * ANGSTROM;
                let pot = if hard {
                    Potential::HardSphere { radius: a }
                } else {
                    let k0 = k0a / a;
                    Potential::SquareWell { radius: a, depth: HBAR * k0 * k0 / (2.0 * MU) }
                };
                let pw = partial_waves(ka / a, &pot, MU, &Numerics::default()).unwrap();
                prop_assert!(pw.converged);
                let pre = 4.0 * PI / (pw.wavenumber * pw.wavenumber);
                for (l, s) in pw.partial_cross_sections().enumerate() {
                    prop_assert!(s <= pre * (2 * l + 1) as f64 * (1.0 + 1e-12));
                }
                prop_assert!(pw.cross_section().unwrap() <= pw.unitarity_bound());
            }

            #[test]
            fn square_well_s_wave_oracle(ka in 0.02f64..5.0, k0a in 0.1f64..6.0) {
                let a = 2.0 * ANGSTROM;
                let (k, k0) = (ka / a, k0a / a);
                let pot = Potential::SquareWell { radius: a, depth: HBAR * k0 * k0 / (2.0 * MU) };
                let big_k = (k * k + k0 * k0).sqrt();
                let exact = -ka + ((k / big_k) * (big_k * a).tan()).atan();
                let d = phase_shift(k, 0, &pot, MU, &Numerics::default()).unwrap();
                prop_assert!(wrapped(d, exact) < 1e-6, "{} vs {}", d, exact);
            }
        }
    }
}
