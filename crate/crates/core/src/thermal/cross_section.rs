//! Steady heat conduction over a fibre or fibre-bundle cross-section.

use super::solver::{series_conductivity, SolveStats, StructuredSystem};
use crate::error::{Error, Result};
use crate::model::FibreGeometry;

/// Gas-filled core of a bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Core {
    pub center: (f64, f64),
    pub radius: f64,
}

impl Core {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        dx * dx + dy * dy < self.radius * self.radius
    }
}

/// Cross-section with gas cores embedded in glass, the circular outer
/// boundary (centred on the origin) held at the ambient temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalScenario {
    pub cores: Vec<Core>,
    /// Volumetric source per core, W/m³ (negative for cooling).
    pub q_vol: Vec<f64>,
    pub outer_radius: f64,
    pub gas_conductivity: f64,
    pub wall_conductivity: f64,
    pub ambient: f64,
    /// Volumetric heat capacities (gas, glass); carried for transient
    /// extensions and ignored in steady state.
    pub heat_capacity: Option<(f64, f64)>,
}

impl ThermalScenario {
    pub fn new(
        cores: Vec<Core>,
        q_vol: Vec<f64>,
        outer_radius: f64,
        gas_conductivity: f64,
        wall_conductivity: f64,
        ambient: f64,
    ) -> Result<Self> {
        if cores.len() != q_vol.len() {
            return Err(Error::config("one source density per core required"));
        }
        if !(ambient > 0.0) {
            return Err(Error::domain("ambient temperature must be positive"));
        }
        if !(gas_conductivity > 0.0 && wall_conductivity > 0.0 && outer_radius > 0.0) {
            return Err(Error::domain("conductivities and outer radius must be positive"));
        }
        for (i, a) in cores.iter().enumerate() {
            if !(a.radius > 0.0) {
                return Err(Error::domain("core radius must be positive"));
            }
            if a.center.0.hypot(a.center.1) + a.radius >= outer_radius {
                return Err(Error::config(format!("core {i} is not inside the outer boundary")));
            }
            for (j, b) in cores.iter().enumerate().skip(i + 1) {
                let d = (a.center.0 - b.center.0).hypot(a.center.1 - b.center.1);
                if d < a.radius + b.radius {
                    return Err(Error::config(format!("cores {i} and {j} overlap")));
                }
            }
        }
        Ok(Self {
            cores,
            q_vol,
            outer_radius,
            gas_conductivity,
            wall_conductivity,
            ambient,
            heat_capacity: None,
        })
    }

    /// A single centred fibre.
    pub fn single_fibre(fibre: &FibreGeometry, q_vol: f64, ambient: f64) -> Result<Self> {
        Self::new(
            vec![Core {
                center: (0.0, 0.0),
                radius: fibre.inner_radius,
            }],
            vec![q_vol],
            fibre.outer_radius,
            fibre.gas_conductivity,
            fibre.wall_conductivity,
            ambient,
        )
    }

    /// Same per-core source in every core.
    pub fn bundle(cores: Vec<Core>, q_vol: f64, outer_radius: f64, fibre: &FibreGeometry, ambient: f64) -> Result<Self> {
        let q = vec![q_vol; cores.len()];
        Self::new(cores, q, outer_radius, fibre.gas_conductivity, fibre.wall_conductivity, ambient)
    }

    fn conductivity(&self, x: f64, y: f64) -> f64 {
        if self.cores.iter().any(|c| c.contains(x, y)) {
            self.gas_conductivity
        } else {
            self.wall_conductivity
        }
    }

    fn min_core_radius(&self) -> f64 {
        self.cores.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min)
    }
}

/// Cores on a hexagonal lattice: `rings = 2` gives the 19-core layout.
pub fn hex_bundle(rings: usize, pitch: f64, core_radius: f64) -> Vec<Core> {
    let mut out = Vec::new();
    let r = rings as i64;
    for q in -r..=r {
        for s in (-r).max(-q - r)..=r.min(-q + r) {
            let x = pitch * (q as f64 + 0.5 * s as f64);
            let y = pitch * (3f64.sqrt() / 2.0) * s as f64;
            out.push(Core {
                center: (x, y),
                radius: core_radius,
            });
        }
    }
    // central core first, then by distance and angle
    out.sort_by(|a, b| {
        let da = a.center.0.hypot(a.center.1);
        let db = b.center.0.hypot(b.center.1);
        da.total_cmp(&db)
            .then(a.center.1.atan2(a.center.0).total_cmp(&b.center.1.atan2(b.center.0)))
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    /// Sub-samples per direction used for source area fractions and link
    /// resistances.
    pub sub_samples: usize,
}

impl GridSpec {
    pub fn new(spacing: f64) -> Self {
        Self { spacing, sub_samples: 32 }
    }

    /// Spacing that puts `cells` nodes across a core radius.
    pub fn resolving(core_radius: f64, cells: usize) -> Self {
        Self::new(core_radius / cells as f64)
    }
}

/// Nodal temperatures on the solver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField {
    pub origin: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub temperature: Vec<f64>,
    /// True for nodes strictly inside the outer boundary.
    pub inside: Vec<bool>,
    pub ambient: f64,
    pub outer_radius: f64,
    pub stats: SolveStats,
}

impl TemperatureField {
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.origin.0 + i as f64 * self.spacing, self.origin.1 + j as f64 * self.spacing)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.temperature[i + self.nx * j]
    }

    pub fn min_temperature(&self) -> f64 {
        self.temperature.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation; ambient outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let fx = (x - self.origin.0) / self.spacing;
        let fy = (y - self.origin.1) / self.spacing;
        if fx < 0.0 || fy < 0.0 || fx >= (self.nx - 1) as f64 || fy >= (self.ny - 1) as f64 {
            return self.ambient;
        }
        let (i, j) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let t00 = self.at(i, j);
        let t10 = self.at(i + 1, j);
        let t01 = self.at(i, j + 1);
        let t11 = self.at(i + 1, j + 1);
        (1.0 - ty) * ((1.0 - tx) * t00 + tx * t10) + ty * ((1.0 - tx) * t01 + tx * t11)
    }

    /// Area-weighted mean of `T_e − T` over the control volumes inside a core.
    pub fn core_mean_drop(&self, core: &Core) -> f64 {
        let h = self.spacing;
        let (mut sum, mut area) = (0.0, 0.0);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.node(i, j);
                let w = cell_fraction(core, x, y, h, 16);
                if w > 0.0 {
                    sum += w * (self.ambient - self.at(i, j));
                    area += w;
                }
            }
        }
        sum / area
    }

    /// Azimuthal mean of the temperature on circles about the origin.
    pub fn radial_section(&self, n_radii: usize, n_angles: usize) -> Vec<(f64, f64)> {
        (0..=n_radii)
            .map(|k| {
                let rho = self.outer_radius * k as f64 / n_radii as f64;
                if k == 0 {
                    return (0.0, self.interpolate(0.0, 0.0));
                }
                let m: f64 = (0..n_angles)
                    .map(|a| {
                        let phi = 2.0 * std::f64::consts::PI * a as f64 / n_angles as f64;
                        self.interpolate(rho * phi.cos(), rho * phi.sin())
                    })
                    .sum::<f64>()
                    / n_angles as f64;
                (rho, m)
            })
            .collect()
    }

    /// Temperatures along the ray at `angle` (rad) from `rho_start` out to
    /// the boundary.
    pub fn ray_section(&self, angle: f64, rho_start: f64, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|k| {
                let rho = rho_start + (self.outer_radius - rho_start) * k as f64 / n as f64;
                (rho, self.interpolate(rho * angle.cos(), rho * angle.sin()))
            })
            .collect()
    }

    /// Temperatures along the grid row closest to `y`.
    pub fn line_cut(&self, y: f64) -> Vec<(f64, f64)> {
        let j = (((y - self.origin.1) / self.spacing).round().max(0.0) as usize).min(self.ny - 1);
        (0..self.nx).map(|i| (self.node(i, j).0, self.at(i, j))).collect()
    }
}

/// Fraction of the square control volume of side `h` centred on `(x, y)`
/// that lies inside the core.
fn cell_fraction(core: &Core, x: f64, y: f64, h: f64, m: usize) -> f64 {
    let d = (x - core.center.0).hypot(y - core.center.1);
    let half_diag = h * std::f64::consts::FRAC_1_SQRT_2;
    if d + half_diag <= core.radius {
        return 1.0;
    }
    if d - half_diag >= core.radius {
        return 0.0;
    }
    let mut hits = 0usize;
    for a in 0..m {
        for b in 0..m {
            let sx = x + h * ((a as f64 + 0.5) / m as f64 - 0.5);
            let sy = y + h * ((b as f64 + 0.5) / m as f64 - 0.5);
            if core.contains(sx, sy) {
                hits += 1;
            }
        }
    }
    hits as f64 / (m * m) as f64
}

/// Fraction along the segment from inside point `p` to outside point `q`
/// where it meets the circle of radius `r` about the origin.
fn boundary_fraction(p: (f64, f64), q: (f64, f64), r: f64) -> f64 {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let a = dx * dx + dy * dy;
    let b = 2.0 * (p.0 * dx + p.1 * dy);
    let c = p.0 * p.0 + p.1 * p.1 - r * r;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    ((-b + disc.sqrt()) / (2.0 * a)).clamp(1e-6, 1.0)
}

/// Steady state of `−∇·(k∇T) = q` with `T = T_e` on the outer circle.
///
/// Node-centred finite volumes: link conductances are series averages of the
/// piecewise conductivity along each link, links cut by the outer circle
/// are shortened to the crossing point, and sources are weighted by the
/// fraction of each control volume lying inside a core. `tol` bounds
/// `max |r_i / A_ii|` in kelvin.
pub fn heat_solve_2d(scenario: &ThermalScenario, grid: &GridSpec, tol: f64, max_iter: usize) -> Result<TemperatureField> {
    let h = grid.spacing;
    if !(h > 0.0) {
        return Err(Error::config("grid spacing must be positive"));
    }
    if !scenario.cores.is_empty() && scenario.min_core_radius() / h < 8.0 * (1.0 - 1e-9) {
        return Err(Error::config(format!(
            "grid spacing {h:e} m resolves the smallest core radius by fewer than 8 cells"
        )));
    }
    let big_r = scenario.outer_radius;
    let half = (big_r / h).ceil() as usize + 1;
    let n = 2 * half + 1;
    let origin = (-(half as f64) * h, -(half as f64) * h);
    let pos = |i: usize, j: usize| (origin.0 + i as f64 * h, origin.1 + j as f64 * h);

    let mut sys = StructuredSystem::new(n, n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = pos(i, j);
            let k = sys.idx(i, j);
            sys.active[k] = x.hypot(y) < big_r;
        }
    }
    let kf = |x: f64, y: f64| scenario.conductivity(x, y);
    let ns = grid.sub_samples.max(1);
    let link = |sys: &mut StructuredSystem, a: (usize, usize), b: (usize, usize), along_x: bool| {
        let (pa, pb) = (pos(a.0, a.1), pos(b.0, b.1));
        let ia = sys.active[sys.idx(a.0, a.1)];
        let ib = sys.active[sys.idx(b.0, b.1)];
        if !ia && !ib {
            return;
        }
        let g = if ia && ib {
            series_conductivity(kf, pa, pb, ns)
        } else {
            let (p, q) = if ia { (pa, pb) } else { (pb, pa) };
            let t = boundary_fraction(p, q, big_r);
            let end = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
            series_conductivity(kf, p, end, ns) / t
        };
        if along_x {
            sys.link_x(a.0, a.1, g);
        } else {
            sys.link_y(a.0, a.1, g);
        }
    };
    for j in 0..n {
        for i in 0..n - 1 {
            link(&mut sys, (i, j), (i + 1, j), true);
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            link(&mut sys, (i, j), (i, j + 1), false);
        }
    }
    for (core, &q) in scenario.cores.iter().zip(&scenario.q_vol) {
        for j in 0..n {
            for i in 0..n {
                let k = sys.idx(i, j);
                if !sys.active[k] {
                    continue;
                }
                let (x, y) = pos(i, j);
                let w = cell_fraction(core, x, y, h, 16);
                sys.rhs[k] += q * w * h * h;
            }
        }
    }
    let (theta, stats) = sys.solve(tol, max_iter)?;
    Ok(TemperatureField {
        origin,
        nx: n,
        ny: n,
        spacing: h,
        temperature: theta.iter().map(|t| t + scenario.ambient).collect(),
        inside: sys.active.clone(),
        ambient: scenario.ambient,
        outer_radius: big_r,
        stats,
    })
}
