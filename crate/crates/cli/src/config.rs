//! Run configuration: TOML with sections and unit-suffixed keys.
//!
//! Every section is optional and falls back to the Rb-Ar defaults. Unknown
//! keys are rejected. `--override section.key=value` edits the parsed
//! document before it is checked.

use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub species: Species,
    #[serde(default)]
    pub gas: Gas,
    #[serde(default)]
    pub fibre: Fibre,
    #[serde(default)]
    pub laser: Laser,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub fig4: Fig4,
    #[serde(default)]
    pub bloch: Bloch,
    #[serde(default)]
    pub bundle: Bundle,
    #[serde(default)]
    pub radial: Radial,
    #[serde(default)]
    pub wavepacket: Wavepacket,
    #[serde(default)]
    pub xsection: Xsection,
    #[serde(default)]
    pub gas_cell: GasCell,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Species {
    pub preset: String,
    pub upconversion_thz: f64,
    pub linewidth_mhz: f64,
    pub dipole_cm: f64,
    pub franck_condon: f64,
}

impl Default for Species {
    fn default() -> Self {
        Self {
            preset: "rb_ar".into(),
            upconversion_thz: 6.7154,
            linewidth_mhz: 5.75,
            dipole_cm: 2.537e-29,
            franck_condon: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gas {
    pub temperature_k: f64,
    pub dopant_pressure_mbar: f64,
    pub buffer_pressure_bar: f64,
}

impl Default for Gas {
    fn default() -> Self {
        Self {
            temperature_k: 300.0,
            dopant_pressure_mbar: 1.0,
            buffer_pressure_bar: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fibre {
    pub inner_radius_um: f64,
    pub outer_radius_um: f64,
    pub length_cm: f64,
    pub wall_conductivity_w_per_m_k: f64,
    pub gas_conductivity_w_per_m_k: f64,
}

impl Default for Fibre {
    fn default() -> Self {
        Self {
            inner_radius_um: 20.0,
            outer_radius_um: 70.0,
            length_cm: 1.0,
            wall_conductivity_w_per_m_k: 0.8,
            gas_conductivity_w_per_m_k: 0.03,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Laser {
    /// Not given for the fibre studies; 1 W is an estimate.
    pub input_power_w: f64,
    pub pulse_duration_ps: f64,
    pub cooling_cross_section_a2: f64,
}

impl Default for Laser {
    fn default() -> Self {
        Self {
            input_power_w: 1.0,
            pulse_duration_ps: 1.0,
            cooling_cross_section_a2: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    BufferPressureBar,
    DopantPressureMbar,
    InputPowerW,
    InnerRadiusUm,
    TemperatureK,
}

impl SweepParameter {
    pub fn column(&self) -> &'static str {
        match self {
            SweepParameter::BufferPressureBar => "buffer_pressure_bar",
            SweepParameter::DopantPressureMbar => "dopant_pressure_mbar",
            SweepParameter::InputPowerW => "input_power_w",
            SweepParameter::InnerRadiusUm => "inner_radius_um",
            SweepParameter::TemperatureK => "temperature_k",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(format!("sweep: {m}")));
        if self.points == 0 {
            return bad("empty range (points = 0)");
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return bad("start and stop must be finite");
        }
        if self.start > self.stop || (self.points > 1 && self.start == self.stop) {
            return bad(&format!("empty range [{}, {}] for {} points", self.start, self.stop, self.points));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return bad("log spacing needs start > 0");
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig4 {
    /// Series of fibre radii (rates and drops versus buffer pressure).
    pub radii_um: Vec<f64>,
    /// Series of dopant pressures for the drop versus buffer pressure.
    pub dopant_pressures_mbar: Vec<f64>,
    /// Buffer-pressure axis, log spaced.
    pub buffer_min_bar: f64,
    pub buffer_max_bar: f64,
    pub buffer_points: usize,
    /// Samples along the fibre for the power curves.
    pub samples: usize,
}

impl Default for Fig4 {
    fn default() -> Self {
        Self {
            radii_um: vec![10.0, 20.0, 30.0],
            dopant_pressures_mbar: vec![1.0, 5.0, 10.0],
            buffer_min_bar: 0.01,
            buffer_max_bar: 1000.0,
            buffer_points: 51,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bloch {
    /// D/γ values to simulate.
    pub diffusion_ratios: Vec<f64>,
    pub trajectories: usize,
    pub samples: usize,
    /// Run length in units of the relaxation time 1/(2D + γ).
    pub relaxation_times: f64,
    /// κ = collision_factor · max(D, γ).
    pub collision_factor: f64,
    pub histogram_bins: usize,
    /// calibrated | nominal | exponential
    pub pulse_angle: String,
}

impl Default for Bloch {
    fn default() -> Self {
        Self {
            diffusion_ratios: vec![0.1, 0.3, 1.0, 3.0, 10.0],
            trajectories: 20_000,
            samples: 40,
            relaxation_times: 5.0,
            collision_factor: 300.0,
            histogram_bins: 40,
            pulse_angle: "calibrated".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bundle {
    pub rings: usize,
    pub pitch_um: f64,
    pub bundle_radius_um: f64,
    pub cells_per_core_radius: usize,
    pub tolerance_k: f64,
    pub max_iterations: usize,
    pub ambient_k: f64,
}

impl Default for Bundle {
    fn default() -> Self {
        Self {
            rings: 2,
            pitch_um: 140.0,
            bundle_radius_um: 350.0,
            cells_per_core_radius: 8,
            tolerance_k: 3e-6,
            max_iterations: 200_000,
            ambient_k: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Radial {
    pub ambient_k: f64,
    pub points: usize,
}

impl Default for Radial {
    fn default() -> Self {
        Self {
            ambient_k: 300.0,
            points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Wavepacket {
    pub temperature_k: f64,
    pub r_min_angstrom: f64,
    pub r_max_angstrom: f64,
    pub intervals: usize,
    pub dt_fs: f64,
    /// Run length; 0 selects the default round-trip time.
    pub duration_ps: f64,
    pub rabi_ghz: f64,
    pub detuning_thz: f64,
    pub sample_every: usize,
    /// Steps between density snapshots; 0 disables them.
    pub snapshot_every: usize,
    /// Fraction of the peak absorption rate that bounds the τ window.
    pub threshold: f64,
    /// Fraction of the run used for the plateau and slope fits.
    pub tail: f64,
}

impl Default for Wavepacket {
    fn default() -> Self {
        Self {
            temperature_k: 300.0,
            r_min_angstrom: 1.0,
            r_max_angstrom: 200.0,
            intervals: 4096,
            dt_fs: 0.1,
            duration_ps: 0.0,
            rabi_ghz: 4.0,
            detuning_thz: 5.2,
            sample_every: 50,
            snapshot_every: 2000,
            threshold: 0.1,
            tail: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Xsection {
    pub temperature_k: f64,
    pub nodes: usize,
    /// Upper speed in units of the most probable speed.
    pub cutoff: f64,
    /// depth_fraction | mean_energy
    pub criterion: String,
    pub depth_fraction: f64,
    /// Angular momenta for the effective-potential curves.
    pub potential_l: Vec<usize>,
    pub potential_points: usize,
}

impl Default for Xsection {
    fn default() -> Self {
        Self {
            temperature_k: 300.0,
            nodes: 64,
            cutoff: 5.0,
            criterion: "depth_fraction".into(),
            depth_fraction: 1.0 / 3.0,
            potential_l: vec![0, 20, 40, 60],
            potential_points: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GasCell {
    pub length_cm: f64,
    pub window_thickness_mm: f64,
    pub cell_radius_mm: f64,
    pub beam_radius_mm: f64,
    pub window_conductivity_w_per_m_k: f64,
    pub gas_conductivity_w_per_m_k: f64,
    pub ambient_k: f64,
    pub dopant_density_per_cm3: f64,
    pub buffer_density_per_cm3: f64,
    /// Not stated for the experiment; 4.4 W lands near the quoted drop.
    pub input_power_w: f64,
    pub spacing_um: f64,
}

impl Default for GasCell {
    fn default() -> Self {
        Self {
            length_cm: 1.0,
            window_thickness_mm: 2.0,
            cell_radius_mm: 5.0,
            beam_radius_mm: 1.5,
            window_conductivity_w_per_m_k: 2.0,
            gas_conductivity_w_per_m_k: 0.03,
            ambient_k: 620.0,
            dopant_density_per_cm3: 1e16,
            buffer_density_per_cm3: 1e21,
            input_power_w: 4.4,
            spacing_um: 100.0,
        }
    }
}

/// Splits `section.key=value` and parses the value as a TOML literal, or
/// as a bare string when that fails.
fn parse_override(spec: &str) -> Result<(Vec<String>, toml::Value)> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(|s| s.trim().to_string()).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override `{spec}` has an empty key")));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((path, value))
}

fn apply_override(doc: &mut toml::Table, path: &[String], value: toml::Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut table = doc;
    for p in parents {
        let entry = table.entry(p.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override path `{}`: `{p}` is not a section", path.join("."))))?;
    }
    table.insert(last.clone(), value);
    Ok(())
}

impl RunConfig {
    /// Parses a config document and applies the overrides in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let config: RunConfig = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            let mut doc: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
            for o in overrides {
                let (path, value) = parse_override(o)?;
                apply_override(&mut doc, &path, value)?;
            }
            toml::Value::Table(doc)
                .try_into()
                .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    /// Defaults for a named scenario.
    pub fn for_scenario(name: &str) -> Result<Self> {
        Self::parse(&format!("scenario = \"{name}\""), &[])
    }

    /// Range and consistency checks, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        if !crate::scenarios::CATALOG.iter().any(|s| s.name == self.scenario) {
            return Err(CliError::Config(format!(
                "scenario: unknown `{}` (see `exciplex-cool list`)",
                self.scenario
            )));
        }
        let positive = [
            ("species.upconversion_thz", self.species.upconversion_thz),
            ("species.linewidth_mhz", self.species.linewidth_mhz),
            ("species.dipole_cm", self.species.dipole_cm),
            ("gas.temperature_k", self.gas.temperature_k),
            ("fibre.inner_radius_um", self.fibre.inner_radius_um),
            ("fibre.outer_radius_um", self.fibre.outer_radius_um),
            ("fibre.length_cm", self.fibre.length_cm),
            ("fibre.wall_conductivity_w_per_m_k", self.fibre.wall_conductivity_w_per_m_k),
            ("fibre.gas_conductivity_w_per_m_k", self.fibre.gas_conductivity_w_per_m_k),
            ("laser.input_power_w", self.laser.input_power_w),
            ("laser.pulse_duration_ps", self.laser.pulse_duration_ps),
            ("laser.cooling_cross_section_a2", self.laser.cooling_cross_section_a2),
            ("bloch.relaxation_times", self.bloch.relaxation_times),
            ("bloch.collision_factor", self.bloch.collision_factor),
            ("bundle.pitch_um", self.bundle.pitch_um),
            ("bundle.bundle_radius_um", self.bundle.bundle_radius_um),
            ("bundle.tolerance_k", self.bundle.tolerance_k),
            ("bundle.ambient_k", self.bundle.ambient_k),
            ("radial.ambient_k", self.radial.ambient_k),
            ("wavepacket.temperature_k", self.wavepacket.temperature_k),
            ("wavepacket.dt_fs", self.wavepacket.dt_fs),
            ("wavepacket.detuning_thz", self.wavepacket.detuning_thz),
            ("wavepacket.threshold", self.wavepacket.threshold),
            ("wavepacket.tail", self.wavepacket.tail),
            ("xsection.temperature_k", self.xsection.temperature_k),
            ("xsection.cutoff", self.xsection.cutoff),
            ("gas_cell.length_cm", self.gas_cell.length_cm),
            ("gas_cell.window_thickness_mm", self.gas_cell.window_thickness_mm),
            ("gas_cell.cell_radius_mm", self.gas_cell.cell_radius_mm),
            ("gas_cell.beam_radius_mm", self.gas_cell.beam_radius_mm),
            ("gas_cell.ambient_k", self.gas_cell.ambient_k),
            ("gas_cell.input_power_w", self.gas_cell.input_power_w),
            ("gas_cell.spacing_um", self.gas_cell.spacing_um),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key}: must be positive and finite, got {v}")));
            }
        }
        let non_negative = [
            ("gas.dopant_pressure_mbar", self.gas.dopant_pressure_mbar),
            ("gas.buffer_pressure_bar", self.gas.buffer_pressure_bar),
            ("wavepacket.rabi_ghz", self.wavepacket.rabi_ghz),
            ("wavepacket.duration_ps", self.wavepacket.duration_ps),
            ("gas_cell.dopant_density_per_cm3", self.gas_cell.dopant_density_per_cm3),
            ("gas_cell.buffer_density_per_cm3", self.gas_cell.buffer_density_per_cm3),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key}: must be non-negative and finite, got {v}")));
            }
        }
        let counts = [
            ("fig4.samples", self.fig4.samples),
            ("fig4.buffer_points", self.fig4.buffer_points),
            ("bloch.trajectories", self.bloch.trajectories),
            ("bloch.samples", self.bloch.samples),
            ("bloch.histogram_bins", self.bloch.histogram_bins),
            ("bundle.cells_per_core_radius", self.bundle.cells_per_core_radius),
            ("bundle.max_iterations", self.bundle.max_iterations),
            ("radial.points", self.radial.points),
            ("wavepacket.intervals", self.wavepacket.intervals),
            ("wavepacket.sample_every", self.wavepacket.sample_every),
            ("xsection.nodes", self.xsection.nodes),
            ("xsection.potential_points", self.xsection.potential_points),
        ];
        for (key, v) in counts {
            if v == 0 {
                return Err(CliError::Config(format!("{key}: must be at least 1")));
            }
        }
        if self.species.preset != "rb_ar" {
            return Err(CliError::Config(format!("species.preset: unknown `{}` (available: rb_ar)", self.species.preset)));
        }
        if !(self.species.franck_condon > 0.0 && self.species.franck_condon <= 1.0) {
            return Err(CliError::Config("species.franck_condon: must lie in (0, 1]".into()));
        }
        if self.fibre.outer_radius_um <= self.fibre.inner_radius_um {
            return Err(CliError::Config("fibre.outer_radius_um: must exceed fibre.inner_radius_um".into()));
        }
        if self.wavepacket.r_max_angstrom <= self.wavepacket.r_min_angstrom || !(self.wavepacket.r_min_angstrom > 0.0) {
            return Err(CliError::Config("wavepacket.r_max_angstrom: need 0 < r_min < r_max".into()));
        }
        if !["calibrated", "nominal", "exponential"].contains(&self.bloch.pulse_angle.as_str()) {
            return Err(CliError::Config(format!("bloch.pulse_angle: unknown `{}`", self.bloch.pulse_angle)));
        }
        if !["depth_fraction", "mean_energy"].contains(&self.xsection.criterion.as_str()) {
            return Err(CliError::Config(format!("xsection.criterion: unknown `{}`", self.xsection.criterion)));
        }
        if self.bloch.diffusion_ratios.is_empty() || self.bloch.diffusion_ratios.iter().any(|r| !(*r > 0.0)) {
            return Err(CliError::Config("bloch.diffusion_ratios: need at least one positive ratio".into()));
        }
        if self.fig4.radii_um.iter().chain(&self.fig4.dopant_pressures_mbar).any(|r| !(*r > 0.0)) {
            return Err(CliError::Config("fig4: radii and dopant pressures must be positive".into()));
        }
        if self.fig4.radii_um.iter().any(|r| *r >= self.fibre.outer_radius_um) {
            return Err(CliError::Config("fig4.radii_um: every radius must be below fibre.outer_radius_um".into()));
        }
        if !(self.fig4.buffer_min_bar > 0.0 && self.fig4.buffer_max_bar > self.fig4.buffer_min_bar) {
            return Err(CliError::Config("fig4.buffer_max_bar: need 0 < buffer_min_bar < buffer_max_bar".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
            if !crate::scenarios::sweep_allowed(&self.scenario, s.parameter) {
                return Err(CliError::Config(format!(
                    "sweep: scenario `{}` does not take a sweep over {}",
                    self.scenario,
                    s.parameter.column()
                )));
            }
        }
        Ok(())
    }
}
