//! Named studies. Each scenario computes everything in memory and hands
//! back the files to write, so a failing run leaves no partial output.

use crate::config::{RunConfig, SweepParameter};
use crate::error::Result;
use crate::output::OutputFile;
use exciplex::constants::{mhz, thz, ANGSTROM2, MICRON, PICOSECOND};
use exciplex::model::{rb_ar, DriveSpec, ExciplexSpec, FibreGeometry, GasMixture};
use serde_json::{Map, Value};

mod bloch;
mod collision;
mod fibre;
mod heat;
mod table;
mod xsection;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
}

/// Stable order; `list` prints it as is.
pub const CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "table1",
        description: "Rb-Ar fibre cooling parameters (kappa, tau, tau_kappa, tau_gamma, sigma_cool, D(0)) against tabulated targets",
    },
    ScenarioInfo {
        name: "fig3_bloch",
        description: "Monte-Carlo Bloch-sphere random walk against the analytic population, variance and spin distribution",
    },
    ScenarioInfo {
        name: "fig4a",
        description: "Laser power along the fibre for a sweep (default: buffer pressure), exponential to linear crossover",
    },
    ScenarioInfo {
        name: "fig4b",
        description: "Cooling rate versus buffer pressure for several fibre radii",
    },
    ScenarioInfo {
        name: "fig4cd",
        description: "Core-cladding temperature drop versus buffer pressure for several dopant pressures and fibre radii",
    },
    ScenarioInfo {
        name: "fig5_bundle",
        description: "2-D steady temperature map of a hexagonal fibre bundle against a single fibre",
    },
    ScenarioInfo {
        name: "fig7_radial",
        description: "Analytic radial temperature profile of a single fibre",
    },
    ScenarioInfo {
        name: "collision_movie",
        description: "Two-channel wavepacket collision: densities, mean separations, excited population, absorption time",
    },
    ScenarioInfo {
        name: "xsection_scan",
        description: "Partial-wave elastic cross sections, thermal average and the centrifugal-barrier cooling cross section",
    },
    ScenarioInfo {
        name: "gas_cell_weitz",
        description: "High-pressure buffer-gas cell with sapphire windows: power decay and axisymmetric temperature drop",
    },
];

/// Which sweep parameters a scenario accepts. The fibre studies already
/// run over buffer pressure and their series, so those cannot be swept.
pub fn sweep_allowed(scenario: &str, p: SweepParameter) -> bool {
    use SweepParameter::*;
    match scenario {
        "fig4a" => true,
        "fig4b" => !matches!(p, BufferPressureBar | InnerRadiusUm),
        "fig4cd" => !matches!(p, BufferPressureBar | InnerRadiusUm | DopantPressureMbar),
        _ => false,
    }
}

#[derive(Debug, Default)]
pub struct ScenarioOutput {
    pub files: Vec<OutputFile>,
    pub notes: Vec<String>,
    /// Derived inputs recorded in the manifest.
    pub derived: Map<String, Value>,
}

impl ScenarioOutput {
    pub fn derive(&mut self, key: &str, v: impl Into<Value>) {
        self.derived.insert(key.to_string(), v.into());
    }
}

pub fn run(cfg: &RunConfig) -> Result<ScenarioOutput> {
    match cfg.scenario.as_str() {
        "table1" => table::table1(cfg),
        "fig3_bloch" => bloch::fig3(cfg),
        "fig4a" => fibre::fig4a(cfg),
        "fig4b" => fibre::fig4b(cfg),
        "fig4cd" => fibre::fig4cd(cfg),
        "fig5_bundle" => heat::bundle(cfg),
        "fig7_radial" => heat::radial(cfg),
        "collision_movie" => collision::movie(cfg),
        "xsection_scan" => xsection::scan(cfg),
        "gas_cell_weitz" => heat::gas_cell(cfg),
        other => Err(crate::error::CliError::Config(format!("scenario: unknown `{other}`"))),
    }
}

/// Library objects built from a resolved config, in SI units.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub exciplex: ExciplexSpec,
    pub mixture: GasMixture,
    pub fibre: FibreGeometry,
    pub drive: DriveSpec,
}

impl Model {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let s = &cfg.species;
        let base = rb_ar::exciplex();
        let exciplex = ExciplexSpec::new(
            base.ground,
            base.excited,
            base.bare_transition,
            mhz(s.linewidth_mhz),
            s.dipole_cm,
            s.franck_condon,
            thz(s.upconversion_thz),
        )?;
        let g = &cfg.gas;
        let mixture = rb_ar::mixture(g.dopant_pressure_mbar, g.buffer_pressure_bar, g.temperature_k)?;
        let f = &cfg.fibre;
        let fibre = FibreGeometry::new(
            f.inner_radius_um * MICRON,
            f.outer_radius_um * MICRON,
            f.length_cm * 1e-2,
            f.wall_conductivity_w_per_m_k,
            f.gas_conductivity_w_per_m_k,
        )?;
        let l = &cfg.laser;
        let drive = DriveSpec::new(
            l.input_power_w,
            l.cooling_cross_section_a2 * ANGSTROM2,
            l.pulse_duration_ps * PICOSECOND,
        )?;
        Ok(Self {
            exciplex,
            mixture,
            fibre,
            drive,
        })
    }

    pub fn record(&self, out: &mut ScenarioOutput) {
        out.derive("dopant_density_per_m3", self.mixture.dopant_density);
        out.derive("buffer_density_per_m3", self.mixture.buffer_density);
        out.derive("reduced_mass_kg", self.mixture.reduced_mass());
        out.derive("mean_speed_m_per_s", self.mixture.mean_speed());
        out.derive("laser_angular_frequency_rad_per_s", self.exciplex.laser_frequency());
    }
}

/// Copy of `cfg` with one swept parameter replaced.
pub fn with_parameter(cfg: &RunConfig, p: SweepParameter, v: f64) -> RunConfig {
    let mut c = cfg.clone();
    match p {
        SweepParameter::BufferPressureBar => c.gas.buffer_pressure_bar = v,
        SweepParameter::DopantPressureMbar => c.gas.dopant_pressure_mbar = v,
        SweepParameter::InputPowerW => c.laser.input_power_w = v,
        SweepParameter::InnerRadiusUm => c.fibre.inner_radius_um = v,
        SweepParameter::TemperatureK => c.gas.temperature_k = v,
    }
    c
}

/// `n` log-spaced values on `[lo, hi]`.
pub fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_unique_and_complete() {
        let mut names: Vec<_> = CATALOG.iter().map(|s| s.name).collect();
        assert!(names.contains(&"table1") && names.contains(&"gas_cell_weitz"));
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CATALOG.len());
        assert!(CATALOG.len() >= 8);
    }

    #[test]
    fn default_model_matches_preset() {
        let cfg = RunConfig::for_scenario("table1").unwrap();
        let m = Model::from_config(&cfg).unwrap();
        assert_eq!(m.exciplex, rb_ar::exciplex());
        let d = rb_ar::default_mixture();
        assert!((m.mixture.buffer_density / d.buffer_density - 1.0).abs() < 1e-14);
        assert_eq!(m.fibre, rb_ar::fibre(0.01).unwrap());
        assert_eq!(m.drive, rb_ar::drive(1.0).unwrap());
    }
}
