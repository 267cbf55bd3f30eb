use super::{Model, ScenarioOutput};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Csv, OutputFile};
use exciplex::bloch::diffusion_rate;
use exciplex::model::{collision_rate, rabi_frequency, DriveSpec};

/// Relative deviation above which a row is flagged.
const FLAG_TOLERANCE: f64 = 0.01;

pub fn table1(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let m = Model::from_config(cfg)?;
    let kappa = collision_rate(&m.mixture, &m.drive);
    let chi = rabi_frequency(m.exciplex.effective_dipole(), DriveSpec::field_amplitude_at(m.drive.input_power, &m.fibre));
    let d0 = diffusion_rate(chi, kappa, m.drive.pulse_duration);

    // (symbol, description, value, unit, target, source)
    let rows: [(&str, &str, f64, &str, f64, &str); 6] = [
        ("kappa", "collision rate n_X sigma_cool v", kappa, "1/s", 5.83e9, "computed"),
        ("tau", "absorption time", m.drive.pulse_duration, "s", 1e-12, "input"),
        ("tau_kappa", "average collision time 1/kappa", 1.0 / kappa, "s", 171.61e-12, "computed"),
        ("tau_gamma", "spontaneous emission time 1/gamma", m.exciplex.decay_time(), "s", 27.68e-9, "computed"),
        ("sigma_cool", "cooling cross section", m.drive.collision_cross_section, "m^2", 20e-20, "input"),
        ("D0", "diffusion rate at the fibre input", d0, "1/s", 33.65e6, "computed"),
    ];
    let mut csv = Csv::new(&["symbol", "description", "value", "unit", "target", "relative_deviation", "source", "flag"]);
    let mut out = ScenarioOutput::default();
    let mut flagged = Vec::new();
    for (sym, desc, v, unit, target, source) in rows {
        let dev = v / target - 1.0;
        let flag = if dev.abs() <= FLAG_TOLERANCE { "ok" } else { "discrepant" };
        if flag != "ok" {
            flagged.push(sym);
        }
        csv.row(vec![sym.into(), desc.into(), v.into(), unit.into(), target.into(), dev.into(), source.into(), flag.into()]);
    }
    // identities that must hold regardless of the targets
    let mut ids = Csv::new(&["identity", "value", "expected"]);
    ids.row(vec!["tau_kappa*kappa".into(), ((1.0 / kappa) * kappa).into(), 1.0.into()]);
    ids.row(vec!["tau_gamma*gamma".into(), (m.exciplex.decay_time() * m.exciplex.linewidth).into(), 1.0.into()]);

    if !flagged.is_empty() {
        out.notes.push(format!(
            "rows outside {:.0}% of target: {}; kappa follows n_X sigma_cool v with v = sqrt(3 k_B T / mu)",
            FLAG_TOLERANCE * 100.0,
            flagged.join(", ")
        ));
    }
    m.record(&mut out);
    out.derive("rabi_frequency_at_input_rad_per_s", chi);
    out.files.push(OutputFile::csv("table1.csv", csv));
    out.files.push(OutputFile::csv("table1_identities.csv", ids));
    Ok(out)
}
