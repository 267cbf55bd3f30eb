use super::ScenarioOutput;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{Csv, OutputFile};
use exciplex::constants::{thz, ANGSTROM, FEMTOSECOND, PICOSECOND};
use exciplex::wavepacket::{
    absorption_window, classical_turning_point, excited_plateau, franck_condon_reduction, landau_zener_parameter,
    outgoing_slopes, run_collision, CollisionConfig, Curve, SpatialGrid,
};

/// Radial points kept per density snapshot.
const MAX_DENSITY_POINTS: usize = 1024;

pub fn collision_config(cfg: &RunConfig) -> Result<CollisionConfig> {
    let w = &cfg.wavepacket;
    let mut c = CollisionConfig::rb_ar(w.temperature_k)?;
    c.grid = SpatialGrid::new(w.r_min_angstrom * ANGSTROM, w.r_max_angstrom * ANGSTROM, w.intervals)?;
    c.dt = w.dt_fs * FEMTOSECOND;
    if w.duration_ps > 0.0 {
        c.duration = w.duration_ps * PICOSECOND;
    }
    c.rabi = exciplex::constants::angular(w.rabi_ghz * 1e9);
    c.detuning = thz(w.detuning_thz);
    c.sample_every = w.sample_every;
    c.snapshot_every = (w.snapshot_every > 0).then_some(w.snapshot_every);
    if c.packet.center >= c.grid.r_max {
        return Err(CliError::Config(format!(
            "wavepacket.r_max_angstrom: the packet starts at {:.1} Å, outside the box",
            c.packet.center / ANGSTROM
        )));
    }
    Ok(c)
}

pub fn movie(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let w = &cfg.wavepacket;
    let c = collision_config(cfg)?;
    let traj = run_collision(&c)?;

    let mut summary = Csv::new(&["t_s", "mean_r_ground_m", "mean_r_excited_m", "ground_population", "excited_population"]);
    let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
    for s in &traj.samples {
        summary.row(vec![
            s.time.into(),
            opt(s.mean_r_ground).into(),
            opt(s.mean_r_excited).into(),
            s.ground_norm.into(),
            s.excited_norm.into(),
        ]);
    }

    let mut density = Csv::new(&["t_s", "r_m", "ground_density_per_m", "excited_density_per_m"]);
    for snap in &traj.snapshots {
        let n = snap.ground_density.len();
        let stride = n.div_ceil(MAX_DENSITY_POINTS).max(1);
        for i in (0..n).step_by(stride) {
            density.row(vec![
                snap.time.into(),
                c.grid.r(i).into(),
                snap.ground_density[i].into(),
                snap.excited_density[i].into(),
            ]);
        }
    }

    let mut obs = Csv::new(&["quantity", "value", "unit"]);
    let mut out = ScenarioOutput::default();
    let window = absorption_window(&traj, w.threshold);
    let plateau = excited_plateau(&traj, w.tail);
    let slopes = outgoing_slopes(&traj, w.tail);
    obs.row(vec!["max_norm_drift".into(), traj.max_norm_drift.into(), "1".into()]);
    obs.row(vec!["absorbed_norm".into(), traj.absorbed_norm.into(), "1".into()]);
    obs.row(vec!["group_velocity".into(), c.packet.group_velocity(c.reduced_mass).into(), "m/s".into()]);
    match window {
        Some(win) => {
            obs.row(vec!["absorption_time".into(), win.duration().into(), "s".into()]);
            obs.row(vec!["absorption_peak_time".into(), win.peak_time.into(), "s".into()]);
        }
        None => out.notes.push("no absorption window found".into()),
    }
    if let Some(p) = plateau {
        obs.row(vec!["excited_plateau".into(), p.mean.into(), "1".into()]);
        obs.row(vec!["excited_plateau_drift".into(), p.drift.into(), "1".into()]);
        obs.row(vec!["excited_plateau_ripple".into(), p.ripple.into(), "1".into()]);
        if let Some(win) = window {
            match franck_condon_reduction(&p, c.rabi, win.duration()) {
                Ok(fc) => {
                    obs.row(vec!["franck_condon_reduction".into(), fc.value.into(), "1".into()]);
                    obs.row(vec!["franck_condon_uncertainty".into(), fc.uncertainty.into(), "1".into()]);
                }
                Err(e) => out.notes.push(format!("no Franck-Condon estimate: {e}")),
            }
        }
    } else {
        out.notes.push("no excited plateau: run too short or drive off".into());
    }
    if let Some((vg, ve)) = slopes {
        obs.row(vec!["outgoing_slope_ground".into(), vg.into(), "m/s".into()]);
        obs.row(vec!["outgoing_slope_excited".into(), ve.into(), "m/s".into()]);
    }
    if let Some(a0) = classical_turning_point(&c) {
        obs.row(vec!["turning_point".into(), a0.into(), "m".into()]);
        if let (Curve::Morse(g), true) = (c.ground, c.rabi > 0.0) {
            let v = c.packet.group_velocity(c.reduced_mass);
            let lz = landau_zener_parameter(c.rabi, g.derivative(a0).abs(), v)?;
            obs.row(vec!["landau_zener_parameter".into(), lz.into(), "1".into()]);
        }
    }

    out.derive("steps", c.n_steps());
    out.derive("duration_s", c.duration);
    out.derive("packet_center_m", c.packet.center);
    out.derive("packet_wavenumber_per_m", c.packet.wavenumber);
    out.derive("packet_width_per_m", c.packet.width);
    out.derive("rabi_rad_per_s", c.rabi);
    out.derive("detuning_rad_per_s", c.detuning);
    out.files.push(OutputFile::csv("collision_summary.csv", summary));
    out.files.push(OutputFile::csv("collision_density.csv", density));
    out.files.push(OutputFile::csv("collision_observables.csv", obs));
    Ok(out)
}
