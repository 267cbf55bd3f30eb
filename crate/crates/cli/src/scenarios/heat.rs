use super::{Model, ScenarioOutput};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Csv, OutputFile};
use exciplex::constants::MICRON;
use exciplex::model::rb_ar;
use exciplex::thermal::{
    gas_cell_scenario, heat_solve_2d, hex_bundle, max_temperature_drop, volumetric_cooling, GasCell, GridSpec,
    RadialProfile, TemperatureField, ThermalScenario,
};

fn field_csv(f: &TemperatureField) -> Csv {
    let mut csv = Csv::new(&["x_m", "y_m", "temperature_k"]);
    for j in 0..f.ny {
        for i in 0..f.nx {
            if f.inside[i + f.nx * j] {
                let (x, y) = f.node(i, j);
                csv.row(vec![x.into(), y.into(), f.at(i, j).into()]);
            }
        }
    }
    csv
}

fn section_csv(rows: &[(f64, f64)]) -> Csv {
    let mut csv = Csv::new(&["rho_m", "temperature_k"]);
    for (r, t) in rows {
        csv.row(vec![(*r).into(), (*t).into()]);
    }
    csv
}

pub fn bundle(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let m = Model::from_config(cfg)?;
    let b = &cfg.bundle;
    let q = volumetric_cooling(&m.mixture, &m.exciplex);
    let r = m.fibre.inner_radius;
    let grid = GridSpec::resolving(r, b.cells_per_core_radius);

    let cores = hex_bundle(b.rings, b.pitch_um * MICRON, r);
    let n_cores = cores.len();
    let scenario = ThermalScenario::bundle(cores.clone(), q, b.bundle_radius_um * MICRON, &m.fibre, b.ambient_k)?;
    let single = ThermalScenario::single_fibre(&m.fibre, q, b.ambient_k)?;
    let (bundle_field, single_field) = rayon::join(
        || heat_solve_2d(&scenario, &grid, b.tolerance_k, b.max_iterations),
        || heat_solve_2d(&single, &grid, b.tolerance_k, b.max_iterations),
    );
    let (bundle_field, single_field) = (bundle_field?, single_field?);

    let single_core = single.cores[0];
    let single_drop = single_field.core_mean_drop(&single_core);
    let analytic = RadialProfile::new(m.fibre, q, b.ambient_k)?;

    let mut cores_csv = Csv::new(&["core", "x_m", "y_m", "radius_m", "mean_drop_k"]);
    for (i, c) in cores.iter().enumerate() {
        cores_csv.row(vec![i.into(), c.center.0.into(), c.center.1.into(), c.radius.into(), bundle_field.core_mean_drop(c).into()]);
    }
    let centre_drop = bundle_field.core_mean_drop(&cores[0]);
    let mut summary = Csv::new(&["configuration", "cores", "centre_core_mean_drop_k", "min_temperature_k", "iterations", "residual_k"]);
    summary.row(vec![
        "bundle".into(),
        n_cores.into(),
        centre_drop.into(),
        bundle_field.min_temperature().into(),
        bundle_field.stats.iterations.into(),
        bundle_field.stats.residual.into(),
    ]);
    summary.row(vec![
        "single".into(),
        1usize.into(),
        single_drop.into(),
        single_field.min_temperature().into(),
        single_field.stats.iterations.into(),
        single_field.stats.residual.into(),
    ]);

    let n_rad = 4 * b.cells_per_core_radius * (b.bundle_radius_um / (r / MICRON)).ceil() as usize;
    let mut single_radial = Csv::new(&["rho_m", "temperature_k", "analytic_temperature_k"]);
    for (rho, t) in single_field.ray_section(0.0, 0.0, 200) {
        single_radial.row(vec![rho.into(), t.into(), analytic.temperature(rho.min(m.fibre.outer_radius))?.into()]);
    }

    let mut out = ScenarioOutput::default();
    if centre_drop <= single_drop {
        out.notes.push(format!("centre core drop {centre_drop:.4} K does not exceed the single-fibre drop {single_drop:.4} K"));
    }
    m.record(&mut out);
    out.derive("q_vol_w_per_m3", q);
    out.derive("grid_spacing_m", grid.spacing);
    out.derive("max_temperature_drop_k", max_temperature_drop(&m.mixture, &m.fibre, &m.exciplex));
    out.files.push(OutputFile::csv("bundle_field.csv", field_csv(&bundle_field)));
    out.files.push(OutputFile::csv("bundle_radial.csv", section_csv(&bundle_field.radial_section(n_rad, 360))));
    out.files.push(OutputFile::csv("bundle_ray.csv", section_csv(&bundle_field.ray_section(0.0, 0.0, n_rad))));
    out.files.push(OutputFile::csv("bundle_cores.csv", cores_csv));
    out.files.push(OutputFile::csv("single_field.csv", field_csv(&single_field)));
    out.files.push(OutputFile::csv("single_radial.csv", single_radial));
    out.files.push(OutputFile::csv("bundle_summary.csv", summary));
    Ok(out)
}

pub fn radial(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let m = Model::from_config(cfg)?;
    let q = volumetric_cooling(&m.mixture, &m.exciplex);
    let prof = RadialProfile::new(m.fibre, q, cfg.radial.ambient_k)?;
    let re = m.fibre.outer_radius;
    let n = cfg.radial.points;
    let mut csv = Csv::new(&["rho_m", "temperature_k", "region"]);
    for k in 0..=n {
        let rho = re * k as f64 / n as f64;
        let region = if rho <= m.fibre.inner_radius { "gas" } else { "glass" };
        csv.row(vec![rho.into(), prof.temperature(rho)?.into(), region.into()]);
    }
    let mut summary = Csv::new(&["quantity", "value", "unit"]);
    summary.row(vec!["q_vol".into(), q.into(), "W/m^3".into()]);
    summary.row(vec!["total_drop".into(), prof.total_drop().into(), "K".into()]);
    summary.row(vec!["wall_drop".into(), prof.wall_drop().into(), "K".into()]);
    summary.row(vec!["max_temperature_drop".into(), max_temperature_drop(&m.mixture, &m.fibre, &m.exciplex).into(), "K".into()]);
    let mut out = ScenarioOutput::default();
    m.record(&mut out);
    out.derive("q_vol_w_per_m3", q);
    out.files.push(OutputFile::csv("radial_profile.csv", csv));
    out.files.push(OutputFile::csv("radial_summary.csv", summary));
    Ok(out)
}

pub fn gas_cell(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let m = Model::from_config(cfg)?;
    let g = &cfg.gas_cell;
    let cell = GasCell {
        length: g.length_cm * 1e-2,
        window_thickness: g.window_thickness_mm * 1e-3,
        cell_radius: g.cell_radius_mm * 1e-3,
        beam_radius: g.beam_radius_mm * 1e-3,
        window_conductivity: g.window_conductivity_w_per_m_k,
        gas_conductivity: g.gas_conductivity_w_per_m_k,
        ambient: g.ambient_k,
        dopant_density: g.dopant_density_per_cm3 * 1e6,
        buffer_density: g.buffer_density_per_cm3 * 1e6,
        input_power: g.input_power_w,
        spacing: g.spacing_um * MICRON,
    };
    let mix = cell.mixture((rb_ar::rubidium_mass(), rb_ar::argon_mass()))?;
    let res = gas_cell_scenario(&cell, &mix, &m.exciplex, &m.drive)?;

    let mut axis = Csv::new(&["z_m", "power_w", "axis_temperature_k", "axis_drop_k"]);
    for ((z, p), t) in res.z.iter().zip(&res.power).zip(&res.axis_temperature) {
        axis.row(vec![(*z).into(), (*p).into(), (*t).into(), (cell.ambient - t).into()]);
    }
    let mut field = Csv::new(&["rho_m", "z_m", "temperature_k"]);
    for (j, z) in res.z.iter().enumerate() {
        for (i, rho) in res.rho.iter().enumerate() {
            field.row(vec![(*rho).into(), (*z).into(), res.temperature[i + res.rho.len() * j].into()]);
        }
    }
    let mut summary = Csv::new(&["quantity", "value", "unit"]);
    for (k, v, u) in [
        ("a", res.coefficients.a, "W/m"),
        ("b", res.coefficients.b, "1/W"),
        ("saturation", res.coefficients.saturation(), "1"),
        ("absorbed_fraction", res.absorbed_fraction, "1"),
        ("max_drop", res.max_drop, "K"),
        ("solver_iterations", res.stats.iterations as f64, "1"),
        ("solver_residual", res.stats.residual, "K"),
    ] {
        summary.row(vec![k.into(), v.into(), u.into()]);
    }
    let mut out = ScenarioOutput::default();
    out.derive("dopant_density_per_m3", cell.dopant_density);
    out.derive("buffer_density_per_m3", cell.buffer_density);
    out.derive("reduced_mass_kg", mix.reduced_mass());
    out.derive("laser_angular_frequency_rad_per_s", m.exciplex.laser_frequency());
    out.notes.push("laser.input_power_w is unused here; gas_cell.input_power_w drives the cell".into());
    out.files.push(OutputFile::csv("gas_cell_axis.csv", axis));
    out.files.push(OutputFile::csv("gas_cell_field.csv", field));
    out.files.push(OutputFile::csv("gas_cell_summary.csv", summary));
    Ok(out)
}
