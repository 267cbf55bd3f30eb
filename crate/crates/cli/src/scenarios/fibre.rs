use super::{log_axis, with_parameter, Model, ScenarioOutput};
use crate::config::{RunConfig, Spacing, Sweep, SweepParameter};
use crate::error::Result;
use crate::output::{Cell, Csv, OutputFile};
use exciplex::constants::{BAR, MBAR, MICRON};
use exciplex::propagation::{coefficients, power_at, power_profile, PropagationCoefficients};
use exciplex::thermal::{cooling_power, cooling_rate_from_power, cooling_rate_linear, heating_power, max_temperature_drop};
use rayon::prelude::*;

const TOL: f64 = 1e-12;

fn default_fig4a_sweep() -> Sweep {
    Sweep {
        parameter: SweepParameter::BufferPressureBar,
        start: 1.0,
        stop: 100.0,
        points: 5,
        spacing: Spacing::Log,
    }
}

/// Point configs for an optional outer sweep; `None` means a single run
/// without a point suffix.
fn outer_points(cfg: &RunConfig, sweep: Option<&Sweep>) -> Vec<(Option<(usize, f64)>, RunConfig)> {
    match sweep {
        None => vec![(None, cfg.clone())],
        Some(s) => s
            .values()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (Some((i, v)), with_parameter(cfg, s.parameter, v)))
            .collect(),
    }
}

fn file_name(stem: &str, point: Option<(usize, f64)>) -> String {
    match point {
        None => format!("{stem}.csv"),
        Some((i, _)) => format!("{stem}_point_{i:03}.csv"),
    }
}

pub fn fig4a(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let sweep = cfg.sweep.clone().unwrap_or_else(default_fig4a_sweep);
    let points = outer_points(cfg, Some(&sweep));
    let n = cfg.fig4.samples;
    let runs: Vec<(String, Csv, PropagationCoefficients, f64, f64)> = points
        .par_iter()
        .map(|(pt, c)| {
            let m = Model::from_config(c)?;
            let co = coefficients(&m.mixture, &m.fibre, &m.exciplex, &m.drive);
            let prof = power_profile(&co, m.fibre.length, n, TOL)?;
            let mut csv = Csv::new(&["z_m", "power_w", "local_saturation", "regime", "beer_lambert_w", "linear_w"]);
            for ((z, p), reg) in prof.z.iter().zip(&prof.power).zip(prof.regimes()) {
                let bl = co.input_power * (-co.a * co.b * z).exp();
                let lin = (co.input_power - co.a * z).max(0.0);
                csv.row(vec![(*z).into(), (*p).into(), (co.b * p).into(), reg.as_str().into(), bl.into(), lin.into()]);
            }
            Ok((file_name("fig4a", *pt), csv, co, *prof.power.last().unwrap(), pt.unwrap().1))
        })
        .collect::<Result<_>>()?;

    let mut summary = Csv::new(&[
        "point",
        sweep_column(sweep.parameter),
        "a_w_per_m",
        "b_per_w",
        "saturation",
        "regime",
        "penetration_depth_m",
        "decay_length_m",
        "transmitted_w",
    ]);
    let mut out = ScenarioOutput::default();
    for (i, (name, csv, co, p_out, v)) in runs.into_iter().enumerate() {
        summary.row(vec![
            i.into(),
            to_si(sweep.parameter, v).into(),
            co.a.into(),
            co.b.into(),
            co.saturation().into(),
            co.regime().as_str().into(),
            co.penetration_depth().into(),
            co.decay_length().into(),
            p_out.into(),
        ]);
        out.files.push(OutputFile::csv(name, csv));
    }
    Model::from_config(cfg)?.record(&mut out);
    out.derive("sweep", serde_json::to_value(&sweep).expect("serialisable"));
    out.files.push(OutputFile::csv("fig4a_summary.csv", summary));
    Ok(out)
}

/// Header of the swept quantity, in SI.
fn sweep_column(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::BufferPressureBar => "buffer_pressure_pa",
        SweepParameter::DopantPressureMbar => "dopant_pressure_pa",
        SweepParameter::InputPowerW => "input_power_w",
        SweepParameter::InnerRadiusUm => "inner_radius_m",
        SweepParameter::TemperatureK => "temperature_k",
    }
}

fn to_si(p: SweepParameter, v: f64) -> f64 {
    match p {
        SweepParameter::BufferPressureBar => v * BAR,
        SweepParameter::DopantPressureMbar => v * MBAR,
        SweepParameter::InnerRadiusUm => v * MICRON,
        SweepParameter::InputPowerW | SweepParameter::TemperatureK => v,
    }
}

/// Full-fibre balance at one operating point.
struct Balance {
    buffer_density: f64,
    saturation: f64,
    transmitted: f64,
    cooling_power: f64,
    cooling_rate: f64,
    cooling_rate_linear: f64,
    drop: f64,
    max_drop: f64,
}

fn balance(cfg: &RunConfig) -> Result<Balance> {
    let m = Model::from_config(cfg)?;
    let co = coefficients(&m.mixture, &m.fibre, &m.exciplex, &m.drive);
    let len = m.fibre.length;
    let p_out = power_at(len, &co, TOL)?;
    let p_cool = cooling_power(co.input_power, p_out, m.exciplex.upconversion, m.exciplex.laser_frequency())?;
    let ambient = m.mixture.temperature;
    // heat flow through the cladding per kelvin of core-wall drop
    let per_kelvin = heating_power(ambient - 1.0, &m.fibre, ambient, len)?;
    Ok(Balance {
        buffer_density: m.mixture.buffer_density,
        saturation: co.saturation(),
        transmitted: p_out,
        cooling_power: p_cool,
        cooling_rate: cooling_rate_from_power(p_cool, &m.mixture, &m.fibre, len),
        cooling_rate_linear: cooling_rate_linear(&m.mixture, &m.exciplex),
        drop: -p_cool / per_kelvin,
        max_drop: max_temperature_drop(&m.mixture, &m.fibre, &m.exciplex),
    })
}

fn buffer_axis(cfg: &RunConfig) -> Vec<f64> {
    log_axis(cfg.fig4.buffer_min_bar, cfg.fig4.buffer_max_bar, cfg.fig4.buffer_points)
}

const SERIES_HEADER: [&str; 11] = [
    "series",
    "series_value_si",
    "buffer_pressure_pa",
    "buffer_density_per_m3",
    "saturation",
    "transmitted_w",
    "cooling_power_w",
    "cooling_rate_per_s",
    "cooling_rate_linear_per_s",
    "temperature_drop_k",
    "max_temperature_drop_k",
];

fn series_rows(
    base: &RunConfig,
    series: &str,
    values: &[f64],
    set: impl Fn(&mut RunConfig, f64) + Sync,
    si: f64,
) -> Result<Vec<(f64, f64, Balance)>> {
    let axis = buffer_axis(base);
    let jobs: Vec<(f64, f64)> = values.iter().flat_map(|&v| axis.iter().map(move |&p| (v, p))).collect();
    jobs.par_iter()
        .map(|&(v, p)| {
            let mut c = base.clone();
            set(&mut c, v);
            c.gas.buffer_pressure_bar = p;
            Ok((v * si, p * BAR, balance(&c)?))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e: crate::error::CliError| match e {
            crate::error::CliError::Config(m) => crate::error::CliError::Config(format!("{series} series: {m}")),
            other => other,
        })
}

fn push_rows(csv: &mut Csv, series: &str, rows: &[(f64, f64, Balance)]) {
    for (v, p, b) in rows {
        let cells: Vec<Cell> = vec![
            series.into(),
            (*v).into(),
            (*p).into(),
            b.buffer_density.into(),
            b.saturation.into(),
            b.transmitted.into(),
            b.cooling_power.into(),
            b.cooling_rate.into(),
            b.cooling_rate_linear.into(),
            b.drop.into(),
            b.max_drop.into(),
        ];
        csv.row(cells);
    }
}

/// Buffer pressure of the largest value of `key` within each series value.
fn optima(csv: &mut Csv, series: &str, rows: &[(f64, f64, Balance)], key: impl Fn(&Balance) -> f64) {
    let mut values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    values.dedup();
    for v in values {
        let group: Vec<&(f64, f64, Balance)> = rows.iter().filter(|r| r.0 == v).collect();
        let (k, best) = group
            .iter()
            .enumerate()
            .max_by(|a, b| key(&a.1 .2).total_cmp(&key(&b.1 .2)))
            .expect("non-empty axis");
        let interior = k > 0 && k + 1 < group.len();
        csv.row(vec![series.into(), v.into(), best.1.into(), key(&best.2).into(), interior.into()]);
    }
}

pub fn fig4b(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::default();
    for (pt, c) in outer_points(cfg, cfg.sweep.as_ref()) {
        let rows = series_rows(&c, "inner_radius", &c.fig4.radii_um, |c, v| c.fibre.inner_radius_um = v, MICRON)?;
        let mut csv = Csv::new(&SERIES_HEADER);
        push_rows(&mut csv, "inner_radius", &rows);
        let mut best = Csv::new(&["series", "series_value_si", "buffer_pressure_pa", "cooling_rate_per_s", "interior"]);
        optima(&mut best, "inner_radius", &rows, |b| b.cooling_rate);
        out.files.push(OutputFile::csv(file_name("fig4b", pt), csv));
        out.files.push(OutputFile::csv(file_name("fig4b_optimum", pt), best));
    }
    Model::from_config(cfg)?.record(&mut out);
    out.derive("buffer_axis_bar", buffer_axis(cfg));
    Ok(out)
}

pub fn fig4cd(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::default();
    for (pt, c) in outer_points(cfg, cfg.sweep.as_ref()) {
        let dopant = series_rows(&c, "dopant_pressure", &c.fig4.dopant_pressures_mbar, |c, v| c.gas.dopant_pressure_mbar = v, MBAR)?;
        let radius = series_rows(&c, "inner_radius", &c.fig4.radii_um, |c, v| c.fibre.inner_radius_um = v, MICRON)?;
        let mut csv = Csv::new(&SERIES_HEADER);
        push_rows(&mut csv, "dopant_pressure", &dopant);
        push_rows(&mut csv, "inner_radius", &radius);
        let mut best = Csv::new(&["series", "series_value_si", "buffer_pressure_pa", "temperature_drop_k", "interior"]);
        optima(&mut best, "dopant_pressure", &dopant, |b| b.drop);
        optima(&mut best, "inner_radius", &radius, |b| b.drop);
        out.files.push(OutputFile::csv(file_name("fig4cd", pt), csv));
        out.files.push(OutputFile::csv(file_name("fig4cd_optimum", pt), best));
    }
    Model::from_config(cfg)?.record(&mut out);
    out.derive("buffer_axis_bar", buffer_axis(cfg));
    out.notes.push("temperature_drop_k balances the absorbed cooling power against conduction through the cladding".into());
    Ok(out)
}
