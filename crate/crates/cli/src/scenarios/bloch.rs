use super::{Model, ScenarioOutput};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Csv, OutputFile};
use exciplex::bloch::{
    cos_theta_variance, excited_population, monte_carlo_bloch, population_variance, spin_distribution_adaptive,
    DiffusionParams, MonteCarloConfig, MonteCarloResult, PulseAngle,
};
use rayon::prelude::*;

pub fn fig3(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let m = Model::from_config(cfg)?;
    let b = &cfg.bloch;
    let gamma = m.exciplex.linewidth;
    let angle = match b.pulse_angle.as_str() {
        "nominal" => PulseAngle::Nominal,
        "exponential" => PulseAngle::Exponential,
        _ => PulseAngle::Calibrated,
    };

    let runs: Vec<(f64, DiffusionParams, MonteCarloResult)> = b
        .diffusion_ratios
        .par_iter()
        .enumerate()
        .map(|(i, &ratio)| {
            let d = ratio * gamma;
            let kappa = b.collision_factor * d.max(gamma);
            let params = DiffusionParams::from_rates(d, gamma, kappa, m.drive.pulse_duration)?;
            let mut mc = MonteCarloConfig::new(b.trajectories, b.relaxation_times / (2.0 * d + gamma), cfg.seed.wrapping_add(i as u64));
            mc.n_samples = b.samples;
            mc.histogram_bins = b.histogram_bins;
            mc.pulse_angle = angle;
            let res = monte_carlo_bloch(&params, &mc)?;
            Ok((ratio, params, res))
        })
        .collect::<Result<_>>()?;

    let mut dyn_csv = Csv::new(&[
        "diffusion_ratio",
        "t_s",
        "excited_mc",
        "excited_mc_stderr",
        "excited_analytic",
        "cos_variance_mc",
        "cos_variance_mc_stderr",
        "cos_variance_analytic",
        "excited_std_mc",
        "excited_std_analytic",
    ]);
    let mut hist_csv = Csv::new(&["diffusion_ratio", "cos_theta_lo", "cos_theta_hi", "count", "density_mc", "density_analytic"]);
    let mut steady_csv = Csv::new(&["diffusion_ratio", "diffusion_rate_per_s", "collision_rate_per_s", "steady_excited", "final_excited_mc", "final_excited_mc_stderr", "z_score"]);
    let mut out = ScenarioOutput::default();

    for (ratio, params, res) in &runs {
        for (k, &t) in res.times.iter().enumerate() {
            let rho = excited_population(params, t)?;
            let std_pop = population_variance(params, t)?;
            dyn_csv.row(vec![
                (*ratio).into(),
                t.into(),
                res.mean_excited[k].into(),
                res.mean_stderr[k].into(),
                rho.into(),
                res.cos_variance[k].into(),
                res.cos_variance_stderr[k].into(),
                cos_theta_variance(params, t).into(),
                res.std_excited[k].into(),
                std_pop.into(),
            ]);
        }
        let t_end = *res.times.last().unwrap();
        let dist = spin_distribution_adaptive(params, t_end, 1e-12)?;
        let bins = res.histogram.len();
        let n = res.final_cos_theta.len() as f64;
        for (j, &count) in res.histogram.iter().enumerate() {
            let lo = -1.0 + 2.0 * j as f64 / bins as f64;
            let hi = -1.0 + 2.0 * (j + 1) as f64 / bins as f64;
            let analytic = (dist.cdf(hi) - dist.cdf(lo)) / (hi - lo);
            hist_csv.row(vec![(*ratio).into(), lo.into(), hi.into(), (count).into(), (count as f64 / (n * (hi - lo))).into(), analytic.into()]);
        }
        let last = res.times.len() - 1;
        let steady = params.steady_state_population();
        let rho_end = excited_population(params, t_end)?;
        let z = (res.mean_excited[last] - rho_end) / res.mean_stderr[last];
        steady_csv.row(vec![
            (*ratio).into(),
            params.diffusion_rate.into(),
            params.collision_rate.into(),
            steady.into(),
            res.mean_excited[last].into(),
            res.mean_stderr[last].into(),
            z.into(),
        ]);
        if !res.phase_randomised {
            out.notes.push(format!("D/gamma = {ratio}: phases not randomised between pulses"));
        }
    }
    m.record(&mut out);
    out.derive("linewidth_rad_per_s", gamma);
    out.files.push(OutputFile::csv("bloch_dynamics.csv", dyn_csv));
    out.files.push(OutputFile::csv("bloch_histogram.csv", hist_csv));
    out.files.push(OutputFile::csv("bloch_steady_state.csv", steady_csv));
    Ok(out)
}
