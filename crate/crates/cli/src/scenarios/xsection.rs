use super::ScenarioOutput;
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Csv, OutputFile};
use exciplex::constants::{ANGSTROM, HBAR, K_B};
use exciplex::model::rb_ar;
use exciplex::scattering::{
    cooling_estimate, depth_reduction, effective_potential, maxwell_density, partial_waves, BarrierCriterion, Numerics,
    Potential, ThermalOptions, VelocityDistribution,
};

pub fn scan(cfg: &RunConfig) -> Result<ScenarioOutput> {
    let x = &cfg.xsection;
    let mu = rb_ar::REDUCED_MASS;
    let t = x.temperature_k;
    let ground = rb_ar::ground_potential();
    let excited = rb_ar::excited_potential();
    let criterion = match x.criterion.as_str() {
        "mean_energy" => BarrierCriterion::MeanEnergy,
        _ => BarrierCriterion::DepthFraction(x.depth_fraction),
    };
    let opts = ThermalOptions {
        nodes: x.nodes,
        cutoff: x.cutoff,
        numerics: Numerics::default(),
    };
    let est = cooling_estimate(t, &ground, &excited, mu, criterion, &opts)?;
    let th = &est.thermal;

    // effective potentials, relative to each asymptote
    let mut pots = Csv::new(&["l", "r_m", "ground_rad_per_s", "excited_rad_per_s"]);
    let (r_lo, r_hi) = (2.5 * ANGSTROM, 15.0 * ANGSTROM);
    for &l in &x.potential_l {
        for k in 0..=x.potential_points {
            let r = r_lo + (r_hi - r_lo) * k as f64 / x.potential_points as f64;
            pots.row(vec![
                l.into(),
                r.into(),
                (effective_potential(&ground, l, mu, r) - ground.asymptote()).into(),
                (effective_potential(&excited, l, mu, r) - excited.asymptote()).into(),
            ]);
        }
    }
    let mut wells = Csv::new(&["l", "depth_reduction"]);
    for &l in &x.potential_l {
        wells.row(vec![l.into(), depth_reduction(&excited, l, mu).into()]);
    }

    let dist = VelocityDistribution::new(t, mu)?;
    let mut speeds = Csv::new(&["speed_m_per_s", "weight", "maxwell_density_s_per_m", "sigma_m2", "sigma_restricted_m2"]);
    for i in 0..th.speeds.len() {
        let v = th.speeds[i];
        speeds.row(vec![v.into(), th.weights[i].into(), maxwell_density(v, &dist).into(), th.sigma[i].into(), th.sigma_restricted[i].into()]);
    }

    // partial waves at the mean thermal speed
    let v_mean = (3.0 * K_B * t / mu).sqrt();
    let k = mu * v_mean / HBAR;
    let pw = partial_waves(k, &Potential::Morse(ground), mu, &opts.numerics)?;
    let mut shifts = Csv::new(&["l", "phase_shift_rad", "partial_sigma_m2", "cumulative_sigma_m2"]);
    let mut cum = 0.0;
    for (l, (d, s)) in pw.shifts.iter().zip(pw.partial_cross_sections()).enumerate() {
        cum += s;
        shifts.row(vec![l.into(), (*d).into(), s.into(), cum.into()]);
    }

    let mut summary = Csv::new(&["quantity", "value", "unit"]);
    for (q, v, u) in [
        ("l_cut", est.l_cut as f64, "1"),
        ("sigma_cool", est.sigma_cool, "m^2"),
        ("sigma_elastic", est.sigma_elastic, "m^2"),
        ("depth_reduction_at_l_cut", est.depth_reduction, "1"),
        ("max_partial_wave", th.max_partial_wave as f64, "1"),
        ("quadrature_normalisation", th.normalisation, "1"),
        ("most_probable_speed", dist.most_probable_speed(), "m/s"),
        ("mean_speed", v_mean, "m/s"),
        ("sigma_elastic_at_mean_speed", pw.cross_section()?, "m^2"),
    ] {
        summary.row(vec![q.into(), v.into(), u.into()]);
    }

    let mut out = ScenarioOutput::default();
    out.derive("reduced_mass_kg", mu);
    out.derive("wavenumber_at_mean_speed_per_m", k);
    out.files.push(OutputFile::csv("xsection_potentials.csv", pots));
    out.files.push(OutputFile::csv("xsection_depth_reduction.csv", wells));
    out.files.push(OutputFile::csv("xsection_speeds.csv", speeds));
    out.files.push(OutputFile::csv("xsection_partial_waves.csv", shifts));
    out.files.push(OutputFile::csv("xsection_summary.csv", summary));
    Ok(out)
}
