//! Collision runs on a reduced box (r ≤ 60 Å, dt = 0.2 fs); the outgoing
//! packets stay inside it for the whole run.

use exciplex::constants::{ANGSTROM, FEMTOSECOND};
use exciplex::model::{rb_ar, DriveSpec};
use exciplex::wavepacket::*;

fn compact(temperature: f64) -> CollisionConfig {
    let mut c = CollisionConfig::rb_ar(temperature).unwrap();
    c.grid = SpatialGrid::new(1.0 * ANGSTROM, 60.0 * ANGSTROM, 2048).unwrap();
    c.dt = 0.2 * FEMTOSECOND;
    c.sample_every = 25;
    c
}

#[test]
fn collision_observables_and_kinematic_absorption_time() {
    let base = compact(300.0);
    let traj = run_collision(&base).unwrap();
    assert!(traj.max_norm_drift < 1e-6);

    let trace = excited_population_trace(&traj);
    assert_eq!(trace[0].1, 0.0);
    let plateau = excited_plateau(&traj, 0.15).unwrap();
    assert!(plateau.mean > 1e-6 && plateau.mean < 1e-4, "{plateau:?}");
    assert!(plateau.drift < 0.05, "{plateau:?}");
    // off-resonant ripple is small compared with the post-crossing plateau
    let window = absorption_window(&traj, 0.1).unwrap();
    let before: f64 = trace.iter().filter(|p| p.0 < window.start).map(|p| p.1).fold(0.0, f64::max);
    assert!(before < 0.2 * plateau.mean);

    let (vg, ve) = outgoing_slopes(&traj, 0.15).unwrap();
    assert!(vg > 0.0 && ve > 0.0 && ve < vg, "{vg} {ve}");
    let tau = window.duration();
    assert!(tau > 0.3e-12 && tau < 3e-12, "{tau}");

    // τ is kinematic: a ten times weaker drive gives the same window
    let weak = run_collision(&base.with_rabi(base.rabi / 10.0)).unwrap();
    let tau_weak = absorption_time(&weak, 0.1).unwrap();
    assert!((tau_weak / tau - 1.0).abs() < 1e-3, "{tau_weak} vs {tau}");
    let ratio = excited_plateau(&weak, 0.15).unwrap().mean / plateau.mean;
    assert!((ratio - 0.01).abs() < 1e-4, "{ratio}");

    // a slower packet spends longer in the resonance window
    let cold = run_collision(&compact(75.0)).unwrap();
    let tau_cold = absorption_time(&cold, 0.1).unwrap();
    assert!(tau_cold > tau, "{tau_cold} vs {tau}");
}

#[test]
fn turning_point_of_the_ground_packet() {
    let mut c = compact(300.0);
    c.rabi = 0.0;
    let traj = run_collision(&c).unwrap();
    let r_min = traj.samples.iter().filter_map(|s| s.mean_r_ground).fold(f64::INFINITY, f64::min);
    let a0 = classical_turning_point(&c).unwrap();
    // the packet centroid cannot pass the classical wall, and stays within
    // one initial packet width of it
    assert!(r_min > a0);
    assert!(r_min - a0 < c.packet.sigma(), "{} vs {}", r_min / ANGSTROM, a0 / ANGSTROM);
}

#[test]
fn excited_plateau_converges_under_refinement() {
    let mut coarse = compact(300.0);
    coarse.grid = SpatialGrid::new(1.0 * ANGSTROM, 50.0 * ANGSTROM, 1024).unwrap();
    let mut fine = coarse;
    fine.grid.intervals *= 2;
    fine.dt /= 2.0;
    fine.sample_every *= 2;
    let a = excited_plateau(&run_collision(&coarse).unwrap(), 0.15).unwrap().mean;
    let b = excited_plateau(&run_collision(&fine).unwrap(), 0.15).unwrap().mean;
    assert!((a / b - 1.0).abs() < 0.01, "{a} vs {b}");
}

#[test]
fn landau_zener_tunnelling_negligible_for_fibre_fields() {
    let fibre = rb_ar::fibre(0.01).unwrap();
    let ex = rb_ar::exciplex();
    let field = DriveSpec::field_amplitude_at(1.0, &fibre);
    let chi = rabi_from_field(ex.effective_dipole(), field);
    let c = compact(300.0);
    let g = rb_ar::ground_potential();
    let a0 = classical_turning_point(&c).unwrap();
    let slope = g.derivative(a0).abs();
    let v = c.packet.group_velocity(c.reduced_mass);
    let p = landau_zener_parameter(chi, slope, v).unwrap();
    let oracle = (-std::f64::consts::PI * chi * chi / (2.0 * slope * v)).exp();
    assert!((p - oracle).abs() < 1e-15);
    assert!(p < 1.0 && 1.0 - p < 1e-3, "{p}");
}
