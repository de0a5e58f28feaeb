use vortex_gyro::stirap::{
    evolve_amplitudes, evolve_amplitudes_with, final_superposition, EvolveOptions, PulseSchedule,
    PulseShape,
};

fn final_pops(schedule: &PulseSchedule) -> [f64; 5] {
    evolve_amplitudes(schedule, &schedule.time_grid(201)).unwrap().final_populations()
}

#[test]
fn norm_is_conserved_along_the_trajectory() {
    let s = PulseSchedule::default();
    let traj = evolve_amplitudes(&s, &s.time_grid(2001)).unwrap();
    assert!(traj.max_norm_error() <= 1e-6);
    assert!((traj.transfer_function[0] - 1.0).abs() < 1e-12);
    assert!((traj.transfer_function[traj.len() - 1] + 1.0).abs() <= 0.02);
    assert!(traj.max_excited_population() < 1e-2);
}

#[test]
fn amplitude_ratio_follows_pump_ratio() {
    for fraction in [0.2, 0.5, 0.6, 0.75, 0.9] {
        let s = PulseSchedule::counter_intuitive(2.0 * std::f64::consts::PI * 1e3, 2e-3, fraction);
        let traj = evolve_amplitudes(&s, &s.time_grid(101)).unwrap();
        let last = traj.len() - 1;
        let ratio = traj.beta[last].norm() / traj.gamma[last].norm();
        let target = s.omega_plus_peak / s.omega_minus_peak;
        assert!((ratio - target).abs() <= 0.05 * target, "fraction {fraction}: {ratio} vs {target}");
    }
}

#[test]
fn doubling_the_width_barely_changes_the_result() {
    let s = PulseSchedule::default();
    let wide = PulseSchedule::counter_intuitive(s.omega0, 2.0 * s.pulse_width, 0.6);
    let (a, b) = (final_pops(&s), final_pops(&wide));
    for k in 0..5 {
        assert!((a[k] - b[k]).abs() < 0.01, "state {k}: {} vs {}", a[k], b[k]);
    }
}

#[test]
fn tighter_tolerance_agrees() {
    let s = PulseSchedule::default();
    let grid = s.time_grid(51);
    let base = evolve_amplitudes(&s, &grid).unwrap().final_populations();
    let opts = EvolveOptions {
        rtol: 0.5e-9,
        atol: 0.5e-12,
        ..EvolveOptions::default()
    };
    let fine = evolve_amplitudes_with(&s, &grid, &opts).unwrap().final_populations();
    for k in 0..5 {
        assert!((base[k] - fine[k]).abs() < 1e-4);
    }
}

#[test]
fn decoupled_minus_branch_stays_empty() {
    let s = PulseSchedule {
        omega_minus_peak: 0.0,
        ..PulseSchedule::default()
    };
    let traj = evolve_amplitudes(&s, &s.time_grid(301)).unwrap();
    assert!(traj.gamma.iter().all(|g| g.norm() == 0.0));
    assert!(traj.final_populations()[2] >= 0.99);
}

#[test]
fn sixty_forty_superposition() {
    let s = PulseSchedule::default();
    let traj = evolve_amplitudes(&s, &s.time_grid(201)).unwrap();
    let sup = final_superposition(&traj, 2).unwrap();
    assert!((sup.b_plus.norm_sqr() - 0.6).abs() <= 0.02);
    assert!((sup.b_plus.norm_sqr() + sup.b_minus.norm_sqr() - 1.0).abs() <= 1e-12);
}

#[test]
fn gaussian_pulses_still_transfer() {
    let s = PulseSchedule {
        pulse_shape: PulseShape::Gaussian,
        ..PulseSchedule::default()
    };
    let [alpha, _, beta, _, gamma] = final_pops(&s);
    assert!(alpha < 0.01);
    assert!((beta - 0.6).abs() < 0.03 && (gamma - 0.4).abs() < 0.03, "{beta} {gamma}");
}
