use std::f64::consts::PI;

use num_complex::Complex64;
use vortex_gyro::condensate::{ChemicalPotential, CondensateProfile, TrapConfig};
use vortex_gyro::imaging::{snapshot_indexed, FringeImage, ProbeConfig};
use vortex_gyro::interference::{density, Grid, RenderMode, VortexSuperposition};
use vortex_gyro::readout::{estimate_rotation_rate, extract_fringe_phase, wrap_phase};

fn profile(l: i32) -> CondensateProfile {
    CondensateProfile::new(&TrapConfig::default(), l, ChemicalPotential::Common).unwrap()
}

#[test]
fn noiseless_phase_recovery() {
    let mut worst: f64 = 0.0;
    for l in [1u32, 2, 5] {
        let p = profile(l as i32);
        let grid = Grid::for_trap(p.trap());
        for k in 0..32 {
            let phi = -PI + 2.0 * PI * (k as f64 + 0.37) / 32.0;
            let sup = VortexSuperposition::equal(l).unwrap().with_sagnac_phase(phi);
            let field = density(&sup, &p, &grid, RenderMode::Column).unwrap();
            let image = FringeImage::expected(&field, 1e15).unwrap();
            let est = extract_fringe_phase(&image, l).unwrap();
            worst = worst.max(wrap_phase(est.phi_hat - phi).abs());
        }
    }
    println!("worst noiseless error {worst:e}");
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn wraps_past_pi() {
    let p = profile(2);
    let grid = Grid::for_trap(p.trap());
    let sup = VortexSuperposition::equal(2).unwrap().with_sagnac_phase(PI + 0.1);
    let field = density(&sup, &p, &grid, RenderMode::Column).unwrap();
    let est = extract_fringe_phase(&FringeImage::expected(&field, 1e15).unwrap(), 2).unwrap();
    assert!((est.phi_hat - (-PI + 0.1)).abs() <= 1e-6);
}

#[test]
fn single_component_has_low_contrast() {
    let p = profile(2);
    let grid = Grid::for_trap(p.trap());
    let sup = VortexSuperposition::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 2).unwrap();
    let field = density(&sup, &p, &grid, RenderMode::Column).unwrap();
    let est = extract_fringe_phase(&FringeImage::expected(&field, 1e15).unwrap(), 2).unwrap();
    assert!(est.amplitude <= 1e-3, "{}", est.amplitude);
    assert!(est.low_contrast);
}

#[test]
fn rigid_image_rotation_shifts_phase() {
    let p = profile(2);
    let grid = Grid::for_trap(p.trap());
    let field = density(&VortexSuperposition::equal(2).unwrap(), &p, &grid, RenderMode::Column).unwrap();
    let base = extract_fringe_phase(&FringeImage::expected(&field, 1e15).unwrap(), 2).unwrap();
    for chi in [0.05, 0.4, -1.1] {
        // Rotating the image by chi is rendering the pattern with phi_Omega = 2 l chi.
        let sup = VortexSuperposition::equal(2).unwrap().with_sagnac_phase(4.0 * chi);
        let rotated = density(&sup, &p, &grid, RenderMode::Column).unwrap();
        let est = extract_fringe_phase(&FringeImage::expected(&rotated, 1e15).unwrap(), 2).unwrap();
        assert!(wrap_phase(est.phi_hat - base.phi_hat - 4.0 * chi).abs() <= 1e-6);
    }
}

#[test]
fn phase_noise_near_shot_noise_floor() {
    let p = profile(2);
    let grid = Grid::for_trap(p.trap());
    let field = density(&VortexSuperposition::equal(2).unwrap().with_sagnac_phase(0.3), &p, &grid, RenderMode::Column).unwrap();
    let probe = ProbeConfig { photon_rate: 1e9, exposure: 1e-4, rng_seed: 99, ..ProbeConfig::default() };
    let n = 200;
    let phases: Vec<f64> = (0..n)
        .map(|k| extract_fringe_phase(&snapshot_indexed(&field, &probe, k).unwrap(), 2).unwrap().phi_hat)
        .collect();
    let mean = phases.iter().sum::<f64>() / n as f64;
    let std = (phases.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    let floor = 1.0 / probe.mean_photons().sqrt();
    println!("std/floor = {}", std / floor);
    assert!(std >= floor && std <= 3.0 * floor, "{}", std / floor);
}

fn frames(l: u32, omega: f64, times: &[f64], probe: Option<&ProbeConfig>, offset: f64) -> Vec<(f64, FringeImage)> {
    let p = profile(l as i32);
    let grid = Grid::for_trap(p.trap());
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let phase = vortex_gyro::interference::sagnac_phase(l, omega, t) + offset;
            let sup = VortexSuperposition::equal(l).unwrap().with_sagnac_phase(phase);
            let field = density(&sup, &p, &grid, RenderMode::Column).unwrap();
            let image = match probe {
                Some(probe) => snapshot_indexed(&field, probe, k as u64).unwrap(),
                None => FringeImage::expected(&field, 1e15).unwrap(),
            };
            (t, image)
        })
        .collect()
}

#[test]
fn noiseless_rate_recovery() {
    let times: Vec<f64> = (0..=10).map(f64::from).collect();
    let fit = estimate_rotation_rate(&frames(2, 0.05, &times, None, 0.0), 2).unwrap();
    assert!((fit.omega_hat - 0.05).abs() <= 1e-6, "{}", fit.omega_hat);
}

#[test]
fn global_rotation_leaves_rate_unchanged() {
    let times: Vec<f64> = (0..=10).map(f64::from).collect();
    let base = estimate_rotation_rate(&frames(2, 0.05, &times, None, 0.0), 2).unwrap();
    // A rigid turn by chi of every image adds 2 l chi to every phase.
    let turned = estimate_rotation_rate(&frames(2, 0.05, &times, None, 4.0 * 0.3), 2).unwrap();
    assert!((turned.omega_hat - base.omega_hat).abs() <= 1e-7);
}

#[test]
fn bright_frames_have_small_bias() {
    let omega = 0.05;
    let times: Vec<f64> = (0..=10).map(f64::from).collect();
    let probe = ProbeConfig { photon_rate: 1e8, exposure: 1.0, rng_seed: 5, ..ProbeConfig::default() };
    let runs = 20;
    let mean: f64 = (0..runs)
        .map(|s| {
            let probe = ProbeConfig { rng_seed: 100 * s, ..probe };
            estimate_rotation_rate(&frames(2, omega, &times, Some(&probe), 0.0), 2).unwrap().omega_hat
        })
        .sum::<f64>()
        / runs as f64;
    assert!((mean - omega).abs() <= 1e-4 * omega, "bias {:e}", mean - omega);
}

#[test]
fn static_pattern_gives_null_rate() {
    let times: Vec<f64> = (0..10).map(|k| 0.1 * k as f64).collect();
    let probe = ProbeConfig { photon_rate: 1e10, exposure: 1e-4, ..ProbeConfig::default() };
    let mut within = 0;
    let runs = 40;
    for s in 0..runs {
        let probe = ProbeConfig { rng_seed: 1000 * s, ..probe };
        let fit = estimate_rotation_rate(&frames(2, 0.0, &times, Some(&probe), 0.0), 2).unwrap();
        // Residual scatter should match the per-frame shot noise.
        assert!(fit.residual_rms < 5.0 / probe.mean_photons().sqrt());
        if fit.omega_hat.abs() <= 3.0 * fit.stderr {
            within += 1;
        }
    }
    assert!(within >= 35, "{within}/{runs} runs within 3 stderr");
}
