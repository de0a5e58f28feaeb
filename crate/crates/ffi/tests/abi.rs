use std::ffi::CStr;
use std::ptr;

use vortex_gyro_ffi::*;

fn last_error() -> String {
    let p = vg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn pure_functions() {
    assert!((vg_sensitivity(100, 1.0, 1e10) - 5e-8).abs() <= 1e-12 * 5e-8);
    assert!((vg_sagnac_phase(100, 5e-8, 1.0) - 1e-5).abs() < 1e-20);
    assert!((vg_snr(1e-5, 1e10) - 1.0).abs() < 1e-12);
    assert!(vg_effective_snr(1e-5, 1e10, 2e10) < 1.0);
}

#[test]
fn transfer_through_handles() {
    unsafe {
        let mut schedule = std::mem::zeroed::<VgSchedule>();
        assert_eq!(vg_schedule_default(&mut schedule), VgStatus::Ok);
        let mut traj = ptr::null_mut();
        assert_eq!(vg_transfer_run(&schedule, 201, &mut traj), VgStatus::Ok);
        assert_eq!(vg_trajectory_len(traj), 201);
        let mut pops = [0.0; 5];
        assert_eq!(vg_trajectory_populations(traj, 200, pops.as_mut_ptr()), VgStatus::Ok);
        assert!((pops[2] - 0.6).abs() < 0.02 && (pops[4] - 0.4).abs() < 0.02);
        assert_eq!(vg_trajectory_populations(traj, 201, pops.as_mut_ptr()), VgStatus::InvalidParameter);
        let mut sup = std::mem::zeroed::<VgSuperposition>();
        assert_eq!(vg_trajectory_superposition(traj, 2, &mut sup), VgStatus::Ok);
        assert_eq!(sup.charge, 2);
        vg_trajectory_free(traj);
    }
}

#[test]
fn pattern_image_and_readout() {
    unsafe {
        let mut trap = std::mem::zeroed::<VgTrapParams>();
        vg_trap_default(&mut trap);
        let mut profile = ptr::null_mut();
        assert_eq!(vg_profile_new(&trap, 2, &mut profile), VgStatus::Ok);
        assert!(vg_profile_chemical_potential(profile) > 0.0);

        let a = std::f64::consts::FRAC_1_SQRT_2;
        let sup = VgSuperposition {
            b_plus_re: a,
            b_plus_im: 0.0,
            b_minus_re: a,
            b_minus_im: 0.0,
            charge: 2,
            sagnac_phase: 0.7,
        };
        let mut field = ptr::null_mut();
        let status = vg_density_render(profile, &sup, 128, 128, 1.5 * trap.lx, VgRenderMode::Column, &mut field);
        assert_eq!(status, VgStatus::Ok);
        let mut len = 0;
        assert!(!vg_density_values(field, &mut len).is_null());
        assert_eq!(len, 128 * 128);
        let n = trap.atom_count as f64;
        assert!((vg_density_total_atoms(field) - n).abs() < 1e-3 * n);

        let mut probe = std::mem::zeroed::<VgProbe>();
        vg_probe_default(&mut probe);
        probe.photon_rate = 1e12;
        let mut image = ptr::null_mut();
        assert_eq!(vg_snapshot(field, &probe, 0, &mut image), VgStatus::Ok);
        assert!(vg_image_total(image) > 0);
        let mut est = VgPhaseEstimate::default();
        assert_eq!(vg_extract_fringe_phase(image, 2, &mut est), VgStatus::Ok);
        assert!((est.phi_hat - 0.7).abs() < 0.01, "{}", est.phi_hat);

        vg_image_free(image);
        vg_density_free(field);
        vg_profile_free(profile);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut trap = std::mem::zeroed::<VgTrapParams>();
        vg_trap_default(&mut trap);
        trap.lx = -1.0;
        let mut profile = ptr::null_mut();
        assert_eq!(vg_profile_new(&trap, 1, &mut profile), VgStatus::InvalidParameter);
        assert!(profile.is_null());
        assert!(last_error().contains("lx"));

        assert_eq!(vg_profile_new(ptr::null(), 1, &mut profile), VgStatus::NullPointer);
        assert!(last_error().contains("trap"));

        let times = [0.0, 1.0, 2.0];
        let phases = [0.0, 1.0, 4.0];
        let mut rate = VgRateEstimate::default();
        assert_eq!(vg_estimate_rate(times.as_ptr(), phases.as_ptr(), 3, 1, &mut rate), VgStatus::Aliasing);

        let phases = [0.0, 0.2, 0.4];
        assert_eq!(vg_estimate_rate(times.as_ptr(), phases.as_ptr(), 3, 2, &mut rate), VgStatus::Ok);
        assert!((rate.omega_hat - 0.05).abs() < 1e-12);
        assert!(vg_last_error().is_null());

        vg_profile_free(ptr::null_mut());
        assert!(vg_profile_density(ptr::null(), 0.0, 0.0).is_nan());
    }
}
