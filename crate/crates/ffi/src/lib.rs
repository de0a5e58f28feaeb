//! C ABI for the vortex-gyro simulator.
//!
//! Objects are returned as opaque handles through out-pointers and must be
//! released with the matching `*_free` function. Every fallible call returns
//! a [`VgStatus`]; on failure [`vg_last_error`] describes the problem for the
//! calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use vortex_gyro::condensate::{ChemicalPotential, CondensateProfile, TrapConfig};
use vortex_gyro::imaging::{self, FringeImage, ProbeConfig};
use vortex_gyro::interference::{self, DensityField, Grid, RenderMode, VortexSuperposition};
use vortex_gyro::readout::{self, fit_phase_series};
use vortex_gyro::stirap::{self, AmplitudeTrajectory, PulseSchedule, PulseShape};
use vortex_gyro::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    TrapTooShallow = 3,
    IntegrationFailed = 4,
    IncompleteTransfer = 5,
    GridClipped = 6,
    ChargeMismatch = 7,
    NoSignal = 8,
    Aliasing = 9,
    Panic = 10,
}

impl From<&Error> for VgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::ImageTooBright { .. }
            | Error::ConfigSyntax { .. }
            | Error::UnknownKey(_)
            | Error::Io { .. } => VgStatus::InvalidParameter,
            Error::TrapTooShallow { .. } => VgStatus::TrapTooShallow,
            Error::StepUnderflow { .. } | Error::NormDrift { .. } => VgStatus::IntegrationFailed,
            Error::IncompleteTransfer { .. } => VgStatus::IncompleteTransfer,
            Error::GridClipped { .. } => VgStatus::GridClipped,
            Error::ChargeMismatch { .. } => VgStatus::ChargeMismatch,
            Error::NoSignal => VgStatus::NoSignal,
            Error::Aliasing { .. } => VgStatus::Aliasing,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard<F>(body: F) -> VgStatus
where
    F: FnOnce() -> Result<(), (VgStatus, String)>,
{
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => VgStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            VgStatus::Panic
        }
    }
}

fn lift(e: Error) -> (VgStatus, String) {
    (VgStatus::from(&e), e.to_string())
}

fn null(name: &str) -> (VgStatus, String) {
    (VgStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (VgStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn vg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VgTrapParams {
    pub atom_mass: f64,
    pub scattering_length: f64,
    pub atom_count: u64,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
    pub omega_rho: f64,
    pub barrier_height: f64,
    pub barrier_width: f64,
}

impl From<&VgTrapParams> for TrapConfig {
    fn from(p: &VgTrapParams) -> Self {
        TrapConfig {
            atom_mass: p.atom_mass,
            scattering_length: p.scattering_length,
            atom_count: p.atom_count,
            lx: p.lx,
            ly: p.ly,
            lz: p.lz,
            omega_rho: p.omega_rho,
            barrier_height: p.barrier_height,
            barrier_width: p.barrier_width,
        }
    }
}

impl From<&TrapConfig> for VgTrapParams {
    fn from(t: &TrapConfig) -> Self {
        VgTrapParams {
            atom_mass: t.atom_mass,
            scattering_length: t.scattering_length,
            atom_count: t.atom_count,
            lx: t.lx,
            ly: t.ly,
            lz: t.lz,
            omega_rho: t.omega_rho,
            barrier_height: t.barrier_height,
            barrier_width: t.barrier_width,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub enum VgPulseShape {
    Gaussian = 0,
    SinSquared = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VgSchedule {
    pub omega_plus_peak: f64,
    pub omega_minus_peak: f64,
    pub omega_coupling_peak: f64,
    pub omega0: f64,
    pub detuning: f64,
    pub pulse_shape: VgPulseShape,
    pub t_stokes_center: f64,
    pub t_pump_center: f64,
    pub pulse_width: f64,
    pub mean_field_shift: f64,
}

impl From<&VgSchedule> for PulseSchedule {
    fn from(s: &VgSchedule) -> Self {
        PulseSchedule {
            omega_plus_peak: s.omega_plus_peak,
            omega_minus_peak: s.omega_minus_peak,
            omega_coupling_peak: s.omega_coupling_peak,
            omega0: s.omega0,
            detuning: s.detuning,
            pulse_shape: match s.pulse_shape {
                VgPulseShape::Gaussian => PulseShape::Gaussian,
                VgPulseShape::SinSquared => PulseShape::SinSquared,
            },
            t_stokes_center: s.t_stokes_center,
            t_pump_center: s.t_pump_center,
            pulse_width: s.pulse_width,
            mean_field_shift: s.mean_field_shift,
        }
    }
}

impl From<&PulseSchedule> for VgSchedule {
    fn from(s: &PulseSchedule) -> Self {
        VgSchedule {
            omega_plus_peak: s.omega_plus_peak,
            omega_minus_peak: s.omega_minus_peak,
            omega_coupling_peak: s.omega_coupling_peak,
            omega0: s.omega0,
            detuning: s.detuning,
            pulse_shape: match s.pulse_shape {
                PulseShape::Gaussian => VgPulseShape::Gaussian,
                PulseShape::SinSquared => VgPulseShape::SinSquared,
            },
            t_stokes_center: s.t_stokes_center,
            t_pump_center: s.t_pump_center,
            pulse_width: s.pulse_width,
            mean_field_shift: s.mean_field_shift,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VgSuperposition {
    pub b_plus_re: f64,
    pub b_plus_im: f64,
    pub b_minus_re: f64,
    pub b_minus_im: f64,
    pub charge: u32,
    pub sagnac_phase: f64,
}

impl VgSuperposition {
    fn build(&self) -> Result<VortexSuperposition, Error> {
        Ok(VortexSuperposition::new(
            Complex64::new(self.b_plus_re, self.b_plus_im),
            Complex64::new(self.b_minus_re, self.b_minus_im),
            self.charge,
        )?
        .with_sagnac_phase(self.sagnac_phase))
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub enum VgRenderMode {
    Slice = 0,
    Column = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VgProbe {
    pub photon_rate: f64,
    pub exposure: f64,
    pub loss_scale: f64,
    pub rng_seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VgPhaseEstimate {
    pub phi_hat: f64,
    pub amplitude: f64,
    pub n_photons_used: u64,
    pub low_contrast: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct VgRateEstimate {
    pub omega_hat: f64,
    pub stderr: f64,
    pub n_frames: usize,
    pub residual_rms: f64,
}

/// Thomas–Fermi vortex mode.
pub struct VgProfile(CondensateProfile);
/// Population trajectory of a Raman transfer.
pub struct VgTrajectory(AmplitudeTrajectory);
/// Rendered density on a pixel grid.
pub struct VgDensityField(DensityField);
/// Photon-count image.
pub struct VgFringeImage(FringeImage);

#[no_mangle]
pub unsafe extern "C" fn vg_trap_default(out: *mut VgTrapParams) -> VgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = VgTrapParams::from(&TrapConfig::default());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_schedule_default(out: *mut VgSchedule) -> VgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = VgSchedule::from(&PulseSchedule::default());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_probe_default(out: *mut VgProbe) -> VgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = ProbeConfig::default();
        *out = VgProbe {
            photon_rate: p.photon_rate,
            exposure: p.exposure,
            loss_scale: p.loss_scale,
            rng_seed: p.rng_seed,
        };
        Ok(())
    })
}

/// Solves the trap for a vortex of the given charge with the chemical
/// potential of the non-rotating condensate.
#[no_mangle]
pub unsafe extern "C" fn vg_profile_new(
    trap: *const VgTrapParams,
    charge: i32,
    out: *mut *mut VgProfile,
) -> VgStatus {
    guard(|| {
        let trap = TrapConfig::from(deref(trap, "trap")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let profile = CondensateProfile::new(&trap, charge, ChemicalPotential::Common).map_err(lift)?;
        put(out, VgProfile(profile));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_profile_chemical_potential(profile: *const VgProfile) -> f64 {
    profile.as_ref().map_or(f64::NAN, |p| p.0.chemical_potential())
}

/// Density `N |psi(rho, z)|^2` (m^-3), or NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn vg_profile_density(profile: *const VgProfile, rho: f64, z: f64) -> f64 {
    profile.as_ref().map_or(f64::NAN, |p| p.0.density(rho, z))
}

#[no_mangle]
pub unsafe extern "C" fn vg_profile_free(profile: *mut VgProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Integrates the transfer on `n_samples` evenly spaced times across the
/// schedule's window.
#[no_mangle]
pub unsafe extern "C" fn vg_transfer_run(
    schedule: *const VgSchedule,
    n_samples: usize,
    out: *mut *mut VgTrajectory,
) -> VgStatus {
    guard(|| {
        let schedule = PulseSchedule::from(deref(schedule, "schedule")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let traj = stirap::evolve_amplitudes(&schedule, &schedule.time_grid(n_samples)).map_err(lift)?;
        put(out, VgTrajectory(traj));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_trajectory_len(traj: *const VgTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Writes `[|alpha|^2, |i|^2, |beta|^2, |i'|^2, |gamma|^2]` at sample `k`.
#[no_mangle]
pub unsafe extern "C" fn vg_trajectory_populations(
    traj: *const VgTrajectory,
    k: usize,
    out: *mut f64,
) -> VgStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if k >= traj.len() {
            return Err((VgStatus::InvalidParameter, format!("sample {k} out of range")));
        }
        let pops = traj.populations(k);
        ptr::copy_nonoverlapping(pops.as_ptr(), out, 5);
        Ok(())
    })
}

/// Final superposition of the trajectory for charge `l`.
#[no_mangle]
pub unsafe extern "C" fn vg_trajectory_superposition(
    traj: *const VgTrajectory,
    l: u32,
    out: *mut VgSuperposition,
) -> VgStatus {
    guard(|| {
        let traj = &deref(traj, "traj")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let sup = stirap::final_superposition(traj, l).map_err(lift)?;
        *out = VgSuperposition {
            b_plus_re: sup.b_plus.re,
            b_plus_im: sup.b_plus.im,
            b_minus_re: sup.b_minus.re,
            b_minus_im: sup.b_minus.im,
            charge: sup.charge,
            sagnac_phase: sup.sagnac_phase,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_trajectory_free(traj: *mut VgTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Renders the superposition on an `nx` x `ny` grid spanning
/// `[-half_extent, half_extent]` on both axes.
#[no_mangle]
pub unsafe extern "C" fn vg_density_render(
    profile: *const VgProfile,
    superposition: *const VgSuperposition,
    nx: usize,
    ny: usize,
    half_extent: f64,
    mode: VgRenderMode,
    out: *mut *mut VgDensityField,
) -> VgStatus {
    guard(|| {
        let profile = &deref(profile, "profile")?.0;
        let sup = deref(superposition, "superposition")?.build().map_err(lift)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = Grid {
            nx,
            ny,
            half_width: half_extent,
            half_height: half_extent,
            length_unit: profile.trap().lx,
        };
        let mode = match mode {
            VgRenderMode::Slice => RenderMode::Slice,
            VgRenderMode::Column => RenderMode::Column,
        };
        let field = interference::density(&sup, profile, &grid, mode).map_err(lift)?;
        put(out, VgDensityField(field));
        Ok(())
    })
}

/// Pointer to the `nx * ny` row-major values, `y` increasing with row.
#[no_mangle]
pub unsafe extern "C" fn vg_density_values(field: *const VgDensityField, len: *mut usize) -> *const f64 {
    match field.as_ref() {
        Some(f) => {
            if let Some(len) = len.as_mut() {
                *len = f.0.values.len();
            }
            f.0.values.as_ptr()
        }
        None => ptr::null(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn vg_density_total_atoms(field: *const VgDensityField) -> f64 {
    field.as_ref().map_or(f64::NAN, |f| f.0.total_atoms())
}

#[no_mangle]
pub unsafe extern "C" fn vg_density_free(field: *mut VgDensityField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Draws frame `index` of a series (seed `probe.rng_seed + index`).
#[no_mangle]
pub unsafe extern "C" fn vg_snapshot(
    field: *const VgDensityField,
    probe: *const VgProbe,
    index: u64,
    out: *mut *mut VgFringeImage,
) -> VgStatus {
    guard(|| {
        let field = &deref(field, "field")?.0;
        let p = deref(probe, "probe")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let probe = ProbeConfig {
            photon_rate: p.photon_rate,
            exposure: p.exposure,
            loss_scale: p.loss_scale,
            rng_seed: p.rng_seed,
        };
        let image = imaging::snapshot_indexed(field, &probe, index).map_err(lift)?;
        put(out, VgFringeImage(image));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vg_image_total(image: *const VgFringeImage) -> u64 {
    image.as_ref().map_or(0, |i| i.0.total_detected)
}

#[no_mangle]
pub unsafe extern "C" fn vg_image_counts(image: *const VgFringeImage, len: *mut usize) -> *const u64 {
    match image.as_ref() {
        Some(i) => {
            if let Some(len) = len.as_mut() {
                *len = i.0.counts.len();
            }
            i.0.counts.as_ptr()
        }
        None => ptr::null(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn vg_image_free(image: *mut VgFringeImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

#[no_mangle]
pub unsafe extern "C" fn vg_extract_fringe_phase(
    image: *const VgFringeImage,
    l: u32,
    out: *mut VgPhaseEstimate,
) -> VgStatus {
    guard(|| {
        let image = &deref(image, "image")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let est = readout::extract_fringe_phase(image, l).map_err(lift)?;
        *out = VgPhaseEstimate {
            phi_hat: est.phi_hat,
            amplitude: est.amplitude,
            n_photons_used: est.n_photons_used,
            low_contrast: est.low_contrast,
        };
        Ok(())
    })
}

/// Fits the rotation rate to `n` (time, wrapped phase) pairs.
#[no_mangle]
pub unsafe extern "C" fn vg_estimate_rate(
    times: *const f64,
    phases: *const f64,
    n: usize,
    l: u32,
    out: *mut VgRateEstimate,
) -> VgStatus {
    guard(|| {
        if times.is_null() {
            return Err(null("times"));
        }
        if phases.is_null() {
            return Err(null("phases"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let times = std::slice::from_raw_parts(times, n);
        let phases = std::slice::from_raw_parts(phases, n);
        let fit = fit_phase_series(times, phases, l).map_err(lift)?;
        *out = VgRateEstimate {
            omega_hat: fit.omega_hat,
            stderr: fit.stderr,
            n_frames: fit.n_frames,
            residual_rms: fit.residual_rms,
        };
        Ok(())
    })
}

/// `2 l omega t`.
#[no_mangle]
pub extern "C" fn vg_sagnac_phase(l: u32, omega: f64, t: f64) -> f64 {
    interference::sagnac_phase(l, omega, t)
}

/// `1 / (2 l t sqrt(n_sc))`.
#[no_mangle]
pub extern "C" fn vg_sensitivity(l: u32, t: f64, n_sc: f64) -> f64 {
    imaging::sensitivity(l, t, n_sc)
}

#[no_mangle]
pub extern "C" fn vg_snr(phi_omega: f64, n_sc: f64) -> f64 {
    imaging::snr(phi_omega, n_sc)
}

#[no_mangle]
pub extern "C" fn vg_effective_snr(phi_omega: f64, n_sc: f64, loss_scale: f64) -> f64 {
    imaging::effective_snr(phi_omega, n_sc, loss_scale)
}
