//! Run configuration as flat `key = value` text.
//!
//! Keys are dotted (`trap.atom_count`, `probe.photon_rate`), values are SI.
//! Blank lines and everything after `#` are ignored. [`RunConfig`]'s
//! `Display` output parses back to an identical configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::condensate::{ChemicalPotential, TrapConfig};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::imaging::ProbeConfig;
use crate::interference::{Grid, RenderMode, VortexSuperposition};
use crate::stirap::{PulseSchedule, PulseShape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionConfig {
    /// Charge magnitude `l`.
    pub l: u32,
    /// Magnitude of the `+l` amplitude before normalization.
    pub b_plus: f64,
    /// Magnitude of the `-l` amplitude before normalization.
    pub b_minus: f64,
    /// Phase of `b+` relative to `b-` (rad).
    pub relative_phase: f64,
}

impl Default for SuperpositionConfig {
    fn default() -> Self {
        SuperpositionConfig {
            l: 2,
            b_plus: std::f64::consts::FRAC_1_SQRT_2,
            b_minus: std::f64::consts::FRAC_1_SQRT_2,
            relative_phase: 0.0,
        }
    }
}

impl SuperpositionConfig {
    pub fn build(&self) -> Result<VortexSuperposition> {
        ensure_non_negative("superposition.b_plus", self.b_plus)?;
        ensure_non_negative("superposition.b_minus", self.b_minus)?;
        if !self.relative_phase.is_finite() {
            return Err(Error::invalid("superposition.relative_phase", "must be finite"));
        }
        VortexSuperposition::normalized(
            Complex64::from_polar(self.b_plus, self.relative_phase),
            Complex64::new(self.b_minus, 0.0),
            self.l,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationConfig {
    /// Lab-frame rotation rate (rad/s).
    pub omega: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_frames: usize,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig {
            omega: 6e-6,
            t_start: 0.0,
            t_end: 1.0,
            n_frames: 10,
        }
    }
}

impl RotationConfig {
    /// Frame times, evenly spaced over `[t_start, t_end]`.
    pub fn frame_times(&self) -> Vec<f64> {
        if self.n_frames == 1 {
            return vec![self.t_start];
        }
        (0..self.n_frames)
            .map(|k| {
                self.t_start + (self.t_end - self.t_start) * k as f64 / (self.n_frames - 1) as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    /// Half-width of the imaged square (m); `None` means `1.5 trap.lx`.
    pub half_extent: Option<f64>,
    pub mode: RenderMode,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nx: 256,
            ny: 256,
            half_extent: None,
            mode: RenderMode::Slice,
        }
    }
}

impl GridConfig {
    pub fn build(&self, trap: &TrapConfig) -> Grid {
        let half = self.half_extent.unwrap_or(1.5 * trap.lx);
        Grid {
            nx: self.nx,
            ny: self.ny,
            half_width: half,
            half_height: half,
            length_unit: trap.lx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
    /// Interrogation time used for the phase and the sensitivity (s).
    pub time: f64,
    /// Photon rate of the reported operating point (1/s).
    pub n_operating: f64,
}

impl Default for SnrConfig {
    fn default() -> Self {
        SnrConfig {
            n_min: 1e6,
            n_max: 1e12,
            points: 121,
            time: 1.0,
            n_operating: 1e10,
        }
    }
}

/// Everything a CLI run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trap: TrapConfig,
    pub chemical_potential: ChemicalPotential,
    pub schedule: PulseSchedule,
    /// Number of output samples along the transfer.
    pub transfer_samples: usize,
    pub superposition: SuperpositionConfig,
    pub rotation: RotationConfig,
    pub probe: ProbeConfig,
    pub grid: GridConfig,
    pub snr: SnrConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trap: TrapConfig::default(),
            chemical_potential: ChemicalPotential::Common,
            schedule: PulseSchedule::default(),
            transfer_samples: 2001,
            superposition: SuperpositionConfig::default(),
            rotation: RotationConfig::default(),
            probe: ProbeConfig::default(),
            grid: GridConfig::default(),
            snr: SnrConfig::default(),
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| Error::invalid(key, format!("cannot parse `{value}`: {e}")))
}

impl RunConfig {
    /// Reads a config file on top of the defaults.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Applies `key=value` lines in order.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigSyntax {
                line: index + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| Error::ConfigSyntax {
            line: 0,
            reason: format!("override `{assignment}` is not `key=value`"),
        })?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value;
        match key {
            "trap.atom_mass" => self.trap.atom_mass = parse(key, v)?,
            "trap.scattering_length" => self.trap.scattering_length = parse(key, v)?,
            "trap.atom_count" => self.trap.atom_count = parse(key, v)?,
            "trap.lx" => self.trap.lx = parse(key, v)?,
            "trap.ly" => self.trap.ly = parse(key, v)?,
            "trap.lz" => self.trap.lz = parse(key, v)?,
            "trap.omega_rho" => self.trap.omega_rho = parse(key, v)?,
            "trap.barrier_height" => self.trap.barrier_height = parse(key, v)?,
            "trap.barrier_width" => self.trap.barrier_width = parse(key, v)?,
            "trap.chemical_potential" => {
                self.chemical_potential = match v {
                    "common" => ChemicalPotential::Common,
                    "per_charge" => ChemicalPotential::PerCharge,
                    other => ChemicalPotential::Fixed(parse(key, other)?),
                }
            }
            "schedule.omega_plus_peak" => self.schedule.omega_plus_peak = parse(key, v)?,
            "schedule.omega_minus_peak" => self.schedule.omega_minus_peak = parse(key, v)?,
            "schedule.omega_coupling_peak" => self.schedule.omega_coupling_peak = parse(key, v)?,
            "schedule.omega0" => self.schedule.omega0 = parse(key, v)?,
            "schedule.detuning" => self.schedule.detuning = parse(key, v)?,
            "schedule.pulse_shape" => self.schedule.pulse_shape = v.parse::<PulseShape>()?,
            "schedule.t_stokes_center" => self.schedule.t_stokes_center = parse(key, v)?,
            "schedule.t_pump_center" => self.schedule.t_pump_center = parse(key, v)?,
            "schedule.pulse_width" => self.schedule.pulse_width = parse(key, v)?,
            "schedule.mean_field_shift" => self.schedule.mean_field_shift = parse(key, v)?,
            "schedule.samples" => self.transfer_samples = parse(key, v)?,
            "superposition.l" => self.superposition.l = parse(key, v)?,
            "superposition.b_plus" => self.superposition.b_plus = parse(key, v)?,
            "superposition.b_minus" => self.superposition.b_minus = parse(key, v)?,
            "superposition.relative_phase" => self.superposition.relative_phase = parse(key, v)?,
            "rotation.omega" => self.rotation.omega = parse(key, v)?,
            "rotation.t_start" => self.rotation.t_start = parse(key, v)?,
            "rotation.t_end" => self.rotation.t_end = parse(key, v)?,
            "rotation.n_frames" => self.rotation.n_frames = parse(key, v)?,
            "probe.photon_rate" => self.probe.photon_rate = parse(key, v)?,
            "probe.exposure" => self.probe.exposure = parse(key, v)?,
            "probe.loss_scale" => self.probe.loss_scale = parse(key, v)?,
            "grid.nx" => self.grid.nx = parse(key, v)?,
            "grid.ny" => self.grid.ny = parse(key, v)?,
            "grid.half_extent" => {
                self.grid.half_extent = match v {
                    "auto" => None,
                    other => Some(parse(key, other)?),
                }
            }
            "grid.mode" => self.grid.mode = v.parse()?,
            "snr.n_min" => self.snr.n_min = parse(key, v)?,
            "snr.n_max" => self.snr.n_max = parse(key, v)?,
            "snr.points" => self.snr.points = parse(key, v)?,
            "snr.time" => self.snr.time = parse(key, v)?,
            "snr.n_operating" => self.snr.n_operating = parse(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "seed" => self.seed = parse(key, v)?,
            other => return Err(Error::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Probe settings with the run seed.
    pub fn seeded_probe(&self) -> ProbeConfig {
        ProbeConfig {
            rng_seed: self.seed,
            ..self.probe
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.trap.validate()?;
        if let ChemicalPotential::Fixed(mu) = self.chemical_potential {
            if !mu.is_finite() {
                return Err(Error::invalid("trap.chemical_potential", "must be finite"));
            }
        }
        self.schedule.validate()?;
        if self.transfer_samples < 2 {
            return Err(Error::invalid("schedule.samples", "need at least 2"));
        }
        self.superposition.build()?;
        let r = &self.rotation;
        if !r.omega.is_finite() {
            return Err(Error::invalid("rotation.omega", "must be finite"));
        }
        ensure_non_negative("rotation.t_start", r.t_start)?;
        if !(r.t_end.is_finite() && r.t_end >= r.t_start) {
            return Err(Error::invalid("rotation.t_end", "must be >= rotation.t_start"));
        }
        if r.n_frames < 1 {
            return Err(Error::invalid("rotation.n_frames", "must be >= 1"));
        }
        if r.n_frames > 1 && r.t_end == r.t_start {
            return Err(Error::invalid("rotation.t_end", "frames need a nonzero time span"));
        }
        self.probe.validate()?;
        if let Some(h) = self.grid.half_extent {
            ensure_positive("grid.half_extent", h)?;
        }
        self.grid.build(&self.trap).validate()?;
        ensure_positive("snr.n_min", self.snr.n_min)?;
        ensure_positive("snr.n_max", self.snr.n_max)?;
        ensure_positive("snr.time", self.snr.time)?;
        ensure_positive("snr.n_operating", self.snr.n_operating)?;
        if self.snr.n_max <= self.snr.n_min {
            return Err(Error::invalid("snr.n_max", "must exceed snr.n_min"));
        }
        if self.snr.points < 2 {
            return Err(Error::invalid("snr.points", "need at least 2"));
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.trap;
        writeln!(f, "trap.atom_mass = {:?}", t.atom_mass)?;
        writeln!(f, "trap.scattering_length = {:?}", t.scattering_length)?;
        writeln!(f, "trap.atom_count = {}", t.atom_count)?;
        writeln!(f, "trap.lx = {:?}", t.lx)?;
        writeln!(f, "trap.ly = {:?}", t.ly)?;
        writeln!(f, "trap.lz = {:?}", t.lz)?;
        writeln!(f, "trap.omega_rho = {:?}", t.omega_rho)?;
        writeln!(f, "trap.barrier_height = {:?}", t.barrier_height)?;
        writeln!(f, "trap.barrier_width = {:?}", t.barrier_width)?;
        match self.chemical_potential {
            ChemicalPotential::Common => writeln!(f, "trap.chemical_potential = common")?,
            ChemicalPotential::PerCharge => writeln!(f, "trap.chemical_potential = per_charge")?,
            ChemicalPotential::Fixed(mu) => writeln!(f, "trap.chemical_potential = {mu:?}")?,
        }
        let s = &self.schedule;
        writeln!(f, "schedule.omega_plus_peak = {:?}", s.omega_plus_peak)?;
        writeln!(f, "schedule.omega_minus_peak = {:?}", s.omega_minus_peak)?;
        writeln!(f, "schedule.omega_coupling_peak = {:?}", s.omega_coupling_peak)?;
        writeln!(f, "schedule.omega0 = {:?}", s.omega0)?;
        writeln!(f, "schedule.detuning = {:?}", s.detuning)?;
        writeln!(f, "schedule.pulse_shape = {}", s.pulse_shape.name())?;
        writeln!(f, "schedule.t_stokes_center = {:?}", s.t_stokes_center)?;
        writeln!(f, "schedule.t_pump_center = {:?}", s.t_pump_center)?;
        writeln!(f, "schedule.pulse_width = {:?}", s.pulse_width)?;
        writeln!(f, "schedule.mean_field_shift = {:?}", s.mean_field_shift)?;
        writeln!(f, "schedule.samples = {}", self.transfer_samples)?;
        let p = &self.superposition;
        writeln!(f, "superposition.l = {}", p.l)?;
        writeln!(f, "superposition.b_plus = {:?}", p.b_plus)?;
        writeln!(f, "superposition.b_minus = {:?}", p.b_minus)?;
        writeln!(f, "superposition.relative_phase = {:?}", p.relative_phase)?;
        let r = &self.rotation;
        writeln!(f, "rotation.omega = {:?}", r.omega)?;
        writeln!(f, "rotation.t_start = {:?}", r.t_start)?;
        writeln!(f, "rotation.t_end = {:?}", r.t_end)?;
        writeln!(f, "rotation.n_frames = {}", r.n_frames)?;
        writeln!(f, "probe.photon_rate = {:?}", self.probe.photon_rate)?;
        writeln!(f, "probe.exposure = {:?}", self.probe.exposure)?;
        writeln!(f, "probe.loss_scale = {:?}", self.probe.loss_scale)?;
        writeln!(f, "grid.nx = {}", self.grid.nx)?;
        writeln!(f, "grid.ny = {}", self.grid.ny)?;
        match self.grid.half_extent {
            Some(h) => writeln!(f, "grid.half_extent = {h:?}")?,
            None => writeln!(f, "grid.half_extent = auto")?,
        }
        writeln!(f, "grid.mode = {}", self.grid.mode.name())?;
        writeln!(f, "snr.n_min = {:?}", self.snr.n_min)?;
        writeln!(f, "snr.n_max = {:?}", self.snr.n_max)?;
        writeln!(f, "snr.points = {}", self.snr.points)?;
        writeln!(f, "snr.time = {:?}", self.snr.time)?;
        writeln!(f, "snr.n_operating = {:?}", self.snr.n_operating)?;
        writeln!(f, "output_dir = {}", self.output_dir.display())?;
        writeln!(f, "seed = {}", self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn display_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("schedule.pulse_shape=gaussian").unwrap();
        cfg.apply_override("grid.half_extent=1.7e-6").unwrap();
        cfg.apply_override("trap.chemical_potential=per_charge").unwrap();
        cfg.apply_override("superposition.relative_phase=0.1").unwrap();
        cfg.seed = 12345;
        let back: RunConfig = cfg.to_string().parse().unwrap();
        assert_eq!(back, cfg);
        let defaults: RunConfig = RunConfig::default().to_string().parse().unwrap();
        assert_eq!(defaults, RunConfig::default());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg: RunConfig = "# header\n\nseed = 7  # trailing\nrotation.omega=0.05\n"
            .parse()
            .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.rotation.omega, 0.05);
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(matches!("foo.bar = 1".parse::<RunConfig>(), Err(Error::UnknownKey(k)) if k == "foo.bar"));
        assert!(matches!("seed 7".parse::<RunConfig>(), Err(Error::ConfigSyntax { line: 1, .. })));
        let err = "trap.lx = abc".parse::<RunConfig>().unwrap_err();
        assert!(err.to_string().contains("trap.lx"));
        let mut cfg = RunConfig::default();
        cfg.apply_override("schedule.pulse_width=-1").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("schedule.pulse_width"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn frame_times_span_the_window() {
        let r = RotationConfig {
            t_start: 0.0,
            t_end: 10.0,
            n_frames: 11,
            ..RotationConfig::default()
        };
        assert_eq!(r.frame_times(), (0..=10).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn superposition_is_normalized() {
        let sup = SuperpositionConfig {
            b_plus: 3.0,
            b_minus: 4.0,
            ..SuperpositionConfig::default()
        }
        .build()
        .unwrap();
        assert!((sup.b_plus.norm() - 0.6).abs() < 1e-15);
    }
}
