//! Command-line front end for the `vortex-gyro` binary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::condensate::CondensateProfile;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::imaging::{sensitivity, snapshot_indexed, snr_argmax, snr_sweep, write_snr_csv};
use crate::interference::{density, pattern_rotation_angle, sagnac_phase, PgmDepth};
use crate::readout::{extract_fringe_phase, fit_phase_series};
use crate::stirap::{evolve_amplitudes, TRANSFER_THRESHOLD};

#[derive(Debug, Parser)]
#[command(name = "vortex-gyro", version, about = "Vortex-superposition gyroscope simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Config file with `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Base RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Override a config key, e.g. `--set rotation.omega=0.05`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
pub enum Command {
    /// Run the Raman transfer and write the population trajectory.
    Transfer,
    /// Render the interference pattern at `rotation.t_end`.
    Pattern,
    /// Simulate noisy frames over the rotation window and fit the rate.
    Spin,
    /// Sweep the signal-to-noise ratio over photon rate.
    Snr,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transfer => "transfer",
            Command::Pattern => "pattern",
            Command::Spin => "spin",
            Command::Snr => "snr",
        }
    }
}

impl Cli {
    /// Defaults, then the config file, then `--set`, `--seed` and `--out`.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for assignment in &self.overrides {
            config.apply_override(assignment)?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

/// Runs the parsed command. Human-readable results go to `stdout`.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<()> {
    let config = cli.resolve_config()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("manifest.txt"), |w| {
        writeln!(w, "# vortex-gyro {}", cli.command.name())?;
        write!(w, "{config}")
    })?;
    match cli.command {
        Command::Transfer => cmd_transfer(&config, stdout),
        Command::Pattern => cmd_pattern(&config, stdout),
        Command::Spin => cmd_spin(&config, stdout),
        Command::Snr => cmd_snr(&config, stdout),
    }
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn print<W: Write>(stdout: &mut W, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_transfer<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<()> {
    let schedule = &config.schedule;
    let traj = evolve_amplitudes(schedule, &schedule.time_grid(config.transfer_samples))?;
    let dir = &config.output_dir;
    write_file(&dir.join("transfer.csv"), |w| traj.write_csv(w))?;

    let [alpha2, _, beta2, _, gamma2] = traj.final_populations();
    let f_end = traj.transfer_function[traj.len() - 1];
    let summary = format!(
        "beta2={beta2:.6}\ngamma2={gamma2:.6}\nalpha2={alpha2:.3e}\nF_end={f_end:.6}\n\
         max_excited={:.3e}\nmax_norm_error={:.3e}\n",
        traj.max_excited_population(),
        traj.max_norm_error()
    );
    write_file(&dir.join("transfer_summary.txt"), |w| w.write_all(summary.as_bytes()))?;
    print(stdout, &summary)?;
    if alpha2 >= TRANSFER_THRESHOLD {
        return Err(Error::IncompleteTransfer {
            ground_population: alpha2,
        });
    }
    Ok(())
}

pub fn cmd_pattern<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<()> {
    let l = config.superposition.l;
    let profile = CondensateProfile::new(&config.trap, l as i32, config.chemical_potential)?;
    let t = config.rotation.t_end;
    let phi = sagnac_phase(l, config.rotation.omega, t);
    let sup = config.superposition.build()?.with_sagnac_phase(phi);
    let grid = config.grid.build(&config.trap);
    let field = density(&sup, &profile, &grid, config.grid.mode)?;

    let dir = &config.output_dir;
    write_file(&dir.join("pattern.pgm"), |w| field.write_pgm(w, PgmDepth::Sixteen))?;
    write_file(&dir.join("pattern.csv"), |w| field.write_csv(w))?;
    write_file(&dir.join("profile.csv"), |w| profile.write_csv(w))?;
    print(
        stdout,
        &format!(
            "t={t:e}\nphi_omega={phi:.9e}\nrotation_angle={:.9e}\nvisibility={:.6}\ntotal_atoms={:.6e}\n",
            pattern_rotation_angle(phi, l),
            sup.visibility(),
            field.total_atoms()
        ),
    )
}

pub fn cmd_spin<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<()> {
    let rot = &config.rotation;
    if rot.n_frames < 2 {
        return Err(Error::invalid("rotation.n_frames", "spin needs at least 2 frames"));
    }
    let l = config.superposition.l;
    let profile = CondensateProfile::new(&config.trap, l as i32, config.chemical_potential)?;
    let base = config.superposition.build()?;
    let grid = config.grid.build(&config.trap);
    let probe = config.seeded_probe();

    let times = rot.frame_times();
    let mut estimates = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let sup = base.with_sagnac_phase(sagnac_phase(l, rot.omega, t));
        let field = density(&sup, &profile, &grid, config.grid.mode)?;
        let image = snapshot_indexed(&field, &probe, k as u64)?;
        let est = extract_fringe_phase(&image, l)?;
        if est.low_contrast {
            eprintln!(
                "warning: frame {k} has low fringe contrast ({:.3e})",
                est.amplitude
            );
        }
        estimates.push(est);
    }
    let phases: Vec<f64> = estimates.iter().map(|e| e.phi_hat).collect();

    let dir = &config.output_dir;
    write_file(&dir.join("frames.csv"), |w| {
        writeln!(w, "frame,t,phi_hat,amplitude,photons")?;
        for (k, (t, e)) in times.iter().zip(&estimates).enumerate() {
            writeln!(
                w,
                "{k},{t:.9e},{:.9e},{:.6e},{}",
                e.phi_hat, e.amplitude, e.n_photons_used
            )?;
        }
        Ok(())
    })?;
    let fit = fit_phase_series(&times, &phases, l)?;
    write_file(&dir.join("rate.txt"), |w| fit.write_summary(w))?;
    print(
        stdout,
        &format!(
            "omega_hat = {:.6e} +/- {:.3e} rad/s (true {:.6e}, {} frames)\n",
            fit.omega_hat, fit.stderr, rot.omega, fit.n_frames
        ),
    )
}

pub fn cmd_snr<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<()> {
    let l = config.superposition.l;
    let s = &config.snr;
    let phi = sagnac_phase(l, config.rotation.omega, s.time);
    let sweep = snr_sweep(phi, s.n_min, s.n_max, s.points, config.probe.loss_scale)?;
    let best = snr_argmax(&sweep).ok_or_else(|| Error::invalid("snr.points", "empty sweep"))?;
    let omega_min = sensitivity(l, s.time, s.n_operating);

    let dir = &config.output_dir;
    write_file(&dir.join("snr.csv"), |w| write_snr_csv(w, &sweep))?;
    let summary = format!(
        "phi_omega={phi:.9e}\nargmax_n_sc={:.6e}\npeak_effective_snr={:.6e}\n\
         loss_scale={:.6e}\nomega_min={omega_min:.6e}\nn_operating={:.6e}\n",
        best.n_sc, best.effective_snr, config.probe.loss_scale, s.n_operating
    );
    write_file(&dir.join("snr_summary.txt"), |w| w.write_all(summary.as_bytes()))?;
    print(stdout, &summary)
}
