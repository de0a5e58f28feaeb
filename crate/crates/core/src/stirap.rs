//! Adiabatic Raman transfer of the ground state into a two-component vortex
//! superposition.
//!
//! The M-shaped level scheme has five states: the non-rotating ground state
//! `|0>` (amplitude alpha), the vortex states `|+>` and `|->` (beta, gamma),
//! and the excited states `|i>`, `|i'>`. In the rotating frame with hbar = 1
//! the amplitudes obey `i dc/dt = H(t) c` with
//!
//! ```text
//!          |0>      |i>      |+>      |i'>     |->
//! |0>  [   0      -W+/2     0      -W-/2     0    ]
//! |i>  [ -W+/2     D      -Wc/2     0        0    ]
//! |+>  [   0     -Wc/2     d        0        0    ]
//! |i'> [ -W-/2     0        0       D      -Wc/2  ]
//! |->  [   0       0        0     -Wc/2      d    ]
//! ```
//!
//! where `D` is the one-photon detuning and `d` an optional uniform mean-field
//! shift of the vortex states (zero by default). With the coupling pulse
//! applied before the pump pulses, the zero-energy dark state
//! `(Wc, 0, -W+, 0, -W-)` carries the population from `|0>` into the
//! superposition with `beta / gamma -> W+ / W-`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::interference::VortexSuperposition;
use crate::ode::{Dopri5, Tolerance};

/// Default peak Rabi frequencies, in units of `omega0`.
pub const DEFAULT_PEAK_SCALE: f64 = 50.0;
/// Default one-photon detuning, in units of `omega0`.
pub const DEFAULT_DETUNING_SCALE: f64 = 100.0;
/// Ground-state population above which a transfer counts as incomplete.
pub const TRANSFER_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    Gaussian,
    /// `sin^2` envelope with support `4 * pulse_width` centered on the pulse.
    #[default]
    SinSquared,
}

impl PulseShape {
    pub fn name(self) -> &'static str {
        match self {
            PulseShape::Gaussian => "gaussian",
            PulseShape::SinSquared => "sin_squared",
        }
    }
}

impl std::str::FromStr for PulseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(PulseShape::Gaussian),
            "sin_squared" | "sin2" => Ok(PulseShape::SinSquared),
            other => Err(Error::invalid(
                "schedule.pulse_shape",
                format!("expected gaussian or sin_squared, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pulse {
    PumpPlus,
    PumpMinus,
    /// The Stokes field coupling the excited states to the vortex states.
    Coupling,
}

/// Pulse parameters of the transfer. All frequencies in rad/s, times in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    pub omega_plus_peak: f64,
    pub omega_minus_peak: f64,
    pub omega_coupling_peak: f64,
    pub omega0: f64,
    pub detuning: f64,
    pub pulse_shape: PulseShape,
    pub t_stokes_center: f64,
    pub t_pump_center: f64,
    /// Gaussian standard deviation, or a quarter of the `sin^2` support.
    pub pulse_width: f64,
    /// Uniform diagonal shift of the vortex states (rad/s).
    pub mean_field_shift: f64,
}

impl Default for PulseSchedule {
    /// A 60:40 transfer with `omega0 = 2 pi x 1 kHz` and `D = 100 omega0`.
    fn default() -> Self {
        PulseSchedule::counter_intuitive(2.0 * PI * 1.0e3, 2.0e-3, 0.6)
    }
}

impl PulseSchedule {
    /// Counter-intuitive sequence with peaks `50 omega0`, detuning
    /// `100 omega0`, and the Stokes pulse one width ahead of the pump pulses.
    /// `plus_fraction` sets `W+^2 / (W+^2 + W-^2)`.
    pub fn counter_intuitive(omega0: f64, pulse_width: f64, plus_fraction: f64) -> Self {
        let peak = DEFAULT_PEAK_SCALE * omega0;
        let center = 5.0 * pulse_width;
        PulseSchedule {
            omega_plus_peak: peak * plus_fraction.sqrt(),
            omega_minus_peak: peak * (1.0 - plus_fraction).sqrt(),
            omega_coupling_peak: peak,
            omega0,
            detuning: DEFAULT_DETUNING_SCALE * omega0,
            pulse_shape: PulseShape::SinSquared,
            t_stokes_center: center - 0.5 * pulse_width,
            t_pump_center: center + 0.5 * pulse_width,
            pulse_width,
            mean_field_shift: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("schedule.omega_plus_peak", self.omega_plus_peak)?;
        ensure_non_negative("schedule.omega_minus_peak", self.omega_minus_peak)?;
        ensure_non_negative("schedule.omega_coupling_peak", self.omega_coupling_peak)?;
        ensure_positive("schedule.omega0", self.omega0)?;
        ensure_positive("schedule.pulse_width", self.pulse_width)?;
        if !self.detuning.is_finite() {
            return Err(Error::invalid("schedule.detuning", "must be finite"));
        }
        if !self.mean_field_shift.is_finite() {
            return Err(Error::invalid("schedule.mean_field_shift", "must be finite"));
        }
        if !(self.t_stokes_center < self.t_pump_center) {
            return Err(Error::invalid(
                "schedule.t_stokes_center",
                "the coupling pulse must precede the pump pulses",
            ));
        }
        Ok(())
    }

    /// Simulation window: 4.5 widths either side of the two pulse centers.
    pub fn window(&self) -> (f64, f64) {
        (
            self.t_stokes_center - 4.5 * self.pulse_width,
            self.t_pump_center + 4.5 * self.pulse_width,
        )
    }

    /// Uniform grid of `n` times over [`window`](Self::window).
    pub fn time_grid(&self, n: usize) -> Vec<f64> {
        let (t0, t1) = self.window();
        let n = n.max(2);
        (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
    }

    fn peak(&self, which: Pulse) -> f64 {
        match which {
            Pulse::PumpPlus => self.omega_plus_peak,
            Pulse::PumpMinus => self.omega_minus_peak,
            Pulse::Coupling => self.omega_coupling_peak,
        }
    }

    fn center(&self, which: Pulse) -> f64 {
        match which {
            Pulse::PumpPlus | Pulse::PumpMinus => self.t_pump_center,
            Pulse::Coupling => self.t_stokes_center,
        }
    }

    fn shape(&self, center: f64, t: f64) -> f64 {
        match self.pulse_shape {
            PulseShape::Gaussian => {
                let u = (t - center) / self.pulse_width;
                (-0.5 * u * u).exp()
            }
            PulseShape::SinSquared => {
                let support = 4.0 * self.pulse_width;
                let u = (t - center) / support + 0.5;
                if (0.0..=1.0).contains(&u) {
                    (PI * u).sin().powi(2)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Instantaneous Rabi frequency of one of the three fields (rad/s).
pub fn pulse_envelope(schedule: &PulseSchedule, which: Pulse, t: f64) -> f64 {
    schedule.peak(which) * schedule.shape(schedule.center(which), t)
}

/// Amplitudes of all five states on a time grid.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
    pub excited_i: Vec<Complex64>,
    pub excited_iprime: Vec<Complex64>,
    /// `|alpha|^2 - |beta|^2 - |gamma|^2`.
    pub transfer_function: Vec<f64>,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Populations `[|alpha|^2, |i|^2, |beta|^2, |i'|^2, |gamma|^2]` at index `k`.
    pub fn populations(&self, k: usize) -> [f64; 5] {
        [
            self.alpha[k].norm_sqr(),
            self.excited_i[k].norm_sqr(),
            self.beta[k].norm_sqr(),
            self.excited_iprime[k].norm_sqr(),
            self.gamma[k].norm_sqr(),
        ]
    }

    pub fn final_populations(&self) -> [f64; 5] {
        self.populations(self.len() - 1)
    }

    /// Largest population of either excited state over the trajectory.
    pub fn max_excited_population(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                let p = self.populations(k);
                p[1].max(p[3])
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|sum |c|^2 - 1|` over the trajectory.
    pub fn max_norm_error(&self) -> f64 {
        (0..self.len())
            .map(|k| (self.populations(k).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t,alpha2,beta2,gamma2,F`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,alpha2,beta2,gamma2,F")?;
        for k in 0..self.len() {
            let p = self.populations(k);
            writeln!(
                out,
                "{:.9e},{:.12e},{:.12e},{:.12e},{:.12e}",
                self.times[k], p[0], p[2], p[4], self.transfer_function[k]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest tolerated deviation of the total population from one.
    pub norm_limit: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-9,
            atol: 1e-12,
            norm_limit: 1e-4,
        }
    }
}

/// Integrates the five-state amplitude equations from `alpha = 1`.
pub fn evolve_amplitudes(schedule: &PulseSchedule, t_grid: &[f64]) -> Result<AmplitudeTrajectory> {
    evolve_amplitudes_with(schedule, t_grid, &EvolveOptions::default())
}

pub fn evolve_amplitudes_with(
    schedule: &PulseSchedule,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<AmplitudeTrajectory> {
    schedule.validate()?;
    ensure_positive("rtol", opts.rtol)?;
    ensure_positive("atol", opts.atol)?;
    if t_grid.len() < 2 {
        return Err(Error::invalid("t_grid", "needs at least two times"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("t_grid", "must be finite and strictly increasing"));
    }

    let detuning = schedule.detuning;
    let shift = schedule.mean_field_shift;
    // State layout: [re, im] pairs for |0>, |i>, |+>, |i'>, |->.
    let rhs = |t: f64, y: &[f64; 10], dy: &mut [f64; 10]| {
        let wp = 0.5 * pulse_envelope(schedule, Pulse::PumpPlus, t);
        let wm = 0.5 * pulse_envelope(schedule, Pulse::PumpMinus, t);
        let wc = 0.5 * pulse_envelope(schedule, Pulse::Coupling, t);
        let h_apply = |part: usize| -> [f64; 5] {
            let c = |k: usize| y[2 * k + part];
            [
                -wp * c(1) - wm * c(3),
                -wp * c(0) + detuning * c(1) - wc * c(2),
                -wc * c(1) + shift * c(2),
                -wm * c(0) + detuning * c(3) - wc * c(4),
                -wc * c(3) + shift * c(4),
            ]
        };
        let h_re = h_apply(0);
        let h_im = h_apply(1);
        for k in 0..5 {
            dy[2 * k] = h_im[k];
            dy[2 * k + 1] = -h_re[k];
        }
    };

    let mut solver = Dopri5::<10>::new(Tolerance {
        rtol: opts.rtol,
        atol: opts.atol,
    });
    let mut y = [0.0; 10];
    y[0] = 1.0;

    let n = t_grid.len();
    let mut states: Vec<[f64; 10]> = Vec::with_capacity(n);
    states.push(y);
    for w in t_grid.windows(2) {
        solver.advance(&rhs, w[0], w[1], &mut y)?;
        let norm: f64 = y.iter().map(|v| v * v).sum();
        let drift = (norm - 1.0).abs();
        if drift > opts.norm_limit {
            return Err(Error::NormDrift {
                time: w[1],
                drift,
                limit: opts.norm_limit,
            });
        }
        states.push(y);
    }

    let column = |k: usize| -> Vec<Complex64> {
        states
            .iter()
            .map(|s| Complex64::new(s[2 * k], s[2 * k + 1]))
            .collect()
    };
    let alpha = column(0);
    let excited_i = column(1);
    let beta = column(2);
    let excited_iprime = column(3);
    let gamma = column(4);
    let transfer_function = (0..n)
        .map(|k| alpha[k].norm_sqr() - beta[k].norm_sqr() - gamma[k].norm_sqr())
        .collect();

    Ok(AmplitudeTrajectory {
        times: t_grid.to_vec(),
        alpha,
        beta,
        gamma,
        excited_i,
        excited_iprime,
        transfer_function,
    })
}

/// Final vortex amplitudes `b+ = beta(t_end)`, `b- = gamma(t_end)`,
/// renormalized, with zero Sagnac phase.
pub fn final_superposition(traj: &AmplitudeTrajectory, l: u32) -> Result<VortexSuperposition> {
    if traj.is_empty() {
        return Err(Error::invalid("trajectory", "is empty"));
    }
    let last = traj.len() - 1;
    let ground = traj.alpha[last].norm_sqr();
    if ground >= TRANSFER_THRESHOLD {
        return Err(Error::IncompleteTransfer {
            ground_population: ground,
        });
    }
    VortexSuperposition::normalized(traj.beta[last], traj.gamma[last], l)
}
