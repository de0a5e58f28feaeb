//! Trapped condensate in the Thomas–Fermi approximation.
//!
//! The transverse trap is a "Mexican hat": a harmonic well with a central
//! Gaussian barrier,
//!
//! ```text
//! V(rho) = 1/2 m w^2 rho^2 + V0 exp(-rho^2 / (2 s^2))
//! ```
//!
//! and the axial direction is harmonic, carried by the Gaussian factor
//! `exp(-z^2 / 2)` with `z` measured in units of [`TrapConfig::axial_length`].
//! A vortex mode of charge `l` has the amplitude
//!
//! ```text
//! psi(l, rho, phi, z) = C (rho / rho_ref)^|l| Re sqrt((mu - V) / (hbar eta)) exp(-z^2/2) exp(-i l phi)
//! ```
//!
//! with `eta = 4 pi hbar a / m`. The power `rho^|l|` is evaluated in log space
//! against a per-profile reference scale so charges of a few hundred neither
//! overflow nor underflow, and the normalization constant `C` absorbs the
//! `1/sqrt(|l|!)` factor.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::HBAR;

/// Mass of a rubidium-87 atom (kg).
pub const RB87_MASS: f64 = 1.44316e-25;
/// s-wave scattering length of rubidium-87 (m).
pub const RB87_SCATTERING_LENGTH: f64 = 5.3e-9;

/// Default upper limit for the chemical-potential bracket search (J).
pub const DEFAULT_MU_MAX: f64 = 1.0e-20;

/// Minimum number of radial intervals on a stored profile grid.
pub const MIN_RADIAL_INTERVALS: usize = 2048;

/// Geometry and potential parameters of the ring trap, plus species constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    /// Atomic mass (kg).
    pub atom_mass: f64,
    /// s-wave scattering length (m).
    pub scattering_length: f64,
    pub atom_count: u64,
    /// Transverse trap dimension along x (m).
    pub lx: f64,
    /// Transverse trap dimension along y (m).
    pub ly: f64,
    /// Axial trap dimension (m).
    pub lz: f64,
    /// Transverse harmonic frequency (rad/s).
    pub omega_rho: f64,
    /// Height of the central Gaussian barrier (J).
    pub barrier_height: f64,
    /// 1/e radius parameter of the barrier (m).
    pub barrier_width: f64,
}

impl Default for TrapConfig {
    /// Rubidium-87, 10^6 atoms in a 2.4 x 2.4 x 0.8 um pancake with a ring
    /// minimum near 0.86 um.
    fn default() -> Self {
        let atom_mass = RB87_MASS;
        let omega_rho = 2.0 * PI * 3.0e4;
        let barrier_width: f64 = 0.4e-6;
        TrapConfig {
            atom_mass,
            scattering_length: RB87_SCATTERING_LENGTH,
            atom_count: 1_000_000,
            lx: 2.4e-6,
            ly: 2.4e-6,
            lz: 0.8e-6,
            omega_rho,
            barrier_height: 10.0 * atom_mass * omega_rho.powi(2) * barrier_width.powi(2),
            barrier_width,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("trap.atom_mass", self.atom_mass)?;
        ensure_positive("trap.scattering_length", self.scattering_length)?;
        ensure_positive("trap.lx", self.lx)?;
        ensure_positive("trap.ly", self.ly)?;
        ensure_positive("trap.lz", self.lz)?;
        ensure_positive("trap.omega_rho", self.omega_rho)?;
        ensure_non_negative("trap.barrier_height", self.barrier_height)?;
        ensure_positive("trap.barrier_width", self.barrier_width)?;
        if self.atom_count == 0 {
            return Err(Error::invalid("trap.atom_count", "must be at least 1"));
        }
        Ok(())
    }

    /// Atom-atom interaction parameter `eta = 4 pi hbar a / m` (m^3/s).
    pub fn interaction_parameter(&self) -> f64 {
        4.0 * PI * HBAR * self.scattering_length / self.atom_mass
    }

    /// Mean-field coupling energy `hbar * eta` (J m^3).
    pub fn coupling_energy(&self) -> f64 {
        HBAR * self.interaction_parameter()
    }

    /// Axial oscillator length, half the axial trap dimension (m).
    pub fn axial_length(&self) -> f64 {
        0.5 * self.lz
    }

    /// `int exp(-(z/a)^2) dz` for the squared axial factor.
    pub fn axial_integral(&self) -> f64 {
        PI.sqrt() * self.axial_length()
    }

    fn harmonic_coefficient(&self) -> f64 {
        0.5 * self.atom_mass * self.omega_rho * self.omega_rho
    }

    /// Potential as a function of `s = rho^2`; convex in `s`.
    fn potential_sq(&self, s: f64) -> f64 {
        let sigma2 = self.barrier_width * self.barrier_width;
        self.harmonic_coefficient() * s + self.barrier_height * (-s / (2.0 * sigma2)).exp()
    }

    pub(crate) fn potential_unchecked(&self, rho: f64) -> f64 {
        self.potential_sq(rho * rho)
    }

    /// Radius and value of the potential minimum. The minimum sits off-center
    /// when `V0 > m w^2 s^2`, otherwise at the origin.
    pub fn potential_minimum(&self) -> (f64, f64) {
        let s2 = self.barrier_width * self.barrier_width;
        let ratio = self.barrier_height / (self.atom_mass * self.omega_rho.powi(2) * s2);
        let rho_star = if ratio > 1.0 {
            (2.0 * s2 * ratio.ln()).sqrt()
        } else {
            0.0
        };
        (rho_star, self.potential_unchecked(rho_star))
    }

    /// Scale used to make `(rho / rho_ref)^|l|` dimensionless: the ring
    /// radius when the barrier produces one, half of `lx` otherwise.
    pub fn reference_radius(&self) -> f64 {
        let (rho_star, _) = self.potential_minimum();
        if rho_star > 0.0 {
            rho_star
        } else {
            0.5 * self.lx
        }
    }

    /// Thomas–Fermi support `[r_in, r_out]` where `V(rho) <= mu`, or `None`
    /// when `mu` lies at or below the potential minimum.
    pub fn support(&self, mu: f64) -> Option<(f64, f64)> {
        let (rho_star, v_min) = self.potential_minimum();
        if !(mu > v_min) {
            return None;
        }
        let s_star = rho_star * rho_star;

        let mut hi = s_star.max(self.barrier_width * self.barrier_width);
        while self.potential_sq(hi) <= mu {
            hi *= 2.0;
        }
        let s_out = bisect(s_star, hi, |s| self.potential_sq(s) <= mu);

        let s_in = if self.potential_sq(0.0) <= mu {
            0.0
        } else {
            // V decreases on [0, s*], so "inside" is the upper end here.
            bisect(0.0, s_star, |s| self.potential_sq(s) > mu)
        };
        Some((s_in.sqrt(), s_out.sqrt()))
    }
}

/// Bisection on a predicate that is true at `lo` and false at `hi`.
fn bisect(mut lo: f64, mut hi: f64, inside: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Trap potential `V(rho)` in joules.
pub fn trap_potential(cfg: &TrapConfig, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::invalid("rho", format!("must be finite and >= 0, got {rho}")));
    }
    Ok(cfg.potential_unchecked(rho))
}

/// Number of Simpson intervals on the support for charge `l`. High charges
/// concentrate the density in a ring of width ~ r_out / (2|l|); 64|l|
/// intervals keep at least ~20 nodes across it.
fn radial_intervals(l: i32) -> usize {
    let n = MIN_RADIAL_INTERVALS.max(64 * l.unsigned_abs() as usize);
    n + n % 2
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Log of the vortex factor `(rho / rho_ref)^(2|l|)` relative to `scale`.
fn log_vortex_factor(l: i32, rho: f64, reference: f64) -> f64 {
    if l == 0 {
        0.0
    } else {
        2.0 * f64::from(l.unsigned_abs()) * (rho / reference).ln()
    }
}

/// Natural log of `int 2 pi rho (rho/rho_ref)^(2|l|) (mu - V)/(hbar eta) drho`
/// over the support, by composite Simpson on a support-fitted grid.
fn ln_radial_integral(cfg: &TrapConfig, l: i32, mu: f64, support: (f64, f64)) -> f64 {
    let (r_in, r_out) = support;
    let n = radial_intervals(l);
    let h = (r_out - r_in) / n as f64;
    let reference = cfg.reference_radius();
    let scale = log_vortex_factor(l, r_out, reference);
    let g = cfg.coupling_energy();
    let mut sum = 0.0;
    for i in 0..=n {
        let rho = r_in + h * i as f64;
        let excess = (mu - cfg.potential_unchecked(rho)).max(0.0);
        if excess == 0.0 || rho == 0.0 && l != 0 {
            continue;
        }
        let weight = (log_vortex_factor(l, rho, reference) - scale).exp();
        sum += simpson_weight(i, n) * 2.0 * PI * rho * weight * excess / g;
    }
    (sum * h / 3.0).ln() + scale
}

/// Atom number `N(mu)` of the Thomas–Fermi density of charge `l`.
pub fn atom_number(cfg: &TrapConfig, l: i32, mu: f64) -> f64 {
    match cfg.support(mu) {
        Some(support) => (ln_radial_integral(cfg, l, mu, support) + cfg.axial_integral().ln()).exp(),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Bracket search gives up above this chemical potential (J).
    pub mu_max: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mu_max: DEFAULT_MU_MAX }
    }
}

/// Chemical potential at which the charge-`l` Thomas–Fermi density holds
/// `cfg.atom_count` atoms.
pub fn solve_chemical_potential(cfg: &TrapConfig, l: i32) -> Result<f64> {
    solve_chemical_potential_with(cfg, l, &SolveOptions::default())
}

pub fn solve_chemical_potential_with(cfg: &TrapConfig, l: i32, opts: &SolveOptions) -> Result<f64> {
    cfg.validate()?;
    let target = (cfg.atom_count as f64).ln();
    let ln_n = |mu: f64| match cfg.support(mu) {
        Some(support) => ln_radial_integral(cfg, l, mu, support) + cfg.axial_integral().ln(),
        None => f64::NEG_INFINITY,
    };

    // N(mu) is zero at the potential minimum and increases monotonically.
    let (_, v_min) = cfg.potential_minimum();
    let mut step = HBAR * cfg.omega_rho;
    let mut lo = v_min;
    let mut hi = v_min + step;
    while ln_n(hi) < target {
        if hi > opts.mu_max {
            return Err(Error::TrapTooShallow {
                atom_count: cfg.atom_count,
                mu_max: opts.mu_max,
            });
        }
        lo = hi;
        step *= 2.0;
        hi = v_min + step;
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_n(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// How the chemical potential of a profile is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ChemicalPotential {
    /// Solved once for the non-rotating (`l = 0`) state and shared by all
    /// vortex components.
    #[default]
    Common,
    /// Solved separately for the profile's own charge.
    PerCharge,
    Fixed(f64),
}

/// Normalized Thomas–Fermi vortex mode of a given charge.
#[derive(Debug, Clone)]
pub struct CondensateProfile {
    trap: TrapConfig,
    charge: i32,
    chemical_potential: f64,
    reference_radius: f64,
    log_scale: f64,
    norm_constant: f64,
    support: (f64, f64),
    radii: Vec<f64>,
    radial: Vec<f64>,
}

impl CondensateProfile {
    pub fn new(trap: &TrapConfig, charge: i32, mu: ChemicalPotential) -> Result<Self> {
        trap.validate()?;
        let mu = match mu {
            ChemicalPotential::Common => solve_chemical_potential(trap, 0)?,
            ChemicalPotential::PerCharge => solve_chemical_potential(trap, charge)?,
            ChemicalPotential::Fixed(mu) => {
                if !mu.is_finite() {
                    return Err(Error::invalid("chemical_potential", "must be finite"));
                }
                mu
            }
        };
        Self::with_chemical_potential(trap, charge, mu)
    }

    fn with_chemical_potential(trap: &TrapConfig, charge: i32, mu: f64) -> Result<Self> {
        let support = trap.support(mu).ok_or_else(|| {
            Error::invalid("chemical_potential", "lies below the trap minimum; density is empty")
        })?;
        let reference_radius = trap.reference_radius();
        let log_scale = 0.5 * log_vortex_factor(charge, support.1, reference_radius);
        let g = trap.coupling_energy();

        let n = radial_intervals(charge);
        let h = (support.1 - support.0) / n as f64;
        let radii: Vec<f64> = (0..=n).map(|i| support.0 + h * i as f64).collect();
        let unnormalized: Vec<f64> = radii
            .iter()
            .map(|&rho| raw_amplitude(trap, charge, mu, reference_radius, log_scale, g, rho))
            .collect();

        let integral = simpson_radial(&radii, &unnormalized) * trap.axial_integral();
        if !(integral > 0.0) || !integral.is_finite() {
            return Err(Error::invalid("chemical_potential", "profile has no normalizable density"));
        }
        let norm_constant = integral.sqrt().recip();
        let radial = unnormalized.iter().map(|a| a * norm_constant).collect();

        Ok(CondensateProfile {
            trap: *trap,
            charge,
            chemical_potential: mu,
            reference_radius,
            log_scale,
            norm_constant,
            support,
            radii,
            radial,
        })
    }

    pub fn trap(&self) -> &TrapConfig {
        &self.trap
    }

    pub fn vortex_charge(&self) -> i32 {
        self.charge
    }

    pub fn chemical_potential(&self) -> f64 {
        self.chemical_potential
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    /// Log-space offset subtracted from `|l| ln(rho / rho_ref)`.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Inner and outer Thomas–Fermi radii (m).
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Stored radial grid (m), spanning the support.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Normalized radial amplitude on [`radii`](Self::radii).
    pub fn radial_table(&self) -> &[f64] {
        &self.radial
    }

    /// Normalized radial amplitude at `rho`; zero outside the support.
    pub fn radial_amplitude(&self, rho: f64) -> f64 {
        self.norm_constant
            * raw_amplitude(
                &self.trap,
                self.charge,
                self.chemical_potential,
                self.reference_radius,
                self.log_scale,
                self.trap.coupling_energy(),
                rho,
            )
    }

    /// Axial factor `exp(-z^2/2)` with `z` in units of the axial length.
    pub fn axial_amplitude(&self, z: f64) -> f64 {
        let u = z / self.trap.axial_length();
        (-0.5 * u * u).exp()
    }

    pub fn amplitude(&self, rho: f64, phi: f64, z: f64) -> Complex64 {
        let magnitude = self.radial_amplitude(rho) * self.axial_amplitude(z);
        Complex64::from_polar(magnitude, -f64::from(self.charge) * phi)
    }

    /// Atom density `N |psi|^2` (m^-3).
    pub fn density(&self, rho: f64, z: f64) -> f64 {
        let a = self.radial_amplitude(rho) * self.axial_amplitude(z);
        self.trap.atom_count as f64 * a * a
    }

    /// `int |psi|^2 d^3r` by Simpson quadrature on the stored grid.
    pub fn norm_on_grid(&self) -> f64 {
        simpson_radial(&self.radii, &self.radial) * self.trap.axial_integral()
    }

    /// Fraction of the norm lying at radii beyond `r`.
    pub fn norm_fraction_beyond(&self, r: f64) -> f64 {
        if r >= self.support.1 {
            return 0.0;
        }
        if r <= self.support.0 {
            return 1.0;
        }
        let integrand: Vec<f64> = self
            .radii
            .iter()
            .zip(&self.radial)
            .map(|(rho, a)| 2.0 * PI * rho * a * a)
            .collect();
        let mut total = 0.0;
        let mut outer = 0.0;
        for i in 1..self.radii.len() {
            let (r0, r1) = (self.radii[i - 1], self.radii[i]);
            let piece = 0.5 * (integrand[i - 1] + integrand[i]) * (r1 - r0);
            total += piece;
            if r0 >= r {
                outer += piece;
            } else if r1 > r {
                outer += piece * (r1 - r) / (r1 - r0);
            }
        }
        outer / total
    }

    /// Radial density at `z = 0` as CSV (`rho_m,density_per_m3`), on a
    /// uniform grid over `[0, 4 max(lx, rho*)]` merged with the stored grid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (rho_star, _) = self.trap.potential_minimum();
        let extent = 4.0 * self.trap.lx.max(rho_star);
        let n = MIN_RADIAL_INTERVALS;
        let mut rhos: Vec<f64> = (0..n).map(|i| extent * i as f64 / (n - 1) as f64).collect();
        rhos.extend_from_slice(&self.radii);
        rhos.sort_by(f64::total_cmp);
        rhos.dedup();
        writeln!(out, "rho_m,density_per_m3")?;
        for rho in rhos {
            writeln!(out, "{:.9e},{:.9e}", rho, self.density(rho, 0.0))?;
        }
        Ok(())
    }
}

/// Free-function form of [`CondensateProfile::amplitude`].
pub fn vortex_amplitude(profile: &CondensateProfile, rho: f64, phi: f64, z: f64) -> Complex64 {
    profile.amplitude(rho, phi, z)
}

fn raw_amplitude(
    trap: &TrapConfig,
    charge: i32,
    mu: f64,
    reference: f64,
    log_scale: f64,
    g: f64,
    rho: f64,
) -> f64 {
    if !(rho >= 0.0) {
        return 0.0;
    }
    let excess = mu - trap.potential_unchecked(rho);
    if excess <= 0.0 || rho == 0.0 && charge != 0 {
        return 0.0;
    }
    let vortex = (0.5 * log_vortex_factor(charge, rho, reference) - log_scale).exp();
    vortex * (excess / g).sqrt()
}

/// `int 2 pi rho f(rho)^2 drho` by composite Simpson on a uniform grid.
fn simpson_radial(radii: &[f64], amplitude: &[f64]) -> f64 {
    let n = radii.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let h = (radii[n] - radii[0]) / n as f64;
    let sum: f64 = radii
        .iter()
        .zip(amplitude)
        .enumerate()
        .map(|(i, (rho, a))| simpson_weight(i, n) * 2.0 * PI * rho * a * a)
        .sum();
    sum * h / 3.0
}
