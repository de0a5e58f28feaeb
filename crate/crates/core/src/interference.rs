//! Density of the two-component vortex superposition and its Sagnac rotation.
//!
//! Under lab-frame rotation the two counter-rotating components pick up
//! opposite phases `+-phi_Omega / 2` with `phi_Omega = 2 l Omega t`, so the
//! density
//!
//! ```text
//! |b+ psi e^{-i l phi} e^{i phi_Omega/2} + b- psi e^{i l phi} e^{-i phi_Omega/2}|^2
//!     = |psi|^2 (1 + 2 |b+ b-| cos(2 l phi - phi_Omega - arg(b+ b-*)))
//! ```
//!
//! shows `2 l` fringes around the ring that turn rigidly by
//! `phi_Omega / (2 l) = Omega t`. Angles increase counter-clockwise.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::condensate::{CondensateProfile, TrapConfig};
use crate::error::{ensure_positive, Error, Result};

/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest fraction of the condensate norm the grid may cut off.
pub const CLIP_LIMIT: f64 = 1e-3;

/// Accumulated Sagnac phase `2 l Omega t` (rad).
pub fn sagnac_phase(l: u32, omega: f64, t: f64) -> f64 {
    2.0 * f64::from(l) * omega * t
}

/// Optical Sagnac phase `4 A Omega / (lambda c)` for one round trip of a
/// loop of area `area` (m^2) at wavelength `wavelength` (m).
pub fn optical_sagnac_phase(area: f64, omega: f64, wavelength: f64) -> f64 {
    4.0 * area * omega / (wavelength * SPEED_OF_LIGHT)
}

/// Number of trips an atom carrying `l hbar` of angular momentum makes
/// around a loop of area `area` in time `t`, `t hbar l / (2 m A)`.
pub fn round_trips(l: u32, t: f64, atom_mass: f64, area: f64) -> f64 {
    t * crate::HBAR * f64::from(l) / (2.0 * atom_mass * area)
}

/// Matter-wave form of the optical phase: `lambda c -> hbar / m` per round
/// trip, times the number of round trips. The area cancels against
/// [`round_trips`], leaving [`sagnac_phase`].
pub fn sagnac_phase_from_area(l: u32, omega: f64, t: f64, atom_mass: f64, area: f64) -> f64 {
    round_trips(l, t, atom_mass, area) * 4.0 * area * atom_mass / crate::HBAR * omega
}

/// Angle by which the fringe pattern has turned, `phi_Omega / (2 l)`.
pub fn pattern_rotation_angle(phi_omega: f64, l: u32) -> f64 {
    phi_omega / (2.0 * f64::from(l))
}

/// Amplitudes and accumulated phase of the counter-rotating pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexSuperposition {
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    /// Common charge magnitude `l`.
    pub charge: u32,
    /// Unwrapped Sagnac phase `phi_Omega` (rad).
    pub sagnac_phase: f64,
}

impl VortexSuperposition {
    /// Requires `|b+|^2 + |b-|^2 = 1` within 1e-9.
    pub fn new(b_plus: Complex64, b_minus: Complex64, charge: u32) -> Result<Self> {
        let sup = VortexSuperposition {
            b_plus,
            b_minus,
            charge,
            sagnac_phase: 0.0,
        };
        sup.validate()?;
        Ok(sup)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(b_plus: Complex64, b_minus: Complex64, charge: u32) -> Result<Self> {
        let norm = (b_plus.norm_sqr() + b_minus.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("superposition", "amplitudes must not both vanish"));
        }
        Self::new(b_plus / norm, b_minus / norm, charge)
    }

    /// `(|+l> + |-l>) / sqrt(2)`.
    pub fn equal(charge: u32) -> Result<Self> {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(a, a, charge)
    }

    pub fn with_sagnac_phase(mut self, phi_omega: f64) -> Self {
        self.sagnac_phase = phi_omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.charge == 0 {
            return Err(Error::invalid("superposition.l", "charge magnitude must be >= 1"));
        }
        let norm = self.b_plus.norm_sqr() + self.b_minus.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-9) {
            return Err(Error::invalid(
                "superposition",
                format!("|b+|^2 + |b-|^2 = {norm}, expected 1"),
            ));
        }
        if !self.sagnac_phase.is_finite() {
            return Err(Error::invalid("superposition.sagnac_phase", "must be finite"));
        }
        Ok(())
    }

    /// Fringe visibility `2 |b+| |b-|`.
    pub fn visibility(&self) -> f64 {
        2.0 * self.b_plus.norm() * self.b_minus.norm()
    }

    /// Azimuthal factor `|b+ e^{-i l phi + i phi_Omega/2} + b- e^{i l phi - i phi_Omega/2}|^2`.
    pub fn azimuthal_factor(&self, phi: f64) -> f64 {
        let l = f64::from(self.charge);
        let half = 0.5 * self.sagnac_phase;
        let plus = self.b_plus * Complex64::from_polar(1.0, -l * phi + half);
        let minus = self.b_minus * Complex64::from_polar(1.0, l * phi - half);
        (plus + minus).norm_sqr()
    }
}

/// Transverse sampling plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderMode {
    /// Volume density in the `z = 0` plane (m^-3).
    #[default]
    Slice,
    /// Density integrated along `z` (m^-2), as seen by absorption or
    /// phase-contrast imaging.
    Column,
}

impl std::str::FromStr for RenderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slice" => Ok(RenderMode::Slice),
            "column" => Ok(RenderMode::Column),
            other => Err(Error::invalid(
                "grid.mode",
                format!("expected slice or column, got `{other}`"),
            )),
        }
    }
}

impl RenderMode {
    pub fn name(self) -> &'static str {
        match self {
            RenderMode::Slice => "slice",
            RenderMode::Column => "column",
        }
    }
}

/// Square pixel lattice centered on the trap axis. Pixel `(i, j)` has its
/// center at `x = -half_width + (i + 1/2) dx`, `y = -half_height + (j + 1/2) dy`
/// and is stored at index `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub half_width: f64,
    pub half_height: f64,
    /// Length used to normalize exported coordinates (m).
    pub length_unit: f64,
}

impl Grid {
    pub fn square(n: usize, half_extent: f64, length_unit: f64) -> Self {
        Grid {
            nx: n,
            ny: n,
            half_width: half_extent,
            half_height: half_extent,
            length_unit,
        }
    }

    /// 256 x 256 pixels spanning `[-1.5, 1.5] lx` on both axes.
    pub fn for_trap(trap: &TrapConfig) -> Self {
        Grid::square(256, 1.5 * trap.lx, trap.lx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::invalid("grid.n", "needs at least one pixel per axis"));
        }
        ensure_positive("grid.half_width", self.half_width)?;
        ensure_positive("grid.half_height", self.half_height)?;
        ensure_positive("grid.length_unit", self.length_unit)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_height / self.ny as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.half_height + (j as f64 + 0.5) * self.dy()
    }

    /// Center of pixel `index`.
    pub fn position(&self, index: usize) -> (f64, f64) {
        (self.x(index % self.nx), self.y(index / self.nx))
    }
}

/// Density sampled at pixel centers.
#[derive(Debug, Clone)]
pub struct DensityField {
    pub grid: Grid,
    pub mode: RenderMode,
    pub values: Vec<f64>,
    axial_integral: f64,
}

impl DensityField {
    /// Grid-integrated atom number. Slice values are lifted to 3-D with the
    /// analytic axial integral.
    pub fn total_atoms(&self) -> f64 {
        let sum: f64 = self.values.iter().sum::<f64>() * self.grid.pixel_area();
        match self.mode {
            RenderMode::Slice => sum * self.axial_integral,
            RenderMode::Column => sum,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Bilinear interpolation between pixel centers; zero outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let fx = (x + g.half_width) / g.dx() - 0.5;
        let fy = (y + g.half_height) / g.dy() - 0.5;
        if fx < 0.0 || fy < 0.0 || fx > (g.nx - 1) as f64 || fy > (g.ny - 1) as f64 {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(g.nx.saturating_sub(2));
        let j = (fy.floor() as usize).min(g.ny.saturating_sub(2));
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |i: usize, j: usize| self.values[j * g.nx + i];
        let (i1, j1) = ((i + 1).min(g.nx - 1), (j + 1).min(g.ny - 1));
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i1, j)
            + (1.0 - tx) * ty * v(i, j1)
            + tx * ty * v(i1, j1)
    }

    /// Binary PGM (`P5`), max-normalized, top row first.
    pub fn write_pgm<W: Write>(&self, out: W, depth: PgmDepth) -> std::io::Result<()> {
        write_pgm(out, &self.grid, &self.values, depth)
    }

    /// CSV with columns `x_norm,y_norm,density`, coordinates in units of
    /// `grid.length_unit`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x_norm,y_norm,density")?;
        for (k, v) in self.values.iter().enumerate() {
            let (x, y) = self.grid.position(k);
            writeln!(
                out,
                "{:.6},{:.6},{:.9e}",
                x / self.grid.length_unit,
                y / self.grid.length_unit,
                v
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmDepth {
    Eight,
    #[default]
    Sixteen,
}

pub(crate) fn write_pgm<W: Write>(
    mut out: W,
    grid: &Grid,
    values: &[f64],
    depth: PgmDepth,
) -> std::io::Result<()> {
    let max_value: u32 = match depth {
        PgmDepth::Eight => 255,
        PgmDepth::Sixteen => 65535,
    };
    let peak = values.iter().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 {
        f64::from(max_value) / peak
    } else {
        0.0
    };
    write!(out, "P5\n{} {}\n{}\n", grid.nx, grid.ny, max_value)?;
    let mut row = Vec::with_capacity(grid.nx * 2);
    for j in (0..grid.ny).rev() {
        row.clear();
        for i in 0..grid.nx {
            let level = (values[j * grid.nx + i] * scale).round().clamp(0.0, f64::from(max_value));
            match depth {
                PgmDepth::Eight => row.push(level as u8),
                PgmDepth::Sixteen => row.extend_from_slice(&(level as u16).to_be_bytes()),
            }
        }
        out.write_all(&row)?;
    }
    Ok(())
}

/// Density of the superposition at transverse position `(x, y)`.
pub fn density_at(
    superposition: &VortexSuperposition,
    profile: &CondensateProfile,
    mode: RenderMode,
    x: f64,
    y: f64,
) -> f64 {
    let rho = x.hypot(y);
    let radial = profile.radial_amplitude(rho);
    if radial == 0.0 {
        return 0.0;
    }
    let trap = profile.trap();
    let axial = match mode {
        RenderMode::Slice => 1.0,
        RenderMode::Column => trap.axial_integral(),
    };
    trap.atom_count as f64 * radial * radial * axial * superposition.azimuthal_factor(y.atan2(x))
}

/// Renders the superposition on `grid`.
pub fn density(
    superposition: &VortexSuperposition,
    profile: &CondensateProfile,
    grid: &Grid,
    mode: RenderMode,
) -> Result<DensityField> {
    superposition.validate()?;
    grid.validate()?;
    if profile.vortex_charge().unsigned_abs() != superposition.charge {
        return Err(Error::ChargeMismatch {
            superposition: superposition.charge,
            profile: profile.vortex_charge(),
        });
    }
    let inscribed = grid.half_width.min(grid.half_height);
    let clipped = profile.norm_fraction_beyond(inscribed);
    if clipped > CLIP_LIMIT {
        return Err(Error::GridClipped {
            fraction: clipped,
            limit: CLIP_LIMIT,
        });
    }

    let values = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.position(k);
            density_at(superposition, profile, mode, x, y)
        })
        .collect();
    Ok(DensityField {
        grid: *grid,
        mode,
        values,
        axial_integral: profile.trap().axial_integral(),
    })
}

/// Azimuth of `(x, y)` in `[0, 2 pi)`.
pub fn azimuth(x: f64, y: f64) -> f64 {
    let phi = y.atan2(x);
    if phi < 0.0 {
        phi + 2.0 * PI
    } else {
        phi
    }
}
