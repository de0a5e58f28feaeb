//! Shot-noise-limited images of a density field and the signal-to-noise
//! figures that follow from them.
//!
//! Detected photons sample the density distribution: each pixel receives an
//! independent Poisson count with mean `photon_rate * exposure` times the
//! fraction of the density in that pixel. The detector is ideal (unit
//! efficiency, no dark counts, no point-spread function).

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::error::{ensure_positive, Error, Result};
use crate::interference::{write_pgm, DensityField, Grid, PgmDepth};

/// Largest expected photon number a single image may hold.
pub const MAX_MEAN_PHOTONS: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    /// Scattered photons reaching the detector per second.
    pub photon_rate: f64,
    /// Exposure time of one image (s).
    pub exposure: f64,
    /// Photon-rate scale `N0` of the exponential atom-loss model (1/s).
    pub loss_scale: f64,
    pub rng_seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            photon_rate: 1e10,
            exposure: 1e-4,
            loss_scale: 2e10,
            rng_seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("probe.photon_rate", self.photon_rate)?;
        ensure_positive("probe.exposure", self.exposure)?;
        ensure_positive("probe.loss_scale", self.loss_scale)
    }

    /// Expected number of detected photons per image.
    pub fn mean_photons(&self) -> f64 {
        self.photon_rate * self.exposure
    }
}

/// Photon counts on the lattice of the field they were drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeImage {
    pub grid: Grid,
    pub counts: Vec<u64>,
    pub total_detected: u64,
    pub seed_used: u64,
}

impl FringeImage {
    /// Builds an image from raw counts, e.g. a measured frame.
    pub fn from_counts(grid: Grid, counts: Vec<u64>, seed_used: u64) -> Result<Self> {
        grid.validate()?;
        if counts.len() != grid.len() {
            return Err(Error::invalid(
                "counts",
                format!("expected {} pixels, got {}", grid.len(), counts.len()),
            ));
        }
        let total_detected = counts.iter().sum();
        Ok(FringeImage {
            grid,
            counts,
            total_detected,
            seed_used,
        })
    }

    /// Noise-free image: each pixel holds its expected count for `total`
    /// photons, rounded to the nearest integer.
    pub fn expected(field: &DensityField, total: f64) -> Result<Self> {
        ensure_positive("total", total)?;
        let sum: f64 = field.values.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::NoSignal);
        }
        let counts = field
            .values
            .iter()
            .map(|v| (v / sum * total).round() as u64)
            .collect();
        FringeImage::from_counts(field.grid, counts, 0)
    }

    pub fn write_pgm<W: Write>(&self, out: W, depth: PgmDepth) -> std::io::Result<()> {
        let values: Vec<f64> = self.counts.iter().map(|&c| c as f64).collect();
        write_pgm(out, &self.grid, &values, depth)
    }

    /// CSV with columns `x_norm,y_norm,counts`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x_norm,y_norm,counts")?;
        for (k, c) in self.counts.iter().enumerate() {
            let (x, y) = self.grid.position(k);
            writeln!(
                out,
                "{:.6},{:.6},{}",
                x / self.grid.length_unit,
                y / self.grid.length_unit,
                c
            )?;
        }
        Ok(())
    }
}

/// Draws one image with the probe's own seed.
pub fn snapshot(field: &DensityField, probe: &ProbeConfig) -> Result<FringeImage> {
    snapshot_seeded(field, probe, probe.rng_seed)
}

/// Draws frame `index` of a series; its seed is `rng_seed + index`.
pub fn snapshot_indexed(field: &DensityField, probe: &ProbeConfig, index: u64) -> Result<FringeImage> {
    snapshot_seeded(field, probe, probe.rng_seed.wrapping_add(index))
}

fn snapshot_seeded(field: &DensityField, probe: &ProbeConfig, seed: u64) -> Result<FringeImage> {
    probe.validate()?;
    let mean = probe.mean_photons();
    if mean > MAX_MEAN_PHOTONS {
        return Err(Error::ImageTooBright {
            mean,
            limit: MAX_MEAN_PHOTONS,
        });
    }
    if field.values.len() != field.grid.len() {
        return Err(Error::invalid("field", "value count does not match grid"));
    }
    if field.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("field", "densities must be finite and >= 0"));
    }
    let total: f64 = field.values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NoSignal);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = mean / total;
    let mut counts = Vec::with_capacity(field.values.len());
    for &v in &field.values {
        let lambda = v * scale;
        let count = if lambda > 0.0 {
            let dist = Poisson::new(lambda)
                .map_err(|e| Error::invalid("field", format!("pixel mean {lambda:e}: {e}")))?;
            rng.sample(dist) as u64
        } else {
            0
        };
        counts.push(count);
    }
    FringeImage::from_counts(field.grid, counts, seed)
}

/// Shot-noise-limited signal-to-noise ratio `phi_Omega sqrt(n_sc)`.
pub fn snr(phi_omega: f64, n_sc: f64) -> f64 {
    phi_omega * n_sc.sqrt()
}

/// SNR with the condensate decaying as `exp(-n_sc / loss_scale)`. Peaks at
/// `n_sc = loss_scale / 2`.
pub fn effective_snr(phi_omega: f64, n_sc: f64, loss_scale: f64) -> f64 {
    snr(phi_omega, n_sc) * (-n_sc / loss_scale).exp()
}

/// Smallest detectable rotation rate, `1 / (2 l t sqrt(n_sc))`.
pub fn sensitivity(l: u32, t: f64, n_sc: f64) -> f64 {
    1.0 / (2.0 * f64::from(l) * t * n_sc.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    pub n_sc: f64,
    pub snr: f64,
    pub effective_snr: f64,
}

/// Evaluates both SNR curves on `points` log-spaced photon rates.
pub fn snr_sweep(
    phi_omega: f64,
    n_min: f64,
    n_max: f64,
    points: usize,
    loss_scale: f64,
) -> Result<Vec<SnrPoint>> {
    ensure_positive("snr.n_min", n_min)?;
    ensure_positive("snr.n_max", n_max)?;
    ensure_positive("probe.loss_scale", loss_scale)?;
    if n_max <= n_min {
        return Err(Error::invalid("snr.n_max", "must exceed snr.n_min"));
    }
    if points < 2 {
        return Err(Error::invalid("snr.points", "need at least 2 points"));
    }
    let (a, b) = (n_min.ln(), n_max.ln());
    Ok((0..points)
        .map(|k| {
            let n_sc = (a + (b - a) * k as f64 / (points - 1) as f64).exp();
            SnrPoint {
                n_sc,
                snr: snr(phi_omega, n_sc),
                effective_snr: effective_snr(phi_omega, n_sc, loss_scale),
            }
        })
        .collect())
}

/// Sweep point with the largest effective SNR.
pub fn snr_argmax(sweep: &[SnrPoint]) -> Option<SnrPoint> {
    sweep
        .iter()
        .copied()
        .max_by(|a, b| a.effective_snr.total_cmp(&b.effective_snr))
}

pub fn write_snr_csv<W: Write>(mut out: W, sweep: &[SnrPoint]) -> std::io::Result<()> {
    writeln!(out, "n_sc,snr,effective_snr")?;
    for p in sweep {
        writeln!(out, "{:.9e},{:.9e},{:.9e}", p.n_sc, p.snr, p.effective_snr)?;
    }
    Ok(())
}
