#ifndef VORTEX_GYRO_H
#define VORTEX_GYRO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum VgStatus {
  VG_STATUS_OK = 0,
  VG_STATUS_NULL_POINTER = 1,
  VG_STATUS_INVALID_PARAMETER = 2,
  VG_STATUS_TRAP_TOO_SHALLOW = 3,
  VG_STATUS_INTEGRATION_FAILED = 4,
  VG_STATUS_INCOMPLETE_TRANSFER = 5,
  VG_STATUS_GRID_CLIPPED = 6,
  VG_STATUS_CHARGE_MISMATCH = 7,
  VG_STATUS_NO_SIGNAL = 8,
  VG_STATUS_ALIASING = 9,
  VG_STATUS_PANIC = 10,
} VgStatus;

typedef enum VgPulseShape {
  VG_PULSE_SHAPE_GAUSSIAN = 0,
  VG_PULSE_SHAPE_SIN_SQUARED = 1,
} VgPulseShape;

typedef enum VgRenderMode {
  VG_RENDER_MODE_SLICE = 0,
  VG_RENDER_MODE_COLUMN = 1,
} VgRenderMode;

// Rendered density on a pixel grid.
typedef struct VgDensityField VgDensityField;

// Photon-count image.
typedef struct VgFringeImage VgFringeImage;

// Thomas–Fermi vortex mode.
typedef struct VgProfile VgProfile;

// Population trajectory of a Raman transfer.
typedef struct VgTrajectory VgTrajectory;

typedef struct VgTrapParams {
  double atom_mass;
  double scattering_length;
  uint64_t atom_count;
  double lx;
  double ly;
  double lz;
  double omega_rho;
  double barrier_height;
  double barrier_width;
} VgTrapParams;

typedef struct VgSchedule {
  double omega_plus_peak;
  double omega_minus_peak;
  double omega_coupling_peak;
  double omega0;
  double detuning;
  enum VgPulseShape pulse_shape;
  double t_stokes_center;
  double t_pump_center;
  double pulse_width;
  double mean_field_shift;
} VgSchedule;

typedef struct VgProbe {
  double photon_rate;
  double exposure;
  double loss_scale;
  uint64_t rng_seed;
} VgProbe;

typedef struct VgSuperposition {
  double b_plus_re;
  double b_plus_im;
  double b_minus_re;
  double b_minus_im;
  uint32_t charge;
  double sagnac_phase;
} VgSuperposition;

typedef struct VgPhaseEstimate {
  double phi_hat;
  double amplitude;
  uint64_t n_photons_used;
  bool low_contrast;
} VgPhaseEstimate;

typedef struct VgRateEstimate {
  double omega_hat;
  double stderr;
  size_t n_frames;
  double residual_rms;
} VgRateEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library from the same thread.
const char *vg_last_error(void);

enum VgStatus vg_trap_default(struct VgTrapParams *out);

enum VgStatus vg_schedule_default(struct VgSchedule *out);

enum VgStatus vg_probe_default(struct VgProbe *out);

// Solves the trap for a vortex of the given charge with the chemical
// potential of the non-rotating condensate.
enum VgStatus vg_profile_new(const struct VgTrapParams *trap,
                             int32_t charge,
                             struct VgProfile **out);

double vg_profile_chemical_potential(const struct VgProfile *profile);

// Density `N |psi(rho, z)|^2` (m^-3), or NaN for a null handle.
double vg_profile_density(const struct VgProfile *profile, double rho, double z);

void vg_profile_free(struct VgProfile *profile);

// Integrates the transfer on `n_samples` evenly spaced times across the
// schedule's window.
enum VgStatus vg_transfer_run(const struct VgSchedule *schedule,
                              size_t n_samples,
                              struct VgTrajectory **out);

size_t vg_trajectory_len(const struct VgTrajectory *traj);

// Writes `[|alpha|^2, |i|^2, |beta|^2, |i'|^2, |gamma|^2]` at sample `k`.
enum VgStatus vg_trajectory_populations(const struct VgTrajectory *traj, size_t k, double *out);

// Final superposition of the trajectory for charge `l`.
enum VgStatus vg_trajectory_superposition(const struct VgTrajectory *traj,
                                          uint32_t l,
                                          struct VgSuperposition *out);

void vg_trajectory_free(struct VgTrajectory *traj);

// Renders the superposition on an `nx` x `ny` grid spanning
// `[-half_extent, half_extent]` on both axes.
enum VgStatus vg_density_render(const struct VgProfile *profile,
                                const struct VgSuperposition *superposition,
                                size_t nx,
                                size_t ny,
                                double half_extent,
                                enum VgRenderMode mode,
                                struct VgDensityField **out);

// Pointer to the `nx * ny` row-major values, `y` increasing with row.
const double *vg_density_values(const struct VgDensityField *field, size_t *len);

double vg_density_total_atoms(const struct VgDensityField *field);

void vg_density_free(struct VgDensityField *field);

// Draws frame `index` of a series (seed `probe.rng_seed + index`).
enum VgStatus vg_snapshot(const struct VgDensityField *field,
                          const struct VgProbe *probe,
                          uint64_t index,
                          struct VgFringeImage **out);

uint64_t vg_image_total(const struct VgFringeImage *image);

const uint64_t *vg_image_counts(const struct VgFringeImage *image, size_t *len);

void vg_image_free(struct VgFringeImage *image);

enum VgStatus vg_extract_fringe_phase(const struct VgFringeImage *image,
                                      uint32_t l,
                                      struct VgPhaseEstimate *out);

// Fits the rotation rate to `n` (time, wrapped phase) pairs.
enum VgStatus vg_estimate_rate(const double *times,
                               const double *phases,
                               size_t n,
                               uint32_t l,
                               struct VgRateEstimate *out);

// `2 l omega t`.
double vg_sagnac_phase(uint32_t l, double omega, double t);

// `1 / (2 l t sqrt(n_sc))`.
double vg_sensitivity(uint32_t l, double t, double n_sc);

double vg_snr(double phi_omega, double n_sc);

double vg_effective_snr(double phi_omega, double n_sc, double loss_scale);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VORTEX_GYRO_H */
