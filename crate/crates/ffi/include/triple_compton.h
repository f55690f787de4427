#ifndef TRIPLE_COMPTON_H
#define TRIPLE_COMPTON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_ARGUMENT = 2,
  /*
   Unphysical point or vanishing amplitudes.
   */
  TC_STATUS_UNPHYSICAL = 3,
  TC_STATUS_NON_CONVERGENCE = 4,
  /*
   Any other numerical failure (propagator pole, degenerate direction).
   */
  TC_STATUS_NUMERICAL = 5,
  TC_STATUS_PANIC = 6,
} TcStatus;

/*
 Validated 8×8 polarization density matrix of the photon triplet.
 */
typedef struct TcDensity TcDensity;

/*
 Collision kinematics: incoming electron energy and photon energy.
 */
typedef struct TcSetup TcSetup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread (empty if none). The
 pointer stays valid until the next failing call on the same thread.
 */
const char *tc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *tc_version(void);

/*
 Creates a head-on collision; `electron_energy_mev` equal to the
 electron mass puts the electron at rest.
 */
enum TcStatus tc_setup_new(double electron_energy_mev, double omega0_mev, struct TcSetup **out);

/*
 Creates a collision with the electron at rest.
 */
enum TcStatus tc_setup_rest_frame(double omega0_mev, struct TcSetup **out);

/*
 Releases a setup; null is ignored.
 */
void tc_setup_free(struct TcSetup *setup);

/*
 Electron-spin-summed σ5 (½ Σ over both spins) for beam polarization
 `beam_label` and final labels `labels[3]`, barn·MeV⁻²·sr⁻³. Zero
 outside the physical region or below `threshold_mev`.
 */
enum TcStatus tc_sigma5(const struct TcSetup *setup,
                        const double *theta,
                        const double *phi,
                        double omega1_mev,
                        double omega2_mev,
                        uint32_t beam_label,
                        const uint32_t *labels,
                        double threshold_mev,
                        double *out);

/*
 Spin-summed photon polarization density matrix at one phase-space
 point.
 */
enum TcStatus tc_density_from_amplitudes(const struct TcSetup *setup,
                                         const double *theta,
                                         const double *phi,
                                         double omega1_mev,
                                         double omega2_mev,
                                         uint32_t beam_label,
                                         struct TcDensity **out);

/*
 Validates and wraps a density matrix given as 64 real and 64
 imaginary parts (row-major).
 */
enum TcStatus tc_density_from_elements(const double *re, const double *im, struct TcDensity **out);

/*
 Copies the 64 real and 64 imaginary parts (row-major) into `re`, `im`.
 */
enum TcStatus tc_density_elements(const struct TcDensity *density, double *re, double *im);

/*
 Releases a density matrix; null is ignored.
 */
void tc_density_free(struct TcDensity *density);

/*
 Genuine tripartite entanglement measure τ ∈ [0, ½], solved to
 `tolerance` (e.g. 1e-7).
 */
enum TcStatus tc_gme_tau(const struct TcDensity *density, double tolerance, double *out);

/*
 Events per second for a cross section in barn and colliding beams of
 the given intensities, transverse diameter (μm) and repetition rate.
 */
enum TcStatus tc_event_rate(double sigma_barn,
                            double photons_per_pulse,
                            double electrons_per_bunch,
                            double transverse_size_um,
                            double repetition_rate_hz,
                            double *out);

/*
 Detector-averaged unpolarized cross section (b/sr³) for three detectors
 centred on `theta[3]`, `phi[3]`, each of solid angle `solid_angle_sr`.
 */
enum TcStatus tc_detector_average(const struct TcSetup *setup,
                                  const double *theta,
                                  const double *phi,
                                  double solid_angle_sr,
                                  double threshold_mev,
                                  uint64_t budget,
                                  uint64_t seed,
                                  double *value,
                                  double *error);

/*
 Total cross section (barn) for `photons` = 1, 2 or 3 emitted photons
 above `threshold_mev`.
 */
enum TcStatus tc_total_cross_section(const struct TcSetup *setup,
                                     uint32_t photons,
                                     double threshold_mev,
                                     uint64_t budget,
                                     uint64_t seed,
                                     double *value,
                                     double *error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPLE_COMPTON_H */
