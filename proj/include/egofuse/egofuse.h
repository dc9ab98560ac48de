/* C API for the egofuse radar-inertial ego-velocity toolkit.
 *
 * All functions return an ef_status; EF_OK is 0. On failure,
 * ef_last_error() returns a thread-local description of the most recent
 * error on the calling thread. Handles are opaque and must be released
 * with their destroy function. */
#ifndef EGOFUSE_H
#define EGOFUSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ef_status {
    EF_OK = 0,
    EF_ERR_INPUT = 2,   /* malformed input, bad arguments, I/O failure */
    EF_ERR_NUMERIC = 3, /* singular matrix, failed decomposition, no consensus */
    EF_ERR_INTERNAL = 4
} ef_status;

/* Thread-local message for the last failure on this thread. */
const char* ef_last_error(void);

/* ------------------------------------------------------------------ */
/* Streaming error-state EKF                                           */

typedef struct ef_filter ef_filter;

typedef struct ef_filter_config {
    double p0_diag[12];     /* initial error covariance diagonal */
    double sigma_g;         /* IMU noise densities (per sqrt(Hz)) */
    double sigma_a;
    double sigma_bg;
    double sigma_ba;
    double r_floor;         /* (m/s)^2 floor on measurement variances */
    double gate_chi2;       /* innovation gate, chi-square(3) */
    int use_predicted_sigma;
    double fixed_r_diag[3]; /* used when use_predicted_sigma == 0 */
} ef_filter_config;

typedef struct ef_calibration {
    double lever_arm[3]; /* radar origin in the IMU frame, m */
    double q_ri[4];      /* radar->IMU rotation, scalar-first */
} ef_calibration;

typedef struct ef_state {
    double t;
    double q[4]; /* scalar-first attitude q_WI */
    double v[3]; /* world-frame velocity, m/s */
    double bg[3];
    double ba[3];
    double p_diag[12];
} ef_state;

typedef struct ef_update_report {
    double t;
    double innovation[3];
    double nis;
    int accepted;
    double gain_norm;
} ef_update_report;

/* Fills cfg with the library defaults. */
void ef_filter_config_default(ef_filter_config* cfg);

/* x0 may be NULL for the identity/zero initial state (x0->t ignored;
 * the clock starts at the first IMU sample). */
ef_status ef_filter_create(const ef_filter_config* cfg, const ef_calibration* calib,
                           const ef_state* x0, ef_filter** out);
void ef_filter_destroy(ef_filter* f);

ef_status ef_filter_predict(ef_filter* f, double t, const double gyro[3],
                            const double accel[3]);
/* sigma is the row-major 3x3 measurement covariance. report may be NULL. */
ef_status ef_filter_update(ef_filter* f, double t, const double v[3], const double sigma[9],
                           ef_update_report* report);
ef_status ef_filter_state(const ef_filter* f, ef_state* out);

/* ------------------------------------------------------------------ */
/* Covariance-head math                                                */

/* Six Cholesky-factor parameters -> row-major SPD 3x3. */
ef_status ef_construct_covariance(const double params6[6], double sigma_out[9]);

/* Gaussian NLL + diagonal regularizer; any of the three outputs may be
 * NULL. sigma is row-major 3x3. */
ef_status ef_loss(const double y[3], const double y_hat[3], const double sigma[9],
                  double lambda1, double epsilon, double* nll, double* diag_reg,
                  double* total);

/* ------------------------------------------------------------------ */
/* Doppler baseline                                                    */

typedef struct ef_doppler_fit {
    double v[3];       /* radar-frame ego-velocity */
    double sigma[9];   /* row-major covariance */
    double residual_rms;
    size_t n_inliers;
} ef_doppler_fit;

/* dirs: n unit direction triples (row-major), vr: n radial velocities. */
ef_status ef_ls_velocity(const double* dirs, const double* vr, size_t n,
                         ef_doppler_fit* out);
ef_status ef_ransac_velocity(const double* dirs, const double* vr, size_t n, int iters,
                             double threshold, uint64_t seed, ef_doppler_fit* out);

/* ------------------------------------------------------------------ */
/* File-level pipeline (formats documented in the README)              */

ef_status ef_run_sim(const char* scenario_toml, const char* out_dir);
ef_status ef_run_fuse(const char* imu_csv, const char* radar_csv, const char* calib_json,
                      const char* config_json_or_null, const char* out_csv, int use_sigma,
                      const char* init_gt_csv_or_null);
ef_status ef_run_doppler(const char* detections_csv, const char* out_csv, int iters,
                         double threshold, uint64_t seed);
ef_status ef_run_eval(const char* est_csv, const char* gt_csv, const char* metrics_json,
                      const char* dump_csv_or_null);
ef_status ef_run_mc(const char* scenario_toml, const char* config_json_or_null, int n_runs,
                    int max_threads, const char* out_json);
ef_status ef_cube_synthesize(const char* scene_json, const char* out_rdc);
ef_status ef_cube_process(const char* in_rdc, const char* out_rdc);
ef_status ef_cube_detect(const char* in_rdc, double threshold_db, const char* out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EGOFUSE_H */
