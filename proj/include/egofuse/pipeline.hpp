#pragma once

#include <cstdint>
#include <string>

#include "egofuse/metrics.hpp"

namespace egofuse::pipeline {

/// Scenario TOML → imu.csv, gt.csv, radar_vel.csv, detections.csv in out_dir.
void run_sim(const std::string& scenario_toml, const std::string& out_dir);

/// EKF over the file formats: IMU CSV + measurement CSV + calibration JSON
/// (+ optional filter-config JSON) → estimate CSV. use_sigma toggles the
/// per-measurement covariance against the config's fixed R. When init_gt is
/// non-empty the filter starts from its first row's attitude and velocity.
void run_fuse(const std::string& imu_csv, const std::string& radar_csv,
              const std::string& calib_json, const std::string& config_json,
              const std::string& out_csv, bool use_sigma, const std::string& init_gt = "");

/// RANSAC Doppler baseline: detections CSV → velocity-measurement CSV.
void run_doppler(const std::string& detections_csv, const std::string& out_csv, int iters,
                 double threshold, std::uint64_t seed);

/// Estimate CSV vs ground-truth CSV → Metrics (optionally written as JSON
/// and a per-sample error CSV for plotting).
metrics::Metrics run_eval(const std::string& est_csv, const std::string& gt_csv,
                          const std::string& metrics_json, const std::string& dump_csv = "");

/// N seeded sim+fuse runs → velocity-NEES consistency stats. Parallelism is
/// capped by max_threads (0 = hardware default, further capped by the
/// EGOFUSE_THREADS environment variable). Aggregation is seed-ordered.
metrics::ConsistencyStats run_mc(const std::string& scenario_toml,
                                 const std::string& config_json, int n_runs, int max_threads,
                                 const std::string& out_json);

/// Scene JSON → RDC1 ADC cube file.
void cube_synthesize(const std::string& scene_json, const std::string& out_rdc);
/// ADC RDC1 → processed range/Doppler/angle RDC1.
void cube_process(const std::string& in_rdc, const std::string& out_rdc);
/// Processed RDC1 → detections CSV.
void cube_detect(const std::string& in_rdc, double threshold_db, const std::string& out_csv);

}  // namespace egofuse::pipeline
