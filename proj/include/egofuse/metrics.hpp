#pragma once

#include <vector>

#include "egofuse/geom.hpp"

namespace egofuse::metrics {

using geom::Mat3;
using geom::Vec3;

struct VelocitySample {
    double t{0.0};
    Vec3 v{Vec3::Zero()};
};

/// Per-axis MSE and MAE over exactly time-matched samples.
struct Metrics {
    Vec3 mse{Vec3::Zero()};  // (m/s)^2
    Vec3 mae{Vec3::Zero()};  // m/s
    std::size_t n{0};
};

struct ConsistencyStats {
    double mean_nees{0.0};
    double mean_nis{0.0};
    std::size_t n_runs{0};
    double chi2_lo{0.0};
    double chi2_hi{0.0};
};

/// Exact-timestamp matching; any unmatched timestamp in the shorter overlap
/// is a TimestampMismatch, an empty overlap an InputError.
Metrics compute_metrics(const std::vector<VelocitySample>& est,
                        const std::vector<VelocitySample>& gt);

struct NeesSample {
    double t{0.0};
    Vec3 error{Vec3::Zero()};  // velocity error
    Mat3 P_vv{Mat3::Identity()};
};

/// Time-averaged 3-DoF velocity NEES of one run.
double run_nees(const std::vector<NeesSample>& samples);

/// Aggregates per-run average NEES values and attaches the two-sided 95%
/// chi-square interval for the run count (χ²(3N) quantiles divided by N).
ConsistencyStats aggregate_nees(const std::vector<double>& per_run_nees,
                                const std::vector<double>& per_run_nis);

/// Two-sided 95% interval for the N-run average of a chi-square(dof)
/// variable: [χ²_{0.025, N·dof}, χ²_{0.975, N·dof}] / N.
std::pair<double, double> chi2_mean_bounds(std::size_t n_runs, int dof);

}  // namespace egofuse::metrics
