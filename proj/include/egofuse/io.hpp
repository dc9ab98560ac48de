#pragma once

#include <string>
#include <vector>

#include "egofuse/fusion.hpp"
#include "egofuse/metrics.hpp"
#include "egofuse/sim.hpp"

namespace egofuse::io {

using fusion::Extrinsics;
using fusion::FilterConfig;
using fusion::FilterRecord;
using fusion::VelocityMeasurement;
using inertial::ImuSample;
using metrics::Metrics;
using metrics::VelocitySample;
using sim::DetectionFrame;
using sim::GroundTruthSample;
using sim::Scenario;

// IMU CSV: t,gx,gy,gz,ax,ay,az (SI units)
std::vector<ImuSample> read_imu_csv(const std::string& path);
void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples);

// Ground-truth CSV: t,qw,qx,qy,qz,vx,vy,vz
std::vector<GroundTruthSample> read_gt_csv(const std::string& path);
void write_gt_csv(const std::string& path, const std::vector<GroundTruthSample>& truth);

// Velocity measurement CSV: t,vx,vy,vz,s11,s12,s13,s22,s23,s33
// (upper triangle of sigma_m, row-major)
std::vector<VelocityMeasurement> read_radar_vel_csv(const std::string& path);
void write_radar_vel_csv(const std::string& path,
                         const std::vector<VelocityMeasurement>& measurements);

// Detections CSV: t,dx,dy,dz,vr grouped by timestamp. Directions are
// unit-normalized on load; a stderr warning is printed if off by > 1e-6.
std::vector<DetectionFrame> read_detections_csv(const std::string& path);
void write_detections_csv(const std::string& path, const std::vector<DetectionFrame>& frames);

// Estimate CSV: t,qw..qz,vx..vz,bgx..bgz,bax..baz,p11..p1212 (P diagonal)
void write_estimates_csv(const std::string& path, const std::vector<FilterRecord>& records);
struct EstimateRecord {
    double t{0.0};
    inertial::NominalState state;
    Eigen::Matrix<double, 12, 1> p_diag;
};
std::vector<EstimateRecord> read_estimates_csv(const std::string& path);

// Calibration JSON: {"lever_arm":[x,y,z],"q_RI":[w,x,y,z],"gravity":9.80665}
Extrinsics read_calibration_json(const std::string& path);
void write_calibration_json(const std::string& path, const Extrinsics& ex);

// Filter config JSON (P0 and fixed_R diagonals, noise densities, gate).
FilterConfig read_filter_config_json(const std::string& path);
void write_filter_config_json(const std::string& path, const FilterConfig& cfg);

// Scenario TOML (flat key = value; see README for the key list).
Scenario read_scenario_toml(const std::string& path);

void write_metrics_json(const std::string& path, const Metrics& m);

std::vector<VelocitySample> velocity_series_from_estimates(
    const std::vector<EstimateRecord>& records);
std::vector<VelocitySample> velocity_series_from_gt(
    const std::vector<GroundTruthSample>& truth);

}  // namespace egofuse::io
