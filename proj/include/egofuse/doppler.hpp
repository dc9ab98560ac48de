#pragma once

#include <cstdint>
#include <vector>

#include "egofuse/fusion.hpp"

namespace egofuse::doppler {

using fusion::Extrinsics;
using fusion::VelocityMeasurement;
using geom::Mat3;
using geom::UnitQuaternion;
using geom::Vec3;

/// One radar detection: unit direction from the radar to the target (radar
/// frame) and the measured radial velocity (range rate; v_r = -dᵀv for a
/// static target seen from a platform moving with velocity v).
struct RadarDetection {
    Vec3 dir{Vec3::UnitX()};
    double v_r{0.0};     // m/s
    double weight{1.0};  // > 0
};

struct DopplerFit {
    Vec3 v{Vec3::Zero()};        // ego-velocity, radar frame
    Mat3 sigma{Mat3::Identity()};
    std::vector<std::size_t> inliers;
    double residual_rms{0.0};
};

constexpr double kResidualVarianceFloor = 1e-6;  // (m/s)^2

/// Weighted least squares over v_r_i = -d_iᵀ v. Throws TooFewDetections
/// for n < 3 and RankDeficient when the directions span fewer than 3 dims.
DopplerFit ls_velocity(const std::vector<RadarDetection>& dets);

/// Classic hypothesize-verify RANSAC over minimal 3-detection fits with a
/// final least-squares refit on the consensus set. Deterministic for a
/// fixed seed. Throws NoConsensus if the best inlier count is below 3.
DopplerFit ransac_velocity(const std::vector<RadarDetection>& dets, int iters,
                           double threshold, std::uint64_t seed);

/// Rotate a radar-frame fit into the world-frame measurement the filter
/// consumes: v_world = R_WI R_IR v_radar, covariance by congruence.
VelocityMeasurement to_measurement(const DopplerFit& fit, double t, const Extrinsics& ex,
                                   const UnitQuaternion& attitude);

}  // namespace egofuse::doppler
