#pragma once

#include "egofuse/geom.hpp"

namespace egofuse::inertial {

using geom::UnitQuaternion;
using geom::Vec3;

struct ImuSample {
    double t{0.0};     // s
    Vec3 gyro{Vec3::Zero()};   // rad/s, body frame
    Vec3 accel{Vec3::Zero()};  // m/s^2, specific force, body frame
};

/// Continuous-time noise densities (per √Hz).
struct ImuNoiseParams {
    double sigma_g{0.0};   // gyro white noise, rad/s/√Hz
    double sigma_a{0.0};   // accel white noise, m/s^2/√Hz
    double sigma_bg{0.0};  // gyro bias random walk, rad/s^2/√Hz
    double sigma_ba{0.0};  // accel bias random walk, m/s^3/√Hz
};

/// Nominal strapdown state: attitude, world-frame velocity, IMU biases.
struct NominalState {
    UnitQuaternion q;          // q_WI
    Vec3 v{Vec3::Zero()};      // m/s, world frame
    Vec3 bg{Vec3::Zero()};     // rad/s
    Vec3 ba{Vec3::Zero()};     // m/s^2
};

/// Gravity vector subtracted in v̇ = R(a - b_a) - g, ENU world frame.
Vec3 gravity_enu();

constexpr double kMaxImuGap = 0.1;  // s

/// One strapdown step: exact attitude exponential, Euler velocity update
/// with the rotation at the step start. Biases are propagated unchanged.
/// Throws NonMonotoneTime for dt <= 0, GapTooLarge for dt > kMaxImuGap.
NominalState propagate_nominal(const NominalState& s, const ImuSample& u, double dt);

}  // namespace egofuse::inertial
