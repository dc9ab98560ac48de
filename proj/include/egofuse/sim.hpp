#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egofuse/doppler.hpp"
#include "egofuse/fusion.hpp"

namespace egofuse::sim {

using doppler::RadarDetection;
using fusion::Extrinsics;
using fusion::VelocityMeasurement;
using geom::Mat3;
using geom::UnitQuaternion;
using geom::Vec3;
using inertial::ImuNoiseParams;
using inertial::ImuSample;

/// Analytic trajectory profile. Velocity, attitude and their derivatives
/// are closed-form so the simulator introduces no integration error.
struct TrajectoryProfile {
    std::string id{"constant"};  // "constant" | "sinusoid" | "figure_eight"

    // constant / sinusoid
    Vec3 v0{Vec3::Zero()};
    Vec3 v_amp{Vec3::Zero()};
    Vec3 v_freq{Vec3::Zero()};   // Hz per axis
    Vec3 v_phase{Vec3::Zero()};  // rad

    // sinusoid attitude: ZYX Euler angles (roll=x, pitch=y, yaw=z)
    Vec3 euler_amp{Vec3::Zero()};
    Vec3 euler_freq{Vec3::Zero()};
    Vec3 euler_phase{Vec3::Zero()};

    // figure_eight
    double yaw_amp{1.0};
    double yaw_freq{0.05};
    double speed0{2.0};
    double speed_amp{0.5};
    double speed_freq{0.1};
};

struct Scenario {
    double duration{60.0};    // s
    double imu_rate{100.0};   // Hz
    double radar_rate{5.0};   // Hz
    TrajectoryProfile trajectory;
    Vec3 true_bg{Vec3::Zero()};
    Vec3 true_ba{Vec3::Zero()};
    ImuNoiseParams noise;
    Mat3 radar_sigma{Mat3::Identity() * 1e-2};
    Extrinsics extrinsics;
    int n_static_targets{12};
    int n_dynamic_targets{0};
    double detection_noise{0.01};      // m/s std on each radial velocity
    double dynamic_speed_min{1.0};     // m/s, dynamic-target speed range
    double dynamic_speed_max{3.0};
    double reported_sigma_scale{1.0};  // scales sigma_m tags only
    // Window where measurement noise and reported sigma are both inflated.
    double inflate_start{0.0};
    double inflate_end{0.0};
    double inflate_factor{1.0};
    std::uint64_t seed{1};
};

struct GroundTruthSample {
    double t{0.0};
    UnitQuaternion q;               // q_WI
    Vec3 v{Vec3::Zero()};           // m/s, world
    Vec3 omega{Vec3::Zero()};       // rad/s, body
    Vec3 accel_world{Vec3::Zero()}; // m/s^2, d/dt v (gravity excluded)
};

/// Closed-form trajectory state at time t.
GroundTruthSample truth_at(const TrajectoryProfile& profile, double t);

/// Truth sampled at imu_rate over [0, duration]. Throws UnknownProfile
/// (InputError) for an unrecognized profile id.
std::vector<GroundTruthSample> generate_truth(const Scenario& sc);

/// Inverse strapdown: gyro/accel with biases, bias random walk and seeded
/// white noise (sigma_discrete = sigma_density / sqrt(dt)).
std::vector<ImuSample> simulate_imu(const std::vector<GroundTruthSample>& truth,
                                    const Scenario& sc);

/// Radar-rate world-frame radar-origin velocity measurements with seeded
/// Gaussian noise; timestamps aligned to the nearest IMU sample time.
std::vector<VelocityMeasurement> simulate_velocity_measurements(
    const std::vector<GroundTruthSample>& truth, const Scenario& sc);

struct DetectionFrame {
    double t{0.0};
    std::vector<RadarDetection> detections;
};

/// Per-radar-frame detection sets: static far-field targets obey
/// v_r = -dᵀ v_radar; dynamic targets add their own velocity projection.
std::vector<DetectionFrame> simulate_detections(const std::vector<GroundTruthSample>& truth,
                                                const Scenario& sc);

}  // namespace egofuse::sim
