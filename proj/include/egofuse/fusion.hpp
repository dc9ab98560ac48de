#pragma once

#include <optional>
#include <vector>

#include "egofuse/inertial.hpp"

namespace egofuse::fusion {

using geom::Mat3;
using geom::UnitQuaternion;
using geom::Vec3;
using inertial::ImuNoiseParams;
using inertial::ImuSample;
using inertial::NominalState;

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

// Error-state ordering: [δθ(0..2), δv(3..5), δb_g(6..8), δb_a(9..11)].
// Attitude error is left-multiplicative: q = small_angle_quat(δθ) ⊗ q̂.

/// Timestamped 3D velocity measurement with its predicted covariance.
struct VelocityMeasurement {
    double t{0.0};
    Vec3 v_m{Vec3::Zero()};
    Mat3 sigma_m{Mat3::Identity()};
};

/// Radar-to-IMU mounting: lever arm P_RI (radar origin in the IMU frame)
/// and rotation q_RI (radar frame → IMU frame).
struct Extrinsics {
    Vec3 lever_arm{Vec3::Zero()};
    UnitQuaternion q_RI;
};

struct FilterConfig {
    Mat12 P0{Mat12::Identity() * 1e-2};
    ImuNoiseParams noise;
    double r_floor{1e-6};          // (m/s)^2, floor on measurement variance
    double gate_chi2{16.27};       // chi-square 0.999 quantile, 3 DoF
    bool use_predicted_sigma{true};
    Mat3 fixed_R{Mat3::Identity() * 1e-2};  // used when use_predicted_sigma is false
    double max_meas_age{0.05};     // s, measurement/state time mismatch limit
};

struct UpdateReport {
    double t{0.0};
    Vec3 innovation{Vec3::Zero()};
    Mat3 innovation_cov{Mat3::Identity()};
    double nis{0.0};
    bool accepted{false};
    double gain_norm{0.0};  // Frobenius norm of the 12x3 Kalman gain
};

/// Jacobian F of the continuous error-state dynamics.
Mat12 process_jacobian(const NominalState& s, const ImuSample& u);

/// Noise Jacobian L, block-diagonal [R, I, I, I].
Mat12 noise_jacobian(const NominalState& s);

/// EKF prediction: propagates the nominal state and P = ΦPΦᵀ + LQ_dLᵀ
/// with Φ = I + F·dt and Q_d = diag(σ²)·dt. Output P is symmetrized.
std::pair<NominalState, Mat12> predict(const NominalState& s, const Mat12& P,
                                       const ImuSample& u, double dt,
                                       const FilterConfig& cfg);

/// Measurement model h(x): world-frame velocity of the radar origin,
/// V_I + R_WI (ω_I × P_RI), with ω_I the bias-corrected body rate.
Vec3 measurement_predict(const NominalState& s, const Vec3& gyro_corrected,
                         const Extrinsics& ex);

/// Analytic 3x12 measurement Jacobian under the error-state convention.
Mat3x12 measurement_jacobian(const NominalState& s, const Vec3& gyro_corrected,
                             const Extrinsics& ex);

/// Measurement covariance for the update: the measurement's own sigma with
/// a diagonal floor when use_predicted_sigma, else the fixed config R.
Mat3 adaptive_R(const VelocityMeasurement& m, const FilterConfig& cfg);

/// Gated Joseph-form EKF update with multiplicative error injection.
std::tuple<NominalState, Mat12, UpdateReport> update(const NominalState& s, const Mat12& P,
                                                     const VelocityMeasurement& m,
                                                     const Vec3& gyro_raw, const Extrinsics& ex,
                                                     const FilterConfig& cfg);

/// One output record per IMU sample.
struct FilterRecord {
    double t{0.0};
    NominalState state;
    Mat12 P;
    std::optional<UpdateReport> report;
};

/// Sequential filter over time-sorted IMU and radar streams. Predicts at
/// every IMU sample and applies each measurement once its timestamp has
/// been reached. Throws NonMonotoneTime on unsorted input.
std::vector<FilterRecord> run_filter(const std::vector<ImuSample>& imu,
                                     const std::vector<VelocityMeasurement>& radar,
                                     const NominalState& x0, const Extrinsics& ex,
                                     const FilterConfig& cfg);

/// Streaming form of run_filter, used by the C API.
class Filter {
public:
    Filter(const NominalState& x0, const Extrinsics& ex, const FilterConfig& cfg);

    /// Advance to the sample's timestamp (first call only sets the clock).
    void predict_to(const ImuSample& u);

    /// Apply a measurement at the current time. Returns the update report.
    UpdateReport apply(const VelocityMeasurement& m);

    double time() const { return t_; }
    bool started() const { return started_; }
    const NominalState& state() const { return state_; }
    const Mat12& covariance() const { return P_; }
    const Vec3& last_gyro() const { return last_gyro_; }

private:
    NominalState state_;
    Mat12 P_;
    Extrinsics ex_;
    FilterConfig cfg_;
    double t_{0.0};
    bool started_{false};
    Vec3 last_gyro_{Vec3::Zero()};
};

}  // namespace egofuse::fusion
