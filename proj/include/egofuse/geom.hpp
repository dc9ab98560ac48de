#pragma once

#include <Eigen/Dense>

namespace egofuse::geom {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Unit quaternion, scalar-first Hamilton convention. q_WI rotates
/// IMU-frame vectors into the world (ENU) frame.
struct UnitQuaternion {
    double w{1.0}, x{0.0}, y{0.0}, z{0.0};

    UnitQuaternion() = default;
    UnitQuaternion(double w_, double x_, double y_, double z_);

    static UnitQuaternion identity() { return {}; }

    double norm() const;
    UnitQuaternion normalized() const;
    UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }

    Vec4 coeffs() const { return {w, x, y, z}; }

    /// Hamilton product this ⊗ rhs, renormalized.
    UnitQuaternion operator*(const UnitQuaternion& rhs) const;

    /// Rotate a vector by the quaternion sandwich product q v q*.
    Vec3 rotate(const Vec3& v) const;
};

/// Cross-product matrix: skew(v) * u == v × u.
Mat3 skew(const Vec3& v);

/// 4x4 quaternion-rate matrix Ω(ω) with q̇ = ½ Ω(ω) q for body-frame ω.
Mat4 omega_matrix(const Vec3& omega);

/// ½ Ω(ω) q as a raw 4-vector (w,x,y,z); not renormalized.
Vec4 quat_derivative(const UnitQuaternion& q, const Vec3& omega);

/// Rotation matrix equivalent of q (world ← body for q_WI).
Mat3 quat_to_rot(const UnitQuaternion& q);

/// Exact axis-angle exponential: q ⊗ exp(ω dt / 2), renormalized.
UnitQuaternion integrate_quat(const UnitQuaternion& q, const Vec3& omega, double dt);

/// exp(δθ/2) for multiplicative attitude-error injection.
UnitQuaternion small_angle_quat(const Vec3& dtheta);

/// Rotation-vector log: inverse of small_angle_quat, ‖result‖ < π.
Vec3 quat_log(const UnitQuaternion& q);

}  // namespace egofuse::geom
