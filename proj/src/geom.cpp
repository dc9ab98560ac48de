#include "egofuse/geom.hpp"

#include <cmath>

namespace egofuse::geom {

UnitQuaternion::UnitQuaternion(double w_, double x_, double y_, double z_)
    : w(w_), x(x_), y(y_), z(z_) {
    const double n = norm();
    w /= n;
    x /= n;
    y /= n;
    z /= n;
}

double UnitQuaternion::norm() const {
    return std::sqrt(w * w + x * x + y * y + z * z);
}

UnitQuaternion UnitQuaternion::normalized() const {
    return {w, x, y, z};
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& r) const {
    return {w * r.w - x * r.x - y * r.y - z * r.z,
            w * r.x + x * r.w + y * r.z - z * r.y,
            w * r.y - x * r.z + y * r.w + z * r.x,
            w * r.z + x * r.y - y * r.x + z * r.w};
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
    // q v q* expanded via the double-cross form.
    const Vec3 u(x, y, z);
    return v + 2.0 * u.cross(u.cross(v) + w * v);
}

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return s;
}

Mat4 omega_matrix(const Vec3& w) {
    Mat4 m;
    m << 0.0, -w.x(), -w.y(), -w.z(),
         w.x(), 0.0, w.z(), -w.y(),
         w.y(), -w.z(), 0.0, w.x(),
         w.z(), w.y(), -w.x(), 0.0;
    return m;
}

Vec4 quat_derivative(const UnitQuaternion& q, const Vec3& omega) {
    return 0.5 * omega_matrix(omega) * q.coeffs();
}

Mat3 quat_to_rot(const UnitQuaternion& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

UnitQuaternion integrate_quat(const UnitQuaternion& q, const Vec3& omega, double dt) {
    return (q * small_angle_quat(omega * dt)).normalized();
}

UnitQuaternion small_angle_quat(const Vec3& dtheta) {
    const double angle = dtheta.norm();
    if (angle < 1e-12) {
        // Second-order series keeps the norm exact to machine precision.
        const Vec3 v = 0.5 * dtheta;
        return {1.0 - 0.5 * v.squaredNorm(), v.x(), v.y(), v.z()};
    }
    const double half = 0.5 * angle;
    const Vec3 axis = dtheta / angle;
    const double s = std::sin(half);
    return {std::cos(half), s * axis.x(), s * axis.y(), s * axis.z()};
}

Vec3 quat_log(const UnitQuaternion& q) {
    double w = q.w;
    Vec3 v(q.x, q.y, q.z);
    if (w < 0.0) {  // take the short branch of the double cover
        w = -w;
        v = -v;
    }
    const double vn = v.norm();
    if (vn < 1e-12) {
        return 2.0 * v / w;
    }
    const double angle = 2.0 * std::atan2(vn, w);
    return angle * v / vn;
}

}  // namespace egofuse::geom
