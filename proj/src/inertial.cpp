#include "egofuse/inertial.hpp"

#include "egofuse/errors.hpp"

namespace egofuse::inertial {

Vec3 gravity_enu() {
    return {0.0, 0.0, 9.80665};
}

NominalState propagate_nominal(const NominalState& s, const ImuSample& u, double dt) {
    if (dt <= 0.0) {
        throw NonMonotoneTime("propagate_nominal: dt must be positive, got " + std::to_string(dt));
    }
    if (dt > kMaxImuGap) {
        throw GapTooLarge("propagate_nominal: IMU gap " + std::to_string(dt) + " s exceeds " +
                          std::to_string(kMaxImuGap) + " s");
    }
    NominalState out = s;
    const geom::Mat3 rot = geom::quat_to_rot(s.q);
    out.q = geom::integrate_quat(s.q, u.gyro - s.bg, dt);
    out.v = s.v + (rot * (u.accel - s.ba) - gravity_enu()) * dt;
    return out;
}

}  // namespace egofuse::inertial
