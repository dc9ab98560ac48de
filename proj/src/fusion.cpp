#include "egofuse/fusion.hpp"

#include <Eigen/Cholesky>

#include "egofuse/errors.hpp"

namespace egofuse::fusion {

namespace {

Mat12 symmetrize(const Mat12& m) {
    return 0.5 * (m + m.transpose());
}

NominalState inject_error(const NominalState& s, const Vec12& dx) {
    NominalState out = s;
    out.q = (geom::small_angle_quat(dx.segment<3>(0)) * s.q).normalized();
    out.v = s.v + dx.segment<3>(3);
    out.bg = s.bg + dx.segment<3>(6);
    out.ba = s.ba + dx.segment<3>(9);
    return out;
}

}  // namespace

Mat12 process_jacobian(const NominalState& s, const ImuSample& u) {
    const Mat3 rot = geom::quat_to_rot(s.q);
    const Vec3 a_corr = u.accel - s.ba;
    Mat12 f = Mat12::Zero();
    f.block<3, 3>(0, 6) = -rot;
    f.block<3, 3>(3, 0) = -geom::skew(rot * a_corr);
    f.block<3, 3>(3, 9) = -rot;
    return f;
}

Mat12 noise_jacobian(const NominalState& s) {
    Mat12 l = Mat12::Identity();
    l.block<3, 3>(0, 0) = geom::quat_to_rot(s.q);
    return l;
}

std::pair<NominalState, Mat12> predict(const NominalState& s, const Mat12& P,
                                       const ImuSample& u, double dt,
                                       const FilterConfig& cfg) {
    const NominalState next = inertial::propagate_nominal(s, u, dt);

    const Mat12 F = process_jacobian(s, u);
    const Mat12 phi = Mat12::Identity() + F * dt;
    const Mat12 L = noise_jacobian(s);

    Vec12 qd;
    const auto& n = cfg.noise;
    qd << Vec3::Constant(n.sigma_g * n.sigma_g), Vec3::Constant(n.sigma_a * n.sigma_a),
        Vec3::Constant(n.sigma_bg * n.sigma_bg), Vec3::Constant(n.sigma_ba * n.sigma_ba);
    qd *= dt;

    const Mat12 P_next = phi * P * phi.transpose() + L * qd.asDiagonal() * L.transpose();
    return {next, symmetrize(P_next)};
}

Vec3 measurement_predict(const NominalState& s, const Vec3& gyro_corrected,
                         const Extrinsics& ex) {
    const Mat3 rot = geom::quat_to_rot(s.q);
    return s.v + rot * gyro_corrected.cross(ex.lever_arm);
}

Mat3x12 measurement_jacobian(const NominalState& s, const Vec3& gyro_corrected,
                             const Extrinsics& ex) {
    const Mat3 rot = geom::quat_to_rot(s.q);
    Mat3x12 h = Mat3x12::Zero();
    // Attitude sensitivity enters only through the rotated lever-arm term.
    h.block<3, 3>(0, 0) = -geom::skew(rot * gyro_corrected.cross(ex.lever_arm));
    h.block<3, 3>(0, 3) = Mat3::Identity();
    // δb_g reduces ω_I, and ∂(ω×P)/∂ω = -[P]×, so the two signs cancel.
    h.block<3, 3>(0, 6) = rot * geom::skew(ex.lever_arm);
    return h;
}

Mat3 adaptive_R(const VelocityMeasurement& m, const FilterConfig& cfg) {
    if (!cfg.use_predicted_sigma) {
        return cfg.fixed_R;
    }
    Eigen::LLT<Mat3> llt(m.sigma_m);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("adaptive_R: measurement covariance is not SPD");
    }
    Mat3 r = m.sigma_m;
    for (int i = 0; i < 3; ++i) {
        r(i, i) = std::max(r(i, i), cfg.r_floor);
    }
    return r;
}

std::tuple<NominalState, Mat12, UpdateReport> update(const NominalState& s, const Mat12& P,
                                                     const VelocityMeasurement& m,
                                                     const Vec3& gyro_raw, const Extrinsics& ex,
                                                     const FilterConfig& cfg) {
    const Vec3 omega = gyro_raw - s.bg;
    const Mat3x12 H = measurement_jacobian(s, omega, ex);
    const Mat3 R = adaptive_R(m, cfg);

    const Vec3 innovation = m.v_m - measurement_predict(s, omega, ex);
    const Mat3 S = H * P * H.transpose() + R;

    Eigen::LLT<Mat3> llt(S);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("update: innovation covariance is not SPD");
    }

    UpdateReport report;
    report.t = m.t;
    report.innovation = innovation;
    report.innovation_cov = S;
    report.nis = innovation.dot(llt.solve(innovation));

    const Eigen::Matrix<double, 12, 3> K = llt.solve(H * P).transpose();
    report.gain_norm = K.norm();

    if (report.nis > cfg.gate_chi2) {
        report.accepted = false;
        return {s, P, report};
    }
    report.accepted = true;

    const Vec12 dx = K * innovation;
    const NominalState next = inject_error(s, dx);

    const Mat12 ikh = Mat12::Identity() - K * H;
    const Mat12 P_next = ikh * P * ikh.transpose() + K * R * K.transpose();
    return {next, symmetrize(P_next), report};
}

std::vector<FilterRecord> run_filter(const std::vector<ImuSample>& imu,
                                     const std::vector<VelocityMeasurement>& radar,
                                     const NominalState& x0, const Extrinsics& ex,
                                     const FilterConfig& cfg) {
    Filter filter(x0, ex, cfg);
    std::vector<FilterRecord> records;
    records.reserve(imu.size());

    std::size_t next_meas = 0;
    for (const auto& u : imu) {
        filter.predict_to(u);
        std::optional<UpdateReport> report;
        while (next_meas < radar.size() && radar[next_meas].t <= filter.time() + 1e-12) {
            report = filter.apply(radar[next_meas]);
            ++next_meas;
        }
        records.push_back({filter.time(), filter.state(), filter.covariance(), report});
    }
    return records;
}

Filter::Filter(const NominalState& x0, const Extrinsics& ex, const FilterConfig& cfg)
    : state_(x0), P_(cfg.P0), ex_(ex), cfg_(cfg) {}

void Filter::predict_to(const ImuSample& u) {
    if (!started_) {
        started_ = true;
        t_ = u.t;
        last_gyro_ = u.gyro;
        return;
    }
    const double dt = u.t - t_;
    if (dt <= 0.0) {
        throw NonMonotoneTime("Filter: IMU stream is not time-sorted at t=" +
                              std::to_string(u.t));
    }
    std::tie(state_, P_) = predict(state_, P_, u, dt, cfg_);
    t_ = u.t;
    last_gyro_ = u.gyro;
}

UpdateReport Filter::apply(const VelocityMeasurement& m) {
    if (std::abs(m.t - t_) > cfg_.max_meas_age) {
        throw TimestampMismatch("Filter: measurement at t=" + std::to_string(m.t) +
                                " is too far from filter time " + std::to_string(t_));
    }
    UpdateReport report;
    std::tie(state_, P_, report) = update(state_, P_, m, last_gyro_, ex_, cfg_);
    return report;
}

}  // namespace egofuse::fusion
