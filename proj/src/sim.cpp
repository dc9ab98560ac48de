#include "egofuse/sim.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "egofuse/errors.hpp"

namespace egofuse::sim {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

UnitQuaternion axis_quat(const Vec3& axis, double angle) {
    return geom::small_angle_quat(axis * angle);
}

GroundTruthSample sinusoid_truth(const TrajectoryProfile& p, double t) {
    GroundTruthSample g;
    g.t = t;
    for (int i = 0; i < 3; ++i) {
        const double arg = kTwoPi * p.v_freq[i] * t + p.v_phase[i];
        g.v[i] = p.v0[i] + p.v_amp[i] * std::sin(arg);
        g.accel_world[i] = p.v_amp[i] * kTwoPi * p.v_freq[i] * std::cos(arg);
    }

    // ZYX Euler angles with sinusoidal time laws; body rates in closed form.
    double ang[3], rate[3];  // roll (x), pitch (y), yaw (z)
    for (int i = 0; i < 3; ++i) {
        const double arg = kTwoPi * p.euler_freq[i] * t + p.euler_phase[i];
        ang[i] = p.euler_amp[i] * std::sin(arg);
        rate[i] = p.euler_amp[i] * kTwoPi * p.euler_freq[i] * std::cos(arg);
    }
    const double roll = ang[0], pitch = ang[1], yaw = ang[2];
    const double droll = rate[0], dpitch = rate[1], dyaw = rate[2];

    g.q = (axis_quat(Vec3::UnitZ(), yaw) * axis_quat(Vec3::UnitY(), pitch) *
           axis_quat(Vec3::UnitX(), roll))
              .normalized();
    g.omega = Vec3(droll - dyaw * std::sin(pitch),
                   dpitch * std::cos(roll) + dyaw * std::cos(pitch) * std::sin(roll),
                   -dpitch * std::sin(roll) + dyaw * std::cos(pitch) * std::cos(roll));
    return g;
}

GroundTruthSample figure_eight_truth(const TrajectoryProfile& p, double t) {
    GroundTruthSample g;
    g.t = t;
    const double psi = p.yaw_amp * std::sin(kTwoPi * p.yaw_freq * t);
    const double dpsi = p.yaw_amp * kTwoPi * p.yaw_freq * std::cos(kTwoPi * p.yaw_freq * t);
    const double s = p.speed0 + p.speed_amp * std::sin(kTwoPi * p.speed_freq * t);
    const double ds = p.speed_amp * kTwoPi * p.speed_freq * std::cos(kTwoPi * p.speed_freq * t);

    const double c = std::cos(psi), sn = std::sin(psi);
    g.v = Vec3(s * c, s * sn, 0.0);
    g.accel_world = Vec3(ds * c - s * dpsi * sn, ds * sn + s * dpsi * c, 0.0);
    g.q = axis_quat(Vec3::UnitZ(), psi);
    g.omega = Vec3(0.0, 0.0, dpsi);
    return g;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    // splitmix-style mixing so per-stream generators are decorrelated
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return std::mt19937_64(z ^ (z >> 31));
}

bool in_inflate_window(const Scenario& sc, double t) {
    return sc.inflate_factor != 1.0 && t >= sc.inflate_start && t < sc.inflate_end;
}

}  // namespace

GroundTruthSample truth_at(const TrajectoryProfile& profile, double t) {
    if (profile.id == "constant") {
        GroundTruthSample g;
        g.t = t;
        g.v = profile.v0;
        return g;
    }
    if (profile.id == "sinusoid") {
        return sinusoid_truth(profile, t);
    }
    if (profile.id == "figure_eight") {
        return figure_eight_truth(profile, t);
    }
    throw InputError("truth_at: unknown trajectory profile '" + profile.id + "'");
}

std::vector<GroundTruthSample> generate_truth(const Scenario& sc) {
    if (sc.duration <= 0.0 || sc.imu_rate <= 0.0 || sc.radar_rate <= 0.0 ||
        sc.radar_rate > sc.imu_rate) {
        throw InputError("generate_truth: invalid scenario rates/duration");
    }
    const double dt = 1.0 / sc.imu_rate;
    const auto n = static_cast<std::size_t>(std::llround(sc.duration * sc.imu_rate));
    std::vector<GroundTruthSample> truth;
    truth.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        truth.push_back(truth_at(sc.trajectory, static_cast<double>(k) * dt));
    }
    return truth;
}

std::vector<ImuSample> simulate_imu(const std::vector<GroundTruthSample>& truth,
                                    const Scenario& sc) {
    const double dt = 1.0 / sc.imu_rate;
    const double sqrt_dt = std::sqrt(dt);
    auto rng = stream_rng(sc.seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double sg = sc.noise.sigma_g / sqrt_dt;
    const double sa = sc.noise.sigma_a / sqrt_dt;

    Vec3 bg = sc.true_bg;
    Vec3 ba = sc.true_ba;

    std::vector<ImuSample> out;
    out.reserve(truth.size());
    for (const auto& g : truth) {
        const geom::Mat3 rot_t = geom::quat_to_rot(g.q).transpose();
        ImuSample u;
        u.t = g.t;
        u.gyro = g.omega + bg;
        u.accel = rot_t * (g.accel_world + inertial::gravity_enu()) + ba;
        if (sg > 0.0 || sa > 0.0) {
            u.gyro += sg * Vec3(gauss(rng), gauss(rng), gauss(rng));
            u.accel += sa * Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
        out.push_back(u);
        if (sc.noise.sigma_bg > 0.0) {
            bg += sc.noise.sigma_bg * sqrt_dt * Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
        if (sc.noise.sigma_ba > 0.0) {
            ba += sc.noise.sigma_ba * sqrt_dt * Vec3(gauss(rng), gauss(rng), gauss(rng));
        }
    }
    return out;
}

std::vector<VelocityMeasurement> simulate_velocity_measurements(
    const std::vector<GroundTruthSample>& truth, const Scenario& sc) {
    auto rng = stream_rng(sc.seed, 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::LLT<Mat3> llt(sc.radar_sigma);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("simulate_velocity_measurements: radar_sigma is not SPD");
    }
    const Mat3 chol = llt.matrixL();

    const auto stride = static_cast<std::size_t>(std::llround(sc.imu_rate / sc.radar_rate));
    std::vector<VelocityMeasurement> out;
    for (std::size_t k = stride; k < truth.size(); k += stride) {
        const auto& g = truth[k];
        inertial::NominalState st;
        st.q = g.q;
        st.v = g.v;
        VelocityMeasurement m;
        m.t = g.t;
        const double scale = in_inflate_window(sc, g.t) ? sc.inflate_factor : 1.0;
        m.v_m = fusion::measurement_predict(st, g.omega, sc.extrinsics) +
                std::sqrt(scale) * (chol * Vec3(gauss(rng), gauss(rng), gauss(rng)));
        m.sigma_m = sc.radar_sigma * scale * sc.reported_sigma_scale;
        out.push_back(m);
    }
    return out;
}

std::vector<DetectionFrame> simulate_detections(const std::vector<GroundTruthSample>& truth,
                                                const Scenario& sc) {
    if (sc.n_static_targets < 3) {
        throw InputError("simulate_detections: need at least 3 static targets");
    }
    auto rng = stream_rng(sc.seed, 2);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const Mat3 r_ir = geom::quat_to_rot(sc.extrinsics.q_RI);
    const auto stride = static_cast<std::size_t>(std::llround(sc.imu_rate / sc.radar_rate));

    std::vector<DetectionFrame> frames;
    for (std::size_t k = stride; k < truth.size(); k += stride) {
        const auto& g = truth[k];
        const geom::Mat3 r_wr = geom::quat_to_rot(g.q) * r_ir;
        // Radar-origin velocity in the radar frame.
        const Vec3 v_radar =
            r_wr.transpose() *
            (g.v + geom::quat_to_rot(g.q) * g.omega.cross(sc.extrinsics.lever_arm));

        DetectionFrame frame;
        frame.t = g.t;
        const int total = sc.n_static_targets + sc.n_dynamic_targets;
        for (int i = 0; i < total; ++i) {
            Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
            while (dir.norm() < 1e-6) {
                dir = Vec3(gauss(rng), gauss(rng), gauss(rng));
            }
            dir.normalize();
            RadarDetection det;
            det.dir = dir;
            det.v_r = -dir.dot(v_radar);
            if (i >= sc.n_static_targets) {
                // Line-of-sight projection of the target's own velocity,
                // kept at least dynamic_speed_min so it is a true outlier.
                const double speed = sc.dynamic_speed_min +
                                     uni(rng) * (sc.dynamic_speed_max - sc.dynamic_speed_min);
                det.v_r += (uni(rng) < 0.5 ? -speed : speed);
            }
            if (sc.detection_noise > 0.0) {
                det.v_r += sc.detection_noise * gauss(rng);
            }
            frame.detections.push_back(det);
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace egofuse::sim
