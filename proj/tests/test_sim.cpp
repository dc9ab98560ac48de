#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "egofuse/errors.hpp"
#include "egofuse/sim.hpp"

using namespace egofuse;
using namespace egofuse::sim;

namespace {

TrajectoryProfile lively_sinusoid() {
    TrajectoryProfile p;
    p.id = "sinusoid";
    p.v0 = {1.0, -0.5, 0.2};
    p.v_amp = {0.8, 0.6, 0.3};
    p.v_freq = {0.2, 0.13, 0.31};
    p.v_phase = {0.1, 0.7, -0.4};
    p.euler_amp = {0.2, 0.15, 0.4};
    p.euler_freq = {0.11, 0.17, 0.07};
    p.euler_phase = {0.0, 0.3, -0.2};
    return p;
}

}  // namespace

TEST_CASE("constant profile") {
    TrajectoryProfile p;
    p.v0 = {2.0, 1.0, 0.0};
    const GroundTruthSample g = truth_at(p, 17.3);
    CHECK(g.t == 17.3);
    CHECK(g.v == p.v0);
    CHECK(g.omega.norm() == 0.0);
    CHECK(g.accel_world.norm() == 0.0);
    CHECK((g.q.coeffs() - geom::Vec4(1, 0, 0, 0)).norm() == 0.0);
}

TEST_CASE("unknown profile id throws") {
    TrajectoryProfile p;
    p.id = "spiral";
    CHECK_THROWS_AS(truth_at(p, 0.0), InputError);
}

TEST_CASE("analytic derivatives agree with finite differences") {
    const double h = 1e-4;
    auto check_profile = [&](const TrajectoryProfile& p) {
        for (double t : {0.0, 1.7, 8.3, 21.9, 55.5}) {
            const GroundTruthSample g = truth_at(p, t);
            const GroundTruthSample gp = truth_at(p, t + h);
            const GroundTruthSample gm = truth_at(p, t - h);

            const Vec3 accel_fd = (gp.v - gm.v) / (2.0 * h);
            CHECK((g.accel_world - accel_fd).norm() < 1e-6);

            // body rate: q(t+h) ≈ q(t-h) ⊗ exp(ω·2h/2)
            const Vec3 omega_fd = geom::quat_log(gm.q.conjugate() * gp.q) / (2.0 * h);
            CHECK((g.omega - omega_fd).norm() < 1e-6);
        }
    };
    check_profile(lively_sinusoid());

    TrajectoryProfile f8;
    f8.id = "figure_eight";
    check_profile(f8);
}

TEST_CASE("figure eight stays planar with matching speed law") {
    TrajectoryProfile p;
    p.id = "figure_eight";
    for (double t : {0.0, 2.5, 9.0, 14.2}) {
        const GroundTruthSample g = truth_at(p, t);
        CHECK(g.v.z() == 0.0);
        const double speed = p.speed0 + p.speed_amp * std::sin(2.0 * M_PI * p.speed_freq * t);
        CHECK(g.v.norm() == doctest::Approx(speed));
        CHECK(g.omega.x() == 0.0);
        CHECK(g.omega.y() == 0.0);
    }
}

TEST_CASE("generate_truth sampling") {
    Scenario sc;
    sc.duration = 10.0;
    sc.imu_rate = 100.0;
    const auto truth = generate_truth(sc);
    REQUIRE(truth.size() == 1001);
    CHECK(truth.front().t == 0.0);
    CHECK(truth.back().t == doctest::Approx(10.0));
    CHECK(truth[1].t - truth[0].t == doctest::Approx(0.01));

    Scenario bad = sc;
    bad.duration = 0.0;
    CHECK_THROWS_AS(generate_truth(bad), InputError);
    bad = sc;
    bad.radar_rate = 2.0 * sc.imu_rate;
    CHECK_THROWS_AS(generate_truth(bad), InputError);
}

TEST_CASE("simulate_imu inverts the trajectory exactly when noise-free") {
    Scenario sc;
    sc.duration = 5.0;
    sc.trajectory = lively_sinusoid();
    sc.true_bg = {0.01, -0.02, 0.005};
    sc.true_ba = {0.1, 0.05, -0.2};
    sc.noise = {0.0, 0.0, 0.0, 0.0};

    const auto truth = generate_truth(sc);
    const auto imu = simulate_imu(truth, sc);
    REQUIRE(imu.size() == truth.size());
    for (std::size_t k = 0; k < imu.size(); ++k) {
        CHECK(imu[k].t == truth[k].t);
        CHECK((imu[k].gyro - (truth[k].omega + sc.true_bg)).norm() < 1e-15);
        const geom::Mat3 rot = geom::quat_to_rot(truth[k].q);
        const Vec3 expected =
            rot.transpose() * (truth[k].accel_world + inertial::gravity_enu()) + sc.true_ba;
        CHECK((imu[k].accel - expected).norm() < 1e-12);
    }
}

TEST_CASE("simulated IMU noise has the configured discrete variance") {
    Scenario sc;
    sc.duration = 120.0;
    sc.imu_rate = 100.0;
    sc.noise = {0.01, 0.1, 0.0, 0.0};

    const auto truth = generate_truth(sc);
    const auto imu = simulate_imu(truth, sc);
    // stationary truth: the gyro signal is pure noise
    Vec3 sum = Vec3::Zero(), sum2 = Vec3::Zero();
    for (const auto& u : imu) {
        sum += u.gyro;
        sum2 += u.gyro.cwiseProduct(u.gyro);
    }
    const double n = static_cast<double>(imu.size());
    const Vec3 var = sum2 / n - (sum / n).cwiseProduct(sum / n);
    const double expected = 0.01 * 0.01 * sc.imu_rate;  // (σ_density/√dt)²
    for (int i = 0; i < 3; ++i) {
        CHECK(var[i] == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("simulation streams are deterministic and decorrelated") {
    Scenario sc;
    sc.duration = 2.0;
    sc.trajectory = lively_sinusoid();
    sc.noise = {0.01, 0.1, 1e-4, 1e-3};
    sc.seed = 77;

    const auto truth = generate_truth(sc);
    const auto a = simulate_imu(truth, sc);
    const auto b = simulate_imu(truth, sc);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].gyro == b[k].gyro);
        CHECK(a[k].accel == b[k].accel);
    }

    Scenario other = sc;
    other.seed = 78;
    const auto c = simulate_imu(truth, other);
    CHECK(a[0].gyro != c[0].gyro);

    const auto m1 = simulate_velocity_measurements(truth, sc);
    const auto m2 = simulate_velocity_measurements(truth, sc);
    REQUIRE(m1.size() == m2.size());
    for (std::size_t k = 0; k < m1.size(); ++k) {
        CHECK(m1[k].v_m == m2[k].v_m);
    }
}

TEST_CASE("velocity measurements: cadence, lever arm, noise statistics") {
    Scenario sc;
    sc.duration = 60.0;
    sc.imu_rate = 100.0;
    sc.radar_rate = 5.0;
    sc.trajectory = lively_sinusoid();
    sc.extrinsics.lever_arm = {0.5, -0.2, 0.1};

    SUBCASE("timestamps land on the radar cadence") {
        sc.radar_sigma = Mat3::Identity() * 1e-4;
        const auto truth = generate_truth(sc);
        const auto meas = simulate_velocity_measurements(truth, sc);
        REQUIRE(meas.size() == 300);
        CHECK(meas.front().t == doctest::Approx(0.2));
        CHECK(meas.back().t == doctest::Approx(60.0));
    }

    SUBCASE("noise-free measurements equal the lever-arm model") {
        sc.radar_sigma = Mat3::Identity() * 1e-30;
        const auto truth = generate_truth(sc);
        const auto meas = simulate_velocity_measurements(truth, sc);
        for (const auto& m : meas) {
            const auto g = truth_at(sc.trajectory, m.t);
            inertial::NominalState st;
            st.q = g.q;
            st.v = g.v;
            const Vec3 expected = fusion::measurement_predict(st, g.omega, sc.extrinsics);
            CHECK((m.v_m - expected).norm() < 1e-9);
        }
    }

    SUBCASE("sample mean converges to the model (LLN)") {
        sc.trajectory = TrajectoryProfile{};  // constant zero velocity
        sc.extrinsics = fusion::Extrinsics{};
        sc.radar_sigma = Mat3::Identity() * 1e-2;
        const auto truth = generate_truth(sc);
        const auto meas = simulate_velocity_measurements(truth, sc);
        Vec3 mean = Vec3::Zero();
        for (const auto& m : meas) {
            mean += m.v_m;
        }
        mean /= static_cast<double>(meas.size());
        CHECK(mean.norm() < 4.0 * 0.1 / std::sqrt(300.0) * std::sqrt(3.0));
    }
}

TEST_CASE("inflate window scales noise and reported sigma together") {
    Scenario sc;
    sc.duration = 30.0;
    sc.radar_sigma = Mat3::Identity() * 1e-2;
    sc.inflate_start = 10.0;
    sc.inflate_end = 20.0;
    sc.inflate_factor = 25.0;

    const auto truth = generate_truth(sc);
    const auto meas = simulate_velocity_measurements(truth, sc);

    double var_in = 0.0, var_out = 0.0;
    int n_in = 0, n_out = 0;
    for (const auto& m : meas) {
        const bool inside = m.t >= 10.0 && m.t < 20.0;
        CHECK(m.sigma_m(0, 0) == doctest::Approx(inside ? 0.25 : 0.01));
        (inside ? var_in : var_out) += m.v_m.squaredNorm() / 3.0;
        (inside ? n_in : n_out) += 1;
    }
    CHECK(n_in == 50);
    // actual noise is inflated too, not just the tag
    CHECK(var_in / n_in > 5.0 * (var_out / n_out));
}

TEST_CASE("reported_sigma_scale corrupts only the tag") {
    Scenario sc;
    sc.duration = 10.0;
    sc.radar_sigma = Mat3::Identity() * 1e-2;
    sc.reported_sigma_scale = 10.0;
    const auto truth = generate_truth(sc);
    const auto tagged = simulate_velocity_measurements(truth, sc);
    Scenario honest = sc;
    honest.reported_sigma_scale = 1.0;
    const auto plain = simulate_velocity_measurements(truth, honest);
    for (std::size_t k = 0; k < tagged.size(); ++k) {
        CHECK(tagged[k].v_m == plain[k].v_m);
        CHECK(tagged[k].sigma_m(0, 0) == doctest::Approx(10.0 * plain[k].sigma_m(0, 0)));
    }
}

TEST_CASE("simulated detections") {
    Scenario sc;
    sc.duration = 4.0;
    sc.trajectory.v0 = {1.5, -0.5, 0.3};
    sc.extrinsics.lever_arm = {0.4, 0.1, -0.2};
    sc.n_static_targets = 12;
    sc.detection_noise = 0.0;

    SUBCASE("static targets are consistent with the radar-origin velocity") {
        const auto truth = generate_truth(sc);
        const auto frames = simulate_detections(truth, sc);
        REQUIRE(frames.size() == 20);
        for (const auto& f : frames) {
            const auto fit = doppler::ls_velocity(f.detections);
            // constant profile, identity mount: radar velocity is just v0
            CHECK((fit.v - sc.trajectory.v0).norm() < 1e-9);
        }
    }

    SUBCASE("dynamic targets are true outliers that RANSAC excludes") {
        sc.n_dynamic_targets = 3;
        sc.detection_noise = 0.01;
        const auto truth = generate_truth(sc);
        const auto frames = simulate_detections(truth, sc);
        for (const auto& f : frames) {
            REQUIRE(f.detections.size() == 15);
            const auto fit = doppler::ransac_velocity(f.detections, 100, 0.1, 7);
            for (const auto idx : fit.inliers) {
                CHECK(idx < 12);
            }
            CHECK((fit.v - sc.trajectory.v0).norm() < 0.05);
        }
    }

    SUBCASE("needs at least three static targets") {
        sc.n_static_targets = 2;
        const auto truth = generate_truth(sc);
        CHECK_THROWS_AS(simulate_detections(truth, sc), InputError);
    }
}
