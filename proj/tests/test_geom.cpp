#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "egofuse/geom.hpp"

using namespace egofuse::geom;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    return {g(rng), g(rng), g(rng)};
}

UnitQuaternion random_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {g(rng), g(rng), g(rng), g(rng)};
}

}  // namespace

TEST_CASE("skew matches the cross product") {
    CHECK((skew({0, 0, 1}) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() == doctest::Approx(0.0));
    CHECK(skew(Vec3::Zero()).isZero(0.0));
    CHECK((skew({1, 2, 3}) * Vec3(1, 2, 3)).norm() == doctest::Approx(0.0));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v = random_vec(rng), u = random_vec(rng);
        CHECK((skew(v) * u - v.cross(u)).norm() < 1e-14);
        CHECK((skew(v).transpose() + skew(v)).norm() < 1e-15);
    }
}

TEST_CASE("omega_matrix layout and antisymmetry") {
    Mat4 expected;
    expected << 0, -1, 0, 0,
                1, 0, 0, 0,
                0, 0, 0, 1,
                0, 0, -1, 0;
    CHECK((omega_matrix({1, 0, 0}) - expected).norm() == doctest::Approx(0.0));
    CHECK(omega_matrix(Vec3::Zero()).isZero(0.0));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const Mat4 m = omega_matrix(random_vec(rng, 5.0));
        CHECK((m.transpose() + m).norm() < 1e-15);
    }
}

TEST_CASE("quat_derivative") {
    const UnitQuaternion id;
    CHECK((quat_derivative(id, {0, 0, 2}) - Vec4(0, 0, 0, 1)).norm() < 1e-15);
    CHECK(quat_derivative(id, Vec3::Zero()).norm() == 0.0);
    CHECK((quat_derivative(id, {2, 0, 0}) - Vec4(0, 1, 0, 0)).norm() < 1e-15);

    // direct 4x4 multiply oracle on random inputs
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
        const UnitQuaternion q = random_quat(rng);
        const Vec3 w = random_vec(rng, 3.0);
        const Vec4 expected = 0.5 * omega_matrix(w) * q.coeffs();
        CHECK((quat_derivative(q, w) - expected).norm() < 1e-14);
    }
}

TEST_CASE("quat_to_rot") {
    CHECK((quat_to_rot(UnitQuaternion{}) - Mat3::Identity()).norm() < 1e-15);

    const UnitQuaternion q90z = small_angle_quat({0, 0, M_PI / 2});
    CHECK((quat_to_rot(q90z) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const UnitQuaternion q = random_quat(rng);
        const UnitQuaternion neg{-q.w * 1.0, -q.x, -q.y, -q.z};
        CHECK((quat_to_rot(q) - quat_to_rot(neg)).norm() < 1e-12);

        const Mat3 r = quat_to_rot(q);
        CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-9);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));

        // sandwich-product consistency
        const Vec3 v = random_vec(rng);
        CHECK((r * v - q.rotate(v)).norm() < 1e-12);
    }
}

TEST_CASE("integrate_quat") {
    const UnitQuaternion q = integrate_quat(UnitQuaternion{}, {0, 0, M_PI}, 1.0);
    CHECK(std::abs(q.w) < 1e-12);
    CHECK(std::abs(q.z - 1.0) < 1e-12);

    const UnitQuaternion q0{0.3, -0.4, 0.5, 0.6};
    const UnitQuaternion same = integrate_quat(q0, Vec3::Zero(), 0.1);
    CHECK((same.coeffs() - q0.coeffs()).norm() < 1e-15);

    // two half-steps equal one full step (group property)
    std::mt19937_64 rng(19);
    for (int i = 0; i < 50; ++i) {
        const UnitQuaternion s = random_quat(rng);
        const Vec3 w = random_vec(rng, 2.0);
        const UnitQuaternion full = integrate_quat(s, w, 0.02);
        const UnitQuaternion halves = integrate_quat(integrate_quat(s, w, 0.01), w, 0.01);
        CHECK((full.coeffs() - halves.coeffs()).norm() < 1e-12);
    }
}

TEST_CASE("integrate_quat preserves unit norm over many steps") {
    UnitQuaternion q;
    const Vec3 w(0.3, -0.2, 0.15);
    for (int i = 0; i < 1000000; ++i) {
        q = integrate_quat(q, w, 0.001);
    }
    CHECK(std::abs(q.norm() - 1.0) < 1e-12);
}

TEST_CASE("integrate_quat vs Euler step: convergence order") {
    const UnitQuaternion q0{0.8, 0.1, -0.3, 0.5};
    const Vec3 w(0.7, -1.1, 0.4);

    auto euler_diff = [&](double dt, bool renorm) {
        Vec4 e = q0.coeffs() + quat_derivative(q0, w) * dt;
        if (renorm) e /= e.norm();
        return (integrate_quat(q0, w, dt).coeffs() - e).norm();
    };

    // raw Euler step: difference is O(dt^2), halving ratio near 4
    const double r2 = euler_diff(0.1, false) / euler_diff(0.05, false);
    CHECK(r2 > 3.0);
    CHECK(r2 < 5.0);

    // renormalizing cancels the dt^2 term (it is purely radial: the
    // exponential's second-order term is -|theta|^2/2 * q), so the
    // normalized Euler step differs at third order: halving ratio near 8
    const double r3 = euler_diff(0.1, true) / euler_diff(0.05, true);
    CHECK(r3 > 6.0);
    CHECK(r3 < 10.0);
}

TEST_CASE("small_angle_quat") {
    CHECK((small_angle_quat(Vec3::Zero()).coeffs() - Vec4(1, 0, 0, 0)).norm() == 0.0);

    const UnitQuaternion q = small_angle_quat({0, 0, M_PI / 2});
    CHECK((quat_to_rot(q) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);

    const Vec3 tiny(1e-6, -5e-7, 3e-7);
    const Mat3 r = quat_to_rot(small_angle_quat(tiny));
    CHECK((r - (Mat3::Identity() + skew(tiny))).norm() < 1e-9);
}

TEST_CASE("quat_log inverts small_angle_quat") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Vec3 th(u(rng), u(rng), u(rng));
        th *= 2.5 / 3.0;  // keep below pi
        CHECK((quat_log(small_angle_quat(th)) - th).norm() < 1e-12);
    }
}
