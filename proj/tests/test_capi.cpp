// Exercises the shared-library C API end to end: handle lifecycle, error
// codes, thread-local error strings and the file-level pipeline entry points.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "egofuse/egofuse.h"

namespace {

int g_failures = 0;
int g_checks = 0;

#define CHECK_TRUE(cond)                                                        \
    do {                                                                        \
        ++g_checks;                                                             \
        if (!(cond)) {                                                          \
            ++g_failures;                                                       \
            std::fprintf(stderr, "FAILED %s:%d: %s\n", __FILE__, __LINE__, #cond); \
        }                                                                       \
    } while (0)

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

void test_defaults() {
    ef_filter_config cfg;
    std::memset(&cfg, 0xff, sizeof(cfg));
    ef_filter_config_default(&cfg);
    for (int i = 0; i < 12; ++i) {
        CHECK_TRUE(near(cfg.p0_diag[i], 1e-2));
    }
    CHECK_TRUE(near(cfg.gate_chi2, 16.27));
    CHECK_TRUE(cfg.use_predicted_sigma == 1);
    CHECK_TRUE(near(cfg.r_floor, 1e-6));
}

void test_filter_lifecycle() {
    ef_filter_config cfg;
    ef_filter_config_default(&cfg);
    cfg.sigma_g = 1e-3;
    cfg.sigma_a = 1e-2;
    ef_calibration calib = {{0.3, 0.0, -0.1}, {1.0, 0.0, 0.0, 0.0}};

    ef_filter* f = nullptr;
    CHECK_TRUE(ef_filter_create(&cfg, &calib, nullptr, &f) == EF_OK);
    CHECK_TRUE(f != nullptr);

    const double gyro[3] = {0.0, 0.0, 0.0};
    const double accel[3] = {0.0, 0.0, 9.80665};
    for (int k = 0; k <= 20; ++k) {
        CHECK_TRUE(ef_filter_predict(f, 0.01 * k, gyro, accel) == EF_OK);
    }

    ef_state st;
    CHECK_TRUE(ef_filter_state(f, &st) == EF_OK);
    CHECK_TRUE(near(st.t, 0.2));
    CHECK_TRUE(near(st.v[0], 0.0, 1e-12));
    CHECK_TRUE(near(st.q[0], 1.0, 1e-12));
    CHECK_TRUE(st.p_diag[3] > 1e-2);  // velocity variance grew from P0

    const double v[3] = {0.0, 0.0, 0.0};
    const double sigma[9] = {1e-4, 0, 0, 0, 1e-4, 0, 0, 0, 1e-4};
    ef_update_report rep;
    CHECK_TRUE(ef_filter_update(f, 0.2, v, sigma, &rep) == EF_OK);
    CHECK_TRUE(rep.accepted == 1);
    CHECK_TRUE(rep.nis >= 0.0);
    CHECK_TRUE(rep.gain_norm > 0.0);

    ef_state after;
    CHECK_TRUE(ef_filter_state(f, &after) == EF_OK);
    CHECK_TRUE(after.p_diag[3] < st.p_diag[3]);

    // non-monotone prediction time is an input error
    CHECK_TRUE(ef_filter_predict(f, 0.1, gyro, accel) == EF_ERR_INPUT);
    CHECK_TRUE(std::strlen(ef_last_error()) > 0);

    // stale measurement relative to the filter clock
    CHECK_TRUE(ef_filter_update(f, 5.0, v, sigma, nullptr) == EF_ERR_INPUT);

    ef_filter_destroy(f);
    ef_filter_destroy(nullptr);  // must be a no-op
}

void test_filter_argument_errors() {
    ef_filter_config cfg;
    ef_filter_config_default(&cfg);
    ef_calibration calib = {{0, 0, 0}, {1, 0, 0, 0}};
    ef_filter* f = nullptr;

    CHECK_TRUE(ef_filter_create(nullptr, &calib, nullptr, &f) == EF_ERR_INPUT);
    CHECK_TRUE(ef_filter_create(&cfg, &calib, nullptr, nullptr) == EF_ERR_INPUT);
    CHECK_TRUE(std::strlen(ef_last_error()) > 0);

    CHECK_TRUE(ef_filter_create(&cfg, &calib, nullptr, &f) == EF_OK);
    CHECK_TRUE(ef_filter_predict(nullptr, 0.0, nullptr, nullptr) == EF_ERR_INPUT);
    CHECK_TRUE(ef_filter_state(f, nullptr) == EF_ERR_INPUT);
    ef_filter_destroy(f);
}

void test_covariance_and_loss() {
    const double p0[6] = {0, 0, 0, 0, 0, 0};
    double sigma[9];
    CHECK_TRUE(ef_construct_covariance(p0, sigma) == EF_OK);
    for (int i = 0; i < 9; ++i) {
        CHECK_TRUE(near(sigma[i], i % 4 == 0 ? 1.0 : 0.0));
    }
    CHECK_TRUE(ef_construct_covariance(nullptr, sigma) == EF_ERR_INPUT);

    const double y[3] = {1.0, 2.0, 3.0};
    double nll = -1, reg = -1, total = -1;
    CHECK_TRUE(ef_loss(y, y, sigma, 0.01, 0.0, &nll, &reg, &total) == EF_OK);
    CHECK_TRUE(near(nll, 0.0));
    CHECK_TRUE(near(reg, 0.01));
    CHECK_TRUE(near(total, 0.01));

    const double y_hat[3] = {3.0, 2.0, 3.0};
    CHECK_TRUE(ef_loss(y, y_hat, sigma, 0.01, 0.0, &nll, nullptr, nullptr) == EF_OK);
    CHECK_TRUE(near(nll, 2.0));
    CHECK_TRUE(ef_loss(nullptr, y_hat, sigma, 0.01, 0.0, &nll, nullptr, nullptr) ==
               EF_ERR_INPUT);
}

void test_doppler() {
    // six axis-aligned unit directions plus one oblique one; the oblique
    // direction keeps the outlier identifiable below (with pure +/- axis
    // pairs, corrupting one member of a pair is ambiguous: a model fitted
    // through the corrupted value explains the other five just as well)
    const double s3 = 1.0 / std::sqrt(3.0);
    const double dirs[21] = {1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0,
                             0, 0, 1, 0, 0, -1, s3, s3, s3};
    const double vtrue[3] = {1.0, -2.0, 0.5};
    double vr[7];
    for (int i = 0; i < 7; ++i) {
        vr[i] = -(dirs[3 * i] * vtrue[0] + dirs[3 * i + 1] * vtrue[1] +
                  dirs[3 * i + 2] * vtrue[2]);
    }

    ef_doppler_fit fit;
    CHECK_TRUE(ef_ls_velocity(dirs, vr, 7, &fit) == EF_OK);
    for (int i = 0; i < 3; ++i) {
        CHECK_TRUE(near(fit.v[i], vtrue[i], 1e-10));
    }
    CHECK_TRUE(fit.n_inliers == 7);

    CHECK_TRUE(ef_ls_velocity(dirs, vr, 2, &fit) == EF_ERR_INPUT);

    // rank deficient: directions only along x
    const double flat[9] = {1, 0, 0, -1, 0, 0, 1, 0, 0};
    const double flat_vr[3] = {0.1, -0.1, 0.1};
    CHECK_TRUE(ef_ls_velocity(flat, flat_vr, 3, &fit) == EF_ERR_NUMERIC);
    CHECK_TRUE(std::strlen(ef_last_error()) > 0);

    // RANSAC: corrupt one radial velocity, expect 6 inliers
    double vr_bad[7];
    std::memcpy(vr_bad, vr, sizeof(vr));
    vr_bad[2] += 10.0;
    CHECK_TRUE(ef_ransac_velocity(dirs, vr_bad, 7, 200, 0.05, 7, &fit) == EF_OK);
    CHECK_TRUE(fit.n_inliers == 6);
    for (int i = 0; i < 3; ++i) {
        CHECK_TRUE(near(fit.v[i], vtrue[i], 1e-8));
    }
}

void test_file_pipeline() {
    namespace fs = std::filesystem;
    const fs::path work = "capi_work";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path scenario = work / "scenario.toml";
    {
        std::ofstream out(scenario);
        out << "duration = 4.0\n"
            << "imu_rate = 100\n"
            << "radar_rate = 5\n"
            << "profile = \"figure_eight\"\n"
            << "sigma_g = 0.002\n"
            << "sigma_a = 0.02\n"
            << "seed = 11\n";
    }

    const fs::path outdir = work / "sim";
    CHECK_TRUE(ef_run_sim(scenario.string().c_str(), outdir.string().c_str()) == EF_OK);
    CHECK_TRUE(fs::exists(outdir / "imu.csv"));
    CHECK_TRUE(fs::exists(outdir / "gt.csv"));
    CHECK_TRUE(fs::exists(outdir / "radar_vel.csv"));
    CHECK_TRUE(fs::exists(outdir / "detections.csv"));
    CHECK_TRUE(fs::exists(outdir / "calib.json"));

    const fs::path est = work / "est.csv";
    CHECK_TRUE(ef_run_fuse((outdir / "imu.csv").string().c_str(),
                           (outdir / "radar_vel.csv").string().c_str(),
                           (outdir / "calib.json").string().c_str(), nullptr,
                           est.string().c_str(), 1,
                           (outdir / "gt.csv").string().c_str()) == EF_OK);
    CHECK_TRUE(fs::exists(est));

    const fs::path metrics = work / "metrics.json";
    CHECK_TRUE(ef_run_eval(est.string().c_str(), (outdir / "gt.csv").string().c_str(),
                           metrics.string().c_str(), nullptr) == EF_OK);
    CHECK_TRUE(fs::exists(metrics));

    const fs::path doppler_out = work / "doppler.csv";
    CHECK_TRUE(ef_run_doppler((outdir / "detections.csv").string().c_str(),
                              doppler_out.string().c_str(), 100, 0.15, 3) == EF_OK);
    CHECK_TRUE(fs::exists(doppler_out));

    CHECK_TRUE(ef_run_sim("missing_scenario.toml", outdir.string().c_str()) ==
               EF_ERR_INPUT);
    CHECK_TRUE(ef_run_fuse("missing.csv", "missing.csv", "missing.json", nullptr,
                           est.string().c_str(), 1, nullptr) == EF_ERR_INPUT);

    fs::remove_all(work);
}

}  // namespace

int main() {
    test_defaults();
    test_filter_lifecycle();
    test_filter_argument_errors();
    test_covariance_and_loss();
    test_doppler();
    test_file_pipeline();

    if (g_failures > 0) {
        std::fprintf(stderr, "%d of %d checks failed\n", g_failures, g_checks);
        return 1;
    }
    std::printf("all %d checks passed\n", g_checks);
    return 0;
}
