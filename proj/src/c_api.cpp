#include "egofuse/egofuse.h"

#include <cstring>
#include <string>

#include "egofuse/doppler.hpp"
#include "egofuse/errors.hpp"
#include "egofuse/fusion.hpp"
#include "egofuse/io.hpp"
#include "egofuse/pipeline.hpp"
#include "egofuse/uncertainty.hpp"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ef_status guarded(Fn&& fn) {
    try {
        fn();
        return EF_OK;
    } catch (const egofuse::NumericError& e) {
        g_last_error = e.what();
        return EF_ERR_NUMERIC;
    } catch (const egofuse::InputError& e) {
        g_last_error = e.what();
        return EF_ERR_INPUT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EF_ERR_INTERNAL;
    }
}

ef_status require(bool ok, const char* msg) {
    if (!ok) {
        g_last_error = msg;
        return EF_ERR_INPUT;
    }
    return EF_OK;
}

egofuse::geom::Vec3 to_vec3(const double* p) {
    return {p[0], p[1], p[2]};
}

egofuse::geom::Mat3 to_mat3(const double* p) {
    egofuse::geom::Mat3 m;
    m << p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8];
    return m;
}

void from_mat3(const egofuse::geom::Mat3& m, double* p) {
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            p[3 * i + j] = m(i, j);
        }
    }
}

std::string or_empty(const char* s) {
    return s ? std::string(s) : std::string();
}

std::vector<egofuse::doppler::RadarDetection> to_detections(const double* dirs,
                                                            const double* vr, size_t n) {
    std::vector<egofuse::doppler::RadarDetection> dets(n);
    for (size_t i = 0; i < n; ++i) {
        dets[i].dir = to_vec3(dirs + 3 * i).normalized();
        dets[i].v_r = vr[i];
    }
    return dets;
}

void fill_fit(const egofuse::doppler::DopplerFit& fit, ef_doppler_fit* out) {
    for (int i = 0; i < 3; ++i) {
        out->v[i] = fit.v(i);
    }
    from_mat3(fit.sigma, out->sigma);
    out->residual_rms = fit.residual_rms;
    out->n_inliers = fit.inliers.size();
}

}  // namespace

struct ef_filter {
    egofuse::fusion::Filter impl;
};

extern "C" {

const char* ef_last_error(void) {
    return g_last_error.c_str();
}

void ef_filter_config_default(ef_filter_config* cfg) {
    const egofuse::fusion::FilterConfig d;
    for (int i = 0; i < 12; ++i) {
        cfg->p0_diag[i] = d.P0(i, i);
    }
    cfg->sigma_g = d.noise.sigma_g;
    cfg->sigma_a = d.noise.sigma_a;
    cfg->sigma_bg = d.noise.sigma_bg;
    cfg->sigma_ba = d.noise.sigma_ba;
    cfg->r_floor = d.r_floor;
    cfg->gate_chi2 = d.gate_chi2;
    cfg->use_predicted_sigma = d.use_predicted_sigma ? 1 : 0;
    for (int i = 0; i < 3; ++i) {
        cfg->fixed_r_diag[i] = d.fixed_R(i, i);
    }
}

ef_status ef_filter_create(const ef_filter_config* cfg, const ef_calibration* calib,
                           const ef_state* x0, ef_filter** out) {
    if (const auto st = require(cfg && calib && out, "ef_filter_create: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::fusion::FilterConfig c;
        c.P0.setZero();
        for (int i = 0; i < 12; ++i) {
            c.P0(i, i) = cfg->p0_diag[i];
        }
        c.noise = {cfg->sigma_g, cfg->sigma_a, cfg->sigma_bg, cfg->sigma_ba};
        c.r_floor = cfg->r_floor;
        c.gate_chi2 = cfg->gate_chi2;
        c.use_predicted_sigma = cfg->use_predicted_sigma != 0;
        c.fixed_R.setZero();
        for (int i = 0; i < 3; ++i) {
            c.fixed_R(i, i) = cfg->fixed_r_diag[i];
        }

        egofuse::fusion::Extrinsics ex;
        ex.lever_arm = to_vec3(calib->lever_arm);
        ex.q_RI = egofuse::geom::UnitQuaternion(calib->q_ri[0], calib->q_ri[1],
                                                calib->q_ri[2], calib->q_ri[3]);

        egofuse::inertial::NominalState s0;
        if (x0) {
            s0.q = egofuse::geom::UnitQuaternion(x0->q[0], x0->q[1], x0->q[2], x0->q[3]);
            s0.v = to_vec3(x0->v);
            s0.bg = to_vec3(x0->bg);
            s0.ba = to_vec3(x0->ba);
        }
        *out = new ef_filter{egofuse::fusion::Filter(s0, ex, c)};
    });
}

void ef_filter_destroy(ef_filter* f) {
    delete f;
}

ef_status ef_filter_predict(ef_filter* f, double t, const double gyro[3],
                            const double accel[3]) {
    if (const auto st = require(f && gyro && accel, "ef_filter_predict: null argument")) {
        return st;
    }
    return guarded([&] {
        f->impl.predict_to({t, to_vec3(gyro), to_vec3(accel)});
    });
}

ef_status ef_filter_update(ef_filter* f, double t, const double v[3], const double sigma[9],
                           ef_update_report* report) {
    if (const auto st = require(f && v && sigma, "ef_filter_update: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::fusion::VelocityMeasurement m;
        m.t = t;
        m.v_m = to_vec3(v);
        m.sigma_m = to_mat3(sigma);
        const auto rep = f->impl.apply(m);
        if (report) {
            report->t = rep.t;
            for (int i = 0; i < 3; ++i) {
                report->innovation[i] = rep.innovation(i);
            }
            report->nis = rep.nis;
            report->accepted = rep.accepted ? 1 : 0;
            report->gain_norm = rep.gain_norm;
        }
    });
}

ef_status ef_filter_state(const ef_filter* f, ef_state* out) {
    if (const auto st = require(f && out, "ef_filter_state: null argument")) {
        return st;
    }
    const auto& s = f->impl.state();
    out->t = f->impl.time();
    out->q[0] = s.q.w;
    out->q[1] = s.q.x;
    out->q[2] = s.q.y;
    out->q[3] = s.q.z;
    for (int i = 0; i < 3; ++i) {
        out->v[i] = s.v(i);
        out->bg[i] = s.bg(i);
        out->ba[i] = s.ba(i);
    }
    for (int i = 0; i < 12; ++i) {
        out->p_diag[i] = f->impl.covariance()(i, i);
    }
    return EF_OK;
}

ef_status ef_construct_covariance(const double params6[6], double sigma_out[9]) {
    if (const auto st = require(params6 && sigma_out, "ef_construct_covariance: null")) {
        return st;
    }
    return guarded([&] {
        egofuse::uncertainty::CovParams6 p;
        std::memcpy(p.data(), params6, sizeof(p));
        from_mat3(egofuse::uncertainty::construct_covariance(p), sigma_out);
    });
}

ef_status ef_loss(const double y[3], const double y_hat[3], const double sigma[9],
                  double lambda1, double epsilon, double* nll, double* diag_reg,
                  double* total) {
    if (const auto st = require(y && y_hat && sigma, "ef_loss: null argument")) {
        return st;
    }
    return guarded([&] {
        const egofuse::uncertainty::LossConfig cfg{lambda1, epsilon};
        const auto s = to_mat3(sigma);
        const double nll_v = egofuse::uncertainty::nll_loss(to_vec3(y), to_vec3(y_hat), s, cfg);
        const double reg_v = egofuse::uncertainty::diag_regularizer(s, cfg);
        if (nll) {
            *nll = nll_v;
        }
        if (diag_reg) {
            *diag_reg = reg_v;
        }
        if (total) {
            *total = nll_v + reg_v;
        }
    });
}

ef_status ef_ls_velocity(const double* dirs, const double* vr, size_t n,
                         ef_doppler_fit* out) {
    if (const auto st = require(dirs && vr && out, "ef_ls_velocity: null argument")) {
        return st;
    }
    return guarded([&] {
        fill_fit(egofuse::doppler::ls_velocity(to_detections(dirs, vr, n)), out);
    });
}

ef_status ef_ransac_velocity(const double* dirs, const double* vr, size_t n, int iters,
                             double threshold, uint64_t seed, ef_doppler_fit* out) {
    if (const auto st = require(dirs && vr && out, "ef_ransac_velocity: null argument")) {
        return st;
    }
    return guarded([&] {
        fill_fit(egofuse::doppler::ransac_velocity(to_detections(dirs, vr, n), iters,
                                                   threshold, seed),
                 out);
    });
}

ef_status ef_run_sim(const char* scenario_toml, const char* out_dir) {
    if (const auto st = require(scenario_toml && out_dir, "ef_run_sim: null argument")) {
        return st;
    }
    return guarded([&] { egofuse::pipeline::run_sim(scenario_toml, out_dir); });
}

ef_status ef_run_fuse(const char* imu_csv, const char* radar_csv, const char* calib_json,
                      const char* config_json_or_null, const char* out_csv, int use_sigma,
                      const char* init_gt_csv_or_null) {
    if (const auto st = require(imu_csv && radar_csv && calib_json && out_csv,
                                "ef_run_fuse: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::pipeline::run_fuse(imu_csv, radar_csv, calib_json,
                                    or_empty(config_json_or_null), out_csv, use_sigma != 0,
                                    or_empty(init_gt_csv_or_null));
    });
}

ef_status ef_run_doppler(const char* detections_csv, const char* out_csv, int iters,
                         double threshold, uint64_t seed) {
    if (const auto st = require(detections_csv && out_csv, "ef_run_doppler: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::pipeline::run_doppler(detections_csv, out_csv, iters, threshold, seed);
    });
}

ef_status ef_run_eval(const char* est_csv, const char* gt_csv, const char* metrics_json,
                      const char* dump_csv_or_null) {
    if (const auto st = require(est_csv && gt_csv && metrics_json,
                                "ef_run_eval: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::pipeline::run_eval(est_csv, gt_csv, metrics_json,
                                    or_empty(dump_csv_or_null));
    });
}

ef_status ef_run_mc(const char* scenario_toml, const char* config_json_or_null, int n_runs,
                    int max_threads, const char* out_json) {
    if (const auto st = require(scenario_toml && out_json, "ef_run_mc: null argument")) {
        return st;
    }
    return guarded([&] {
        egofuse::pipeline::run_mc(scenario_toml, or_empty(config_json_or_null), n_runs,
                                  max_threads, out_json);
    });
}

ef_status ef_cube_synthesize(const char* scene_json, const char* out_rdc) {
    if (const auto st = require(scene_json && out_rdc, "ef_cube_synthesize: null argument")) {
        return st;
    }
    return guarded([&] { egofuse::pipeline::cube_synthesize(scene_json, out_rdc); });
}

ef_status ef_cube_process(const char* in_rdc, const char* out_rdc) {
    if (const auto st = require(in_rdc && out_rdc, "ef_cube_process: null argument")) {
        return st;
    }
    return guarded([&] { egofuse::pipeline::cube_process(in_rdc, out_rdc); });
}

ef_status ef_cube_detect(const char* in_rdc, double threshold_db, const char* out_csv) {
    if (const auto st = require(in_rdc && out_csv, "ef_cube_detect: null argument")) {
        return st;
    }
    return guarded([&] { egofuse::pipeline::cube_detect(in_rdc, threshold_db, out_csv); });
}

}  // extern "C"
