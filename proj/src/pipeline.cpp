#include "egofuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "egofuse/errors.hpp"
#include "egofuse/io.hpp"
#include "egofuse/radarcube.hpp"

namespace egofuse::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

void run_sim(const std::string& scenario_toml, const std::string& out_dir) {
    const sim::Scenario sc = io::read_scenario_toml(scenario_toml);
    const auto truth = sim::generate_truth(sc);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    io::write_gt_csv((dir / "gt.csv").string(), truth);
    io::write_imu_csv((dir / "imu.csv").string(), sim::simulate_imu(truth, sc));
    io::write_radar_vel_csv((dir / "radar_vel.csv").string(),
                            sim::simulate_velocity_measurements(truth, sc));
    io::write_detections_csv((dir / "detections.csv").string(),
                             sim::simulate_detections(truth, sc));
    io::write_calibration_json((dir / "calib.json").string(), sc.extrinsics);
}

void run_fuse(const std::string& imu_csv, const std::string& radar_csv,
              const std::string& calib_json, const std::string& config_json,
              const std::string& out_csv, bool use_sigma, const std::string& init_gt) {
    const auto imu = io::read_imu_csv(imu_csv);
    const auto radar = io::read_radar_vel_csv(radar_csv);
    const auto ex = io::read_calibration_json(calib_json);
    fusion::FilterConfig cfg =
        config_json.empty() ? fusion::FilterConfig{} : io::read_filter_config_json(config_json);
    cfg.use_predicted_sigma = use_sigma;

    inertial::NominalState x0;
    if (!init_gt.empty()) {
        const auto gt = io::read_gt_csv(init_gt);
        if (gt.empty()) {
            throw InputError("run_fuse: empty init ground-truth file " + init_gt);
        }
        x0.q = gt.front().q;
        x0.v = gt.front().v;
    }
    io::write_estimates_csv(out_csv, fusion::run_filter(imu, radar, x0, ex, cfg));
}

void run_doppler(const std::string& detections_csv, const std::string& out_csv, int iters,
                 double threshold, std::uint64_t seed) {
    const auto frames = io::read_detections_csv(detections_csv);
    std::vector<fusion::VelocityMeasurement> out;
    for (const auto& frame : frames) {
        const auto fit = doppler::ransac_velocity(frame.detections, iters, threshold, seed);
        // Radar-frame output; attitude is unknown here, so callers that fuse
        // it must either run with identity extrinsics or rotate downstream.
        out.push_back(doppler::to_measurement(fit, frame.t, fusion::Extrinsics{},
                                              geom::UnitQuaternion::identity()));
    }
    io::write_radar_vel_csv(out_csv, out);
}

metrics::Metrics run_eval(const std::string& est_csv, const std::string& gt_csv,
                          const std::string& metrics_json, const std::string& dump_csv) {
    const auto est = io::read_estimates_csv(est_csv);
    const auto gt = io::read_gt_csv(gt_csv);
    const auto m = metrics::compute_metrics(io::velocity_series_from_estimates(est),
                                            io::velocity_series_from_gt(gt));
    if (!metrics_json.empty()) {
        io::write_metrics_json(metrics_json, m);
    }
    if (!dump_csv.empty()) {
        std::ofstream out(dump_csv);
        if (!out) {
            throw InputError("run_eval: cannot open " + dump_csv);
        }
        out << "t,ex,ey,ez\n";
        std::size_t j = 0;
        for (const auto& e : est) {
            while (j < gt.size() && gt[j].t < e.t - 1e-9) {
                ++j;
            }
            if (j >= gt.size()) {
                break;
            }
            const geom::Vec3 err = e.state.v - gt[j].v;
            out << e.t << ',' << err.x() << ',' << err.y() << ',' << err.z() << '\n';
        }
    }
    return m;
}

namespace {

int resolve_threads(int max_threads) {
    int n = max_threads > 0 ? max_threads
                            : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EGOFUSE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            n = std::min(n, cap);
        }
    }
    return std::max(n, 1);
}

double single_run_nees(const sim::Scenario& sc, const fusion::FilterConfig& cfg) {
    const auto truth = sim::generate_truth(sc);
    const auto imu = sim::simulate_imu(truth, sc);
    const auto radar = sim::simulate_velocity_measurements(truth, sc);

    inertial::NominalState x0;
    x0.q = truth.front().q;
    x0.v = truth.front().v;
    const auto records = fusion::run_filter(imu, radar, x0, sc.extrinsics, cfg);

    std::vector<metrics::NeesSample> samples;
    samples.reserve(records.size());
    for (std::size_t i = 0; i < records.size() && i < truth.size(); ++i) {
        samples.push_back({records[i].t, records[i].state.v - truth[i].v,
                           records[i].P.block<3, 3>(3, 3)});
    }
    return metrics::run_nees(samples);
}

}  // namespace

metrics::ConsistencyStats run_mc(const std::string& scenario_toml,
                                 const std::string& config_json, int n_runs, int max_threads,
                                 const std::string& out_json) {
    if (n_runs < 1) {
        throw InputError("run_mc: n_runs must be >= 1");
    }
    const sim::Scenario base = io::read_scenario_toml(scenario_toml);
    fusion::FilterConfig cfg;
    if (!config_json.empty()) {
        cfg = io::read_filter_config_json(config_json);
    } else {
        cfg.noise = base.noise;  // matched-noise default
    }

    std::vector<double> nees(static_cast<std::size_t>(n_runs), 0.0);
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n_runs || failed.load()) {
                return;
            }
            try {
                sim::Scenario sc = base;
                sc.seed = base.seed + static_cast<std::uint64_t>(i);
                nees[static_cast<std::size_t>(i)] = single_run_nees(sc, cfg);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                error_message = e.what();
                failed.store(true);
            }
        }
    };

    const int n_threads = std::min(resolve_threads(max_threads), n_runs);
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failed.load()) {
        throw NumericError("run_mc: " + error_message);
    }

    // nees is indexed by run (seed order), so reduction order is fixed
    // regardless of which thread computed each entry.
    const auto stats = metrics::aggregate_nees(nees, {});
    if (!out_json.empty()) {
        json j;
        j["mean_nees"] = stats.mean_nees;
        j["mean_nis"] = stats.mean_nis;
        j["n_runs"] = stats.n_runs;
        j["chi2_bounds"] = {stats.chi2_lo, stats.chi2_hi};
        std::ofstream out(out_json);
        if (!out) {
            throw InputError("run_mc: cannot open " + out_json);
        }
        out << j.dump(2) << '\n';
    }
    return stats;
}

void cube_synthesize(const std::string& scene_json, const std::string& out_rdc) {
    std::ifstream in(scene_json);
    if (!in) {
        throw InputError("cube_synthesize: cannot open " + scene_json);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("cube_synthesize: malformed JSON: " + std::string(e.what()));
    }

    radarcube::RadarParams params;
    if (j.contains("params")) {
        const auto& p = j["params"];
        params.fc = p.value("fc", params.fc);
        params.slope = p.value("slope", params.slope);
        params.fs = p.value("fs", params.fs);
        params.n_samples = p.value("n_samples", params.n_samples);
        params.n_chirps = p.value("n_chirps", params.n_chirps);
        params.chirp_interval = p.value("chirp_interval", params.chirp_interval);
        params.n_virtual = p.value("n_virtual", params.n_virtual);
        params.element_spacing = p.value("element_spacing", params.element_spacing);
        params.n_angle_bins = p.value("n_angle_bins", params.n_angle_bins);
    }
    std::vector<radarcube::PointTarget> targets;
    for (const auto& t : j.value("targets", json::array())) {
        radarcube::PointTarget tgt;
        tgt.range = t.value("range", tgt.range);
        tgt.radial_velocity = t.value("radial_velocity", tgt.radial_velocity);
        tgt.angle = t.value("angle", tgt.angle);
        tgt.amplitude = t.value("amplitude", tgt.amplitude);
        targets.push_back(tgt);
    }
    const double noise_sigma = j.value("noise_sigma", 0.0);
    const auto seed = j.value("seed", std::uint64_t{1});
    const double t = j.value("t", 0.0);

    const auto adc = radarcube::synthesize_adc(params, targets, noise_sigma, seed);
    radarcube::write_rdc1(out_rdc, adc.cube, params, false, t);
}

void cube_process(const std::string& in_rdc, const std::string& out_rdc) {
    const auto f = radarcube::read_rdc1(in_rdc);
    if (f.processed) {
        throw InputError("cube_process: " + in_rdc + " is already a processed cube");
    }
    radarcube::AdcCube adc{f.cube, f.params, f.t};
    const auto cube = radarcube::process_cube(adc);
    radarcube::write_rdc1(out_rdc, cube.cube, cube.params, true, cube.t);
}

void cube_detect(const std::string& in_rdc, double threshold_db, const std::string& out_csv) {
    const auto f = radarcube::read_rdc1(in_rdc);
    if (!f.processed) {
        throw InputError("cube_detect: " + in_rdc + " is not a processed cube");
    }
    radarcube::RadarCube cube{f.cube, f.params, f.t};
    io::write_detections_csv(out_csv,
                             {{cube.t, radarcube::extract_detections(cube, threshold_db)}});
}

}  // namespace egofuse::pipeline
