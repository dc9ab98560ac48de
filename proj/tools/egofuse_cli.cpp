// Command-line front end for the egofuse shared library. Talks to the
// C API only; exit codes: 0 success, 2 input error, 3 numerical failure.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "egofuse/egofuse.h"

namespace {

int finish(ef_status st) {
    if (st != EF_OK) {
        std::fprintf(stderr, "error: %s\n", ef_last_error());
    }
    return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"egofuse: radar-inertial ego-velocity estimation toolkit"};
    app.require_subcommand(1);

    // sim
    auto* sim = app.add_subcommand("sim", "Generate IMU/radar streams from a scenario TOML");
    std::string scenario, out_dir = ".";
    sim->add_option("scenario", scenario, "scenario TOML file")->required();
    sim->add_option("-o,--out", out_dir, "output directory");

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Run the error-state EKF over CSV streams");
    std::string imu, radar, calib, config, fuse_out = "est.csv", init_gt;
    bool use_sigma = false;
    fuse->add_option("--imu", imu, "IMU CSV")->required();
    fuse->add_option("--radar", radar, "velocity measurement CSV")->required();
    fuse->add_option("--calib", calib, "calibration JSON")->required();
    fuse->add_option("--config", config, "filter config JSON");
    fuse->add_option("--out", fuse_out, "estimate CSV output");
    fuse->add_option("--init", init_gt, "ground-truth CSV whose first row initializes q, v");
    fuse->add_flag("--use-sigma", use_sigma,
                   "weight each update by the measurement's own covariance");

    // doppler
    auto* dop = app.add_subcommand("doppler", "RANSAC ego-velocity from detections CSV");
    std::string det_csv, dop_out = "radar_vel.csv";
    int iters = 100;
    double threshold = 0.2;
    std::uint64_t seed = 1;
    dop->add_option("detections", det_csv, "detections CSV")->required();
    dop->add_option("--out", dop_out, "velocity measurement CSV output");
    dop->add_option("--iters", iters, "RANSAC iterations");
    dop->add_option("--threshold", threshold, "inlier threshold, m/s");
    dop->add_option("--seed", seed, "RANSAC seed");

    // cube
    auto* cube = app.add_subcommand("cube", "Radar cube synthesis / processing / detection");
    cube->require_subcommand(1);
    auto* synth = cube->add_subcommand("synthesize", "scene JSON -> ADC RDC1");
    std::string scene_json, synth_out = "adc.rdc1";
    synth->add_option("scene", scene_json, "scene JSON")->required();
    synth->add_option("--out", synth_out, "RDC1 output");
    auto* proc = cube->add_subcommand("process", "ADC RDC1 -> range/Doppler/angle RDC1");
    std::string proc_in, proc_out = "cube.rdc1";
    proc->add_option("input", proc_in, "ADC RDC1 file")->required();
    proc->add_option("--out", proc_out, "RDC1 output");
    auto* detect = cube->add_subcommand("detect", "processed RDC1 -> detections CSV");
    std::string detect_in, detect_out = "detections.csv";
    double threshold_db = 12.0;
    detect->add_option("input", detect_in, "processed RDC1 file")->required();
    detect->add_option("--out", detect_out, "detections CSV output");
    detect->add_option("--threshold-db", threshold_db, "dB over the cube's median magnitude");

    // eval
    auto* eval = app.add_subcommand("eval", "Per-axis MSE/MAE of an estimate vs ground truth");
    std::string est_csv, gt_csv, metrics_json = "metrics.json", dump_csv;
    eval->add_option("--est", est_csv, "estimate CSV")->required();
    eval->add_option("--gt", gt_csv, "ground-truth CSV")->required();
    eval->add_option("--out", metrics_json, "metrics JSON output");
    eval->add_option("--dump", dump_csv, "per-sample error CSV for plotting");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte-Carlo filter-consistency runs");
    std::string mc_scenario, mc_config, mc_out = "consistency.json";
    int n_runs = 50, threads = 0;
    mc->add_option("scenario", mc_scenario, "scenario TOML")->required();
    mc->add_option("--config", mc_config, "filter config JSON");
    mc->add_option("--runs", n_runs, "number of seeded runs");
    mc->add_option("--threads", threads, "worker threads (0 = auto, EGOFUSE_THREADS caps)");
    mc->add_option("--out", mc_out, "consistency stats JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        return finish(ef_run_sim(scenario.c_str(), out_dir.c_str()));
    }
    if (fuse->parsed()) {
        return finish(ef_run_fuse(imu.c_str(), radar.c_str(), calib.c_str(),
                                  config.empty() ? nullptr : config.c_str(),
                                  fuse_out.c_str(), use_sigma ? 1 : 0,
                                  init_gt.empty() ? nullptr : init_gt.c_str()));
    }
    if (dop->parsed()) {
        return finish(ef_run_doppler(det_csv.c_str(), dop_out.c_str(), iters, threshold, seed));
    }
    if (cube->parsed()) {
        if (synth->parsed()) {
            return finish(ef_cube_synthesize(scene_json.c_str(), synth_out.c_str()));
        }
        if (proc->parsed()) {
            return finish(ef_cube_process(proc_in.c_str(), proc_out.c_str()));
        }
        return finish(ef_cube_detect(detect_in.c_str(), threshold_db, detect_out.c_str()));
    }
    if (eval->parsed()) {
        return finish(ef_run_eval(est_csv.c_str(), gt_csv.c_str(), metrics_json.c_str(),
                                  dump_csv.empty() ? nullptr : dump_csv.c_str()));
    }
    if (mc->parsed()) {
        return finish(ef_run_mc(mc_scenario.c_str(),
                                mc_config.empty() ? nullptr : mc_config.c_str(), n_runs,
                                threads, mc_out.c_str()));
    }
    return 2;
}
