#include "egofuse/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "egofuse/errors.hpp"

namespace egofuse::io {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open " + path + " for writing");
    }
    return out;
}

std::vector<double> split_csv_line(const std::string& line, const std::string& path) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) {
            end = line.size();
        }
        const char* first = line.data() + start;
        const char* last = line.data() + end;
        while (first < last && *first == ' ') ++first;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            throw InputError("malformed CSV value in " + path + ": '" +
                             line.substr(start, end - start) + "'");
        }
        values.push_back(v);
        start = end + 1;
        if (end == line.size()) {
            break;
        }
    }
    return values;
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::string& expected_header) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError("empty CSV file " + path);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != expected_header) {
        throw InputError("unexpected header in " + path + ": '" + line + "' (expected '" +
                         expected_header + "')");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        rows.push_back(split_csv_line(line, path));
    }
    return rows;
}

geom::Vec3 vec3_from(const std::vector<double>& row, std::size_t offset) {
    return {row[offset], row[offset + 1], row[offset + 2]};
}

json load_json(const std::string& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

std::vector<ImuSample> read_imu_csv(const std::string& path) {
    const auto rows = read_csv(path, "t,gx,gy,gz,ax,ay,az");
    std::vector<ImuSample> out;
    out.reserve(rows.size());
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.size() != 7) {
            throw InputError("bad IMU row width in " + path);
        }
        if (r[0] <= prev_t) {
            throw NonMonotoneTime("IMU timestamps not strictly increasing in " + path);
        }
        prev_t = r[0];
        out.push_back({r[0], vec3_from(r, 1), vec3_from(r, 4)});
    }
    return out;
}

void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples) {
    auto out = open_out(path);
    out << "t,gx,gy,gz,ax,ay,az\n";
    for (const auto& s : samples) {
        out << fmt(s.t) << ',' << fmt(s.gyro.x()) << ',' << fmt(s.gyro.y()) << ','
            << fmt(s.gyro.z()) << ',' << fmt(s.accel.x()) << ',' << fmt(s.accel.y()) << ','
            << fmt(s.accel.z()) << '\n';
    }
}

std::vector<GroundTruthSample> read_gt_csv(const std::string& path) {
    const auto rows = read_csv(path, "t,qw,qx,qy,qz,vx,vy,vz");
    std::vector<GroundTruthSample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != 8) {
            throw InputError("bad ground-truth row width in " + path);
        }
        GroundTruthSample g;
        g.t = r[0];
        g.q = geom::UnitQuaternion(r[1], r[2], r[3], r[4]);
        g.v = vec3_from(r, 5);
        out.push_back(g);
    }
    return out;
}

void write_gt_csv(const std::string& path, const std::vector<GroundTruthSample>& truth) {
    auto out = open_out(path);
    out << "t,qw,qx,qy,qz,vx,vy,vz\n";
    for (const auto& g : truth) {
        out << fmt(g.t) << ',' << fmt(g.q.w) << ',' << fmt(g.q.x) << ',' << fmt(g.q.y) << ','
            << fmt(g.q.z) << ',' << fmt(g.v.x()) << ',' << fmt(g.v.y()) << ',' << fmt(g.v.z())
            << '\n';
    }
}

std::vector<VelocityMeasurement> read_radar_vel_csv(const std::string& path) {
    const auto rows = read_csv(path, "t,vx,vy,vz,s11,s12,s13,s22,s23,s33");
    std::vector<VelocityMeasurement> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != 10) {
            throw InputError("bad measurement row width in " + path);
        }
        VelocityMeasurement m;
        m.t = r[0];
        m.v_m = vec3_from(r, 1);
        m.sigma_m << r[4], r[5], r[6],
                     r[5], r[7], r[8],
                     r[6], r[8], r[9];
        out.push_back(m);
    }
    return out;
}

void write_radar_vel_csv(const std::string& path,
                         const std::vector<VelocityMeasurement>& measurements) {
    auto out = open_out(path);
    out << "t,vx,vy,vz,s11,s12,s13,s22,s23,s33\n";
    for (const auto& m : measurements) {
        out << fmt(m.t) << ',' << fmt(m.v_m.x()) << ',' << fmt(m.v_m.y()) << ','
            << fmt(m.v_m.z()) << ',' << fmt(m.sigma_m(0, 0)) << ',' << fmt(m.sigma_m(0, 1))
            << ',' << fmt(m.sigma_m(0, 2)) << ',' << fmt(m.sigma_m(1, 1)) << ','
            << fmt(m.sigma_m(1, 2)) << ',' << fmt(m.sigma_m(2, 2)) << '\n';
    }
}

std::vector<DetectionFrame> read_detections_csv(const std::string& path) {
    const auto rows = read_csv(path, "t,dx,dy,dz,vr");
    std::vector<DetectionFrame> frames;
    bool warned = false;
    for (const auto& r : rows) {
        if (r.size() != 5) {
            throw InputError("bad detection row width in " + path);
        }
        geom::Vec3 dir = vec3_from(r, 1);
        const double n = dir.norm();
        if (n <= 0.0) {
            throw InputError("zero detection direction in " + path);
        }
        if (std::abs(n - 1.0) > 1e-6 && !warned) {
            std::cerr << "warning: non-unit detection directions in " << path
                      << " (renormalizing)\n";
            warned = true;
        }
        dir /= n;
        if (frames.empty() || frames.back().t != r[0]) {
            frames.push_back({r[0], {}});
        }
        frames.back().detections.push_back({dir, r[4], 1.0});
    }
    return frames;
}

void write_detections_csv(const std::string& path, const std::vector<DetectionFrame>& frames) {
    auto out = open_out(path);
    out << "t,dx,dy,dz,vr\n";
    for (const auto& f : frames) {
        for (const auto& d : f.detections) {
            out << fmt(f.t) << ',' << fmt(d.dir.x()) << ',' << fmt(d.dir.y()) << ','
                << fmt(d.dir.z()) << ',' << fmt(d.v_r) << '\n';
        }
    }
}

namespace {
const char* kEstHeader =
    "t,qw,qx,qy,qz,vx,vy,vz,bgx,bgy,bgz,bax,bay,baz,"
    "p11,p22,p33,p44,p55,p66,p77,p88,p99,p1010,p1111,p1212";
}

void write_estimates_csv(const std::string& path, const std::vector<FilterRecord>& records) {
    auto out = open_out(path);
    out << kEstHeader << '\n';
    for (const auto& r : records) {
        out << fmt(r.t) << ',' << fmt(r.state.q.w) << ',' << fmt(r.state.q.x) << ','
            << fmt(r.state.q.y) << ',' << fmt(r.state.q.z) << ',' << fmt(r.state.v.x()) << ','
            << fmt(r.state.v.y()) << ',' << fmt(r.state.v.z()) << ',' << fmt(r.state.bg.x())
            << ',' << fmt(r.state.bg.y()) << ',' << fmt(r.state.bg.z()) << ','
            << fmt(r.state.ba.x()) << ',' << fmt(r.state.ba.y()) << ',' << fmt(r.state.ba.z());
        for (int i = 0; i < 12; ++i) {
            out << ',' << fmt(r.P(i, i));
        }
        out << '\n';
    }
}

std::vector<EstimateRecord> read_estimates_csv(const std::string& path) {
    const auto rows = read_csv(path, kEstHeader);
    std::vector<EstimateRecord> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != 26) {
            throw InputError("bad estimate row width in " + path);
        }
        EstimateRecord e;
        e.t = r[0];
        e.state.q = geom::UnitQuaternion(r[1], r[2], r[3], r[4]);
        e.state.v = vec3_from(r, 5);
        e.state.bg = vec3_from(r, 8);
        e.state.ba = vec3_from(r, 11);
        for (int i = 0; i < 12; ++i) {
            e.p_diag(i) = r[14 + static_cast<std::size_t>(i)];
        }
        out.push_back(e);
    }
    return out;
}

Extrinsics read_calibration_json(const std::string& path) {
    const json j = load_json(path);
    Extrinsics ex;
    try {
        const auto& la = j.at("lever_arm");
        ex.lever_arm = geom::Vec3(la.at(0), la.at(1), la.at(2));
        if (j.contains("q_RI")) {
            const auto& q = j.at("q_RI");
            ex.q_RI = geom::UnitQuaternion(q.at(0), q.at(1), q.at(2), q.at(3));
        }
    } catch (const json::exception& e) {
        throw InputError("bad calibration JSON " + path + ": " + e.what());
    }
    return ex;
}

void write_calibration_json(const std::string& path, const Extrinsics& ex) {
    json j;
    j["lever_arm"] = {ex.lever_arm.x(), ex.lever_arm.y(), ex.lever_arm.z()};
    j["q_RI"] = {ex.q_RI.w, ex.q_RI.x, ex.q_RI.y, ex.q_RI.z};
    j["gravity"] = 9.80665;
    open_out(path) << j.dump(2) << '\n';
}

FilterConfig read_filter_config_json(const std::string& path) {
    const json j = load_json(path);
    FilterConfig cfg;
    try {
        if (j.contains("p0_diag")) {
            const auto& d = j.at("p0_diag");
            if (d.size() != 12) {
                throw InputError("p0_diag must have 12 entries in " + path);
            }
            for (int i = 0; i < 12; ++i) {
                cfg.P0(i, i) = d.at(static_cast<std::size_t>(i));
            }
        }
        cfg.noise.sigma_g = j.value("sigma_g", cfg.noise.sigma_g);
        cfg.noise.sigma_a = j.value("sigma_a", cfg.noise.sigma_a);
        cfg.noise.sigma_bg = j.value("sigma_bg", cfg.noise.sigma_bg);
        cfg.noise.sigma_ba = j.value("sigma_ba", cfg.noise.sigma_ba);
        cfg.r_floor = j.value("r_floor", cfg.r_floor);
        cfg.gate_chi2 = j.value("gate_chi2", cfg.gate_chi2);
        cfg.use_predicted_sigma = j.value("use_predicted_sigma", cfg.use_predicted_sigma);
        if (j.contains("fixed_r_diag")) {
            const auto& d = j.at("fixed_r_diag");
            cfg.fixed_R = geom::Mat3::Zero();
            for (int i = 0; i < 3; ++i) {
                cfg.fixed_R(i, i) = d.at(static_cast<std::size_t>(i));
            }
        }
    } catch (const json::exception& e) {
        throw InputError("bad filter config JSON " + path + ": " + e.what());
    }
    return cfg;
}

void write_filter_config_json(const std::string& path, const FilterConfig& cfg) {
    json j;
    std::vector<double> p0(12);
    for (int i = 0; i < 12; ++i) {
        p0[static_cast<std::size_t>(i)] = cfg.P0(i, i);
    }
    j["p0_diag"] = p0;
    j["sigma_g"] = cfg.noise.sigma_g;
    j["sigma_a"] = cfg.noise.sigma_a;
    j["sigma_bg"] = cfg.noise.sigma_bg;
    j["sigma_ba"] = cfg.noise.sigma_ba;
    j["r_floor"] = cfg.r_floor;
    j["gate_chi2"] = cfg.gate_chi2;
    j["use_predicted_sigma"] = cfg.use_predicted_sigma;
    j["fixed_r_diag"] = {cfg.fixed_R(0, 0), cfg.fixed_R(1, 1), cfg.fixed_R(2, 2)};
    open_out(path) << j.dump(2) << '\n';
}

namespace {

struct TomlValue {
    std::string raw;                 // scalar (number/bool/string without quotes)
    std::vector<double> array;       // numeric array
    bool is_array{false};
    bool is_string{false};
};

std::map<std::string, TomlValue> parse_flat_toml(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, TomlValue> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment (no # inside strings in our key set)
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') {
                in_str = !in_str;
            } else if (line[i] == '#' && !in_str) {
                line.resize(i);
                break;
            }
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line.front() == '[') {
            continue;  // blank or table header; keys are globally unique
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        TomlValue tv;
        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') {
                throw InputError(path + ":" + std::to_string(lineno) +
                                 ": arrays must be single-line");
            }
            tv.is_array = true;
            std::stringstream ss(val.substr(1, val.size() - 2));
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) {
                    continue;
                }
                tv.array.push_back(std::stod(item));
            }
        } else if (!val.empty() && val.front() == '"') {
            if (val.size() < 2 || val.back() != '"') {
                throw InputError(path + ":" + std::to_string(lineno) + ": unterminated string");
            }
            tv.is_string = true;
            tv.raw = val.substr(1, val.size() - 2);
        } else {
            tv.raw = val;
        }
        kv[key] = std::move(tv);
    }
    return kv;
}

}  // namespace

Scenario read_scenario_toml(const std::string& path) {
    const auto kv = parse_flat_toml(path);
    Scenario sc;

    auto num = [&](const std::string& key, double dflt) {
        const auto it = kv.find(key);
        return it == kv.end() ? dflt : std::stod(it->second.raw);
    };
    auto vec = [&](const std::string& key, const geom::Vec3& dflt) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            return dflt;
        }
        if (it->second.array.size() != 3) {
            throw InputError(path + ": key '" + key + "' must be a 3-array");
        }
        return geom::Vec3(it->second.array[0], it->second.array[1], it->second.array[2]);
    };
    auto str = [&](const std::string& key, const std::string& dflt) {
        const auto it = kv.find(key);
        return it == kv.end() ? dflt : it->second.raw;
    };

    sc.duration = num("duration", sc.duration);
    sc.imu_rate = num("imu_rate", sc.imu_rate);
    sc.radar_rate = num("radar_rate", sc.radar_rate);
    sc.seed = static_cast<std::uint64_t>(num("seed", static_cast<double>(sc.seed)));

    auto& tp = sc.trajectory;
    tp.id = str("profile", tp.id);
    tp.v0 = vec("v0", tp.v0);
    tp.v_amp = vec("v_amp", tp.v_amp);
    tp.v_freq = vec("v_freq", tp.v_freq);
    tp.v_phase = vec("v_phase", tp.v_phase);
    tp.euler_amp = vec("euler_amp", tp.euler_amp);
    tp.euler_freq = vec("euler_freq", tp.euler_freq);
    tp.euler_phase = vec("euler_phase", tp.euler_phase);
    tp.yaw_amp = num("yaw_amp", tp.yaw_amp);
    tp.yaw_freq = num("yaw_freq", tp.yaw_freq);
    tp.speed0 = num("speed0", tp.speed0);
    tp.speed_amp = num("speed_amp", tp.speed_amp);
    tp.speed_freq = num("speed_freq", tp.speed_freq);

    sc.true_bg = vec("true_bg", sc.true_bg);
    sc.true_ba = vec("true_ba", sc.true_ba);
    sc.noise.sigma_g = num("sigma_g", sc.noise.sigma_g);
    sc.noise.sigma_a = num("sigma_a", sc.noise.sigma_a);
    sc.noise.sigma_bg = num("sigma_bg", sc.noise.sigma_bg);
    sc.noise.sigma_ba = num("sigma_ba", sc.noise.sigma_ba);

    const geom::Vec3 rs = vec("radar_sigma_diag", geom::Vec3::Constant(1e-2));
    sc.radar_sigma = rs.asDiagonal();

    sc.extrinsics.lever_arm = vec("lever_arm", sc.extrinsics.lever_arm);
    if (const auto it = kv.find("q_RI"); it != kv.end()) {
        if (it->second.array.size() != 4) {
            throw InputError(path + ": q_RI must be a 4-array [w,x,y,z]");
        }
        const auto& a = it->second.array;
        sc.extrinsics.q_RI = geom::UnitQuaternion(a[0], a[1], a[2], a[3]);
    }

    sc.n_static_targets = static_cast<int>(num("n_static_targets", sc.n_static_targets));
    sc.n_dynamic_targets = static_cast<int>(num("n_dynamic_targets", sc.n_dynamic_targets));
    sc.detection_noise = num("detection_noise", sc.detection_noise);
    sc.dynamic_speed_min = num("dynamic_speed_min", sc.dynamic_speed_min);
    sc.dynamic_speed_max = num("dynamic_speed_max", sc.dynamic_speed_max);
    sc.reported_sigma_scale = num("reported_sigma_scale", sc.reported_sigma_scale);
    sc.inflate_start = num("inflate_start", sc.inflate_start);
    sc.inflate_end = num("inflate_end", sc.inflate_end);
    sc.inflate_factor = num("inflate_factor", sc.inflate_factor);
    return sc;
}

void write_metrics_json(const std::string& path, const Metrics& m) {
    json j;
    j["mse"] = {m.mse.x(), m.mse.y(), m.mse.z()};
    j["mae"] = {m.mae.x(), m.mae.y(), m.mae.z()};
    j["n"] = m.n;
    open_out(path) << j.dump(2) << '\n';
}

std::vector<VelocitySample> velocity_series_from_estimates(
    const std::vector<EstimateRecord>& records) {
    std::vector<VelocitySample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.t, r.state.v});
    }
    return out;
}

std::vector<VelocitySample> velocity_series_from_gt(
    const std::vector<GroundTruthSample>& truth) {
    std::vector<VelocitySample> out;
    out.reserve(truth.size());
    for (const auto& g : truth) {
        out.push_back({g.t, g.v});
    }
    return out;
}

}  // namespace egofuse::io
