#include "egofuse/radarcube.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "egofuse/errors.hpp"

namespace egofuse::radarcube {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

/// Unnormalized forward FFT along one axis, zero-padded to out_len, with an
/// optional FFT shift that moves zero frequency to bin out_len/2.
ComplexCube fft_axis(const ComplexCube& in, int axis, int out_len, bool shift) {
    std::array<int, 3> out_dims = in.dims;
    out_dims[axis] = out_len;
    ComplexCube out(out_dims[0], out_dims[1], out_dims[2]);

    std::vector<std::complex<double>> line(static_cast<std::size_t>(out_len));
    fftw_plan plan = fftw_plan_dft_1d(out_len, reinterpret_cast<fftw_complex*>(line.data()),
                                      reinterpret_cast<fftw_complex*>(line.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);

    const int n_in = in.dims[axis];
    const std::array<int, 3> outer = {axis == 0 ? 1 : in.dims[0],
                                      axis == 1 ? 1 : in.dims[1],
                                      axis == 2 ? 1 : in.dims[2]};
    for (int i = 0; i < outer[0]; ++i) {
        for (int j = 0; j < outer[1]; ++j) {
            for (int k = 0; k < outer[2]; ++k) {
                std::fill(line.begin(), line.end(), std::complex<double>{0.0, 0.0});
                for (int m = 0; m < n_in; ++m) {
                    const int ii = axis == 0 ? m : i;
                    const int jj = axis == 1 ? m : j;
                    const int kk = axis == 2 ? m : k;
                    line[static_cast<std::size_t>(m)] = in.at(ii, jj, kk);
                }
                fftw_execute(plan);
                for (int m = 0; m < out_len; ++m) {
                    const int dst = shift ? (m + out_len / 2) % out_len : m;
                    const int ii = axis == 0 ? dst : i;
                    const int jj = axis == 1 ? dst : j;
                    const int kk = axis == 2 ? dst : k;
                    out.at(ii, jj, kk) = line[static_cast<std::size_t>(m)];
                }
            }
        }
    }
    fftw_destroy_plan(plan);
    return out;
}

}  // namespace

double RadarParams::range_resolution() const {
    return kSpeedOfLight * fs / (2.0 * slope * n_samples);
}

double RadarParams::velocity_resolution() const {
    return kSpeedOfLight / (2.0 * fc * n_chirps * chirp_interval);
}

double RadarParams::unambiguous_range() const {
    return range_resolution() * n_samples;
}

double RadarParams::unambiguous_velocity() const {
    return velocity_resolution() * n_chirps / 2.0;
}

RadarCube process_cube(const AdcCube& adc) {
    const auto& p = adc.params;
    if (adc.cube.dims[0] != p.n_samples || adc.cube.dims[1] != p.n_chirps ||
        adc.cube.dims[2] != p.n_virtual) {
        throw DimensionMismatch("process_cube: ADC cube dimensions do not match params");
    }
    ComplexCube stage = fft_axis(adc.cube, 0, p.n_samples, false);
    stage = fft_axis(stage, 1, p.n_chirps, true);
    stage = fft_axis(stage, 2, p.n_angle_bins, true);
    return {std::move(stage), p, adc.t};
}

AdcCube synthesize_adc(const RadarParams& params, const std::vector<PointTarget>& targets,
                       double noise_sigma, std::uint64_t seed) {
    AdcCube adc;
    adc.params = params;
    adc.cube = ComplexCube(params.n_samples, params.n_chirps, params.n_virtual);

    for (const auto& tgt : targets) {
        if (tgt.range <= 0.0 || tgt.range >= params.unambiguous_range()) {
            throw OutOfUnambiguousRange("synthesize_adc: target range " +
                                        std::to_string(tgt.range) + " m outside (0, " +
                                        std::to_string(params.unambiguous_range()) + ")");
        }
        if (std::abs(tgt.radial_velocity) >= params.unambiguous_velocity()) {
            throw OutOfUnambiguousRange("synthesize_adc: radial velocity " +
                                        std::to_string(tgt.radial_velocity) +
                                        " m/s outside the unambiguous interval");
        }
        if (std::abs(params.element_spacing * std::sin(tgt.angle)) >= 0.5) {
            throw OutOfUnambiguousRange("synthesize_adc: target angle aliases on the array");
        }
        const double f_beat = 2.0 * params.slope * tgt.range / kSpeedOfLight;
        const double f_dopp = 2.0 * params.fc * tgt.radial_velocity / kSpeedOfLight;
        const double f_spatial = params.element_spacing * std::sin(tgt.angle);
        for (int n = 0; n < params.n_samples; ++n) {
            const double ph_r = 2.0 * M_PI * f_beat * n / params.fs;
            for (int m = 0; m < params.n_chirps; ++m) {
                const double ph_d = 2.0 * M_PI * f_dopp * params.chirp_interval * m;
                for (int c = 0; c < params.n_virtual; ++c) {
                    const double ph = ph_r + ph_d + 2.0 * M_PI * f_spatial * c;
                    adc.cube.at(n, m, c) += tgt.amplitude * std::polar(1.0, ph);
                }
            }
        }
    }

    if (noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        for (auto& v : adc.cube.data) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v += std::complex<double>(re, im);
        }
    }
    return adc;
}

BinPhysical bin_to_physical(int i_r, int i_d, int i_a, const RadarParams& params) {
    if (i_r < 0 || i_r >= params.n_samples || i_d < 0 || i_d >= params.n_chirps ||
        i_a < 0 || i_a >= params.n_angle_bins) {
        throw IndexOutOfBounds("bin_to_physical: bin index out of bounds");
    }
    BinPhysical out{};
    out.range = i_r * params.range_resolution();
    out.radial_velocity = (i_d - params.n_chirps / 2) * params.velocity_resolution();
    const double f_spatial =
        static_cast<double>(i_a - params.n_angle_bins / 2) / params.n_angle_bins;
    out.angle = std::asin(f_spatial / params.element_spacing);
    return out;
}

std::array<int, 3> physical_to_bin(const PointTarget& target, const RadarParams& params) {
    const int i_r = static_cast<int>(std::lround(target.range / params.range_resolution()));
    const int i_d = params.n_chirps / 2 +
                    static_cast<int>(std::lround(target.radial_velocity /
                                                 params.velocity_resolution()));
    const double f_spatial = params.element_spacing * std::sin(target.angle);
    const int i_a = params.n_angle_bins / 2 +
                    static_cast<int>(std::lround(f_spatial * params.n_angle_bins));
    return {i_r, i_d, i_a};
}

std::vector<RadarDetection> extract_detections(const RadarCube& cube, double threshold_db) {
    const auto& c = cube.cube;
    std::vector<double> mags(c.data.size());
    for (std::size_t i = 0; i < c.data.size(); ++i) {
        mags[i] = std::abs(c.data[i]);
    }
    std::vector<double> sorted = mags;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    const double median = sorted[mid];
    if (median <= 0.0 && *std::max_element(mags.begin(), mags.end()) <= 0.0) {
        return {};
    }
    const double floor = std::max(median, 1e-300);
    const double threshold = floor * std::pow(10.0, threshold_db / 20.0);

    // One candidate per range-Doppler cell: the strongest angle bin. This
    // keeps angle-FFT sidelobes of a strong return from spawning spurious
    // detections in the same cell.
    const int nr = c.dims[0], nd = c.dims[1], na = c.dims[2];
    std::vector<double> cell_mag(static_cast<std::size_t>(nr) * nd, 0.0);
    std::vector<int> cell_angle(static_cast<std::size_t>(nr) * nd, 0);
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nd; ++j) {
            double best = -1.0;
            int best_k = 0;
            for (int k = 0; k < na; ++k) {
                const double m = mags[(static_cast<std::size_t>(i) * nd + j) * na + k];
                if (m > best) {
                    best = m;
                    best_k = k;
                }
            }
            cell_mag[static_cast<std::size_t>(i) * nd + j] = best;
            cell_angle[static_cast<std::size_t>(i) * nd + j] = best_k;
        }
    }
    auto cell_at = [&](int i, int j) { return cell_mag[static_cast<std::size_t>(i) * nd + j]; };

    std::vector<RadarDetection> dets;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nd; ++j) {
            {
                const double m = cell_at(i, j);
                if (m <= threshold) {
                    continue;
                }
                bool is_peak = true;
                for (int d = -1; d <= 1 && is_peak; d += 2) {
                    if (i + d >= 0 && i + d < nr && cell_at(i + d, j) >= m) is_peak = false;
                    if (j + d >= 0 && j + d < nd && cell_at(i, j + d) >= m) is_peak = false;
                }
                if (!is_peak) {
                    continue;
                }
                const int k = cell_angle[static_cast<std::size_t>(i) * nd + j];
                const BinPhysical phys = bin_to_physical(i, j, k, cube.params);
                RadarDetection det;
                det.dir = geom::Vec3(std::cos(phys.angle), std::sin(phys.angle), 0.0);
                det.v_r = phys.radial_velocity;
                det.weight = m / floor;
                dets.push_back(det);
            }
        }
    }
    return dets;
}

void write_rdc1(const std::string& path, const ComplexCube& cube, const RadarParams& params,
                bool processed, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("write_rdc1: cannot open " + path);
    }
    out.write("RDC1", 4);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(cube.dims[0]),
                                   static_cast<std::uint32_t>(cube.dims[1]),
                                   static_cast<std::uint32_t>(cube.dims[2])};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    const std::uint8_t flag = processed ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&flag), 1);
    std::vector<float> buf;
    buf.reserve(cube.data.size() * 2);
    for (const auto& v : cube.data) {
        buf.push_back(static_cast<float>(v.real()));
        buf.push_back(static_cast<float>(v.imag()));
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));

    nlohmann::json j;
    j["fc"] = params.fc;
    j["slope"] = params.slope;
    j["fs"] = params.fs;
    j["n_samples"] = params.n_samples;
    j["n_chirps"] = params.n_chirps;
    j["chirp_interval"] = params.chirp_interval;
    j["n_virtual"] = params.n_virtual;
    j["element_spacing"] = params.element_spacing;
    j["n_angle_bins"] = params.n_angle_bins;
    j["t"] = t;
    std::ofstream sidecar(path + ".params.json");
    sidecar << j.dump(2) << "\n";
}

Rdc1File read_rdc1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("read_rdc1: cannot open " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "RDC1") {
        throw InputError("read_rdc1: bad magic in " + path);
    }
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    std::uint8_t flag = 0;
    in.read(reinterpret_cast<char*>(&flag), 1);
    if (!in) {
        throw InputError("read_rdc1: truncated header in " + path);
    }

    Rdc1File f;
    f.processed = flag != 0;
    f.cube = ComplexCube(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2]));
    std::vector<float> buf(f.cube.data.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) {
        throw InputError("read_rdc1: truncated payload in " + path);
    }
    for (std::size_t i = 0; i < f.cube.data.size(); ++i) {
        f.cube.data[i] = {buf[2 * i], buf[2 * i + 1]};
    }

    std::ifstream sidecar(path + ".params.json");
    if (sidecar) {
        nlohmann::json j;
        sidecar >> j;
        f.params.fc = j.value("fc", f.params.fc);
        f.params.slope = j.value("slope", f.params.slope);
        f.params.fs = j.value("fs", f.params.fs);
        f.params.n_samples = j.value("n_samples", f.params.n_samples);
        f.params.n_chirps = j.value("n_chirps", f.params.n_chirps);
        f.params.chirp_interval = j.value("chirp_interval", f.params.chirp_interval);
        f.params.n_virtual = j.value("n_virtual", f.params.n_virtual);
        f.params.element_spacing = j.value("element_spacing", f.params.element_spacing);
        f.params.n_angle_bins = j.value("n_angle_bins", f.params.n_angle_bins);
        f.t = j.value("t", 0.0);
    } else {
        f.params.n_samples = f.cube.dims[0];
        f.params.n_chirps = f.cube.dims[1];
        f.params.n_virtual = f.cube.dims[2];
    }
    return f;
}

}  // namespace egofuse::radarcube
