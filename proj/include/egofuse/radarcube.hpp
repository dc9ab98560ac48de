#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "egofuse/doppler.hpp"

namespace egofuse::radarcube {

using doppler::RadarDetection;

/// FMCW waveform and virtual-array geometry.
struct RadarParams {
    double fc{77e9};              // Hz, carrier
    double slope{30e12};          // Hz/s, chirp slope
    double fs{10e6};              // Hz, ADC sample rate
    int n_samples{256};           // fast-time samples per chirp
    int n_chirps{16};             // chirps per frame
    double chirp_interval{1e-4};  // s
    int n_virtual{86};            // virtual channels (uniform linear array)
    double element_spacing{0.5};  // wavelengths
    int n_angle_bins{192};        // angle FFT length (zero-padded)

    double range_resolution() const;       // m per range bin
    double velocity_resolution() const;    // m/s per Doppler bin
    double unambiguous_range() const;      // m
    double unambiguous_velocity() const;   // m/s, one-sided
};

/// Dense complex 3D tensor, row-major over [dim0][dim1][dim2].
struct ComplexCube {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<std::complex<double>> data;

    ComplexCube() = default;
    ComplexCube(int d0, int d1, int d2)
        : dims{d0, d1, d2},
          data(static_cast<std::size_t>(d0) * d1 * d2, {0.0, 0.0}) {}

    std::complex<double>& at(int i, int j, int k) {
        return data[(static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k];
    }
    const std::complex<double>& at(int i, int j, int k) const {
        return data[(static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k];
    }
};

/// Raw ADC frame indexed [sample, chirp, virtual channel].
struct AdcCube {
    ComplexCube cube;
    RadarParams params;
    double t{0.0};
};

/// Processed frame indexed [range bin, Doppler bin, angle bin]; zero
/// velocity sits at Doppler bin D/2 and boresight at angle bin A/2.
struct RadarCube {
    ComplexCube cube;
    RadarParams params;
    double t{0.0};
};

struct PointTarget {
    double range{10.0};            // m
    double radial_velocity{0.0};   // m/s, range rate (positive receding)
    double angle{0.0};             // rad, azimuth on the linear array
    double amplitude{1.0};
};

/// 3D FFT pipeline: unnormalized forward FFT along samples (range), chirps
/// (Doppler, FFT-shifted) and zero-padded channels (angle, FFT-shifted).
RadarCube process_cube(const AdcCube& adc);

/// Sum-of-complex-exponentials test-signal generator with seeded complex
/// Gaussian noise. Throws OutOfUnambiguousRange for targets beyond the
/// waveform's unambiguous bounds.
AdcCube synthesize_adc(const RadarParams& params, const std::vector<PointTarget>& targets,
                       double noise_sigma, std::uint64_t seed);

/// Physical quantities at a processed-cube bin triple.
struct BinPhysical {
    double range;            // m
    double radial_velocity;  // m/s
    double angle;            // rad
};
BinPhysical bin_to_physical(int i_r, int i_d, int i_a, const RadarParams& params);

/// Analytic bin triple for an on-grid target (used by synthesis tests).
std::array<int, 3> physical_to_bin(const PointTarget& target, const RadarParams& params);

/// Magnitude local maxima above threshold_db over the cube's median
/// magnitude, converted to unit-direction + radial-velocity detections
/// (zero elevation); weight is the linear SNR over the median.
std::vector<RadarDetection> extract_detections(const RadarCube& cube, double threshold_db);

/// RDC1 binary cube file: magic "RDC1", u32 dims, u8 domain flag
/// (0 = ADC, 1 = processed), f32 interleaved (re, im), little-endian,
/// with a `<path>.params.json` sidecar carrying RadarParams.
void write_rdc1(const std::string& path, const ComplexCube& cube, const RadarParams& params,
                bool processed, double t);
struct Rdc1File {
    ComplexCube cube;
    RadarParams params;
    bool processed{false};
    double t{0.0};
};
Rdc1File read_rdc1(const std::string& path);

}  // namespace egofuse::radarcube
