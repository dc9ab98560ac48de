#include "egofuse/doppler.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "egofuse/errors.hpp"

namespace egofuse::doppler {

DopplerFit ls_velocity(const std::vector<RadarDetection>& dets) {
    const std::size_t n = dets.size();
    if (n < 3) {
        throw TooFewDetections("ls_velocity: need at least 3 detections, got " +
                               std::to_string(n));
    }

    Mat3 normal = Mat3::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const auto& d : dets) {
        normal += d.weight * d.dir * d.dir.transpose();
        rhs += d.weight * d.dir * (-d.v_r);
    }

    Eigen::SelfAdjointEigenSolver<Mat3> eig(normal);
    const double ev_min = eig.eigenvalues().minCoeff();
    const double ev_max = eig.eigenvalues().maxCoeff();
    if (ev_min <= 1e-9 * ev_max) {
        throw RankDeficient("ls_velocity: detection directions span fewer than 3 dimensions");
    }

    DopplerFit fit;
    fit.v = normal.ldlt().solve(rhs);

    double wrss = 0.0;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = dets[i].v_r + dets[i].dir.dot(fit.v);
        wrss += dets[i].weight * r * r;
        rss += r * r;
        fit.inliers.push_back(i);
    }
    fit.residual_rms = std::sqrt(rss / static_cast<double>(n));

    const double dof = static_cast<double>(n) - 3.0;
    const double s2 = dof > 0.0 ? std::max(wrss / dof, kResidualVarianceFloor)
                                : kResidualVarianceFloor;
    fit.sigma = s2 * normal.inverse();
    return fit;
}

DopplerFit ransac_velocity(const std::vector<RadarDetection>& dets, int iters,
                           double threshold, std::uint64_t seed) {
    const std::size_t n = dets.size();
    if (n < 3) {
        throw TooFewDetections("ransac_velocity: need at least 3 detections, got " +
                               std::to_string(n));
    }
    if (iters < 1 || threshold <= 0.0) {
        throw InputError("ransac_velocity: iters must be >= 1 and threshold > 0");
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::vector<std::size_t> best_inliers;
    double best_rms = std::numeric_limits<double>::infinity();

    for (int it = 0; it < iters; ++it) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (i == j || i == k || j == k) {
            continue;
        }
        Mat3 d;
        d.row(0) = dets[i].dir.transpose();
        d.row(1) = dets[j].dir.transpose();
        d.row(2) = dets[k].dir.transpose();
        if (std::abs(d.determinant()) < 1e-9) {
            continue;
        }
        const Vec3 vr(-dets[i].v_r, -dets[j].v_r, -dets[k].v_r);
        const Vec3 hyp = d.partialPivLu().solve(vr);

        std::vector<std::size_t> inliers;
        double rss = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double r = dets[m].v_r + dets[m].dir.dot(hyp);
            if (std::abs(r) <= threshold) {
                inliers.push_back(m);
                rss += r * r;
            }
        }
        if (inliers.size() < 3) {
            continue;
        }
        const double rms = std::sqrt(rss / static_cast<double>(inliers.size()));
        if (inliers.size() > best_inliers.size() ||
            (inliers.size() == best_inliers.size() && rms < best_rms)) {
            best_inliers = std::move(inliers);
            best_rms = rms;
        }
    }

    if (best_inliers.size() < 3) {
        throw NoConsensus("ransac_velocity: no consensus set of size >= 3");
    }

    std::vector<RadarDetection> subset;
    subset.reserve(best_inliers.size());
    for (const std::size_t idx : best_inliers) {
        subset.push_back(dets[idx]);
    }
    DopplerFit fit = ls_velocity(subset);
    fit.inliers = best_inliers;
    return fit;
}

VelocityMeasurement to_measurement(const DopplerFit& fit, double t, const Extrinsics& ex,
                                   const UnitQuaternion& attitude) {
    const Mat3 r_world_radar = geom::quat_to_rot(attitude) * geom::quat_to_rot(ex.q_RI);
    VelocityMeasurement m;
    m.t = t;
    m.v_m = r_world_radar * fit.v;
    m.sigma_m = r_world_radar * fit.sigma * r_world_radar.transpose();
    return m;
}

}  // namespace egofuse::doppler
