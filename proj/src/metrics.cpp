#include "egofuse/metrics.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <boost/math/distributions/chi_squared.hpp>

#include "egofuse/errors.hpp"

namespace egofuse::metrics {

Metrics compute_metrics(const std::vector<VelocitySample>& est,
                        const std::vector<VelocitySample>& gt) {
    Metrics m;
    std::size_t j = 0;
    for (const auto& e : est) {
        while (j < gt.size() && gt[j].t < e.t - 1e-9) {
            ++j;
        }
        if (j >= gt.size()) {
            break;
        }
        if (std::abs(gt[j].t - e.t) > 1e-9) {
            throw TimestampMismatch("compute_metrics: no ground-truth sample at t=" +
                                    std::to_string(e.t));
        }
        const Vec3 err = e.v - gt[j].v;
        m.mse += err.cwiseProduct(err);
        m.mae += err.cwiseAbs();
        ++m.n;
        ++j;
    }
    if (m.n == 0) {
        throw InputError("compute_metrics: empty overlap between series");
    }
    m.mse /= static_cast<double>(m.n);
    m.mae /= static_cast<double>(m.n);
    return m;
}

double run_nees(const std::vector<NeesSample>& samples) {
    if (samples.empty()) {
        throw InputError("run_nees: empty sample list");
    }
    double acc = 0.0;
    for (const auto& s : samples) {
        Eigen::LLT<Mat3> llt(s.P_vv);
        if (llt.info() != Eigen::Success) {
            throw NumericError("run_nees: singular velocity covariance at t=" +
                               std::to_string(s.t));
        }
        acc += s.error.dot(llt.solve(s.error));
    }
    return acc / static_cast<double>(samples.size());
}

std::pair<double, double> chi2_mean_bounds(std::size_t n_runs, int dof) {
    const boost::math::chi_squared dist(static_cast<double>(n_runs) * dof);
    const double n = static_cast<double>(n_runs);
    return {boost::math::quantile(dist, 0.025) / n, boost::math::quantile(dist, 0.975) / n};
}

ConsistencyStats aggregate_nees(const std::vector<double>& per_run_nees,
                                const std::vector<double>& per_run_nis) {
    if (per_run_nees.empty()) {
        throw InputError("aggregate_nees: no runs");
    }
    ConsistencyStats stats;
    stats.n_runs = per_run_nees.size();
    for (const double v : per_run_nees) {
        stats.mean_nees += v;
    }
    stats.mean_nees /= static_cast<double>(stats.n_runs);
    if (!per_run_nis.empty()) {
        for (const double v : per_run_nis) {
            stats.mean_nis += v;
        }
        stats.mean_nis /= static_cast<double>(per_run_nis.size());
    }
    std::tie(stats.chi2_lo, stats.chi2_hi) = chi2_mean_bounds(stats.n_runs, 3);
    return stats;
}

}  // namespace egofuse::metrics
