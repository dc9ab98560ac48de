#include "egofuse/uncertainty.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "egofuse/errors.hpp"

namespace egofuse::uncertainty {

Mat3 construct_covariance(const CovParams6& p) {
    Mat3 l = Mat3::Zero();
    l(0, 0) = std::exp(p[0]);
    l(1, 1) = std::exp(p[1]);
    l(2, 2) = std::exp(p[2]);
    l(1, 0) = p[3];  // o21
    l(2, 0) = p[4];  // o31
    l(2, 1) = p[5];  // o32
    return l * l.transpose();
}

namespace {

Eigen::LLT<Mat3> stabilized_llt(const Mat3& sigma, const LossConfig& cfg) {
    const Mat3 s = sigma + cfg.epsilon * Mat3::Identity();
    Eigen::LLT<Mat3> llt(s);
    if (llt.info() != Eigen::Success) {
        throw NotSPD("nll_loss: covariance is not SPD even after adding epsilon");
    }
    return llt;
}

}  // namespace

double nll_loss(const Vec3& y, const Vec3& y_hat, const Mat3& sigma, const LossConfig& cfg) {
    const auto llt = stabilized_llt(sigma, cfg);
    const Mat3 l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Vec3 r = y - y_hat;
    return 0.5 * log_det + 0.5 * r.dot(llt.solve(r));
}

Vec3 nll_grad_y_hat(const Vec3& y, const Vec3& y_hat, const Mat3& sigma,
                    const LossConfig& cfg) {
    const auto llt = stabilized_llt(sigma, cfg);
    return llt.solve(y_hat - y);
}

double diag_regularizer(const Mat3& sigma, const LossConfig& cfg) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        acc += 1.0 / (sigma(i, i) + cfg.epsilon);
    }
    return cfg.lambda1 * acc / 3.0;
}

LossBreakdown total_loss(const Vec3& y, const Vec3& y_hat, const CovParams6& p,
                         const LossConfig& cfg) {
    const Mat3 sigma = construct_covariance(p);
    LossBreakdown out;
    out.nll = nll_loss(y, y_hat, sigma, cfg);
    out.diag_reg = diag_regularizer(sigma, cfg);
    out.total = out.nll + out.diag_reg;
    return out;
}

std::vector<std::complex<double>> minmax_normalize(
    const std::vector<std::complex<double>>& values) {
    double re_min = std::numeric_limits<double>::infinity();
    double re_max = -re_min;
    double im_min = re_min;
    double im_max = -re_min;
    for (const auto& v : values) {
        re_min = std::min(re_min, v.real());
        re_max = std::max(re_max, v.real());
        im_min = std::min(im_min, v.imag());
        im_max = std::max(im_max, v.imag());
    }
    const double re_span = re_max - re_min;
    const double im_span = im_max - im_min;

    std::vector<std::complex<double>> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        const double re = re_span > 0.0 ? (v.real() - re_min) / re_span : 0.0;
        const double im = im_span > 0.0 ? (v.imag() - im_min) / im_span : 0.0;
        out.emplace_back(re, im);
    }
    return out;
}

}  // namespace egofuse::uncertainty
