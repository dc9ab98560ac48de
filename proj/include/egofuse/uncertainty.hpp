#pragma once

#include <array>
#include <complex>
#include <vector>

#include "egofuse/geom.hpp"

namespace egofuse::uncertainty {

using geom::Mat3;
using geom::Vec3;

/// Six parameters of a lower-triangular Cholesky factor:
/// [d1, d2, d3] are log-diagonals, [o21, o31, o32] the off-diagonals.
using CovParams6 = std::array<double, 6>;

struct LossConfig {
    double lambda1{0.01};  // diagonal regularization coefficient
    double epsilon{1e-6};  // stability constant added to diag(Σ)
};

struct LossBreakdown {
    double nll{0.0};
    double diag_reg{0.0};
    double total{0.0};
};

/// Σ = L Lᵀ with diag(L) = exp(d_i); SPD for any finite parameters.
Mat3 construct_covariance(const CovParams6& p);

/// Gaussian NLL ½log|Σ'| + ½(y-ŷ)ᵀΣ'⁻¹(y-ŷ) with Σ' = Σ + ε·I.
double nll_loss(const Vec3& y, const Vec3& y_hat, const Mat3& sigma, const LossConfig& cfg);

/// Gradient of nll_loss with respect to ŷ: Σ'⁻¹(ŷ - y).
Vec3 nll_grad_y_hat(const Vec3& y, const Vec3& y_hat, const Mat3& sigma, const LossConfig& cfg);

/// λ₁ · mean(1 / (diag(Σ) + ε)); penalizes vanishing variances.
double diag_regularizer(const Mat3& sigma, const LossConfig& cfg);

LossBreakdown total_loss(const Vec3& y, const Vec3& y_hat, const CovParams6& p,
                         const LossConfig& cfg);

/// Min-Max normalization of a complex tensor: real and imaginary parts are
/// each affinely mapped to [0,1] by their global min/max; a degenerate part
/// (max == min) maps to all zeros.
std::vector<std::complex<double>> minmax_normalize(
    const std::vector<std::complex<double>>& values);

}  // namespace egofuse::uncertainty
