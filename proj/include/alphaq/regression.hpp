#pragma once

// Per-asset time-series OLS of excess returns on observed factors. The
// augmented design X = [1_T, F] is factored once per panel via SVD and every
// asset reuses the orthonormal basis, giving alphas, studentized alpha
// statistics and residuals without ever forming a T x T projector.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "alphaq/errors.hpp"
#include "alphaq/panel.hpp"

namespace alphaq {

struct RegressionFit {
    Eigen::VectorXd alpha_hat;   // length N, return units
    Eigen::VectorXd sigma2_hat;  // length N, strictly positive
    Eigen::VectorXd t_stats;     // length N, dimensionless
    Eigen::MatrixXd residuals;   // N x T, return units
    double w_T = 0.0;            // 1' M_F 1
    int v = 0;                   // T - p - 1
};

namespace detail {

// Thin orthonormal basis of the column space of A, with the relative rank
// test on singular values. Throws SingularDesign when the smallest singular
// value falls below 1e-10 times the largest.
inline Eigen::MatrixXd column_space_basis(const Eigen::MatrixXd& A, const std::string& what) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(s.size() - 1) > 1e-10 * s(0))) {
        throw SingularDesign(what + " is numerically rank deficient");
    }
    return svd.matrixU();
}

} // namespace detail

// b = M_F 1_T / sqrt(w_T) with w_T = 1_T' M_F 1_T. The returned b has unit
// Euclidean norm by construction.
inline std::pair<Eigen::VectorXd, double> residual_weight_vector(const FactorPanel& factors) {
    factors.validate();
    const Eigen::Index T = factors.values.rows();
    const Eigen::MatrixXd UF = detail::column_space_basis(factors.values, "factor matrix");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(T);
    Eigen::VectorXd mf1 = ones - UF * (UF.transpose() * ones);
    const double w_T = mf1.squaredNorm(); // M_F idempotent: 1'M_F 1 = ||M_F 1||^2
    if (!(w_T > 1e-12 * static_cast<double>(T))) {
        throw DegenerateIntercept("intercept column lies in the factor span (w_T ~ 0)");
    }
    mf1 /= std::sqrt(w_T);
    return {mf1, w_T};
}

inline RegressionFit fit(const ReturnPanel& panel, const FactorPanel& factors) {
    panel.validate();
    factors.validate();
    const Eigen::Index N = panel.values.rows();
    const Eigen::Index T = panel.values.cols();
    const Eigen::Index p = factors.values.cols();
    if (factors.values.rows() != T) {
        throw DimensionMismatch("return panel has " + std::to_string(T) +
                                " periods but factor panel has " +
                                std::to_string(factors.values.rows()));
    }

    // Ensure F alone is full rank (a degenerate factor column should be
    // reported as a design fault, not masked by the augmented solve), then
    // factor the augmented design.
    const auto [b_vec, w_T] = residual_weight_vector(factors);
    (void)b_vec;

    Eigen::MatrixXd X(T, p + 1);
    X.col(0).setOnes();
    X.rightCols(p) = factors.values;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-10 * s(0))) {
        throw SingularDesign("augmented design [1, F] is numerically rank deficient");
    }

    // Yt = U C + residuals, coefficients recovered as V S^-1 C.
    const Eigen::MatrixXd Yt = panel.values.transpose();       // T x N
    const Eigen::MatrixXd U = svd.matrixU();                   // T x (p+1)
    const Eigen::MatrixXd C = U.transpose() * Yt;              // (p+1) x N
    const Eigen::MatrixXd Et = Yt - U * C;                     // T x N
    const Eigen::MatrixXd coefs =
        svd.matrixV() * s.cwiseInverse().asDiagonal() * C;     // (p+1) x N

    RegressionFit out;
    out.w_T = w_T;
    out.v = static_cast<int>(T - p - 1);
    out.alpha_hat = coefs.row(0).transpose();
    out.residuals = Et.transpose();
    out.sigma2_hat = Et.colwise().squaredNorm().transpose() / static_cast<double>(out.v);
    for (Eigen::Index i = 0; i < N; ++i) {
        if (!(out.sigma2_hat(i) > 1e-14)) {
            throw ZeroResidualVariance("asset " + panel.asset_ids[static_cast<std::size_t>(i)] +
                                       " has (near-)zero residual variance");
        }
    }
    out.t_stats = std::sqrt(w_T) * out.alpha_hat.cwiseQuotient(out.sigma2_hat.cwiseSqrt());
    return out;
}

} // namespace alphaq
