#pragma once

// Even-power statistics Q_{a,N} for a in {2,4,6}, the thresholded plug-in
// covariance matrix B, standardized tests with normal p-values, the max
// statistic with its Gumbel p-value, and the min-p / Cauchy combinations.
// run_alpha_tests() orchestrates a full report for one panel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "alphaq/errors.hpp"
#include "alphaq/moments.hpp"
#include "alphaq/panel.hpp"
#include "alphaq/regression.hpp"

namespace alphaq {

// Power sums S_2k = N^-1 sum_{i,j} rtilde_{ij}^{2k} of the thresholded
// residual correlation matrix, diagonal included. retained_offdiag counts
// unordered off-diagonal pairs {i,j} that survive the threshold.
struct CorrelationAggregates {
    double s2 = 1.0;
    double s4 = 1.0;
    double s6 = 1.0;
    double s8 = 1.0;
    double tau = 0.0;
    std::int64_t retained_offdiag = 0;
    int n_assets = 0;
};

// Plug-in covariance of (Q_2, Q_4, Q_6) including the 1/v diagonal
// corrections.
struct BMatrix {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero(); // indexed by power (2,4,6)
    int v = 0;

    double b22() const { return m(0, 0); }
    double b24() const { return m(0, 1); }
    double b26() const { return m(0, 2); }
    double b44() const { return m(1, 1); }
    double b46() const { return m(1, 2); }
    double b66() const { return m(2, 2); }
};

struct TestReport {
    double q2 = 0, q4 = 0, q6 = 0;
    double t2 = 0, t4 = 0, t6 = 0;
    double l_inf = 0;
    double m_gumbel = 0;
    double p2 = 1, p4 = 1, p6 = 1, p_inf = 1, p_minp = 1, p_cauchy = 1;
    int n_assets = 0;
    int t_obs = 0;
    int n_factors = 0;
    int v = 0;
    CorrelationAggregates aggregates;
};

struct TestConfig {
    double zeta = 0.05;
    double varrho = 1.0;
};

inline constexpr double kPi = 3.14159265358979323846;

// q_a = N^{-1/2} sum_i (t_i^a - mu_{a,v}).
inline std::tuple<double, double, double> compute_Q(const Eigen::VectorXd& t_stats, int v) {
    if (v <= 6) {
        throw MomentUndefined("compute_Q requires v > 6, got v = " + std::to_string(v));
    }
    const Eigen::Index N = t_stats.size();
    if (N < 1) throw EmptyInput("compute_Q requires at least one t-statistic");
    const double mu2 = student_even_moment(2, v);
    const double mu4 = student_even_moment(4, v);
    const double mu6 = student_even_moment(6, v);
    double q2 = 0, q4 = 0, q6 = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double t2i = t_stats(i) * t_stats(i);
        q2 += t2i - mu2;
        q4 += t2i * t2i - mu4;
        q6 += t2i * t2i * t2i - mu6;
    }
    const double root_n = std::sqrt(static_cast<double>(N));
    return {q2 / root_n, q4 / root_n, q6 / root_n};
}

// Bonferroni-type cutoff tau_N = v^{-1/2} Phi^{-1}(1 - zeta N^{-varrho}/2).
inline double threshold_level(int N, int v, double zeta = 0.05, double varrho = 1.0) {
    if (N < 2) throw DomainError("threshold_level requires N >= 2");
    if (v < 2) throw DomainError("threshold_level requires v >= 2");
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0,1)");
    if (!(varrho >= 0.0)) throw DomainError("varrho must be nonnegative");
    const double half_rate = 0.5 * zeta * std::pow(static_cast<double>(N), -varrho);
    if (half_rate >= 1.0) throw DomainError("zeta N^-varrho / 2 must be below 1");
    return normal_quantile(1.0 - half_rate) / std::sqrt(static_cast<double>(v));
}

// Pairwise residual correlations streamed into the four power sums through
// blocked Gram products; the N x N matrix is never materialized. Off-diagonal
// entries with |r| <= tau are zeroed (strict inequality retains); the
// diagonal contributes exactly 1 to each sum. Accumulation order is fixed by
// the block schedule, so the result is bitwise reproducible.
inline CorrelationAggregates residual_correlation_aggregates(const Eigen::MatrixXd& residuals,
                                                             double tau) {
    const Eigen::Index N = residuals.rows();
    if (N < 1) throw EmptyInput("residual matrix has no rows");

    Eigen::MatrixXd Z = residuals;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double norm = Z.row(i).norm();
        if (!(norm > 1e-14)) {
            throw ZeroResidualVariance("residual row " + std::to_string(i) +
                                       " has (near-)zero norm");
        }
        Z.row(i) /= norm;
    }

    constexpr Eigen::Index kBlock = 256;
    double a2 = 0, a4 = 0, a6 = 0, a8 = 0;
    std::int64_t retained = 0;
    for (Eigen::Index bi = 0; bi < N; bi += kBlock) {
        const Eigen::Index ni = std::min(kBlock, N - bi);
        for (Eigen::Index bj = bi; bj < N; bj += kBlock) {
            const Eigen::Index nj = std::min(kBlock, N - bj);
            const Eigen::MatrixXd G =
                Z.middleRows(bi, ni) * Z.middleRows(bj, nj).transpose();
            for (Eigen::Index i = 0; i < ni; ++i) {
                const Eigen::Index j0 = (bi == bj) ? i + 1 : 0;
                for (Eigen::Index j = j0; j < nj; ++j) {
                    const double r = std::clamp(G(i, j), -1.0, 1.0);
                    if (std::abs(r) > tau) {
                        const double r2 = r * r;
                        const double r4 = r2 * r2;
                        a2 += r2;
                        a4 += r4;
                        a6 += r4 * r2;
                        a8 += r4 * r4;
                        ++retained;
                    }
                }
            }
        }
    }

    CorrelationAggregates agg;
    const double n = static_cast<double>(N);
    agg.s2 = (n + 2.0 * a2) / n;
    agg.s4 = (n + 2.0 * a4) / n;
    agg.s6 = (n + 2.0 * a6) / n;
    agg.s8 = (n + 2.0 * a8) / n;
    agg.tau = tau;
    agg.retained_offdiag = retained;
    agg.n_assets = static_cast<int>(N);
    return agg;
}

inline BMatrix build_B(const CorrelationAggregates& agg, int v) {
    if (v <= 12) {
        throw MomentUndefined("build_B requires v > 12, got v = " + std::to_string(v));
    }
    const double s2 = agg.s2, s4 = agg.s4, s6 = agg.s6, s8 = agg.s8;
    const double dv = static_cast<double>(v);
    BMatrix B;
    B.v = v;
    B.m(0, 0) = 2.0 * s2 + (10.0 * s2 + 4.0 * s4) / dv;
    B.m(0, 1) = 12.0 * s2;
    B.m(0, 2) = 90.0 * s2;
    B.m(1, 1) = 72.0 * s2 + 24.0 * s4 + (936.0 * s2 + 864.0 * s4 + 192.0 * s6) / dv;
    B.m(1, 2) = 540.0 * s2 + 360.0 * s4;
    B.m(2, 2) = 4050.0 * s2 + 5400.0 * s4 + 720.0 * s6 +
                (101250.0 * s2 + 202500.0 * s4 + 114480.0 * s6 + 12960.0 * s8) / dv;
    B.m(1, 0) = B.m(0, 1);
    B.m(2, 0) = B.m(0, 2);
    B.m(2, 1) = B.m(1, 2);
    return B;
}

// T_a = Q_a / sqrt(B_aa) with one-sided upper-tail p-values.
inline std::pair<std::array<double, 3>, std::array<double, 3>>
standardize(const std::tuple<double, double, double>& q, const BMatrix& B) {
    const std::array<double, 3> qs = {std::get<0>(q), std::get<1>(q), std::get<2>(q)};
    std::array<double, 3> t{}, p{};
    for (int k = 0; k < 3; ++k) {
        const double baa = B.m(k, k);
        if (!(baa > 0.0)) {
            throw NonpositiveVariance("B diagonal entry " + std::to_string(2 * (k + 1)) +
                                      " is not positive");
        }
        t[static_cast<std::size_t>(k)] = qs[static_cast<std::size_t>(k)] / std::sqrt(baa);
        p[static_cast<std::size_t>(k)] = 1.0 - normal_cdf(t[static_cast<std::size_t>(k)]);
    }
    return {t, p};
}

// L_inf = max t_i^2, M = L_inf - 2 log N + log log N, Gumbel-type p-value
// 1 - exp(-pi^{-1/2} e^{-M/2}).
inline std::tuple<double, double, double> max_test(const Eigen::VectorXd& t_stats) {
    const Eigen::Index N = t_stats.size();
    if (N < 3) throw TooFewAssets("max test requires at least 3 assets");
    const double l_inf = t_stats.array().square().maxCoeff();
    const double n = static_cast<double>(N);
    const double m = l_inf - 2.0 * std::log(n) + std::log(std::log(n));
    const double p = 1.0 - std::exp(-std::exp(-0.5 * m) / std::sqrt(kPi));
    return {l_inf, m, p};
}

// Equal-weight Cauchy combination: T_C = K^-1 sum tan(pi (1/2 - p_a)),
// combined p = 1/2 - arctan(T_C)/pi. Inputs are clamped away from {0,1}.
inline std::pair<double, double> cauchy_combination(const std::vector<double>& p_values) {
    if (p_values.empty()) throw EmptyInput("cauchy_combination needs at least one p-value");
    double acc = 0.0;
    for (double p : p_values) {
        const double pc = std::clamp(p, 1e-15, 1.0 - 1e-15);
        acc += std::tan(kPi * (0.5 - pc));
    }
    const double t_c = acc / static_cast<double>(p_values.size());
    return {t_c, 0.5 - std::atan(t_c) / kPi};
}

// Min-p rule over {p_2, p_inf}: the two components are asymptotically
// independent, so the minimum has the closed-form null law 1 - (1 - p)^2.
inline double minp_combination(double p2, double p_inf) {
    const double pmin = std::min(p2, p_inf);
    return 1.0 - (1.0 - pmin) * (1.0 - pmin);
}

inline TestReport run_alpha_tests(const ReturnPanel& panel, const FactorPanel& factors,
                                  const TestConfig& config = {}) {
    const RegressionFit reg = fit(panel, factors);
    const int N = static_cast<int>(panel.values.rows());

    TestReport rep;
    rep.n_assets = N;
    rep.t_obs = static_cast<int>(panel.values.cols());
    rep.n_factors = static_cast<int>(factors.values.cols());
    rep.v = reg.v;

    const auto q = compute_Q(reg.t_stats, reg.v);
    std::tie(rep.q2, rep.q4, rep.q6) = q;

    const double tau = threshold_level(N, reg.v, config.zeta, config.varrho);
    rep.aggregates = residual_correlation_aggregates(reg.residuals, tau);
    const BMatrix B = build_B(rep.aggregates, reg.v);

    const auto [t, p] = standardize(q, B);
    rep.t2 = t[0];
    rep.t4 = t[1];
    rep.t6 = t[2];
    rep.p2 = p[0];
    rep.p4 = p[1];
    rep.p6 = p[2];

    std::tie(rep.l_inf, rep.m_gumbel, rep.p_inf) = max_test(reg.t_stats);
    rep.p_minp = minp_combination(rep.p2, rep.p_inf);
    rep.p_cauchy = cauchy_combination({rep.p2, rep.p4, rep.p6, rep.p_inf}).second;
    return rep;
}

} // namespace alphaq
