#pragma once

// Self-contained oracle suite for the analytic layer: Student moments, the
// hypergeometric factor, the P_m polynomials, Hermite cross-covariances
// checked against 2-D Gauss-Hermite quadrature, and the normal CDF/quantile
// pair. The CLI `validate` subcommand prints one line per check; the test
// suite reuses the same implementations.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "alphaq/moments.hpp"
#include "alphaq/statistics.hpp"

namespace alphaq {

// Nodes and weights for expectation against the standard normal density
// (probabilists' Gauss-Hermite), via the Golub-Welsch eigenvalue method.
// Weights sum to 1; n nodes integrate polynomials up to degree 2n-1 exactly.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_probabilists(int n) {
    if (n < 1) throw DomainError("quadrature needs at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k) / 2.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(J);
    if (eigen.info() != Eigen::Success) throw Nonconvergent("Gauss-Hermite eigensolve failed");
    Eigen::VectorXd nodes = std::sqrt(2.0) * eigen.eigenvalues();
    Eigen::VectorXd weights(n);
    for (int k = 0; k < n; ++k) {
        const double v0 = eigen.eigenvectors()(0, k);
        weights(k) = v0 * v0;
    }
    return {nodes, weights};
}

// Cov(Y1^a - mu_a, Y2^b - mu_b) for standard bivariate normal (correlation
// rho) by tensor-product quadrature over Y1 and the innovation of Y2.
inline double hermite_cov_quadrature(int a, int b, double rho, int n_nodes = 64) {
    if ((a != 2 && a != 4 && a != 6) || (b != 2 && b != 4 && b != 6)) {
        throw DomainError("powers must be 2, 4, or 6");
    }
    const auto [x, w] = gauss_hermite_probabilists(n_nodes);
    const double s = std::sqrt(1.0 - rho * rho);
    auto normal_even_moment = [](int q) { return q == 2 ? 1.0 : (q == 4 ? 3.0 : 15.0); };
    double exy = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        const double y1 = x(i);
        const double y1a = std::pow(y1, a);
        double inner = 0.0;
        for (int j = 0; j < n_nodes; ++j) {
            const double y2 = rho * y1 + s * x(j);
            inner += w(j) * std::pow(y2, b);
        }
        exy += w(i) * y1a * inner;
    }
    return exy - normal_even_moment(a) * normal_even_moment(b);
}

// Plain partial sum of the 2F1(m, m; c; u) series, as an independent
// cross-check on the adaptive series evaluator.
inline double gauss_2f1_bruteforce(int m, double c, double u, int n_terms = 10000) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < n_terms; ++k) {
        const double dk = static_cast<double>(k);
        const double num = (static_cast<double>(m) + dk);
        term *= num * num / ((c + dk) * (dk + 1.0)) * u;
        sum += term;
    }
    return sum;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline void push_check(std::vector<CheckResult>& out, const std::string& name, double got,
                       double expected, double tol, bool relative) {
    const double err = relative ? std::abs(got / expected - 1.0) : std::abs(got - expected);
    CheckResult result;
    result.name = name;
    result.passed = err <= tol;
    result.detail = "got " + std::to_string(got) + ", expected " + std::to_string(expected) +
                    (relative ? " (rel err " : " (abs err ") + std::to_string(err) + ")";
    out.push_back(std::move(result));
}

} // namespace detail

// The oracle suite behind `validate`. Every check is analytic or quadrature
// based and completes in seconds.
inline std::vector<CheckResult> run_selfchecks() {
    std::vector<CheckResult> out;

    // Student even moments at v = 12 (exact rationals).
    detail::push_check(out, "student_even_moment(2,12)", student_even_moment(2, 12), 1.2,
                       1e-12, false);
    detail::push_check(out, "student_even_moment(4,12)", student_even_moment(4, 12), 5.4,
                       1e-12, false);
    detail::push_check(out, "student_even_moment(6,12)", student_even_moment(6, 12), 54.0,
                       1e-12, false);

    // Hypergeometric series against independent evaluations.
    detail::push_check(out, "2F1(1,1;5;0)", gauss_2f1_mm(1, 5.0, 0.0), 1.0, 1e-15, false);
    detail::push_check(out, "2F1(1,1;6;u->1) Gauss limit", gauss_2f1_mm(1, 6.0, 0.999999),
                       1.25, 1e-3, false);
    detail::push_check(out, "2F1(2,2;10;0.25) vs brute force", gauss_2f1_mm(2, 10.0, 0.25),
                       gauss_2f1_bruteforce(2, 10.0, 0.25), 1e-10, true);

    // Lambda identities.
    detail::push_check(out, "lambda(1,10,0) = (5/4)^2", lambda_mv(1, 10, 0.0), 25.0 / 16.0,
                       1e-12, false);
    detail::push_check(out, "lambda(1,10,1) = 25/12", lambda_mv(1, 10, 1.0), 25.0 / 12.0,
                       1e-12, true);
    detail::push_check(out, "lambda(2,20,0) = (25/18)^2", lambda_mv(2, 20, 0.0),
                       (25.0 / 18.0) * (25.0 / 18.0), 1e-12, true);
    {
        bool monotone = true;
        for (int m = 1; m <= 3 && monotone; ++m) {
            for (int v : {14, 20, 30, 60}) {
                double prev = lambda_mv(m, v, 0.0);
                for (int g = 1; g <= 20; ++g) {
                    const double cur = lambda_mv(m, v, 0.999 * g / 20.0);
                    if (!(cur > prev)) {
                        monotone = false;
                        break;
                    }
                    prev = cur;
                }
            }
        }
        out.push_back({"lambda monotone increasing in u", monotone,
                       monotone ? "grid check passed" : "violation found"});
    }

    // P_m polynomials.
    detail::push_check(out, "P_1(0)", pm_polynomial(1, 0.0), 1.0, 1e-15, false);
    detail::push_check(out, "P_2(1) = 105", pm_polynomial(2, 1.0), 105.0, 1e-12, false);
    detail::push_check(out, "P_3(0) = 225", pm_polynomial(3, 0.0), 225.0, 1e-12, false);

    // Hermite cross-covariances against 2-D Gauss-Hermite quadrature.
    static constexpr std::pair<int, int> kPairs[] = {{2, 2}, {2, 4}, {2, 6},
                                                     {4, 4}, {4, 6}, {6, 6}};
    for (const auto& [a, b] : kPairs) {
        for (const double rho : {0.0, 0.25, 0.5, 0.9}) {
            const double poly = gaussian_cross_cov(a, b, rho);
            const double quad = hermite_cov_quadrature(a, b, rho);
            const std::string name = "cross_cov(" + std::to_string(a) + "," + std::to_string(b) +
                                     ",rho=" + std::to_string(rho) + ") vs quadrature";
            if (poly == 0.0) {
                detail::push_check(out, name, quad, 0.0, 1e-8, false);
            } else {
                detail::push_check(out, name, quad, poly, 1e-8, true);
            }
        }
    }

    // Exact variance consistency chain at N = 1.
    for (const int v : {14, 20, 30, 60}) {
        for (const int m : {1, 2, 3}) {
            const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(1, 1);
            const double direct = exact_gaussian_var_q(I1, v, 2 * m);
            const double mu = student_even_moment(2 * m, v);
            const double composed = pm_polynomial(m, 1.0) * lambda_mv(m, v, 1.0) - mu * mu;
            detail::push_check(out,
                               "exact var chain (v=" + std::to_string(v) +
                                   ", a=" + std::to_string(2 * m) + ")",
                               direct, composed, 1e-10, true);
        }
    }

    // Identity-case covariance constants with the 1/v corrections suppressed.
    {
        CorrelationAggregates unit;
        unit.s2 = unit.s4 = unit.s6 = unit.s8 = 1.0;
        const BMatrix B = build_B(unit, 100000000);
        detail::push_check(out, "B22 identity limit", B.b22(), 2.0, 1e-5, true);
        detail::push_check(out, "B44 identity limit", B.b44(), 96.0, 1e-5, true);
        detail::push_check(out, "B66 identity limit", B.b66(), 10170.0, 1e-5, true);
    }

    // Normal CDF / quantile pair.
    detail::push_check(out, "normal_cdf(0)", normal_cdf(0.0), 0.5, 1e-15, false);
    detail::push_check(out, "normal_quantile(0.975)", normal_quantile(0.975), 1.959963984540054,
                       1e-9, false);
    detail::push_check(out, "normal_cdf(-8) tail", normal_cdf(-8.0), 6.220960574271786e-16,
                       0.01, true);
    {
        double worst = 0.0;
        for (const double p : {1e-15, 1e-12, 1e-8, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99,
                               0.9999, 1.0 - 1e-8, 1.0 - 1e-12}) {
            worst = std::max(worst, std::abs(normal_cdf(normal_quantile(p)) - p));
        }
        out.push_back({"quantile/CDF round trip", worst <= 1e-12,
                       "worst |cdf(quantile(p)) - p| = " + std::to_string(worst)});
    }

    return out;
}

} // namespace alphaq
