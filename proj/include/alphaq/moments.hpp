#pragma once

// Analytic moment formulas used both inside the covariance plug-in and as
// independent oracles: even Student-t moments, the Gauss hypergeometric
// factor Lambda_{m,v}, the P_m polynomials, exact finite-v Gaussian pair
// variances, and the leading Gaussian cross-covariances.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "alphaq/errors.hpp"

namespace alphaq {

// E(U^a) for U ~ t_v, a in {2,4,6}. Undefined unless v > a.
inline double student_even_moment(int a, int v) {
    if (a != 2 && a != 4 && a != 6)
        throw DomainError("student_even_moment: a must be 2, 4 or 6");
    if (v <= a)
        throw MomentUndefined("student_even_moment: requires v > a, got v=" + std::to_string(v));
    const double dv = static_cast<double>(v);
    switch (a) {
        case 2: return dv / (dv - 2.0);
        case 4: return 3.0 * dv * dv / ((dv - 2.0) * (dv - 4.0));
        default: return 15.0 * dv * dv * dv / ((dv - 2.0) * (dv - 4.0) * (dv - 6.0));
    }
}

// 2F1(m, m; c; u) for small integer m by direct series summation. The
// parameter regime here (m in {1,2,3}, c > 0, 0 <= u < 1) keeps every term
// positive, so plain term-ratio stopping is reliable: stop once the next
// term falls below 1e-16 of the partial sum.
inline double gauss_2f1_mm(int m, double c, double u) {
    if (m < 1 || m > 3)
        throw DomainError("gauss_2f1_mm: m must be 1, 2 or 3");
    if (c <= 0.0)
        throw DomainError("gauss_2f1_mm: c must be positive");
    if (u < 0.0)
        throw DomainError("gauss_2f1_mm: u must be nonnegative");
    if (u >= 1.0)
        throw Nonconvergent("gauss_2f1_mm: series diverges for u >= 1");
    if (c - 2.0 * m <= 0.0 && u > 1.0 - 1e-6)
        throw Overflow("gauss_2f1_mm: c - 2m <= 0 with u near 1");

    double sum = 1.0;
    double term = 1.0;
    const double dm = static_cast<double>(m);
    for (long k = 0; k < 2000000; ++k) {
        const double dk = static_cast<double>(k);
        term *= (dm + dk) * (dm + dk) / ((c + dk) * (dk + 1.0)) * u;
        sum += term;
        if (term < 1e-16 * sum) return sum;
    }
    throw Nonconvergent("gauss_2f1_mm: series failed to converge");
}

// Lambda_{m,v}(u) = (v/2)^{2m} Gamma(v/2-m)^2 / Gamma(v/2)^2 * 2F1(m,m;v/2;u).
// At u = 1 the Gauss summation gives the closed form (v/2)^{2m}
// Gamma(v/2-2m)/Gamma(v/2), valid for v > 4m. Gamma ratios go through
// lgamma so v up to 1e6 stays in range.
inline double lambda_mv(int m, int v, double u) {
    if (m < 1 || m > 3)
        throw DomainError("lambda_mv: m must be 1, 2 or 3");
    if (v <= 2 * m)
        throw MomentUndefined("lambda_mv: requires v > 2m, got v=" + std::to_string(v));
    if (u < 0.0 || u > 1.0)
        throw DomainError("lambda_mv: u must lie in [0, 1]");
    const double c = 0.5 * v;
    if (u == 1.0) {
        if (v <= 4 * m)
            throw Nonconvergent("lambda_mv: u = 1 requires v > 4m");
        return std::exp(2.0 * m * std::log(c) + std::lgamma(c - 2.0 * m) - std::lgamma(c));
    }
    const double prefactor =
        std::exp(2.0 * m * std::log(c) + 2.0 * (std::lgamma(c - m) - std::lgamma(c)));
    return prefactor * gauss_2f1_mm(m, c, u);
}

// P_1, P_2, P_3 polynomials of the exact Gaussian pair variance.
inline double pm_polynomial(int m, double rho) {
    const double r2 = rho * rho;
    switch (m) {
        case 1: return 1.0 + 2.0 * r2;
        case 2: return 9.0 + (72.0 + 24.0 * r2) * r2;
        case 3: return 225.0 + (4050.0 + (5400.0 + 720.0 * r2) * r2) * r2;
        default: throw DomainError("pm_polynomial: m must be 1, 2 or 3");
    }
}

// Leading Gaussian covariance of centered even powers: for jointly standard
// normal (Y1, Y2) with correlation rho, Cov(Y1^a - mu_a, Y2^b - mu_b).
inline double gaussian_cross_cov(int a, int b, double rho) {
    if ((a != 2 && a != 4 && a != 6) || (b != 2 && b != 4 && b != 6))
        throw DomainError("gaussian_cross_cov: powers must be 2, 4 or 6");
    if (std::abs(rho) > 1.0)
        throw DomainError("gaussian_cross_cov: |rho| must not exceed 1");
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    const double r2 = rho * rho;
    if (lo == 2 && hi == 2) return 2.0 * r2;
    if (lo == 2 && hi == 4) return 12.0 * r2;
    if (lo == 2 && hi == 6) return 90.0 * r2;
    if (lo == 4 && hi == 4) return (72.0 + 24.0 * r2) * r2;
    if (lo == 4 && hi == 6) return (540.0 + 360.0 * r2) * r2;
    return (4050.0 + (5400.0 + 720.0 * r2) * r2) * r2;
}

// Exact finite-v variance of the even-power statistic under joint Gaussian
// errors with correlation matrix R:
//   (1/N) sum_{i,j} { P_m(r_ij) Lambda_{m,v}(r_ij^2) - mu_{2m,v}^2 }.
// Serves as the oracle the plug-in covariance is checked against.
inline double exact_gaussian_var_q(const Eigen::MatrixXd& R, int v, int a) {
    if (a != 2 && a != 4 && a != 6)
        throw DomainError("exact_gaussian_var_q: a must be 2, 4 or 6");
    if (v <= 12)
        throw MomentUndefined("exact_gaussian_var_q: requires v > 12");
    const Eigen::Index n = R.rows();
    if (R.cols() != n || n < 1)
        throw InvalidCorrelation("exact_gaussian_var_q: R must be square and nonempty");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(R(i, i) - 1.0) > 1e-12)
            throw InvalidCorrelation("exact_gaussian_var_q: diagonal of R must be 1");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(R(i, j)) > 1.0 + 1e-12)
                throw InvalidCorrelation("exact_gaussian_var_q: |r_ij| must not exceed 1");
            if (std::abs(R(i, j) - R(j, i)) > 1e-10)
                throw InvalidCorrelation("exact_gaussian_var_q: R must be symmetric");
        }
    }
    const int m = a / 2;
    const double mu = student_even_moment(a, v);
    const double mu2 = mu * mu;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = std::min(1.0, std::max(-1.0, R(i, j)));
            sum += pm_polynomial(m, r) * lambda_mv(m, v, r * r) - mu2;
        }
    }
    return sum / static_cast<double>(n);
}

// Standard normal CDF, full double accuracy via erfc.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

namespace detail {

// Rational initial guess for the normal quantile (Acklam), accurate to
// about 1e-9; refined below to machine precision.
inline double normal_quantile_guess(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

// Inverse standard normal CDF. Rational guess plus Halley refinement against
// the erfc-based CDF; round trip |normal_cdf(normal_quantile(p)) - p| stays
// below 1e-12 across [1e-15, 1 - 1e-15].
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normal_quantile: p must lie strictly inside (0, 1)");
    const bool upper = p > 0.5;
    const double pl = upper ? 1.0 - p : p;
    double x = detail::normal_quantile_guess(pl);
    for (int i = 0; i < 2; ++i) {
        const double e = normal_cdf(x) - pl;
        const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return upper ? -x : x;
}

} // namespace alphaq
