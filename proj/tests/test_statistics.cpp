// Statistic layer: the even-power sums, the correlation threshold, the
// streamed aggregate power sums, the plug-in covariance, standardization,
// the max statistic, and the two combination rules. Oracle constants were
// computed independently at 30-digit precision and frozen here.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "alphaq/rng.hpp"
#include "alphaq/statistics.hpp"
#include "support/test_support.hpp"

using namespace alphaq;

TEST_CASE("compute_Q at hand-checkable points") {
    // all-zero t with v = 10: mu = (1.25, 6.25, 78.125), N = 4
    Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    const auto [q2z, q4z, q6z] = compute_Q(z, 10);
    CHECK(q2z == Catch::Approx(-2.5).margin(1e-12));
    CHECK(q4z == Catch::Approx(-12.5).margin(1e-12));
    CHECK(q6z == Catch::Approx(-156.25).margin(1e-12));

    Eigen::VectorXd t(3);
    t << 1.0, -1.0, 2.0;
    const double root3 = std::sqrt(3.0);
    const auto [q2, q4, q6] = compute_Q(t, 10);
    CHECK(q2 == Catch::Approx(2.25 / root3).epsilon(1e-14));
    CHECK(q4 == Catch::Approx(-0.75 / root3).epsilon(1e-13));
    CHECK(q6 == Catch::Approx(-168.375 / root3).epsilon(1e-14));

    // sign flips leave the even powers unchanged
    Eigen::VectorXd t_neg = -t;
    const auto [n2, n4, n6] = compute_Q(t_neg, 10);
    CHECK(n2 == q2);
    CHECK(n4 == q4);
    CHECK(n6 == q6);

    CHECK_THROWS_AS(compute_Q(t, 6), MomentUndefined);
    CHECK_THROWS_AS(compute_Q(Eigen::VectorXd(), 20), EmptyInput);
}

TEST_CASE("threshold level against 30-digit reference values") {
    CHECK(threshold_level(100, 236) ==
          Catch::Approx(0.22657794283568083).epsilon(1e-13));
    CHECK(threshold_level(200, 116) ==
          Catch::Approx(0.34003229817922913).epsilon(1e-13));
    CHECK(threshold_level(50, 40, 0.1, 0.5) ==
          Catch::Approx(0.38795339093501176).epsilon(1e-13));

    // larger N or stricter zeta pushes the cutoff up; larger v pulls it down
    CHECK(threshold_level(400, 116) > threshold_level(200, 116));
    CHECK(threshold_level(200, 116, 0.01) > threshold_level(200, 116, 0.05));
    CHECK(threshold_level(200, 232) < threshold_level(200, 116));

    CHECK_THROWS_AS(threshold_level(1, 116), DomainError);
    CHECK_THROWS_AS(threshold_level(200, 1), DomainError);
    CHECK_THROWS_AS(threshold_level(200, 116, 0.0), DomainError);
    CHECK_THROWS_AS(threshold_level(200, 116, 1.0), DomainError);
    CHECK_THROWS_AS(threshold_level(200, 116, 0.05, -0.5), DomainError);
}

TEST_CASE("aggregates for a two-asset panel with correlation 0.8") {
    // rows u and 0.8u + 0.6w with orthonormal u, w: correlation exactly 0.8
    Eigen::MatrixXd resid(2, 4);
    resid << 1.0, 0.0, 0.0, 0.0,
             0.8, 0.6, 0.0, 0.0;

    const CorrelationAggregates kept = residual_correlation_aggregates(resid, 0.5);
    CHECK(kept.s2 == Catch::Approx(1.64).margin(1e-12));
    CHECK(kept.s4 == Catch::Approx(1.4096).margin(1e-12));
    CHECK(kept.s6 == Catch::Approx(1.262144).margin(1e-12));
    CHECK(kept.s8 == Catch::Approx(1.16777216).margin(1e-12));
    CHECK(kept.retained_offdiag == 1);
    CHECK(kept.n_assets == 2);
    CHECK(kept.tau == 0.5);

    const CorrelationAggregates dropped = residual_correlation_aggregates(resid, 0.9);
    CHECK(dropped.s2 == 1.0);
    CHECK(dropped.s4 == 1.0);
    CHECK(dropped.s6 == 1.0);
    CHECK(dropped.s8 == 1.0);
    CHECK(dropped.retained_offdiag == 0);

    // the comparison is strict: |r| must exceed tau to be retained
    const CorrelationAggregates above = residual_correlation_aggregates(resid, 0.8 + 1e-9);
    CHECK(above.retained_offdiag == 0);
    const CorrelationAggregates below = residual_correlation_aggregates(resid, 0.8 - 1e-9);
    CHECK(below.retained_offdiag == 1);
}

TEST_CASE("aggregates are invariant to row scaling") {
    RngStream rng(201, 0);
    Eigen::MatrixXd resid(6, 20);
    for (int i = 0; i < 6; ++i)
        for (int t = 0; t < 20; ++t) resid(i, t) = rng.normal();
    const CorrelationAggregates a = residual_correlation_aggregates(resid, 0.2);
    Eigen::MatrixXd scaled = resid;
    for (int i = 0; i < 6; ++i) scaled.row(i) *= (i % 2 == 0 ? 1e-6 : 250.0);
    const CorrelationAggregates b = residual_correlation_aggregates(scaled, 0.2);
    CHECK(b.s2 == Catch::Approx(a.s2).epsilon(1e-12));
    CHECK(b.s4 == Catch::Approx(a.s4).epsilon(1e-12));
    CHECK(b.s6 == Catch::Approx(a.s6).epsilon(1e-12));
    CHECK(b.s8 == Catch::Approx(a.s8).epsilon(1e-12));
    CHECK(b.retained_offdiag == a.retained_offdiag);
}

TEST_CASE("blocked aggregation matches a direct O(N^2) loop across block seams") {
    RngStream rng(202, 0);
    const int N = 600, T = 40;  // spans three 256-row blocks
    Eigen::MatrixXd resid(N, T);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < T; ++t) resid(i, t) = rng.normal();
    const double tau = 0.25;
    const CorrelationAggregates agg = residual_correlation_aggregates(resid, tau);

    Eigen::MatrixXd Z = resid;
    for (int i = 0; i < N; ++i) Z.row(i).normalize();
    double s2 = 0, s4 = 0, s6 = 0, s8 = 0;
    long retained = 0;
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            const double r = Z.row(i).dot(Z.row(j));
            if (std::abs(r) > tau) {
                const double r2 = r * r;
                s2 += 2.0 * r2;
                s4 += 2.0 * r2 * r2;
                s6 += 2.0 * r2 * r2 * r2;
                s8 += 2.0 * r2 * r2 * r2 * r2;
                ++retained;
            }
        }
    }
    CHECK(agg.s2 == Catch::Approx((N + s2) / N).epsilon(1e-10));
    CHECK(agg.s4 == Catch::Approx((N + s4) / N).epsilon(1e-10));
    CHECK(agg.s6 == Catch::Approx((N + s6) / N).epsilon(1e-10));
    CHECK(agg.s8 == Catch::Approx((N + s8) / N).epsilon(1e-10));
    CHECK(agg.retained_offdiag == retained);
    CHECK(agg.retained_offdiag > 0);  // tau = 0.25 keeps some pairs at T = 40
}

TEST_CASE("aggregate failure modes") {
    Eigen::MatrixXd with_zero_row(2, 3);
    with_zero_row << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(residual_correlation_aggregates(with_zero_row, 0.1),
                    ZeroResidualVariance);
    CHECK_THROWS_AS(residual_correlation_aggregates(Eigen::MatrixXd(0, 5), 0.1),
                    EmptyInput);
}

TEST_CASE("plug-in covariance entries at s = 1 and its limits") {
    CorrelationAggregates unit;  // s2 = s4 = s6 = s8 = 1
    const BMatrix B = build_B(unit, 100);
    CHECK(B.b22() == Catch::Approx(2.14).margin(1e-12));
    CHECK(B.b24() == Catch::Approx(12.0).margin(1e-12));
    CHECK(B.b26() == Catch::Approx(90.0).margin(1e-12));
    CHECK(B.b44() == Catch::Approx(115.92).margin(1e-12));
    CHECK(B.b46() == Catch::Approx(900.0).margin(1e-12));
    CHECK(B.b66() == Catch::Approx(14481.9).margin(1e-9));
    CHECK(B.m.isApprox(B.m.transpose(), 1e-15));
    CHECK(B.v == 100);

    const BMatrix limit = build_B(unit, 100000000);
    CHECK(limit.b22() == Catch::Approx(2.0).epsilon(1e-5));
    CHECK(limit.b44() == Catch::Approx(96.0).epsilon(1e-5));
    CHECK(limit.b66() == Catch::Approx(10170.0).epsilon(1e-5));

    CHECK_THROWS_AS(build_B(unit, 12), MomentUndefined);
    CHECK_NOTHROW(build_B(unit, 13));
}

TEST_CASE("plug-in covariance is linear in the aggregate power sums") {
    CorrelationAggregates agg;
    agg.s2 = 1.3;
    agg.s4 = 1.1;
    agg.s6 = 1.05;
    agg.s8 = 1.01;
    const int v = 36;
    const BMatrix B = build_B(agg, v);
    const double dv = v;
    CHECK(B.b22() == Catch::Approx(2.0 * 1.3 + (10.0 * 1.3 + 4.0 * 1.1) / dv).epsilon(1e-14));
    CHECK(B.b24() == Catch::Approx(12.0 * 1.3).epsilon(1e-14));
    CHECK(B.b26() == Catch::Approx(90.0 * 1.3).epsilon(1e-14));
    CHECK(B.b44() == Catch::Approx(72.0 * 1.3 + 24.0 * 1.1 +
                                   (936.0 * 1.3 + 864.0 * 1.1 + 192.0 * 1.05) / dv)
                         .epsilon(1e-14));
    CHECK(B.b46() == Catch::Approx(540.0 * 1.3 + 360.0 * 1.1).epsilon(1e-14));
    CHECK(B.b66() == Catch::Approx(4050.0 * 1.3 + 5400.0 * 1.1 + 720.0 * 1.05 +
                                   (101250.0 * 1.3 + 202500.0 * 1.1 + 114480.0 * 1.05 +
                                    12960.0 * 1.01) /
                                       dv)
                         .epsilon(1e-14));
}

TEST_CASE("standardization divides by the diagonal root and takes upper tails") {
    CorrelationAggregates unit;
    BMatrix B = build_B(unit, 100);
    B.m(0, 0) = 4.0;
    B.m(1, 1) = 100.0;
    B.m(2, 2) = 10000.0;
    const auto [t, p] = standardize(std::make_tuple(2.0, -5.0, 0.0), B);
    CHECK(t[0] == Catch::Approx(1.0).margin(1e-15));
    CHECK(t[1] == Catch::Approx(-0.5).margin(1e-15));
    CHECK(t[2] == 0.0);
    CHECK(p[0] == Catch::Approx(0.15865525393145705).epsilon(1e-13));
    CHECK(p[1] == Catch::Approx(0.6914624612740131).epsilon(1e-13));
    CHECK(p[2] == Catch::Approx(0.5).margin(1e-15));

    B.m(1, 1) = 0.0;
    CHECK_THROWS_AS(standardize(std::make_tuple(1.0, 1.0, 1.0), B), NonpositiveVariance);
}

TEST_CASE("max statistic and Gumbel p-value at frozen points") {
    Eigen::VectorXd t(3);
    t << 1.0, -2.0, 3.0;
    const auto [l_inf, m, p] = max_test(t);
    CHECK(l_inf == 9.0);
    CHECK(m == Catch::Approx(6.8968232502804796).epsilon(1e-14));
    CHECK(p == Catch::Approx(0.017779082134166342).epsilon(1e-12));

    Eigen::VectorXd z = Eigen::VectorXd::Zero(100);
    const auto [l0, m0, p0] = max_test(z);
    CHECK(l0 == 0.0);
    CHECK(m0 == Catch::Approx(-7.6831607461682816).epsilon(1e-14));
    CHECK(p0 == Catch::Approx(1.0).margin(1e-11));

    Eigen::VectorXd two(2);
    two << 1.0, 2.0;
    CHECK_THROWS_AS(max_test(two), TooFewAssets);
}

TEST_CASE("Cauchy combination identities") {
    const auto [tc1, p1] = cauchy_combination({0.05});
    CHECK(tc1 == Catch::Approx(6.313751514675043).epsilon(1e-13));
    CHECK(p1 == Catch::Approx(0.05).epsilon(1e-12));

    // symmetric pair cancels to the null midpoint
    const auto [tc2, p2] = cauchy_combination({0.3, 0.7});
    CHECK(tc2 == Catch::Approx(0.0).margin(1e-15));
    CHECK(p2 == Catch::Approx(0.5).margin(1e-15));

    const auto [tc3, p3] = cauchy_combination({0.01, 0.2, 0.3, 0.9});
    CHECK(tc3 == Catch::Approx(7.7114392162688098).epsilon(1e-12));
    CHECK(p3 == Catch::Approx(0.041048552311099227).epsilon(1e-12));

    // degenerate inputs are clamped, never NaN
    const auto [tc4, p4] = cauchy_combination({0.0, 1.0});
    CHECK(std::isfinite(tc4));
    CHECK(p4 > 0.0);
    CHECK(p4 < 1.0);
    const auto [tc5, p5] = cauchy_combination({0.0});
    CHECK(p5 < 1e-12);

    CHECK_THROWS_AS(cauchy_combination({}), EmptyInput);
}

TEST_CASE("min-p combination closed form") {
    CHECK(minp_combination(0.025, 0.9) == Catch::Approx(0.049375).margin(1e-15));
    CHECK(minp_combination(0.9, 0.025) == Catch::Approx(0.049375).margin(1e-15));
    CHECK(minp_combination(0.5, 0.5) == Catch::Approx(0.75).margin(1e-15));
    CHECK(minp_combination(1.0, 1.0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(minp_combination(0.0, 1.0) == Catch::Approx(0.0).margin(1e-15));
    // monotone in the minimum
    CHECK(minp_combination(0.01, 0.5) < minp_combination(0.02, 0.5));
}

TEST_CASE("run_alpha_tests produces a coherent, reproducible report") {
    RngStream rng(203, 0);
    const int N = 60, T = 90, p = 2;
    Eigen::MatrixXd F(T, p), Y(N, T);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < p; ++j) F(t, j) = rng.normal();
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < T; ++t) Y(i, t) = 0.01 * rng.normal();

    ReturnPanel panel;
    panel.values = Y;
    for (int i = 0; i < N; ++i) panel.asset_ids.push_back("A" + std::to_string(1000 + i));
    for (int t = 0; t < T; ++t) panel.time_ids.push_back("M" + std::to_string(100 + t));
    FactorPanel factors;
    factors.values = F;
    factors.factor_names = {"F0", "F1"};

    const TestReport rep = run_alpha_tests(panel, factors);
    CHECK(rep.n_assets == N);
    CHECK(rep.t_obs == T);
    CHECK(rep.n_factors == p);
    CHECK(rep.v == T - p - 1);
    CHECK(rep.aggregates.tau == threshold_level(N, rep.v));
    CHECK(rep.aggregates.n_assets == N);

    for (double pv : {rep.p2, rep.p4, rep.p6, rep.p_inf, rep.p_minp, rep.p_cauchy}) {
        CHECK(pv >= 0.0);
        CHECK(pv <= 1.0);
    }
    CHECK(rep.l_inf >= 0.0);
    CHECK(rep.m_gumbel == Catch::Approx(rep.l_inf - 2.0 * std::log(double(N)) +
                                        std::log(std::log(double(N))))
                              .epsilon(1e-14));
    CHECK(rep.p_minp == minp_combination(rep.p2, rep.p_inf));
    CHECK(rep.p_cauchy ==
          cauchy_combination({rep.p2, rep.p4, rep.p6, rep.p_inf}).second);

    // the same panel yields the bitwise-identical report
    const TestReport again = run_alpha_tests(panel, factors);
    CHECK(again.q2 == rep.q2);
    CHECK(again.q4 == rep.q4);
    CHECK(again.q6 == rep.q6);
    CHECK(again.t2 == rep.t2);
    CHECK(again.p_cauchy == rep.p_cauchy);
    CHECK(again.aggregates.s2 == rep.aggregates.s2);
    CHECK(again.aggregates.retained_offdiag == rep.aggregates.retained_offdiag);

    // custom threshold knobs flow through to the aggregates
    TestConfig cfg;
    cfg.zeta = 0.2;
    cfg.varrho = 0.5;
    const TestReport loose = run_alpha_tests(panel, factors, cfg);
    CHECK(loose.aggregates.tau == threshold_level(N, rep.v, 0.2, 0.5));
    CHECK(loose.aggregates.tau < rep.aggregates.tau);
}
