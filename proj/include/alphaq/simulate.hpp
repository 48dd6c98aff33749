#pragma once

// Synthetic return panels: three AR(1) factors with GARCH(1,1) conditional
// variances, uniform factor loadings, optional latent-factor contamination,
// spatially autoregressive heteroskedastic idiosyncratic errors (rook
// neighbors, tridiagonal solve), and sparse alternating-sign alphas.
//
// Draw order within one panel is fixed and part of the reproducibility
// contract: loadings -> latent gammas -> idiosyncratic scales -> factor path
// -> latent factor path -> idiosyncratic innovation path.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alphaq/errors.hpp"
#include "alphaq/format.hpp"
#include "alphaq/panel.hpp"
#include "alphaq/rng.hpp"

namespace alphaq {

enum class Innovation { gaussian, student_t8 };

inline std::string innovation_name(Innovation innov) {
    return innov == Innovation::gaussian ? "gaussian" : "t8";
}

struct SimConfig {
    int T = 240;
    int N = 100;
    double delta_gamma = 0.0;   // latent-loading density exponent in [0, 1]
    double psi = 0.0;           // spatial autoregressive coefficient in [0, 1)
    Innovation innovation = Innovation::gaussian;
    double kappa = 6.5;
    int burn_in = 50;
    std::uint64_t seed = 0;
    bool latent_disabled = false; // testing override: force every gamma_i to 0

    void validate() const {
        if (T < 10) throw DomainError("SimConfig requires T >= 10");
        if (N < 3) throw DomainError("SimConfig requires N >= 3");
        if (!(delta_gamma >= 0.0 && delta_gamma <= 1.0)) {
            throw DomainError("delta_gamma must lie in [0, 1]");
        }
        if (!(psi >= 0.0 && psi < 1.0)) {
            throw SingularSAR("psi must lie in [0, 1) for I - psi W to be invertible");
        }
        if (burn_in < 0) throw DomainError("burn_in must be nonnegative");
    }
};

enum class AlphaKind { null_alpha, sparse };

struct AlphaSpec {
    AlphaKind kind = AlphaKind::null_alpha;
    int n_active = 0; // support {1..n_active}, amplitude 4/n^{1/2.2}, alternating signs

    void validate(int N) const {
        if (n_active < 0 || n_active > N) {
            throw DomainError("n_active must lie in [0, N]");
        }
        if (kind == AlphaKind::null_alpha && n_active != 0) {
            throw DomainError("null alpha spec must have n_active = 0");
        }
    }

    Eigen::VectorXd build(int N) const {
        validate(N);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(N);
        if (kind == AlphaKind::sparse && n_active > 0) {
            const double amplitude = 4.0 / std::pow(static_cast<double>(n_active), 1.0 / 2.2);
            for (int i = 0; i < n_active; ++i) {
                alpha(i) = (i % 2 == 0) ? amplitude : -amplitude;
            }
        }
        return alpha;
    }
};

struct SimulatedPanel {
    ReturnPanel returns;
    FactorPanel factors;
    Eigen::VectorXd true_alpha;
    SimConfig config;
    AlphaSpec alpha;
};

namespace detail {

// Synthetic monthly calendar starting 1990-01; YYYY-MM strings sort
// lexicographically in time order.
inline std::vector<std::string> synthetic_months(int T) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(T));
    int year = 1990, month = 1;
    char buf[32];
    for (int t = 0; t < T; ++t) {
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        out.emplace_back(buf);
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return out;
}

inline std::vector<std::string> synthetic_assets(int N) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(N));
    char buf[16];
    for (int i = 0; i < N; ++i) {
        std::snprintf(buf, sizeof(buf), "A%05d", i + 1);
        out.emplace_back(buf);
    }
    return out;
}

} // namespace detail

// Three observed factors: f_t = rho_f f_{t-1} + e_t with GARCH(1,1)
// conditional variances h_t = omega (1 - a - b) + a h_{t-1} + b e_{t-1}^2.
// State starts at f = 0, h = 1, e = 0; the first burn_in observations are
// discarded. h is floored at 1e-12 (the third GARCH coefficient is negative,
// so the recursion can otherwise dip below zero).
inline FactorPanel simulate_factors(int T, int burn_in, RngStream& rng) {
    static constexpr double kRhoF[3] = {-0.1, 0.2, -0.2};
    static constexpr double kOmega[3] = {20.25, 6.33, 5.98};
    static constexpr double kGarchA[3] = {0.61, 0.70, -0.31};
    static constexpr double kGarchB[3] = {0.31, 0.21, 0.10};

    FactorPanel out;
    out.values.resize(T, 3);
    out.factor_names = {"f1", "f2", "f3"};

    double f[3] = {0.0, 0.0, 0.0};
    double h[3] = {1.0, 1.0, 1.0};
    double e[3] = {0.0, 0.0, 0.0};
    for (int t = -burn_in; t < T; ++t) {
        for (int l = 0; l < 3; ++l) {
            double hl = kOmega[l] * (1.0 - kGarchA[l] - kGarchB[l]) + kGarchA[l] * h[l] +
                        kGarchB[l] * e[l] * e[l];
            if (hl < 1e-12) hl = 1e-12;
            const double el = std::sqrt(hl) * rng.normal();
            f[l] = kRhoF[l] * f[l] + el;
            h[l] = hl;
            e[l] = el;
        }
        if (t >= 0) {
            out.values(t, 0) = f[0];
            out.values(t, 1) = f[1];
            out.values(t, 2) = f[2];
        }
    }
    return out;
}

// Observed-factor loadings: columns U(0.3, 1.8), U(-1, 1), U(-0.6, 0.9),
// drawn row by row.
inline Eigen::MatrixXd draw_loadings(int N, RngStream& rng) {
    Eigen::MatrixXd beta(N, 3);
    for (int i = 0; i < N; ++i) {
        beta(i, 0) = rng.uniform(0.3, 1.8);
        beta(i, 1) = rng.uniform(-1.0, 1.0);
        beta(i, 2) = rng.uniform(-0.6, 0.9);
    }
    return beta;
}

// Latent-factor loadings: floor(N^delta_gamma) entries drawn U(0.7, 0.9),
// scattered to uniformly random positions by a Fisher-Yates shuffle.
inline Eigen::VectorXd latent_loadings(int N, double delta_gamma, RngStream& rng) {
    if (!(delta_gamma >= 0.0 && delta_gamma <= 1.0)) {
        throw DomainError("delta_gamma must lie in [0, 1]");
    }
    const int n_latent = static_cast<int>(std::floor(std::pow(static_cast<double>(N), delta_gamma)));
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < n_latent && i < N; ++i) gamma(i) = rng.uniform(0.7, 0.9);
    for (int i = N - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        std::swap(gamma(i), gamma(j));
    }
    return gamma;
}

// Rook-type nearest-neighbor weights on a line: w_ii = 0, rows normalized to
// sum 1 (interior rows put 1/2 on each neighbor, end rows 1 on their sole
// neighbor). Held implicitly as the two nonzero diagonals.
struct RookWeights {
    int n = 0;

    // weight of row i on column i-1
    double sub(int i) const { return i == n - 1 ? 1.0 : (i > 0 ? 0.5 : 0.0); }
    // weight of row i on column i+1
    double sup(int i) const { return i == 0 ? 1.0 : (i < n - 1 ? 0.5 : 0.0); }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            if (i > 0) W(i, i - 1) = sub(i);
            if (i < n - 1) W(i, i + 1) = sup(i);
        }
        return W;
    }
};

inline RookWeights build_rook_weights(int N) {
    if (N < 2) throw DomainError("rook weights require N >= 2");
    return RookWeights{N};
}

// Pre-factored tridiagonal solver for (I - psi W) x = rhs (Thomas
// algorithm); the matrix is strictly diagonally dominant for psi < 1, so no
// pivoting is needed and the factorization is reused across time steps.
class SarSolver {
public:
    SarSolver(int N, double psi) : sub_(N), cprime_(N), inv_diag_(N) {
        if (!(psi >= 0.0 && psi < 1.0)) {
            throw SingularSAR("psi must lie in [0, 1)");
        }
        const RookWeights W = build_rook_weights(N);
        double prev_cprime = 0.0;
        for (int i = 0; i < N; ++i) {
            sub_(i) = -psi * W.sub(i);
            const double diag = 1.0 - sub_(i) * prev_cprime;
            inv_diag_(i) = 1.0 / diag;
            prev_cprime = -psi * W.sup(i) * inv_diag_(i);
            cprime_(i) = prev_cprime;
        }
    }

    void solve_in_place(Eigen::VectorXd& x) const {
        const Eigen::Index n = sub_.size();
        double prev = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            prev = (x(i) - sub_(i) * prev) * inv_diag_(i);
            x(i) = prev;
        }
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            x(i) -= cprime_(i) * x(i + 1);
        }
    }

private:
    Eigen::VectorXd sub_;      // subdiagonal of I - psi W
    Eigen::VectorXd cprime_;   // eliminated superdiagonal factors
    Eigen::VectorXd inv_diag_; // reciprocals of the eliminated diagonal
};

inline SimulatedPanel simulate_panel(const SimConfig& config, const AlphaSpec& alpha_spec,
                                     RngStream& rng) {
    config.validate();
    alpha_spec.validate(config.N);
    const int N = config.N;
    const int T = config.T;

    const Eigen::MatrixXd beta = draw_loadings(N, rng);
    Eigen::VectorXd gamma = latent_loadings(N, config.delta_gamma, rng);
    if (config.latent_disabled) gamma.setZero();

    // sigma^2_eta,i ~ (1 + chi^2_2) / 3, so E sigma^2 = 1
    Eigen::VectorXd sigma_eta(N);
    for (int i = 0; i < N; ++i) {
        sigma_eta(i) = std::sqrt((1.0 + rng.chi_squared_2()) / 3.0);
    }

    const FactorPanel factors = simulate_factors(T, config.burn_in, rng);

    Eigen::VectorXd v_path(T);
    for (int t = 0; t < T; ++t) v_path(t) = rng.normal();

    const Eigen::VectorXd alpha = alpha_spec.build(N);
    const SarSolver sar(N, config.psi);
    const bool identity_sar = config.psi == 0.0;

    SimulatedPanel out;
    out.returns.values.resize(N, T);
    Eigen::VectorXd eta(N);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < N; ++i) {
            const double eps = config.innovation == Innovation::gaussian
                                   ? rng.normal()
                                   : rng.standardized_t8();
            eta(i) = sigma_eta(i) * eps;
        }
        if (!identity_sar) sar.solve_in_place(eta);
        const Eigen::Vector3d f_t = factors.values.row(t).transpose();
        for (int i = 0; i < N; ++i) {
            out.returns.values(i, t) =
                alpha(i) + beta.row(i).dot(f_t) +
                config.kappa * (gamma(i) * v_path(t) + eta(i));
        }
    }

    out.returns.asset_ids = detail::synthetic_assets(N);
    out.returns.time_ids = detail::synthetic_months(T);
    out.factors = factors;
    out.true_alpha = alpha;
    out.config = config;
    out.alpha = alpha_spec;
    return out;
}

inline SimulatedPanel simulate_panel(const SimConfig& config, const AlphaSpec& alpha_spec) {
    RngStream rng(config.seed, 0);
    return simulate_panel(config, alpha_spec, rng);
}

// Export to the CSV schema the rolling-analysis loader reads: a long-form
// returns file (month, asset, ret) and a factor file (month, MktRF, RF). One
// simulated factor serves as the market excess return; the risk-free rate is
// zero, so returns are already excess returns.
inline void export_returns_csv(const SimulatedPanel& panel, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "month,asset,ret\n";
    const auto& R = panel.returns;
    for (std::size_t t = 0; t < R.time_ids.size(); ++t) {
        for (std::size_t i = 0; i < R.asset_ids.size(); ++i) {
            out << R.time_ids[t] << ',' << R.asset_ids[i] << ','
                << format_double(R.values(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(t)))
                << '\n';
        }
    }
    if (!out) throw Error("failed while writing " + path);
}

inline void export_factors_csv(const SimulatedPanel& panel, const std::string& path,
                               int market_factor = 0) {
    if (market_factor < 0 || market_factor >= panel.factors.values.cols()) {
        throw DomainError("market_factor index out of range");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "month,MktRF,RF\n";
    for (std::size_t t = 0; t < panel.returns.time_ids.size(); ++t) {
        out << panel.returns.time_ids[t] << ','
            << format_double(panel.factors.values(static_cast<Eigen::Index>(t), market_factor))
            << ",0\n";
    }
    if (!out) throw Error("failed while writing " + path);
}

} // namespace alphaq
