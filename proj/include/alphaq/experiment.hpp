#pragma once

// Size and power experiments over grids of (T, N, delta_gamma, psi,
// innovation, n_active). Replications run in parallel; every replication
// derives its RNG substream from (master_seed, cell_index, replication), and
// rejection counting is a sequential reduction over per-replication slots,
// so tables are identical for any thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "alphaq/errors.hpp"
#include "alphaq/format.hpp"
#include "alphaq/parallel.hpp"
#include "alphaq/rng.hpp"
#include "alphaq/simulate.hpp"
#include "alphaq/statistics.hpp"

namespace alphaq {

inline constexpr int kNumMethods = 6;
inline constexpr std::array<const char*, kNumMethods> kMethodNames = {
    "L2", "L4", "L6", "Linf", "minP", "CC"};

inline std::array<double, kNumMethods> report_p_values(const TestReport& rep) {
    return {rep.p2, rep.p4, rep.p6, rep.p_inf, rep.p_minp, rep.p_cauchy};
}

struct ExperimentSpec {
    std::vector<int> T_values = {240};
    std::vector<int> N_values = {100};
    std::vector<double> delta_gamma_values = {0.0};
    std::vector<double> psi_values = {0.0};
    std::vector<Innovation> innovations = {Innovation::gaussian};
    std::vector<int> n_active_values = {}; // empty: null (size) design
    int replications = 1000;
    double nominal_level = 0.05;
    std::uint64_t master_seed = 0;
    double zeta = 0.05;
    double varrho = 1.0;
    double kappa = 6.5;
    int burn_in = 50;
    bool latent_disabled = false;

    void validate() const {
        if (replications < 1) throw DomainError("replications must be >= 1");
        if (!(nominal_level > 0.0 && nominal_level < 1.0)) {
            throw DomainError("nominal_level must lie in (0, 1)");
        }
        if (T_values.empty() || N_values.empty() || delta_gamma_values.empty() ||
            psi_values.empty() || innovations.empty()) {
            throw EmptyInput("experiment grid has an empty axis");
        }
    }
};

struct CellResult {
    int T = 0;
    int N = 0;
    double delta_gamma = 0.0;
    double psi = 0.0;
    Innovation innovation = Innovation::gaussian;
    int n_active = 0;
    std::array<std::int64_t, kNumMethods> rejections{};
    std::int64_t replications = 0;

    double frequency(int method) const {
        return static_cast<double>(rejections[static_cast<std::size_t>(method)]) /
               static_cast<double>(replications);
    }
    double standard_error(int method) const {
        const double f = frequency(method);
        return std::sqrt(f * (1.0 - f) / static_cast<double>(replications));
    }
};

struct RejectionTable {
    std::vector<CellResult> cells;
    double nominal_level = 0.05;
};

namespace detail {

inline CellResult run_cell(const ExperimentSpec& spec, int T, int N, double delta_gamma,
                           double psi, Innovation innovation, int n_active,
                           std::uint32_t cell_index, unsigned threads) {
    SimConfig config;
    config.T = T;
    config.N = N;
    config.delta_gamma = delta_gamma;
    config.psi = psi;
    config.innovation = innovation;
    config.kappa = spec.kappa;
    config.burn_in = spec.burn_in;
    config.seed = spec.master_seed;
    config.latent_disabled = spec.latent_disabled;

    AlphaSpec alpha;
    alpha.kind = n_active > 0 ? AlphaKind::sparse : AlphaKind::null_alpha;
    alpha.n_active = n_active;

    const TestConfig test_config{spec.zeta, spec.varrho};
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::vector<std::array<std::uint8_t, kNumMethods>> hits(reps);

    parallel_for(reps, threads, [&](std::size_t r) {
        RngStream rng(spec.master_seed,
                      stream_id(cell_index, static_cast<std::uint32_t>(r)));
        const SimulatedPanel panel = simulate_panel(config, alpha, rng);
        const TestReport rep = run_alpha_tests(panel.returns, panel.factors, test_config);
        const auto p = report_p_values(rep);
        for (int m = 0; m < kNumMethods; ++m) {
            hits[r][static_cast<std::size_t>(m)] =
                p[static_cast<std::size_t>(m)] < spec.nominal_level ? 1 : 0;
        }
    });

    CellResult cell;
    cell.T = T;
    cell.N = N;
    cell.delta_gamma = delta_gamma;
    cell.psi = psi;
    cell.innovation = innovation;
    cell.n_active = n_active;
    cell.replications = spec.replications;
    for (const auto& h : hits) {
        for (int m = 0; m < kNumMethods; ++m) {
            cell.rejections[static_cast<std::size_t>(m)] += h[static_cast<std::size_t>(m)];
        }
    }
    return cell;
}

inline RejectionTable run_grid(const ExperimentSpec& spec, const std::vector<int>& n_values,
                               unsigned threads) {
    spec.validate();
    RejectionTable table;
    table.nominal_level = spec.nominal_level;
    std::uint32_t cell_index = 0;
    for (int T : spec.T_values) {
        for (int N : spec.N_values) {
            for (double dg : spec.delta_gamma_values) {
                for (double psi : spec.psi_values) {
                    for (Innovation innov : spec.innovations) {
                        for (int n : n_values) {
                            table.cells.push_back(run_cell(spec, T, N, dg, psi, innov, n,
                                                           cell_index, threads));
                            ++cell_index;
                        }
                    }
                }
            }
        }
    }
    return table;
}

} // namespace detail

// Null rejection frequencies (empirical sizes) over the grid.
inline RejectionTable run_size_table(const ExperimentSpec& spec, unsigned threads = 1) {
    for (int n : spec.n_active_values) {
        if (n != 0) throw DomainError("size experiments require a null alternative");
    }
    return detail::run_grid(spec, {0}, threads);
}

// Power against the sparse alternating-sign alternative, swept over n_active.
inline RejectionTable run_power_curve(const ExperimentSpec& spec, unsigned threads = 1) {
    if (spec.n_active_values.empty()) {
        throw EmptyInput("power experiments need at least one n_active value");
    }
    return detail::run_grid(spec, spec.n_active_values, threads);
}

// Long-form CSV, one row per cell and method.
inline void write_rejection_csv(const RejectionTable& table, std::ostream& out) {
    out << "T,N,delta_gamma,psi,innovation,n_active,method,rejections,replications,"
           "frequency,se\n";
    for (const auto& cell : table.cells) {
        for (int m = 0; m < kNumMethods; ++m) {
            out << cell.T << ',' << cell.N << ',' << format_double(cell.delta_gamma) << ','
                << format_double(cell.psi) << ',' << innovation_name(cell.innovation) << ','
                << cell.n_active << ',' << kMethodNames[static_cast<std::size_t>(m)] << ','
                << cell.rejections[static_cast<std::size_t>(m)] << ',' << cell.replications
                << ',' << format_double(cell.frequency(m)) << ','
                << format_double(cell.standard_error(m)) << '\n';
        }
    }
}

// Human-readable companion table (percentages), intended for logs.
inline std::string pretty_rejection_table(const RejectionTable& table) {
    std::ostringstream out;
    out << "rejection rates (%) at level " << format_double(table.nominal_level) << "\n";
    for (const auto& cell : table.cells) {
        char head[128];
        std::snprintf(head, sizeof(head), "T=%-4d N=%-5d dg=%-4g psi=%-4g %-8s n=%-4d |",
                      cell.T, cell.N, cell.delta_gamma, cell.psi,
                      innovation_name(cell.innovation).c_str(), cell.n_active);
        out << head;
        for (int m = 0; m < kNumMethods; ++m) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " %s %5.1f",
                          kMethodNames[static_cast<std::size_t>(m)],
                          100.0 * cell.frequency(m));
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace alphaq
