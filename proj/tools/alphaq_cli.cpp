// Command-line entry point: run the alpha tests on CSV data, run size and
// power simulation studies, run the rolling-window pipeline, validate the
// analytic oracles, and convert price files to return files.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "alphaq/alphaq.hpp"

namespace {

unsigned default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

alphaq::Innovation parse_innovation(const std::string& name) {
    if (name == "gaussian") return alphaq::Innovation::gaussian;
    if (name == "t8") return alphaq::Innovation::student_t8;
    throw CLI::ValidationError("--innovation", "must be 'gaussian' or 't8'");
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw alphaq::Error("cannot open " + path + " for writing");
    return file;
}

// Build the complete-case panel over the file's whole calendar (assets with
// any missing month are dropped) and run the test battery once.
int run_test_command(const std::string& returns_path, const std::string& factors_path,
                     const std::set<std::string>& factor_whitelist,
                     const alphaq::TestConfig& config) {
    const alphaq::ReturnHistory history = alphaq::load_returns_csv(returns_path);
    const alphaq::FactorTable factors = alphaq::load_factors_csv(factors_path, factor_whitelist);

    const auto M = static_cast<int>(history.n_months());
    for (const auto& month : history.months) {
        if (factors.index.find(month) == factors.index.end()) {
            throw alphaq::CalendarMismatch("month " + month + " has no factor row");
        }
    }

    std::vector<int> complete;
    for (int i = 0; i < static_cast<int>(history.n_assets()); ++i) {
        bool all = true;
        for (int t = 0; t < M; ++t) {
            if (std::isnan(history.values(i, t))) {
                all = false;
                break;
            }
        }
        if (all) complete.push_back(i);
    }
    if (static_cast<int>(complete.size()) < 3) {
        throw alphaq::TooFewAssets("only " + std::to_string(complete.size()) +
                                   " assets have complete observations");
    }
    if (complete.size() < history.n_assets()) {
        std::cerr << "note: dropped " << history.n_assets() - complete.size()
                  << " assets with incomplete observations\n";
    }

    alphaq::ReturnPanel panel;
    alphaq::FactorPanel factor_panel;
    panel.values.resize(static_cast<Eigen::Index>(complete.size()), M);
    factor_panel.values.resize(M, 1);
    factor_panel.factor_names = {"MktRF"};
    for (int t = 0; t < M; ++t) {
        const std::string& month = history.months[static_cast<std::size_t>(t)];
        const std::size_t f = factors.index.at(month);
        factor_panel.values(t, 0) = factors.mktrf[f];
        panel.time_ids.push_back(month);
        for (std::size_t r = 0; r < complete.size(); ++r) {
            panel.values(static_cast<Eigen::Index>(r), t) =
                history.values(complete[r], t) - factors.rf[f];
        }
    }
    for (int i : complete) panel.asset_ids.push_back(history.assets[static_cast<std::size_t>(i)]);

    const alphaq::TestReport report = alphaq::run_alpha_tests(panel, factor_panel, config);
    std::cout << alphaq::report_json_string(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"L_q-norm and combination tests for zero alphas in linear factor pricing "
                 "models, with a simulation harness and rolling-window pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value config file (flags win)");

    // --- test ---------------------------------------------------------
    auto* cmd_test = app.add_subcommand("test", "Run the six alpha tests on return/factor CSVs");
    std::string returns_path, factors_path;
    std::vector<std::string> whitelist_vec;
    double zeta = 0.05, varrho = 1.0;
    cmd_test->add_option("--returns", returns_path, "Return CSV (month,asset,ret)")->required();
    cmd_test->add_option("--factors", factors_path, "Factor CSV (month,MktRF,RF)")->required();
    cmd_test->add_option("--allow-factor-column", whitelist_vec,
                         "Extra factor-file column to tolerate (ignored by the tests)");
    cmd_test->add_option("--zeta", zeta, "Correlation-threshold rate parameter")
        ->capture_default_str();
    cmd_test->add_option("--varrho", varrho, "Correlation-threshold exponent")
        ->capture_default_str();

    // --- shared simulation grid options --------------------------------
    std::vector<int> T_values{240}, N_values{100};
    std::vector<double> dg_values{0.0}, psi_values{0.0};
    std::vector<std::string> innovation_names{"gaussian"};
    std::vector<int> n_active_values{1, 2, 4, 8, 16, 32, 64, 100, 150};
    int reps_size = 1000, reps_power = 500;
    double level = 0.05, kappa = 6.5;
    int burn_in = 50;
    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    bool no_latent = false;
    std::string out_path;

    auto add_grid_options = [&](CLI::App* cmd, int& reps) {
        cmd->add_option("--T", T_values, "Window lengths (time-series sizes)")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--N", N_values, "Cross-section sizes")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--delta-gamma", dg_values, "Latent-loading density exponents")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--psi", psi_values, "Spatial autoregressive coefficients")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--innovation", innovation_names, "Innovation laws: gaussian, t8")
            ->delimiter(',')
            ->check(CLI::IsMember({"gaussian", "t8"}))
            ->capture_default_str();
        cmd->add_option("--reps", reps, "Monte Carlo replications per cell")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        cmd->add_option("--level", level, "Nominal test level")->capture_default_str();
        cmd->add_option("--zeta", zeta, "Correlation-threshold rate parameter")
            ->capture_default_str();
        cmd->add_option("--varrho", varrho, "Correlation-threshold exponent")
            ->capture_default_str();
        cmd->add_option("--kappa", kappa, "Idiosyncratic scale multiplier")
            ->capture_default_str();
        cmd->add_option("--burn-in", burn_in, "Simulated burn-in length")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads")->capture_default_str();
        cmd->add_flag("--no-latent", no_latent,
                      "Force all latent-factor loadings to zero (testing override)");
        cmd->add_option("--out", out_path, "Output CSV path (default: stdout)");
    };

    auto* cmd_size = app.add_subcommand("simulate-size", "Null rejection-rate (size) study");
    add_grid_options(cmd_size, reps_size);
    auto* cmd_power = app.add_subcommand("simulate-power", "Power study vs sparse alternatives");
    add_grid_options(cmd_power, reps_power);
    cmd_power->add_option("--n-active", n_active_values, "Sparse-alpha support sizes")
        ->delimiter(',')
        ->capture_default_str();

    // --- rolling --------------------------------------------------------
    auto* cmd_rolling =
        app.add_subcommand("rolling", "Rolling-window tests over a return history");
    std::vector<int> window_lengths{60, 72, 84, 96, 108, 120};
    int min_assets = 100, step = 1;
    std::string out_dir = ".";
    cmd_rolling->add_option("--returns", returns_path, "Return CSV (month,asset,ret)")
        ->required();
    cmd_rolling->add_option("--factors", factors_path, "Factor CSV (month,MktRF,RF)")
        ->required();
    cmd_rolling->add_option("--window-T", window_lengths, "Window lengths in months")
        ->delimiter(',')
        ->capture_default_str();
    cmd_rolling->add_option("--min-assets", min_assets, "Minimum complete assets per window")
        ->capture_default_str();
    cmd_rolling->add_option("--step", step, "Months between successive windows")
        ->capture_default_str();
    cmd_rolling->add_option("--threads", threads, "Worker threads")->capture_default_str();
    cmd_rolling->add_option("--level", level, "Rejection level for the summary")
        ->capture_default_str();
    cmd_rolling->add_option("--zeta", zeta, "Correlation-threshold rate parameter")
        ->capture_default_str();
    cmd_rolling->add_option("--varrho", varrho, "Correlation-threshold exponent")
        ->capture_default_str();
    cmd_rolling->add_option("--allow-factor-column", whitelist_vec,
                            "Extra factor-file column to tolerate");
    cmd_rolling->add_option("--out-dir", out_dir, "Directory for per-window-length CSVs")
        ->capture_default_str();

    // --- validate / convert-prices --------------------------------------
    auto* cmd_validate = app.add_subcommand("validate", "Run the analytic oracle self-checks");
    auto* cmd_convert =
        app.add_subcommand("convert-prices", "Convert (month,asset,price) to returns");
    std::string prices_path;
    cmd_convert->add_option("--prices", prices_path, "Price CSV (month,asset,price)")
        ->required();
    cmd_convert->add_option("--out", out_path, "Output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const alphaq::TestConfig test_config{zeta, varrho};
        const std::set<std::string> whitelist(whitelist_vec.begin(), whitelist_vec.end());

        if (cmd_test->parsed()) {
            return run_test_command(returns_path, factors_path, whitelist, test_config);
        }

        if (cmd_size->parsed() || cmd_power->parsed()) {
            alphaq::ExperimentSpec spec;
            spec.T_values = T_values;
            spec.N_values = N_values;
            spec.delta_gamma_values = dg_values;
            spec.psi_values = psi_values;
            spec.innovations.clear();
            for (const auto& name : innovation_names) {
                spec.innovations.push_back(parse_innovation(name));
            }
            spec.replications = cmd_size->parsed() ? reps_size : reps_power;
            spec.nominal_level = level;
            spec.master_seed = seed;
            spec.zeta = zeta;
            spec.varrho = varrho;
            spec.kappa = kappa;
            spec.burn_in = burn_in;
            spec.latent_disabled = no_latent;
            if (cmd_power->parsed()) spec.n_active_values = n_active_values;

            const alphaq::RejectionTable table = cmd_size->parsed()
                                                     ? alphaq::run_size_table(spec, threads)
                                                     : alphaq::run_power_curve(spec, threads);
            std::ofstream file;
            alphaq::write_rejection_csv(table, open_or_stdout(file, out_path));
            std::cerr << alphaq::pretty_rejection_table(table);
            return 0;
        }

        if (cmd_rolling->parsed()) {
            const alphaq::ReturnHistory history = alphaq::load_returns_csv(returns_path);
            const alphaq::FactorTable factors =
                alphaq::load_factors_csv(factors_path, whitelist);
            std::error_code dir_ec;
            std::filesystem::create_directories(out_dir, dir_ec);
            if (dir_ec) {
                throw alphaq::Error("cannot create output directory " + out_dir + ": " +
                                    dir_ec.message());
            }
            for (const int window_T : window_lengths) {
                const alphaq::RollingResult result = alphaq::rolling_run(
                    history, factors, window_T, min_assets, step, threads, test_config);
                const std::string base = out_dir + "/rolling_T" + std::to_string(window_T);
                {
                    std::ofstream out(base + "_pvalues.csv", std::ios::binary);
                    if (!out) throw alphaq::Error("cannot write " + base + "_pvalues.csv");
                    alphaq::write_pvalue_path_csv(result, out);
                }
                {
                    std::ofstream out(base + "_summary.csv", std::ios::binary);
                    if (!out) throw alphaq::Error("cannot write " + base + "_summary.csv");
                    alphaq::write_rolling_summary_csv(result, out, level);
                }
                alphaq::write_rolling_summary_csv(result, std::cout, level);
            }
            return 0;
        }

        if (cmd_validate->parsed()) {
            const auto checks = alphaq::run_selfchecks();
            bool all_passed = true;
            for (const auto& check : checks) {
                std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << " — "
                          << check.detail << '\n';
                all_passed = all_passed && check.passed;
            }
            std::cout << (all_passed ? "all checks passed\n" : "SOME CHECKS FAILED\n");
            return all_passed ? 0 : 3;
        }

        if (cmd_convert->parsed()) {
            std::ofstream file;
            alphaq::convert_prices_to_returns(prices_path, open_or_stdout(file, out_path));
            return 0;
        }

        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const alphaq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
