#pragma once

// CSV ingestion of monthly returns and factors, excess-return construction,
// and the rolling-window test pipeline: fixed-length windows stepped through
// the calendar, keeping only assets with complete observations inside each
// window and running the full test battery when enough assets remain.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "alphaq/errors.hpp"
#include "alphaq/format.hpp"
#include "alphaq/panel.hpp"
#include "alphaq/parallel.hpp"
#include "alphaq/statistics.hpp"

namespace alphaq {

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Months are YYYY-MM strings; the linear index makes contiguity checks and
// window arithmetic trivial.
inline int month_index(const std::string& m, const std::string& path, std::size_t line) {
    const bool ok = m.size() == 7 && is_digit(m[0]) && is_digit(m[1]) && is_digit(m[2]) &&
                    is_digit(m[3]) && m[4] == '-' && is_digit(m[5]) && is_digit(m[6]);
    if (!ok) {
        throw ParseError(path + ":" + std::to_string(line) + ": month '" + m +
                         "' is not in YYYY-MM form");
    }
    const int year = (m[0] - '0') * 1000 + (m[1] - '0') * 100 + (m[2] - '0') * 10 + (m[3] - '0');
    const int mon = (m[5] - '0') * 10 + (m[6] - '0');
    if (mon < 1 || mon > 12) {
        throw ParseError(path + ":" + std::to_string(line) + ": month '" + m +
                         "' has month-of-year outside 01..12");
    }
    return year * 12 + (mon - 1);
}

inline double parse_number(const std::string& field, const std::string& path,
                           std::size_t line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError(path + ":" + std::to_string(line) + ": '" + field +
                         "' is not a decimal number");
    }
    return value;
}

inline std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// Maps header names to column positions, enforcing required columns and the
// whitelist for anything extra.
inline std::unordered_map<std::string, std::size_t>
resolve_header(const std::vector<std::string>& fields, const std::vector<std::string>& required,
               const std::set<std::string>& allowed_extra, const std::string& path) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (!pos.emplace(fields[k], k).second) {
            throw ParseError(path + ":1: duplicate column '" + fields[k] + "'");
        }
    }
    for (const auto& name : required) {
        if (pos.find(name) == pos.end()) {
            throw MissingColumn(path + ": required column '" + name + "' not found");
        }
    }
    for (const auto& [name, k] : pos) {
        (void)k;
        if (std::find(required.begin(), required.end(), name) == required.end() &&
            allowed_extra.find(name) == allowed_extra.end()) {
            throw UnexpectedColumn(path + ": column '" + name +
                                   "' is not part of the schema (whitelist it explicitly "
                                   "if intended)");
        }
    }
    return pos;
}

} // namespace detail

// Long-form monthly return observations on a contiguous calendar; missing
// (asset, month) pairs are NaN in `values`.
struct ReturnHistory {
    std::vector<std::string> months; // contiguous, ascending
    std::vector<std::string> assets; // unique, ascending
    Eigen::MatrixXd values;          // assets x months, NaN where unobserved

    std::size_t n_assets() const { return assets.size(); }
    std::size_t n_months() const { return months.size(); }
};

struct FactorTable {
    std::vector<std::string> months; // ascending, unique
    std::vector<double> mktrf;
    std::vector<double> rf;
    std::unordered_map<std::string, std::size_t> index;
};

inline ReturnHistory load_returns_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": file is empty");
    const auto header = detail::resolve_header(detail::split_csv_line(line),
                                               {"month", "asset", "ret"}, {}, path);
    const std::size_t c_month = header.at("month");
    const std::size_t c_asset = header.at("asset");
    const std::size_t c_ret = header.at("ret");

    struct Row {
        int month_idx;
        std::string month;
        std::string asset;
        double ret;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::set<std::string> month_set;
    std::set<std::string> asset_set;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        Row row;
        row.month = fields[c_month];
        row.month_idx = detail::month_index(row.month, path, line_no);
        row.asset = fields[c_asset];
        if (row.asset.empty()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": empty asset id");
        }
        row.ret = detail::parse_number(fields[c_ret], path, line_no);
        row.line = line_no;
        month_set.insert(row.month);
        asset_set.insert(row.asset);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyInput(path + ": no data rows");

    ReturnHistory history;
    history.months.assign(month_set.begin(), month_set.end());
    history.assets.assign(asset_set.begin(), asset_set.end());
    for (std::size_t k = 1; k < history.months.size(); ++k) {
        const int prev = detail::month_index(history.months[k - 1], path, 0);
        const int cur = detail::month_index(history.months[k], path, 0);
        if (cur != prev + 1) {
            throw ParseError(path + ": month range is not contiguous (gap between " +
                             history.months[k - 1] + " and " + history.months[k] + ")");
        }
    }

    std::unordered_map<std::string, std::size_t> asset_pos;
    for (std::size_t i = 0; i < history.assets.size(); ++i) asset_pos[history.assets[i]] = i;
    const int first_idx = detail::month_index(history.months.front(), path, 0);

    history.values.resize(static_cast<Eigen::Index>(history.assets.size()),
                          static_cast<Eigen::Index>(history.months.size()));
    history.values.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (const auto& row : rows) {
        const auto i = static_cast<Eigen::Index>(asset_pos.at(row.asset));
        const auto t = static_cast<Eigen::Index>(row.month_idx - first_idx);
        if (!std::isnan(history.values(i, t))) {
            throw ParseError(path + ":" + std::to_string(row.line) + ": duplicate entry for (" +
                             row.asset + ", " + row.month + ")");
        }
        history.values(i, t) = row.ret;
    }
    return history;
}

// Factor file schema is (month, MktRF, RF); extra columns are rejected unless
// whitelisted (and whitelisted extras are ignored by the CAPM pipeline).
inline FactorTable load_factors_csv(const std::string& path,
                                    const std::set<std::string>& whitelist = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": file is empty");
    const auto header = detail::resolve_header(detail::split_csv_line(line),
                                               {"month", "MktRF", "RF"}, whitelist, path);
    const std::size_t c_month = header.at("month");
    const std::size_t c_mkt = header.at("MktRF");
    const std::size_t c_rf = header.at("RF");

    std::map<std::string, std::pair<double, double>> by_month;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        const std::string month = fields[c_month];
        detail::month_index(month, path, line_no);
        const double mkt = detail::parse_number(fields[c_mkt], path, line_no);
        const double rf = detail::parse_number(fields[c_rf], path, line_no);
        if (!by_month.emplace(month, std::make_pair(mkt, rf)).second) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate month '" +
                             month + "'");
        }
    }
    if (by_month.empty()) throw EmptyInput(path + ": no data rows");

    FactorTable table;
    for (const auto& [month, values] : by_month) {
        table.index[month] = table.months.size();
        table.months.push_back(month);
        table.mktrf.push_back(values.first);
        table.rf.push_back(values.second);
    }
    return table;
}

struct WindowRow {
    std::string month; // window-end month
    int n_eff = 0;
    std::array<double, 6> p{}; // p2, p4, p6, p_inf, p_minp, p_cc
};

struct RollingResult {
    int window_T = 0;
    int step = 1;
    std::vector<WindowRow> rows;   // evaluated windows, in time order
    std::int64_t skipped = 0;      // windows below the asset floor

    std::array<double, 6> rejection_rate(double level = 0.05) const {
        std::array<double, 6> rate{};
        if (rows.empty()) return rate;
        for (const auto& row : rows) {
            for (std::size_t m = 0; m < 6; ++m) {
                if (row.p[m] < level) rate[m] += 1.0;
            }
        }
        for (auto& r : rate) r /= static_cast<double>(rows.size());
        return rate;
    }
};

inline RollingResult rolling_run(const ReturnHistory& history, const FactorTable& factors,
                                 int window_T, int min_assets = 100, int step = 1,
                                 unsigned threads = 1, const TestConfig& config = {}) {
    const auto M = static_cast<int>(history.n_months());
    const auto N = static_cast<int>(history.n_assets());
    // Each window regresses on the market factor alone, so v = window_T - 2;
    // the sixth-moment corrections in the statistics need v > 12.
    if (window_T < 15) throw DomainError("window_T must be at least 15");
    if (window_T >= M) throw DomainError("window_T must be below the number of months");
    if (min_assets < 3) throw DomainError("min_assets must be at least 3");
    if (step < 1) throw DomainError("step must be at least 1");

    // Every month in the history must have a factor row.
    for (const auto& month : history.months) {
        if (factors.index.find(month) == factors.index.end()) {
            throw CalendarMismatch("month " + month + " has no factor row");
        }
    }

    // Per-asset prefix counts of observed months make window completeness an
    // O(1) test.
    std::vector<std::vector<int>> obs_prefix(static_cast<std::size_t>(N),
                                             std::vector<int>(static_cast<std::size_t>(M) + 1, 0));
    for (int i = 0; i < N; ++i) {
        auto& prefix = obs_prefix[static_cast<std::size_t>(i)];
        for (int t = 0; t < M; ++t) {
            prefix[static_cast<std::size_t>(t) + 1] =
                prefix[static_cast<std::size_t>(t)] +
                (std::isnan(history.values(i, t)) ? 0 : 1);
        }
    }

    std::vector<int> window_ends;
    for (int e = window_T - 1; e < M; e += step) window_ends.push_back(e);

    struct Slot {
        bool evaluated = false;
        WindowRow row;
    };
    std::vector<Slot> slots(window_ends.size());

    parallel_for(window_ends.size(), threads, [&](std::size_t k) {
        const int e = window_ends[k];
        const int start = e - window_T + 1;
        std::vector<int> complete;
        for (int i = 0; i < N; ++i) {
            const auto& prefix = obs_prefix[static_cast<std::size_t>(i)];
            const int observed = prefix[static_cast<std::size_t>(e) + 1] -
                                 prefix[static_cast<std::size_t>(start)];
            if (observed == window_T) complete.push_back(i);
        }
        if (static_cast<int>(complete.size()) < min_assets) return;

        ReturnPanel panel;
        FactorPanel window_factors;
        panel.values.resize(static_cast<Eigen::Index>(complete.size()), window_T);
        window_factors.values.resize(window_T, 1);
        window_factors.factor_names = {"MktRF"};
        panel.asset_ids.reserve(complete.size());
        panel.time_ids.reserve(static_cast<std::size_t>(window_T));
        for (int t = 0; t < window_T; ++t) {
            const std::string& month = history.months[static_cast<std::size_t>(start + t)];
            const std::size_t f = factors.index.at(month);
            window_factors.values(t, 0) = factors.mktrf[f];
            panel.time_ids.push_back(month);
            for (std::size_t r = 0; r < complete.size(); ++r) {
                panel.values(static_cast<Eigen::Index>(r), t) =
                    history.values(complete[r], start + t) - factors.rf[f];
            }
        }
        for (int i : complete) {
            panel.asset_ids.push_back(history.assets[static_cast<std::size_t>(i)]);
        }

        const TestReport rep = run_alpha_tests(panel, window_factors, config);
        slots[k].evaluated = true;
        slots[k].row.month = history.months[static_cast<std::size_t>(e)];
        slots[k].row.n_eff = static_cast<int>(complete.size());
        slots[k].row.p = {rep.p2, rep.p4, rep.p6, rep.p_inf, rep.p_minp, rep.p_cauchy};
    });

    RollingResult result;
    result.window_T = window_T;
    result.step = step;
    for (const auto& slot : slots) {
        if (slot.evaluated) {
            result.rows.push_back(slot.row);
        } else {
            ++result.skipped;
        }
    }
    if (result.rows.empty()) {
        throw NoEvaluableWindows("every window fell below the minimum asset count");
    }
    return result;
}

inline void write_pvalue_path_csv(const RollingResult& result, std::ostream& out) {
    out << "month,N_eff,p2,p4,p6,p_inf,p_minp,p_cc\n";
    for (const auto& row : result.rows) {
        out << row.month << ',' << row.n_eff;
        for (const double p : row.p) out << ',' << format_double(p);
        out << '\n';
    }
}

inline void write_rolling_summary_csv(const RollingResult& result, std::ostream& out,
                                      double level = 0.05) {
    static constexpr std::array<const char*, 6> names = {"L2",   "L4",   "L6",
                                                         "Linf", "minP", "CC"};
    const auto rate = result.rejection_rate(level);
    out << "window_T,method,windows_evaluated,windows_skipped,rejections,rejection_rate\n";
    for (std::size_t m = 0; m < 6; ++m) {
        std::int64_t rejections = 0;
        for (const auto& row : result.rows) {
            if (row.p[m] < level) ++rejections;
        }
        out << result.window_T << ',' << names[m] << ',' << result.rows.size() << ','
            << result.skipped << ',' << rejections << ',' << format_double(rate[m]) << '\n';
    }
}

// Optional preprocessing: month-end prices to simple returns per asset. A
// return is emitted only for months whose predecessor is present; output is
// ordered month-major to match the simulator's export.
inline void convert_prices_to_returns(const std::string& prices_path,
                                      std::ostream& out) {
    std::ifstream in(prices_path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + prices_path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(prices_path + ": file is empty");
    const auto header = detail::resolve_header(detail::split_csv_line(line),
                                               {"month", "asset", "price"}, {}, prices_path);
    const std::size_t c_month = header.at("month");
    const std::size_t c_asset = header.at("asset");
    const std::size_t c_price = header.at("price");

    // (month index, asset) -> price; the map keeps output deterministic.
    std::map<std::pair<int, std::string>, double> prices;
    std::map<int, std::string> month_names;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError(prices_path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        const std::string month = fields[c_month];
        const int idx = detail::month_index(month, prices_path, line_no);
        const double price = detail::parse_number(fields[c_price], prices_path, line_no);
        if (!(price > 0.0)) {
            throw ParseError(prices_path + ":" + std::to_string(line_no) +
                             ": price must be positive");
        }
        if (!prices.emplace(std::make_pair(idx, fields[c_asset]), price).second) {
            throw ParseError(prices_path + ":" + std::to_string(line_no) +
                             ": duplicate entry for (" + fields[c_asset] + ", " + month + ")");
        }
        month_names[idx] = month;
    }
    if (prices.empty()) throw EmptyInput(prices_path + ": no data rows");

    out << "month,asset,ret\n";
    for (const auto& [key, price] : prices) {
        const auto prev = prices.find(std::make_pair(key.first - 1, key.second));
        if (prev == prices.end()) continue;
        out << month_names.at(key.first) << ',' << key.second << ','
            << format_double(price / prev->second - 1.0) << '\n';
    }
}

} // namespace alphaq
