#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "alphaq/errors.hpp"

namespace alphaq {

// Excess returns, N assets (rows) by T months (columns).
struct ReturnPanel {
    Eigen::MatrixXd values;
    std::vector<std::string> asset_ids;
    std::vector<std::string> time_ids;

    Eigen::Index n_assets() const { return values.rows(); }
    Eigen::Index n_periods() const { return values.cols(); }

    void validate() const {
        if (values.rows() < 1 || values.cols() < 1)
            throw DimensionMismatch("ReturnPanel requires N >= 1 and T >= 1");
        if (static_cast<Eigen::Index>(asset_ids.size()) != values.rows())
            throw DimensionMismatch("asset_ids length does not match row count");
        if (static_cast<Eigen::Index>(time_ids.size()) != values.cols())
            throw DimensionMismatch("time_ids length does not match column count");
        if (!values.allFinite())
            throw DomainError("ReturnPanel contains non-finite entries");
        std::unordered_set<std::string> seen(asset_ids.begin(), asset_ids.end());
        if (seen.size() != asset_ids.size())
            throw DomainError("asset_ids are not unique");
        if (!std::is_sorted(time_ids.begin(), time_ids.end(),
                            [](const std::string& a, const std::string& b) { return a < b; }))
            throw DomainError("time_ids are not strictly ordered");
        for (std::size_t i = 1; i < time_ids.size(); ++i)
            if (time_ids[i] == time_ids[i - 1])
                throw DomainError("time_ids contain duplicates");
    }
};

// Observed factor observations, T rows by p columns.
struct FactorPanel {
    Eigen::MatrixXd values;
    std::vector<std::string> factor_names;

    Eigen::Index n_periods() const { return values.rows(); }
    Eigen::Index n_factors() const { return values.cols(); }

    void validate() const {
        if (values.cols() < 1)
            throw DimensionMismatch("FactorPanel requires p >= 1");
        if (values.rows() <= values.cols() + 1)
            throw DimensionMismatch("FactorPanel requires T > p + 1 so that v >= 1");
        if (static_cast<Eigen::Index>(factor_names.size()) != values.cols())
            throw DimensionMismatch("factor_names length does not match column count");
        if (!values.allFinite())
            throw DomainError("FactorPanel contains non-finite entries");
    }
};

} // namespace alphaq
