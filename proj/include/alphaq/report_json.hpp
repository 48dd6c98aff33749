#pragma once

// Flat JSON serialization of TestReport. Kept separate from statistics.hpp
// so translation units that never serialize do not pay for the JSON header.
// Field order is fixed and numbers use shortest round-trip formatting, so a
// given report always serializes to identical bytes.

#include <string>

#include <json.hpp>

#include "alphaq/statistics.hpp"

namespace alphaq {

inline nlohmann::ordered_json report_to_json(const TestReport& rep) {
    nlohmann::ordered_json j;
    j["n_assets"] = rep.n_assets;
    j["t_obs"] = rep.t_obs;
    j["n_factors"] = rep.n_factors;
    j["v"] = rep.v;
    j["q2"] = rep.q2;
    j["q4"] = rep.q4;
    j["q6"] = rep.q6;
    j["t2"] = rep.t2;
    j["t4"] = rep.t4;
    j["t6"] = rep.t6;
    j["l_inf"] = rep.l_inf;
    j["m_gumbel"] = rep.m_gumbel;
    j["p2"] = rep.p2;
    j["p4"] = rep.p4;
    j["p6"] = rep.p6;
    j["p_inf"] = rep.p_inf;
    j["p_minp"] = rep.p_minp;
    j["p_cauchy"] = rep.p_cauchy;
    j["s2"] = rep.aggregates.s2;
    j["s4"] = rep.aggregates.s4;
    j["s6"] = rep.aggregates.s6;
    j["s8"] = rep.aggregates.s8;
    j["tau"] = rep.aggregates.tau;
    j["retained_offdiag"] = rep.aggregates.retained_offdiag;
    return j;
}

inline std::string report_json_string(const TestReport& rep) {
    return report_to_json(rep).dump(2) + "\n";
}

} // namespace alphaq
