#pragma once

// JSON and CSV serialization of reports and check results.

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "sequence.hpp"
#include "theorems.hpp"

namespace lacuna::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/// Non-finite reals become null; JSON has no spelling for them.
inline Json real(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

inline Json reals(std::span<const double> v)
{
    Json out = Json::array();
    for (const double x : v)
        out.push_back(real(x));
    return out;
}

inline Json to_json(const ClassifyConfig& c)
{
    return Json{{"eps", c.eps},         {"tol", c.tol},       {"n_max", c.n_max},
                {"M", c.horizon_m},     {"T", c.horizon_t},   {"window", c.window}};
}

inline Json to_json(const SpaceEntry& e)
{
    return Json{{"tag", to_string(e.space)},
                {"witness_n", e.witness_n ? Json(*e.witness_n) : Json(nullptr)},
                {"tail_stat", real(e.tail_stat)},
                {"verdict", to_string(e.verdict)}};
}

inline Json to_json(const ConvergenceReport& r)
{
    Json spaces = Json::array();
    for (const auto& e : r.spaces)
        spaces.push_back(to_json(e));
    return Json{{"sequence", r.sequence},
                {"theta", lacuna::detail::points_text(r.theta)},
                {"modulus", r.modulus},
                {"spaces", std::move(spaces)},
                {"tau", reals(r.tau.tau)},
                {"sigma_block_max", reals(r.sigma_block_max)},
                {"tau_f", reals(r.tau_f.tau)}};
}

inline Json to_json(const theorems::Slack& s)
{
    return Json{{"index", s.index}, {"relation", s.relation}, {"value", real(s.value)}, {"bound", real(s.bound)},
                {"strict", s.strict}, {"ok", s.ok()}};
}

inline Json to_json(const theorems::CheckResult& c)
{
    Json slacks = Json::array();
    for (const auto& s : c.slacks)
        slacks.push_back(to_json(s));
    const auto* w = c.worst();
    return Json{{"tag", c.tag},
                {"status", theorems::to_string(c.status)},
                {"worst", w ? to_json(*w) : Json(nullptr)},
                {"slacks", std::move(slacks)},
                {"notes", c.notes}};
}

inline Json envelope(Json config, Json results)
{
    return Json{{"version", kVersion}, {"config", std::move(config)}, {"results", std::move(results)}};
}

/// `index,value` rows with shortest round-trip reals; index starts at `first`.
inline void write_csv(std::ostream& out, std::span<const double> values, std::int64_t first = 1)
{
    out << "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << first + static_cast<std::int64_t>(i) << ',' << lacuna::detail::fmt_real(values[i]) << '\n';
}

} // namespace lacuna::report
