#pragma once

// Theorem-check suites over the fixture library on one partition.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "fixtures.hpp"
#include "separator.hpp"
#include "theorems.hpp"

namespace lacuna::theorems {

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"linearity",   "ac_inclusion", "refinement",
                                                "liminf",      "partial_sum",  "modulus_split",
                                                "fisher",      "separator"};
    return names;
}

struct SuiteOptions {
    LacunaryPartition theta = LacunaryPartition::geometric(1, 2.0, 8);
    std::uint64_t seed = 0;
    std::size_t draws = 20;
    std::vector<std::string> suites{"all"};
    std::size_t separator_budget = 10000;
};

namespace detail {

inline CheckResult labelled(CheckResult r, const std::string& what)
{
    r.notes.insert(r.notes.begin(), what);
    return r;
}

/// Up to `count` distinct new points in (k_0, k_R]; empty when theta has no room.
inline std::vector<std::int64_t> random_refinement_points(Rng& rng, const LacunaryPartition& theta,
                                                          std::size_t count)
{
    const auto pts = theta.points();
    std::set<std::int64_t> chosen;
    for (std::size_t attempt = 0; attempt < 8 * count && chosen.size() < count; ++attempt) {
        const std::int64_t p = rng.integer(theta.k0() + 1, theta.last());
        if (!std::binary_search(pts.begin(), pts.end(), p))
            chosen.insert(p);
    }
    return {chosen.begin(), chosen.end()};
}

inline CheckResult separator_bound(const LacunaryPartition& theta, SeparatorTarget target, std::size_t budget)
{
    // With spikes confined to the tail blocks, max sigma over a block is at
    // most q_r times the largest tail block mean, and tau_r is at most
    // q_r / (q_r - 1) times sigma(k_r). A reported gap above these bounds
    // would mean the search or the means are wrong.
    SeparatorOptions opt;
    const std::size_t window = (theta.num_blocks() + 1) / 2;
    double bound = 0.0;
    for (std::size_t r = theta.num_blocks() - window + 1; r <= theta.num_blocks(); ++r) {
        const double q = theta.ratio(r).value();
        bound = std::max(bound, target == SeparatorTarget::theta_not_sigma ? q : q / (q - 1.0));
    }
    const auto found = search_separator(theta, target, budget, opt);
    CheckResult r;
    r.tag = "separator";
    if (!found) {
        r.slacks.push_back(inequality(0, "no separator; gap bound", bound));
        r.notes.push_back(std::string(to_string(target)) + ": none found within budget");
        return finish(r.tag, r.slacks, r.notes);
    }
    const double ratio = target == SeparatorTarget::theta_not_sigma ? found->sigma_stat / found->theta_stat
                                                                    : found->theta_stat / found->sigma_stat;
    r.slacks.push_back(inequality(0, "gap <= q-bound", bound - ratio));
    r.notes.push_back(std::string(to_string(target)) + ": found " + found->sequence.name() + " with gap " +
                      lacuna::detail::fmt_real(ratio));
    return finish(r.tag, r.slacks, r.notes);
}

} // namespace detail

/// Runs the selected suites. Results are ordered by suite, then fixture.
inline std::vector<CheckResult> run_suite(const SuiteOptions& opt)
{
    std::set<std::string> selected(opt.suites.begin(), opt.suites.end());
    const bool all = selected.contains("all");
    for (const auto& s : selected)
        if (s != "all" && std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw InvalidArgument("unknown suite '" + s + "'");
    auto want = [&](const char* name) { return all || selected.contains(name); };

    const auto& theta = opt.theta;
    const auto fixtures = fixtures::standard(theta);
    std::vector<CheckResult> out;
    Rng rng(opt.seed);

    if (want("linearity")) {
        for (std::size_t i = 0; i < opt.draws; ++i) {
            const Sequence x = fixtures::random_sequence(rng, theta);
            const Sequence y = fixtures::random_sequence(rng, theta);
            const double alpha = rng.uniform(-10.0, 10.0);
            const double beta = rng.uniform(-10.0, 10.0);
            const std::int64_t n = rng.integer(1, 12);
            out.push_back(detail::labelled(check_linearity(x, y, alpha, beta, theta, n),
                                           "x = " + x.name() + ", y = " + y.name() + ", n = " + std::to_string(n)));
        }
    }
    if (want("ac_inclusion")) {
        out.push_back(detail::labelled(check_ac_inclusion(fixtures[0], 1e-6, 6, theta, theta.last()), fixtures[0].name()));
        out.push_back(detail::labelled(check_ac_inclusion(fixtures[1], 2e-3, 6, theta, theta.last()), fixtures[1].name()));
        for (std::size_t i = 0; i < opt.draws; ++i) {
            const std::int64_t n0 = rng.integer(1, 24);
            const double c = rng.uniform(1e-4, 0.1);
            const Sequence x = sequences::perturbed_gcd_class(fixtures::random_table(rng, n0), c);
            out.push_back(detail::labelled(check_ac_inclusion(x, c, n0, theta, theta.last()), x.name()));
        }
    }
    if (want("refinement")) {
        for (std::size_t i = 0; i < opt.draws; ++i) {
            const auto extra = detail::random_refinement_points(rng, theta, 1 + static_cast<std::size_t>(rng.integer(0, 4)));
            const RefinementMap map = refine(theta, extra);
            const Sequence& x = fixtures[i % fixtures.size()];
            out.push_back(detail::labelled(check_refinement(x, map, rng.integer(1, 12)), x.name()));
        }
    }
    if (want("liminf")) {
        for (const auto& x : fixtures)
            for (const std::int64_t n : {1, 6})
                out.push_back(detail::labelled(check_liminf_inequality(x, theta, n),
                                               x.name() + ", n = " + std::to_string(n)));
    }
    if (want("partial_sum")) {
        for (const auto& x : fixtures)
            for (const std::int64_t n : {1, 6})
                out.push_back(detail::labelled(check_partial_sum_decomposition(x, theta, n),
                                               x.name() + ", n = " + std::to_string(n)));
    }
    if (want("modulus_split")) {
        for (const auto& f : fixtures::builtin_moduli())
            for (const auto& x : fixtures)
                for (const double delta : {0.5, 0.1})
                    out.push_back(detail::labelled(check_modulus_split(x, theta, f, 1, delta),
                                                   x.name() + ", f = " + f.name()));
    }
    if (want("fisher")) {
        for (const auto& f : fixtures::builtin_moduli())
            for (const double delta : {0.9, 0.5, 0.1, 0.01})
                out.push_back(check_fisher(f, delta));
    }
    if (want("separator") && theta.num_blocks() >= 2) {
        out.push_back(detail::separator_bound(theta, SeparatorTarget::theta_not_sigma, opt.separator_budget));
        out.push_back(detail::separator_bound(theta, SeparatorTarget::sigma_not_theta, opt.separator_budget));
    }
    return out;
}

} // namespace lacuna::theorems
