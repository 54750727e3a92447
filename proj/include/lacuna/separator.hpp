#pragma once

// Heuristic search for block-spike sequences whose AC_theta and AC_sigma1
// verdicts disagree on a given partition. When 1 < q_r <= K the two block
// statistics stay within a factor of about K of each other, so a hit on
// such a partition would contradict the equality of the two spaces; on
// partitions violating that hypothesis a hit exhibits the gap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "lacunary.hpp"
#include "sequence.hpp"

namespace lacuna::theorems {

enum class SeparatorTarget {
    theta_not_sigma, ///< AC_theta consistent, AC_sigma1 inconsistent
    sigma_not_theta, ///< AC_sigma1 consistent, AC_theta inconsistent
};

inline const char* to_string(SeparatorTarget t)
{
    return t == SeparatorTarget::theta_not_sigma ? "theta_not_sigma" : "sigma_not_theta";
}

struct SeparatorOptions {
    double tol = 0.02;        ///< verdict threshold for both statistics
    std::size_t window = 0;   ///< tail blocks; 0 means ceil(R / 2)
    double gap_factor = 10.0; ///< required ratio between the tail statistics
};

struct Separator {
    Sequence sequence;
    std::vector<std::int64_t> counts;
    SpikePlacement placement = SpikePlacement::block_end;
    std::size_t window = 1;
    BlockMeans tau;                      ///< witness n = 1
    std::vector<double> sigma_block_max; ///< max of sigma_t over each block
    double theta_stat = 0.0;
    double sigma_stat = 0.0;
    Verdict theta_verdict = Verdict::inconclusive;
    Verdict sigma_verdict = Verdict::inconclusive;
    std::size_t iterations = 0;
};

namespace detail {

struct SpikeStats {
    std::vector<double> tau;
    std::vector<double> sigma_max;
};

/// Exact block statistics of a unit-height block spike at witness n = 1.
/// Residuals equal x_m because x_1 = 0 (index 1 lies in no block). Within a
/// block sigma_t is monotone on the spike run and decreasing elsewhere, so
/// its block maximum sits at the first index of the block or at the end of
/// the run.
inline SpikeStats spike_stats(const LacunaryPartition& theta, const std::vector<std::int64_t>& counts,
                              SpikePlacement placement)
{
    SpikeStats out{std::vector<double>(theta.num_blocks()), std::vector<double>(theta.num_blocks())};
    double before = 0.0;
    for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
        const std::int64_t h = theta.gap(r);
        const std::int64_t s = counts[r - 1];
        const auto k_prev = static_cast<double>(theta.point(r - 1));
        out.tau[r - 1] = static_cast<double>(s) / static_cast<double>(h);

        const bool first_is_spike = placement == SpikePlacement::block_start ? s >= 1 : s >= h;
        double best = (before + (first_is_spike ? 1.0 : 0.0)) / (k_prev + 1.0);
        if (s >= 1) {
            const double run_end = placement == SpikePlacement::block_start ? k_prev + static_cast<double>(s)
                                                                            : static_cast<double>(theta.point(r));
            best = std::max(best, (before + static_cast<double>(s)) / run_end);
        }
        out.sigma_max[r - 1] = best;
        before += static_cast<double>(s);
    }
    return out;
}

struct Scored {
    double score = -std::numeric_limits<double>::infinity();
    bool success = false;
};

inline Scored score(const SpikeStats& st, SeparatorTarget target, const SeparatorOptions& opt, std::size_t window)
{
    constexpr double kTiny = 1e-300;
    const auto th = tail(st.tau, window);
    const auto sg = tail(st.sigma_max, window);
    const double th_max = *std::max_element(th.begin(), th.end());
    const double th_min = *std::min_element(th.begin(), th.end());
    const double sg_max = *std::max_element(sg.begin(), sg.end());
    const double sg_min = *std::min_element(sg.begin(), sg.end());

    Scored s;
    if (target == SeparatorTarget::theta_not_sigma) {
        const double a = std::log(opt.tol / std::max(th_max, kTiny));
        const double b = std::log(std::max(sg_min, kTiny) / opt.tol);
        const double c = std::log(std::max(sg_max, kTiny) / (opt.gap_factor * std::max(th_max, kTiny)));
        s.score = std::min({a, b, c}) - (std::is_sorted(sg.begin(), sg.end()) ? 0.0 : 1.0);
        s.success = verdict(st.tau, opt.tol, window) == Verdict::consistent &&
                    verdict(st.sigma_max, opt.tol, window) == Verdict::inconsistent &&
                    sg_max >= opt.gap_factor * th_max;
    } else {
        const double a = std::log(std::max(th_min, kTiny) / opt.tol);
        const double b = std::log(opt.tol / std::max(sg_max, kTiny));
        const double c = std::log(std::max(th_max, kTiny) / (opt.gap_factor * std::max(sg_max, kTiny)));
        s.score = std::min({a, b, c}) - (std::is_sorted(th.begin(), th.end()) ? 0.0 : 1.0);
        s.success = verdict(st.tau, opt.tol, window) == Verdict::inconsistent &&
                    verdict(st.sigma_max, opt.tol, window) == Verdict::consistent &&
                    th_max >= opt.gap_factor * sg_max;
    }
    return s;
}

inline bool close(double a, double b)
{
    return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace detail

/// Coordinate ascent over spike counts in the last `window` blocks (earlier
/// blocks stay empty) and over the spike placement. Every objective
/// evaluation costs one unit of budget. Returns nullopt when no candidate
/// meets the verdict and gap requirements; that is not evidence that the
/// spaces coincide.
inline std::optional<Separator> search_separator(const LacunaryPartition& theta, SeparatorTarget target,
                                                 std::size_t budget, SeparatorOptions opt = {})
{
    if (budget == 0)
        throw InvalidArgument("search_separator: budget must be >= 1");
    if (!(opt.tol > 0.0) || !(opt.gap_factor >= 1.0))
        throw InvalidArgument("search_separator: tol must be > 0 and gap_factor >= 1");
    const std::size_t blocks = theta.num_blocks();
    const std::size_t window = opt.window == 0 ? (blocks + 1) / 2 : opt.window;
    if (window > blocks)
        throw InvalidArgument("search_separator: window exceeds the number of blocks");
    const std::size_t first_tail = blocks - window + 1;

    std::size_t used = 0;
    std::optional<Separator> found;

    auto evaluate = [&](const std::vector<std::int64_t>& counts, SpikePlacement placement) {
        ++used;
        return detail::score(detail::spike_stats(theta, counts, placement), target, opt, window);
    };

    const SpikePlacement placements[] = {SpikePlacement::block_start, SpikePlacement::block_end};
    for (const SpikePlacement placement : placements) {
        for (int start = 0; start < 2 && used < budget && !found; ++start) {
            std::vector<std::int64_t> counts(blocks, 0);
            for (std::size_t r = first_tail; r <= blocks; ++r)
                counts[r - 1] = start == 0 ? 1 : theta.gap(r);
            detail::Scored current = evaluate(counts, placement);

            while (used < budget && !current.success) {
                std::vector<std::int64_t> best_counts;
                detail::Scored best = current;
                for (std::size_t r = first_tail; r <= blocks && used < budget; ++r) {
                    const std::int64_t h = theta.gap(r);
                    const std::int64_t s = counts[r - 1];
                    const auto scaled = static_cast<std::int64_t>(std::llround(opt.tol * static_cast<double>(h)));
                    const auto root = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(h))));
                    std::set<std::int64_t> moves{0, 1, s - 1, s + 1, s / 2, 2 * s, h, h / 2, scaled, root,
                                                 theta.point(r - 1)};
                    for (std::int64_t cand : moves) {
                        cand = std::clamp<std::int64_t>(cand, 0, h);
                        if (cand == s || used >= budget)
                            continue;
                        auto trial = counts;
                        trial[r - 1] = cand;
                        const auto sc = evaluate(trial, placement);
                        if (sc.score > best.score || (sc.success && !best.success)) {
                            best = sc;
                            best_counts = std::move(trial);
                        }
                    }
                }
                if (best_counts.empty())
                    break;
                counts = std::move(best_counts);
                current = best;
            }
            if (!current.success)
                continue;

            // Recompute through the generic residual path and keep the
            // candidate only if it agrees with the closed form.
            Sequence x = sequences::block_spike(theta, std::vector<double>(blocks, 1.0), counts, placement);
            const auto res = residuals(x, 1, theta.last());
            BlockMeans tau = block_means(res, theta);
            auto sigma_max = block_maxima(cesaro_means(res, theta.last()), theta);
            const auto closed = detail::spike_stats(theta, counts, placement);
            for (std::size_t r = 0; r < blocks; ++r)
                if (!detail::close(tau.tau[r], closed.tau[r]) || !detail::close(sigma_max[r], closed.sigma_max[r]))
                    throw Error("search_separator: closed-form statistics disagree with direct summation at block " +
                                std::to_string(r + 1));

            Separator sep{std::move(x),   counts, placement, window, std::move(tau), std::move(sigma_max), 0.0,
                          0.0,            Verdict::inconclusive, Verdict::inconclusive, used};
            sep.theta_stat = tail_statistic(sep.tau.tau, window);
            sep.sigma_stat = tail_statistic(sep.sigma_block_max, window);
            sep.theta_verdict = verdict(sep.tau.tau, opt.tol, window);
            sep.sigma_verdict = verdict(sep.sigma_block_max, opt.tol, window);
            found = std::move(sep);
        }
        if (found || used >= budget)
            break;
    }
    return found;
}

} // namespace lacuna::theorems
