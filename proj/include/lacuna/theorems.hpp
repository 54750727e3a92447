#pragma once

// Finite-scale forms of the inequalities behind the inclusion results for
// AC, AC_theta, AC_sigma1 and AC_theta(f). Each check evaluates both sides
// at every block r and records the slack; limits themselves are not tested.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "arith.hpp"
#include "lacunary.hpp"
#include "modulus.hpp"
#include "sequence.hpp"

namespace lacuna::theorems {

/// Slack tolerance on O(1)-normalized means.
inline constexpr double kSlackTolerance = 1e-9;

/// One evaluated relation. ok() iff value >= bound (value > bound when strict).
struct Slack {
    std::int64_t index = 0;
    std::string relation;
    double value = 0.0;
    double bound = -kSlackTolerance;
    bool strict = false;

    bool ok() const noexcept { return strict ? value > bound : value >= bound; }
};

enum class Status { pass, fail, hypothesis_not_met };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::hypothesis_not_met: return "hypothesis not met";
    }
    return "?";
}

struct CheckResult {
    std::string tag;
    Status status = Status::pass;
    std::vector<Slack> slacks;
    std::vector<std::string> notes;

    bool passed() const noexcept { return status == Status::pass; }

    /// Slack with the smallest margin over its bound.
    const Slack* worst() const noexcept
    {
        const Slack* w = nullptr;
        for (const auto& s : slacks)
            if (!w || s.value - s.bound < w->value - w->bound)
                w = &s;
        return w;
    }
};

namespace detail {

inline Slack inequality(std::int64_t index, std::string relation, double value)
{
    return Slack{index, std::move(relation), value, -kSlackTolerance, false};
}

/// |lhs - rhs| <= rel * max(|lhs|, |rhs|), stored as value = -|diff|.
inline Slack identity(std::int64_t index, std::string relation, double lhs, double rhs, double rel)
{
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    return Slack{index, std::move(relation), -std::fabs(lhs - rhs), -rel * scale, false};
}

inline CheckResult finish(std::string tag, std::vector<Slack> slacks, std::vector<std::string> notes = {})
{
    CheckResult r{std::move(tag), Status::pass, std::move(slacks), std::move(notes)};
    for (const auto& s : r.slacks)
        if (!s.ok())
            r.status = Status::fail;
    return r;
}

inline std::int64_t as_index(std::size_t r) { return static_cast<std::int64_t>(r); }

} // namespace detail

// ---------------------------------------------------------------------------
// Linearity: tau_r(a x + b y) <= |a| tau_r(x) + |b| tau_r(y).

struct LinearityInputs {
    BlockMeans combined;
    BlockMeans x;
    BlockMeans y;
    double alpha = 0.0;
    double beta = 0.0;
};

inline CheckResult check_linearity(const LinearityInputs& in)
{
    std::vector<Slack> slacks;
    for (std::size_t i = 0; i < in.combined.tau.size(); ++i) {
        const double rhs = std::fabs(in.alpha) * in.x.tau[i] + std::fabs(in.beta) * in.y.tau[i];
        slacks.push_back(detail::inequality(detail::as_index(i + 1), "tau(ax+by) <= |a|tau(x)+|b|tau(y)",
                                            rhs - in.combined.tau[i]));
    }
    return detail::finish("linearity", std::move(slacks));
}

inline CheckResult check_linearity(const Sequence& x, const Sequence& y, double alpha, double beta,
                                   const LacunaryPartition& theta, std::int64_t n)
{
    const Sequence z = sequences::combine(alpha, x, beta, y);
    return check_linearity(LinearityInputs{block_means(z, theta, n), block_means(x, theta, n),
                                           block_means(y, theta, n), alpha, beta});
}

// ---------------------------------------------------------------------------
// AC to AC_theta: sup residual < eps forces every tau_r < eps.

struct AcInclusionInputs {
    double sup_residual = 0.0;
    double eps = 0.0;
    BlockMeans tau;
};

inline CheckResult check_ac_inclusion(const AcInclusionInputs& in)
{
    if (!(in.sup_residual < in.eps)) {
        CheckResult r{"ac_inclusion", Status::hypothesis_not_met, {}, {}};
        r.notes.push_back("sup residual " + lacuna::detail::fmt_real(in.sup_residual) + " is not below eps " +
                          lacuna::detail::fmt_real(in.eps));
        return r;
    }
    std::vector<Slack> slacks;
    for (std::size_t i = 0; i < in.tau.tau.size(); ++i)
        slacks.push_back(Slack{detail::as_index(i + 1), "tau < eps", in.eps - in.tau.tau[i], 0.0, true});
    return detail::finish("ac_inclusion", std::move(slacks));
}

inline CheckResult check_ac_inclusion(const Sequence& x, double eps, std::int64_t n, const LacunaryPartition& theta,
                                      std::int64_t horizon)
{
    if (!(eps > 0.0))
        throw InvalidArgument("check_ac_inclusion: eps must be > 0");
    if (horizon < theta.last())
        throw InvalidArgument("check_ac_inclusion: M must be >= k_R");
    const auto res = residuals(x, n, horizon);
    const double sup = *std::max_element(res.values.begin(), res.values.end());
    return check_ac_inclusion(AcInclusionInputs{sup, eps, block_means(res, theta)});
}

// ---------------------------------------------------------------------------
// Refinement: h_r tau_r = sum_t h'_{r,t} tau'_{r,t} and tau_r <= max_t tau'_{r,t}.

struct RefinementInputs {
    RefinementMap map;
    BlockMeans parent;
    BlockMeans child;
};

inline constexpr double kRefinementRelTol = 1e-12;

inline CheckResult check_refinement(const RefinementInputs& in)
{
    const auto& map = in.map;
    std::vector<Slack> slacks;
    for (std::size_t r = 1; r <= map.parent.num_blocks(); ++r) {
        double weighted = 0.0;
        double best_child = 0.0;
        for (const std::size_t c : map.children[r - 1]) {
            weighted += static_cast<double>(map.child.gap(c)) * in.child.tau[c - 1];
            best_child = std::max(best_child, in.child.tau[c - 1]);
        }
        const double lhs = static_cast<double>(map.parent.gap(r)) * in.parent.tau[r - 1];
        slacks.push_back(detail::identity(detail::as_index(r), "h*tau = sum h'*tau'", lhs, weighted,
                                          kRefinementRelTol));
        slacks.push_back(detail::inequality(detail::as_index(r), "tau <= max tau'", best_child - in.parent.tau[r - 1]));
    }
    return detail::finish("refinement", std::move(slacks),
                          {"the sub-block comparison is checked as the convex-combination identity and max bound"});
}

inline CheckResult check_refinement(const Sequence& x, const RefinementMap& map, std::int64_t n)
{
    const auto res = residuals(x, n, map.parent.last());
    return check_refinement(RefinementInputs{map, block_means(res, map.parent), block_means(res, map.child)});
}

// ---------------------------------------------------------------------------
// liminf q_r > 1: sigma_{k_r} >= (h_r / k_r) tau_r, and with q_r >= 1 + delta
// for every r also sigma_{k_r} >= delta / (1 + delta) tau_r.

struct LiminfInputs {
    LacunaryPartition theta;
    BlockMeans tau;
    CesaroMeans sigma;
    std::optional<double> delta; ///< defaults to a value just below min_q - 1
};

/// Largest double delta with 1 + delta <= min_q.
inline double delta_from(const LacunaryPartition& theta)
{
    Ratio min_q = theta.ratio(1);
    for (std::size_t r = 2; r <= theta.num_blocks(); ++r)
        min_q = std::min(min_q, theta.ratio(r));
    double delta = static_cast<double>(min_q.num - min_q.den) / static_cast<double>(min_q.den);
    while (delta > 0.0 && !min_q.at_least(1.0 + delta))
        delta = std::nextafter(delta, 0.0);
    return delta;
}

inline CheckResult check_liminf_inequality(const LiminfInputs& in)
{
    const auto& theta = in.theta;
    if (static_cast<std::int64_t>(in.sigma.sigma.size()) < theta.last())
        throw InvalidArgument("check_liminf_inequality: Cesaro means must reach k_R");
    const double delta = in.delta.value_or(delta_from(theta));
    bool delta_applies = delta > 0.0;
    for (std::size_t r = 1; r <= theta.num_blocks() && delta_applies; ++r)
        delta_applies = theta.ratio(r).at_least(1.0 + delta);

    std::vector<Slack> slacks;
    std::vector<std::string> notes;
    for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
        const double sigma_k = in.sigma.sigma[static_cast<std::size_t>(theta.point(r) - 1)];
        const double tau = in.tau.tau[r - 1];
        const double lower = static_cast<double>(theta.gap(r)) * tau / static_cast<double>(theta.point(r));
        slacks.push_back(detail::inequality(detail::as_index(r), "sigma(k_r) >= (h_r/k_r) tau", sigma_k - lower));
        if (delta_applies)
            slacks.push_back(detail::inequality(detail::as_index(r), "sigma(k_r) >= delta/(1+delta) tau",
                                                sigma_k - delta / (1.0 + delta) * tau));
    }
    notes.push_back(delta_applies ? "delta = " + lacuna::detail::fmt_real(delta)
                                  : "min q_r < 1 + delta; only the h_r/k_r bound was checked");
    return detail::finish("liminf_inequality", std::move(slacks), std::move(notes));
}

inline CheckResult check_liminf_inequality(const Sequence& x, const LacunaryPartition& theta, std::int64_t n,
                                           std::optional<double> delta = std::nullopt)
{
    const auto res = residuals(x, n, theta.last());
    return check_liminf_inequality(LiminfInputs{theta, block_means(res, theta), cesaro_means(res, theta.last()), delta});
}

// ---------------------------------------------------------------------------
// limsup q_r < inf: sum_{m=k_0+1}^{k_r} residual = sum_{i<=r} h_i tau_i, and
// for t in [k_{r-1}, k_r], (1/t) sum_{m<=t} <= (1/k_{r-1}) sum_{m<=k_r}.

struct PartialSumInputs {
    LacunaryPartition theta;
    ResidualStream residuals;
    BlockMeans tau;
};

inline constexpr double kPartialSumRelTol = 1e-9;

inline CheckResult check_partial_sum_decomposition(const PartialSumInputs& in)
{
    const auto& theta = in.theta;
    const auto& v = in.residuals.values;
    if (in.residuals.horizon() < theta.last())
        throw InvalidArgument("check_partial_sum_decomposition: residuals must reach k_R");

    // prefix[t] = sum_{m <= t} residual(m)
    std::vector<double> prefix(static_cast<std::size_t>(theta.last()) + 1, 0.0);
    for (std::size_t t = 1; t < prefix.size(); ++t)
        prefix[t] = prefix[t - 1] + v[t - 1];

    std::vector<Slack> slacks;
    double block_total = 0.0;
    for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
        block_total += static_cast<double>(theta.gap(r)) * in.tau.tau[r - 1];
        const auto k_prev = static_cast<std::size_t>(theta.point(r - 1));
        const auto k_r = static_cast<std::size_t>(theta.point(r));
        const double direct = prefix[k_r] - prefix[static_cast<std::size_t>(theta.k0())];
        slacks.push_back(detail::identity(detail::as_index(r), "sum residual = sum h*tau", direct, block_total,
                                          kPartialSumRelTol));

        double worst = 0.0;
        for (std::size_t t = k_prev; t <= k_r; ++t)
            worst = std::max(worst, prefix[t] / static_cast<double>(t));
        slacks.push_back(detail::inequality(detail::as_index(r), "sigma(t) <= S(k_r)/k_{r-1}",
                                            prefix[k_r] / static_cast<double>(k_prev) - worst));
    }
    return detail::finish("partial_sum_decomposition", std::move(slacks));
}

inline CheckResult check_partial_sum_decomposition(const Sequence& x, const LacunaryPartition& theta, std::int64_t n)
{
    auto res = residuals(x, n, theta.last());
    auto tau = block_means(res, theta);
    return check_partial_sum_decomposition(PartialSumInputs{theta, std::move(res), std::move(tau)});
}

// ---------------------------------------------------------------------------
// Modulus split: tau_r^f <= f(delta) + 2 f(1) tau_r / delta, and when f
// declares beta, tau_r^f >= beta tau_r.

struct ModulusSplitInputs {
    BlockMeans tau;
    BlockMeans tau_f;
    double delta = 0.5;
};

inline CheckResult check_modulus_split(const ModulusSplitInputs& in, const Modulus& f)
{
    if (!(in.delta > 0.0 && in.delta < 1.0))
        throw InvalidArgument("check_modulus_split: delta must lie in (0, 1)");
    const double f_delta = f(in.delta);
    const double f_one = f(1.0);
    const auto beta = f.declared_beta();
    std::vector<Slack> slacks;
    for (std::size_t i = 0; i < in.tau.tau.size(); ++i) {
        const double upper = f_delta + 2.0 * f_one * in.tau.tau[i] / in.delta;
        slacks.push_back(detail::inequality(detail::as_index(i + 1), "tau_f <= f(delta) + 2f(1)tau/delta",
                                            upper - in.tau_f.tau[i]));
        if (beta)
            slacks.push_back(detail::inequality(detail::as_index(i + 1), "tau_f >= beta*tau",
                                                in.tau_f.tau[i] - *beta * in.tau.tau[i]));
    }
    return detail::finish("modulus_split", std::move(slacks), {"eps taken as f(delta) = sup of f on [0, delta]"});
}

inline CheckResult check_modulus_split(const Sequence& x, const LacunaryPartition& theta, const Modulus& f,
                                       std::int64_t n, double delta)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("check_modulus_split: delta must lie in (0, 1)");
    const auto res = residuals(x, n, theta.last());
    return check_modulus_split(ModulusSplitInputs{block_means(res, theta), modulus_block_means(res, theta, f), delta},
                               f);
}

// ---------------------------------------------------------------------------
// Fisher bound f(x) <= 2 f(1) x / delta, as a CheckResult.

inline CheckResult check_fisher(const Modulus& f, double delta)
{
    const auto grid = fisher_grid(delta);
    const auto res = fisher_check(f, delta, grid);
    std::vector<Slack> slacks{Slack{0, "f(x) <= 2f(1)x/delta at x = " + lacuna::detail::fmt_real(res.worst_x),
                                    res.min_slack, 0.0, false}};
    return detail::finish("fisher", std::move(slacks), {f.name() + ", delta = " + lacuna::detail::fmt_real(delta)});
}

} // namespace lacuna::theorems
