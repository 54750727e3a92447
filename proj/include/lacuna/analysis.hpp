#pragma once

// Finite-horizon functionals for the arithmetic sequence spaces:
//   AC      sup_m |x_m - x_<m,n>|
//   AC_th   block means      tau_r   = (1/h_r) sum_{m in I_r} |x_m - x_<m,n>|
//   AC_s1   Cesaro means     sigma_t = (1/t)   sum_{m <= t}   |x_m - x_<m,n>|
//   AC_th(f) modulus means   tau_r^f = (1/h_r) sum_{m in I_r} f(|x_m - x_<m,n>|)
//
// A finite prefix never proves a limit, so verdicts are three-valued.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arith.hpp"
#include "lacunary.hpp"
#include "modulus.hpp"
#include "parallel.hpp"
#include "sequence.hpp"

namespace lacuna {

struct BlockMeans {
    LacunaryPartition theta;
    std::int64_t witness_n = 1;
    std::vector<double> tau; ///< tau[r - 1] for r = 1..R
};

struct CesaroMeans {
    std::int64_t witness_n = 1;
    std::vector<double> sigma; ///< sigma[t - 1] for t = 1..T
};

struct AcWitness {
    std::int64_t n = 1;
    double sup_residual = 0.0;
};

enum class Verdict { consistent, inconsistent, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

enum class Space { ac, ac_theta, ac_sigma1, ac_theta_f };

inline const char* to_string(Space s)
{
    switch (s) {
    case Space::ac: return "AC";
    case Space::ac_theta: return "AC_theta";
    case Space::ac_sigma1: return "AC_sigma1";
    case Space::ac_theta_f: return "AC_theta(f)";
    }
    return "?";
}

namespace detail {

/// Per-block mean of transform(residual), summed left to right within the
/// block. The stored mean is capped at the block's largest transformed
/// residual: the exact mean never exceeds it and rounding in sum/h_r can.
template <typename Transform>
std::vector<double> block_means_of(const ResidualStream& res, const LacunaryPartition& theta, Transform transform)
{
    if (res.horizon() < theta.last())
        throw InvalidArgument("residual horizon " + std::to_string(res.horizon()) + " is shorter than k_R = " +
                              std::to_string(theta.last()));
    std::vector<double> tau(theta.num_blocks());
    parallel_for(tau.size(), [&](std::size_t i) {
        const IndexInterval b = theta.block(i + 1);
        double sum = 0.0;
        double top = 0.0;
        for (std::int64_t m = b.first; m <= b.last; ++m) {
            const double v = transform(res.values[static_cast<std::size_t>(m - 1)]);
            sum += v;
            top = std::max(top, v);
        }
        tau[i] = std::min(sum / static_cast<double>(b.size()), top);
    });
    return tau;
}

struct Identity {
    double operator()(double v) const noexcept { return v; }
};

} // namespace detail

/// Smallest n <= n_max whose residuals up to M all stay below eps.
/// Only divisors of n are back-referenced, so x is evaluated once.
inline std::optional<AcWitness> ac_witness(const Sequence& x, double eps, std::int64_t n_max, std::int64_t horizon)
{
    if (!(eps > 0.0))
        throw InvalidArgument("ac_witness: eps must be > 0");
    detail::require_positive(n_max, "n_max");
    detail::require_positive(horizon, "horizon M");
    const auto values = x.values(horizon);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double sup = 0.0;
        for (Index m = 1; m <= horizon && sup < eps; ++m) {
            const Index g = gcd(m, n);
            sup = std::max(sup, std::fabs(values[static_cast<std::size_t>(m - 1)] -
                                          values[static_cast<std::size_t>(g - 1)]));
        }
        if (sup < eps)
            return AcWitness{n, sup};
    }
    return std::nullopt;
}

/// Largest residual up to the horizon, per witness n = 1..n_max.
inline std::vector<double> sup_residuals(const std::vector<double>& values, std::int64_t n_max)
{
    std::vector<double> out;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const auto res = residuals_from_values(values, n);
        out.push_back(res.values.empty() ? 0.0 : *std::max_element(res.values.begin(), res.values.end()));
    }
    return out;
}

inline BlockMeans block_means(const ResidualStream& res, const LacunaryPartition& theta)
{
    return BlockMeans{theta, res.witness_n, detail::block_means_of(res, theta, detail::Identity{})};
}

inline BlockMeans block_means(const Sequence& x, const LacunaryPartition& theta, std::int64_t n)
{
    return block_means(residuals(x, n, theta.last()), theta);
}

inline BlockMeans modulus_block_means(const ResidualStream& res, const LacunaryPartition& theta, const Modulus& f)
{
    return BlockMeans{theta, res.witness_n, detail::block_means_of(res, theta, [&f](double v) { return f(v); })};
}

inline BlockMeans modulus_block_means(const Sequence& x, const LacunaryPartition& theta, const Modulus& f,
                                      std::int64_t n)
{
    return modulus_block_means(residuals(x, n, theta.last()), theta, f);
}

inline CesaroMeans cesaro_means(const ResidualStream& res, std::int64_t horizon)
{
    detail::require_positive(horizon, "horizon T");
    if (res.horizon() < horizon)
        throw InvalidArgument("residual horizon shorter than T");
    CesaroMeans out{res.witness_n, std::vector<double>(static_cast<std::size_t>(horizon))};
    double partial = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        partial += res.values[static_cast<std::size_t>(t - 1)];
        out.sigma[static_cast<std::size_t>(t - 1)] = partial / static_cast<double>(t);
    }
    return out;
}

inline CesaroMeans cesaro_means(const Sequence& x, std::int64_t n, std::int64_t horizon)
{
    detail::require_positive(horizon, "horizon T");
    return cesaro_means(residuals(x, n, horizon), horizon);
}

/// max_{t in I_r} sigma_t for every block: the Cesaro series on the block scale.
inline std::vector<double> block_maxima(const CesaroMeans& c, const LacunaryPartition& theta)
{
    if (static_cast<std::int64_t>(c.sigma.size()) < theta.last())
        throw InvalidArgument("Cesaro horizon T is shorter than k_R");
    std::vector<double> out(theta.num_blocks());
    for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
        const IndexInterval b = theta.block(r);
        out[r - 1] = *std::max_element(c.sigma.begin() + (b.first - 1), c.sigma.begin() + b.last);
    }
    return out;
}

inline std::span<const double> tail(std::span<const double> means, std::size_t window)
{
    if (window < 1 || window > means.size())
        throw InvalidArgument("window " + std::to_string(window) + " must lie in 1.." +
                              std::to_string(means.size()));
    return means.subspan(means.size() - window);
}

/// Largest entry among the last `window` means.
inline double tail_statistic(std::span<const double> means, std::size_t window)
{
    const auto t = tail(means, window);
    return *std::max_element(t.begin(), t.end());
}

/// consistent: every tail entry < tol. inconsistent: every tail entry > tol
/// and the tail is nondecreasing. Otherwise inconclusive.
inline Verdict verdict(std::span<const double> means, double tol, std::size_t window)
{
    if (!(tol > 0.0))
        throw InvalidArgument("verdict: tol must be > 0");
    const auto t = tail(means, window);
    if (*std::max_element(t.begin(), t.end()) < tol)
        return Verdict::consistent;
    const bool above = *std::min_element(t.begin(), t.end()) > tol;
    if (above && std::is_sorted(t.begin(), t.end()))
        return Verdict::inconsistent;
    return Verdict::inconclusive;
}

struct ClassifyConfig {
    double eps = 1e-6;          ///< AC sup-residual threshold
    std::int64_t n_max = 12;    ///< witness scan range 1..n_max
    std::int64_t horizon_m = 0; ///< AC horizon M; 0 means k_R
    std::int64_t horizon_t = 0; ///< Cesaro horizon T; 0 means k_R
    double tol = 1e-3;          ///< verdict threshold for the mean-based spaces
    std::size_t window = 0;     ///< tail window in blocks; 0 means ceil(R / 2)
};

struct SpaceEntry {
    Space space = Space::ac;
    std::optional<std::int64_t> witness_n;
    double tail_stat = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

struct ConvergenceReport {
    std::string sequence;
    std::string modulus;
    LacunaryPartition theta;
    ClassifyConfig config; ///< effective values (defaults resolved)
    std::vector<SpaceEntry> spaces;
    BlockMeans tau;
    CesaroMeans sigma;
    std::vector<double> sigma_block_max;
    BlockMeans tau_f;
};

/// Resolves zero defaults against theta and validates the config.
inline ClassifyConfig resolve(ClassifyConfig c, const LacunaryPartition& theta)
{
    const auto k_last = theta.last();
    if (c.horizon_m == 0)
        c.horizon_m = k_last;
    if (c.horizon_t == 0)
        c.horizon_t = k_last;
    if (c.window == 0)
        c.window = (theta.num_blocks() + 1) / 2;
    if (!(c.eps > 0.0) || !(c.tol > 0.0))
        throw InvalidArgument("eps and tol must be > 0");
    detail::require_positive(c.n_max, "n_max");
    if (c.horizon_m < k_last)
        throw InvalidArgument("M = " + std::to_string(c.horizon_m) + " is below k_R = " + std::to_string(k_last));
    if (c.horizon_t < k_last)
        throw InvalidArgument("T = " + std::to_string(c.horizon_t) + " is below k_R = " + std::to_string(k_last));
    if (c.window > theta.num_blocks())
        throw InvalidArgument("window " + std::to_string(c.window) + " exceeds the number of blocks " +
                              std::to_string(theta.num_blocks()));
    return c;
}

/// Verdicts for AC, AC_theta, AC_sigma1 and AC_theta(f). The mean-based
/// spaces share one witness: the n in 1..n_max minimizing the block-mean
/// tail statistic, ties to the smaller n.
inline ConvergenceReport classify(const Sequence& x, const LacunaryPartition& theta, const Modulus& f,
                                  ClassifyConfig config)
{
    config = resolve(config, theta);
    const std::int64_t horizon = std::max({config.horizon_m, config.horizon_t, config.n_max});
    const auto values = x.values(horizon);

    ConvergenceReport rep{x.name(), f.name(), theta, config, {}, BlockMeans{theta, 1, {}}, {}, {}, BlockMeans{theta, 1, {}}};

    // AC: the running sup is a lower bound for the full sup, so a miss on
    // the prefix rules out every n <= n_max at this eps.
    {
        const std::vector<double> prefix(values.begin(), values.begin() + config.horizon_m);
        const auto sups = sup_residuals(prefix, config.n_max);
        SpaceEntry e{Space::ac, std::nullopt, 0.0, Verdict::inconsistent};
        const auto best = std::min_element(sups.begin(), sups.end());
        e.tail_stat = *best;
        for (std::size_t i = 0; i < sups.size(); ++i) {
            if (sups[i] < config.eps) {
                e.witness_n = static_cast<std::int64_t>(i) + 1;
                e.tail_stat = sups[i];
                e.verdict = Verdict::consistent;
                break;
            }
        }
        if (!e.witness_n)
            e.witness_n = static_cast<std::int64_t>(best - sups.begin()) + 1;
        rep.spaces.push_back(e);
    }

    std::int64_t witness = 1;
    double best_stat = std::numeric_limits<double>::infinity();
    for (std::int64_t n = 1; n <= config.n_max; ++n) {
        const auto res = residuals_from_values(values, n);
        const auto tau = block_means(res, theta);
        const double stat = tail_statistic(tau.tau, config.window);
        if (stat < best_stat) {
            best_stat = stat;
            witness = n;
        }
    }

    const auto res = residuals_from_values(values, witness);
    rep.tau = block_means(res, theta);
    rep.sigma = cesaro_means(res, config.horizon_t);
    rep.sigma_block_max = block_maxima(rep.sigma, theta);
    rep.tau_f = modulus_block_means(res, theta, f);

    auto entry = [&](Space s, std::span<const double> series) {
        return SpaceEntry{s, witness, tail_statistic(series, config.window),
                          verdict(series, config.tol, config.window)};
    };
    rep.spaces.push_back(entry(Space::ac_theta, rep.tau.tau));
    rep.spaces.push_back(entry(Space::ac_sigma1, rep.sigma_block_max));
    rep.spaces.push_back(entry(Space::ac_theta_f, rep.tau_f.tau));
    return rep;
}

} // namespace lacuna
