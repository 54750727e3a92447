#pragma once

// Deterministic sequence families used as fixtures. Each family is built so
// that its membership in the arithmetic spaces is known by construction.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arith.hpp"
#include "error.hpp"
#include "lacunary.hpp"

namespace lacuna {

/// Values keyed by every divisor of n0.
class DivisorTable {
public:
    DivisorTable(std::int64_t n0, std::map<std::int64_t, double> values) : n0_(n0), values_(std::move(values))
    {
        if (n0 < 1)
            throw InvalidArgument("divisor table: n0 must be >= 1");
        const auto divs = divisors(n0);
        for (const auto& [d, v] : values_) {
            if (d < 1 || n0 % d != 0)
                throw InvalidArgument("divisor table: key " + std::to_string(d) + " does not divide " +
                                      std::to_string(n0));
            if (!std::isfinite(v))
                throw InvalidArgument("divisor table: value for " + std::to_string(d) + " is not finite");
        }
        for (const std::int64_t d : divs) {
            if (!values_.contains(d))
                throw InvalidArgument("divisor table for n0=" + std::to_string(n0) + " is missing divisor " +
                                      std::to_string(d));
        }
    }

    std::int64_t n0() const noexcept { return n0_; }
    double at(std::int64_t d) const { return values_.at(d); }
    const std::map<std::int64_t, double>& values() const noexcept { return values_; }

private:
    std::int64_t n0_;
    std::map<std::int64_t, double> values_;
};

enum class SpikePlacement { block_end, block_start };

namespace family {

/// x_m = table(<m, n0>).
struct GcdClass {
    DivisorTable table;
};

/// x_m = table(<m, n0>) + c / m.
struct PerturbedGcdClass {
    DivisorTable table;
    double decay;
};

/// Zero baseline with counts[r-1] entries of height heights[r-1] in block I_r.
/// block_end puts them at the largest indices of the block, block_start at the smallest.
struct BlockSpike {
    LacunaryPartition theta;
    std::vector<double> heights;
    std::vector<std::int64_t> counts;
    SpikePlacement placement = SpikePlacement::block_end;
};

/// prefix values at m = 1..len, then a constant tail.
struct ExplicitList {
    std::vector<double> prefix;
    double tail = 0.0;
};

/// x_m = m^(-a).
struct HarmonicLike {
    double exponent;
};

/// x_m = slope * m.
struct Linear {
    double slope;
};

/// x_m = alpha * lhs_m + beta * rhs_m; only names are kept for description.
struct Combination {
    double alpha;
    std::string lhs;
    double beta;
    std::string rhs;
};

} // namespace family

using FamilyParams = std::variant<family::GcdClass, family::PerturbedGcdClass, family::BlockSpike,
                                  family::ExplicitList, family::HarmonicLike, family::Linear, family::Combination>;

/// Immutable, bit-reproducible rule m -> x_m, total on m >= 1.
class Sequence {
public:
    Sequence(std::string name, FamilyParams params, std::function<double(Index)> rule, std::uint64_t seed = 0)
        : name_(std::move(name)), params_(std::make_shared<const FamilyParams>(std::move(params))),
          rule_(std::move(rule)), seed_(seed)
    {
    }

    const std::string& name() const noexcept { return name_; }
    const FamilyParams& params() const noexcept { return *params_; }
    std::uint64_t seed() const noexcept { return seed_; }

    double eval(Index m) const
    {
        if (m < 1)
            throw EvalError("sequence '" + name_ + "' evaluated below index 1", m);
        const double v = rule_(m);
        if (!std::isfinite(v))
            throw EvalError("sequence '" + name_ + "' produced a non-finite value", m);
        return v;
    }

    double operator()(Index m) const { return eval(m); }

    /// x(1..horizon) with values[m - 1] = x(m).
    std::vector<double> values(std::int64_t horizon) const
    {
        std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = eval(static_cast<Index>(i) + 1);
        return out;
    }

private:
    std::string name_;
    std::shared_ptr<const FamilyParams> params_;
    std::function<double(Index)> rule_;
    std::uint64_t seed_;
};

namespace detail {

inline std::string fmt_real(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string table_text(const DivisorTable& t)
{
    std::string s;
    for (const auto& [d, v] : t.values())
        s += ", " + std::to_string(d) + ":" + fmt_real(v);
    return s;
}

inline std::string points_text(const LacunaryPartition& theta)
{
    std::string s = "points(";
    for (std::size_t i = 0; i < theta.points().size(); ++i)
        s += (i ? ", " : "") + std::to_string(theta.point(i));
    return s + ")";
}

} // namespace detail

namespace sequences {

inline Sequence gcd_class(DivisorTable table)
{
    const std::int64_t n0 = table.n0();
    std::string name = "gcdclass(" + std::to_string(n0) + detail::table_text(table) + ")";
    auto rule = [table, n0](Index m) { return table.at(gcd(m, n0)); };
    return Sequence(std::move(name), family::GcdClass{std::move(table)}, std::move(rule));
}

inline Sequence perturbed_gcd_class(DivisorTable table, double decay)
{
    if (!(decay > 0.0) || !std::isfinite(decay))
        throw InvalidArgument("perturbed: decay c must be a finite real > 0");
    const std::int64_t n0 = table.n0();
    std::string name = "perturbed(" + std::to_string(n0) + ", " + detail::fmt_real(decay) +
                       detail::table_text(table) + ")";
    auto rule = [table, n0, decay](Index m) {
        return table.at(gcd(m, n0)) + decay / static_cast<double>(m);
    };
    return Sequence(std::move(name), family::PerturbedGcdClass{std::move(table), decay}, std::move(rule));
}

/// Per-block heights and spike counts; counts above h_r are clamped to h_r.
inline Sequence block_spike(const LacunaryPartition& theta, std::vector<double> heights,
                            std::vector<std::int64_t> counts,
                            SpikePlacement placement = SpikePlacement::block_end)
{
    const std::size_t blocks = theta.num_blocks();
    if (heights.size() != blocks || counts.size() != blocks)
        throw InvalidArgument("blockspike: need one height and one count per block (" + std::to_string(blocks) +
                              ")");
    for (std::size_t r = 1; r <= blocks; ++r) {
        if (!std::isfinite(heights[r - 1]))
            throw InvalidArgument("blockspike: non-finite height");
        if (counts[r - 1] < 0)
            throw InvalidArgument("blockspike: negative spike count");
    }
    std::string name = "blockspike(" + detail::points_text(theta) + ", ";
    const bool uniform = std::all_of(heights.begin(), heights.end(), [&](double h) { return h == heights.front(); }) &&
                         std::all_of(counts.begin(), counts.end(),
                                     [&](std::int64_t c) { return c == counts.front(); });
    if (uniform && blocks > 0) {
        name += detail::fmt_real(heights.front()) + ", " + std::to_string(counts.front());
    } else {
        name += "each(";
        for (std::size_t i = 0; i < blocks; ++i)
            name += (i ? ", " : "") + detail::fmt_real(heights[i]);
        name += "), each(";
        for (std::size_t i = 0; i < blocks; ++i)
            name += (i ? ", " : "") + std::to_string(counts[i]);
        name += ")";
    }
    name += placement == SpikePlacement::block_start ? ", start)" : ")";
    for (std::size_t r = 1; r <= blocks; ++r)
        counts[r - 1] = std::min(counts[r - 1], theta.gap(r));

    family::BlockSpike params{theta, std::move(heights), std::move(counts), placement};
    auto rule = [p = params](Index m) {
        const std::size_t r = p.theta.block_of(m);
        if (r == 0)
            return 0.0;
        const std::int64_t s = p.counts[r - 1];
        const IndexInterval b = p.theta.block(r);
        const bool spike = p.placement == SpikePlacement::block_end ? m > b.last - s : m < b.first + s;
        return spike ? p.heights[r - 1] : 0.0;
    };
    return Sequence(std::move(name), std::move(params), std::move(rule));
}

/// Uniform height and spike count in every block.
inline Sequence block_spike(const LacunaryPartition& theta, double height, std::int64_t spikes_per_block,
                            SpikePlacement placement = SpikePlacement::block_end)
{
    if (!(height > 0.0))
        throw InvalidArgument("blockspike: height H must be > 0");
    if (spikes_per_block < 1)
        throw InvalidArgument("blockspike: spikes per block must be >= 1");
    auto seq = block_spike(theta, std::vector<double>(theta.num_blocks(), height),
                           std::vector<std::int64_t>(theta.num_blocks(), spikes_per_block), placement);
    return seq;
}

inline Sequence explicit_list(std::vector<double> prefix, double tail = 0.0)
{
    for (const double v : prefix)
        if (!std::isfinite(v))
            throw InvalidArgument("explicit: non-finite prefix value");
    if (!std::isfinite(tail))
        throw InvalidArgument("explicit: non-finite tail");
    std::string name = "explicit(prefix(";
    for (std::size_t i = 0; i < prefix.size(); ++i)
        name += (i ? ", " : "") + detail::fmt_real(prefix[i]);
    name += "), " + detail::fmt_real(tail) + ")";
    auto rule = [prefix, tail](Index m) {
        return static_cast<std::size_t>(m) <= prefix.size() ? prefix[static_cast<std::size_t>(m - 1)] : tail;
    };
    return Sequence(std::move(name), family::ExplicitList{std::move(prefix), tail}, std::move(rule));
}

inline Sequence constant(double c)
{
    return explicit_list({}, c);
}

inline Sequence harmonic_like(double exponent)
{
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw InvalidArgument("harmonic: exponent a must be a finite real > 0");
    auto rule = [exponent](Index m) {
        return exponent == 1.0 ? 1.0 / static_cast<double>(m) : std::pow(static_cast<double>(m), -exponent);
    };
    return Sequence("harmonic(" + detail::fmt_real(exponent) + ")", family::HarmonicLike{exponent},
                    std::move(rule));
}

inline Sequence linear(double slope)
{
    if (!std::isfinite(slope))
        throw InvalidArgument("linear: slope must be finite");
    auto rule = [slope](Index m) { return slope * static_cast<double>(m); };
    return Sequence("linear(" + detail::fmt_real(slope) + ")", family::Linear{slope}, std::move(rule));
}

/// alpha * x + beta * y.
inline Sequence combine(double alpha, const Sequence& x, double beta, const Sequence& y)
{
    auto rule = [alpha, beta, x, y](Index m) { return alpha * x.eval(m) + beta * y.eval(m); };
    std::string name = detail::fmt_real(alpha) + "*" + x.name() + " + " + detail::fmt_real(beta) + "*" + y.name();
    return Sequence(std::move(name), family::Combination{alpha, x.name(), beta, y.name()}, std::move(rule));
}

} // namespace sequences

/// |x(m) - x(<m, n>)| for m = 1..horizon.
inline ResidualStream residuals(const Sequence& x, std::int64_t n, std::int64_t horizon)
{
    detail::require_positive(n, "witness n");
    detail::require_positive(horizon, "horizon M");
    return residuals_from_values(x.values(horizon), n);
}

} // namespace lacuna
