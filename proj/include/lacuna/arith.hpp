#pragma once

// Integer gcd machinery and the arithmetic residual |x_m - x_<m,n>|.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"

namespace lacuna {

/// 1-based sequence index. Index 0 does not exist.
using Index = std::int64_t;

/// Largest accepted index or gcd argument. Keeps m + n representable.
inline constexpr std::int64_t kMaxIndex = std::int64_t{1} << 62;

namespace detail {

inline void require_positive(std::int64_t v, const char* what)
{
    if (v < 1)
        throw InvalidArgument(std::string(what) + " must be >= 1, got " + std::to_string(v));
    if (v > kMaxIndex)
        throw InvalidArgument(std::string(what) + " exceeds the supported integer range");
}

} // namespace detail

/// Greatest common divisor of two positive integers (Euclid).
inline std::int64_t gcd(std::int64_t a, std::int64_t b)
{
    detail::require_positive(a, "gcd argument");
    detail::require_positive(b, "gcd argument");
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// <m, n>: the back-reference index used by arithmetic convergence.
inline Index arith_index(Index m, std::int64_t n)
{
    detail::require_positive(m, "index m");
    detail::require_positive(n, "witness n");
    return gcd(m, n);
}

/// Positive divisors of n in increasing order.
inline std::vector<std::int64_t> divisors(std::int64_t n)
{
    detail::require_positive(n, "n");
    std::vector<std::int64_t> low;
    std::vector<std::int64_t> high;
    for (std::int64_t d = 1; d <= n / d; ++d) {
        if (n % d == 0) {
            low.push_back(d);
            if (d != n / d)
                high.push_back(n / d);
        }
    }
    low.insert(low.end(), high.rbegin(), high.rend());
    return low;
}

/// Residuals |x_m - x_<m,n>| for m = 1..horizon, stored at values[m - 1].
struct ResidualStream {
    std::int64_t witness_n = 1;
    std::vector<double> values;

    std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(values.size()); }
    double at(Index m) const { return values.at(static_cast<std::size_t>(m - 1)); }
};

/// Residuals from precomputed sequence values x(1..M) (values[m - 1] = x(m)).
inline ResidualStream residuals_from_values(const std::vector<double>& x, std::int64_t n)
{
    detail::require_positive(n, "witness n");
    ResidualStream out;
    out.witness_n = n;
    out.values.resize(x.size());
    const auto horizon = static_cast<Index>(x.size());
    for (Index m = 1; m <= horizon; ++m) {
        const Index g = gcd(m, n);
        const double r = std::fabs(x[static_cast<std::size_t>(m - 1)] - x[static_cast<std::size_t>(g - 1)]);
        if (!std::isfinite(r))
            throw EvalError("non-finite residual", m);
        out.values[static_cast<std::size_t>(m - 1)] = r;
    }
    return out;
}

} // namespace lacuna
