#pragma once

// Fixture sequences with residuals in [0, 1] and a seeded generator for
// random draws. Draws depend only on the seed, never on thread scheduling.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lacunary.hpp"
#include "modulus.hpp"
#include "sequence.hpp"

namespace lacuna {

/// mt19937_64 with hand-rolled distributions so draws are identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t v = engine_();
        while (v >= limit)
            v = engine_();
        return lo + static_cast<std::int64_t>(v % span);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

namespace fixtures {

inline DivisorTable example_table()
{
    return DivisorTable(6, {{1, 0.1}, {2, 0.2}, {3, 0.3}, {6, 0.6}});
}

/// Divisor table of n0 with values uniform in [0, 1).
inline DivisorTable random_table(Rng& rng, std::int64_t n0)
{
    std::map<std::int64_t, double> values;
    for (const auto d : divisors(n0))
        values[d] = rng.unit();
    return DivisorTable(n0, std::move(values));
}

/// Deterministic fixture set on theta; every residual lies in [0, 1].
inline std::vector<Sequence> standard(const LacunaryPartition& theta)
{
    return {
        sequences::gcd_class(example_table()),
        sequences::perturbed_gcd_class(example_table(), 1e-3),
        sequences::harmonic_like(1.0),
        sequences::harmonic_like(0.5),
        sequences::harmonic_like(2.0),
        sequences::block_spike(theta, 1.0, 1),
        sequences::block_spike(theta, 1.0, 1, SpikePlacement::block_start),
        sequences::block_spike(theta, 0.5, 3),
        sequences::constant(0.3),
        sequences::explicit_list({0.9, 0.1, 0.5, 0.0, 0.7}, 0.25),
    };
}

/// A random fixture from one of the bounded families.
inline Sequence random_sequence(Rng& rng, const LacunaryPartition& theta)
{
    switch (rng.integer(0, 5)) {
    case 0:
        return sequences::gcd_class(random_table(rng, rng.integer(1, 24)));
    case 1:
        return sequences::perturbed_gcd_class(random_table(rng, rng.integer(1, 24)), rng.uniform(1e-4, 0.5));
    case 2:
        return sequences::harmonic_like(rng.uniform(0.1, 3.0));
    case 3: {
        std::vector<double> heights;
        std::vector<std::int64_t> counts;
        for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
            heights.push_back(rng.unit());
            counts.push_back(rng.integer(0, theta.gap(r)));
        }
        const auto placement = rng.integer(0, 1) ? SpikePlacement::block_start : SpikePlacement::block_end;
        return sequences::block_spike(theta, std::move(heights), std::move(counts), placement);
    }
    case 4: {
        std::vector<double> prefix(static_cast<std::size_t>(rng.integer(0, 40)));
        for (auto& v : prefix)
            v = rng.unit();
        return sequences::explicit_list(std::move(prefix), rng.unit());
    }
    default:
        return sequences::constant(rng.unit());
    }
}

/// geometric(1, rho, R) with rho in (1.1, 3) and R in [3, 12].
inline LacunaryPartition random_geometric(Rng& rng)
{
    return LacunaryPartition::geometric(1, rng.uniform(1.1, 3.0), rng.integer(3, 12));
}

/// The builtin moduli plus one instance of each combinator.
inline std::vector<Modulus> builtin_moduli()
{
    return {
        Modulus::identity(),
        Modulus::power(0.5),
        Modulus::power(1.0),
        Modulus::bounded(),
        Modulus::sum(Modulus::identity(), Modulus::bounded()),
        Modulus::compose(Modulus::power(0.5), Modulus::bounded()),
        Modulus::iterate(Modulus::bounded(), 3),
    };
}

} // namespace fixtures
} // namespace lacuna
