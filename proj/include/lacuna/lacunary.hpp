#pragma once

// Lacunary partitions theta = (k_r): block geometry I_r = (k_{r-1}, k_r],
// gaps h_r, exact ratios q_r, and refinements.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace lacuna {

/// Exact positive rational num/den, compared by cross-multiplication.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 1;

    __extension__ using wide = __int128;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Ratio& a, const Ratio& b) noexcept
    {
        return static_cast<wide>(a.num) * b.den == static_cast<wide>(b.num) * a.den;
    }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) noexcept
    {
        return static_cast<wide>(a.num) * b.den <=> static_cast<wide>(b.num) * a.den;
    }

    /// num/den >= bound, evaluated as num >= bound * den.
    bool at_least(double bound) const noexcept
    {
        return static_cast<long double>(num) >= static_cast<long double>(bound) * den;
    }
};

/// Closed integer interval {first, ..., last}.
struct IndexInterval {
    std::int64_t first = 1;
    std::int64_t last = 0;

    std::int64_t size() const noexcept { return last - first + 1; }
    bool contains(std::int64_t m) const noexcept { return first <= m && m <= last; }

    friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

/// Prefix proxies for liminf / limsup of q_r.
struct RatioStats {
    Ratio min_q;
    Ratio max_q;
    Ratio tail_min_q;
    Ratio tail_max_q;
};

class LacunaryPartition {
public:
    /// Validates strictly increasing points with k_0 >= 1.
    static LacunaryPartition from_points(std::vector<std::int64_t> points)
    {
        if (points.empty())
            throw InvalidArgument("lacunary partition needs at least one point");
        if (points.front() < 1)
            throw InvalidArgument("first point k_0 must be >= 1, got " + std::to_string(points.front()));
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i] <= points[i - 1])
                throw InvalidArgument("points are not strictly increasing at position " + std::to_string(i) +
                                      " (" + std::to_string(points[i - 1]) + " then " +
                                      std::to_string(points[i]) + ")");
        }
        return LacunaryPartition(std::move(points));
    }

    /// k_r = max(k_{r-1} + h_{r-1} + 1, ceil(k0 * rho^r)), r = 1..R, with h_0 = 0.
    ///
    /// The first term forces the gaps h_r to increase strictly on the
    /// prefix; for rho >= 2 the ceiling dominates and k_r = ceil(k0 rho^r).
    static LacunaryPartition geometric(std::int64_t k0, double rho, std::int64_t blocks)
    {
        if (k0 < 1)
            throw InvalidArgument("geometric: k0 must be >= 1");
        if (!(rho > 1.0) || !std::isfinite(rho))
            throw InvalidArgument("geometric: rho must be a finite real > 1");
        if (blocks < 1)
            throw InvalidArgument("geometric: R must be >= 1");
        constexpr double kLimit = 9.0e15; // exact integers in double
        std::vector<std::int64_t> pts{k0};
        pts.reserve(static_cast<std::size_t>(blocks) + 1);
        std::int64_t prev_gap = 0;
        for (std::int64_t r = 1; r <= blocks; ++r) {
            const double target = std::ceil(static_cast<double>(k0) * std::pow(rho, static_cast<double>(r)));
            const double floor_pt = static_cast<double>(pts.back()) + static_cast<double>(prev_gap) + 1.0;
            const double next = std::max(target, floor_pt);
            if (!(next < kLimit))
                throw InvalidArgument("geometric: point k_" + std::to_string(r) + " overflows the index range");
            const auto k = static_cast<std::int64_t>(next);
            prev_gap = k - pts.back();
            pts.push_back(k);
        }
        return LacunaryPartition(std::move(pts));
    }

    std::span<const std::int64_t> points() const noexcept { return points_; }
    std::int64_t point(std::size_t r) const { return points_.at(r); }
    std::int64_t k0() const noexcept { return points_.front(); }
    std::int64_t last() const noexcept { return points_.back(); }
    std::size_t num_blocks() const noexcept { return points_.size() - 1; }

    /// h_r for r = 1..R.
    std::int64_t gap(std::size_t r) const
    {
        check_block(r);
        return points_[r] - points_[r - 1];
    }

    /// q_r = k_r / k_{r-1} for r = 1..R.
    Ratio ratio(std::size_t r) const
    {
        check_block(r);
        return Ratio{points_[r], points_[r - 1]};
    }

    /// I_r = (k_{r-1}, k_r].
    IndexInterval block(std::size_t r) const
    {
        check_block(r);
        return IndexInterval{points_[r - 1] + 1, points_[r]};
    }

    /// Block containing m, or 0 when m <= k_0 or m > k_R.
    std::size_t block_of(std::int64_t m) const noexcept
    {
        if (m <= points_.front() || m > points_.back())
            return 0;
        const auto it = std::lower_bound(points_.begin(), points_.end(), m);
        return static_cast<std::size_t>(it - points_.begin());
    }

    /// Non-fatal diagnostics, e.g. gaps not increasing on the finite prefix.
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    friend bool operator==(const LacunaryPartition& a, const LacunaryPartition& b) noexcept
    {
        return a.points_ == b.points_;
    }

private:
    explicit LacunaryPartition(std::vector<std::int64_t> pts) : points_(std::move(pts))
    {
        for (std::size_t r = 2; r < points_.size(); ++r) {
            if (points_[r] - points_[r - 1] <= points_[r - 1] - points_[r - 2]) {
                warnings_.push_back("h not increasing on prefix (h_" + std::to_string(r) +
                                    " <= h_" + std::to_string(r - 1) + ")");
                break;
            }
        }
    }

    void check_block(std::size_t r) const
    {
        if (r < 1 || r > num_blocks())
            throw InvalidArgument("block index " + std::to_string(r) + " out of range 1.." +
                                  std::to_string(num_blocks()));
    }

    std::vector<std::int64_t> points_;
    std::vector<std::string> warnings_;
};

/// theta' with points(theta) a subset of points(theta'), plus the child
/// blocks (r, t), t = 1..eta(r), that tile each parent block I_r.
struct RefinementMap {
    LacunaryPartition parent;
    LacunaryPartition child;
    /// children[r - 1] lists the 1-based child block indices inside parent block r.
    std::vector<std::vector<std::size_t>> children;
};

inline RefinementMap refine(const LacunaryPartition& theta, std::vector<std::int64_t> extra)
{
    const auto pts = theta.points();
    std::sort(extra.begin(), extra.end());
    for (std::size_t i = 0; i < extra.size(); ++i) {
        const std::int64_t e = extra[i];
        if (e <= theta.k0() || e > theta.last())
            throw InvalidArgument("refinement point " + std::to_string(e) + " outside (k_0, k_R] = (" +
                                  std::to_string(theta.k0()) + ", " + std::to_string(theta.last()) + "]");
        if ((i > 0 && extra[i - 1] == e) || std::binary_search(pts.begin(), pts.end(), e))
            throw InvalidArgument("refinement point " + std::to_string(e) + " is duplicated");
    }

    std::vector<std::int64_t> merged(pts.begin(), pts.end());
    merged.insert(merged.end(), extra.begin(), extra.end());
    std::sort(merged.begin(), merged.end());

    RefinementMap map{theta, LacunaryPartition::from_points(merged), {}};
    map.children.resize(theta.num_blocks());
    for (std::size_t c = 1; c <= map.child.num_blocks(); ++c) {
        const std::size_t parent_block = theta.block_of(map.child.point(c));
        map.children[parent_block - 1].push_back(c);
    }
    for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
        std::int64_t total = 0;
        for (const std::size_t c : map.children[r - 1])
            total += map.child.gap(c);
        if (total != theta.gap(r))
            throw Error("refinement does not conserve block " + std::to_string(r));
    }
    return map;
}

/// Min/max of q_r over all blocks and over the last ceil(R/2) blocks.
inline RatioStats ratio_stats(const LacunaryPartition& theta)
{
    const std::size_t blocks = theta.num_blocks();
    if (blocks < 2)
        throw InvalidArgument("ratio_stats needs at least 2 blocks, got " + std::to_string(blocks));
    const std::size_t tail_start = blocks - (blocks + 1) / 2 + 1;
    RatioStats s{theta.ratio(1), theta.ratio(1), theta.ratio(tail_start), theta.ratio(tail_start)};
    for (std::size_t r = 1; r <= blocks; ++r) {
        const Ratio q = theta.ratio(r);
        s.min_q = std::min(s.min_q, q);
        s.max_q = std::max(s.max_q, q);
        if (r >= tail_start) {
            s.tail_min_q = std::min(s.tail_min_q, q);
            s.tail_max_q = std::max(s.tail_max_q, q);
        }
    }
    return s;
}

} // namespace lacuna
