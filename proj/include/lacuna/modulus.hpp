#pragma once

// Modulus functions f: [0, inf) -> [0, inf): f(x) = 0 iff x = 0,
// subadditive, increasing, right-continuous at 0.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "sequence.hpp"

namespace lacuna {

class Modulus {
public:
    /// Wraps an arbitrary rule without axiom guarantees (for falsification tests).
    static Modulus candidate(std::string name, std::function<double(double)> rule,
                             std::optional<double> declared_beta = std::nullopt)
    {
        return Modulus(std::move(name), std::move(rule), declared_beta);
    }

    static Modulus identity()
    {
        return Modulus("identity()", [](double x) { return x; }, 1.0);
    }

    /// x^p for p in (0, 1].
    static Modulus power(double p)
    {
        if (!(p > 0.0 && p <= 1.0))
            throw InvalidArgument("power: exponent p must lie in (0, 1], got " + detail::fmt_real(p));
        auto rule = [p](double x) { return p == 0.5 ? std::sqrt(x) : std::pow(x, p); };
        return Modulus("power(" + detail::fmt_real(p) + ")", std::move(rule), p == 1.0 ? 1.0 : 0.0);
    }

    /// x / (1 + x).
    static Modulus bounded()
    {
        return Modulus("bounded()", [](double x) { return x / (1.0 + x); }, 0.0);
    }

    static Modulus sum(const Modulus& f, const Modulus& g)
    {
        std::optional<double> beta;
        if (f.declared_beta() && g.declared_beta())
            beta = *f.declared_beta() + *g.declared_beta();
        return Modulus("sum(" + f.name() + ", " + g.name() + ")",
                       [f, g](double x) { return f(x) + g(x); }, beta);
    }

    /// (f o g)(x) = f(g(x)).
    static Modulus compose(const Modulus& f, const Modulus& g)
    {
        return Modulus("compose(" + f.name() + ", " + g.name() + ")",
                       [f, g](double x) { return f(g(x)); }, std::nullopt);
    }

    /// f composed with itself i times.
    static Modulus iterate(const Modulus& f, std::int64_t times)
    {
        if (times < 1)
            throw InvalidArgument("iterate: count i must be >= 1");
        return Modulus("iterate(" + f.name() + ", " + std::to_string(times) + ")",
                       [f, times](double x) {
                           for (std::int64_t i = 0; i < times; ++i)
                               x = f(x);
                           return x;
                       },
                       std::nullopt);
    }

    const std::string& name() const noexcept { return name_; }
    const std::optional<double>& declared_beta() const noexcept { return declared_beta_; }

    double operator()(double x) const { return rule_(x); }

private:
    Modulus(std::string name, std::function<double(double)> rule, std::optional<double> beta)
        : name_(std::move(name)), rule_(std::move(rule)), declared_beta_(beta)
    {
    }

    std::string name_;
    std::function<double(double)> rule_;
    std::optional<double> declared_beta_;
};

/// `count` log-spaced points from lo to hi; both endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw InvalidArgument("log_grid needs 0 < lo < hi and at least two points");
    std::vector<double> grid(count);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

/// {0} together with 200 log-spaced points in [1e-8, 1e4].
inline std::vector<double> default_axiom_grid()
{
    auto grid = log_grid(1e-8, 1e4, 200);
    grid.insert(grid.begin(), 0.0);
    return grid;
}

struct AxiomCheck {
    bool pass = true;
    double x = 0.0;
    double y = 0.0;
    double violation = 0.0; ///< worst amount by which the axiom failed
};

struct AxiomReport {
    AxiomCheck zero;          ///< (i) f(x) = 0 iff x = 0
    AxiomCheck subadditive;   ///< (ii)
    AxiomCheck increasing;    ///< (iii)
    AxiomCheck right_continuous; ///< (iv), necessary-condition check only
    AxiomCheck lipschitz;     ///< |f(x) - f(y)| <= f(|x - y|)

    bool all_pass() const noexcept
    {
        return zero.pass && subadditive.pass && increasing.pass && right_continuous.pass && lipschitz.pass;
    }
};

inline constexpr double kAxiomTolerance = 1e-12;

/// Smallest exponent p for which x^p passes the right-continuity schedule.
inline constexpr double kRightContinuityExponent = 1e-3;

namespace detail {

inline void record(AxiomCheck& c, double violation, double x, double y)
{
    if (violation > c.violation) {
        c.pass = false;
        c.violation = violation;
        c.x = x;
        c.y = y;
    }
}

} // namespace detail

/// Checks the modulus axioms on a finite grid. Falsification only: a pass
/// means no counterexample was found on these points.
///
/// Right-continuity at 0 is probed two ways: f must strictly decrease along
/// the grid's positive points below 1, and f(10^-k) must stay under the
/// schedule f(1) * 10^(-k / 1000) for k = 1..12, so power(p) with
/// p < 1e-3 is reported as failing.
inline AxiomReport verify_axioms(const Modulus& f, std::span<const double> grid)
{
    if (grid.empty())
        throw InvalidArgument("verify_axioms: empty grid");
    std::vector<double> pts(grid.begin(), grid.end());
    for (const double v : pts)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidArgument("verify_axioms: grid points must be finite and nonnegative");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    AxiomReport rep;
    const double f0 = f(0.0);
    detail::record(rep.zero, std::fabs(f0), 0.0, 0.0);
    for (const double x : pts)
        if (x > 0.0 && !(f(x) > 0.0))
            detail::record(rep.zero, std::max(-f(x), std::numeric_limits<double>::min()), x, x);

    for (const double x : pts) {
        const double fx = f(x);
        for (const double y : pts) {
            const double fy = f(y);
            detail::record(rep.subadditive, f(x + y) - (fx + fy) - kAxiomTolerance, x, y);
            detail::record(rep.lipschitz, std::fabs(fx - fy) - f(std::fabs(x - y)) - kAxiomTolerance, x, y);
        }
    }

    for (std::size_t i = 1; i < pts.size(); ++i)
        detail::record(rep.increasing, f(pts[i - 1]) - f(pts[i]), pts[i - 1], pts[i]);

    std::vector<double> small;
    for (const double x : pts)
        if (x > 0.0 && x < 1.0)
            small.push_back(x);
    for (std::size_t i = 1; i < small.size(); ++i) {
        const double lo = f(small[i - 1]);
        const double hi = f(small[i]);
        if (!(lo < hi))
            detail::record(rep.right_continuous, std::max(lo - hi, std::numeric_limits<double>::min()),
                           small[i - 1], small[i]);
    }
    const double f1 = f(1.0);
    for (int k = 1; k <= 12; ++k) {
        const double eps = std::pow(10.0, -k);
        const double bound = f1 * std::pow(10.0, -k * kRightContinuityExponent);
        detail::record(rep.right_continuous, f(eps) - bound, eps, bound);
    }
    return rep;
}

inline AxiomReport verify_axioms(const Modulus& f)
{
    const auto grid = default_axiom_grid();
    return verify_axioms(f, grid);
}

struct FisherResult {
    bool pass = true;
    double min_slack = std::numeric_limits<double>::infinity();
    double worst_x = 0.0;
};

/// f(x) <= 2 f(1) x / delta for every grid point x >= delta.
inline FisherResult fisher_check(const Modulus& f, double delta, std::span<const double> grid)
{
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("fisher_check: delta must lie in (0, 1)");
    if (grid.empty())
        throw InvalidArgument("fisher_check: empty grid");
    const double f1 = f(1.0);
    FisherResult out;
    for (const double x : grid) {
        if (!(x >= delta))
            throw InvalidArgument("fisher_check: grid point " + detail::fmt_real(x) + " below delta");
        const double slack = 2.0 * f1 * x / delta - f(x);
        if (slack < out.min_slack) {
            out.min_slack = slack;
            out.worst_x = x;
        }
    }
    out.pass = out.min_slack >= 0.0;
    return out;
}

/// Log grid on [delta, 1e4] used for the Fisher bound.
inline std::vector<double> fisher_grid(double delta)
{
    return log_grid(delta, 1e4, 200);
}

struct BetaEstimate {
    double beta_hat = 0.0;
    /// f(t) >= beta * t at every grid point; empty when f declares no beta.
    std::optional<bool> lower_bound_ok;
};

/// min f(t)/t over 200 log-spaced points in [1, t_max].
inline BetaEstimate beta_estimate(const Modulus& f, double t_max)
{
    if (!(t_max >= 100.0) || !std::isfinite(t_max))
        throw InvalidArgument("beta_estimate: t_max must be >= 100");
    BetaEstimate out;
    out.beta_hat = std::numeric_limits<double>::infinity();
    const auto beta = f.declared_beta();
    if (beta)
        out.lower_bound_ok = true;
    for (const double t : log_grid(1.0, t_max, 200)) {
        const double ft = f(t);
        out.beta_hat = std::min(out.beta_hat, ft / t);
        if (beta) {
            const double lower = *beta * t;
            if (ft < lower - kAxiomTolerance * std::max(1.0, lower))
                out.lower_bound_ok = false;
        }
    }
    return out;
}

} // namespace lacuna
