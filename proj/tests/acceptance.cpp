// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lacuna/lacuna.hpp"
#include "oracle.hpp"

using namespace lacuna;
using namespace lacuna::theorems;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::vector<std::int64_t> pts(const LacunaryPartition& t)
{
    return {t.points().begin(), t.points().end()};
}

double min_slack(const CheckResult& r)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : r.slacks)
        m = std::min(m, s.value);
    return m;
}

std::string num(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

const std::vector<LacunaryPartition>& standard_thetas()
{
    static const std::vector<LacunaryPartition> t{LacunaryPartition::geometric(1, 1.3, 10),
                                                  LacunaryPartition::geometric(1, 2.0, 10),
                                                  LacunaryPartition::geometric(1, 3.0, 10)};
    return t;
}

// 1
Outcome kernel_exactness()
{
    std::int64_t pairs = 0;
    for (std::int64_t n = 1; n <= 64; ++n) {
        for (std::int64_t m = 1; m <= 10000; ++m) {
            const std::int64_t g = arith_index(m, n);
            if (n % g != 0 || m % g != 0 || arith_index(m + n, n) != g || g != oracle::gcd(m, n))
                return {false, "m = " + std::to_string(m) + ", n = " + std::to_string(n)};
            ++pairs;
        }
    }
    return {true, std::to_string(pairs) + " pairs"};
}

// 2
Outcome finite_ac_inclusion()
{
    Rng rng(2);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        const std::int64_t n0 = rng.integer(1, 24);
        const double c = rng.uniform(1e-4, 0.1);
        const double eps = c;
        const Sequence x = sequences::perturbed_gcd_class(fixtures::random_table(rng, n0), c);
        for (const auto& theta : standard_thetas()) {
            const double sup = oracle::sup_residual(x, n0, theta.last());
            if (!(sup < eps))
                return {false, x.name() + ": oracle sup " + num(sup) + " is not below eps"};
            const auto r = check_ac_inclusion(x, eps, n0, theta, theta.last());
            if (!r.passed())
                return {false, x.name() + ": " + to_string(r.status)};
            const auto tau = oracle::block_means(oracle::residuals(x, n0, theta.last()), pts(theta));
            for (const double t : tau)
                if (!(t < eps))
                    return {false, x.name() + ": oracle tau " + num(t) + " >= eps"};
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " (fixture, theta) pairs"};
}

// 3
Outcome linearity()
{
    Rng rng(3);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 500; ++i) {
        const auto theta = fixtures::random_geometric(rng);
        const Sequence x = fixtures::random_sequence(rng, theta);
        const Sequence y = fixtures::random_sequence(rng, theta);
        const double alpha = rng.uniform(-10.0, 10.0);
        const double beta = rng.uniform(-10.0, 10.0);
        const std::int64_t n = rng.integer(1, 12);
        const auto r = check_linearity(x, y, alpha, beta, theta, n);
        worst = std::min(worst, min_slack(r));
        if (!r.passed())
            return {false, x.name() + ", " + y.name() + ": slack " + num(min_slack(r))};
    }
    return {true, "500 draws, min slack " + num(worst)};
}

// 4
Outcome refinement()
{
    Rng rng(4);
    double worst_rel = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto theta = fixtures::random_geometric(rng);
        std::set<std::int64_t> extra;
        const auto base = pts(theta);
        for (int j = 0; j < 8; ++j) {
            const auto p = rng.integer(theta.k0() + 1, theta.last());
            if (!std::binary_search(base.begin(), base.end(), p))
                extra.insert(p);
        }
        const auto map = refine(theta, {extra.begin(), extra.end()});
        const Sequence x = fixtures::random_sequence(rng, theta);
        const std::int64_t n = rng.integer(1, 12);
        const auto r = check_refinement(x, map, n);
        if (!r.passed())
            return {false, x.name() + ": slack " + num(min_slack(r))};

        const auto res = oracle::residuals(x, n, theta.last());
        const auto parent = oracle::block_means(res, pts(map.parent));
        const auto child = oracle::block_means(res, pts(map.child));
        for (std::size_t b = 1; b <= theta.num_blocks(); ++b) {
            long double weighted = 0.0L;
            double top = 0.0;
            for (const auto c : map.children[b - 1]) {
                weighted += static_cast<long double>(map.child.gap(c)) * child[c - 1];
                top = std::max(top, child[c - 1]);
            }
            const double lhs = static_cast<double>(theta.gap(b)) * parent[b - 1];
            const double diff = std::fabs(lhs - static_cast<double>(weighted));
            const double scale = std::max(std::fabs(lhs), 1e-300);
            worst_rel = std::max(worst_rel, lhs == 0.0 && weighted == 0.0L ? 0.0 : diff / scale);
            if (diff > 1e-12 * scale || parent[b - 1] > top * (1 + 1e-15))
                return {false, x.name() + ": oracle disagrees at block " + std::to_string(b)};
        }
    }
    return {true, "100 refinements, worst relative identity error " + num(worst_rel)};
}

std::vector<Sequence> all_fixtures(const LacunaryPartition& theta)
{
    return fixtures::standard(theta);
}

// 5
Outcome liminf()
{
    double worst = std::numeric_limits<double>::infinity();
    int count = 0;
    std::vector<LacunaryPartition> thetas = standard_thetas();
    thetas.push_back(LacunaryPartition::from_points({1, 2, 4, 8}));
    thetas.push_back(LacunaryPartition::from_points({2, 4, 16, 256, 65536}));
    for (const auto& theta : thetas) {
        for (const auto& x : all_fixtures(theta)) {
            for (const std::int64_t n : {1, 6}) {
                const auto r = check_liminf_inequality(x, theta, n);
                worst = std::min(worst, min_slack(r));
                if (!r.passed())
                    return {false, x.name() + ": slack " + num(min_slack(r))};
                ++count;
            }
        }
    }
    return {true, std::to_string(count) + " checks, min slack " + num(worst)};
}

// 6
Outcome partial_sums()
{
    int count = 0;
    std::vector<LacunaryPartition> thetas = standard_thetas();
    thetas.push_back(LacunaryPartition::geometric(1, 2.0, 16));
    thetas.push_back(LacunaryPartition::from_points({2, 4, 16, 256, 65536}));
    double worst_rel = 0.0;
    for (const auto& theta : thetas) {
        if (theta.last() > 100000)
            continue;
        for (const auto& x : all_fixtures(theta)) {
            for (const std::int64_t n : {1, 6}) {
                const auto r = check_partial_sum_decomposition(x, theta, n);
                if (!r.passed())
                    return {false, x.name() + ": " + r.worst()->relation};
                const auto res = oracle::residuals(x, n, theta.last());
                const auto P = pts(theta);
                const auto tau = oracle::block_means(res, P);
                long double direct = 0.0L;
                long double blocks = 0.0L;
                for (std::size_t b = 1; b < P.size(); ++b) {
                    for (std::int64_t m = P[b - 1] + 1; m <= P[b]; ++m)
                        direct += res[static_cast<std::size_t>(m - 1)];
                    blocks += static_cast<long double>(P[b] - P[b - 1]) * tau[b - 1];
                    if (direct != 0.0L) {
                        const auto e = static_cast<double>(std::fabs(direct - blocks) / std::fabs(direct));
                        if (e > kPartialSumRelTol)
                            return {false, x.name() + ": oracle identity error " + num(e)};
                        worst_rel = std::max(worst_rel, e);
                    }
                }
                ++count;
            }
        }
    }
    return {true, std::to_string(count) + " checks, worst relative identity error " + num(worst_rel)};
}

// 7
Outcome fisher()
{
    int count = 0;
    for (const auto& f : fixtures::builtin_moduli()) {
        for (const double delta : {0.9, 0.5, 0.1, 0.01}) {
            const auto r = fisher_check(f, delta, fisher_grid(delta));
            if (!r.pass)
                return {false, f.name() + ", delta " + num(delta) + ": slack " + num(r.min_slack)};
            ++count;
        }
    }
    return {true, std::to_string(count) + " (modulus, delta) pairs"};
}

// 8
Outcome modulus_split()
{
    int count = 0;
    for (const auto& theta : standard_thetas()) {
        for (const auto& x : all_fixtures(theta)) {
            for (const auto& f : fixtures::builtin_moduli()) {
                for (const double delta : {0.5, 0.1}) {
                    const auto r = check_modulus_split(x, theta, f, 1, delta);
                    if (!r.passed())
                        return {false, x.name() + ", " + f.name() + ": slack " + num(min_slack(r))};
                    ++count;
                }
            }
            const auto res = residuals(x, 1, theta.last());
            if (modulus_block_means(res, theta, Modulus::identity()).tau != block_means(res, theta).tau)
                return {false, x.name() + ": identity tau_f differs from tau"};
        }
    }
    return {true, std::to_string(count) + " checks"};
}

// 9
Outcome identity_modulus()
{
    int count = 0;
    std::vector<LacunaryPartition> thetas = standard_thetas();
    thetas.push_back(LacunaryPartition::from_points({2, 4, 16, 256, 65536}));
    for (const auto& theta : thetas) {
        for (const auto& x : all_fixtures(theta)) {
            for (std::int64_t n = 1; n <= 12; ++n) {
                const auto a = modulus_block_means(x, theta, Modulus::identity(), n).tau;
                const auto b = block_means(x, theta, n).tau;
                for (std::size_t r = 0; r < a.size(); ++r)
                    if (std::bit_cast<std::uint64_t>(a[r]) != std::bit_cast<std::uint64_t>(b[r]))
                        return {false, x.name() + ", n = " + std::to_string(n)};
                ++count;
            }
        }
    }
    return {true, std::to_string(count) + " (fixture, theta, n) triples bitwise equal"};
}

// 10
Outcome separator()
{
    std::string detail;
    for (const double rho : {2.0, 3.0}) {
        for (const std::int64_t R : {5, 10, 16}) {
            const auto theta = LacunaryPartition::geometric(1, rho, R);
            for (const auto target : {SeparatorTarget::theta_not_sigma, SeparatorTarget::sigma_not_theta}) {
                if (const auto found = search_separator(theta, target, 10000))
                    return {false, "geometric(1, " + num(rho) + ", " + std::to_string(R) + ") " + to_string(target) +
                                       " found " + found->sequence.name()};
            }
        }
    }
    detail = "none on geometric q = 2, 3; ";

    const auto theta = LacunaryPartition::from_points({2, 4, 16, 256, 65536});
    const auto sep = search_separator(theta, SeparatorTarget::theta_not_sigma, 10000);
    if (!sep)
        return {false, detail + "no candidate on points(2, 4, 16, 256, 65536)"};

    const auto res = oracle::residuals(sep->sequence, 1, theta.last());
    const auto tau = oracle::block_means(res, pts(theta));
    const auto smax = oracle::block_max(oracle::cesaro_running(res, theta.last()), pts(theta));
    const double theta_stat = tail_statistic(tau, sep->window);
    const double sigma_stat = tail_statistic(smax, sep->window);
    const SeparatorOptions opt;
    if (verdict(tau, opt.tol, sep->window) != Verdict::consistent ||
        verdict(smax, opt.tol, sep->window) != Verdict::inconsistent)
        return {false, detail + "oracle verdicts do not differ for " + sep->sequence.name()};
    if (!(sigma_stat >= 10.0 * theta_stat))
        return {false, detail + "oracle gap " + num(sigma_stat / theta_stat) + " below 10"};
    return {true, detail + sep->sequence.name() + " gap " + num(sigma_stat / theta_stat)};
}

// 11
Outcome oracle_equivalence()
{
    Rng rng(11);
    const auto moduli = fixtures::builtin_moduli();
    double worst = 0.0;
    auto rel = [&](double a, double b) {
        if (a == b)
            return 0.0;
        const double e = std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
        worst = std::max(worst, e);
        return e;
    };
    auto same_series = [&](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (rel(a[i], b[i]) > 1e-12)
                return false;
        return true;
    };
    // Slacks are differences of O(1) means; compare them on that scale.
    auto same_check = [&](const CheckResult& r, const std::vector<double>& expect, std::size_t stride,
                          std::size_t offset) {
        for (std::size_t i = 0; i < expect.size(); ++i) {
            const double got = r.slacks[i * stride + offset].value;
            if (std::fabs(got - expect[i]) > 1e-12 * std::max({1.0, std::fabs(got), std::fabs(expect[i])}))
                return false;
        }
        bool oracle_pass = true;
        for (const double e : expect)
            oracle_pass = oracle_pass && e >= -kSlackTolerance;
        return oracle_pass == (r.status == Status::pass);
    };

    for (int i = 0; i < 50; ++i) {
        const auto theta = fixtures::random_geometric(rng);
        const auto P = pts(theta);
        const Sequence x = fixtures::random_sequence(rng, theta);
        const Sequence y = fixtures::random_sequence(rng, theta);
        const std::int64_t n = rng.integer(1, 12);
        const Modulus& f = moduli[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(moduli.size()) - 1))];
        const std::string where = "config " + std::to_string(i) + " (" + x.name() + ", n = " + std::to_string(n) + ")";

        const auto res = oracle::residuals(x, n, theta.last());
        const auto tau = oracle::block_means(res, P);
        const auto sigma = oracle::cesaro_running(res, theta.last());
        const auto smax = oracle::block_max(sigma, P);
        const auto tau_f = oracle::block_means(res, P, [&](double v) { return f(v); });

        if (!same_series(block_means(x, theta, n).tau, tau))
            return {false, where + ": tau"};
        if (!same_series(cesaro_means(x, n, theta.last()).sigma, sigma))
            return {false, where + ": sigma"};
        if (!same_series(block_maxima(cesaro_means(x, n, theta.last()), theta), smax))
            return {false, where + ": sigma block maxima"};
        if (!same_series(modulus_block_means(x, theta, f, n).tau, tau_f))
            return {false, where + ": tau_f"};

        // linearity
        {
            const double alpha = rng.uniform(-10.0, 10.0);
            const double beta = rng.uniform(-10.0, 10.0);
            const auto ty = oracle::block_means(oracle::residuals(y, n, theta.last()), P);
            const auto tz = oracle::block_means(
                oracle::residuals(sequences::combine(alpha, x, beta, y), n, theta.last()), P);
            std::vector<double> expect;
            for (std::size_t r = 0; r < tau.size(); ++r)
                expect.push_back(std::fabs(alpha) * tau[r] + std::fabs(beta) * ty[r] - tz[r]);
            if (!same_check(check_linearity(x, y, alpha, beta, theta, n), expect, 1, 0))
                return {false, where + ": linearity"};
        }
        // liminf, first relation of each block
        {
            const auto r = check_liminf_inequality(x, theta, n);
            const std::size_t stride = r.slacks.size() / theta.num_blocks();
            std::vector<double> expect;
            for (std::size_t b = 1; b <= theta.num_blocks(); ++b)
                expect.push_back(sigma[static_cast<std::size_t>(P[b] - 1)] -
                                 static_cast<double>(P[b] - P[b - 1]) * tau[b - 1] / static_cast<double>(P[b]));
            if (!same_check(r, expect, stride, 0))
                return {false, where + ": liminf"};
        }
        // partial sums: identity slack recomputed from a long double prefix sum
        {
            const auto r = check_partial_sum_decomposition(x, theta, n);
            long double direct = 0.0L;
            long double blocks = 0.0L;
            bool pass = true;
            for (std::size_t b = 1; b <= theta.num_blocks(); ++b) {
                for (std::int64_t m = P[b - 1] + 1; m <= P[b]; ++m)
                    direct += res[static_cast<std::size_t>(m - 1)];
                blocks += static_cast<long double>(P[b] - P[b - 1]) * tau[b - 1];
                const auto d = static_cast<double>(direct);
                if (std::fabs(d - static_cast<double>(blocks)) > kPartialSumRelTol * std::fabs(d))
                    pass = false;
            }
            if (pass != r.passed())
                return {false, where + ": partial sums"};
        }
        // modulus split upper bound
        {
            const double delta = 0.1;
            const auto r = check_modulus_split(x, theta, f, n, delta);
            const std::size_t stride = r.slacks.size() / theta.num_blocks();
            std::vector<double> expect;
            for (std::size_t b = 0; b < tau.size(); ++b)
                expect.push_back(f(delta) + 2.0 * f(1.0) * tau[b] / delta - tau_f[b]);
            if (!same_check(r, expect, stride, 0))
                return {false, where + ": modulus split"};
        }
        // refinement on a one-point split of the last block
        {
            const auto R = theta.num_blocks();
            if (P[R] - P[R - 1] >= 2) {
                const std::int64_t mid = P[R - 1] + (P[R] - P[R - 1]) / 2;
                const auto map = refine(theta, {mid});
                const auto child = oracle::block_means(res, pts(map.child));
                const auto r = check_refinement(x, map, n);
                const double lhs = static_cast<double>(P[R] - P[R - 1]) * tau[R - 1];
                const double rhs = static_cast<double>(mid - P[R - 1]) * child[R - 1] +
                                   static_cast<double>(P[R] - mid) * child[R];
                const bool oracle_ok = std::fabs(lhs - rhs) <= 1e-12 * std::max(std::fabs(lhs), std::fabs(rhs)) &&
                                       tau[R - 1] <= std::max(child[R - 1], child[R]) + kSlackTolerance;
                if (oracle_ok != r.passed())
                    return {false, where + ": refinement"};
            }
        }
    }
    return {true, "50 configurations, worst relative mean error " + num(worst)};
}

// 12
Outcome parser_robustness()
{
    Rng rng(12);
    const std::string alphabet = "abcdefgimnoprstuxy_(),:.0123456789eE+- \t";
    for (int i = 0; i < 100000; ++i) {
        std::string s(static_cast<std::size_t>(rng.integer(0, 48)), '\0');
        const bool raw = i % 2 == 0;
        for (auto& ch : s)
            ch = raw ? static_cast<char>(rng.integer(0, 255))
                     : alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(alphabet.size()) - 1))];
        const auto res = dsl::parse(s);
        if (!res.ok() && res.error().position > s.size() + 1)
            return {false, "error position past end of input"};
        if (res.ok() && !dsl::parse(dsl::unparse(res.ast())).ok())
            return {false, "unparse of a random accepted string does not reparse"};
    }

    std::ifstream in(std::string(LACUNA_CORPUS_DIR) + "/valid.txt");
    std::string line;
    int corpus = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto first = dsl::parse(line);
        if (!first.ok())
            return {false, "corpus line does not parse: " + line};
        const auto second = dsl::parse(dsl::unparse(first.ast()));
        if (!second.ok() || !dsl::same_structure(first.ast(), second.ast()))
            return {false, "corpus line does not round-trip: " + line};
        ++corpus;
    }
    if (corpus == 0)
        return {false, "corpus not found"};
    return {true, "100000 random inputs, " + std::to_string(corpus) + " corpus expressions round-trip"};
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 kernel exactness", kernel_exactness},
        {"2 finite AC inclusion", finite_ac_inclusion},
        {"3 linearity bound", linearity},
        {"4 refinement identity and max bound", refinement},
        {"5 Cesaro lower bound by block means", liminf},
        {"6 partial-sum decomposition", partial_sums},
        {"7 modulus linear growth bound", fisher},
        {"8 modulus split", modulus_split},
        {"9 identity modulus equality", identity_modulus},
        {"10 separator negative control and gap", separator},
        {"11 oracle equivalence", oracle_equivalence},
        {"12 parser robustness", parser_robustness},
    };

    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& [name, body] : criteria) {
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (failed ? "FAILED " : "ok ") << 12 - failed << "/12 criteria in " << num(seconds) << " s\n";
    return failed ? 1 : 0;
}
