#include <gtest/gtest.h>

#include <cstdlib>

#include "lacuna/analysis.hpp"
#include "lacuna/dsl.hpp"
#include "lacuna/fixtures.hpp"
#include "oracle.hpp"

using namespace lacuna;

namespace {

const LacunaryPartition& pow2_3()
{
    static const auto t = LacunaryPartition::from_points({1, 2, 4});
    return t;
}

class ScopedThreads {
public:
    explicit ScopedThreads(const char* value)
    {
        if (const char* old = std::getenv("LACUNA_THREADS"))
            saved_ = old;
        ::setenv("LACUNA_THREADS", value, 1);
    }
    ~ScopedThreads()
    {
        if (saved_.empty())
            ::unsetenv("LACUNA_THREADS");
        else
            ::setenv("LACUNA_THREADS", saved_.c_str(), 1);
    }

private:
    std::string saved_;
};

} // namespace

TEST(AcWitness, Examples)
{
    const auto x = sequences::gcd_class(fixtures::example_table());
    const auto w = ac_witness(x, 1e-9, 12, 10000);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->n, 6);
    EXPECT_EQ(w->sup_residual, 0.0);

    const auto c = ac_witness(sequences::constant(0.4), 0.1, 12, 100);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->n, 1);

    EXPECT_FALSE(ac_witness(sequences::linear(1.0), 0.5, 10, 100));
}

TEST(AcWitness, AgreesWithOracleSup)
{
    const auto x = sequences::perturbed_gcd_class(fixtures::example_table(), 0.01);
    const auto w = ac_witness(x, 0.02, 12, 500);
    ASSERT_TRUE(w);
    for (std::int64_t n = 1; n < w->n; ++n)
        EXPECT_GE(oracle::sup_residual(x, n, 500), 0.02) << n;
    EXPECT_EQ(w->sup_residual, oracle::sup_residual(x, w->n, 500));
}

TEST(BlockMeans, HarmonicHandValues)
{
    const auto tau = block_means(sequences::harmonic_like(1.0), pow2_3(), 1);
    ASSERT_EQ(tau.tau.size(), 2u);
    EXPECT_EQ(tau.tau[0], 0.5);
    EXPECT_DOUBLE_EQ(tau.tau[1], (2.0 / 3.0 + 0.75) / 2.0);
    EXPECT_EQ(tau.witness_n, 1);
}

TEST(BlockMeans, ZeroFamilies)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 9);
    for (const double v : block_means(sequences::gcd_class(fixtures::example_table()), theta, 6).tau)
        EXPECT_EQ(v, 0.0);
    for (std::int64_t n = 1; n <= 5; ++n)
        for (const double v : block_means(sequences::constant(3.0), theta, n).tau)
            EXPECT_EQ(v, 0.0);
}

TEST(BlockMeans, MatchOracleAndStayBelowBlockMax)
{
    Rng rng(21);
    for (int i = 0; i < 40; ++i) {
        const auto theta = fixtures::random_geometric(rng);
        const auto x = fixtures::random_sequence(rng, theta);
        const std::int64_t n = rng.integer(1, 12);
        const auto res = oracle::residuals(x, n, theta.last());
        const std::vector<std::int64_t> pts(theta.points().begin(), theta.points().end());
        const auto expect = oracle::block_means(res, pts);
        const auto got = block_means(x, theta, n);
        for (std::size_t r = 1; r <= theta.num_blocks(); ++r) {
            ASSERT_TRUE(oracle::close_rel(got.tau[r - 1], expect[r - 1], 1e-12)) << x.name();
            double top = 0.0;
            for (std::int64_t m = theta.block(r).first; m <= theta.block(r).last; ++m)
                top = std::max(top, res[static_cast<std::size_t>(m - 1)]);
            ASSERT_LE(got.tau[r - 1], top);
            ASSERT_GE(got.tau[r - 1], 0.0);
        }
    }
}

TEST(BlockMeans, ThreadCountDoesNotChangeBits)
{
    const auto theta = LacunaryPartition::geometric(1, 1.7, 18);
    const auto x = sequences::harmonic_like(0.3);
    std::vector<double> one;
    std::vector<double> four;
    {
        ScopedThreads t("1");
        one = block_means(x, theta, 7).tau;
    }
    {
        ScopedThreads t("4");
        four = block_means(x, theta, 7).tau;
    }
    EXPECT_EQ(one, four);
}

TEST(Cesaro, HandValues)
{
    const auto c = cesaro_means(sequences::harmonic_like(1.0), 1, 2);
    EXPECT_EQ(c.sigma, (std::vector<double>{0.0, 0.25}));
    for (const double v : cesaro_means(sequences::constant(1.0), 1, 5).sigma)
        EXPECT_EQ(v, 0.0);
}

TEST(Cesaro, SpikeCounting)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 6);
    const auto c = cesaro_means(sequences::block_spike(theta, 1.0, 1), 1, theta.last());
    for (std::int64_t t = 1; t <= theta.last(); ++t) {
        int spikes = 0;
        for (std::size_t r = 1; r <= theta.num_blocks(); ++r)
            spikes += theta.point(r) <= t ? 1 : 0;
        EXPECT_DOUBLE_EQ(c.sigma[static_cast<std::size_t>(t - 1)], spikes / static_cast<double>(t)) << t;
    }
}

TEST(Cesaro, IncrementalMatchesFromScratch)
{
    const auto x = sequences::perturbed_gcd_class(fixtures::example_table(), 0.2);
    const auto res = oracle::residuals(x, 4, 400);
    const auto expect = oracle::cesaro(res, 400);
    const auto got = cesaro_means(x, 4, 400);
    for (std::size_t t = 0; t < 400; ++t) {
        ASSERT_TRUE(oracle::close_rel(got.sigma[t], expect[t], 1e-12)) << t;
        if (t > 0) {
            ASSERT_GE((t + 1) * got.sigma[t] + 1e-12, t * got.sigma[t - 1]);
        }
    }
}

TEST(ModulusMeans, IdentityIsBitwiseBlockMeans)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 10);
    for (const auto& x : fixtures::standard(theta))
        for (const std::int64_t n : {1, 2, 6})
            EXPECT_EQ(modulus_block_means(x, theta, Modulus::identity(), n).tau, block_means(x, theta, n).tau);
}

TEST(ModulusMeans, Examples)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 6);
    for (const auto& f : fixtures::builtin_moduli())
        for (const double v : modulus_block_means(sequences::gcd_class(fixtures::example_table()), theta, f, 6).tau)
            EXPECT_EQ(v, 0.0);

    const auto x = sequences::harmonic_like(1.0);
    const auto f = Modulus::power(0.5);
    const auto got = modulus_block_means(x, pow2_3(), f, 1);
    const auto res = oracle::residuals(x, 1, 4);
    const auto expect = oracle::block_means(res, {1, 2, 4}, [](double v) { return std::sqrt(v); });
    EXPECT_EQ(got.tau[0], std::sqrt(0.5));
    EXPECT_TRUE(oracle::close_rel(got.tau[1], expect[1], 1e-15));
}

TEST(Verdict, Examples)
{
    EXPECT_EQ(verdict(std::vector<double>{0, 0, 0, 0}, 1e-9, 3), Verdict::consistent);
    EXPECT_EQ(verdict(std::vector<double>{1, 1, 1}, 0.5, 3), Verdict::inconsistent);
    EXPECT_EQ(verdict(std::vector<double>{0, 1, 0, 1}, 0.5, 4), Verdict::inconclusive);
    EXPECT_EQ(verdict(std::vector<double>{2, 1.5, 1}, 0.5, 3), Verdict::inconclusive);
    EXPECT_THROW(verdict(std::vector<double>{1, 1}, 0.5, 3), InvalidArgument);
    EXPECT_THROW(verdict(std::vector<double>{1, 1}, 0.5, 0), InvalidArgument);
}

TEST(Classify, ZeroResidualFixture)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 8);
    const auto rep = classify(sequences::gcd_class(fixtures::example_table()), theta, Modulus::bounded(), {});
    ASSERT_EQ(rep.spaces.size(), 4u);
    for (const auto& e : rep.spaces) {
        EXPECT_EQ(e.verdict, Verdict::consistent) << to_string(e.space);
        EXPECT_EQ(e.witness_n, 6);
    }
    EXPECT_EQ(rep.config.window, 4u);
    EXPECT_EQ(rep.config.horizon_m, 256);
}

TEST(Classify, LinearIsInconsistentEverywhere)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 8);
    const auto rep = classify(sequences::linear(1.0), theta, Modulus::identity(), {});
    for (const auto& e : rep.spaces)
        EXPECT_EQ(e.verdict, Verdict::inconsistent) << to_string(e.space);
}

TEST(Classify, SeparatingSpikeOnDoublyExponentialPartition)
{
    const auto theta = LacunaryPartition::from_points({2, 4, 16, 256, 65536});
    const auto x = dsl::sequence("blockspike(points(2, 4, 16, 256, 65536), each(1, 1, 1, 1), each(0, 0, 1, 255), start)");
    ClassifyConfig cfg;
    cfg.tol = 0.02;
    cfg.n_max = 1;
    const auto rep = classify(x, theta, Modulus::identity(), cfg);
    EXPECT_EQ(rep.spaces[1].verdict, Verdict::consistent);
    EXPECT_EQ(rep.spaces[2].verdict, Verdict::inconsistent);
}

TEST(Classify, ConfigValidation)
{
    const auto theta = LacunaryPartition::geometric(1, 2.0, 4);
    ClassifyConfig cfg;
    cfg.horizon_m = 8;
    EXPECT_THROW(classify(sequences::constant(0), theta, Modulus::identity(), cfg), InvalidArgument);
    cfg = {};
    cfg.window = 5;
    EXPECT_THROW(classify(sequences::constant(0), theta, Modulus::identity(), cfg), InvalidArgument);
    cfg = {};
    cfg.tol = 0;
    EXPECT_THROW(classify(sequences::constant(0), theta, Modulus::identity(), cfg), InvalidArgument);
}

TEST(Finite, SmallSupImpliesSmallBlockMeans)
{
    Rng rng(8);
    for (int i = 0; i < 30; ++i) {
        const std::int64_t n0 = rng.integer(1, 24);
        const double c = rng.uniform(1e-4, 0.1);
        const auto x = sequences::perturbed_gcd_class(fixtures::random_table(rng, n0), c);
        const auto theta = fixtures::random_geometric(rng);
        const double sup = oracle::sup_residual(x, n0, theta.last());
        for (const double v : block_means(x, theta, n0).tau)
            ASSERT_LE(v, sup);
    }
}
