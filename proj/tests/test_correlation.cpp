#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <qppwb/correlation.hpp>

using namespace qppwb;

namespace {

// Tau-b by enumerating all pairs.
std::optional<double> brute_tau_b(const std::vector<double>& x, const std::vector<double>& y)
{
    double c = 0, d = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double a = x[i] - x[j], b = y[i] - y[j];
            if (a == 0 && b == 0)
                continue;
            if (a == 0)
                ++tx;
            else if (b == 0)
                ++ty;
            else if ((a > 0) == (b > 0))
                ++c;
            else
                ++d;
        }
    const double denom = std::sqrt((c + d + tx) * (c + d + ty));
    if (denom == 0)
        return std::nullopt;
    return (c - d) / denom;
}

}  // namespace

TEST(Pearson, HandExamples)
{
    EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}), 0.5, 1e-12);
    EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-12);
    EXPECT_NEAR(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0, 1e-12);
}

TEST(Correlation, UndefinedOnConstantInput)
{
    const std::vector<double> c{0.1, 0.1, 0.1}, v{1, 2, 3};
    for (const auto kind : kAllCorrelations) {
        EXPECT_FALSE(correlate(kind, c, v).has_value());
        EXPECT_FALSE(correlate(kind, v, c).has_value());
    }
}

TEST(Correlation, Preconditions)
{
    const std::vector<double> a{1, 2}, b{1, 2, 3}, one{1};
    EXPECT_THROW(pearson(a, b), std::invalid_argument);
    EXPECT_THROW(kendall(one, one), std::invalid_argument);
}

TEST(Kendall, HandExample)
{
    EXPECT_NEAR(*kendall(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 4.0 / 6.0, 1e-12);
    EXPECT_NEAR(*kendall(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}), 0.6667, 1e-4);
}

TEST(RankTransform, MidRanks)
{
    EXPECT_EQ(rank_transform(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Spearman, EqualsPearsonOnRanksAndIsMonotoneInvariant)
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(12), y(12), ey(12);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = std::round(u(rng) * 4);
            y[i] = u(rng);
            ey[i] = std::exp(3 * y[i]);
        }
        const auto rho = spearman(x, y);
        const auto ref = pearson(rank_transform(x), rank_transform(y));
        ASSERT_EQ(rho.has_value(), ref.has_value());
        if (rho) {
            EXPECT_NEAR(*rho, *ref, 1e-12);
            EXPECT_NEAR(*rho, *spearman(x, ey), 1e-12);
        }
    }
}

TEST(Kendall, MatchesBruteForceWithAndWithoutTies)
{
    std::mt19937 rng(2);
    for (int t = 0; t < 400; ++t) {
        const std::size_t n = 2 + rng() % 30;
        const int levels = (t % 2 == 0) ? 1000000 : 3;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % levels);
            y[i] = static_cast<double>(rng() % levels);
        }
        const auto fast = kendall(x, y);
        const auto slow = brute_tau_b(x, y);
        ASSERT_EQ(fast.has_value(), slow.has_value());
        if (fast)
            EXPECT_NEAR(*fast, *slow, 1e-12);
    }
}

TEST(Correlation, SymmetryAndBounds)
{
    std::mt19937 rng(4);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(8), y(8);
        for (std::size_t i = 0; i < 8; ++i) {
            x[i] = g(rng);
            y[i] = x[i] * 0.5 + g(rng);
        }
        for (const auto kind : kAllCorrelations) {
            const auto a = correlate(kind, x, y), b = correlate(kind, y, x);
            ASSERT_TRUE(a && b);
            EXPECT_NEAR(*a, *b, 1e-12);
            EXPECT_LE(std::abs(*a), 1.0);
        }
    }
}

TEST(Correlation, Names)
{
    EXPECT_EQ(parse_correlation("Pearson"), CorrelationKind::PearsonR);
    EXPECT_EQ(parse_correlation("tau"), CorrelationKind::KendallTau);
    EXPECT_EQ(correlation_symbol(CorrelationKind::SpearmanRho), "rho");
    EXPECT_THROW(parse_correlation("distance"), Error);
}
