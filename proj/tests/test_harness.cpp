#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <qppwb/harness.hpp>
#include <qppwb/io.hpp>

using namespace qppwb;

namespace {

// Permutation of 0..n-1 with exactly `inversions` inverted pairs (Lehmer code).
std::vector<double> with_inversions(std::size_t n, std::size_t inversions)
{
    std::vector<std::size_t> code(n, 0);
    for (std::size_t i = 0; i < n && inversions > 0; ++i) {
        code[i] = std::min(inversions, n - 1 - i);
        inversions -= code[i];
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(static_cast<double>(pool[code[i]]));
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(code[i]));
    }
    return out;
}

std::vector<Correlation> as_outcomes(const std::vector<double>& v)
{
    return {v.begin(), v.end()};
}

Qrels load_synthetic_qrels()
{
    auto in = detail::open_input(QPPWB_SOURCE_DIR "/data/synthetic/qrels.txt");
    return read_qrels(in);
}

}  // namespace

TEST(Sensitivity, SampleStddevMatchesPublishedSpread)
{
    const std::vector<Correlation> row{0.3795, 0.3966, 0.3869, 0.3311};
    const std::vector<Correlation> col{0.3795, 0.5006, 0.5208};
    EXPECT_NEAR(*sample_stddev(row).sigma, 0.0291, 1e-4);
    EXPECT_NEAR(*sample_stddev(col).sigma, 0.0764, 1e-4);
    // the population form would miss both
    EXPECT_GT(std::abs(*sample_stddev(row).sigma * std::sqrt(3.0 / 4.0) - 0.0291), 1e-3);
}

TEST(Sensitivity, UndefinedCellsAreExcludedAndCounted)
{
    const std::vector<Correlation> v{0.1, std::nullopt, 0.3};
    const auto s = sample_stddev(v);
    EXPECT_EQ(s.excluded, 1u);
    EXPECT_NEAR(*s.sigma, std::sqrt(0.02), 1e-12);
    const std::vector<Correlation> one{0.5};
    EXPECT_FALSE(sample_stddev(one).sigma);
    const std::vector<Correlation> none{std::nullopt, std::nullopt};
    const auto n = sample_stddev(none);
    EXPECT_FALSE(n.sigma);
    EXPECT_EQ(n.excluded, 2u);
}

TEST(Sensitivity, ReportMargins)
{
    const std::vector<std::vector<std::vector<Correlation>>> cells = {{{0.1, 0.2}, {0.3, 0.5}}};
    const auto rep = make_sensitivity_report("X", {"m1", "m2"}, {"a", "b"}, {CorrelationKind::PearsonR}, cells);
    EXPECT_NEAR(*rep.sigma_theta[0][0].sigma, std::sqrt(0.005), 1e-12);
    EXPECT_NEAR(*rep.sigma_theta[0][1].sigma, std::sqrt(0.02), 1e-12);
    EXPECT_NEAR(*rep.sigma_model[0][0].sigma, std::sqrt(0.02), 1e-12);
    EXPECT_NEAR(*rep.sigma_model[0][1].sigma, std::sqrt(0.045), 1e-12);
}

TEST(Contingency, DiscordantPairsGiveKnownFractions)
{
    const auto base = with_inversions(7, 0);
    const std::pair<std::size_t, double> cases[] = {{1, 19.0 / 21}, {3, 15.0 / 21}, {6, 9.0 / 21}, {12, -3.0 / 21}};
    for (const auto& [d, expected] : cases) {
        const auto a = as_outcomes(base), b = as_outcomes(with_inversions(7, d));
        EXPECT_NEAR(*ordering_agreement(a, b), expected, 1e-12) << d;
    }
    EXPECT_NEAR(19.0 / 21, 0.9048, 1e-4);
    EXPECT_NEAR(15.0 / 21, 0.7143, 1e-4);
    EXPECT_NEAR(9.0 / 21, 0.4286, 1e-4);
    EXPECT_NEAR(-3.0 / 21, -0.1429, 1e-4);
}

TEST(Contingency, UndefinedOutcomePropagates)
{
    std::vector<Correlation> a{0.1, 0.2, 0.3}, b{0.3, std::nullopt, 0.1};
    EXPECT_FALSE(ordering_agreement(a, b));
}

TEST(Contingency, MatrixIsSymmetricWithUnitDiagonal)
{
    std::mt19937 rng(8);
    std::vector<std::vector<std::vector<double>>> values(2, std::vector<std::vector<double>>(4));
    for (auto& g : values)
        for (auto& item : g)
            item = with_inversions(7, rng() % 22);
    const auto rep = make_contingency(ContingencyAxis::MetricPairs, CorrelationKind::PearsonR, {"a", "b", "c", "d"},
                                      {"g1", "g2"}, {"s1", "s2", "s3", "s4", "s5", "s6", "s7"},
                                      [&](std::size_t g, std::size_t i, std::size_t p) -> Correlation {
                                          return values[g][i][p];
                                      });
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_NEAR(*rep.at(g, i, i), 1.0, 1e-12);
            for (std::size_t j = 0; j < 4; ++j) {
                EXPECT_EQ(rep.at(g, i, j), rep.at(g, j, i));
                const double scaled = *rep.at(g, i, j) * 21;
                EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
            }
        }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors)
{
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits)
        EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7)
                                      throw Error("boom");
                              }),
                 Error);
}

TEST(ConcurrentCache, ComputesEachKeyOnce)
{
    ConcurrentCache<int, int> cache;
    std::atomic<int> calls{0};
    parallel_for(64, 8, [&](std::size_t i) {
        const auto v = cache.get(static_cast<int>(i % 4), [&] {
            calls.fetch_add(1);
            return static_cast<int>(i % 4) * 10;
        });
        EXPECT_EQ(*v, static_cast<int>(i % 4) * 10);
    });
    EXPECT_EQ(calls.load(), 4);
    EXPECT_EQ(cache.computed(), 4u);
}

class SyntheticWorkbench : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        index_ = new Index(load_index(QPPWB_SOURCE_DIR "/data/synthetic/corpus.tsv", CorpusFormat::Tsv));
        queries_ = new std::vector<Query>(load_topics(QPPWB_SOURCE_DIR "/data/synthetic/topics.tsv"));
        qrels_ = new Qrels(load_synthetic_qrels());
    }
    static void TearDownTestSuite()
    {
        delete index_;
        delete queries_;
        delete qrels_;
    }
    static Index* index_;
    static std::vector<Query>* queries_;
    static Qrels* qrels_;
};

Index* SyntheticWorkbench::index_ = nullptr;
std::vector<Query>* SyntheticWorkbench::queries_ = nullptr;
Qrels* SyntheticWorkbench::qrels_ = nullptr;

TEST_F(SyntheticWorkbench, DropsQueriesWithoutJudgments)
{
    auto qs = *queries_;
    qs.push_back(make_query("999", "unjudged query"));
    Qrels q = *qrels_;
    q.add("998", "SYN-0001", 0);
    qs.push_back(make_query("998", "no relevant documents"));
    Workbench wb(*index_, qs, q);
    EXPECT_EQ(wb.query_order().size(), queries_->size());
}

TEST_F(SyntheticWorkbench, CachingDoesNotChangeResults)
{
    Workbench cached(*index_, *queries_, *qrels_);
    Workbench uncached(*index_, *queries_, *qrels_, WorkbenchOptions{false});
    const auto m = RetrievalModel::bm25(0.7, 0.3);
    for (const char* p : {"NQC", "UEF(WIG)"})
        for (const char* metric : {"AP@100", "P@10"}) {
            const QppContext ctx{MetricSpec::parse(metric), m, 1000};
            const auto a = cached.evaluate_outcome(PredictorSpec::parse(p), ctx);
            const auto b = uncached.evaluate_outcome(PredictorSpec::parse(p), ctx);
            EXPECT_EQ(a.by_correlation, b.by_correlation);
            EXPECT_EQ(a.context, "" + std::string(metric) + "|BM25(0.7,0.3)|1000");
        }
    EXPECT_EQ(cached.run_computations(), 1u);
    EXPECT_GT(uncached.run_computations(), 1u);
}

TEST_F(SyntheticWorkbench, SmallGridShapes)
{
    Workbench wb(*index_, *queries_, *qrels_);
    GridConfig g;
    const auto m = [](const char* s) { return MetricSpec::parse(s); };
    g.models = {RetrievalModel::lmdir(1000), RetrievalModel::bm25(0.7, 0.3)};
    g.metrics = {m("AP@100"), m("P@10"), m("R@100")};
    for (const char* p : {"AvgIDF", "WIG", "NQC"})
        g.battery.push_back(PredictorSpec::parse(p));
    g.correlations = {CorrelationKind::PearsonR, CorrelationKind::KendallTau};
    g.kappa = 100;
    g.sensitivity = {g.metrics, g.models};
    g.metric_contingency = {g.metrics, g.models};
    g.model_contingency = {g.metrics, g.models};
    g.rank_by = {CorrelationKind::KendallTau};
    g.jobs = 2;
    const auto r = run_grid(g, wb);
    EXPECT_EQ(r.outcomes.size(), 3u * 2 * 3);
    ASSERT_EQ(r.sensitivity.size(), 3u);
    EXPECT_EQ(r.sensitivity[0].cells.size(), 2u);
    EXPECT_EQ(r.sensitivity[0].cells[0].size(), 2u);
    EXPECT_EQ(r.sensitivity[0].cells[0][0].size(), 3u);
    ASSERT_EQ(r.contingency.size(), 2u);
    EXPECT_EQ(r.contingency[0].axis, ContingencyAxis::MetricPairs);
    EXPECT_EQ(r.contingency[0].group_labels.size(), 2u);
    EXPECT_EQ(r.contingency[0].axis_labels.size(), 3u);
    EXPECT_EQ(r.contingency[1].axis, ContingencyAxis::ModelPairs);

    // AvgIDF predictions are shared by every model
    EXPECT_EQ(*wb.predictions(g.battery[0], g.models[0], 100), *wb.predictions(g.battery[0], g.models[1], 100));
}

TEST(GridConfig, DefaultsAndValidation)
{
    const auto d = GridConfig::defaults();
    EXPECT_EQ(d.models.size(), 8u);
    EXPECT_EQ(d.metrics.size(), 10u);
    EXPECT_EQ(d.battery.size(), 7u);
    EXPECT_EQ(d.sensitivity.models.size(), 3u);
    EXPECT_EQ(d.sensitivity.metrics.size(), 4u);
    EXPECT_EQ(d.metric_contingency.metrics.size(), 9u);
    EXPECT_EQ(d.model_contingency.models.size(), 8u);
    EXPECT_TRUE(d.validate().empty());
    GridConfig bad;
    EXPECT_GE(bad.validate().size(), 4u);
}
