#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <spdlog/spdlog.h>

#include "correlation.hpp"
#include "error.hpp"
#include "index.hpp"
#include "metrics.hpp"
#include "predictors.hpp"
#include "retrieval.hpp"

namespace qppwb {

// ---------------------------------------------------------------- concurrency helpers

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    if (n == 0)
        return;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, jobs), n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n)
                        return;
                    try {
                        fn(i);
                    }
                    catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                        next.store(n);
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

// Populate-or-read cache: each key is computed exactly once even when many
// threads ask for it at the same time; latecomers wait for the first result.
template <typename Key, typename Value>
class ConcurrentCache {
public:
    template <typename Compute>
    std::shared_ptr<const Value> get(const Key& key, Compute&& compute)
    {
        std::shared_future<std::shared_ptr<const Value>> future;
        std::promise<std::shared_ptr<const Value>> promise;
        bool owner = false;
        {
            std::lock_guard lock(mutex_);
            auto it = entries_.find(key);
            if (it == entries_.end()) {
                future = promise.get_future().share();
                entries_.emplace(key, future);
                owner = true;
            }
            else {
                future = it->second;
            }
        }
        if (owner) {
            try {
                promise.set_value(std::make_shared<const Value>(compute()));
                computed_.fetch_add(1);
            }
            catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return future.get();
    }

    std::size_t computed() const { return computed_.load(); }

private:
    std::mutex mutex_;
    std::map<Key, std::shared_future<std::shared_ptr<const Value>>> entries_;
    std::atomic<std::size_t> computed_{0};
};

// ---------------------------------------------------------------- contexts and outcomes

// (metric, retrieval model, retrieval depth): how the ground truth is built.
struct QppContext {
    MetricSpec metric;
    RetrievalModel model;
    std::uint32_t kappa = 1000;

    std::string id() const { return metric.label() + "|" + model.id() + "|" + std::to_string(kappa); }
};

struct QppOutcome {
    std::string predictor;
    std::string context;
    std::array<Correlation, 3> by_correlation{};

    Correlation get(CorrelationKind kind) const { return by_correlation[static_cast<std::size_t>(kind)]; }
};

struct WorkbenchOptions {
    bool cache = true;
};

namespace detail {

inline std::string exact_key(const RetrievalModel& model, std::uint32_t kappa)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d:%.17g:%.17g@%u", static_cast<int>(model.kind()), model.k1(), model.b(), kappa);
    return buf;
}

inline std::string exact_key(const PredictorSpec& p)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/%d/%u/%u/%u/%u/%.17g/%d/%llu", static_cast<int>(p.kind), static_cast<int>(p.base),
                  p.k, p.pool, p.num_samples, p.fb_terms, p.rlm_mu, static_cast<int>(p.nqc_std),
                  static_cast<unsigned long long>(p.seed));
    return buf;
}

}  // namespace detail

// Holds the collection, the query set and the judgments, and evaluates
// predictors under contexts. Retrieval runs, predictions and ground truth
// vectors are cached per key; all methods are safe to call concurrently.
class Workbench {
public:
    Workbench(const Index& index, std::vector<Query> queries, const Qrels& qrels, WorkbenchOptions options = {})
        : index_(index), qrels_(qrels), options_(options)
    {
        for (auto& q : queries) {
            if (!qrels.contains(q.qid)) {
                spdlog::warn("query {} has no qrels entry; dropped from the query set", q.qid);
                continue;
            }
            if (qrels.num_relevant(q.qid) == 0) {
                spdlog::info("query {} has no relevant documents; dropped from the query set", q.qid);
                continue;
            }
            queries_.push_back(std::move(q));
        }
        if (queries_.size() < 2)
            throw Error("need at least two queries with relevance judgments, got " + std::to_string(queries_.size()));
        for (const auto& q : queries_)
            order_.push_back(q.qid);
    }

    const Index& index() const { return index_; }
    const Qrels& qrels() const { return qrels_; }
    std::span<const Query> queries() const { return queries_; }
    const std::vector<std::string>& query_order() const { return order_; }

    std::shared_ptr<const Run> run(const RetrievalModel& model, std::uint32_t kappa)
    {
        auto compute = [&] {
            Run r;
            std::size_t empty = 0;
            for (const auto& q : queries_) {
                auto list = search(model, q, kappa, index_);
                empty += list.empty();
                r.emplace(q.qid, std::move(list));
            }
            if (empty > 0)
                spdlog::warn("{}: {} queries retrieved nothing (no indexed terms)", model.id(), empty);
            return r;
        };
        if (!options_.cache) {
            run_computations_.fetch_add(1);
            return std::make_shared<const Run>(compute());
        }
        return runs_.get(detail::exact_key(model, kappa), [&] {
            run_computations_.fetch_add(1);
            return compute();
        });
    }

    std::shared_ptr<const PredictionVector> predictions(const PredictorSpec& spec, const RetrievalModel& model,
                                                        std::uint32_t kappa)
    {
        auto compute = [&] {
            const auto r = run(model, kappa);
            return predict(spec, queries_, *r, model, index_);
        };
        if (!options_.cache)
            return std::make_shared<const PredictionVector>(compute());
        return predictions_.get(detail::exact_key(spec) + "|" + detail::exact_key(model, kappa), compute);
    }

    std::shared_ptr<const GroundTruthVector> ground_truth(const MetricSpec& metric, const RetrievalModel& model,
                                                          std::uint32_t kappa)
    {
        auto compute = [&] {
            const auto r = run(model, kappa);
            return qppwb::ground_truth(metric, *r, qrels_, order_);
        };
        if (!options_.cache)
            return std::make_shared<const GroundTruthVector>(compute());
        return truths_.get(metric.label() + (metric.gain == Gain::Binary ? "/bin" : "") + "|" +
                               detail::exact_key(model, kappa),
                           compute);
    }

    QppOutcome evaluate_outcome(const PredictorSpec& spec, const QppContext& context)
    {
        const auto phi = predictions(spec, context.model, context.kappa);
        const auto g = ground_truth(context.metric, context.model, context.kappa);
        QppOutcome out{spec.label(), context.id(), {}};
        for (const auto kind : kAllCorrelations)
            out.by_correlation[static_cast<std::size_t>(kind)] = correlate(kind, phi->values, g->values);
        return out;
    }

    // Number of retrieval runs actually executed (cache misses).
    std::size_t run_computations() const { return run_computations_.load(); }

private:
    const Index& index_;
    const Qrels& qrels_;
    WorkbenchOptions options_;
    std::vector<Query> queries_;
    std::vector<std::string> order_;
    ConcurrentCache<std::string, Run> runs_;
    ConcurrentCache<std::string, PredictionVector> predictions_;
    ConcurrentCache<std::string, GroundTruthVector> truths_;
    std::atomic<std::size_t> run_computations_{0};
};

// ---------------------------------------------------------------- sensitivity (variance of outcomes)

struct Spread {
    Correlation sigma;         // undefined with fewer than two defined cells
    std::size_t excluded = 0;  // undefined cells left out
};

// Sample standard deviation (n - 1) over the defined values.
inline Spread sample_stddev(std::span<const Correlation> values)
{
    std::vector<double> defined;
    for (const auto& v : values)
        if (v)
            defined.push_back(*v);
    Spread s;
    s.excluded = values.size() - defined.size();
    if (defined.size() < 2)
        return s;
    const double n = static_cast<double>(defined.size());
    const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : defined)
        ss += (v - mean) * (v - mean);
    s.sigma = std::sqrt(ss / (n - 1.0));
    return s;
}

struct SensitivityReport {
    std::string predictor;
    std::vector<std::string> models;   // rows
    std::vector<std::string> metrics;  // columns
    std::vector<CorrelationKind> kinds;
    // cells[kind][model][metric]
    std::vector<std::vector<std::vector<Correlation>>> cells;
    // sigma_theta[kind][model]: spread across metrics; sigma_model[kind][metric]: across models
    std::vector<std::vector<Spread>> sigma_theta;
    std::vector<std::vector<Spread>> sigma_model;
};

inline SensitivityReport make_sensitivity_report(std::string predictor, std::vector<std::string> models,
                                                 std::vector<std::string> metrics, std::vector<CorrelationKind> kinds,
                                                 std::vector<std::vector<std::vector<Correlation>>> cells)
{
    SensitivityReport rep{std::move(predictor), std::move(models), std::move(metrics), std::move(kinds),
                          std::move(cells), {}, {}};
    for (std::size_t k = 0; k < rep.kinds.size(); ++k) {
        auto& grid = rep.cells[k];
        std::vector<Spread> rows, cols;
        for (const auto& row : grid)
            rows.push_back(sample_stddev(row));
        for (std::size_t c = 0; c < rep.metrics.size(); ++c) {
            std::vector<Correlation> column;
            for (const auto& row : grid)
                column.push_back(row[c]);
            cols.push_back(sample_stddev(column));
        }
        rep.sigma_theta.push_back(std::move(rows));
        rep.sigma_model.push_back(std::move(cols));
    }
    return rep;
}

inline SensitivityReport sensitivity(Workbench& wb, const PredictorSpec& predictor,
                                     std::span<const MetricSpec> metric_axis,
                                     std::span<const RetrievalModel> model_axis, std::uint32_t kappa,
                                     std::span<const CorrelationKind> kinds)
{
    if (metric_axis.empty() || model_axis.empty())
        throw Error("sensitivity axes must be non-empty");
    std::vector<std::string> models, metrics;
    for (const auto& m : model_axis)
        models.push_back(m.id());
    for (const auto& m : metric_axis)
        metrics.push_back(m.label());
    std::vector<std::vector<std::vector<Correlation>>> cells(
        kinds.size(), std::vector<std::vector<Correlation>>(model_axis.size(), std::vector<Correlation>(metric_axis.size())));
    for (std::size_t r = 0; r < model_axis.size(); ++r) {
        for (std::size_t c = 0; c < metric_axis.size(); ++c) {
            const auto outcome = wb.evaluate_outcome(predictor, QppContext{metric_axis[c], model_axis[r], kappa});
            for (std::size_t k = 0; k < kinds.size(); ++k)
                cells[k][r][c] = outcome.get(kinds[k]);
        }
    }
    return make_sensitivity_report(predictor.label(), std::move(models), std::move(metrics),
                                   std::vector<CorrelationKind>(kinds.begin(), kinds.end()), std::move(cells));
}

// ---------------------------------------------------------------- contingency (stability of system ranks)

enum class ContingencyAxis { MetricPairs, ModelPairs };

// Kendall tau-b between the orderings of a predictor battery induced by two
// contexts. Undefined if any outcome is undefined or one ordering is all ties.
inline Correlation ordering_agreement(std::span<const Correlation> a, std::span<const Correlation> b)
{
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("ordering_agreement needs two equal-length batteries of at least two systems");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i] || !b[i])
            return std::nullopt;
        x.push_back(*a[i]);
        y.push_back(*b[i]);
    }
    return kendall(x, y);
}

struct ContingencyReport {
    ContingencyAxis axis = ContingencyAxis::MetricPairs;
    CorrelationKind rank_by = CorrelationKind::PearsonR;
    std::vector<std::string> axis_labels;   // compared pairwise
    std::vector<std::string> group_labels;  // held fixed per block
    std::vector<std::string> battery;
    // cells[group][i][j]; symmetric, diagonal included
    std::vector<std::vector<std::vector<Correlation>>> cells;

    Correlation at(std::size_t group, std::size_t i, std::size_t j) const { return cells[group][i][j]; }
};

// outcome(group, item, system) -> that system's outcome under the context
// formed by the group and the axis item.
template <typename Outcome>
ContingencyReport make_contingency(ContingencyAxis axis, CorrelationKind rank_by, std::vector<std::string> axis_labels,
                                   std::vector<std::string> group_labels, std::vector<std::string> battery,
                                   Outcome&& outcome)
{
    if (battery.size() < 2)
        throw Error("contingency needs at least two predictors in the battery");
    ContingencyReport rep{axis, rank_by, std::move(axis_labels), std::move(group_labels), std::move(battery), {}};
    const std::size_t n = rep.axis_labels.size();
    for (std::size_t g = 0; g < rep.group_labels.size(); ++g) {
        std::vector<std::vector<Correlation>> per_item(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < rep.battery.size(); ++p)
                per_item[i].push_back(outcome(g, i, p));
        std::vector<std::vector<Correlation>> m(n, std::vector<Correlation>(n));
        for (std::size_t i = 0; i < n; ++i) {
            m[i][i] = ordering_agreement(per_item[i], per_item[i]);
            for (std::size_t j = i + 1; j < n; ++j) {
                m[i][j] = ordering_agreement(per_item[i], per_item[j]);
                m[j][i] = m[i][j];
            }
        }
        rep.cells.push_back(std::move(m));
    }
    return rep;
}

inline ContingencyReport contingency(Workbench& wb, std::span<const PredictorSpec> battery, ContingencyAxis axis,
                                     std::span<const MetricSpec> metrics, std::span<const RetrievalModel> models,
                                     std::uint32_t kappa, CorrelationKind rank_by)
{
    std::vector<std::string> metric_labels, model_labels, systems;
    for (const auto& m : metrics)
        metric_labels.push_back(m.label());
    for (const auto& m : models)
        model_labels.push_back(m.id());
    for (const auto& p : battery)
        systems.push_back(p.label());
    if (axis == ContingencyAxis::MetricPairs) {
        return make_contingency(axis, rank_by, metric_labels, model_labels, systems,
                                [&](std::size_t g, std::size_t i, std::size_t p) {
                                    return wb.evaluate_outcome(battery[p], {metrics[i], models[g], kappa}).get(rank_by);
                                });
    }
    return make_contingency(axis, rank_by, model_labels, metric_labels, systems,
                            [&](std::size_t g, std::size_t i, std::size_t p) {
                                return wb.evaluate_outcome(battery[p], {metrics[g], models[i], kappa}).get(rank_by);
                            });
}

// ---------------------------------------------------------------- full grid

struct AxisSelection {
    std::vector<MetricSpec> metrics;
    std::vector<RetrievalModel> models;
};

struct GridConfig {
    std::vector<RetrievalModel> models;
    std::vector<MetricSpec> metrics;
    std::vector<PredictorSpec> battery;
    std::vector<CorrelationKind> correlations;
    std::uint32_t kappa = 1000;
    AxisSelection sensitivity;        // rows = models, columns = metrics
    AxisSelection metric_contingency;  // metric pairs, one block per model
    AxisSelection model_contingency;   // model pairs, one block per metric
    std::vector<CorrelationKind> rank_by;
    std::uint64_t seed = 42;
    unsigned jobs = 1;

    static std::vector<PredictorSpec> default_battery()
    {
        std::vector<PredictorSpec> out;
        for (const auto kind : {PredictorKind::AvgIDF, PredictorKind::Clarity, PredictorKind::WIG, PredictorKind::NQC}) {
            PredictorSpec p;
            p.kind = kind;
            out.push_back(p);
        }
        for (const auto base : {PredictorKind::Clarity, PredictorKind::WIG, PredictorKind::NQC}) {
            PredictorSpec p;
            p.kind = PredictorKind::UEF;
            p.base = base;
            out.push_back(p);
        }
        return out;
    }

    // AP/R/nDCG at 10/100/1000 plus P@10; LMJM(0.3, 0.6), three BM25 and
    // three LMDir settings; the seven-predictor battery.
    static GridConfig defaults()
    {
        GridConfig c;
        const auto lmjm3 = RetrievalModel::lmjm(0.3), lmjm6 = RetrievalModel::lmjm(0.6);
        const auto bm25a = RetrievalModel::bm25(0.7, 0.3), bm25b = RetrievalModel::bm25(1.0, 1.0),
                   bm25c = RetrievalModel::bm25(0.3, 0.7);
        const auto dir100 = RetrievalModel::lmdir(100), dir500 = RetrievalModel::lmdir(500),
                   dir1000 = RetrievalModel::lmdir(1000);
        c.models = {lmjm3, lmjm6, bm25a, bm25b, bm25c, dir100, dir500, dir1000};
        const auto m = [](const char* s) { return MetricSpec::parse(s); };
        c.metrics = {m("AP@10"),  m("AP@100"),  m("AP@1000"),   m("R@10"),     m("R@100"),
                     m("R@1000"), m("nDCG@10"), m("nDCG@100"), m("nDCG@1000"), m("P@10")};
        c.battery = default_battery();
        c.correlations = {CorrelationKind::PearsonR, CorrelationKind::SpearmanRho, CorrelationKind::KendallTau};
        c.kappa = 1000;
        const std::vector<MetricSpec> sens_metrics = {m("AP@100"), m("nDCG@100"), m("R@100"), m("P@10")};
        const std::vector<RetrievalModel> sens_models = {lmjm6, bm25a, dir1000};
        c.sensitivity = {sens_metrics, sens_models};
        c.metric_contingency = {{m("AP@10"), m("AP@100"), m("AP@1000"), m("R@10"), m("R@100"), m("R@1000"),
                                 m("nDCG@10"), m("nDCG@100"), m("nDCG@1000")},
                                sens_models};
        c.model_contingency = {sens_metrics, c.models};
        c.rank_by = {CorrelationKind::PearsonR, CorrelationKind::KendallTau};
        return c;
    }

    // All problems at once, so a bad config is reported before any compute.
    std::vector<std::string> validate() const
    {
        std::vector<std::string> errors;
        if (models.empty())
            errors.emplace_back("at least one retrieval model is required");
        if (metrics.empty())
            errors.emplace_back("at least one metric is required");
        if (battery.empty())
            errors.emplace_back("at least one predictor is required");
        if (correlations.empty())
            errors.emplace_back("at least one correlation kind is required");
        if (kappa < 1)
            errors.emplace_back("kappa must be >= 1");
        for (const auto& p : battery) {
            try {
                p.validate();
            }
            catch (const Error& e) {
                errors.push_back(p.label() + ": " + e.what());
            }
        }
        if (sensitivity.metrics.empty() || sensitivity.models.empty())
            errors.emplace_back("sensitivity axes must name at least one metric and one model");
        const bool wants_contingency = !rank_by.empty();
        if (wants_contingency && battery.size() < 2)
            errors.emplace_back("contingency tables need at least two predictors");
        if (wants_contingency && metric_contingency.metrics.size() >= 2 && metric_contingency.models.empty())
            errors.emplace_back("metric contingency needs at least one model");
        if (wants_contingency && model_contingency.models.size() >= 2 && model_contingency.metrics.empty())
            errors.emplace_back("model contingency needs at least one metric");
        return errors;
    }
};

struct GridResult {
    std::vector<QppOutcome> outcomes;  // predictor-major over models x metrics
    std::vector<SensitivityReport> sensitivity;
    std::vector<ContingencyReport> contingency;
};

inline GridResult run_grid(GridConfig config, Workbench& wb)
{
    if (auto errors = config.validate(); !errors.empty()) {
        std::string msg = "invalid grid configuration:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw Error(msg);
    }
    for (auto& p : config.battery)
        p.seed = config.seed;

    // Every model and metric the reports touch, in first-seen order.
    std::vector<RetrievalModel> models;
    std::vector<MetricSpec> metrics;
    auto add_model = [&](const RetrievalModel& m) {
        if (std::find(models.begin(), models.end(), m) == models.end())
            models.push_back(m);
    };
    auto add_metric = [&](const MetricSpec& m) {
        if (std::find(metrics.begin(), metrics.end(), m) == metrics.end())
            metrics.push_back(m);
    };
    for (const auto* sel : {&config.sensitivity, &config.metric_contingency, &config.model_contingency}) {
        for (const auto& m : sel->models)
            add_model(m);
        for (const auto& m : sel->metrics)
            add_metric(m);
    }
    for (const auto& m : config.models)
        add_model(m);
    for (const auto& m : config.metrics)
        add_metric(m);

    spdlog::info("grid: {} models x {} metrics x {} predictors over {} queries", models.size(), metrics.size(),
                 config.battery.size(), wb.query_order().size());

    // Warm the caches in parallel; later lookups are pure reads.
    parallel_for(models.size(), config.jobs, [&](std::size_t i) { wb.run(models[i], config.kappa); });
    parallel_for(models.size() * config.battery.size(), config.jobs, [&](std::size_t i) {
        wb.predictions(config.battery[i % config.battery.size()], models[i / config.battery.size()], config.kappa);
    });
    parallel_for(models.size() * metrics.size(), config.jobs, [&](std::size_t i) {
        wb.ground_truth(metrics[i % metrics.size()], models[i / metrics.size()], config.kappa);
    });

    GridResult result;
    for (const auto& p : config.battery)
        for (const auto& model : models)
            for (const auto& metric : metrics)
                result.outcomes.push_back(wb.evaluate_outcome(p, {metric, model, config.kappa}));

    for (const auto& p : config.battery)
        result.sensitivity.push_back(sensitivity(wb, p, config.sensitivity.metrics, config.sensitivity.models,
                                                 config.kappa, config.correlations));

    for (const auto rank_by : config.rank_by) {
        if (config.metric_contingency.metrics.size() >= 2)
            result.contingency.push_back(contingency(wb, config.battery, ContingencyAxis::MetricPairs,
                                                     config.metric_contingency.metrics,
                                                     config.metric_contingency.models, config.kappa, rank_by));
        if (config.model_contingency.models.size() >= 2)
            result.contingency.push_back(contingency(wb, config.battery, ContingencyAxis::ModelPairs,
                                                     config.model_contingency.metrics,
                                                     config.model_contingency.models, config.kappa, rank_by));
    }
    return result;
}

}  // namespace qppwb
