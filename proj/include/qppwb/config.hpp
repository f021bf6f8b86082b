#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"

namespace qppwb {

// Everything a sweep needs: data locations plus the grid.
struct RunConfig {
    std::filesystem::path corpus;
    CorpusFormat corpus_format = CorpusFormat::Tsv;
    std::filesystem::path topics;
    std::filesystem::path qrels;
    std::filesystem::path output_dir = "qpp_out";
    GridConfig grid = GridConfig::defaults();
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(render(problems)), problems_(std::move(problems))
    {
    }

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string render(const std::vector<std::string>& problems)
    {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems)
            msg += "\n  - " + p;
        return msg;
    }

    std::vector<std::string> problems_;
};

namespace detail {

using nlohmann::json;

class ConfigReader {
public:
    ConfigReader(std::filesystem::path base, std::vector<std::string>& errors) : base_(std::move(base)), errors_(errors)
    {
    }

    template <typename F>
    void attempt(const std::string& where, F&& f)
    {
        try {
            f();
        }
        catch (const std::exception& e) {
            errors_.push_back(where + ": " + e.what());
        }
    }

    std::filesystem::path path(const json& j) const
    {
        std::filesystem::path p = j.get<std::string>();
        return p.is_absolute() ? p : base_ / p;
    }

    RetrievalModel model(const json& j) const
    {
        if (j.is_string())
            return RetrievalModel::parse(j.get<std::string>());
        const auto kind = upper(j.at("kind").get<std::string>());
        if (kind == "LMJM")
            return RetrievalModel::lmjm(j.at("lambda").get<double>());
        if (kind == "LMDIR")
            return RetrievalModel::lmdir(j.at("mu").get<double>());
        if (kind == "BM25")
            return RetrievalModel::bm25(j.at("k1").get<double>(), j.at("b").get<double>());
        throw Error("unknown model kind '" + j.at("kind").get<std::string>() + "'");
    }

    std::vector<RetrievalModel> models(const json& j, const std::string& where)
    {
        std::vector<RetrievalModel> out;
        if (!j.is_array()) {
            errors_.push_back(where + ": expected an array");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            attempt(where + "[" + std::to_string(i) + "]", [&] { out.push_back(model(j[i])); });
        return out;
    }

    std::vector<MetricSpec> metrics(const json& j, const std::string& where)
    {
        std::vector<MetricSpec> out;
        if (!j.is_array()) {
            errors_.push_back(where + ": expected an array");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            attempt(where + "[" + std::to_string(i) + "]",
                    [&] { out.push_back(MetricSpec::parse(j[i].get<std::string>())); });
        return out;
    }

    std::vector<CorrelationKind> correlations(const json& j, const std::string& where)
    {
        std::vector<CorrelationKind> out;
        if (!j.is_array()) {
            errors_.push_back(where + ": expected an array");
            return out;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            attempt(where + "[" + std::to_string(i) + "]",
                    [&] { out.push_back(parse_correlation(j[i].get<std::string>())); });
        return out;
    }

    void axis(const json& j, const std::string& where, AxisSelection& sel)
    {
        if (!j.is_object()) {
            errors_.push_back(where + ": expected an object");
            return;
        }
        if (j.contains("metrics"))
            sel.metrics = metrics(j["metrics"], where + ".metrics");
        if (j.contains("models"))
            sel.models = models(j["models"], where + ".models");
    }

private:
    std::filesystem::path base_;
    std::vector<std::string>& errors_;
};

inline void apply_predictor_params(const json& j, PredictorSpec& p)
{
    if (j.contains("k"))
        p.k = j["k"].get<std::uint32_t>();
    if (j.contains("pool"))
        p.pool = j["pool"].get<std::uint32_t>();
    if (j.contains("samples"))
        p.num_samples = j["samples"].get<std::uint32_t>();
    if (j.contains("fb_terms"))
        p.fb_terms = j["fb_terms"].get<std::uint32_t>();
    if (j.contains("rlm_mu"))
        p.rlm_mu = j["rlm_mu"].get<double>();
    if (j.contains("nqc_std")) {
        const auto s = j["nqc_std"].get<std::string>();
        if (s == "population")
            p.nqc_std = StdDenominator::Population;
        else if (s == "sample")
            p.nqc_std = StdDenominator::Sample;
        else
            throw Error("nqc_std must be 'population' or 'sample'");
    }
}

}  // namespace detail

// Parses a config document. Relative paths resolve against `base_dir`.
// Every problem found is collected and reported together.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    using nlohmann::json;
    std::vector<std::string> errors;
    detail::ConfigReader reader(base_dir, errors);
    RunConfig cfg;
    auto& g = cfg.grid;

    if (!j.is_object())
        throw ConfigError({"top level must be a JSON object"});

    static const char* known[] = {"corpus",      "topics",      "qrels",         "models", "metrics",
                                  "kappa",       "predictors",  "predictor_params", "correlations",
                                  "sensitivity", "contingency", "ndcg_gain",     "seed",   "output_dir", "jobs"};
    for (const auto& [key, _] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known))
            errors.push_back("unknown key '" + key + "'");

    if (!j.contains("corpus")) {
        errors.emplace_back("corpus: required");
    }
    else {
        reader.attempt("corpus", [&] {
            const auto& c = j["corpus"];
            if (c.is_string()) {
                cfg.corpus = reader.path(c);
            }
            else {
                cfg.corpus = reader.path(c.at("path"));
                if (c.contains("format"))
                    cfg.corpus_format = parse_corpus_format(c["format"].get<std::string>());
            }
            if (!std::filesystem::exists(cfg.corpus))
                throw Error("path does not exist: " + cfg.corpus.string());
        });
    }
    for (const auto* key : {"topics", "qrels"}) {
        if (!j.contains(key)) {
            errors.push_back(std::string(key) + ": required");
            continue;
        }
        reader.attempt(key, [&] {
            auto p = reader.path(j[key]);
            if (!std::filesystem::is_regular_file(p))
                throw Error("file does not exist: " + p.string());
            (std::string(key) == "topics" ? cfg.topics : cfg.qrels) = p;
        });
    }
    if (j.contains("output_dir"))
        reader.attempt("output_dir", [&] { cfg.output_dir = reader.path(j["output_dir"]); });

    // Explicit model/metric lists without explicit axes put every model and
    // metric on every axis.
    const bool custom_lists = j.contains("models") || j.contains("metrics");
    if (j.contains("models"))
        g.models = reader.models(j["models"], "models");
    if (j.contains("metrics"))
        g.metrics = reader.metrics(j["metrics"], "metrics");
    if (custom_lists) {
        g.sensitivity = {g.metrics, g.models};
        g.metric_contingency = {g.metrics, g.models};
        g.model_contingency = {g.metrics, g.models};
    }

    if (j.contains("kappa"))
        reader.attempt("kappa", [&] {
            const auto k = j["kappa"].get<std::int64_t>();
            if (k < 1)
                throw Error("must be >= 1");
            g.kappa = static_cast<std::uint32_t>(k);
        });
    if (j.contains("seed"))
        reader.attempt("seed", [&] { g.seed = j["seed"].get<std::uint64_t>(); });
    if (j.contains("jobs"))
        reader.attempt("jobs", [&] { g.jobs = std::max(1u, j["jobs"].get<unsigned>()); });

    PredictorSpec params;
    if (j.contains("predictor_params"))
        reader.attempt("predictor_params", [&] { detail::apply_predictor_params(j["predictor_params"], params); });
    if (j.contains("predictors")) {
        g.battery.clear();
        reader.attempt("predictors", [&] {
            const auto& arr = j["predictors"];
            if (!arr.is_array())
                throw Error("expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
                reader.attempt("predictors[" + std::to_string(i) + "]", [&] {
                    const auto& e = arr[i];
                    auto spec = PredictorSpec::parse(e.is_string() ? e.get<std::string>() : e.at("name").get<std::string>());
                    const auto kind = spec.kind, base = spec.base;
                    spec = params;
                    spec.kind = kind;
                    spec.base = base;
                    if (e.is_object())
                        detail::apply_predictor_params(e, spec);
                    spec.validate();
                    g.battery.push_back(spec);
                });
        });
    }
    else {
        for (auto& p : g.battery) {
            const auto kind = p.kind, base = p.base;
            p = params;
            p.kind = kind;
            p.base = base;
        }
    }

    if (j.contains("correlations"))
        g.correlations = reader.correlations(j["correlations"], "correlations");
    if (j.contains("sensitivity"))
        reader.axis(j["sensitivity"], "sensitivity", g.sensitivity);
    if (j.contains("contingency")) {
        const auto& c = j["contingency"];
        if (!c.is_object()) {
            errors.emplace_back("contingency: expected an object");
        }
        else {
            if (c.contains("rank_by"))
                g.rank_by = reader.correlations(c["rank_by"], "contingency.rank_by");
            if (c.contains("metric_pairs"))
                reader.axis(c["metric_pairs"], "contingency.metric_pairs", g.metric_contingency);
            if (c.contains("model_pairs"))
                reader.axis(c["model_pairs"], "contingency.model_pairs", g.model_contingency);
        }
    }
    if (j.contains("ndcg_gain")) {
        reader.attempt("ndcg_gain", [&] {
            const auto s = j["ndcg_gain"].get<std::string>();
            Gain gain;
            if (s == "graded")
                gain = Gain::Graded;
            else if (s == "binary")
                gain = Gain::Binary;
            else
                throw Error("must be 'graded' or 'binary'");
            auto set = [&](std::vector<MetricSpec>& v) {
                for (auto& m : v)
                    m.gain = gain;
            };
            set(g.metrics);
            set(g.sensitivity.metrics);
            set(g.metric_contingency.metrics);
            set(g.model_contingency.metrics);
        });
    }

    if (errors.empty())
        for (auto& e : g.validate())
            errors.push_back(std::move(e));
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw Error("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j, path.parent_path());
}

}  // namespace qppwb
