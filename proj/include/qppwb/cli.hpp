#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "reports.hpp"

namespace qppwb {

// Log level comes from QPP_WORKBENCH_LOG (trace, debug, info, warn, error, off).
inline void init_logging()
{
    static const bool done = [] {
        auto logger = spdlog::stderr_logger_mt("qppwb");
        logger->set_pattern("[%l] %v");
        spdlog::set_default_logger(logger);
        return true;
    }();
    (void)done;
    const char* env = std::getenv("QPP_WORKBENCH_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

namespace cli {

struct Options {
    std::string config;
    std::string corpus;
    std::string format;
    std::string topics;
    std::string qrels;
    std::optional<std::uint32_t> k;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;

    std::string snapshot;
    std::vector<std::string> models;
    std::uint32_t kappa = 1000;
    std::string run_tag;
    std::string out;
    std::string run;
    std::vector<std::string> metrics;
    std::string ndcg_gain = "graded";
    std::vector<std::string> predictors;
    std::string predictions;
    std::string ground_truth;
};

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback)
    {
        if (!path.empty() && path != "-") {
            if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
                std::filesystem::create_directories(parent);
            file_.open(path, std::ios::binary);
            if (!file_)
                throw Error("cannot write " + path);
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline std::string fixed6(double v) { return format_fixed(v, 6); }

// Corpus/topics/qrels from --config, overridden by explicit flags.
struct DataSources {
    std::filesystem::path corpus;
    CorpusFormat format = CorpusFormat::Tsv;
    std::filesystem::path topics;
    std::filesystem::path qrels;
    std::optional<RunConfig> config;
};

inline DataSources resolve_sources(const Options& o)
{
    DataSources s;
    if (!o.config.empty()) {
        s.config = load_config(o.config);
        s.corpus = s.config->corpus;
        s.format = s.config->corpus_format;
        s.topics = s.config->topics;
        s.qrels = s.config->qrels;
    }
    if (!o.corpus.empty())
        s.corpus = o.corpus;
    if (!o.format.empty())
        s.format = parse_corpus_format(o.format);
    if (!o.topics.empty())
        s.topics = o.topics;
    if (!o.qrels.empty())
        s.qrels = o.qrels;
    return s;
}

inline Index require_index(const DataSources& s)
{
    if (s.corpus.empty())
        throw Error("no corpus given (use --corpus or --config)");
    return load_index(s.corpus, s.format);
}

inline std::vector<Query> require_topics(const DataSources& s)
{
    if (s.topics.empty())
        throw Error("no topics given (use --topics or --config)");
    return load_topics(s.topics);
}

inline Qrels require_qrels(const std::filesystem::path& path)
{
    if (path.empty())
        throw Error("no qrels given (use --qrels or --config)");
    auto in = detail::open_input(path);
    return read_qrels(in);
}

inline Run load_run(const std::string& path)
{
    auto in = detail::open_input(path);
    return read_run(in);
}

inline std::vector<MetricSpec> parse_metrics(const Options& o)
{
    std::vector<MetricSpec> out;
    const std::vector<std::string> defaults = {"AP@100", "nDCG@100", "R@100", "P@10"};
    Gain gain;
    if (o.ndcg_gain == "graded")
        gain = Gain::Graded;
    else if (o.ndcg_gain == "binary")
        gain = Gain::Binary;
    else
        throw Error("--ndcg-gain must be graded or binary");
    for (const auto& m : o.metrics.empty() ? defaults : o.metrics) {
        auto spec = MetricSpec::parse(m);
        spec.gain = gain;
        out.push_back(spec);
    }
    return out;
}

inline int cmd_index(const Options& o, std::ostream& out)
{
    const auto src = resolve_sources(o);
    const auto index = require_index(src);
    const auto& st = index.stats();
    nlohmann::ordered_json j;
    j["corpus"] = src.corpus.string();
    j["num_docs"] = st.num_docs();
    j["total_tokens"] = st.total_tokens();
    j["vocabulary_size"] = st.vocabulary_size();
    j["avg_doc_len"] = st.avg_doc_len();
    out << "documents=" << st.num_docs() << " tokens=" << st.total_tokens() << " vocabulary=" << st.vocabulary_size()
        << " avg_doc_len=" << fixed6(st.avg_doc_len()) << '\n';
    if (!o.snapshot.empty()) {
        Output snap(o.snapshot, out);
        *snap << j.dump(2) << '\n';
    }
    return 0;
}

inline int cmd_search(const Options& o, std::ostream& out)
{
    if (o.models.size() != 1)
        throw Error("search needs exactly one --model");
    const auto model = RetrievalModel::parse(o.models.front());
    const auto src = resolve_sources(o);
    const auto index = require_index(src);
    const auto queries = require_topics(src);
    Output dst(o.out, out);
    const auto tag = o.run_tag.empty() ? model.id() : o.run_tag;
    for (const auto& q : queries)
        write_run(*dst, search(model, q, o.kappa, index), tag);
    return 0;
}

inline int cmd_eval(const Options& o, std::ostream& out)
{
    const auto src = resolve_sources(o);
    const auto qrels = require_qrels(src.qrels);
    const auto run = load_run(o.run);
    const auto metrics = parse_metrics(o);
    Output dst(o.out, out);
    *dst << "qid\tmetric\tvalue\n";
    for (const auto& [qid, list] : run) {
        if (!qrels.contains(qid))
            throw Error("query " + qid + " in the run has no entry in the qrels");
        for (const auto& m : metrics)
            *dst << qid << '\t' << m.label() << '\t' << fixed6(evaluate(m, list, qrels)) << '\n';
    }
    return 0;
}

inline int cmd_qpp(const Options& o, std::ostream& out)
{
    const auto src = resolve_sources(o);
    const auto index = require_index(src);
    const auto queries = require_topics(src);
    const auto model = RetrievalModel::parse(o.models.empty() ? "LMDIR:1000" : o.models.front());

    std::vector<PredictorSpec> battery;
    if (o.predictors.empty())
        battery = src.config ? src.config->grid.battery : GridConfig::default_battery();
    for (const auto& p : o.predictors)
        battery.push_back(PredictorSpec::parse(p));
    for (auto& p : battery) {
        if (o.k)
            p.k = *o.k;
        if (o.seed)
            p.seed = *o.seed;
        else if (src.config)
            p.seed = src.config->grid.seed;
        p.validate();
    }

    Run run;
    if (!o.run.empty()) {
        run = load_run(o.run);
    }
    else {
        for (const auto& q : queries)
            run[q.qid] = search(model, q, o.kappa, index);
    }

    Output dst(o.out, out);
    *dst << "qid\tpredictor\tvalue\n";
    for (const auto& p : battery) {
        const auto pv = predict(p, queries, run, model, index);
        for (std::size_t i = 0; i < pv.size(); ++i)
            *dst << pv.qids[i] << '\t' << p.label() << '\t' << fixed6(pv.values[i]) << '\n';
    }
    return 0;
}

// Three-column TSV (qid, name, value) grouped by name; a header line is skipped.
inline std::map<std::string, std::map<std::string, double>> read_long_tsv(const std::string& path)
{
    auto in = detail::open_input(path);
    std::map<std::string, std::map<std::string, double>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty() || (line_no == 1 && line.rfind("qid\t", 0) == 0))
            continue;
        std::istringstream fields(line);
        std::string qid, name, value;
        if (!std::getline(fields, qid, '\t') || !std::getline(fields, name, '\t') || !std::getline(fields, value))
            throw Error(path + " line " + std::to_string(line_no) + ": expected 'qid<TAB>name<TAB>value'");
        out[name][qid] = detail::parse_double(value, path + " line " + std::to_string(line_no));
    }
    return out;
}

inline int cmd_correlate(const Options& o, std::ostream& out)
{
    const auto preds = read_long_tsv(o.predictions);
    const auto truth = read_long_tsv(o.ground_truth);
    Output dst(o.out, out);
    *dst << "predictor\tmetric\tn";
    for (const auto kind : kAllCorrelations)
        *dst << '\t' << correlation_symbol(kind);
    *dst << '\n';
    for (const auto& [pname, pvals] : preds) {
        for (const auto& [mname, mvals] : truth) {
            std::vector<double> x, y;
            for (const auto& [qid, v] : pvals) {
                auto it = mvals.find(qid);
                if (it == mvals.end())
                    throw Error("query " + qid + " has a prediction but no " + mname + " value");
                x.push_back(v);
                y.push_back(it->second);
            }
            if (x.size() != mvals.size())
                throw Error(mname + " covers queries without a " + pname + " prediction");
            *dst << pname << '\t' << mname << '\t' << x.size();
            for (const auto kind : kAllCorrelations)
                *dst << '\t' << format_cell(correlate(kind, x, y), 6);
            *dst << '\n';
        }
    }
    return 0;
}

inline int cmd_sweep(const Options& o, std::ostream& out)
{
    if (o.config.empty())
        throw Error("sweep needs --config");
    auto src = resolve_sources(o);
    auto cfg = *src.config;
    cfg.corpus = src.corpus;
    cfg.corpus_format = src.format;
    cfg.topics = src.topics;
    cfg.qrels = src.qrels;
    if (o.seed)
        cfg.grid.seed = *o.seed;
    if (o.jobs)
        cfg.grid.jobs = std::max(1u, *o.jobs);
    if (o.k)
        for (auto& p : cfg.grid.battery)
            p.k = *o.k;
    if (!o.out.empty())
        cfg.output_dir = o.out;

    const auto index = load_index(cfg.corpus, cfg.corpus_format);
    auto queries = load_topics(cfg.topics);
    const auto qrels = require_qrels(cfg.qrels);
    Workbench wb(index, std::move(queries), qrels);
    const auto result = run_grid(cfg.grid, wb);
    const auto files = write_reports(result, cfg.output_dir);
    for (const auto& f : files)
        out << (cfg.output_dir / f).string() << '\n';
    return 0;
}

}  // namespace cli

// Runs the command line in-process. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    init_logging();
    cli::Options o;
    CLI::App app{"Query performance prediction workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", o.config, "JSON configuration file");
    app.add_option("--topics", o.topics, "topics file (TSV or TREC)");
    app.add_option("--k", o.k, "top documents used by post-retrieval predictors");
    app.add_option("--seed", o.seed, "seed for sampled predictors");

    auto corpus_opts = [&](CLI::App* sub) {
        sub->add_option("--corpus", o.corpus, "corpus file or directory");
        sub->add_option("--format", o.format, "corpus format: tsv or trec");
    };

    auto* index = app.add_subcommand("index", "build the index and print collection statistics");
    corpus_opts(index);
    index->add_option("--snapshot", o.snapshot, "write collection statistics as JSON");

    auto* search = app.add_subcommand("search", "retrieve a ranked list per topic");
    corpus_opts(search);
    search->add_option("--model", o.models, "KIND:PARAMS, e.g. LMDIR:1000")->required();
    search->add_option("--kappa", o.kappa, "retrieval depth")->check(CLI::PositiveNumber);
    search->add_option("--run-tag", o.run_tag, "run tag");
    search->add_option("--out", o.out, "output run file (default stdout)");

    auto* eval = app.add_subcommand("eval", "per-query metric values for a run");
    eval->add_option("--run", o.run, "TREC run file")->required();
    eval->add_option("--qrels", o.qrels, "TREC qrels file");
    eval->add_option("--metric", o.metrics, "KIND@K (repeatable)");
    eval->add_option("--ndcg-gain", o.ndcg_gain, "graded or binary");
    eval->add_option("--out", o.out, "output TSV (default stdout)");

    auto* qpp = app.add_subcommand("qpp", "per-query predictor values");
    corpus_opts(qpp);
    qpp->add_option("--run", o.run, "TREC run file (retrieved with --model when absent)");
    qpp->add_option("--model", o.models, "scoring model of the run")->expected(1);
    qpp->add_option("--kappa", o.kappa, "retrieval depth")->check(CLI::PositiveNumber);
    qpp->add_option("--predictor", o.predictors, "AvgIDF, Clarity, WIG, NQC or UEF(BASE) (repeatable)");
    qpp->add_option("--out", o.out, "output TSV (default stdout)");

    auto* correlate = app.add_subcommand("correlate", "correlate predictions with ground truth");
    correlate->add_option("--predictions", o.predictions, "qid/predictor/value TSV")->required();
    correlate->add_option("--ground-truth", o.ground_truth, "qid/metric/value TSV")->required();
    correlate->add_option("--out", o.out, "output TSV (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "run the full grid and write all reports");
    corpus_opts(sweep);
    sweep->add_option("--qrels", o.qrels, "TREC qrels file");
    sweep->add_option("--jobs", o.jobs, "worker threads");
    sweep->add_option("--out", o.out, "report directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*index)
            return cli::cmd_index(o, out);
        if (*search)
            return cli::cmd_search(o, out);
        if (*eval)
            return cli::cmd_eval(o, out);
        if (*qpp)
            return cli::cmd_qpp(o, out);
        if (*correlate)
            return cli::cmd_correlate(o, out);
        if (*sweep)
            return cli::cmd_sweep(o, out);
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace qppwb
