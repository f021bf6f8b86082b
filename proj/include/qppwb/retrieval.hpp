#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "index.hpp"

namespace qppwb {

enum class ModelKind { LMJM, LMDir, BM25 };

namespace detail {

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        if (c >= 'a' && c <= 'z')
            c = static_cast<char>(c - 'a' + 'A');
    return out;
}

inline double parse_double(std::string_view s, std::string_view what)
{
    std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size())
        throw Error("invalid number '" + str + "' in " + std::string(what));
    return v;
}

}  // namespace detail

// The scoring function: one of three retrieval models with its parameters.
// Construct through the named factories, which validate parameter ranges.
class RetrievalModel {
public:
    static RetrievalModel lmjm(double lambda)
    {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw Error("LMJM lambda must lie in (0,1), got " + detail::format_number(lambda));
        return RetrievalModel(ModelKind::LMJM, lambda, 0.0);
    }
    static RetrievalModel lmdir(double mu)
    {
        if (!(mu > 0.0))
            throw Error("LMDir mu must be > 0, got " + detail::format_number(mu));
        return RetrievalModel(ModelKind::LMDir, mu, 0.0);
    }
    static RetrievalModel bm25(double k1, double b)
    {
        if (!(k1 >= 0.0))
            throw Error("BM25 k1 must be >= 0, got " + detail::format_number(k1));
        if (!(b >= 0.0 && b <= 1.0))
            throw Error("BM25 b must lie in [0,1], got " + detail::format_number(b));
        return RetrievalModel(ModelKind::BM25, k1, b);
    }

    // Parses "LMJM:0.6", "LMDIR:1000" or "BM25:0.7,0.3" (kind is case-insensitive).
    static RetrievalModel parse(std::string_view text)
    {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos)
            throw Error("model spec '" + std::string(text) + "' must look like KIND:PARAMS");
        const auto kind = detail::upper(text.substr(0, colon));
        const auto params = text.substr(colon + 1);
        if (kind == "LMJM")
            return lmjm(detail::parse_double(params, "LMJM lambda"));
        if (kind == "LMDIR")
            return lmdir(detail::parse_double(params, "LMDir mu"));
        if (kind == "BM25") {
            const auto comma = params.find(',');
            if (comma == std::string_view::npos)
                throw Error("BM25 needs two parameters: BM25:k1,b");
            return bm25(detail::parse_double(params.substr(0, comma), "BM25 k1"),
                        detail::parse_double(params.substr(comma + 1), "BM25 b"));
        }
        throw Error("unknown model kind '" + std::string(text.substr(0, colon)) + "'");
    }

    ModelKind kind() const { return kind_; }
    double lambda() const { return p1_; }
    double mu() const { return p1_; }
    double k1() const { return p1_; }
    double b() const { return p2_; }

    bool is_language_model() const { return kind_ != ModelKind::BM25; }

    // Display id, e.g. "LMJM(0.6)", "BM25(0.7,0.3)", "LMDir(1000)".
    std::string id() const
    {
        switch (kind_) {
        case ModelKind::LMJM:
            return "LMJM(" + detail::format_number(p1_) + ")";
        case ModelKind::LMDir:
            return "LMDir(" + detail::format_number(p1_) + ")";
        case ModelKind::BM25:
            return "BM25(" + detail::format_number(p1_) + "," + detail::format_number(p2_) + ")";
        }
        return {};
    }

    friend bool operator==(const RetrievalModel&, const RetrievalModel&) = default;

private:
    RetrievalModel(ModelKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    ModelKind kind_;
    double p1_;
    double p2_;
};

struct ScoredDoc {
    std::string doc_id;
    double score;
    std::uint32_t rank;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct RankedList {
    std::string qid;
    std::vector<ScoredDoc> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

// Ranked lists keyed by qid.
using Run = std::map<std::string, RankedList>;

inline double bm25_idf(std::uint64_t num_docs, std::uint64_t df)
{
    const double n = static_cast<double>(num_docs);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

inline double score(const RetrievalModel& model, std::span<const QueryTerm> query, const Document& doc,
                    const CorpusStats& stats)
{
    double total = 0.0;
    const double doc_len = static_cast<double>(doc.length);
    for (const auto& qt : query) {
        if (stats.cf(qt.term) == 0)
            continue;
        const double tf = doc.tf(qt.term);
        const double pc = stats.collection_prob(qt.term);
        double w = 0.0;
        switch (model.kind()) {
        case ModelKind::LMJM: {
            const double lambda = model.lambda();
            const double pd = doc.length == 0 ? 0.0 : tf / doc_len;
            w = std::log(lambda * pd + (1.0 - lambda) * pc);
            break;
        }
        case ModelKind::LMDir:
            w = std::log((tf + model.mu() * pc) / (doc_len + model.mu()));
            break;
        case ModelKind::BM25: {
            if (tf == 0.0)
                continue;
            const double norm = model.k1() * (1.0 - model.b() + model.b() * doc_len / stats.avg_doc_len());
            w = bm25_idf(stats.num_docs(), stats.df(qt.term)) * tf * (model.k1() + 1.0) / (tf + norm);
            break;
        }
        }
        total += qt.qtf * w;
    }
    return total;
}

inline double score(const RetrievalModel& model, const Query& query, const Document& doc, const CorpusStats& stats)
{
    const auto terms = stats.resolve(query);
    return score(model, terms, doc, stats);
}

// Score of the whole collection treated as one document. Zero for BM25,
// which has no query likelihood of the collection.
inline double corpus_score(const RetrievalModel& model, std::span<const QueryTerm> query, const CorpusStats& stats)
{
    if (!model.is_language_model())
        return 0.0;
    double total = 0.0;
    for (const auto& qt : query) {
        if (stats.cf(qt.term) == 0)
            continue;
        total += qt.qtf * std::log(stats.collection_prob(qt.term));
    }
    return total;
}

inline double corpus_score(const RetrievalModel& model, const Query& query, const CorpusStats& stats)
{
    const auto terms = stats.resolve(query);
    return corpus_score(model, terms, stats);
}

// Top-kappa documents among those containing at least one query term.
// Ties on score are broken by ascending doc_id.
inline RankedList search(const RetrievalModel& model, const Query& query, std::uint32_t kappa, const Index& index)
{
    if (kappa < 1)
        throw Error("search depth must be >= 1");
    RankedList out{query.qid, {}};
    const auto& stats = index.stats();
    const auto terms = stats.resolve(query);
    if (terms.empty())
        return out;

    std::vector<DocIndex> candidates;
    {
        std::unordered_set<DocIndex> seen;
        for (const auto& qt : terms)
            for (const auto& p : index.postings(qt.term))
                if (seen.insert(p.doc).second)
                    candidates.push_back(p.doc);
    }

    struct Scored {
        DocIndex doc;
        double score;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (auto d : candidates)
        scored.push_back({d, score(model, terms, index.document(d), stats)});

    auto better = [&](const Scored& a, const Scored& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return index.document(a.doc).doc_id < index.document(b.doc).doc_id;
    };
    const auto depth = std::min<std::size_t>(kappa, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(depth), scored.end(), better);

    out.entries.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i)
        out.entries.push_back({index.document(scored[i].doc).doc_id, scored[i].score, static_cast<std::uint32_t>(i + 1)});
    return out;
}

// TREC run format: "qid Q0 doc_id rank score run_tag", score with 6 decimals.
inline void write_run(std::ostream& os, const RankedList& list, std::string_view run_tag)
{
    char buf[64];
    for (const auto& e : list.entries) {
        std::snprintf(buf, sizeof buf, "%.6f", e.score);
        os << list.qid << " Q0 " << e.doc_id << ' ' << e.rank << ' ' << buf << ' ' << run_tag << '\n';
    }
}

inline void write_run(std::ostream& os, const Run& run, std::string_view run_tag)
{
    for (const auto& [qid, list] : run)
        write_run(os, list, run_tag);
}

// Reads a TREC run file. Entries of each query are ordered by rank.
inline Run read_run(std::istream& is)
{
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        std::string qid, q0, doc_id, tag;
        long long rank = 0;
        std::string score_text;
        if (!(fields >> qid >> q0 >> doc_id >> rank >> score_text))
            throw Error("run file line " + std::to_string(line_no) + ": expected 'qid Q0 doc_id rank score tag'");
        if (rank < 1)
            throw Error("run file line " + std::to_string(line_no) + ": rank must be >= 1");
        const double s = detail::parse_double(score_text, "run file line " + std::to_string(line_no));
        auto& list = run[qid];
        list.qid = qid;
        list.entries.push_back({doc_id, s, static_cast<std::uint32_t>(rank)});
    }
    for (auto& [qid, list] : run) {
        std::stable_sort(list.entries.begin(), list.entries.end(),
                         [](const ScoredDoc& a, const ScoredDoc& b) { return a.rank < b.rank; });
    }
    return run;
}

}  // namespace qppwb
