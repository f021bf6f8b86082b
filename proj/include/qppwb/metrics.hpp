#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "retrieval.hpp"

namespace qppwb {

// Relevance judgments: qid -> doc_id -> grade (>= 0).
class Qrels {
public:
    using Judgments = std::map<std::string, int, std::less<>>;

    void add(const std::string& qid, const std::string& doc_id, int grade)
    {
        if (grade < 0)
            throw Error("negative relevance grade for (" + qid + ", " + doc_id + ")");
        auto [it, inserted] = judgments_[qid].emplace(doc_id, grade);
        if (!inserted)
            throw Error("duplicate judgment for (" + qid + ", " + doc_id + ")");
    }

    bool contains(std::string_view qid) const { return judgments_.find(qid) != judgments_.end(); }

    const Judgments& at(std::string_view qid) const
    {
        auto it = judgments_.find(qid);
        if (it == judgments_.end())
            throw Error("query " + std::string(qid) + " has no entry in the qrels (query set and qrels do not match)");
        return it->second;
    }

    std::size_t num_relevant(std::string_view qid) const
    {
        const auto& j = at(qid);
        return static_cast<std::size_t>(std::count_if(j.begin(), j.end(), [](const auto& p) { return p.second > 0; }));
    }

    std::vector<std::string> qids() const
    {
        std::vector<std::string> out;
        for (const auto& [qid, _] : judgments_)
            out.push_back(qid);
        return out;
    }

private:
    std::map<std::string, Judgments, std::less<>> judgments_;
};

// TREC qrels: "qid iter doc_id grade", whitespace separated.
inline Qrels read_qrels(std::istream& is)
{
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        std::string qid, iter, doc_id;
        int grade = 0;
        if (!(fields >> qid >> iter >> doc_id >> grade))
            throw Error("qrels line " + std::to_string(line_no) + ": expected 'qid 0 doc_id grade'");
        try {
            qrels.add(qid, doc_id, grade);
        }
        catch (const Error& e) {
            throw Error("qrels line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return qrels;
}

enum class MetricKind { AP, NDCG, P, Recall };
enum class Gain { Graded, Binary };

struct MetricSpec {
    MetricKind kind = MetricKind::AP;
    std::uint32_t cutoff = 100;
    Gain gain = Gain::Graded;  // nDCG only

    std::string label() const
    {
        const char* name = "AP";
        switch (kind) {
        case MetricKind::AP: name = "AP"; break;
        case MetricKind::NDCG: name = "nDCG"; break;
        case MetricKind::P: name = "P"; break;
        case MetricKind::Recall: name = "R"; break;
        }
        return std::string(name) + "@" + std::to_string(cutoff);
    }

    // "AP@100", "nDCG@10", "P@10", "R@1000" / "recall@1000" (case-insensitive kind).
    static MetricSpec parse(std::string_view text)
    {
        const auto at = text.find('@');
        if (at == std::string_view::npos)
            throw Error("metric '" + std::string(text) + "' must look like KIND@K");
        const auto kind = detail::upper(text.substr(0, at));
        MetricSpec spec;
        if (kind == "AP" || kind == "MAP")
            spec.kind = MetricKind::AP;
        else if (kind == "NDCG")
            spec.kind = MetricKind::NDCG;
        else if (kind == "P")
            spec.kind = MetricKind::P;
        else if (kind == "R" || kind == "RECALL")
            spec.kind = MetricKind::Recall;
        else
            throw Error("unknown metric kind '" + std::string(text.substr(0, at)) + "'");
        const double k = detail::parse_double(text.substr(at + 1), "metric cutoff");
        if (k < 1 || k != std::floor(k) || k > 1e9)
            throw Error("metric cutoff must be a positive integer in '" + std::string(text) + "'");
        spec.cutoff = static_cast<std::uint32_t>(k);
        return spec;
    }

    friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

// Value of one metric for one ranked list. Unjudged documents count as
// non-relevant. AP and recall divide by the total number of relevant
// documents R (trec_eval map_cut/recall convention).
inline double evaluate(const MetricSpec& spec, const RankedList& ranked, const Qrels& qrels)
{
    const auto& judged = qrels.at(ranked.qid);
    auto grade_of = [&](const std::string& doc_id) {
        auto it = judged.find(doc_id);
        return it == judged.end() ? 0 : it->second;
    };
    std::size_t num_rel = 0;
    for (const auto& [doc, g] : judged)
        num_rel += g > 0;

    const std::size_t depth = std::min<std::size_t>(spec.cutoff, ranked.size());
    switch (spec.kind) {
    case MetricKind::AP: {
        if (num_rel == 0)
            return 0.0;
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < depth; ++i) {
            if (grade_of(ranked.entries[i].doc_id) > 0) {
                ++hits;
                sum += static_cast<double>(hits) / static_cast<double>(i + 1);
            }
        }
        return sum / static_cast<double>(num_rel);
    }
    case MetricKind::P:
    case MetricKind::Recall: {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < depth; ++i)
            hits += grade_of(ranked.entries[i].doc_id) > 0;
        if (spec.kind == MetricKind::P)
            return static_cast<double>(hits) / static_cast<double>(spec.cutoff);
        return num_rel == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(num_rel);
    }
    case MetricKind::NDCG: {
        auto gain = [&](int g) -> double {
            if (g <= 0)
                return 0.0;
            return spec.gain == Gain::Binary ? 1.0 : static_cast<double>(g);
        };
        double dcg = 0.0;
        for (std::size_t i = 0; i < depth; ++i)
            dcg += gain(grade_of(ranked.entries[i].doc_id)) / std::log2(static_cast<double>(i) + 2.0);
        std::vector<double> ideal;
        for (const auto& [doc, g] : judged)
            if (g > 0)
                ideal.push_back(gain(g));
        std::sort(ideal.begin(), ideal.end(), std::greater<>());
        double idcg = 0.0;
        for (std::size_t i = 0; i < std::min<std::size_t>(spec.cutoff, ideal.size()); ++i)
            idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
        return idcg == 0.0 ? 0.0 : dcg / idcg;
    }
    }
    return 0.0;
}

// Per-query values aligned to a fixed query order. The tag keeps ground
// truth and predictions from being mixed up.
template <typename Tag>
struct QueryValues {
    std::vector<std::string> qids;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    friend bool operator==(const QueryValues&, const QueryValues&) = default;
};

using GroundTruthVector = QueryValues<struct GroundTruthTag>;

inline GroundTruthVector ground_truth(const MetricSpec& spec, const Run& run, const Qrels& qrels,
                                      const std::vector<std::string>& query_order)
{
    GroundTruthVector out;
    out.qids.reserve(query_order.size());
    out.values.reserve(query_order.size());
    for (const auto& qid : query_order) {
        auto it = run.find(qid);
        if (it == run.end())
            throw Error("no ranked list for query " + qid);
        out.qids.push_back(qid);
        out.values.push_back(evaluate(spec, it->second, qrels));
    }
    return out;
}

}  // namespace qppwb
