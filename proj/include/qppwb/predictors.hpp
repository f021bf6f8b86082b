#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "correlation.hpp"
#include "error.hpp"
#include "index.hpp"
#include "metrics.hpp"
#include "retrieval.hpp"

namespace qppwb {

enum class PredictorKind { AvgIDF, Clarity, WIG, NQC, UEF };
enum class StdDenominator { Population, Sample };

struct PredictorSpec {
    PredictorKind kind = PredictorKind::NQC;
    PredictorKind base = PredictorKind::NQC;  // UEF only
    std::uint32_t k = 20;                     // top documents used
    std::uint32_t pool = 100;                 // UEF: sample from the top `pool` documents
    std::uint32_t num_samples = 10;           // UEF
    std::uint32_t fb_terms = 100;             // relevance model vocabulary
    double rlm_mu = 1000.0;                   // Dirichlet smoothing inside the relevance model
    StdDenominator nqc_std = StdDenominator::Population;
    std::uint64_t seed = 42;

    bool is_post_retrieval() const { return kind != PredictorKind::AvgIDF; }

    std::string label() const
    {
        if (kind == PredictorKind::UEF)
            return "UEF(" + kind_name(base) + ")";
        return kind_name(kind);
    }

    static std::string kind_name(PredictorKind kind)
    {
        switch (kind) {
        case PredictorKind::AvgIDF: return "AvgIDF";
        case PredictorKind::Clarity: return "Clarity";
        case PredictorKind::WIG: return "WIG";
        case PredictorKind::NQC: return "NQC";
        case PredictorKind::UEF: return "UEF";
        }
        return "?";
    }

    static PredictorKind parse_kind(std::string_view text)
    {
        const auto s = detail::upper(text);
        if (s == "AVGIDF")
            return PredictorKind::AvgIDF;
        if (s == "CLARITY")
            return PredictorKind::Clarity;
        if (s == "WIG")
            return PredictorKind::WIG;
        if (s == "NQC")
            return PredictorKind::NQC;
        if (s == "UEF")
            return PredictorKind::UEF;
        throw Error("unknown predictor '" + std::string(text) + "'");
    }

    // "NQC", "avgidf", "UEF(WIG)".
    static PredictorSpec parse(std::string_view text)
    {
        PredictorSpec spec;
        const auto open = text.find('(');
        if (open == std::string_view::npos) {
            spec.kind = parse_kind(text);
            if (spec.kind == PredictorKind::UEF)
                throw Error("UEF needs a base predictor, e.g. UEF(NQC)");
        }
        else {
            if (text.back() != ')')
                throw Error("malformed predictor '" + std::string(text) + "'");
            spec.kind = parse_kind(text.substr(0, open));
            if (spec.kind != PredictorKind::UEF)
                throw Error("only UEF takes a base predictor: '" + std::string(text) + "'");
            spec.base = parse_kind(text.substr(open + 1, text.size() - open - 2));
        }
        spec.validate();
        return spec;
    }

    void validate() const
    {
        if (kind == PredictorKind::UEF &&
            base != PredictorKind::Clarity && base != PredictorKind::WIG && base != PredictorKind::NQC)
            throw Error("UEF base must be Clarity, WIG or NQC");
        if (k < 1)
            throw Error("predictor k must be >= 1");
        if (kind == PredictorKind::UEF && pool < k)
            throw Error("UEF pool K must be >= k");
        if (num_samples < 1)
            throw Error("UEF needs at least one sample");
        if (fb_terms < 1)
            throw Error("fb_terms must be >= 1");
        if (!(rlm_mu > 0.0))
            throw Error("relevance model mu must be > 0");
    }

    PredictorSpec base_spec() const
    {
        PredictorSpec b = *this;
        b.kind = base;
        return b;
    }
};

using PredictionVector = QueryValues<struct PredictionTag>;

// ---------------------------------------------------------------- pre-retrieval

// Mean of ln(N/df(t)) over the query terms present in the index.
inline double avg_idf(const Query& query, const CorpusStats& stats)
{
    double sum = 0.0;
    std::size_t present = 0;
    for (const auto& t : query.terms) {
        const auto df = stats.df(t);
        if (df == 0)
            continue;
        sum += std::log(static_cast<double>(stats.num_docs()) / static_cast<double>(df));
        ++present;
    }
    return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

// ---------------------------------------------------------------- score based

inline std::uint64_t effective_query_length(std::span<const QueryTerm> terms)
{
    std::uint64_t n = 0;
    for (const auto& t : terms)
        n += t.qtf;
    return n;
}

// Mean gain of the top-k scores over the corpus score, scaled by 1/sqrt(|Q|).
inline double wig_from_scores(std::span<const double> scores, double corpus_score, double query_length,
                              std::uint32_t k)
{
    const std::size_t top = std::min<std::size_t>(k, scores.size());
    if (top == 0 || query_length <= 0.0)
        return 0.0;
    double gain = 0.0;
    for (std::size_t i = 0; i < top; ++i)
        gain += scores[i] - corpus_score;
    return gain / static_cast<double>(top) / std::sqrt(query_length);
}

// Standard deviation of the top-k scores, normalised by |corpus score| when
// that is non-negligible.
inline double nqc_from_scores(std::span<const double> scores, double corpus_score, std::uint32_t k,
                              StdDenominator denominator = StdDenominator::Population)
{
    const std::size_t top = std::min<std::size_t>(k, scores.size());
    if (top < 2)
        return 0.0;
    const double mean = std::accumulate(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(top), 0.0) /
                        static_cast<double>(top);
    double ss = 0.0;
    for (std::size_t i = 0; i < top; ++i)
        ss += (scores[i] - mean) * (scores[i] - mean);
    const double n = denominator == StdDenominator::Population ? static_cast<double>(top)
                                                                : static_cast<double>(top - 1);
    const double sigma = std::sqrt(ss / n);
    const double norm = std::abs(corpus_score);
    return norm > 1e-9 ? sigma / norm : sigma;
}

inline std::vector<double> list_scores(const RankedList& ranked)
{
    std::vector<double> s;
    s.reserve(ranked.size());
    for (const auto& e : ranked.entries)
        s.push_back(e.score);
    return s;
}

inline double wig(const Query& query, const RankedList& ranked, const RetrievalModel& model, const CorpusStats& stats,
                  const PredictorSpec& spec)
{
    const auto terms = stats.resolve(query);
    const auto scores = list_scores(ranked);
    return wig_from_scores(scores, corpus_score(model, terms, stats),
                           static_cast<double>(effective_query_length(terms)), spec.k);
}

inline double nqc(const Query& query, const RankedList& ranked, const RetrievalModel& model, const CorpusStats& stats,
                  const PredictorSpec& spec)
{
    const auto terms = stats.resolve(query);
    const auto scores = list_scores(ranked);
    return nqc_from_scores(scores, corpus_score(model, terms, stats), spec.k, spec.nqc_std);
}

// ---------------------------------------------------------------- relevance model

struct TermWeight {
    TermId term;
    double weight;
};

// Unigram distribution estimated from feedback documents; weights sorted
// descending, all > 0, summing to 1.
struct RelevanceModel {
    std::vector<TermWeight> weights;

    double total() const
    {
        double t = 0.0;
        for (const auto& w : weights)
            t += w.weight;
        return t;
    }
};

inline constexpr std::uint32_t kUntruncated = std::numeric_limits<std::uint32_t>::max();

inline double dirichlet_prob(std::uint32_t tf, std::uint64_t doc_len, double collection_prob, double mu)
{
    return (static_cast<double>(tf) + mu * collection_prob) / (static_cast<double>(doc_len) + mu);
}

// RM1: P(w|R) proportional to sum_D P(w|D) * P(Q|D), with Dirichlet-smoothed
// document models, over the vocabulary of the feedback documents. The
// distribution is truncated to the fb_terms heaviest terms and renormalised.
inline RelevanceModel estimate_rlm(std::span<const QueryTerm> query, std::span<const Document* const> docs,
                                   const CorpusStats& stats, double mu, std::uint32_t fb_terms)
{
    if (docs.empty())
        throw Error("relevance model needs at least one feedback document");

    std::vector<double> log_likelihood(docs.size(), 0.0);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& qt : query) {
            const double p = dirichlet_prob(docs[d]->tf(qt.term), docs[d]->length, stats.collection_prob(qt.term), mu);
            log_likelihood[d] += qt.qtf * std::log(p);
        }
    }
    const double shift = *std::max_element(log_likelihood.begin(), log_likelihood.end());
    std::vector<double> doc_weight(docs.size());
    double smoothing_mass = 0.0;  // sum_D w_D * mu / (|D| + mu)
    for (std::size_t d = 0; d < docs.size(); ++d) {
        doc_weight[d] = std::exp(log_likelihood[d] - shift);
        smoothing_mass += doc_weight[d] * mu / (static_cast<double>(docs[d]->length) + mu);
    }

    std::unordered_map<TermId, double> acc;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const double scale = doc_weight[d] / (static_cast<double>(docs[d]->length) + mu);
        for (const auto& tc : docs[d]->term_counts)
            acc[tc.term] += scale * tc.count;
    }

    RelevanceModel rm;
    rm.weights.reserve(acc.size());
    for (const auto& [term, w] : acc)
        rm.weights.push_back({term, w + smoothing_mass * stats.collection_prob(term)});
    std::sort(rm.weights.begin(), rm.weights.end(), [](const TermWeight& a, const TermWeight& b) {
        return a.weight > b.weight || (a.weight == b.weight && a.term < b.term);
    });
    if (rm.weights.size() > fb_terms)
        rm.weights.resize(fb_terms);
    const double total = rm.total();
    for (auto& w : rm.weights)
        w.weight /= total;
    return rm;
}

// KL divergence (bits) of a relevance model from the collection model.
inline double kl_to_collection(const RelevanceModel& rm, const CorpusStats& stats)
{
    double kl = 0.0;
    for (const auto& w : rm.weights)
        kl += w.weight * std::log2(w.weight / stats.collection_prob(w.term));
    return kl;
}

namespace detail {

inline std::vector<const Document*> resolve_docs(const RankedList& ranked, std::size_t limit, const Index& index)
{
    std::vector<const Document*> docs;
    const auto n = std::min(limit, ranked.size());
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto d = index.find(ranked.entries[i].doc_id);
        if (!d)
            throw Error("ranked list for query " + ranked.qid + " names unknown document " + ranked.entries[i].doc_id);
        docs.push_back(&index.document(*d));
    }
    return docs;
}

}  // namespace detail

inline double clarity(const Query& query, const RankedList& ranked, const Index& index, const PredictorSpec& spec)
{
    if (ranked.empty())
        return 0.0;
    const auto& stats = index.stats();
    const auto terms = stats.resolve(query);
    const auto docs = detail::resolve_docs(ranked, spec.k, index);
    return kl_to_collection(estimate_rlm(terms, docs, stats, spec.rlm_mu, spec.fb_terms), stats);
}

// ---------------------------------------------------------------- UEF

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform integer in [0, bound) from raw engine output; unlike
// std::uniform_int_distribution this is identical on every standard library.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t r = rng();
        if (r >= threshold)
            return r % bound;
    }
}

}  // namespace detail

// Seed for one query: independent of evaluation order.
inline std::uint64_t query_seed(std::uint64_t global_seed, std::string_view qid)
{
    return detail::splitmix64(global_seed ^ detail::splitmix64(detail::fnv1a(qid)));
}

// Draws `num_samples` subsets of size min(k, |pool|) from the first `pool`
// entries, each sorted by original position.
inline std::vector<std::vector<std::size_t>> uef_samples(std::size_t list_size, const PredictorSpec& spec,
                                                         std::uint64_t seed)
{
    const std::size_t pool = std::min<std::size_t>(spec.pool, list_size);
    const std::size_t size = std::min<std::size_t>(spec.k, pool);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> samples;
    samples.reserve(spec.num_samples);
    std::vector<std::size_t> perm(pool);
    for (std::uint32_t s = 0; s < spec.num_samples; ++s) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < size; ++i) {
            const auto j = i + static_cast<std::size_t>(detail::bounded(rng, pool - i));
            std::swap(perm[i], perm[j]);
        }
        std::vector<std::size_t> pick(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
        std::sort(pick.begin(), pick.end());
        samples.push_back(std::move(pick));
    }
    return samples;
}

// Mean over samples of xi * phi_base, where xi is Pearson's correlation
// between the sample's original scores and `rescore(sample)`; xi is 0 when
// undefined. `rescore` maps a RankedList to one score per entry and `base`
// maps a RankedList to the base prediction.
template <typename Rescore, typename Base>
double uef_aggregate(const RankedList& ranked, const PredictorSpec& spec, std::uint64_t seed, Rescore&& rescore,
                     Base&& base)
{
    if (ranked.empty())
        return 0.0;
    const auto samples = uef_samples(ranked.size(), spec, seed);
    double total = 0.0;
    for (const auto& pick : samples) {
        RankedList sample{ranked.qid, {}};
        sample.entries.reserve(pick.size());
        for (std::size_t i = 0; i < pick.size(); ++i) {
            auto e = ranked.entries[pick[i]];
            e.rank = static_cast<std::uint32_t>(i + 1);
            sample.entries.push_back(std::move(e));
        }
        double xi = 0.0;
        if (sample.size() >= 2) {
            const auto original = list_scores(sample);
            const std::vector<double> rescored = rescore(sample);
            xi = pearson(original, rescored).value_or(0.0);
        }
        total += xi * base(sample);
    }
    return total / static_cast<double>(samples.size());
}

// Scores each document by its cross entropy with the relevance model,
// sum_w P(w|R) ln P(w|D), with Dirichlet-smoothed P(w|D).
inline std::vector<double> rlm_rescore(const RelevanceModel& rm, std::span<const Document* const> docs,
                                       const CorpusStats& stats, double mu)
{
    std::vector<double> out;
    out.reserve(docs.size());
    for (const auto* doc : docs) {
        double s = 0.0;
        for (const auto& w : rm.weights)
            s += w.weight * std::log(dirichlet_prob(doc->tf(w.term), doc->length, stats.collection_prob(w.term), mu));
        out.push_back(s);
    }
    return out;
}

inline double predict_one(const PredictorSpec& spec, const Query& query, const RankedList* ranked,
                   const RetrievalModel& model, const Index& index);

inline double uef(const Query& query, const RankedList& ranked, const RetrievalModel& model, const Index& index,
                  const PredictorSpec& spec)
{
    const auto& stats = index.stats();
    const auto terms = stats.resolve(query);
    const auto base = spec.base_spec();
    return uef_aggregate(
        ranked, spec, query_seed(spec.seed, query.qid),
        [&](const RankedList& sample) {
            const auto docs = detail::resolve_docs(sample, sample.size(), index);
            const auto rm = estimate_rlm(terms, docs, stats, spec.rlm_mu, spec.fb_terms);
            return rlm_rescore(rm, docs, stats, spec.rlm_mu);
        },
        [&](const RankedList& sample) { return predict_one(base, query, &sample, model, index); });
}

// ---------------------------------------------------------------- dispatch

inline double predict_one(const PredictorSpec& spec, const Query& query, const RankedList* ranked,
                          const RetrievalModel& model, const Index& index)
{
    if (spec.kind == PredictorKind::AvgIDF)
        return avg_idf(query, index.stats());
    if (ranked == nullptr)
        throw Error("predictor " + spec.label() + " needs a ranked list for query " + query.qid);
    if (ranked->empty())
        return 0.0;
    switch (spec.kind) {
    case PredictorKind::Clarity: return clarity(query, *ranked, index, spec);
    case PredictorKind::WIG: return wig(query, *ranked, model, index.stats(), spec);
    case PredictorKind::NQC: return nqc(query, *ranked, model, index.stats(), spec);
    case PredictorKind::UEF: return uef(query, *ranked, model, index, spec);
    case PredictorKind::AvgIDF: break;
    }
    return 0.0;
}

// Predictions for every query, aligned to `queries`. Post-retrieval
// predictors look up each query's ranked list in `run`.
inline PredictionVector predict(const PredictorSpec& spec, std::span<const Query> queries, const Run& run,
                                const RetrievalModel& model, const Index& index)
{
    spec.validate();
    PredictionVector out;
    out.qids.reserve(queries.size());
    out.values.reserve(queries.size());
    for (const auto& q : queries) {
        const RankedList* ranked = nullptr;
        if (spec.is_post_retrieval()) {
            auto it = run.find(q.qid);
            if (it == run.end())
                throw Error("predictor " + spec.label() + ": no ranked list for query " + q.qid);
            ranked = &it->second;
        }
        out.qids.push_back(q.qid);
        out.values.push_back(predict_one(spec, q, ranked, model, index));
    }
    return out;
}

}  // namespace qppwb
