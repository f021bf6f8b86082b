#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"

namespace qppwb {

using TermId = std::uint32_t;
using DocIndex = std::uint32_t;

struct TermCount {
    TermId term;
    std::uint32_t count;

    friend bool operator==(const TermCount&, const TermCount&) = default;
};

struct Document {
    std::string doc_id;
    std::vector<TermCount> term_counts;  // sorted by term id
    std::uint64_t length = 0;

    std::uint32_t tf(TermId term) const
    {
        auto it = std::lower_bound(term_counts.begin(), term_counts.end(), term,
                                   [](const TermCount& tc, TermId t) { return tc.term < t; });
        return (it != term_counts.end() && it->term == term) ? it->count : 0;
    }
};

// A query term resolved against the vocabulary, with its multiplicity.
struct QueryTerm {
    TermId term;
    std::uint32_t qtf;

    friend bool operator==(const QueryTerm&, const QueryTerm&) = default;
};

struct Query {
    std::string qid;
    std::vector<std::string> terms;
};

class CorpusStats {
public:
    std::uint64_t num_docs() const { return num_docs_; }
    std::uint64_t total_tokens() const { return total_tokens_; }
    double avg_doc_len() const
    {
        return num_docs_ == 0 ? 0.0 : static_cast<double>(total_tokens_) / static_cast<double>(num_docs_);
    }
    std::size_t vocabulary_size() const { return terms_.size(); }

    std::optional<TermId> term_id(std::string_view term) const
    {
        auto it = lookup_.find(std::string(term));
        if (it == lookup_.end())
            return std::nullopt;
        return it->second;
    }
    const std::string& term(TermId id) const { return terms_[id]; }

    std::uint64_t df(TermId id) const { return df_[id]; }
    std::uint64_t cf(TermId id) const { return cf_[id]; }
    std::uint64_t df(std::string_view term) const
    {
        auto id = term_id(term);
        return id ? df_[*id] : 0;
    }
    std::uint64_t cf(std::string_view term) const
    {
        auto id = term_id(term);
        return id ? cf_[*id] : 0;
    }

    // cf(t)/|C|
    double collection_prob(TermId id) const
    {
        return static_cast<double>(cf_[id]) / static_cast<double>(total_tokens_);
    }

    // Indexed query terms in order of first occurrence, with multiplicity.
    // Terms unknown to the corpus are dropped.
    std::vector<QueryTerm> resolve(const Query& query) const
    {
        std::vector<QueryTerm> out;
        for (const auto& t : query.terms) {
            auto id = term_id(t);
            if (!id || cf_[*id] == 0)
                continue;
            auto it = std::find_if(out.begin(), out.end(), [&](const QueryTerm& q) { return q.term == *id; });
            if (it == out.end())
                out.push_back({*id, 1});
            else
                ++it->qtf;
        }
        return out;
    }

private:
    friend class IndexBuilder;

    TermId intern(const std::string& term)
    {
        auto [it, inserted] = lookup_.try_emplace(term, static_cast<TermId>(terms_.size()));
        if (inserted) {
            terms_.push_back(term);
            df_.push_back(0);
            cf_.push_back(0);
        }
        return it->second;
    }

    std::uint64_t num_docs_ = 0;
    std::uint64_t total_tokens_ = 0;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> lookup_;
    std::vector<std::uint64_t> df_;
    std::vector<std::uint64_t> cf_;
};

struct Posting {
    DocIndex doc;
    std::uint32_t tf;
};

// Immutable in-memory inverted index. Built once by IndexBuilder, then safe
// for any number of concurrent readers.
class Index {
public:
    const CorpusStats& stats() const { return stats_; }
    std::span<const Document> documents() const { return documents_; }
    const Document& document(DocIndex d) const { return documents_[d]; }
    std::size_t size() const { return documents_.size(); }

    std::span<const Posting> postings(TermId term) const { return postings_[term]; }

    std::optional<DocIndex> find(std::string_view doc_id) const
    {
        auto it = by_id_.find(std::string(doc_id));
        if (it == by_id_.end())
            return std::nullopt;
        return it->second;
    }

private:
    friend class IndexBuilder;

    CorpusStats stats_;
    std::vector<Document> documents_;
    std::vector<std::vector<Posting>> postings_;
    std::unordered_map<std::string, DocIndex> by_id_;
};

class IndexBuilder {
public:
    void add(std::string doc_id, std::string_view text) { add_terms(std::move(doc_id), analyze(text)); }

    void add_terms(std::string doc_id, const std::vector<std::string>& terms)
    {
        if (index_.by_id_.contains(doc_id))
            throw Error("duplicate doc_id: " + doc_id);
        auto& stats = index_.stats_;

        std::unordered_map<TermId, std::uint32_t> counts;
        for (const auto& t : terms)
            ++counts[stats.intern(t)];

        Document doc;
        doc.doc_id = doc_id;
        doc.length = terms.size();
        doc.term_counts.reserve(counts.size());
        for (auto [term, count] : counts)
            doc.term_counts.push_back({term, count});
        std::sort(doc.term_counts.begin(), doc.term_counts.end(),
                  [](const TermCount& a, const TermCount& b) { return a.term < b.term; });

        const auto d = static_cast<DocIndex>(index_.documents_.size());
        index_.postings_.resize(stats.terms_.size());
        for (const auto& tc : doc.term_counts) {
            stats.df_[tc.term] += 1;
            stats.cf_[tc.term] += tc.count;
            index_.postings_[tc.term].push_back({d, tc.count});
        }
        stats.num_docs_ += 1;
        stats.total_tokens_ += doc.length;
        index_.by_id_.emplace(std::move(doc_id), d);
        index_.documents_.push_back(std::move(doc));
    }

    Index build() &&
    {
        if (index_.documents_.empty())
            throw Error("empty corpus");
        index_.postings_.resize(index_.stats_.terms_.size());
        return std::move(index_);
    }

private:
    Index index_;
};

// Builds an index from (doc_id, raw text) pairs.
template <typename Range>
Index build_index(const Range& docs)
{
    IndexBuilder builder;
    for (const auto& [doc_id, text] : docs)
        builder.add(std::string(doc_id), text);
    return std::move(builder).build();
}

inline Query make_query(std::string qid, std::string_view text)
{
    return Query{std::move(qid), analyze(text)};
}

}  // namespace qppwb
