#pragma once

#include <algorithm>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "porter_stemmer.hpp"

namespace qppwb {

// English stopword list (NLTK's list without the contracted forms, which
// never survive tokenization).
inline constexpr std::string_view kStopwords[] = {
    "a",       "about",  "above",   "after",      "again",   "against", "all",    "am",
    "an",      "and",    "any",     "are",        "as",      "at",      "be",     "because",
    "been",    "before", "being",   "below",      "between", "both",    "but",    "by",
    "can",     "d",      "did",     "do",         "does",    "doing",   "don",    "down",
    "during",  "each",   "few",     "for",        "from",    "further", "had",    "has",
    "have",    "having", "he",      "her",        "here",    "hers",    "herself", "him",
    "himself", "his",    "how",     "i",          "if",      "in",      "into",   "is",
    "it",      "its",    "itself",  "just",       "ll",      "m",       "me",     "more",
    "most",    "my",     "myself",  "no",         "nor",     "not",     "now",    "o",
    "of",      "off",    "on",      "once",       "only",    "or",      "other",  "our",
    "ours",    "ourselves", "out",  "over",       "own",     "re",      "s",      "same",
    "she",     "should", "so",      "some",       "such",    "t",       "than",   "that",
    "the",     "their",  "theirs",  "them",       "themselves", "then", "there",  "these",
    "they",    "this",   "those",   "through",    "to",      "too",     "under",  "until",
    "up",      "ve",     "very",    "was",        "we",      "were",    "what",   "when",
    "where",   "which",  "while",   "who",        "whom",    "why",     "will",   "with",
    "y",       "you",    "your",    "yours",      "yourself", "yourselves"};

inline bool is_stopword(std::string_view token)
{
    static const std::vector<std::string_view> sorted = [] {
        std::vector<std::string_view> v(std::begin(kStopwords), std::end(kStopwords));
        std::sort(v.begin(), v.end());
        return v;
    }();
    return std::binary_search(sorted.begin(), sorted.end(), token);
}

// Lowercases ASCII letters and splits on every byte that is not [a-z0-9].
// Non-ASCII bytes act as separators, so the output is locale independent.
inline std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (const char raw : text) {
        char ch = raw;
        if (ch >= 'A' && ch <= 'Z')
            ch = static_cast<char>(ch - 'A' + 'a');
        if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) {
            current.push_back(ch);
        }
        else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

// The single analysis pipeline applied to documents and queries alike:
// lowercase, tokenize, drop stopwords, Porter-stem.
inline std::vector<std::string> analyze(std::string_view text)
{
    static const PorterStemmer stemmer;
    std::vector<std::string> terms;
    for (auto& token : tokenize(text)) {
        if (is_stopword(token))
            continue;
        terms.push_back(stemmer.stem(token));
    }
    return terms;
}

}  // namespace qppwb
