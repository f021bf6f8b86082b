#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "index.hpp"

namespace qppwb {

enum class CorpusFormat { Tsv, Trec };

inline CorpusFormat parse_corpus_format(std::string_view s)
{
    if (s == "tsv")
        return CorpusFormat::Tsv;
    if (s == "trec")
        return CorpusFormat::Trec;
    throw Error("unknown format '" + std::string(s) + "' (expected tsv or trec)");
}

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return in;
}

inline std::string slurp(const std::filesystem::path& path)
{
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Text between <tag> and </tag> starting at `from`, or npos.
inline std::size_t find_element(std::string_view text, std::string_view tag, std::size_t from, std::string_view& body)
{
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    const auto b = text.find(open, from);
    if (b == std::string_view::npos)
        return std::string_view::npos;
    const auto e = text.find(close, b + open.size());
    if (e == std::string_view::npos)
        return std::string_view::npos;
    body = text.substr(b + open.size(), e - b - open.size());
    return e + close.size();
}

inline std::string strip_tags(std::string_view s)
{
    std::string out;
    bool in_tag = false;
    for (const char c : s) {
        if (c == '<')
            in_tag = true;
        else if (c == '>')
            in_tag = false;
        else if (!in_tag)
            out.push_back(c);
        if (c == '>')
            out.push_back(' ');
    }
    return out;
}

}  // namespace detail

// Line-delimited "doc_id<TAB>text" records. Calls sink(doc_id, text).
template <typename Sink>
void read_tsv_corpus(std::istream& is, Sink&& sink, const std::string& source = "corpus")
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw Error(source + " line " + std::to_string(line_no) + ": expected 'doc_id<TAB>text'");
        sink(line.substr(0, tab), std::string_view(line).substr(tab + 1));
    }
}

// TREC SGML documents: <DOC><DOCNO>id</DOCNO> ... <TEXT>...</TEXT> ... </DOC>.
// All TEXT elements of a document are concatenated.
template <typename Sink>
void read_trec_documents(std::string_view content, Sink&& sink, const std::string& source)
{
    std::size_t pos = 0;
    std::size_t found = 0;
    while (true) {
        std::string_view doc;
        const auto next = detail::find_element(content, "DOC", pos, doc);
        if (next == std::string_view::npos)
            break;
        pos = next;
        std::string_view docno;
        if (detail::find_element(doc, "DOCNO", 0, docno) == std::string_view::npos)
            throw Error(source + ": <DOC> without <DOCNO>");
        std::string text;
        std::size_t tpos = 0;
        std::string_view body;
        while ((tpos = detail::find_element(doc, "TEXT", tpos, body)) != std::string_view::npos) {
            text += detail::strip_tags(body);
            text += ' ';
        }
        sink(std::string(detail::trim(docno)), std::string_view(text));
        ++found;
    }
    if (found == 0)
        throw Error(source + ": not a TREC SGML file (no <DOC> element found)");
}

// A TREC file, or every regular file below a directory (sorted by path).
template <typename Sink>
void read_trec_corpus(const std::filesystem::path& path, Sink&& sink)
{
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& e : std::filesystem::recursive_directory_iterator(path))
            if (e.is_regular_file())
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
    }
    else {
        files.push_back(path);
    }
    for (const auto& f : files)
        read_trec_documents(detail::slurp(f), sink, f.string());
}

inline Index load_index(const std::filesystem::path& path, CorpusFormat format)
{
    IndexBuilder builder;
    auto sink = [&](std::string doc_id, std::string_view text) { builder.add(std::move(doc_id), text); };
    if (format == CorpusFormat::Tsv) {
        if (std::filesystem::is_directory(path))
            throw Error(path.string() + " is a directory; use --format trec for TREC SGML collections");
        auto in = detail::open_input(path);
        read_tsv_corpus(in, sink, path.string());
    }
    else {
        read_trec_corpus(path, sink);
    }
    return std::move(builder).build();
}

// "qid<TAB>query text" lines. Queries that analyze to nothing are rejected.
inline std::vector<Query> read_tsv_topics(std::istream& is)
{
    std::vector<Query> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw Error("topics line " + std::to_string(line_no) + ": expected 'qid<TAB>query'");
        auto q = make_query(std::string(detail::trim(std::string_view(line).substr(0, tab))),
                            std::string_view(line).substr(tab + 1));
        if (q.terms.empty())
            throw Error("query " + q.qid + " is empty after analysis");
        out.push_back(std::move(q));
    }
    return out;
}

// TREC topic format; only the title field is used.
inline std::vector<Query> read_trec_topics(std::string_view content)
{
    std::vector<Query> out;
    std::size_t pos = 0;
    std::string_view top;
    while ((pos = detail::find_element(content, "top", pos, top)) != std::string_view::npos) {
        const auto num_at = top.find("<num>");
        const auto title_at = top.find("<title>");
        if (num_at == std::string_view::npos || title_at == std::string_view::npos)
            throw Error("TREC topic without <num> or <title>");
        auto field_end = [&](std::size_t from) {
            const auto e = top.find('<', from);
            return e == std::string_view::npos ? top.size() : e;
        };
        auto num = detail::trim(top.substr(num_at + 5, field_end(num_at + 5) - num_at - 5));
        if (num.starts_with("Number:"))
            num = detail::trim(num.substr(7));
        auto title = detail::trim(top.substr(title_at + 7, field_end(title_at + 7) - title_at - 7));
        if (title.starts_with("Topic:"))
            title = detail::trim(title.substr(6));
        auto q = make_query(std::string(num), title);
        if (q.terms.empty())
            throw Error("query " + q.qid + " is empty after analysis");
        out.push_back(std::move(q));
    }
    if (out.empty())
        throw Error("no <top> elements found in TREC topics");
    return out;
}

// Topic files in TREC format are recognised by their <top> elements;
// anything else is read as TSV.
inline std::vector<Query> load_topics(const std::filesystem::path& path)
{
    const auto content = detail::slurp(path);
    if (content.find("<top>") != std::string::npos)
        return read_trec_topics(content);
    std::istringstream in(content);
    return read_tsv_topics(in);
}

}  // namespace qppwb
