#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "correlation.hpp"
#include "error.hpp"
#include "harness.hpp"

namespace qppwb {

// Fixed-point rendering that never prints "-0.0000".
inline std::string format_fixed(double v, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

inline std::string format_cell(const Correlation& v, int precision)
{
    return v ? format_fixed(*v, precision) : "n/a";
}

// "UEF(WIG)" -> "uef_wig"
inline std::string slug(const std::string& label)
{
    std::string out;
    for (const char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_')
        out.pop_back();
    return out;
}

inline std::string axis_name(ContingencyAxis axis)
{
    return axis == ContingencyAxis::MetricPairs ? "metric" : "model";
}

// ---------------------------------------------------------------- sensitivity

inline void write_sensitivity_tsv(std::ostream& os, const SensitivityReport& rep)
{
    os << "correlation\tmodel";
    for (const auto& m : rep.metrics)
        os << '\t' << m;
    os << "\tsigma_theta\texcluded\n";
    for (std::size_t k = 0; k < rep.kinds.size(); ++k) {
        const auto sym = correlation_symbol(rep.kinds[k]);
        for (std::size_t r = 0; r < rep.models.size(); ++r) {
            os << sym << '\t' << rep.models[r];
            for (const auto& cell : rep.cells[k][r])
                os << '\t' << format_cell(cell, 6);
            os << '\t' << format_cell(rep.sigma_theta[k][r].sigma, 6) << '\t' << rep.sigma_theta[k][r].excluded << '\n';
        }
        os << sym << "\tsigma_S";
        for (const auto& s : rep.sigma_model[k])
            os << '\t' << format_cell(s.sigma, 6);
        os << "\t\t\n";
        os << sym << "\texcluded";
        for (const auto& s : rep.sigma_model[k])
            os << '\t' << s.excluded;
        os << "\t\t\n";
    }
}

namespace detail {

// Index of the smallest and largest defined sigma.
inline std::pair<std::optional<std::size_t>, std::optional<std::size_t>> extremes(const std::vector<Spread>& v)
{
    std::optional<std::size_t> lo, hi;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].sigma)
            continue;
        if (!lo || *v[i].sigma < *v[*lo].sigma)
            lo = i;
        if (!hi || *v[i].sigma > *v[*hi].sigma)
            hi = i;
    }
    return {lo, hi};
}

inline std::string annotate(const Spread& s, std::size_t i,
                            const std::pair<std::optional<std::size_t>, std::optional<std::size_t>>& ext)
{
    std::string cell = format_cell(s.sigma, 4);
    if (ext.first && *ext.first == i && ext.second && *ext.second != i)
        cell = "_" + cell + "_ (min)";
    else if (ext.second && *ext.second == i && ext.first && *ext.first != i)
        cell = "**" + cell + "** (max)";
    return cell;
}

}  // namespace detail

inline void write_sensitivity_markdown(std::ostream& os, const SensitivityReport& rep)
{
    os << "## " << rep.predictor << "\n\n";
    os << "| | Model |";
    for (const auto& m : rep.metrics)
        os << ' ' << m << " |";
    os << " σ(θ) | excluded |\n|---|---|";
    for (std::size_t i = 0; i < rep.metrics.size(); ++i)
        os << "---:|";
    os << "---:|---:|\n";
    for (std::size_t k = 0; k < rep.kinds.size(); ++k) {
        const auto rows = detail::extremes(rep.sigma_theta[k]);
        const auto cols = detail::extremes(rep.sigma_model[k]);
        for (std::size_t r = 0; r < rep.models.size(); ++r) {
            os << "| " << (r == 0 ? correlation_symbol(rep.kinds[k]) : "") << " | " << rep.models[r] << " |";
            for (const auto& cell : rep.cells[k][r])
                os << ' ' << format_cell(cell, 4) << " |";
            os << ' ' << detail::annotate(rep.sigma_theta[k][r], r, rows) << " | " << rep.sigma_theta[k][r].excluded
               << " |\n";
        }
        os << "| | σ(S) |";
        for (std::size_t c = 0; c < rep.metrics.size(); ++c)
            os << ' ' << detail::annotate(rep.sigma_model[k][c], c, cols) << " |";
        os << " | |\n";
    }
    os << '\n';
}

// ---------------------------------------------------------------- contingency

// Upper-triangular layout: one row per (axis item i, group), one column per
// axis item j >= 1; cells with j <= i are left blank.
inline void write_contingency_tsv(std::ostream& os, const ContingencyReport& rep)
{
    const auto group_col = rep.axis == ContingencyAxis::MetricPairs ? "model" : "metric";
    const auto item_col = rep.axis == ContingencyAxis::MetricPairs ? "metric" : "model";
    os << group_col << '\t' << item_col;
    for (std::size_t j = 1; j < rep.axis_labels.size(); ++j)
        os << '\t' << rep.axis_labels[j];
    os << '\n';
    for (std::size_t i = 0; i + 1 < rep.axis_labels.size(); ++i) {
        for (std::size_t g = 0; g < rep.group_labels.size(); ++g) {
            os << rep.group_labels[g] << '\t' << rep.axis_labels[i];
            for (std::size_t j = 1; j < rep.axis_labels.size(); ++j) {
                os << '\t';
                if (j > i)
                    os << format_cell(rep.at(g, i, j), 6);
            }
            os << '\n';
        }
    }
}

inline void write_contingency_markdown(std::ostream& os, const ContingencyReport& rep)
{
    const bool metric_axis = rep.axis == ContingencyAxis::MetricPairs;
    os << "## Kendall's τ between predictor orderings across " << (metric_axis ? "metric" : "model")
       << " pairs (systems ranked by " << correlation_name(rep.rank_by) << ")\n\n";
    os << "Systems: ";
    for (std::size_t p = 0; p < rep.battery.size(); ++p)
        os << (p ? ", " : "") << rep.battery[p];
    os << "\n\n| " << (metric_axis ? "Model" : "Metric") << " | " << (metric_axis ? "Metric" : "Model") << " |";
    for (std::size_t j = 1; j < rep.axis_labels.size(); ++j)
        os << ' ' << rep.axis_labels[j] << " |";
    os << "\n|---|---|";
    for (std::size_t j = 1; j < rep.axis_labels.size(); ++j)
        os << "---:|";
    os << '\n';
    for (std::size_t i = 0; i + 1 < rep.axis_labels.size(); ++i) {
        // lowest value in this block, marked
        std::optional<double> lowest;
        for (std::size_t g = 0; g < rep.group_labels.size(); ++g)
            for (std::size_t j = i + 1; j < rep.axis_labels.size(); ++j)
                if (auto v = rep.at(g, i, j); v && (!lowest || *v < *lowest))
                    lowest = v;
        for (std::size_t g = 0; g < rep.group_labels.size(); ++g) {
            os << "| " << rep.group_labels[g] << " | " << (g == 0 ? rep.axis_labels[i] : "") << " |";
            for (std::size_t j = 1; j < rep.axis_labels.size(); ++j) {
                os << ' ';
                if (j > i) {
                    const auto v = rep.at(g, i, j);
                    const auto text = format_cell(v, 4);
                    os << (v && lowest && *v == *lowest ? "**" + text + "**" : text);
                }
                os << " |";
            }
            os << '\n';
        }
    }
    os << '\n';
}

// ---------------------------------------------------------------- outcomes and files

inline void write_outcomes_tsv(std::ostream& os, const std::vector<QppOutcome>& outcomes)
{
    os << "predictor\tcontext";
    for (const auto kind : kAllCorrelations)
        os << '\t' << correlation_symbol(kind);
    os << '\n';
    for (const auto& o : outcomes) {
        os << o.predictor << '\t' << o.context;
        for (const auto kind : kAllCorrelations)
            os << '\t' << format_cell(o.get(kind), 6);
        os << '\n';
    }
}

namespace detail {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    writer(out);
    if (!out)
        throw Error("write failed for " + path.string());
}

}  // namespace detail

// Writes every report of a grid run into `dir` and returns the file names.
inline std::vector<std::string> write_reports(const GridResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& writer) {
        detail::write_file(dir / name, writer);
        written.push_back(name);
    };
    emit("outcomes.tsv", [&](std::ostream& os) { write_outcomes_tsv(os, result.outcomes); });
    for (const auto& rep : result.sensitivity) {
        const auto base = "sensitivity_" + slug(rep.predictor);
        emit(base + ".tsv", [&](std::ostream& os) { write_sensitivity_tsv(os, rep); });
        emit(base + ".md", [&](std::ostream& os) { write_sensitivity_markdown(os, rep); });
    }
    for (const auto& rep : result.contingency) {
        const auto base = "contingency_" + axis_name(rep.axis) + "_" + std::string(correlation_name(rep.rank_by));
        emit(base + ".tsv", [&](std::ostream& os) { write_contingency_tsv(os, rep); });
        emit(base + ".md", [&](std::ostream& os) { write_contingency_markdown(os, rep); });
    }
    return written;
}

}  // namespace qppwb
