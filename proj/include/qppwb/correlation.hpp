#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace qppwb {

enum class CorrelationKind { PearsonR, SpearmanRho, KendallTau };

inline constexpr CorrelationKind kAllCorrelations[] = {CorrelationKind::PearsonR, CorrelationKind::SpearmanRho,
                                                       CorrelationKind::KendallTau};

inline std::string_view correlation_symbol(CorrelationKind kind)
{
    switch (kind) {
    case CorrelationKind::PearsonR: return "r";
    case CorrelationKind::SpearmanRho: return "rho";
    case CorrelationKind::KendallTau: return "tau";
    }
    return "?";
}

inline std::string_view correlation_name(CorrelationKind kind)
{
    switch (kind) {
    case CorrelationKind::PearsonR: return "pearson";
    case CorrelationKind::SpearmanRho: return "spearman";
    case CorrelationKind::KendallTau: return "kendall";
    }
    return "?";
}

inline CorrelationKind parse_correlation(std::string_view text)
{
    std::string s(text);
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "pearson" || s == "r")
        return CorrelationKind::PearsonR;
    if (s == "spearman" || s == "rho")
        return CorrelationKind::SpearmanRho;
    if (s == "kendall" || s == "tau")
        return CorrelationKind::KendallTau;
    throw Error("unknown correlation '" + std::string(text) + "' (expected pearson, spearman or kendall)");
}

// A correlation coefficient, or nullopt when it is undefined (one of the
// inputs is constant).
using Correlation = std::optional<double>;

namespace detail {

inline void check_pair(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("correlation inputs differ in length");
    if (x.size() < 2)
        throw std::invalid_argument("correlation needs at least two observations");
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

inline bool is_constant(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
}

}  // namespace detail

// Mid-ranks (1-based); tied values share the mean of the ranks they span.
inline std::vector<double> rank_transform(std::span<const double> x)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && x[order[j]] == x[order[i]])
            ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            ranks[order[t]] = mid;
        i = j;
    }
    return ranks;
}

inline Correlation pearson(std::span<const double> x, std::span<const double> y)
{
    detail::check_pair(x, y);
    if (detail::is_constant(x) || detail::is_constant(y))
        return std::nullopt;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::nullopt;
    return detail::clamp_unit(sxy / std::sqrt(sxx * syy));
}

inline Correlation spearman(std::span<const double> x, std::span<const double> y)
{
    detail::check_pair(x, y);
    const auto rx = rank_transform(x);
    const auto ry = rank_transform(y);
    return pearson(rx, ry);
}

namespace detail {

// Number of adjacent swaps needed to sort v (merge sort inversion count).
inline std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                                      std::size_t hi)
{
    if (hi - lo < 2)
        return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t swaps = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += mid - i;
            scratch[k++] = v[j++];
        }
        else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid)
        scratch[k++] = v[i++];
    while (j < hi)
        scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Sum over runs of equal adjacent values of len*(len-1)/2.
template <typename Eq>
std::uint64_t tied_pairs(std::size_t n, Eq&& equal)
{
    std::uint64_t total = 0;
    std::uint64_t run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (equal(i - 1, i)) {
            ++run;
        }
        else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

}  // namespace detail

// Kendall's tau-b in O(n log n) (Knight's algorithm). Reduces to tau-a on
// tie-free input.
inline Correlation kendall(std::span<const double> x, std::span<const double> y)
{
    detail::check_pair(x, y);
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t ties_x = detail::tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return x[order[a]] == x[order[b]];
    });
    const std::uint64_t ties_xy = detail::tied_pairs(n, [&](std::size_t a, std::size_t b) {
        return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
    });

    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = y[order[i]];
    std::vector<double> scratch(n);
    const std::uint64_t swaps = detail::count_inversions(ys, scratch, 0, n);
    const std::uint64_t ties_y = detail::tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    if (ties_x == n0 || ties_y == n0)
        return std::nullopt;
    // concordant - discordant = n0 - tx - ty + txy - 2*swaps
    const double numerator = static_cast<double>(n0) - static_cast<double>(ties_x) - static_cast<double>(ties_y) +
                             static_cast<double>(ties_xy) - 2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - ties_x) * static_cast<double>(n0 - ties_y));
    return detail::clamp_unit(numerator / denom);
}

inline Correlation correlate(CorrelationKind kind, std::span<const double> x, std::span<const double> y)
{
    switch (kind) {
    case CorrelationKind::PearsonR: return pearson(x, y);
    case CorrelationKind::SpearmanRho: return spearman(x, y);
    case CorrelationKind::KendallTau: return kendall(x, y);
    }
    return std::nullopt;
}

}  // namespace qppwb
