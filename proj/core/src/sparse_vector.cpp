#include "lsp/sparse_vector.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace lsp {

quantization_params::quantization_params(double global_max, int bits)
    : m_global_max(global_max), m_bits(bits)
{
    if (!(global_max > 0.0) || !std::isfinite(global_max)) {
        throw std::invalid_argument("quantization_params: global_max must be positive");
    }
    if (bits < 1 || bits > 16) {
        throw std::invalid_argument("quantization_params: bits must be in 1..16");
    }
    m_scale = global_max / static_cast<double>(max_level());
}

std::uint32_t quantization_params::quantize(double weight, rounding mode) const
{
    if (!(weight >= 0.0) || weight > m_global_max) {
        throw std::range_error(
            "quantize: weight " + std::to_string(weight) + " outside [0, "
            + std::to_string(m_global_max) + "]");
    }
    double const ratio = weight / m_scale;
    double const level = mode == rounding::round ? std::round(ratio) : std::ceil(ratio);
    return static_cast<std::uint32_t>(std::min<double>(level, max_level()));
}

namespace detail {

std::vector<sparse_entry<std::uint16_t>> quantize_entries(
    std::span<raw_entry const> raw, quantization_params const& params, rounding mode)
{
    std::vector<sparse_entry<std::uint16_t>> out;
    out.reserve(raw.size());
    for (auto const& e : raw) {
        auto level = params.quantize(e.weight, mode);
        if (level > 0) {
            out.push_back({e.term, static_cast<std::uint16_t>(level)});
        }
    }
    return out;
}

}  // namespace detail

query_vector quantize_query(std::span<raw_entry const> raw, quantization_params const& doc_params)
{
    std::vector<query_vector::entry> out;
    out.reserve(raw.size());
    for (auto const& e : raw) {
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            throw std::range_error("quantize_query: negative or non-finite weight");
        }
        double const level = std::round(e.weight / doc_params.scale());
        auto clamped = static_cast<std::uint16_t>(std::min(level, 65535.0));
        if (clamped > 0) {
            out.push_back({e.term, clamped});
        }
    }
    return query_vector::from_unsorted(std::move(out));
}

score_type dot(query_vector const& query, doc_vector const& doc) noexcept
{
    score_type sum = 0;
    auto q = query.begin();
    auto d = doc.begin();
    while (q != query.end() && d != doc.end()) {
        if (q->term < d->term) {
            ++q;
        } else if (d->term < q->term) {
            ++d;
        } else {
            sum += static_cast<score_type>(q->weight) * d->weight;
            ++q;
            ++d;
        }
    }
    return sum;
}

std::uint64_t max_possible_score(query_vector const& query) noexcept
{
    return std::accumulate(
        query.begin(), query.end(), std::uint64_t{0},
        [](std::uint64_t acc, auto const& e) { return acc + std::uint64_t{e.weight} * 255U; });
}

void check_query_range(query_vector const& query)
{
    if (max_possible_score(query) > std::numeric_limits<score_type>::max()) {
        throw std::range_error("query weights too large: scores could overflow 32 bits");
    }
}

query_vector prune_query(query_vector const& query, double beta)
{
    if (!(beta > 0.0) || beta > 1.0) {
        throw std::invalid_argument("prune_query: beta must be in (0, 1]");
    }
    auto const n = query.size();
    // Tolerance keeps e.g. 0.33 * 100 from rounding up to 34.
    auto keep = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, n == 0 ? 0 : 1, n);
    if (keep == n) {
        return query;
    }
    std::vector<query_vector::entry> entries(query.begin(), query.end());
    std::partial_sort(
        entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(),
        [](auto const& lhs, auto const& rhs) {
            return lhs.weight != rhs.weight ? lhs.weight > rhs.weight : lhs.term < rhs.term;
        });
    entries.resize(keep);
    std::sort(entries.begin(), entries.end(), [](auto const& lhs, auto const& rhs) {
        return lhs.term < rhs.term;
    });
    return query_vector(std::move(entries));
}

}  // namespace lsp
