#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsp {

/// Dense term identifier. The vocabulary is capped so that ids fit two bytes.
using term_id = std::uint16_t;
inline constexpr std::size_t max_vocabulary = std::size_t{1} << 16;

/// Dot product in quantized space.
using score_type = std::uint32_t;

template <typename Weight>
struct sparse_entry {
    term_id term;
    Weight weight;

    friend bool operator==(sparse_entry const&, sparse_entry const&) = default;
};

/// Sorted (term, weight) pairs with strictly increasing terms and positive weights.
template <typename Weight>
class sparse_vector {
  public:
    using weight_type = Weight;
    using entry = sparse_entry<Weight>;

    sparse_vector() = default;

    /// Takes entries that already satisfy the invariants; throws std::invalid_argument otherwise.
    explicit sparse_vector(std::vector<entry> entries) : m_entries(std::move(entries))
    {
        for (std::size_t i = 0; i < m_entries.size(); ++i) {
            if (m_entries[i].weight == 0) {
                throw std::invalid_argument("sparse_vector: zero weight entry");
            }
            if (i > 0 && m_entries[i - 1].term >= m_entries[i].term) {
                throw std::invalid_argument("sparse_vector: terms not strictly increasing");
            }
        }
    }

    /// Sorts by term and drops zero weights. Duplicate terms are rejected.
    static sparse_vector from_unsorted(std::vector<entry> entries)
    {
        std::erase_if(entries, [](entry const& e) { return e.weight == 0; });
        std::sort(entries.begin(), entries.end(), [](entry const& lhs, entry const& rhs) {
            return lhs.term < rhs.term;
        });
        return sparse_vector(std::move(entries));
    }

    [[nodiscard]] std::span<entry const> entries() const noexcept { return m_entries; }
    [[nodiscard]] std::size_t size() const noexcept { return m_entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return m_entries.empty(); }
    [[nodiscard]] auto begin() const noexcept { return m_entries.begin(); }
    [[nodiscard]] auto end() const noexcept { return m_entries.end(); }
    [[nodiscard]] entry const& operator[](std::size_t i) const { return m_entries[i]; }

    friend bool operator==(sparse_vector const&, sparse_vector const&) = default;

  private:
    std::vector<entry> m_entries;
};

using doc_vector = sparse_vector<std::uint8_t>;
using query_vector = sparse_vector<std::uint16_t>;

struct raw_entry {
    term_id term;
    double weight;
};

enum class rounding { round, ceil };

/// Linear quantization of [0, global_max] onto integer levels 0 .. 2^bits - 1.
class quantization_params {
  public:
    quantization_params() = default;
    quantization_params(double global_max, int bits);

    [[nodiscard]] double global_max() const noexcept { return m_global_max; }
    [[nodiscard]] int bits() const noexcept { return m_bits; }
    [[nodiscard]] double scale() const noexcept { return m_scale; }
    [[nodiscard]] std::uint32_t max_level() const noexcept { return (1U << m_bits) - 1; }

    /// Throws std::range_error when the weight is negative or exceeds global_max.
    [[nodiscard]] std::uint32_t quantize(double weight, rounding mode) const;
    [[nodiscard]] double dequantize(std::uint32_t level) const noexcept { return level * m_scale; }

    friend bool operator==(quantization_params const&, quantization_params const&) = default;

  private:
    double m_global_max = 1.0;
    int m_bits = 8;
    double m_scale = 1.0 / 255.0;
};

namespace detail {
std::vector<sparse_entry<std::uint16_t>> quantize_entries(
    std::span<raw_entry const> raw, quantization_params const& params, rounding mode);
}

/// Quantizes raw weights; zero levels are dropped. Weight must hold 2^bits - 1.
template <typename Weight = std::uint8_t>
[[nodiscard]] sparse_vector<Weight> quantize_weights(
    std::span<raw_entry const> raw, quantization_params const& params, rounding mode)
{
    if (params.max_level() > std::numeric_limits<Weight>::max()) {
        throw std::invalid_argument("quantize_weights: level range exceeds weight type");
    }
    auto wide = detail::quantize_entries(raw, params, mode);
    std::vector<sparse_entry<Weight>> narrow;
    narrow.reserve(wide.size());
    for (auto const& e : wide) {
        narrow.push_back({e.term, static_cast<Weight>(e.weight)});
    }
    return sparse_vector<Weight>::from_unsorted(std::move(narrow));
}

/// Real-valued query weights on the document scale, rounded and clamped to 16 bits.
[[nodiscard]] query_vector quantize_query(
    std::span<raw_entry const> raw, quantization_params const& doc_params);

/// Merge-intersection dot product. Requires the query to pass check_query_range.
[[nodiscard]] score_type dot(query_vector const& query, doc_vector const& doc) noexcept;

/// Largest possible document score for the query (all document weights at 255).
[[nodiscard]] std::uint64_t max_possible_score(query_vector const& query) noexcept;

/// Throws std::range_error if a document score could overflow score_type.
void check_query_range(query_vector const& query);

/// Keeps the ceil(beta * |query|) heaviest entries, ties to the smaller term id.
[[nodiscard]] query_vector prune_query(query_vector const& query, double beta);

}  // namespace lsp
