#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsp/sparse_vector.hpp"

namespace lsp {

/// Largest block size; the inverted document formats store local ids in one byte.
inline constexpr std::uint32_t max_block_size = 256;

enum class block_strategy { input_order, kmeans_lite, random };

[[nodiscard]] block_strategy parse_block_strategy(std::string const& name);
[[nodiscard]] char const* to_string(block_strategy strategy) noexcept;

/// Permutation of documents into blocks of b documents and superblocks of c blocks.
///
/// Internal document ids are positions in the permuted order, so block i holds
/// internal ids [i*b, (i+1)*b) and superblock j holds blocks [j*c, (j+1)*c).
/// The last block and superblock may be short.
class index_layout {
  public:
    index_layout() = default;
    index_layout(std::uint32_t block_size, std::uint32_t blocks_per_superblock,
                 std::vector<std::uint32_t> order);

    [[nodiscard]] std::uint32_t block_size() const noexcept { return m_block_size; }
    [[nodiscard]] std::uint32_t blocks_per_superblock() const noexcept { return m_blocks_per_superblock; }
    [[nodiscard]] std::size_t num_docs() const noexcept { return m_order.size(); }
    [[nodiscard]] std::size_t num_blocks() const noexcept { return m_num_blocks; }
    [[nodiscard]] std::size_t num_superblocks() const noexcept { return m_num_superblocks; }

    /// order()[internal id] = source (ingestion) index.
    [[nodiscard]] std::span<std::uint32_t const> order() const noexcept { return m_order; }
    /// position()[source index] = internal id.
    [[nodiscard]] std::span<std::uint32_t const> position() const noexcept { return m_position; }

    /// Internal id range [first, last) of a block.
    [[nodiscard]] std::pair<std::size_t, std::size_t> block_docs(std::size_t block) const noexcept
    {
        std::size_t first = block * m_block_size;
        return {first, std::min(first + m_block_size, num_docs())};
    }
    /// Block range [first, last) of a superblock.
    [[nodiscard]] std::pair<std::size_t, std::size_t> superblock_blocks(std::size_t sb) const noexcept
    {
        std::size_t first = sb * m_blocks_per_superblock;
        return {first, std::min(first + m_blocks_per_superblock, m_num_blocks)};
    }
    [[nodiscard]] std::size_t block_of(std::size_t internal_id) const noexcept
    {
        return internal_id / m_block_size;
    }
    [[nodiscard]] std::size_t superblock_of(std::size_t internal_id) const noexcept
    {
        return block_of(internal_id) / m_blocks_per_superblock;
    }

    friend bool operator==(index_layout const&, index_layout const&) = default;

  private:
    std::uint32_t m_block_size = 1;
    std::uint32_t m_blocks_per_superblock = 1;
    std::size_t m_num_blocks = 0;
    std::size_t m_num_superblocks = 0;
    std::vector<std::uint32_t> m_order;
    std::vector<std::uint32_t> m_position;
};

struct kmeans_options {
    std::size_t top_terms = 8;
    std::size_t centroid_terms = 64;
    std::size_t iterations = 8;
    std::size_t max_clusters = 1024;
    std::uint64_t seed = 0x5eedULL;
};

/// Throws std::invalid_argument for b outside 2..256, c == 0 or an empty collection.
[[nodiscard]] index_layout assign_blocks(
    std::span<doc_vector const> docs, std::uint32_t block_size, std::uint32_t blocks_per_superblock,
    block_strategy strategy, kmeans_options const& options = {});

/// Builds a layout from an externally computed ordering of external doc ids.
[[nodiscard]] index_layout layout_from_ordering(
    std::span<std::string const> doc_ids, std::span<std::string const> ordering,
    std::uint32_t block_size, std::uint32_t blocks_per_superblock);

/// Newline-separated external doc ids.
[[nodiscard]] std::vector<std::string> read_ordering_file(std::filesystem::path const& path);

/// Ceiling quantization of 8-bit document weights to a coarser bound width.
class bound_quantizer {
  public:
    explicit bound_quantizer(int bits);

    [[nodiscard]] int bits() const noexcept { return m_bits; }
    /// Width of one bound level in 8-bit document weight units.
    [[nodiscard]] std::uint32_t step() const noexcept { return m_step; }
    [[nodiscard]] std::uint8_t level(std::uint32_t weight) const noexcept
    {
        return static_cast<std::uint8_t>((weight + m_step - 1) / m_step);
    }
    /// Ceiling of sum / (count * step), i.e. the mean weight quantized upwards.
    [[nodiscard]] std::uint8_t mean_level(std::uint64_t sum, std::uint64_t count) const noexcept
    {
        auto denom = count * m_step;
        return static_cast<std::uint8_t>((sum + denom - 1) / denom);
    }

  private:
    int m_bits;
    std::uint32_t m_step;
};

enum class weight_level : std::uint8_t { block = 0, superblock_max = 1, superblock_avg = 2 };

/// Per-term dense arrays of quantized bounds over the units of one level.
struct level_weights {
    weight_level level = weight_level::block;
    int bits = 8;
    std::size_t num_units = 0;
    std::vector<std::vector<std::uint8_t>> per_term;

    [[nodiscard]] std::uint8_t at(term_id term, std::size_t unit) const
    {
        return term < per_term.size() ? per_term[term][unit] : 0;
    }
};

struct level_weight_set {
    level_weights block;
    level_weights superblock;
    level_weights superblock_avg;
};

/// Postings of one term: (internal id, 8-bit weight), sorted by internal id.
struct posting {
    std::uint32_t doc;
    std::uint8_t weight;
};

/// Term-major transposition of a collection under a layout.
[[nodiscard]] std::vector<std::vector<posting>> invert(
    std::span<doc_vector const> docs, index_layout const& layout, std::size_t num_terms);

struct term_levels {
    std::vector<std::uint8_t> block;
    std::vector<std::uint8_t> superblock;
    std::vector<std::uint8_t> superblock_avg;
};

/// Block maxima, superblock maxima and superblock averages for one term.
///
/// Superblock maxima are taken over the 8-bit block maxima before block
/// requantization. Averages divide by the b*c slot count, absent = 0.
[[nodiscard]] term_levels compute_term_levels(
    std::span<posting const> postings, index_layout const& layout,
    bound_quantizer const& block_q, bound_quantizer const& superblock_q, bool with_avg);

[[nodiscard]] level_weight_set compute_level_weights(
    std::span<doc_vector const> docs, index_layout const& layout, int bits_block,
    int bits_superblock, std::size_t num_terms);

/// One past the largest term id present.
[[nodiscard]] std::size_t vocabulary_extent(std::span<doc_vector const> docs) noexcept;

}  // namespace lsp
