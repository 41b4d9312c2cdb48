#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lsp/layout.hpp"
#include "lsp/sparse_vector.hpp"

namespace lsp {

enum class doc_format : std::uint8_t { compact_inv = 1, flat_inv = 2, fwd = 3 };

[[nodiscard]] doc_format parse_doc_format(std::string const& name);
[[nodiscard]] char const* to_string(doc_format format) noexcept;

/// Per-block inverted lists. Each term header carries the list length minus one
/// in a single byte (lists are never empty, so 1..256 fits) and an offset into
/// the block's posting arena.
struct compact_inv {
    struct term_header {
        term_id term;
        std::uint8_t length_minus_one;
        std::uint8_t reserved;
        std::uint32_t offset;
    };
    struct local_posting {
        std::uint8_t doc;
        std::uint8_t weight;
    };
    struct block {
        std::vector<term_header> terms;
        std::vector<local_posting> postings;
    };
    std::vector<block> blocks;
};

/// One contiguous posting array for the whole index, grouped by block then term.
struct flat_inv {
    struct record {
        term_id term;
        std::uint8_t doc;
        std::uint8_t weight;
    };
    std::vector<record> postings;
    /// Start of each block in postings; block i ends where block i + 1 starts.
    std::vector<std::uint64_t> block_offsets;
};

/// Per-document parallel arrays of term ids and weights.
struct fwd_index {
    std::vector<std::uint64_t> doc_offsets;
    std::vector<term_id> terms;
    std::vector<std::uint8_t> weights;
};

static_assert(sizeof(compact_inv::term_header) == 8);
static_assert(sizeof(compact_inv::local_posting) == 2);
static_assert(sizeof(flat_inv::record) == 4);

/// Full query with a dense weight lookup for forward scoring.
class prepared_query {
  public:
    explicit prepared_query(query_vector query);

    [[nodiscard]] query_vector const& vector() const noexcept { return m_query; }
    [[nodiscard]] std::uint16_t weight(term_id term) const noexcept
    {
        return term < m_dense.size() ? m_dense[term] : 0;
    }

  private:
    query_vector m_query;
    std::vector<std::uint16_t> m_dense;
};

class doc_index {
  public:
    using storage = std::variant<compact_inv, flat_inv, fwd_index>;

    doc_index() = default;
    doc_index(std::uint32_t block_size, std::size_t num_docs, storage data);

    [[nodiscard]] doc_format format() const noexcept;
    [[nodiscard]] std::uint32_t block_size() const noexcept { return m_block_size; }
    [[nodiscard]] std::size_t num_docs() const noexcept { return m_num_docs; }
    [[nodiscard]] std::size_t num_blocks() const noexcept
    {
        return (m_num_docs + m_block_size - 1) / m_block_size;
    }
    [[nodiscard]] storage const& data() const noexcept { return m_data; }

    /// Writes exact scores for every slot of the block into out (size >= block_size);
    /// padded slots get zero.
    void score_block(std::size_t block, prepared_query const& query, std::span<score_type> out) const;
    [[nodiscard]] std::vector<score_type> score_block(std::size_t block, query_vector const& query) const;

    /// Rebuilds a document vector from the index (internal id).
    [[nodiscard]] doc_vector reconstruct(std::size_t internal_id) const;

    /// Size of the format-specific serialized section, excluding the format tag.
    [[nodiscard]] std::size_t serialized_bytes() const noexcept;

    friend bool operator==(doc_index const& a, doc_index const& b);

  private:
    std::uint32_t m_block_size = 1;
    std::size_t m_num_docs = 0;
    storage m_data;
};

/// Builds a document index; docs are in source order, the layout gives internal order.
/// Throws std::invalid_argument if the block size exceeds 256.
[[nodiscard]] doc_index build_doc_index(
    std::span<doc_vector const> docs, index_layout const& layout, doc_format format);

}  // namespace lsp
