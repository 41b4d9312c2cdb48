#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsp/collection.hpp"
#include "lsp/doc_index.hpp"
#include "lsp/layout.hpp"
#include "lsp/packed_list.hpp"

namespace lsp {

inline constexpr std::uint32_t index_format_version = 1;

struct build_options {
    std::uint32_t block_size = 16;
    std::uint32_t blocks_per_superblock = 16;
    doc_format format = doc_format::fwd;
    int bits_block = 4;
    int bits_superblock = 4;
    block_strategy strategy = block_strategy::input_order;
    /// Stores superblock averages; required by LSP/2.
    bool with_avg = false;
    kmeans_options kmeans{};
    /// Workers for the per-term bound lists; 0 uses the hardware concurrency.
    unsigned threads = 0;
};

/// A built two-level index: bound stores, document index and id map.
class index {
  public:
    index() = default;

    [[nodiscard]] std::size_t num_docs() const noexcept { return m_docs.num_docs(); }
    [[nodiscard]] std::uint32_t block_size() const noexcept { return m_docs.block_size(); }
    [[nodiscard]] std::uint32_t blocks_per_superblock() const noexcept { return m_blocks_per_superblock; }
    [[nodiscard]] std::size_t num_blocks() const noexcept { return m_block_max.num_units(); }
    [[nodiscard]] std::size_t num_superblocks() const noexcept { return m_superblock_max.num_units(); }
    [[nodiscard]] std::size_t num_terms() const noexcept { return m_block_max.num_terms(); }

    [[nodiscard]] quantization_params const& params() const noexcept { return m_params; }
    [[nodiscard]] max_weight_store const& block_max() const noexcept { return m_block_max; }
    [[nodiscard]] max_weight_store const& superblock_max() const noexcept { return m_superblock_max; }
    [[nodiscard]] max_weight_store const* superblock_avg() const noexcept
    {
        return m_superblock_avg ? &*m_superblock_avg : nullptr;
    }
    [[nodiscard]] doc_index const& docs() const noexcept { return m_docs; }
    /// External ids by internal id.
    [[nodiscard]] std::vector<std::string> const& doc_ids() const noexcept { return m_doc_ids; }
    [[nodiscard]] vocabulary const& vocab() const noexcept { return m_vocab; }

    /// Block range [first, last) of a superblock.
    [[nodiscard]] std::pair<std::size_t, std::size_t> superblock_blocks(std::size_t sb) const noexcept
    {
        std::size_t first = sb * m_blocks_per_superblock;
        return {first, std::min(first + m_blocks_per_superblock, num_blocks())};
    }

    friend bool operator==(index const&, index const&) = default;

  private:
    friend index build_index(collection const&, index_layout const&, build_options const&);
    friend index deserialize_index(std::span<std::uint8_t const>);

    std::uint32_t m_blocks_per_superblock = 1;
    quantization_params m_params;
    max_weight_store m_superblock_max;
    std::optional<max_weight_store> m_superblock_avg;
    max_weight_store m_block_max;
    doc_index m_docs;
    std::vector<std::string> m_doc_ids;
    vocabulary m_vocab;
};

/// Builds with an explicit layout (e.g. one imported from an ordering file).
[[nodiscard]] index build_index(collection const& c, index_layout const& layout, build_options const& options);
/// Builds with a layout from options.strategy.
[[nodiscard]] index build_index(collection const& c, build_options const& options);

enum class section_tag : std::uint32_t {
    superblock_max = 1,
    superblock_avg = 2,
    block_max = 3,
    doc_index = 4,
    doc_ids = 5,
    vocabulary = 6,
};

[[nodiscard]] char const* to_string(section_tag tag) noexcept;

struct section_info {
    section_tag tag;
    std::uint64_t offset;
    std::uint64_t size;
};

struct container_info {
    std::uint32_t version = 0;
    std::uint64_t num_docs = 0;
    std::uint32_t block_size = 0;
    std::uint32_t blocks_per_superblock = 0;
    std::uint64_t num_blocks = 0;
    std::uint64_t num_superblocks = 0;
    std::uint32_t num_terms = 0;
    int bits_block = 0;
    int bits_superblock = 0;
    doc_format format = doc_format::fwd;
    double global_max = 0;
    int doc_bits = 0;
    std::uint32_t flags = 0;
    std::uint64_t header_bytes = 0;
    std::uint64_t file_bytes = 0;
    std::vector<section_info> sections;
};

inline constexpr std::uint32_t flag_has_avg = 1U;
inline constexpr std::uint32_t flag_has_vocab = 2U;

/// Little-endian "LSPI" container: fixed header, section table, sections.
[[nodiscard]] std::vector<std::uint8_t> serialize_index(index const& idx);
[[nodiscard]] index deserialize_index(std::span<std::uint8_t const> data);
/// Parses only the header and section table.
[[nodiscard]] container_info read_container_info(std::span<std::uint8_t const> data);

void save_index(index const& idx, std::filesystem::path const& path);
[[nodiscard]] index load_index(std::filesystem::path const& path);

}  // namespace lsp
