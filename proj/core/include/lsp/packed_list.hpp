#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lsp/layout.hpp"

namespace lsp {

inline constexpr std::size_t packed_group_size = 256;
using decoded_group = std::array<std::uint16_t, packed_group_size>;

/// Bit-packed list of 16-bit values in groups of 256 with all selectors at the head.
///
/// Each group is packed at its own width w (0..16). A group occupies w words
/// of 256 bits; inside a word, 16 lanes of 16 bits each hold a vertical slice,
/// so value i lives in lane i % 16 at bit position (i / 16) * w of that lane's
/// stream. Decoding therefore runs the same shift/mask on all 16 lanes at once.
class packed_list {
  public:
    packed_list() = default;

    [[nodiscard]] std::size_t size() const noexcept { return m_num_values; }
    [[nodiscard]] std::size_t num_groups() const noexcept { return m_selectors.size(); }
    [[nodiscard]] std::span<std::uint8_t const> selectors() const noexcept { return m_selectors; }
    /// Payload as 16-bit words, 16 words per 256-bit row.
    [[nodiscard]] std::span<std::uint16_t const> payload() const noexcept { return m_payload; }
    [[nodiscard]] std::size_t payload_bytes() const noexcept { return m_payload.size() * 2; }
    /// Serialized size: u32 count + selectors + payload.
    [[nodiscard]] std::size_t serialized_bytes() const noexcept
    {
        return 4 + m_selectors.size() + payload_bytes();
    }

    /// Word offset of a group's payload.
    [[nodiscard]] std::size_t group_offset(std::size_t group) const noexcept
    {
        return m_offsets[group];
    }

    friend bool operator==(packed_list const& a, packed_list const& b)
    {
        return a.m_num_values == b.m_num_values && a.m_selectors == b.m_selectors
            && a.m_payload == b.m_payload;
    }

    /// Rebuilds a list from serialized parts; validates selectors against the payload size.
    static packed_list from_parts(std::size_t num_values, std::vector<std::uint8_t> selectors,
                                  std::vector<std::uint16_t> payload);

  private:
    void rebuild_offsets();

    std::size_t m_num_values = 0;
    std::vector<std::uint8_t> m_selectors;
    std::vector<std::uint16_t> m_payload;
    std::vector<std::uint32_t> m_offsets;
};

/// Throws std::invalid_argument if any value is >= 2^16.
[[nodiscard]] packed_list encode_list(std::span<std::uint32_t const> values);
[[nodiscard]] packed_list encode_list(std::span<std::uint16_t const> values);
[[nodiscard]] packed_list encode_list(std::span<std::uint8_t const> values);

/// Decodes one group without touching other groups' payload. Values past the
/// end of the list decode as zero. Throws std::out_of_range for a bad group.
void decode_group(packed_list const& list, std::size_t group, decoded_group& out);
[[nodiscard]] decoded_group decode_group(packed_list const& list, std::size_t group);

/// Sequential decode of the whole list, zero-padded to a multiple of 256.
[[nodiscard]] std::vector<std::uint16_t> decode_all(packed_list const& list);

/// Bit width needed for a value (0 for 0).
[[nodiscard]] constexpr int bit_width_of(std::uint32_t v) noexcept
{
    int w = 0;
    while (v != 0) {
        ++w;
        v >>= 1U;
    }
    return w;
}

/// Packed bound lists for every term at one level.
class max_weight_store {
  public:
    max_weight_store() = default;
    max_weight_store(weight_level level, int bits, std::size_t num_units, std::vector<packed_list> lists);

    /// Encodes dense per-term arrays.
    static max_weight_store from_levels(level_weights const& weights);

    [[nodiscard]] weight_level level() const noexcept { return m_level; }
    [[nodiscard]] int bits() const noexcept { return m_bits; }
    [[nodiscard]] std::size_t num_units() const noexcept { return m_num_units; }
    [[nodiscard]] std::size_t num_terms() const noexcept { return m_lists.size(); }
    [[nodiscard]] packed_list const& list(term_id term) const { return m_lists.at(term); }
    [[nodiscard]] bool has_term(term_id term) const noexcept { return term < m_lists.size(); }

    /// Single-cell lookup through decode_group; meant for tests and tools.
    [[nodiscard]] std::uint16_t value(term_id term, std::size_t unit) const;

    [[nodiscard]] std::size_t payload_bytes() const noexcept;
    [[nodiscard]] std::size_t serialized_bytes() const noexcept;

    friend bool operator==(max_weight_store const&, max_weight_store const&) = default;

  private:
    weight_level m_level = weight_level::block;
    int m_bits = 8;
    std::size_t m_num_units = 0;
    std::vector<packed_list> m_lists;
};

}  // namespace lsp
