#include "lsp/packed_list.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace lsp {

namespace {

constexpr std::size_t lanes = 16;
constexpr std::size_t rows = packed_group_size / lanes;

void pack_group(std::span<std::uint16_t const, packed_group_size> values, int width,
                std::uint16_t* words)
{
    for (std::size_t j = 0; j < rows; ++j) {
        auto const bit = static_cast<unsigned>(j * width);
        auto const word = bit >> 4U;
        auto const shift = bit & 15U;
        for (std::size_t l = 0; l < lanes; ++l) {
            std::uint32_t const v = values[j * lanes + l];
            words[word * lanes + l] |= static_cast<std::uint16_t>(v << shift);
            if (shift + width > 16) {
                words[(word + 1) * lanes + l] |= static_cast<std::uint16_t>(v >> (16U - shift));
            }
        }
    }
}

template <unsigned W>
void unpack_group(std::uint16_t const* words, std::uint16_t* out) noexcept
{
    if constexpr (W == 0) {
        std::fill(out, out + packed_group_size, std::uint16_t{0});
    } else if constexpr (W == 16) {
        std::copy(words, words + packed_group_size, out);
    } else {
        constexpr std::uint32_t mask = (1U << W) - 1U;
        for (unsigned j = 0; j < rows; ++j) {
            unsigned const bit = j * W;
            unsigned const word = bit >> 4U;
            unsigned const shift = bit & 15U;
            std::uint16_t const* lo = words + word * lanes;
            std::uint16_t* dst = out + j * lanes;
            if (shift + W <= 16) {
                for (unsigned l = 0; l < lanes; ++l) {
                    dst[l] = static_cast<std::uint16_t>((std::uint32_t{lo[l]} >> shift) & mask);
                }
            } else {
                std::uint16_t const* hi = lo + lanes;
                for (unsigned l = 0; l < lanes; ++l) {
                    std::uint32_t const v = (std::uint32_t{lo[l]} >> shift) | (std::uint32_t{hi[l]} << (16U - shift));
                    dst[l] = static_cast<std::uint16_t>(v & mask);
                }
            }
        }
    }
}

using unpack_fn = void (*)(std::uint16_t const*, std::uint16_t*) noexcept;

template <unsigned... W>
constexpr std::array<unpack_fn, sizeof...(W)> make_unpackers(std::integer_sequence<unsigned, W...>)
{
    return {&unpack_group<W>...};
}

constexpr auto unpackers = make_unpackers(std::make_integer_sequence<unsigned, 17>{});

template <typename T>
packed_list encode_impl(std::span<T const> values)
{
    std::size_t const n = values.size();
    std::size_t const groups = (n + packed_group_size - 1) / packed_group_size;
    std::vector<std::uint8_t> selectors(groups);
    std::vector<std::uint16_t> payload;
    std::array<std::uint16_t, packed_group_size> buffer{};
    for (std::size_t g = 0; g < groups; ++g) {
        buffer.fill(0);
        std::uint32_t bits = 0;
        std::size_t const first = g * packed_group_size;
        std::size_t const count = std::min(packed_group_size, n - first);
        for (std::size_t i = 0; i < count; ++i) {
            auto v = static_cast<std::uint32_t>(values[first + i]);
            if (v > 0xFFFFU) {
                throw std::invalid_argument("encode_list: value " + std::to_string(v) + " exceeds 16 bits");
            }
            buffer[i] = static_cast<std::uint16_t>(v);
            bits |= v;
        }
        int const width = bit_width_of(bits);
        selectors[g] = static_cast<std::uint8_t>(width);
        auto const offset = payload.size();
        payload.resize(offset + static_cast<std::size_t>(width) * lanes, 0);
        if (width > 0) {
            pack_group(buffer, width, payload.data() + offset);
        }
    }
    return packed_list::from_parts(n, std::move(selectors), std::move(payload));
}

}  // namespace

packed_list packed_list::from_parts(std::size_t num_values, std::vector<std::uint8_t> selectors,
                                    std::vector<std::uint16_t> payload)
{
    if (selectors.size() != (num_values + packed_group_size - 1) / packed_group_size) {
        throw std::invalid_argument("packed_list: selector count does not match value count");
    }
    std::size_t words = 0;
    for (auto s : selectors) {
        if (s > 16) {
            throw std::invalid_argument("packed_list: selector width above 16");
        }
        words += std::size_t{s} * lanes;
    }
    if (words != payload.size()) {
        throw std::invalid_argument("packed_list: payload size does not match selectors");
    }
    packed_list list;
    list.m_num_values = num_values;
    list.m_selectors = std::move(selectors);
    list.m_payload = std::move(payload);
    list.rebuild_offsets();
    return list;
}

void packed_list::rebuild_offsets()
{
    m_offsets.resize(m_selectors.size());
    std::uint32_t offset = 0;
    for (std::size_t g = 0; g < m_selectors.size(); ++g) {
        m_offsets[g] = offset;
        offset += std::uint32_t{m_selectors[g]} * lanes;
    }
}

packed_list encode_list(std::span<std::uint32_t const> values) { return encode_impl(values); }
packed_list encode_list(std::span<std::uint16_t const> values) { return encode_impl(values); }
packed_list encode_list(std::span<std::uint8_t const> values) { return encode_impl(values); }

void decode_group(packed_list const& list, std::size_t group, decoded_group& out)
{
    if (group >= list.num_groups()) {
        throw std::out_of_range("decode_group: group " + std::to_string(group) + " of "
                                + std::to_string(list.num_groups()));
    }
    unpackers[list.selectors()[group]](list.payload().data() + list.group_offset(group), out.data());
}

decoded_group decode_group(packed_list const& list, std::size_t group)
{
    decoded_group out;
    decode_group(list, group, out);
    return out;
}

std::vector<std::uint16_t> decode_all(packed_list const& list)
{
    std::vector<std::uint16_t> out(list.num_groups() * packed_group_size);
    std::uint16_t const* words = list.payload().data();
    for (std::size_t g = 0; g < list.num_groups(); ++g) {
        auto width = list.selectors()[g];
        unpackers[width](words, out.data() + g * packed_group_size);
        words += std::size_t{width} * lanes;
    }
    return out;
}

max_weight_store::max_weight_store(weight_level level, int bits, std::size_t num_units,
                                   std::vector<packed_list> lists)
    : m_level(level), m_bits(bits), m_num_units(num_units), m_lists(std::move(lists))
{
    for (auto const& l : m_lists) {
        if (l.size() != num_units) {
            throw std::invalid_argument("max_weight_store: list length differs from unit count");
        }
    }
}

max_weight_store max_weight_store::from_levels(level_weights const& weights)
{
    std::vector<packed_list> lists;
    lists.reserve(weights.per_term.size());
    for (auto const& values : weights.per_term) {
        lists.push_back(encode_list(std::span<std::uint8_t const>(values)));
    }
    return max_weight_store(weights.level, weights.bits, weights.num_units, std::move(lists));
}

std::uint16_t max_weight_store::value(term_id term, std::size_t unit) const
{
    if (!has_term(term)) {
        return 0;
    }
    if (unit >= m_num_units) {
        throw std::out_of_range("max_weight_store: unit out of range");
    }
    auto group = decode_group(m_lists[term], unit / packed_group_size);
    return group[unit % packed_group_size];
}

std::size_t max_weight_store::payload_bytes() const noexcept
{
    std::size_t total = 0;
    for (auto const& l : m_lists) {
        total += l.payload_bytes();
    }
    return total;
}

std::size_t max_weight_store::serialized_bytes() const noexcept
{
    // level, bits, u64 units, u32 terms
    std::size_t total = 1 + 1 + 8 + 4;
    for (auto const& l : m_lists) {
        total += l.serialized_bytes();
    }
    return total;
}

}  // namespace lsp
