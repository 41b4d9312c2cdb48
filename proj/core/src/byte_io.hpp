#pragma once

// Little-endian byte buffer helpers shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lsp/error.hpp"

namespace lsp::detail {

class byte_writer {
  public:
    void u8(std::uint8_t v) { m_buf.push_back(v); }
    void u16(std::uint16_t v) { put_le(v); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::span<std::uint8_t const> data) { m_buf.insert(m_buf.end(), data.begin(), data.end()); }
    void magic(std::string_view m) { m_buf.insert(m_buf.end(), m.begin(), m.end()); }
    void str(std::string_view s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        m_buf.insert(m_buf.end(), s.begin(), s.end());
    }
    void u16_array(std::span<std::uint16_t const> data)
    {
        for (auto v : data) {
            u16(v);
        }
    }
    void patch_u64(std::size_t at, std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            m_buf[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return m_buf.size(); }
    [[nodiscard]] std::vector<std::uint8_t>& buffer() noexcept { return m_buf; }

  private:
    template <typename T>
    void put_le(T v)
    {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            m_buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> m_buf;
};

class byte_reader {
  public:
    explicit byte_reader(std::span<std::uint8_t const> data) : m_data(data) {}

    std::uint8_t u8() { return get_le<std::uint8_t>(); }
    std::uint16_t u16() { return get_le<std::uint16_t>(); }
    std::uint32_t u32() { return get_le<std::uint32_t>(); }
    std::uint64_t u64() { return get_le<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }
    std::span<std::uint8_t const> bytes(std::size_t n)
    {
        need(n);
        auto out = m_data.subspan(m_pos, n);
        m_pos += n;
        return out;
    }
    void expect_magic(std::string_view m)
    {
        auto got = bytes(m.size());
        if (std::memcmp(got.data(), m.data(), m.size()) != 0) {
            throw format_error("bad magic, expected " + std::string(m));
        }
    }
    std::string str()
    {
        auto n = u32();
        auto b = bytes(n);
        return {reinterpret_cast<char const*>(b.data()), b.size()};
    }
    std::vector<std::uint16_t> u16_array(std::size_t n)
    {
        need(n * 2);
        std::vector<std::uint16_t> out(n);
        for (auto& v : out) {
            v = u16();
        }
        return out;
    }
    /// Guards count fields against truncated or corrupt input.
    std::size_t count(std::uint64_t n, std::size_t min_bytes_each)
    {
        if (min_bytes_each > 0 && n > remaining() / min_bytes_each) {
            throw format_error("count field exceeds remaining data");
        }
        return static_cast<std::size_t>(n);
    }

    [[nodiscard]] std::size_t position() const noexcept { return m_pos; }
    [[nodiscard]] std::size_t remaining() const noexcept { return m_data.size() - m_pos; }
    void seek(std::size_t pos)
    {
        if (pos > m_data.size()) {
            throw format_error("seek past end of data");
        }
        m_pos = pos;
    }

  private:
    void need(std::size_t n) const
    {
        if (n > remaining()) {
            throw format_error("unexpected end of data");
        }
    }

    template <typename T>
    T get_le()
    {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v = static_cast<T>(v | (static_cast<T>(m_data[m_pos + i]) << (8 * i)));
        }
        m_pos += sizeof(T);
        return v;
    }

    std::span<std::uint8_t const> m_data;
    std::size_t m_pos = 0;
};

std::vector<std::uint8_t> read_file(std::string const& path);
void write_file(std::string const& path, std::span<std::uint8_t const> data);

}  // namespace lsp::detail
