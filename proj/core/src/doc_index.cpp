#include "lsp/doc_index.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace lsp {

doc_format parse_doc_format(std::string const& name)
{
    if (name == "compact-inv") {
        return doc_format::compact_inv;
    }
    if (name == "flat-inv") {
        return doc_format::flat_inv;
    }
    if (name == "fwd") {
        return doc_format::fwd;
    }
    throw std::invalid_argument("unknown document index format: " + name);
}

char const* to_string(doc_format format) noexcept
{
    switch (format) {
    case doc_format::compact_inv: return "compact-inv";
    case doc_format::flat_inv: return "flat-inv";
    case doc_format::fwd: return "fwd";
    }
    return "?";
}

prepared_query::prepared_query(query_vector query) : m_query(std::move(query))
{
    if (!m_query.empty()) {
        m_dense.assign(std::size_t{m_query.entries().back().term} + 1, 0);
        for (auto const& e : m_query) {
            m_dense[e.term] = e.weight;
        }
    }
}

doc_index::doc_index(std::uint32_t block_size, std::size_t num_docs, storage data)
    : m_block_size(block_size), m_num_docs(num_docs), m_data(std::move(data))
{
    if (block_size < 1 || block_size > max_block_size) {
        throw std::invalid_argument("doc_index: block size must be in 1..256");
    }
}

doc_format doc_index::format() const noexcept
{
    return static_cast<doc_format>(m_data.index() + 1);
}

namespace {

void score_compact(compact_inv const& idx, std::size_t block, query_vector const& query,
                   std::span<score_type> out)
{
    auto const& blk = idx.blocks[block];
    auto it = blk.terms.begin();
    for (auto const& q : query) {
        it = std::lower_bound(it, blk.terms.end(), q.term,
                              [](auto const& h, term_id t) { return h.term < t; });
        if (it == blk.terms.end()) {
            break;
        }
        if (it->term != q.term) {
            continue;
        }
        auto const* p = blk.postings.data() + it->offset;
        auto const* end = p + std::size_t{it->length_minus_one} + 1;
        for (; p != end; ++p) {
            out[p->doc] += static_cast<score_type>(q.weight) * p->weight;
        }
    }
}

void score_flat(flat_inv const& idx, std::size_t block, query_vector const& query,
                std::span<score_type> out)
{
    auto first = idx.postings.begin() + static_cast<std::ptrdiff_t>(idx.block_offsets[block]);
    auto last = block + 1 < idx.block_offsets.size()
        ? idx.postings.begin() + static_cast<std::ptrdiff_t>(idx.block_offsets[block + 1])
        : idx.postings.end();
    auto it = first;
    for (auto const& q : query) {
        it = std::lower_bound(it, last, q.term, [](auto const& r, term_id t) { return r.term < t; });
        for (; it != last && it->term == q.term; ++it) {
            out[it->doc] += static_cast<score_type>(q.weight) * it->weight;
        }
        if (it == last) {
            break;
        }
    }
}

void score_fwd(fwd_index const& idx, std::size_t first_doc, std::size_t count,
               prepared_query const& query, std::span<score_type> out)
{
    for (std::size_t i = 0; i < count; ++i) {
        auto const begin = idx.doc_offsets[first_doc + i];
        auto const end = idx.doc_offsets[first_doc + i + 1];
        score_type s = 0;
        for (auto p = begin; p < end; ++p) {
            s += static_cast<score_type>(query.weight(idx.terms[p])) * idx.weights[p];
        }
        out[i] = s;
    }
}

}  // namespace

void doc_index::score_block(std::size_t block, prepared_query const& query, std::span<score_type> out) const
{
    if (block >= num_blocks()) {
        throw std::out_of_range("score_block: block out of range");
    }
    if (out.size() < m_block_size) {
        throw std::invalid_argument("score_block: output smaller than block size");
    }
    std::fill(out.begin(), out.begin() + m_block_size, score_type{0});
    std::visit(
        [&](auto const& idx) {
            using T = std::decay_t<decltype(idx)>;
            if constexpr (std::is_same_v<T, compact_inv>) {
                score_compact(idx, block, query.vector(), out);
            } else if constexpr (std::is_same_v<T, flat_inv>) {
                score_flat(idx, block, query.vector(), out);
            } else {
                std::size_t const first = block * m_block_size;
                std::size_t const count = std::min<std::size_t>(m_block_size, m_num_docs - first);
                score_fwd(idx, first, count, query, out);
            }
        },
        m_data);
}

std::vector<score_type> doc_index::score_block(std::size_t block, query_vector const& query) const
{
    std::vector<score_type> out(m_block_size);
    score_block(block, prepared_query(query), out);
    return out;
}

doc_vector doc_index::reconstruct(std::size_t internal_id) const
{
    if (internal_id >= m_num_docs) {
        throw std::out_of_range("reconstruct: doc out of range");
    }
    std::size_t const block = internal_id / m_block_size;
    auto const local = static_cast<std::uint8_t>(internal_id % m_block_size);
    std::vector<doc_vector::entry> entries;
    std::visit(
        [&](auto const& idx) {
            using T = std::decay_t<decltype(idx)>;
            if constexpr (std::is_same_v<T, compact_inv>) {
                auto const& blk = idx.blocks[block];
                for (auto const& h : blk.terms) {
                    for (std::size_t i = 0; i <= h.length_minus_one; ++i) {
                        auto const& p = blk.postings[h.offset + i];
                        if (p.doc == local) {
                            entries.push_back({h.term, p.weight});
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, flat_inv>) {
                auto first = idx.block_offsets[block];
                auto last = block + 1 < idx.block_offsets.size() ? idx.block_offsets[block + 1]
                                                                 : idx.postings.size();
                for (auto i = first; i < last; ++i) {
                    if (idx.postings[i].doc == local) {
                        entries.push_back({idx.postings[i].term, idx.postings[i].weight});
                    }
                }
            } else {
                for (auto p = idx.doc_offsets[internal_id]; p < idx.doc_offsets[internal_id + 1]; ++p) {
                    entries.push_back({idx.terms[p], idx.weights[p]});
                }
            }
        },
        m_data);
    return doc_vector(std::move(entries));
}

std::size_t doc_index::serialized_bytes() const noexcept
{
    return std::visit(
        [](auto const& idx) -> std::size_t {
            using T = std::decay_t<decltype(idx)>;
            if constexpr (std::is_same_v<T, compact_inv>) {
                std::size_t total = 8;
                for (auto const& blk : idx.blocks) {
                    total += 8 + blk.terms.size() * sizeof(compact_inv::term_header)
                        + blk.postings.size() * sizeof(compact_inv::local_posting);
                }
                return total;
            } else if constexpr (std::is_same_v<T, flat_inv>) {
                return 16 + idx.block_offsets.size() * 8 + idx.postings.size() * sizeof(flat_inv::record);
            } else {
                return 16 + idx.doc_offsets.size() * 8 + idx.terms.size() * 2 + idx.weights.size();
            }
        },
        m_data);
}

namespace {

bool equal_storage(compact_inv const& a, compact_inv const& b)
{
    if (a.blocks.size() != b.blocks.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        auto const& x = a.blocks[i];
        auto const& y = b.blocks[i];
        if (x.terms.size() != y.terms.size() || x.postings.size() != y.postings.size()) {
            return false;
        }
        for (std::size_t t = 0; t < x.terms.size(); ++t) {
            if (x.terms[t].term != y.terms[t].term || x.terms[t].length_minus_one != y.terms[t].length_minus_one
                || x.terms[t].offset != y.terms[t].offset) {
                return false;
            }
        }
        for (std::size_t p = 0; p < x.postings.size(); ++p) {
            if (x.postings[p].doc != y.postings[p].doc || x.postings[p].weight != y.postings[p].weight) {
                return false;
            }
        }
    }
    return true;
}

bool equal_storage(flat_inv const& a, flat_inv const& b)
{
    return a.block_offsets == b.block_offsets && a.postings.size() == b.postings.size()
        && std::equal(a.postings.begin(), a.postings.end(), b.postings.begin(), [](auto const& x, auto const& y) {
               return x.term == y.term && x.doc == y.doc && x.weight == y.weight;
           });
}

bool equal_storage(fwd_index const& a, fwd_index const& b)
{
    return a.doc_offsets == b.doc_offsets && a.terms == b.terms && a.weights == b.weights;
}

}  // namespace

bool operator==(doc_index const& a, doc_index const& b)
{
    if (a.m_block_size != b.m_block_size || a.m_num_docs != b.m_num_docs
        || a.m_data.index() != b.m_data.index()) {
        return false;
    }
    return std::visit(
        [&](auto const& x) {
            using T = std::decay_t<decltype(x)>;
            return equal_storage(x, std::get<T>(b.m_data));
        },
        a.m_data);
}

namespace {

struct block_entry {
    term_id term;
    std::uint8_t local;
    std::uint8_t weight;
};

std::vector<block_entry> collect_block(std::span<doc_vector const> docs, index_layout const& layout,
                                       std::size_t block)
{
    std::vector<block_entry> entries;
    auto [first, last] = layout.block_docs(block);
    for (auto internal = first; internal < last; ++internal) {
        for (auto const& e : docs[layout.order()[internal]]) {
            entries.push_back({e.term, static_cast<std::uint8_t>(internal - first), e.weight});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](auto const& a, auto const& b) { return a.term < b.term; });
    return entries;
}

}  // namespace

doc_index build_doc_index(std::span<doc_vector const> docs, index_layout const& layout, doc_format format)
{
    if (docs.size() != layout.num_docs()) {
        throw std::invalid_argument("build_doc_index: layout does not match collection");
    }
    if (layout.block_size() > max_block_size) {
        throw std::invalid_argument("build_doc_index: block size above 256");
    }
    switch (format) {
    case doc_format::compact_inv: {
        compact_inv idx;
        idx.blocks.resize(layout.num_blocks());
        for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
            auto entries = collect_block(docs, layout, b);
            auto& blk = idx.blocks[b];
            blk.postings.reserve(entries.size());
            for (std::size_t i = 0; i < entries.size();) {
                std::size_t j = i;
                while (j < entries.size() && entries[j].term == entries[i].term) {
                    blk.postings.push_back({entries[j].local, entries[j].weight});
                    ++j;
                }
                blk.terms.push_back({entries[i].term, static_cast<std::uint8_t>(j - i - 1), 0,
                                     static_cast<std::uint32_t>(i)});
                i = j;
            }
        }
        return doc_index(layout.block_size(), layout.num_docs(), std::move(idx));
    }
    case doc_format::flat_inv: {
        flat_inv idx;
        idx.block_offsets.reserve(layout.num_blocks());
        for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
            idx.block_offsets.push_back(idx.postings.size());
            for (auto const& e : collect_block(docs, layout, b)) {
                idx.postings.push_back({e.term, e.local, e.weight});
            }
        }
        return doc_index(layout.block_size(), layout.num_docs(), std::move(idx));
    }
    case doc_format::fwd: {
        fwd_index idx;
        idx.doc_offsets.reserve(layout.num_docs() + 1);
        idx.doc_offsets.push_back(0);
        for (auto src : layout.order()) {
            for (auto const& e : docs[src]) {
                idx.terms.push_back(e.term);
                idx.weights.push_back(e.weight);
            }
            idx.doc_offsets.push_back(idx.terms.size());
        }
        return doc_index(layout.block_size(), layout.num_docs(), std::move(idx));
    }
    }
    throw std::invalid_argument("build_doc_index: unknown format");
}

}  // namespace lsp
