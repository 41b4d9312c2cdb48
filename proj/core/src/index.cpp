#include "lsp/index.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <variant>

#include "byte_io.hpp"

namespace lsp {

index build_index(collection const& c, index_layout const& layout, build_options const& options)
{
    if (c.docs.size() != layout.num_docs()) {
        throw std::invalid_argument("build_index: layout does not match collection size");
    }
    if (options.with_avg && options.bits_superblock < 1) {
        throw std::invalid_argument("build_index: bad superblock bits");
    }
    bound_quantizer block_q(options.bits_block);
    bound_quantizer sb_q(options.bits_superblock);
    std::size_t const num_terms = std::max<std::size_t>(vocabulary_extent(c.docs), c.vocab.size());
    auto lists = invert(c.docs, layout, num_terms);

    std::vector<packed_list> block_lists(num_terms);
    std::vector<packed_list> sb_lists(num_terms);
    std::vector<packed_list> avg_lists(options.with_avg ? num_terms : 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t t = next++; t < num_terms; t = next++) {
                auto levels = compute_term_levels(lists[t], layout, block_q, sb_q, options.with_avg);
                block_lists[t] = encode_list(std::span<std::uint8_t const>(levels.block));
                sb_lists[t] = encode_list(std::span<std::uint8_t const>(levels.superblock));
                if (options.with_avg) {
                    avg_lists[t] = encode_list(std::span<std::uint8_t const>(levels.superblock_avg));
                }
                lists[t] = {};
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            failure = failure ? failure : std::current_exception();
            next = num_terms;
        }
    };
    std::size_t threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(num_terms / 64, 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < threads; ++i) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    index idx;
    idx.m_blocks_per_superblock = layout.blocks_per_superblock();
    idx.m_params = c.params;
    idx.m_block_max = max_weight_store(weight_level::block, options.bits_block, layout.num_blocks(),
                                       std::move(block_lists));
    idx.m_superblock_max = max_weight_store(weight_level::superblock_max, options.bits_superblock,
                                            layout.num_superblocks(), std::move(sb_lists));
    if (options.with_avg) {
        idx.m_superblock_avg = max_weight_store(weight_level::superblock_avg, options.bits_superblock,
                                                layout.num_superblocks(), std::move(avg_lists));
    }
    idx.m_docs = build_doc_index(c.docs, layout, options.format);
    idx.m_doc_ids.reserve(layout.num_docs());
    for (auto src : layout.order()) {
        idx.m_doc_ids.push_back(c.ids[src]);
    }
    idx.m_vocab = c.vocab;
    return idx;
}

index build_index(collection const& c, build_options const& options)
{
    auto layout = assign_blocks(c.docs, options.block_size, options.blocks_per_superblock, options.strategy,
                                options.kmeans);
    return build_index(c, layout, options);
}

char const* to_string(section_tag tag) noexcept
{
    switch (tag) {
    case section_tag::superblock_max: return "superblock-max";
    case section_tag::superblock_avg: return "superblock-avg";
    case section_tag::block_max: return "block-max";
    case section_tag::doc_index: return "doc-index";
    case section_tag::doc_ids: return "doc-ids";
    case section_tag::vocabulary: return "vocabulary";
    }
    return "?";
}

namespace {

constexpr std::string_view index_magic = "LSPI";
constexpr std::size_t fixed_header_bytes = 64;
constexpr std::size_t section_entry_bytes = 20;

void write_store(detail::byte_writer& w, max_weight_store const& store)
{
    w.u8(static_cast<std::uint8_t>(store.level()));
    w.u8(static_cast<std::uint8_t>(store.bits()));
    w.u64(store.num_units());
    w.u32(static_cast<std::uint32_t>(store.num_terms()));
    for (std::size_t t = 0; t < store.num_terms(); ++t) {
        auto const& list = store.list(static_cast<term_id>(t));
        w.u32(static_cast<std::uint32_t>(list.size()));
        w.bytes(list.selectors());
        w.u16_array(list.payload());
    }
}

max_weight_store read_store(detail::byte_reader& r)
{
    auto level = r.u8();
    if (level > 2) {
        throw format_error("bad store level");
    }
    int bits = r.u8();
    auto units = r.u64();
    auto terms = r.count(r.u32(), 4);
    std::vector<packed_list> lists;
    lists.reserve(terms);
    for (std::size_t t = 0; t < terms; ++t) {
        auto n = r.u32();
        if (n != units) {
            throw format_error("store list length differs from unit count");
        }
        auto groups = r.count((std::uint64_t{n} + packed_group_size - 1) / packed_group_size, 1);
        auto sel = r.bytes(groups);
        std::vector<std::uint8_t> selectors(sel.begin(), sel.end());
        std::size_t words = 0;
        for (auto s : selectors) {
            words += std::size_t{s} * 16;
        }
        r.count(words, 2);
        auto payload = r.u16_array(words);
        try {
            lists.push_back(packed_list::from_parts(n, std::move(selectors), std::move(payload)));
        } catch (std::invalid_argument const& e) {
            throw format_error(e.what());
        }
    }
    return max_weight_store(static_cast<weight_level>(level), bits, static_cast<std::size_t>(units),
                            std::move(lists));
}

void write_doc_index(detail::byte_writer& w, doc_index const& docs)
{
    w.u8(static_cast<std::uint8_t>(docs.format()));
    std::visit(
        [&](auto const& idx) {
            using T = std::decay_t<decltype(idx)>;
            if constexpr (std::is_same_v<T, compact_inv>) {
                w.u64(idx.blocks.size());
                for (auto const& blk : idx.blocks) {
                    w.u32(static_cast<std::uint32_t>(blk.terms.size()));
                    w.u32(static_cast<std::uint32_t>(blk.postings.size()));
                    for (auto const& h : blk.terms) {
                        w.u16(h.term);
                        w.u8(h.length_minus_one);
                        w.u8(0);
                        w.u32(h.offset);
                    }
                    for (auto const& p : blk.postings) {
                        w.u8(p.doc);
                        w.u8(p.weight);
                    }
                }
            } else if constexpr (std::is_same_v<T, flat_inv>) {
                w.u64(idx.block_offsets.size());
                w.u64(idx.postings.size());
                for (auto o : idx.block_offsets) {
                    w.u64(o);
                }
                for (auto const& p : idx.postings) {
                    w.u16(p.term);
                    w.u8(p.doc);
                    w.u8(p.weight);
                }
            } else {
                w.u64(idx.doc_offsets.size() - 1);
                w.u64(idx.terms.size());
                for (auto o : idx.doc_offsets) {
                    w.u64(o);
                }
                w.u16_array(idx.terms);
                w.bytes(idx.weights);
            }
        },
        docs.data());
}

doc_index read_doc_index(detail::byte_reader& r, std::uint32_t block_size, std::size_t num_docs,
                         std::size_t num_blocks)
{
    auto tag = r.u8();
    switch (static_cast<doc_format>(tag)) {
    case doc_format::compact_inv: {
        compact_inv idx;
        auto blocks = r.count(r.u64(), 8);
        if (blocks != num_blocks) {
            throw format_error("compact-inv block count mismatch");
        }
        idx.blocks.resize(blocks);
        for (auto& blk : idx.blocks) {
            auto terms = r.count(r.u32(), 8);
            auto postings = r.u32();
            blk.terms.resize(terms);
            std::size_t total = 0;
            for (auto& h : blk.terms) {
                h.term = r.u16();
                h.length_minus_one = r.u8();
                h.reserved = r.u8();
                h.offset = r.u32();
                if (h.offset != total) {
                    throw format_error("compact-inv term offsets not contiguous");
                }
                total += std::size_t{h.length_minus_one} + 1;
            }
            if (total != postings) {
                throw format_error("compact-inv posting count mismatch");
            }
            r.count(postings, 2);
            blk.postings.resize(postings);
            for (auto& p : blk.postings) {
                p.doc = r.u8();
                p.weight = r.u8();
                if (p.doc >= block_size) {
                    throw format_error("compact-inv local doc id out of range");
                }
            }
        }
        return doc_index(block_size, num_docs, std::move(idx));
    }
    case doc_format::flat_inv: {
        flat_inv idx;
        auto blocks = r.count(r.u64(), 8);
        auto postings = r.u64();
        if (blocks != num_blocks) {
            throw format_error("flat-inv block count mismatch");
        }
        idx.block_offsets.resize(blocks);
        for (auto& o : idx.block_offsets) {
            o = r.u64();
        }
        r.count(postings, 4);
        idx.postings.resize(static_cast<std::size_t>(postings));
        for (auto& p : idx.postings) {
            p.term = r.u16();
            p.doc = r.u8();
            p.weight = r.u8();
            if (p.doc >= block_size) {
                throw format_error("flat-inv local doc id out of range");
            }
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            if (idx.block_offsets[b] > postings || (b > 0 && idx.block_offsets[b] < idx.block_offsets[b - 1])) {
                throw format_error("flat-inv block offsets not monotone");
            }
        }
        return doc_index(block_size, num_docs, std::move(idx));
    }
    case doc_format::fwd: {
        fwd_index idx;
        auto docs = r.count(r.u64(), 8);
        auto nnz = r.u64();
        if (docs != num_docs) {
            throw format_error("fwd document count mismatch");
        }
        idx.doc_offsets.resize(docs + 1);
        for (auto& o : idx.doc_offsets) {
            o = r.u64();
        }
        if (idx.doc_offsets.front() != 0 || idx.doc_offsets.back() != nnz
            || !std::is_sorted(idx.doc_offsets.begin(), idx.doc_offsets.end())) {
            throw format_error("fwd document offsets invalid");
        }
        r.count(nnz, 3);
        idx.terms = r.u16_array(static_cast<std::size_t>(nnz));
        auto weights = r.bytes(static_cast<std::size_t>(nnz));
        idx.weights.assign(weights.begin(), weights.end());
        return doc_index(block_size, num_docs, std::move(idx));
    }
    }
    throw format_error("unknown document index format tag " + std::to_string(tag));
}

}  // namespace

std::vector<std::uint8_t> serialize_index(index const& idx)
{
    std::vector<std::pair<section_tag, detail::byte_writer>> sections;
    {
        detail::byte_writer w;
        write_store(w, idx.superblock_max());
        sections.emplace_back(section_tag::superblock_max, std::move(w));
    }
    if (idx.superblock_avg() != nullptr) {
        detail::byte_writer w;
        write_store(w, *idx.superblock_avg());
        sections.emplace_back(section_tag::superblock_avg, std::move(w));
    }
    {
        detail::byte_writer w;
        write_store(w, idx.block_max());
        sections.emplace_back(section_tag::block_max, std::move(w));
    }
    {
        detail::byte_writer w;
        write_doc_index(w, idx.docs());
        sections.emplace_back(section_tag::doc_index, std::move(w));
    }
    {
        detail::byte_writer w;
        w.u64(idx.doc_ids().size());
        for (auto const& id : idx.doc_ids()) {
            w.str(id);
        }
        sections.emplace_back(section_tag::doc_ids, std::move(w));
    }
    if (!idx.vocab().empty()) {
        detail::byte_writer w;
        w.u32(static_cast<std::uint32_t>(idx.vocab().size()));
        for (auto const& t : idx.vocab().terms()) {
            w.str(t);
        }
        sections.emplace_back(section_tag::vocabulary, std::move(w));
    }

    std::uint32_t flags = 0;
    if (idx.superblock_avg() != nullptr) {
        flags |= flag_has_avg;
    }
    if (!idx.vocab().empty()) {
        flags |= flag_has_vocab;
    }

    detail::byte_writer out;
    out.magic(index_magic);
    out.u32(index_format_version);
    out.u64(idx.num_docs());
    out.u32(idx.block_size());
    out.u32(idx.blocks_per_superblock());
    out.u64(idx.num_blocks());
    out.u64(idx.num_superblocks());
    out.u32(static_cast<std::uint32_t>(idx.num_terms()));
    out.u8(static_cast<std::uint8_t>(idx.block_max().bits()));
    out.u8(static_cast<std::uint8_t>(idx.superblock_max().bits()));
    out.u8(static_cast<std::uint8_t>(idx.docs().format()));
    out.u8(static_cast<std::uint8_t>(idx.params().bits()));
    out.f64(idx.params().global_max());
    out.u32(flags);
    out.u32(static_cast<std::uint32_t>(sections.size()));
    std::uint64_t offset = fixed_header_bytes + section_entry_bytes * sections.size();
    for (auto& [tag, w] : sections) {
        out.u32(static_cast<std::uint32_t>(tag));
        out.u64(offset);
        out.u64(w.size());
        offset += w.size();
    }
    for (auto& [tag, w] : sections) {
        out.bytes(w.buffer());
    }
    return std::move(out.buffer());
}

container_info read_container_info(std::span<std::uint8_t const> data)
{
    detail::byte_reader r(data);
    r.expect_magic(index_magic);
    container_info info;
    info.version = r.u32();
    if (info.version != index_format_version) {
        throw format_error("unsupported index version " + std::to_string(info.version));
    }
    info.num_docs = r.u64();
    info.block_size = r.u32();
    info.blocks_per_superblock = r.u32();
    info.num_blocks = r.u64();
    info.num_superblocks = r.u64();
    info.num_terms = r.u32();
    info.bits_block = r.u8();
    info.bits_superblock = r.u8();
    info.format = static_cast<doc_format>(r.u8());
    info.doc_bits = r.u8();
    info.global_max = r.f64();
    info.flags = r.u32();
    auto count = r.count(r.u32(), section_entry_bytes);
    for (std::size_t i = 0; i < count; ++i) {
        section_info s{};
        s.tag = static_cast<section_tag>(r.u32());
        s.offset = r.u64();
        s.size = r.u64();
        if (s.offset > data.size() || s.size > data.size() - s.offset) {
            throw format_error("section extends past end of file");
        }
        info.sections.push_back(s);
    }
    info.header_bytes = r.position();
    info.file_bytes = data.size();

    if (info.block_size < 1 || info.block_size > max_block_size || info.blocks_per_superblock < 1) {
        throw format_error("invalid block geometry in header");
    }
    auto expected_blocks = (info.num_docs + info.block_size - 1) / info.block_size;
    auto expected_sb = (expected_blocks + info.blocks_per_superblock - 1) / info.blocks_per_superblock;
    if (info.num_blocks != expected_blocks || info.num_superblocks != expected_sb) {
        throw format_error("header block counts inconsistent with document count");
    }
    return info;
}

index deserialize_index(std::span<std::uint8_t const> data)
{
    auto info = read_container_info(data);
    auto section = [&](section_tag tag) -> std::optional<detail::byte_reader> {
        for (auto const& s : info.sections) {
            if (s.tag == tag) {
                return detail::byte_reader(data.subspan(s.offset, s.size));
            }
        }
        return std::nullopt;
    };
    auto require = [&](section_tag tag) {
        auto r = section(tag);
        if (!r) {
            throw format_error(std::string("missing section ") + to_string(tag));
        }
        return *r;
    };
    auto finish = [](detail::byte_reader& r, section_tag tag) {
        if (r.remaining() != 0) {
            throw format_error(std::string("trailing bytes in section ") + to_string(tag));
        }
    };

    index idx;
    idx.m_blocks_per_superblock = info.blocks_per_superblock;
    try {
        idx.m_params = quantization_params(info.global_max, info.doc_bits);
    } catch (std::invalid_argument const& e) {
        throw format_error(e.what());
    }

    auto check_store = [&](max_weight_store const& s, std::uint64_t units, int bits) {
        if (s.num_units() != units || s.num_terms() != info.num_terms || s.bits() != bits) {
            throw format_error("store shape inconsistent with header");
        }
    };
    {
        auto r = require(section_tag::superblock_max);
        idx.m_superblock_max = read_store(r);
        finish(r, section_tag::superblock_max);
        check_store(idx.m_superblock_max, info.num_superblocks, info.bits_superblock);
    }
    if (info.flags & flag_has_avg) {
        auto r = require(section_tag::superblock_avg);
        idx.m_superblock_avg = read_store(r);
        finish(r, section_tag::superblock_avg);
        check_store(*idx.m_superblock_avg, info.num_superblocks, info.bits_superblock);
    }
    {
        auto r = require(section_tag::block_max);
        idx.m_block_max = read_store(r);
        finish(r, section_tag::block_max);
        check_store(idx.m_block_max, info.num_blocks, info.bits_block);
    }
    {
        auto r = require(section_tag::doc_index);
        idx.m_docs = read_doc_index(r, info.block_size, static_cast<std::size_t>(info.num_docs),
                                    static_cast<std::size_t>(info.num_blocks));
        finish(r, section_tag::doc_index);
        if (idx.m_docs.format() != info.format) {
            throw format_error("document index tag differs from header");
        }
    }
    {
        auto r = require(section_tag::doc_ids);
        auto n = r.count(r.u64(), 4);
        if (n != info.num_docs) {
            throw format_error("doc id count differs from header");
        }
        idx.m_doc_ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            idx.m_doc_ids.push_back(r.str());
        }
        finish(r, section_tag::doc_ids);
    }
    if (info.flags & flag_has_vocab) {
        auto r = require(section_tag::vocabulary);
        auto n = r.count(r.u32(), 4);
        std::vector<std::string> terms;
        terms.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            terms.push_back(r.str());
        }
        finish(r, section_tag::vocabulary);
        try {
            idx.m_vocab = vocabulary(std::move(terms));
        } catch (ingest_error const& e) {
            throw format_error(e.what());
        }
    }
    return idx;
}

void save_index(index const& idx, std::filesystem::path const& path)
{
    detail::write_file(path.string(), serialize_index(idx));
}

index load_index(std::filesystem::path const& path)
{
    auto data = detail::read_file(path.string());
    return deserialize_index(data);
}

}  // namespace lsp
