#include "lsp/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace lsp {

block_strategy parse_block_strategy(std::string const& name)
{
    if (name == "input-order") {
        return block_strategy::input_order;
    }
    if (name == "kmeans-lite") {
        return block_strategy::kmeans_lite;
    }
    if (name == "random") {
        return block_strategy::random;
    }
    throw std::invalid_argument("unknown block strategy: " + name);
}

char const* to_string(block_strategy strategy) noexcept
{
    switch (strategy) {
    case block_strategy::input_order: return "input-order";
    case block_strategy::kmeans_lite: return "kmeans-lite";
    case block_strategy::random: return "random";
    }
    return "?";
}

index_layout::index_layout(std::uint32_t block_size, std::uint32_t blocks_per_superblock,
                           std::vector<std::uint32_t> order)
    : m_block_size(block_size), m_blocks_per_superblock(blocks_per_superblock), m_order(std::move(order))
{
    if (block_size < 1 || block_size > max_block_size) {
        throw std::invalid_argument("index_layout: block size must be in 1..256");
    }
    if (blocks_per_superblock < 1) {
        throw std::invalid_argument("index_layout: blocks per superblock must be >= 1");
    }
    m_position.assign(m_order.size(), std::numeric_limits<std::uint32_t>::max());
    for (std::size_t i = 0; i < m_order.size(); ++i) {
        auto src = m_order[i];
        if (src >= m_order.size() || m_position[src] != std::numeric_limits<std::uint32_t>::max()) {
            throw std::invalid_argument("index_layout: order is not a permutation");
        }
        m_position[src] = static_cast<std::uint32_t>(i);
    }
    m_num_blocks = (m_order.size() + block_size - 1) / block_size;
    m_num_superblocks = (m_num_blocks + blocks_per_superblock - 1) / blocks_per_superblock;
}

namespace {

struct weighted_term {
    term_id term;
    float weight;
};

using feature = std::vector<weighted_term>;

feature top_terms_normalized(doc_vector const& doc, std::size_t top)
{
    feature f;
    f.reserve(doc.size());
    for (auto const& e : doc) {
        f.push_back({e.term, static_cast<float>(e.weight)});
    }
    if (f.size() > top) {
        std::partial_sort(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(top), f.end(),
                          [](auto const& a, auto const& b) {
                              return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
                          });
        f.resize(top);
    }
    float norm = 0;
    for (auto const& e : f) {
        norm += e.weight * e.weight;
    }
    norm = std::sqrt(norm);
    if (norm > 0) {
        for (auto& e : f) {
            e.weight /= norm;
        }
    }
    return f;
}

// Sparse spherical k-means over each document's top-weighted terms. Centroids
// are truncated to their heaviest terms so assignment goes through a small
// term -> centroid inverted list.
std::vector<std::uint32_t> kmeans_lite_order(
    std::span<doc_vector const> docs, std::size_t target_cluster_size, kmeans_options const& opt)
{
    auto const n = docs.size();
    std::size_t k = std::clamp<std::size_t>((n + target_cluster_size - 1) / target_cluster_size, 1,
                                            std::min(opt.max_clusters, n));
    std::vector<feature> features;
    features.reserve(n);
    for (auto const& d : docs) {
        features.push_back(top_terms_normalized(d, opt.top_terms));
    }
    std::size_t const vocab = vocabulary_extent(docs);

    std::mt19937_64 rng(opt.seed);
    std::vector<std::uint32_t> seeds(n);
    std::iota(seeds.begin(), seeds.end(), 0U);
    std::shuffle(seeds.begin(), seeds.end(), rng);

    std::vector<feature> centroids(k);
    for (std::size_t c = 0; c < k; ++c) {
        centroids[c] = features[seeds[c]];
    }
    std::vector<std::uint32_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
        assignment[i] = static_cast<std::uint32_t>(i % k);
    }

    std::vector<std::vector<std::pair<std::uint32_t, float>>> by_term(vocab);
    std::vector<float> sims(k);
    std::vector<float> dense(vocab);
    for (std::size_t iter = 0; iter < opt.iterations; ++iter) {
        for (auto& list : by_term) {
            list.clear();
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (auto const& e : centroids[c]) {
                by_term[e.term].emplace_back(static_cast<std::uint32_t>(c), e.weight);
            }
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(sims.begin(), sims.end(), 0.0F);
            for (auto const& e : features[i]) {
                for (auto const& [c, w] : by_term[e.term]) {
                    sims[c] += w * e.weight;
                }
            }
            auto best = static_cast<std::uint32_t>(std::max_element(sims.begin(), sims.end()) - sims.begin());
            if (sims[best] > 0 && best != assignment[i]) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) {
            break;
        }

        std::vector<std::vector<std::uint32_t>> members(k);
        for (std::size_t i = 0; i < n; ++i) {
            members[assignment[i]].push_back(static_cast<std::uint32_t>(i));
        }
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) {
                centroids[c] = features[pick(rng)];
                continue;
            }
            std::vector<term_id> touched;
            for (auto m : members[c]) {
                for (auto const& e : features[m]) {
                    if (dense[e.term] == 0.0F) {
                        touched.push_back(e.term);
                    }
                    dense[e.term] += e.weight;
                }
            }
            feature centroid;
            centroid.reserve(touched.size());
            for (auto t : touched) {
                centroid.push_back({t, dense[t]});
                dense[t] = 0.0F;
            }
            if (centroid.size() > opt.centroid_terms) {
                std::partial_sort(centroid.begin(),
                                  centroid.begin() + static_cast<std::ptrdiff_t>(opt.centroid_terms),
                                  centroid.end(), [](auto const& a, auto const& b) {
                                      return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
                                  });
                centroid.resize(opt.centroid_terms);
            }
            float norm = 0;
            for (auto const& e : centroid) {
                norm += e.weight * e.weight;
            }
            norm = std::sqrt(norm);
            for (auto& e : centroid) {
                e.weight /= norm;
            }
            centroids[c] = std::move(centroid);
        }
    }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return assignment[a] < assignment[b]; });
    return order;
}

}  // namespace

index_layout assign_blocks(std::span<doc_vector const> docs, std::uint32_t block_size,
                           std::uint32_t blocks_per_superblock, block_strategy strategy,
                           kmeans_options const& options)
{
    if (docs.empty()) {
        throw std::invalid_argument("assign_blocks: empty collection");
    }
    if (block_size < 2 || block_size > max_block_size) {
        throw std::invalid_argument("assign_blocks: block size must be in 2..256");
    }
    if (blocks_per_superblock < 1) {
        throw std::invalid_argument("assign_blocks: blocks per superblock must be >= 1");
    }
    std::vector<std::uint32_t> order(docs.size());
    std::iota(order.begin(), order.end(), 0U);
    switch (strategy) {
    case block_strategy::input_order: break;
    case block_strategy::random: {
        std::mt19937_64 rng(options.seed);
        std::shuffle(order.begin(), order.end(), rng);
        break;
    }
    case block_strategy::kmeans_lite:
        order = kmeans_lite_order(docs, std::size_t{block_size} * blocks_per_superblock, options);
        break;
    }
    return index_layout(block_size, blocks_per_superblock, std::move(order));
}

index_layout layout_from_ordering(std::span<std::string const> doc_ids,
                                  std::span<std::string const> ordering, std::uint32_t block_size,
                                  std::uint32_t blocks_per_superblock)
{
    if (ordering.size() != doc_ids.size()) {
        throw std::invalid_argument("ordering file lists " + std::to_string(ordering.size())
                                    + " ids, collection has " + std::to_string(doc_ids.size()));
    }
    std::unordered_map<std::string, std::uint32_t> index;
    index.reserve(doc_ids.size());
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        index.emplace(doc_ids[i], static_cast<std::uint32_t>(i));
    }
    std::vector<std::uint32_t> order;
    order.reserve(ordering.size());
    for (auto const& id : ordering) {
        auto it = index.find(id);
        if (it == index.end()) {
            throw std::invalid_argument("ordering file: unknown doc id " + id);
        }
        order.push_back(it->second);
    }
    return index_layout(block_size, blocks_per_superblock, std::move(order));
}

std::vector<std::string> read_ordering_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open ordering file " + path.string());
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            ids.push_back(line);
        }
    }
    return ids;
}

bound_quantizer::bound_quantizer(int bits) : m_bits(bits)
{
    if (bits != 1 && bits != 2 && bits != 4 && bits != 8) {
        throw std::invalid_argument("bound bits must be one of 1, 2, 4, 8");
    }
    m_step = 255U / ((1U << bits) - 1U);
}

std::vector<std::vector<posting>> invert(std::span<doc_vector const> docs, index_layout const& layout,
                                         std::size_t num_terms)
{
    std::vector<std::vector<posting>> lists(num_terms);
    auto order = layout.order();
    for (std::size_t internal = 0; internal < order.size(); ++internal) {
        for (auto const& e : docs[order[internal]]) {
            if (e.term >= num_terms) {
                throw std::out_of_range("invert: term id beyond vocabulary");
            }
            lists[e.term].push_back({static_cast<std::uint32_t>(internal), e.weight});
        }
    }
    return lists;
}

term_levels compute_term_levels(std::span<posting const> postings, index_layout const& layout,
                                bound_quantizer const& block_q, bound_quantizer const& superblock_q,
                                bool with_avg)
{
    term_levels out;
    out.block.assign(layout.num_blocks(), 0);
    out.superblock.assign(layout.num_superblocks(), 0);
    std::vector<std::uint8_t> sb_raw(layout.num_superblocks(), 0);
    std::vector<std::uint64_t> sb_sum(with_avg ? layout.num_superblocks() : 0, 0);
    std::vector<std::uint8_t> block_raw(layout.num_blocks(), 0);
    for (auto const& p : postings) {
        auto block = layout.block_of(p.doc);
        auto sb = block / layout.blocks_per_superblock();
        block_raw[block] = std::max(block_raw[block], p.weight);
        sb_raw[sb] = std::max(sb_raw[sb], p.weight);
        if (with_avg) {
            sb_sum[sb] += p.weight;
        }
    }
    for (std::size_t b = 0; b < block_raw.size(); ++b) {
        out.block[b] = block_q.level(block_raw[b]);
    }
    for (std::size_t s = 0; s < sb_raw.size(); ++s) {
        out.superblock[s] = superblock_q.level(sb_raw[s]);
    }
    if (with_avg) {
        out.superblock_avg.assign(layout.num_superblocks(), 0);
        std::uint64_t const slots = std::uint64_t{layout.block_size()} * layout.blocks_per_superblock();
        for (std::size_t s = 0; s < sb_sum.size(); ++s) {
            out.superblock_avg[s] = superblock_q.mean_level(sb_sum[s], slots);
        }
    }
    return out;
}

level_weight_set compute_level_weights(std::span<doc_vector const> docs, index_layout const& layout,
                                       int bits_block, int bits_superblock, std::size_t num_terms)
{
    bound_quantizer block_q(bits_block);
    bound_quantizer sb_q(bits_superblock);
    auto lists = invert(docs, layout, num_terms);
    level_weight_set out;
    out.block = {weight_level::block, bits_block, layout.num_blocks(), {}};
    out.superblock = {weight_level::superblock_max, bits_superblock, layout.num_superblocks(), {}};
    out.superblock_avg = {weight_level::superblock_avg, bits_superblock, layout.num_superblocks(), {}};
    for (std::size_t t = 0; t < num_terms; ++t) {
        auto levels = compute_term_levels(lists[t], layout, block_q, sb_q, true);
        out.block.per_term.push_back(std::move(levels.block));
        out.superblock.per_term.push_back(std::move(levels.superblock));
        out.superblock_avg.per_term.push_back(std::move(levels.superblock_avg));
    }
    return out;
}

std::size_t vocabulary_extent(std::span<doc_vector const> docs) noexcept
{
    std::size_t extent = 0;
    for (auto const& d : docs) {
        if (!d.empty()) {
            extent = std::max<std::size_t>(extent, std::size_t{d.entries().back().term} + 1);
        }
    }
    return extent;
}

}  // namespace lsp
