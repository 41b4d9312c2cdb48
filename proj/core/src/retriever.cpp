#include "lsp/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsp {

lsp_variant parse_lsp_variant(std::string const& name)
{
    if (name == "lsp0" || name == "LSP0" || name == "LSP/0" || name == "0") {
        return lsp_variant::lsp0;
    }
    if (name == "lsp1" || name == "LSP1" || name == "LSP/1" || name == "1") {
        return lsp_variant::lsp1;
    }
    if (name == "lsp2" || name == "LSP2" || name == "LSP/2" || name == "2") {
        return lsp_variant::lsp2;
    }
    throw std::invalid_argument("unknown variant: " + name);
}

char const* to_string(lsp_variant variant) noexcept
{
    switch (variant) {
    case lsp_variant::lsp0: return "lsp0";
    case lsp_variant::lsp1: return "lsp1";
    case lsp_variant::lsp2: return "lsp2";
    }
    return "?";
}

void pruning_config::validate() const
{
    if (k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    if (!(mu > 0 && mu <= eta && eta <= 1)) {
        throw std::invalid_argument("need 0 < mu <= eta <= 1");
    }
    if (!(beta > 0 && beta <= 1)) {
        throw std::invalid_argument("beta must be in (0, 1]");
    }
}

threshold_tracker::threshold_tracker(std::size_t k) : m_k(k)
{
    if (k == 0) {
        throw std::invalid_argument("threshold_tracker: k must be at least 1");
    }
}

void threshold_tracker::reset()
{
    m_heap.clear();
}

namespace {
bool heap_less(search_hit const& a, search_hit const& b)
{
    return a.score > b.score;
}
}  // namespace

bool threshold_tracker::push(std::uint32_t doc, score_type score)
{
    if (m_heap.size() < m_k) {
        m_heap.push_back({doc, score});
        std::push_heap(m_heap.begin(), m_heap.end(), heap_less);
        return true;
    }
    if (score <= m_heap.front().score) {
        return false;
    }
    std::pop_heap(m_heap.begin(), m_heap.end(), heap_less);
    m_heap.back() = {doc, score};
    std::push_heap(m_heap.begin(), m_heap.end(), heap_less);
    return true;
}

std::vector<search_hit> threshold_tracker::sorted() const
{
    auto out = m_heap;
    std::sort(out.begin(), out.end(), [](search_hit const& a, search_hit const& b) { return a.score > b.score; });
    return out;
}

std::vector<std::uint16_t> accumulate_bounds(query_vector const& query, max_weight_store const& store)
{
    std::vector<std::uint16_t> acc(store.num_units(), 0);
    decoded_group buf;
    for (auto const& e : query) {
        if (!store.has_term(e.term)) {
            continue;
        }
        auto const& list = store.list(e.term);
        auto selectors = list.selectors();
        for (std::size_t g = 0; g < selectors.size(); ++g) {
            if (selectors[g] == 0) {
                continue;
            }
            decode_group(list, g, buf);
            std::size_t base = g * packed_group_size;
            std::size_t n = std::min(packed_group_size, acc.size() - base);
            std::uint32_t q = e.weight;
            for (std::size_t i = 0; i < n; ++i) {
                acc[base + i] = saturating_add(acc[base + i], q * buf[i]);
            }
        }
    }
    return acc;
}

double bound_value(std::uint16_t level_sum, int bits) noexcept
{
    if (level_sum == saturated_bound) {
        return std::numeric_limits<double>::infinity();
    }
    double step = 255.0 / static_cast<double>((1U << bits) - 1);
    return level_sum * step;
}

void search_trace::clear()
{
    superblocks.clear();
    blocks.clear();
    theta_history.clear();
}

superblock_selector::superblock_selector(std::span<std::uint16_t const> sbmax, std::span<std::uint16_t const> sbavg,
                                         index const& idx, pruning_config const& config, search_trace* trace)
    : m_sbmax(sbmax), m_sbavg(sbavg), m_index(&idx), m_config(config), m_trace(trace)
{
    if (sbmax.size() != idx.num_superblocks()) {
        throw std::invalid_argument("superblock_selector: score array does not match the index");
    }
    if (config.variant == lsp_variant::lsp2 && sbavg.size() != sbmax.size()) {
        throw std::invalid_argument("superblock_selector: LSP/2 needs superblock averages");
    }
    m_order.resize(sbmax.size());
    std::iota(m_order.begin(), m_order.end(), 0U);
    std::sort(m_order.begin(), m_order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return sbmax[a] != sbmax[b] ? sbmax[a] > sbmax[b] : a < b;
    });
    std::uint64_t gamma = std::min<std::uint64_t>(config.gamma, sbmax.size());
    m_slot_budget = gamma * idx.block_size() * idx.blocks_per_superblock();
}

double superblock_selector::max_bound(std::size_t sb) const noexcept
{
    return bound_value(m_sbmax[sb], m_index->superblock_max().bits());
}

double superblock_selector::avg_bound(std::size_t sb) const noexcept
{
    if (m_sbavg.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return bound_value(m_sbavg[sb], m_index->superblock_max().bits());
}

void superblock_selector::record(std::size_t sb, score_type theta, bool full, selection_phase phase, bool visited)
{
    if (m_trace != nullptr) {
        m_trace->superblocks.push_back({sb, max_bound(sb), avg_bound(sb), theta, full, phase, visited});
    }
}

void superblock_selector::prune_rest(score_type theta, bool tracker_full)
{
    auto phase = m_slots_emitted < m_slot_budget ? selection_phase::guaranteed : selection_phase::extended;
    for (; m_pos < m_order.size(); ++m_pos) {
        record(m_order[m_pos], theta, tracker_full, phase, false);
    }
    m_done = true;
}

std::optional<std::size_t> superblock_selector::next(score_type theta, bool tracker_full)
{
    if (m_done) {
        return std::nullopt;
    }
    double const t = theta;
    while (m_pos < m_order.size()) {
        std::size_t sb = m_order[m_pos];
        double ub = max_bound(sb);
        bool emit = false;
        selection_phase phase = selection_phase::extended;
        if (m_slots_emitted < m_slot_budget) {
            phase = selection_phase::guaranteed;
            if (!(ub >= t)) {
                prune_rest(theta, tracker_full);
                return std::nullopt;
            }
            emit = true;
        } else {
            switch (m_config.variant) {
            case lsp_variant::lsp0:
                prune_rest(theta, tracker_full);
                return std::nullopt;
            case lsp_variant::lsp1:
                if (!(ub > t / m_config.mu)) {
                    prune_rest(theta, tracker_full);
                    return std::nullopt;
                }
                emit = true;
                break;
            case lsp_variant::lsp2:
                emit = !(ub <= t / m_config.mu && avg_bound(sb) <= t / m_config.eta);
                break;
            }
        }
        record(sb, theta, tracker_full, phase, emit);
        ++m_pos;
        if (emit) {
            auto [first, last] = m_index->superblock_blocks(sb);
            std::uint64_t first_doc = std::uint64_t{first} * m_index->block_size();
            std::uint64_t last_doc = std::min<std::uint64_t>(std::uint64_t{last} * m_index->block_size(),
                                                             m_index->num_docs());
            m_slots_emitted += last_doc - first_doc;
            return sb;
        }
    }
    m_done = true;
    return std::nullopt;
}

std::vector<std::size_t> select_superblocks(std::span<std::uint16_t const> sbmax,
                                            std::span<std::uint16_t const> sbavg, index const& idx,
                                            pruning_config const& config, score_type theta, bool tracker_full)
{
    superblock_selector sel(sbmax, sbavg, idx, config);
    std::vector<std::size_t> out;
    while (auto sb = sel.next(theta, tracker_full)) {
        out.push_back(*sb);
    }
    return out;
}

searcher::searcher(index const& idx) : m_index(&idx), m_scores(idx.block_size()) {}

std::uint16_t const* searcher::block_group(std::size_t term_slot, std::size_t group)
{
    auto& slot = m_group_slot[term_slot][group];
    if (slot < 0) {
        slot = static_cast<std::int32_t>(m_pool.size());
        m_pool.emplace_back();
        decode_group(*m_term_lists[term_slot], group, m_pool.back());
    }
    return m_pool[static_cast<std::size_t>(slot)].data();
}

std::vector<search_hit> searcher::search(query_vector const& query, pruning_config const& config,
                                         search_trace* trace)
{
    config.validate();
    m_stats = {};
    if (trace != nullptr) {
        trace->clear();
    }
    if (query.empty()) {
        return {};
    }
    auto const& idx = *m_index;
    if (config.variant == lsp_variant::lsp2 && idx.superblock_avg() == nullptr) {
        throw std::invalid_argument("LSP/2 requires an index built with superblock averages");
    }
    check_query_range(query);

    auto pruned = prune_query(query, config.beta);
    auto sbmax = accumulate_bounds(pruned, idx.superblock_max());
    std::vector<std::uint16_t> sbavg;
    if (config.variant == lsp_variant::lsp2) {
        sbavg = accumulate_bounds(pruned, *idx.superblock_avg());
    }

    auto const& block_store = idx.block_max();
    std::size_t const num_groups = (idx.num_blocks() + packed_group_size - 1) / packed_group_size;
    m_term_lists.clear();
    m_pool.clear();
    m_group_slot.resize(pruned.size());
    for (std::size_t j = 0; j < pruned.size(); ++j) {
        auto term = pruned[j].term;
        m_term_lists.push_back(block_store.has_term(term) ? &block_store.list(term) : nullptr);
        m_group_slot[j].assign(num_groups, -1);
    }

    prepared_query full(query);
    threshold_tracker tracker(config.k);
    superblock_selector selector(sbmax, sbavg, idx, config, trace);
    int const block_bits = block_store.bits();
    std::uint32_t const b = idx.block_size();

    while (auto sb = selector.next(tracker.theta(), tracker.full())) {
        ++m_stats.superblocks_visited;
        auto [first, last] = idx.superblock_blocks(*sb);
        m_block_bounds.assign(last - first, 0);
        for (std::size_t j = 0; j < pruned.size(); ++j) {
            auto const* list = m_term_lists[j];
            if (list == nullptr) {
                continue;
            }
            std::uint32_t q = pruned[j].weight;
            auto selectors = list->selectors();
            for (std::size_t blk = first; blk < last; ++blk) {
                std::size_t g = blk / packed_group_size;
                if (selectors[g] == 0) {
                    blk = std::min(last, (g + 1) * packed_group_size) - 1;
                    continue;
                }
                auto v = block_group(j, g)[blk % packed_group_size];
                auto& acc = m_block_bounds[blk - first];
                acc = saturating_add(acc, q * v);
            }
        }
        m_stats.blocks_bounded += last - first;
        m_block_order.resize(last - first);
        std::iota(m_block_order.begin(), m_block_order.end(), 0U);
        std::sort(m_block_order.begin(), m_block_order.end(), [&](std::uint32_t x, std::uint32_t y) {
            return m_block_bounds[x] != m_block_bounds[y] ? m_block_bounds[x] > m_block_bounds[y] : x < y;
        });

        for (std::size_t i = 0; i < m_block_order.size(); ++i) {
            std::size_t blk = first + m_block_order[i];
            double ub = bound_value(m_block_bounds[m_block_order[i]], block_bits);
            score_type theta = tracker.theta();
            if (tracker.full() && ub <= theta / config.eta) {
                if (trace != nullptr) {
                    for (std::size_t r = i; r < m_block_order.size(); ++r) {
                        trace->blocks.push_back({first + m_block_order[r],
                                                 bound_value(m_block_bounds[m_block_order[r]], block_bits), theta,
                                                 true, false});
                    }
                }
                break;
            }
            if (trace != nullptr) {
                trace->blocks.push_back({blk, ub, theta, tracker.full(), true});
            }
            idx.docs().score_block(blk, full, m_scores);
            std::size_t base = blk * b;
            std::size_t n = std::min<std::size_t>(b, idx.num_docs() - base);
            for (std::size_t s = 0; s < n; ++s) {
                if (tracker.push(static_cast<std::uint32_t>(base + s), m_scores[s]) && trace != nullptr) {
                    trace->theta_history.push_back(tracker.theta());
                }
            }
            ++m_stats.blocks_scored;
            m_stats.docs_scored += n;
        }
    }

    auto hits = tracker.sorted();
    auto const& ids = idx.doc_ids();
    std::sort(hits.begin(), hits.end(), [&](search_hit const& x, search_hit const& y) {
        return x.score != y.score ? x.score > y.score : ids[x.doc] < ids[y.doc];
    });
    return hits;
}

std::vector<search_hit> search(query_vector const& query, index const& idx, pruning_config const& config,
                               search_trace* trace)
{
    searcher s(idx);
    return s.search(query, config, trace);
}

}  // namespace lsp
