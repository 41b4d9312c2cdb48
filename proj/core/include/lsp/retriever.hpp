#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsp/doc_index.hpp"
#include "lsp/index.hpp"

namespace lsp {

enum class lsp_variant { lsp0, lsp1, lsp2 };

[[nodiscard]] lsp_variant parse_lsp_variant(std::string const& name);
[[nodiscard]] char const* to_string(lsp_variant variant) noexcept;

struct pruning_config {
    std::size_t k = 10;
    /// Guaranteed superblocks; values above N are clamped.
    std::size_t gamma = std::numeric_limits<std::size_t>::max();
    double mu = 1.0;
    double eta = 1.0;
    double beta = 1.0;
    lsp_variant variant = lsp_variant::lsp0;

    /// Throws std::invalid_argument unless k >= 1, 0 < mu <= eta <= 1 and 0 < beta <= 1.
    void validate() const;
};

struct search_hit {
    std::uint32_t doc;  ///< internal id
    score_type score;

    friend bool operator==(search_hit const&, search_hit const&) = default;
};

/// Best k scores seen so far; theta is the k-th best, 0 until k are held.
class threshold_tracker {
  public:
    explicit threshold_tracker(std::size_t k);

    void reset();
    [[nodiscard]] std::size_t k() const noexcept { return m_k; }
    [[nodiscard]] bool full() const noexcept { return m_heap.size() >= m_k; }
    [[nodiscard]] score_type theta() const noexcept { return full() ? m_heap.front().score : 0; }
    [[nodiscard]] std::size_t size() const noexcept { return m_heap.size(); }

    /// Admits the document if the heap has room or it beats theta strictly.
    bool push(std::uint32_t doc, score_type score);

    /// Held entries by descending score, ties in unspecified order.
    [[nodiscard]] std::vector<search_hit> sorted() const;

  private:
    std::size_t m_k;
    std::vector<search_hit> m_heap;
};

inline constexpr std::uint16_t saturated_bound = std::numeric_limits<std::uint16_t>::max();

/// Adds with clamping at 65535.
[[nodiscard]] constexpr std::uint16_t saturating_add(std::uint16_t acc, std::uint32_t v) noexcept
{
    std::uint32_t s = acc + v;
    return s > saturated_bound ? saturated_bound : static_cast<std::uint16_t>(s);
}

/// Sum over query terms of q_t * W_{X,t} in saturating 16-bit level units,
/// one entry per unit of the store. Terms missing from the store add nothing.
[[nodiscard]] std::vector<std::uint16_t> accumulate_bounds(query_vector const& query, max_weight_store const& store);

/// A level sum converted to document score units; a saturated sum is unbounded.
[[nodiscard]] double bound_value(std::uint16_t level_sum, int bits) noexcept;

enum class selection_phase : std::uint8_t { guaranteed, extended };

struct superblock_decision {
    std::size_t superblock;
    double bound;
    double avg_bound;  ///< NaN without an average store
    score_type theta;
    bool tracker_full;
    selection_phase phase;
    bool visited;
};

struct block_decision {
    std::size_t block;
    double bound;
    score_type theta;
    bool tracker_full;
    bool scored;
};

struct search_trace {
    std::vector<superblock_decision> superblocks;
    std::vector<block_decision> blocks;
    /// Theta after every admitted document.
    std::vector<score_type> theta_history;

    void clear();
};

/// Emits superblocks in non-increasing SBMax order, rechecking theta on every call.
///
/// The guaranteed phase lasts until the emitted superblocks cover gamma * b * c
/// document slots and emits while SBMax >= theta. Afterwards LSP/0 stops, LSP/1
/// continues while SBMax > theta / mu, and LSP/2 skips a superblock only when
/// SBMax <= theta / mu and its average bound <= theta / eta.
class superblock_selector {
  public:
    superblock_selector(std::span<std::uint16_t const> sbmax, std::span<std::uint16_t const> sbavg,
                        index const& idx, pruning_config const& config, search_trace* trace = nullptr);

    /// Next superblock to visit, or nothing when traversal is over.
    [[nodiscard]] std::optional<std::size_t> next(score_type theta, bool tracker_full);

  private:
    void prune_rest(score_type theta, bool tracker_full);
    [[nodiscard]] double max_bound(std::size_t sb) const noexcept;
    [[nodiscard]] double avg_bound(std::size_t sb) const noexcept;
    void record(std::size_t sb, score_type theta, bool full, selection_phase phase, bool visited);

    std::span<std::uint16_t const> m_sbmax;
    std::span<std::uint16_t const> m_sbavg;
    index const* m_index;
    pruning_config m_config;
    search_trace* m_trace;
    std::vector<std::uint32_t> m_order;
    std::size_t m_pos = 0;
    std::uint64_t m_slot_budget = 0;
    std::uint64_t m_slots_emitted = 0;
    bool m_done = false;
};

/// Convenience: selection with a fixed theta trajectory (theta never moves).
[[nodiscard]] std::vector<std::size_t> select_superblocks(
    std::span<std::uint16_t const> sbmax, std::span<std::uint16_t const> sbavg, index const& idx,
    pruning_config const& config, score_type theta, bool tracker_full);

struct search_stats {
    std::size_t superblocks_visited = 0;
    std::size_t blocks_bounded = 0;
    std::size_t blocks_scored = 0;
    std::size_t docs_scored = 0;
};

/// Query executor with reusable buffers. One searcher per thread.
class searcher {
  public:
    explicit searcher(index const& idx);

    /// Ranked hits (internal ids), by descending score then ascending external id.
    std::vector<search_hit> search(query_vector const& query, pruning_config const& config,
                                   search_trace* trace = nullptr);

    [[nodiscard]] search_stats const& last_stats() const noexcept { return m_stats; }

  private:
    std::uint16_t const* block_group(std::size_t term_slot, std::size_t group);

    index const* m_index;
    search_stats m_stats;
    std::vector<score_type> m_scores;
    std::vector<std::uint16_t> m_block_bounds;
    std::vector<std::uint32_t> m_block_order;
    // per query term: group -> pool slot, lazily decoded block-max groups
    std::vector<std::vector<std::int32_t>> m_group_slot;
    std::vector<decoded_group> m_pool;
    std::vector<packed_list const*> m_term_lists;
};

/// One-shot search.
[[nodiscard]] std::vector<search_hit> search(query_vector const& query, index const& idx,
                                             pruning_config const& config, search_trace* trace = nullptr);

}  // namespace lsp
