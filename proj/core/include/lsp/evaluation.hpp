#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lsp/retriever.hpp"

namespace lsp {

struct run_entry {
    std::string doc;
    std::uint32_t rank;
    std::uint64_t score;
};

/// Query id -> entries in rank order.
using run = std::map<std::string, std::vector<run_entry>>;

/// Appends "qid Q0 docid rank score tag" lines; ranks start at 1.
void write_run(std::ostream& out, std::string const& qid, std::span<search_hit const> hits,
               std::vector<std::string> const& doc_ids, std::string const& tag);

/// Throws format_error on malformed lines, non-contiguous ranks or increasing scores.
[[nodiscard]] run read_run(std::istream& in);
[[nodiscard]] run read_run_file(std::string const& path);

/// Query id -> relevant doc ids (grade > 0).
using qrels = std::map<std::string, std::map<std::string, int>>;

/// Four-column TREC qrels: "qid iter docid grade".
[[nodiscard]] qrels read_qrels(std::istream& in);
[[nodiscard]] qrels read_qrels_file(std::string const& path);

/// Averages over qrels queries with at least one relevant document; a query missing from the run scores 0.
[[nodiscard]] double recall_at_k(run const& r, qrels const& judgments, std::size_t k);
[[nodiscard]] double mrr_at_k(run const& r, qrels const& judgments, std::size_t k);

struct metrics {
    std::size_t k = 0;
    std::size_t queries = 0;
    double recall = 0;
    double mrr = 0;
    std::optional<double> safe_recall;
    /// recall / safe_recall; empty without a safe run or when the safe recall is zero.
    std::optional<double> preserved_recall;
};

[[nodiscard]] metrics evaluate(run const& r, qrels const& judgments, std::size_t k, run const* safe = nullptr);

struct latency_summary {
    std::size_t count = 0;
    double mean = 0;
    double median = 0;
    double p99 = 0;
    double min = 0;
    double max = 0;
};

/// Nearest-rank percentiles over the samples.
[[nodiscard]] latency_summary summarize_latency(std::vector<double> samples);

}  // namespace lsp
