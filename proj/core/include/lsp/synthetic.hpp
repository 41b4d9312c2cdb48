#pragma once

#include <cstdint>
#include <vector>

#include "lsp/collection.hpp"

namespace lsp {

/// Random corpora with a Zipf-like background vocabulary and optional topics.
struct corpus_options {
    std::size_t num_docs = 10000;
    std::size_t vocab_size = 5000;
    double avg_terms = 40;
    /// 0 draws every term from the background distribution.
    std::size_t num_topics = 0;
    std::size_t terms_per_topic = 60;
    /// Fraction of a document's terms drawn from its topic.
    double topic_share = 0.7;
    double zipf_exponent = 1.0;
    std::uint64_t seed = 1;
};

struct query_options {
    std::size_t num_queries = 200;
    double avg_terms = 20;
    std::uint16_t max_weight = 64;
    std::uint64_t seed = 2;
};

class synthetic_generator {
  public:
    explicit synthetic_generator(corpus_options options);

    [[nodiscard]] corpus_options const& options() const noexcept { return m_options; }
    /// Raw weights in (0, 4], quantized on ingestion. Doc ids are "d<n>".
    [[nodiscard]] collection corpus() const;
    /// Integer-weighted queries drawn like documents; ids are "q<n>".
    [[nodiscard]] std::vector<query> queries(query_options const& options) const;

  private:
    corpus_options m_options;
    std::vector<double> m_background;
    std::vector<std::vector<term_id>> m_topics;
};

}  // namespace lsp
