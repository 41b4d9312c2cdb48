#include "lsp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace lsp {

synthetic_generator::synthetic_generator(corpus_options options) : m_options(options)
{
    if (options.vocab_size == 0 || options.vocab_size > max_vocabulary) {
        throw std::invalid_argument("synthetic_generator: vocabulary size must be in 1..65536");
    }
    if (options.avg_terms < 1) {
        throw std::invalid_argument("synthetic_generator: need at least one term per document");
    }
    m_background.resize(options.vocab_size);
    for (std::size_t r = 0; r < options.vocab_size; ++r) {
        m_background[r] = 1.0 / std::pow(static_cast<double>(r + 1), options.zipf_exponent);
    }
    std::mt19937_64 rng(options.seed ^ 0x70b1c5ULL);
    std::uniform_int_distribution<std::size_t> any_term(0, options.vocab_size - 1);
    m_topics.resize(options.num_topics);
    for (auto& topic : m_topics) {
        std::size_t n = std::min(options.terms_per_topic, options.vocab_size);
        while (topic.size() < n) {
            auto t = static_cast<term_id>(any_term(rng));
            if (std::find(topic.begin(), topic.end(), t) == topic.end()) {
                topic.push_back(t);
            }
        }
    }
}

namespace {

template <typename Weight, typename Draw>
std::vector<std::pair<term_id, Weight>> draw_vector(std::mt19937_64& rng, double avg_terms,
                                                    std::discrete_distribution<std::size_t>& background,
                                                    std::vector<term_id> const* topic, double topic_share,
                                                    Draw&& weight)
{
    std::poisson_distribution<int> length(std::max(avg_terms - 1, 1e-9));
    std::bernoulli_distribution from_topic(topic != nullptr ? topic_share : 0.0);
    std::size_t n = static_cast<std::size_t>(length(rng)) + 1;
    std::map<term_id, Weight> entries;
    for (std::size_t i = 0; i < n; ++i) {
        term_id t = 0;
        if (topic != nullptr && from_topic(rng)) {
            std::uniform_int_distribution<std::size_t> pick(0, topic->size() - 1);
            t = (*topic)[pick(rng)];
        } else {
            t = static_cast<term_id>(background(rng));
        }
        auto w = weight(rng);
        auto [it, inserted] = entries.emplace(t, w);
        if (!inserted) {
            it->second = std::max(it->second, w);
        }
    }
    return {entries.begin(), entries.end()};
}

}  // namespace

collection synthetic_generator::corpus() const
{
    std::mt19937_64 rng(m_options.seed);
    std::discrete_distribution<std::size_t> background(m_background.begin(), m_background.end());
    std::uniform_int_distribution<std::size_t> pick_topic(0, m_topics.empty() ? 0 : m_topics.size() - 1);
    std::gamma_distribution<double> gamma(2.0, 0.4);
    auto weight = [&](std::mt19937_64& g) { return std::min(4.0, 0.01 + gamma(g)); };

    std::vector<std::string> ids;
    std::vector<std::vector<raw_entry>> raw(m_options.num_docs);
    ids.reserve(m_options.num_docs);
    for (std::size_t d = 0; d < m_options.num_docs; ++d) {
        auto const* topic = m_topics.empty() ? nullptr : &m_topics[pick_topic(rng)];
        for (auto [t, w] :
             draw_vector<double>(rng, m_options.avg_terms, background, topic, m_options.topic_share, weight)) {
            raw[d].push_back({t, w});
        }
        ids.push_back("d" + std::to_string(d));
    }
    return make_collection(std::move(ids), raw);
}

std::vector<query> synthetic_generator::queries(query_options const& options) const
{
    if (options.max_weight == 0 || options.avg_terms < 1) {
        throw std::invalid_argument("synthetic_generator: bad query options");
    }
    std::mt19937_64 rng(options.seed);
    std::discrete_distribution<std::size_t> background(m_background.begin(), m_background.end());
    std::uniform_int_distribution<std::size_t> pick_topic(0, m_topics.empty() ? 0 : m_topics.size() - 1);
    std::uniform_int_distribution<unsigned> uniform_weight(1, options.max_weight);
    auto weight = [&](std::mt19937_64& g) { return static_cast<std::uint16_t>(uniform_weight(g)); };

    std::vector<query> out;
    out.reserve(options.num_queries);
    for (std::size_t i = 0; i < options.num_queries; ++i) {
        auto const* topic = m_topics.empty() ? nullptr : &m_topics[pick_topic(rng)];
        std::vector<query_vector::entry> entries;
        for (auto [t, w] :
             draw_vector<std::uint16_t>(rng, options.avg_terms, background, topic, m_options.topic_share, weight)) {
            entries.push_back({t, w});
        }
        out.push_back({"q" + std::to_string(i), query_vector(std::move(entries))});
    }
    return out;
}

}  // namespace lsp
