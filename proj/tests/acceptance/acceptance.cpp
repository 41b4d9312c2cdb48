// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsp/evaluation.hpp"
#include "lsp/gamma_planner.hpp"
#include "lsp/index.hpp"
#include "lsp/packed_list.hpp"
#include "lsp/retriever.hpp"
#include "lsp/synthetic.hpp"
#include "oracle.hpp"

using namespace lsp;

namespace {

constexpr double c1_time_limit_seconds = 60.0;
constexpr std::size_t monte_carlo_trials = 1000000;
constexpr double monte_carlo_tolerance = 0.01;
constexpr double monotone_slack = 1e-12;
constexpr double preserved_recall_floor = 0.95;
constexpr std::size_t planner_training_queries = 10000;

struct outcome {
    bool pass = false;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string format(char const* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

struct ranked {
    std::vector<std::uint64_t> scores;
    std::vector<std::size_t> sources;
};

ranked run_query(searcher& s, std::vector<std::size_t> const& source, query_vector const& q,
                 pruning_config const& cfg)
{
    ranked out;
    for (auto const& h : s.search(q, cfg)) {
        out.scores.push_back(h.score);
        out.sources.push_back(source[h.doc]);
    }
    return out;
}

std::uint64_t kth_score(ranked const& r, std::size_t k)
{
    return r.scores.size() >= k ? r.scores[k - 1] : 0;
}

/// The 10k-document corpus shared by several criteria.
struct base_fixture {
    collection corpus;
    std::vector<query> queries;

    base_fixture()
    {
        corpus_options opts;
        opts.num_docs = 10000;
        opts.avg_terms = 40;
        opts.vocab_size = 5000;
        synthetic_generator gen(opts);
        corpus = gen.corpus();
        query_options qo;
        qo.num_queries = 200;
        queries = gen.queries(qo);
    }
};

base_fixture const& base()
{
    static base_fixture const f;
    return f;
}

outcome safe_equivalence()
{
    auto start = clock_type::now();
    auto const& f = base();
    auto idx = build_index(f.corpus, build_options{});
    auto source = oracle::source_of(f.corpus, idx);
    searcher s(idx);
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    for (auto const& q : f.queries) {
        auto scores = oracle::all_scores(f.corpus, q.vector);
        for (std::size_t k : {10U, 100U, 1000U}) {
            auto expected = oracle::select(scores, k);
            auto got = run_query(s, source, q.vector,
                                 pruning_config{.k = k, .eta = 1.0, .variant = lsp_variant::lsp0});
            ++checked;
            mismatches += oracle::matches(expected, got.scores, got.sources) ? 0 : 1;
        }
    }
    double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < c1_time_limit_seconds,
            format("%zu runs, %zu mismatches, %.2f s (limit %.0f s)", checked, mismatches, elapsed,
                   c1_time_limit_seconds)};
}

outcome erroneous_pruning()
{
    // Each query pairs a heavy term held by two documents with a light term held by twenty.
    // Pruning the query to its heavy term leaves most superblocks with zero bounds.
    std::size_t const num_docs = 400;
    std::size_t const num_queries = 50;
    std::size_t const k = 10;
    std::uint32_t const b = 2;
    std::uint32_t const c = 1;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> any_doc(0, num_docs - 1);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::vector<std::vector<raw_entry>> raw(num_docs);
    std::vector<std::string> ids;
    for (std::size_t d = 0; d < num_docs; ++d) {
        raw[d].push_back({static_cast<term_id>(1000 + d % 100), weight(rng)});
        ids.push_back("d" + std::to_string(d));
    }
    auto place = [&](term_id t, std::size_t copies) {
        std::set<std::size_t> chosen;
        while (chosen.size() < copies) {
            chosen.insert(any_doc(rng));
        }
        for (auto d : chosen) {
            raw[d].push_back({t, weight(rng)});
        }
    };
    std::vector<query_vector> queries;
    for (std::size_t i = 0; i < num_queries; ++i) {
        auto heavy = static_cast<term_id>(i);
        auto light = static_cast<term_id>(100 + i);
        place(heavy, 2);
        place(light, 20);
        queries.push_back(query_vector({{heavy, 100}, {light, 1}}));
    }
    auto corpus = make_collection(ids, raw);
    build_options opts;
    opts.block_size = b;
    opts.blocks_per_superblock = c;
    opts.with_avg = true;
    auto idx = build_index(corpus, opts);
    auto source = oracle::source_of(corpus, idx);
    searcher s(idx);

    std::size_t const gamma = (k + b * c - 1) / (b * c);
    std::size_t sp_short = 0;
    std::size_t sp_empty = 0;
    std::size_t sp_lost_positive = 0;
    std::size_t lsp0_wrong = 0;
    for (auto const& q : queries) {
        auto expected = oracle::brute_force(corpus, q, k);
        auto sp = run_query(s, source, q,
                            {.k = k, .gamma = 0, .mu = 0.1, .eta = 1.0, .beta = 0.5, .variant = lsp_variant::lsp2});
        sp_short += sp.scores.size() < k ? 1 : 0;
        sp_empty += sp.scores.empty() ? 1 : 0;
        sp_lost_positive += oracle::overlap(expected, sp.sources) < k ? 1 : 0;
        for (double beta : {0.5, 1.0}) {
            auto safe = run_query(s, source, q, {.k = k, .gamma = gamma, .beta = beta, .variant = lsp_variant::lsp0});
            lsp0_wrong += safe.scores.size() == k ? 0 : 1;
        }
    }
    return {sp_short >= 1 && lsp0_wrong == 0,
            format("SP short on %zu/%zu queries (%zu empty, %zu missing positive top-k docs); "
                   "LSP/0 gamma=%zu wrong count on %zu runs",
                   sp_short, num_queries, sp_empty, sp_lost_positive, gamma, lsp0_wrong)};
}

outcome gamma_mu_monotonicity()
{
    auto const& f = base();
    auto idx = build_index(f.corpus, build_options{});
    auto source = oracle::source_of(f.corpus, idx);
    searcher s(idx);
    std::size_t const n = idx.num_superblocks();
    std::size_t violations = 0;
    std::size_t sequences = 0;
    auto check = [&](std::vector<ranked> const& runs, oracle::top_k const& expected, std::size_t k) {
        ++sequences;
        for (std::size_t i = 1; i < runs.size(); ++i) {
            bool score_drop = kth_score(runs[i], k) < kth_score(runs[i - 1], k);
            bool recall_drop = oracle::overlap(expected, runs[i].sources) < oracle::overlap(expected, runs[i - 1].sources);
            violations += score_drop || recall_drop ? 1 : 0;
        }
    };
    for (auto const& q : f.queries) {
        auto scores = oracle::all_scores(f.corpus, q.vector);
        for (std::size_t k : {10U, 100U, 1000U}) {
            auto expected = oracle::select(scores, k);
            std::vector<ranked> by_gamma;
            for (std::size_t gamma : {std::size_t{1}, std::size_t{10}, std::size_t{50}, std::size_t{100}, n}) {
                by_gamma.push_back(run_query(s, source, q.vector,
                                             {.k = k, .gamma = gamma, .eta = 1.0, .variant = lsp_variant::lsp0}));
            }
            check(by_gamma, expected, k);
            std::vector<ranked> by_mu;
            for (double mu : {0.2, 0.5, 1.0}) {
                by_mu.push_back(run_query(s, source, q.vector,
                                          {.k = k, .gamma = 10, .mu = mu, .eta = 1.0, .variant = lsp_variant::lsp1}));
            }
            check(by_mu, expected, k);
        }
    }
    return {violations == 0, format("%zu sweeps over %zu superblocks, %zu violations", sequences, n, violations)};
}

outcome codec_correctness()
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> length(1, 5000);
    std::uniform_int_distribution<int> width(0, 16);
    std::size_t const lists = 10000;
    std::size_t round_trip_failures = 0;
    std::size_t group_failures = 0;
    std::size_t size_failures = 0;
    std::size_t groups_checked = 0;
    std::vector<std::uint16_t> values;
    for (std::size_t i = 0; i < lists; ++i) {
        std::size_t n = length(rng);
        values.assign(n, 0);
        int mode = static_cast<int>(i % 4);
        int fixed = width(rng);
        for (std::size_t g = 0; g * packed_group_size < n; ++g) {
            int w = mode == 2 ? width(rng) : fixed;
            std::uint32_t top = w == 0 ? 0 : (std::uint32_t{1} << w) - 1;
            std::uniform_int_distribution<std::uint32_t> v(0, top);
            for (std::size_t j = g * packed_group_size; j < std::min(n, (g + 1) * packed_group_size); ++j) {
                values[j] = static_cast<std::uint16_t>(mode == 0 ? 0 : mode == 1 ? top : v(rng));
            }
        }
        auto list = encode_list(std::span<std::uint16_t const>(values));
        // sequential decode pads the final group with zeros
        auto all = decode_all(list);
        bool round_trip = list.size() == n && all.size() == list.num_groups() * packed_group_size &&
                          std::equal(values.begin(), values.end(), all.begin()) &&
                          std::all_of(all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                                      [](std::uint16_t v) { return v == 0; });
        round_trip_failures += round_trip ? 0 : 1;

        std::uint64_t expected_bits = 0;
        for (std::size_t g = 0; g < list.num_groups(); ++g) {
            std::size_t first = g * packed_group_size;
            std::size_t last = std::min(n, first + packed_group_size);
            auto decoded = decode_group(list, g);
            std::uint16_t group_max = 0;
            bool same = true;
            for (std::size_t j = first; j < last; ++j) {
                same = same && decoded[j - first] == values[j];
                group_max = std::max(group_max, values[j]);
            }
            ++groups_checked;
            group_failures += same ? 0 : 1;
            expected_bits += packed_group_size * static_cast<std::uint64_t>(std::bit_width(group_max));
        }
        size_failures += list.payload_bytes() * 8 == expected_bits ? 0 : 1;
    }
    return {round_trip_failures == 0 && group_failures == 0 && size_failures == 0,
            format("%zu lists, %zu groups; round-trip failures %zu, group failures %zu, size failures %zu", lists,
                   groups_checked, round_trip_failures, group_failures, size_failures)};
}

outcome bound_safety()
{
    auto const& f = base();
    build_options opts;
    opts.bits_block = 4;
    opts.bits_superblock = 4;
    auto idx = build_index(f.corpus, opts);
    auto const& store = idx.superblock_max();
    std::uint64_t const step = 255 / ((1U << 4) - 1);
    std::vector<std::size_t> internal_of(idx.num_docs());
    auto source = oracle::source_of(f.corpus, idx);
    for (std::size_t i = 0; i < source.size(); ++i) {
        internal_of[source[i]] = i;
    }
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick_query(0, f.queries.size() - 1);
    std::size_t const pairs = 1000;
    std::size_t violations = 0;
    std::size_t positive = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
        auto const& q = f.queries[pick_query(rng)].vector;
        auto scores = oracle::all_scores(f.corpus, q);
        // Prefer a matching document so the comparison is not trivially against zero.
        std::vector<std::size_t> matching;
        for (std::size_t d = 0; d < scores.size(); ++d) {
            if (scores[d] > 0) {
                matching.push_back(d);
            }
        }
        std::size_t doc = 0;
        if (matching.empty()) {
            doc = std::uniform_int_distribution<std::size_t>(0, scores.size() - 1)(rng);
        } else {
            doc = matching[std::uniform_int_distribution<std::size_t>(0, matching.size() - 1)(rng)];
        }
        positive += scores[doc] > 0 ? 1 : 0;
        std::size_t sb = internal_of[doc] / (idx.block_size() * idx.blocks_per_superblock());
        std::uint64_t bound = 0;
        for (auto const& e : q) {
            if (store.has_term(e.term)) {
                bound += std::uint64_t{e.weight} * store.value(e.term, sb) * step;
            }
        }
        double library_bound = bound_value(accumulate_bounds(q, store)[sb], 4);
        violations += bound >= scores[doc] && library_bound >= static_cast<double>(scores[doc]) ? 0 : 1;
    }
    return {violations == 0, format("%zu pairs (%zu with positive score), %zu violations", pairs, positive, violations)};
}

outcome order_statistics()
{
    std::size_t const n = 100;
    std::array<std::size_t, 3> const ranks{1, 5, 10};
    std::array<double, 2> const xs{0.9, 0.99};
    std::array<std::array<std::size_t, 2>, 3> below{};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> draw(n);
    for (std::size_t t = 0; t < monte_carlo_trials; ++t) {
        for (auto& x : draw) {
            x = u(rng);
        }
        std::nth_element(draw.begin(), draw.begin() + 9, draw.end(), std::greater<>());
        std::sort(draw.begin(), draw.begin() + 10, std::greater<>());
        for (std::size_t r = 0; r < ranks.size(); ++r) {
            for (std::size_t j = 0; j < xs.size(); ++j) {
                below[r][j] += draw[ranks[r] - 1] <= xs[j] ? 1 : 0;
            }
        }
    }
    double worst = 0;
    for (std::size_t r = 0; r < ranks.size(); ++r) {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            double mc = static_cast<double>(below[r][j]) / static_cast<double>(monte_carlo_trials);
            worst = std::max(worst, std::abs(order_stat_cdf(n, ranks[r], xs[j]) - mc));
        }
    }

    // Models are fitted on a large training query set.
    auto const& f = base();
    corpus_options opts;
    opts.num_docs = 10000;
    opts.avg_terms = 40;
    opts.vocab_size = 5000;
    query_options qo;
    qo.num_queries = planner_training_queries;
    qo.seed = 11;
    auto training = synthetic_generator(opts).queries(qo);
    std::size_t models = 0;
    std::size_t increases = 0;
    double largest = 0;
    std::string where;
    for (std::uint32_t b : {4U, 8U, 16U}) {
        for (auto strategy : {block_strategy::input_order, block_strategy::kmeans_lite}) {
            build_options bo;
            bo.block_size = b;
            bo.blocks_per_superblock = 16;
            bo.strategy = strategy;
            auto idx = build_index(f.corpus, bo);
            for (std::size_t k : {10U, 1000U}) {
                auto model = bin_model::fit(collect_samples(idx, training, k), 100);
                ++models;
                double last = 1.0;
                std::size_t here = 0;
                for (std::size_t g = 1; g <= model.num_superblocks(); ++g) {
                    double p = relevance_probability(model, g);
                    if (p > last + monotone_slack) {
                        ++here;
                        largest = std::max(largest, p - last);
                    }
                    last = p;
                }
                increases += here;
                if (here > 0) {
                    where += format(" b=%u %s k=%zu: %zu;", b, to_string(strategy), k, here);
                }
            }
        }
    }
    return {worst <= monte_carlo_tolerance && increases == 0,
            format("max |cdf - MC| = %.5f over %zu trials (tolerance %.2f); %zu fitted models, %zu increases in "
                   "P_gamma(R), largest %.3g",
                   worst, monte_carlo_trials, monte_carlo_tolerance, models, increases, largest) +
                where};
}

outcome format_equivalence()
{
    auto const& f = base();
    std::mt19937_64 rng(77);
    std::size_t const blocks = 1000;
    std::size_t score_mismatches = 0;
    std::size_t size_failures = 0;
    std::string sizes;
    std::vector<std::uint32_t> const block_sizes{4, 8, 16};
    std::vector<std::array<doc_index, 3>> built;
    std::vector<index_layout> layouts;
    for (auto b : block_sizes) {
        auto layout = assign_blocks(f.corpus.docs, b, 16, block_strategy::kmeans_lite);
        std::array<doc_index, 3> formats{build_doc_index(f.corpus.docs, layout, doc_format::compact_inv),
                                         build_doc_index(f.corpus.docs, layout, doc_format::flat_inv),
                                         build_doc_index(f.corpus.docs, layout, doc_format::fwd)};
        std::array<std::size_t, 2> store_bytes{};
        for (int i = 0; i < 2; ++i) {
            build_options opts;
            opts.block_size = b;
            opts.blocks_per_superblock = 16;
            opts.bits_block = i == 0 ? 4 : 8;
            opts.bits_superblock = opts.bits_block;
            auto idx = build_index(f.corpus, layout, opts);
            store_bytes[i] = idx.block_max().serialized_bytes() + idx.superblock_max().serialized_bytes();
        }
        auto compact = formats[0].serialized_bytes();
        auto flat = formats[1].serialized_bytes();
        size_failures += flat <= compact ? 0 : 1;
        size_failures += store_bytes[0] <= store_bytes[1] ? 0 : 1;
        sizes += format(" b=%u flat/compact %zu/%zu bound4/bound8 %zu/%zu;", b, flat, compact, store_bytes[0],
                        store_bytes[1]);
        built.push_back(std::move(formats));
        layouts.push_back(std::move(layout));
    }
    std::uniform_int_distribution<std::size_t> pick_b(0, block_sizes.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_query(0, f.queries.size() - 1);
    for (std::size_t i = 0; i < blocks; ++i) {
        std::size_t which = pick_b(rng);
        auto const& layout = layouts[which];
        std::size_t blk = std::uniform_int_distribution<std::size_t>(0, layout.num_blocks() - 1)(rng);
        auto const& q = f.queries[pick_query(rng)].vector;
        auto reference = built[which][0].score_block(blk, q);
        bool same = built[which][1].score_block(blk, q) == reference && built[which][2].score_block(blk, q) == reference;
        auto [first, last] = layout.block_docs(blk);
        for (std::size_t s = 0; s < reference.size(); ++s) {
            std::uint64_t expect = first + s < last ? oracle::dot(q, f.corpus.docs[layout.order()[first + s]]) : 0;
            same = same && reference[s] == expect;
        }
        score_mismatches += same ? 0 : 1;
    }
    sizes.pop_back();
    return {score_mismatches == 0 && size_failures == 0,
            format("%zu blocks, %zu score mismatches, %zu size-order failures;", blocks, score_mismatches,
                   size_failures) + sizes};
}

outcome preserved_recall()
{
    auto start = clock_type::now();
    corpus_options opts;
    opts.num_docs = 50000;
    opts.vocab_size = 5000;
    opts.avg_terms = 40;
    opts.num_topics = 200;
    opts.seed = 8;
    synthetic_generator gen(opts);
    auto corpus = gen.corpus();
    query_options qo;
    qo.num_queries = 200;
    qo.seed = 9;
    auto queries = gen.queries(qo);
    build_options bo;
    bo.block_size = 4;
    bo.blocks_per_superblock = 8;
    bo.strategy = block_strategy::kmeans_lite;
    auto idx = build_index(corpus, bo);
    searcher s(idx);
    std::size_t const k = 1000;
    run safe_run;
    run approx_run;
    qrels judged;
    for (auto const& q : queries) {
        auto safe = s.search(q.vector, {.k = k, .variant = lsp_variant::lsp0});
        auto approx = s.search(q.vector, {.k = k, .gamma = 1000, .mu = 0.5, .eta = 1.0, .variant = lsp_variant::lsp1});
        std::ostringstream safe_text;
        std::ostringstream approx_text;
        write_run(safe_text, q.id, safe, idx.doc_ids(), "safe");
        write_run(approx_text, q.id, approx, idx.doc_ids(), "lsp1");
        std::istringstream sin(safe_text.str());
        std::istringstream ain(approx_text.str());
        safe_run.merge(read_run(sin));
        approx_run.merge(read_run(ain));
        for (auto const& h : safe) {
            judged[q.id][idx.doc_ids()[h.doc]] = 1;
        }
    }
    auto m = evaluate(approx_run, judged, k, &safe_run);
    double value = m.preserved_recall.value_or(0.0);
    return {value >= preserved_recall_floor,
            format("preserved recall %.4f (floor %.2f) over %zu queries, %zu superblocks, %.1f s", value,
                   preserved_recall_floor, m.queries, idx.num_superblocks(), seconds_since(start))};
}

outcome completeness()
{
    std::mt19937_64 rng(31337);
    std::size_t const corpora = 50;
    std::size_t const queries_per_corpus = 10;
    std::size_t shortfalls = 0;
    std::size_t duplicates = 0;
    std::size_t runs = 0;
    constexpr doc_format formats[] = {doc_format::compact_inv, doc_format::flat_inv, doc_format::fwd};
    for (std::size_t t = 0; t < corpora; ++t) {
        corpus_options opts;
        opts.num_docs = std::uniform_int_distribution<std::size_t>(20, 800)(rng);
        opts.vocab_size = std::uniform_int_distribution<std::size_t>(30, 400)(rng);
        opts.avg_terms = std::uniform_real_distribution<double>(1, 12)(rng);
        opts.num_topics = t % 2 == 0 ? 0 : 5;
        opts.seed = rng();
        synthetic_generator gen(opts);
        auto corpus = gen.corpus();
        query_options qo;
        qo.num_queries = queries_per_corpus;
        qo.avg_terms = std::uniform_real_distribution<double>(1, 8)(rng);
        qo.seed = rng();
        auto queries = gen.queries(qo);
        build_options bo;
        bo.block_size = std::uniform_int_distribution<std::uint32_t>(2, 16)(rng);
        bo.blocks_per_superblock = std::uniform_int_distribution<std::uint32_t>(1, 8)(rng);
        bo.format = formats[t % 3];
        bo.bits_block = t % 2 == 0 ? 4 : 8;
        bo.bits_superblock = t % 4 < 2 ? 4 : 8;
        bo.strategy = t % 3 == 0 ? block_strategy::kmeans_lite : block_strategy::random;
        auto idx = build_index(corpus, bo);
        searcher s(idx);
        std::size_t const slots = std::size_t{bo.block_size} * bo.blocks_per_superblock;
        for (auto const& q : queries) {
            std::size_t k = std::uniform_int_distribution<std::size_t>(1, corpus.docs.size())(rng);
            std::size_t gamma = (k + slots - 1) / slots + std::uniform_int_distribution<std::size_t>(0, 2)(rng);
            double mu = std::array{0.2, 0.5, 1.0}[std::uniform_int_distribution<int>(0, 2)(rng)];
            double eta = std::uniform_real_distribution<double>(mu, 1.0)(rng);
            double beta = std::array{0.5, 1.0}[std::uniform_int_distribution<int>(0, 1)(rng)];
            auto hits = s.search(q.vector,
                                 {.k = k, .gamma = gamma, .mu = mu, .eta = eta, .beta = beta, .variant = lsp_variant::lsp0});
            ++runs;
            shortfalls += hits.size() == std::min(k, corpus.docs.size()) ? 0 : 1;
            std::set<std::uint32_t> distinct;
            for (auto const& h : hits) {
                distinct.insert(h.doc);
            }
            duplicates += distinct.size() == hits.size() ? 0 : 1;
        }
    }
    return {shortfalls == 0 && duplicates == 0,
            format("%zu queries over %zu corpora, %zu shortfalls, %zu duplicate results", runs, corpora, shortfalls,
                   duplicates)};
}

}  // namespace

int main()
{
    std::vector<std::pair<char const*, std::function<outcome()>>> const criteria{
        {"safe-mode oracle equivalence", safe_equivalence},
        {"erroneous pruning reproduction", erroneous_pruning},
        {"gamma and mu monotonicity", gamma_mu_monotonicity},
        {"codec correctness", codec_correctness},
        {"bound safety under 4-bit quantization", bound_safety},
        {"order-statistic engine", order_statistics},
        {"format equivalence and size ordering", format_equivalence},
        {"preserved recall plausibility", preserved_recall},
        {"completeness guarantee", completeness},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        outcome o;
        try {
            o = criteria[i].second();
        } catch (std::exception const& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): "
                  << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
