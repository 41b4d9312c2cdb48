#include <benchmark/benchmark.h>

#include "lsp/index.hpp"
#include "lsp/retriever.hpp"
#include "lsp/synthetic.hpp"

using namespace lsp;

namespace {

struct fixture {
    std::vector<query> queries;
    lsp::index idx;

    fixture()
    {
        corpus_options opts;
        opts.num_docs = 50000;
        opts.num_topics = 200;
        synthetic_generator gen(opts);
        query_options qo;
        qo.num_queries = 100;
        queries = gen.queries(qo);
        build_options bo;
        bo.block_size = 8;
        bo.blocks_per_superblock = 16;
        bo.strategy = block_strategy::kmeans_lite;
        bo.with_avg = true;
        idx = build_index(gen.corpus(), bo);
    }
};

fixture const& data()
{
    static fixture const f;
    return f;
}

void BM_AccumulateSuperblockBounds(benchmark::State& state)
{
    auto const& f = data();
    std::size_t i = 0;
    for (auto _ : state) {
        auto b = accumulate_bounds(f.queries[i].vector, f.idx.superblock_max());
        benchmark::DoNotOptimize(b.data());
        i = (i + 1) % f.queries.size();
    }
}
BENCHMARK(BM_AccumulateSuperblockBounds);

void run_search(benchmark::State& state, pruning_config const& cfg)
{
    auto const& f = data();
    searcher s(f.idx);
    std::size_t i = 0;
    for (auto _ : state) {
        auto hits = s.search(f.queries[i].vector, cfg);
        benchmark::DoNotOptimize(hits.data());
        i = (i + 1) % f.queries.size();
    }
}

void BM_SearchSafe(benchmark::State& state)
{
    run_search(state, {.k = static_cast<std::size_t>(state.range(0))});
}
BENCHMARK(BM_SearchSafe)->Arg(10)->Arg(1000);

void BM_SearchLsp0(benchmark::State& state)
{
    run_search(state, {.k = static_cast<std::size_t>(state.range(0)), .gamma = 250, .beta = 0.33});
}
BENCHMARK(BM_SearchLsp0)->Arg(10)->Arg(1000);

void BM_SearchLsp1(benchmark::State& state)
{
    run_search(state, {.k = static_cast<std::size_t>(state.range(0)), .gamma = 50, .mu = 0.5,
                       .variant = lsp_variant::lsp1});
}
BENCHMARK(BM_SearchLsp1)->Arg(10)->Arg(1000);

void BM_SearchLsp2(benchmark::State& state)
{
    run_search(state, {.k = static_cast<std::size_t>(state.range(0)), .gamma = 50, .mu = 0.5,
                       .variant = lsp_variant::lsp2});
}
BENCHMARK(BM_SearchLsp2)->Arg(10)->Arg(1000);

}  // namespace
