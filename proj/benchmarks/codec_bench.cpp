#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lsp/packed_list.hpp"

using namespace lsp;

namespace {

packed_list random_list(std::size_t n, int width)
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint32_t> v(0, width == 0 ? 0 : (1U << width) - 1);
    std::vector<std::uint16_t> values(n);
    for (auto& x : values) {
        x = static_cast<std::uint16_t>(v(rng));
    }
    return encode_list(std::span<std::uint16_t const>(values));
}

void BM_DecodeGroup(benchmark::State& state)
{
    auto list = random_list(1 << 16, static_cast<int>(state.range(0)));
    decoded_group out;
    std::size_t g = 0;
    for (auto _ : state) {
        decode_group(list, g, out);
        benchmark::DoNotOptimize(out.data());
        g = (g + 7) % list.num_groups();
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * packed_group_size);
}
BENCHMARK(BM_DecodeGroup)->Arg(1)->Arg(4)->Arg(8)->Arg(16);

void BM_DecodeAll(benchmark::State& state)
{
    auto list = random_list(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) {
        auto v = decode_all(list);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_DecodeAll)->Arg(4096)->Arg(1 << 18);

void BM_Encode(benchmark::State& state)
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::uint32_t> v(0, 15);
    std::vector<std::uint16_t> values(1 << 16);
    for (auto& x : values) {
        x = static_cast<std::uint16_t>(v(rng));
    }
    for (auto _ : state) {
        auto list = encode_list(std::span<std::uint16_t const>(values));
        benchmark::DoNotOptimize(list.payload().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * (1 << 16));
}
BENCHMARK(BM_Encode);

}  // namespace

BENCHMARK_MAIN();
