#include "memeconf/dataset.hpp"
#include "memeconf/hamming_index.hpp"
#include "memeconf/phash.hpp"
#include "memeconf/rng.hpp"
#include "memeconf/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace memeconf;

namespace {

std::vector<GrayImage> images(std::size_t n)
{
    std::vector<GrayImage> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(synthetic_image(i, 64));
    return out;
}

// Clustered hashes so radius queries return real work.
std::vector<HashEntry> hashes(std::size_t n)
{
    Rng rng(7);
    std::vector<std::uint64_t> centers(n / 4 + 1);
    for (auto& c : centers)
        c = rng.next();
    std::vector<HashEntry> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto bits = centers[rng.below(centers.size())];
        for (auto f = rng.below(8); f > 0; --f)
            bits ^= std::uint64_t{1} << rng.below(64);
        out.push_back({i, PerceptualHash{bits}});
    }
    return out;
}

std::vector<MemeRecord> memes(std::size_t n)
{
    std::vector<MemeRecord> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({i, "", "", static_cast<int>(i % 2), Split::test});
    return out;
}

void BM_hash_images(benchmark::State& state)
{
    const auto in = images(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(hash_images(in));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_hash_images_serial(benchmark::State& state)
{
    const auto in = images(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(hash_images_serial(in));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_radius_pairs(benchmark::State& state)
{
    const auto in = hashes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(radius_pairs(in, 10));
}

void BM_radius_pairs_serial(benchmark::State& state)
{
    const auto in = hashes(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(radius_pairs_serial(in, 10));
}

std::vector<SimulationJob> jobs(int n)
{
    std::vector<SimulationJob> out;
    for (int m = 0; m < n; ++m)
        out.push_back({m, nullptr});
    return out;
}

void BM_simulate_batch(benchmark::State& state)
{
    const auto in = memes(static_cast<std::size_t>(state.range(0)));
    const auto j = jobs(20);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_batch(in, {}, SimulatorConfig{}, j));
}

void BM_simulate_batch_serial(benchmark::State& state)
{
    const auto in = memes(static_cast<std::size_t>(state.range(0)));
    const auto j = jobs(20);
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_batch_serial(in, {}, SimulatorConfig{}, j));
}

} // namespace

BENCHMARK(BM_hash_images)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hash_images_serial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radius_pairs)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_radius_pairs_serial)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_batch)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_batch_serial)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
