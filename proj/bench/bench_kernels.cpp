// Serial reference kernels against their OpenMP counterparts.
//   polsar_bench --benchmark_filter=Covariance

#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "polsar/covariance.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/eval.hpp"
#include "polsar/parallel.hpp"
#include "polsar/reference.hpp"
#include "polsar/simulate.hpp"
#include "polsar/wishart.hpp"

using namespace polsar;

namespace {

const Scene& scene(std::size_t n) {
    static std::map<std::size_t, Scene> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        SceneSpec s;
        s.height = s.width = n;
        s.classes = default_presets();
        s.seed = 1;
        it = cache.emplace(n, generate_scene(s)).first;
    }
    return it->second;
}

// Threads of the OpenMP variant come from the second range argument.
void threads_from(benchmark::State& state) { set_thread_count(int(state.range(1))); }

void BM_CovarianceReference(benchmark::State& state) {
    const auto& slc = scene(std::size_t(state.range(0))).slc;
    for (auto _ : state) benchmark::DoNotOptimize(reference::covariance(slc, 7, Basis::pauli));
    state.SetItemsProcessed(state.iterations() * std::int64_t(slc.hh.size()));
}

void BM_CovarianceOpenMP(benchmark::State& state) {
    threads_from(state);
    const auto& slc = scene(std::size_t(state.range(0))).slc;
    for (auto _ : state) benchmark::DoNotOptimize(compute_covariance(slc, 7, Basis::pauli));
    state.SetItemsProcessed(state.iterations() * std::int64_t(slc.hh.size()));
}

void BM_HAlphaReference(benchmark::State& state) {
    const auto cov = compute_covariance(scene(std::size_t(state.range(0))).slc, 7, Basis::pauli);
    for (auto _ : state) benchmark::DoNotOptimize(reference::h_alpha_field(cov));
    state.SetItemsProcessed(state.iterations() * std::int64_t(cov.cells.size()));
}

void BM_HAlphaOpenMP(benchmark::State& state) {
    threads_from(state);
    const auto cov = compute_covariance(scene(std::size_t(state.range(0))).slc, 7, Basis::pauli);
    for (auto _ : state) benchmark::DoNotOptimize(h_alpha_field(cov));
    state.SetItemsProcessed(state.iterations() * std::int64_t(cov.cells.size()));
}

struct WishartInput {
    CovarianceField cov;
    ClassMap init;
};

WishartInput wishart_input(std::size_t n) {
    auto cov = compute_covariance(scene(n).slc, 7, Basis::pauli);
    auto init = zones_as_classes(zone_map(h_alpha_field(cov)));
    return {std::move(cov), std::move(init)};
}

void BM_WishartReference(benchmark::State& state) {
    const auto in = wishart_input(std::size_t(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::wishart_iterate(in.cov, in.init, {5, 1e-9}));
    state.SetItemsProcessed(state.iterations() * 5 * std::int64_t(in.cov.cells.size()));
}

void BM_WishartOpenMP(benchmark::State& state) {
    threads_from(state);
    const auto in = wishart_input(std::size_t(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wishart_iterate(in.cov, in.init, {5, 1e-9}));
    state.SetItemsProcessed(state.iterations() * 5 * std::int64_t(in.cov.cells.size()));
}

void BM_ConfusionReference(benchmark::State& state) {
    const auto& truth = scene(std::size_t(state.range(0))).truth;
    ClassMap pred = truth;
    std::mt19937_64 gen(3);
    for (auto& l : pred.labels.values()) l = std::uint8_t(gen() % 5);
    for (auto _ : state) benchmark::DoNotOptimize(reference::confusion(pred, truth));
    state.SetItemsProcessed(state.iterations() * std::int64_t(truth.labels.size()));
}

void BM_ConfusionOpenMP(benchmark::State& state) {
    threads_from(state);
    const auto& truth = scene(std::size_t(state.range(0))).truth;
    ClassMap pred = truth;
    std::mt19937_64 gen(3);
    for (auto& l : pred.labels.values()) l = std::uint8_t(gen() % 5);
    for (auto _ : state) benchmark::DoNotOptimize(confusion(pred, truth));
    state.SetItemsProcessed(state.iterations() * std::int64_t(truth.labels.size()));
}

void serial_args(benchmark::internal::Benchmark* b) {
    for (long n : {256, 512}) b->Args({n});
    b->Unit(benchmark::kMillisecond);
}

void parallel_args(benchmark::internal::Benchmark* b) {
    for (long n : {256, 512}) {
        for (long t : {1, 2, 4, 8}) b->Args({n, t});
    }
    b->ArgNames({"n", "threads"})->Unit(benchmark::kMillisecond)->UseRealTime();
}

} // namespace

BENCHMARK(BM_CovarianceReference)->Apply(serial_args);
BENCHMARK(BM_CovarianceOpenMP)->Apply(parallel_args);
BENCHMARK(BM_HAlphaReference)->Apply(serial_args);
BENCHMARK(BM_HAlphaOpenMP)->Apply(parallel_args);
BENCHMARK(BM_WishartReference)->Apply(serial_args);
BENCHMARK(BM_WishartOpenMP)->Apply(parallel_args);
BENCHMARK(BM_ConfusionReference)->Apply(serial_args);
BENCHMARK(BM_ConfusionOpenMP)->Apply(parallel_args);

BENCHMARK_MAIN();
