#include "tclab/data_io.hpp"
#include "tclab/decompositions.hpp"
#include "tclab/linalg.hpp"
#include "tclab/metrics.hpp"
#include "tclab/models.hpp"
#include "tclab/random.hpp"

#include <benchmark/benchmark.h>

using namespace tclab;

namespace {

void BM_ModeProduct(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const Tensor t = rng.gaussian(Shape{n, n, n});
    const Matrix u = rng.gaussian(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(mode_n_product(t, 1, u));
}
BENCHMARK(BM_ModeProduct)->Arg(12)->Arg(30)->Arg(60);

void BM_Unfold(benchmark::State& state) {
    Rng rng(1);
    const Tensor t = rng.gaussian(Shape{30, 30, 30});
    for (auto _ : state) benchmark::DoNotOptimize(mode_n_unfold(t, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Unfold)->DenseRange(0, 2);

void BM_Svd(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    const Matrix m = rng.gaussian(rows, rows * rows);
    for (auto _ : state) benchmark::DoNotOptimize(singular_values(m));
}
BENCHMARK(BM_Svd)->Arg(12)->Arg(30);

void BM_Hosvd(benchmark::State& state) {
    const Tensor t = gen_low_tucker_rank(Shape{30, 30, 30}, std::vector<std::size_t>{6, 6, 6}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(tucker_mode_sigmas(t));
}
BENCHMARK(BM_Hosvd);

void BM_TtSvd(benchmark::State& state) {
    const Tensor t = gen_low_tt_rank(Shape{12, 12, 12, 12}, std::vector<std::size_t>{1, 6, 6, 6, 1}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(tt_svd(t));
}
BENCHMARK(BM_TtSvd);

// One training step's worth of work: forward, residual and gradient.
void BM_TuckerEvaluate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Shape s{30, 30, 30};
    const std::vector<std::size_t> depth(3, d);
    const Tensor truth = gen_low_tucker_rank(s, std::vector<std::size_t>{6, 6, 6}, 1);
    const auto obs = ObservationSet::from_tensor(truth, sample_mask(s, 2750, 1));
    const auto m = tucker_uf_init(s, depth, {0.025, 1});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(m, obs));
}
BENCHMARK(BM_TuckerEvaluate)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_TtEvaluate(benchmark::State& state) {
    const Shape s{12, 12, 12, 12};
    const Tensor truth = gen_low_tt_rank(s, std::vector<std::size_t>{1, 6, 6, 6, 1}, 1);
    const auto obs = ObservationSet::from_tensor(truth, sample_mask(s, 4000, 1));
    const auto m = tt_uf_init(s, {0.05, 1});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(m, obs));
}
BENCHMARK(BM_TtEvaluate)->Unit(benchmark::kMicrosecond);

void BM_Observe(benchmark::State& state) {
    const Tensor truth = gen_low_tucker_rank(Shape{30, 30, 30}, std::vector<std::size_t>{6, 6, 6}, 1);
    const std::vector<std::size_t> ranks{6, 6, 6};
    for (auto _ : state) benchmark::DoNotOptimize(observe(truth, SpectrumKind::tucker, 0, 0.0, &truth, &ranks));
}
BENCHMARK(BM_Observe)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
