// Serial reference vs OpenMP kernels on one node-wise design.
#include <benchmark/benchmark.h>

#include <numeric>

#include "tising/design.hpp"
#include "tising/generators.hpp"
#include "tising/kernels.hpp"
#include "tising/sampler.hpp"

using namespace tising;

namespace {

struct Fixture {
    SampleMatrix samples;
    NodeDesign design;
    FeatureMatrix z;
    std::vector<double> theta, w;
    std::vector<int> all;

    Fixture(int p, int n)
        : samples(make_samples(p, n)), design(p, 3, 0), z(samples, design), theta(design.size()), w(n),
          all(design.size()) {
        std::iota(all.begin(), all.end(), 0);
        Rng rng(7);
        for (auto& t : theta) t = rng.uniform() - 0.5;
        for (auto& x : w) x = rng.uniform() - 0.5;
    }

    static SampleMatrix make_samples(int p, int n) {
        const auto t = assign_coefficients(regular_hypergraph(p, 3, 3, 1));
        GibbsConfig g;
        g.burn_in_sweeps = 50;
        g.spacing_sweeps = 1;
        g.seed = 2;
        return draw_samples(t, n, g);
    }
};

const Fixture& fixture() {
    static const Fixture f(48, 4000);
    return f;
}

template <bool Parallel>
void BM_Margins(benchmark::State& state) {
    const auto& f = fixture();
    std::vector<double> out(f.z.rows());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::margins(f.z, f.theta, f.all, out);
        else kernels::serial::margins(f.z, f.theta, f.all, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_Gradient(benchmark::State& state) {
    const auto& f = fixture();
    std::vector<double> out(f.z.cols());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::gradient(f.z, f.w, out);
        else kernels::serial::gradient(f.z, f.w, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_Loss(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        double v = Parallel ? kernels::parallel::logistic_loss(f.w, f.z.labels())
                            : kernels::serial::logistic_loss(f.w, f.z.labels());
        benchmark::DoNotOptimize(v);
    }
}

template <bool Parallel>
void BM_WeightedCross(benchmark::State& state) {
    const auto& f = fixture();
    std::vector<int> rows(f.all.begin(), f.all.begin() + 64);
    std::vector<int> cols(f.all.begin(), f.all.begin() + 8);
    std::vector<double> out(rows.size() * cols.size());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::weighted_cross(f.z, f.w, rows, cols, out);
        else kernels::serial::weighted_cross(f.z, f.w, rows, cols, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_StateHamiltonians(benchmark::State& state) {
    const auto t = assign_coefficients(regular_hypergraph(18, 3, 3, 3));
    std::vector<double> out(std::size_t{1} << t.p());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::state_hamiltonians(t, out);
        else kernels::serial::state_hamiltonians(t, out);
        benchmark::DoNotOptimize(out.data());
    }
}

} // namespace

BENCHMARK(BM_Margins<false>)->Name("margins/serial");
BENCHMARK(BM_Margins<true>)->Name("margins/omp");
BENCHMARK(BM_Gradient<false>)->Name("gradient/serial");
BENCHMARK(BM_Gradient<true>)->Name("gradient/omp");
BENCHMARK(BM_Loss<false>)->Name("logistic_loss/serial");
BENCHMARK(BM_Loss<true>)->Name("logistic_loss/omp");
BENCHMARK(BM_WeightedCross<false>)->Name("weighted_cross/serial");
BENCHMARK(BM_WeightedCross<true>)->Name("weighted_cross/omp");
BENCHMARK(BM_StateHamiltonians<false>)->Name("state_hamiltonians/serial");
BENCHMARK(BM_StateHamiltonians<true>)->Name("state_hamiltonians/omp");

BENCHMARK_MAIN();
