#include <benchmark/benchmark.h>

#include "crb/bootstrap.hpp"
#include "crb/discovery.hpp"
#include "crb/gaussian.hpp"
#include "crb/rng.hpp"
#include "crb/scm.hpp"

namespace {

using namespace crb;

Eigen::MatrixXd random_spd(int d, std::uint64_t seed) {
    RngStream rng(seed);
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
    }
    return g * g.transpose() / d + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

void bm_udu_decompose(benchmark::State& state) {
    const Eigen::MatrixXd omega = random_spd(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(udu_decompose(omega));
    }
}
BENCHMARK(bm_udu_decompose)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void bm_sample_er_scm(benchmark::State& state) {
    const Dag dag = random_er_dag(10, 10, 2);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample(scm, static_cast<int>(state.range(0)), 4));
    }
}
BENCHMARK(bm_sample_er_scm)->Arg(500)->Arg(2000);

void bm_crb_fit(benchmark::State& state) {
    const Dag dag = random_er_dag(10, 10, 5);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 6);
    const Dataset data = sample(scm, static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(crb_fit(dag, data, RegressorSpec::ols()));
    }
}
BENCHMARK(bm_crb_fit)->Arg(500)->Arg(2000);

void bm_crb_generate(benchmark::State& state) {
    const Dag dag = random_er_dag(10, 10, 8);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 9);
    const Dataset data = sample(scm, 2000, 10);
    const CrbModel model = crb_fit(dag, data, RegressorSpec::ols());
    for (auto _ : state) {
        benchmark::DoNotOptimize(crb_generate(model, static_cast<int>(state.range(0)), 11));
    }
}
BENCHMARK(bm_crb_generate)->Arg(500)->Arg(2000)->Arg(8000);

void bm_pc(benchmark::State& state) {
    const Dag dag = random_er_dag(10, 10, 12);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 13);
    const Dataset data = sample(scm, static_cast<int>(state.range(0)), 14);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pc(data, {}));
    }
}
BENCHMARK(bm_pc)->Arg(1000)->Arg(4000);

void bm_direct_lingam(benchmark::State& state) {
    const Dag dag = random_er_dag(10, 10, 15);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::uniform(1.0), 16);
    const Dataset data = sample(scm, static_cast<int>(state.range(0)), 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(direct_lingam(data));
    }
}
BENCHMARK(bm_direct_lingam)->Arg(1000)->Arg(2000);

void bm_fit_constrained(benchmark::State& state) {
    const Dag dag = random_er_dag(static_cast<int>(state.range(0)), state.range(0), 18);
    const LinearScm scm = random_linear_scm(dag, 0.5, 2.0, NoiseSpec::gaussian(1.0), 19);
    const Dataset data = sample(scm, 1000, 20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_constrained(data, dag));
    }
}
BENCHMARK(bm_fit_constrained)->Arg(5)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
