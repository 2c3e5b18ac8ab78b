// Serial reference vs OpenMP kernels.
#include "qstab/kernels.hpp"
#include "qstab/problems.hpp"
#include "qstab/sdp.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace qstab;

namespace {

struct SchurFixture {
  std::vector<SymMatrix> A;
  std::vector<kernels::SparseSym> As;
  Matrix X, Zinv;
};

// Constraint matrices of an actual relaxation, with random positive definite iterates.
SchurFixture make_fixture(Index vertices) {
  GraphSpec g;
  g.vertices = vertices;
  for (Index i = 0; i < vertices; ++i)
    for (Index j = i + 1; j < vertices; ++j) g.edges.push_back({i, j});
  ParametricProblem fam = rotation_sync(g, 3);
  SDPProblem sdp = build_relaxation(fam.instantiate(fam.ground_truth(7).theta));
  SchurFixture f;
  f.A = sdp.A;
  for (const auto& a : f.A) f.As.push_back(kernels::to_sparse(a));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  const Index n = sdp.N();
  Matrix B(n, n), C(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      B(i, j) = nd(rng);
      C(i, j) = nd(rng);
    }
  f.X = B * B.transpose() + Matrix::Identity(n, n);
  f.Zinv = C * C.transpose() + Matrix::Identity(n, n);
  return f;
}

void BM_SchurSerial(benchmark::State& st) {
  SchurFixture f = make_fixture(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::schur_complement_serial(f.A, f.X, f.Zinv));
  st.counters["m"] = static_cast<double>(f.A.size());
}

void BM_SchurParallel(benchmark::State& st) {
  SchurFixture f = make_fixture(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::schur_complement_parallel(f.As, f.X, f.Zinv, static_cast<int>(st.range(1))));
  st.counters["m"] = static_cast<double>(f.A.size());
}

// Grid map: one small certification per task.
void run_grid(benchmark::State& st, bool parallel) {
  ParametricProblem fam = twisted_cubic();
  const Index count = st.range(0);
  std::vector<double> out(count);
  auto body = [&](Index i) {
    const double t = -1.0 + 2.0 * i / (count - 1);
    Vector th(3);
    th << t, t * t, 0.5;
    out[i] = solve_sdp(build_relaxation(fam.instantiate(th))).dval;
  };
  for (auto _ : st) {
    if (parallel)
      kernels::for_each_parallel(count, body, static_cast<int>(st.range(1)));
    else
      kernels::for_each_serial(count, body);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_GridSerial(benchmark::State& st) { run_grid(st, false); }
void BM_GridParallel(benchmark::State& st) { run_grid(st, true); }

}  // namespace

BENCHMARK(BM_SchurSerial)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)->Args({4, 4})->Args({6, 4})->Args({8, 4})->Args({8, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Args({64, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
