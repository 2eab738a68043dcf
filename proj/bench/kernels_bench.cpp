// Serial reference vs OpenMP backend on a 3D ball: stencil, reduction and a
// full preconditioned solve.

#include <benchmark/benchmark.h>

#include <vector>

#include "lanemden/kernels.hpp"
#include "lanemden/lattice.hpp"
#include "lanemden/linear_solver.hpp"

using namespace lanemden;
using kernels::Backend;

namespace {

struct Setup {
  DomainPtr dom;
  std::vector<double> x, y;
  explicit Setup(double R) : dom(TruncatedDomain::make(DomainKind::Whole, 3, R)) {
    const auto& g = dom->grid();
    x.assign(static_cast<std::size_t>(g.size), 0.0);
    y.assign(x.size(), 0.0);
    for (const auto& run : g.runs) {
      for (std::int64_t i = run.start; i < run.start + run.length; ++i) x[static_cast<std::size_t>(i)] = 1.0 / (1 + i % 7);
    }
  }
};

Backend backend_of(const benchmark::State& st) { return st.range(1) == 0 ? Backend::Serial : Backend::Parallel; }

void BM_NegLaplacian(benchmark::State& st) {
  Setup s(static_cast<double>(st.range(0)));
  const auto be = backend_of(st);
  for (auto _ : st) {
    kernels::neg_laplacian(be, s.dom->grid(), 1.0, s.x, s.y);
    benchmark::DoNotOptimize(s.y.data());
  }
  st.SetItemsProcessed(st.iterations() * s.dom->interior_count());
}

void BM_Dot(benchmark::State& st) {
  Setup s(static_cast<double>(st.range(0)));
  const auto be = backend_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dot(be, s.dom->grid(), s.x, s.x));
  st.SetItemsProcessed(st.iterations() * s.dom->interior_count());
}

void BM_Solve(benchmark::State& st) {
  const auto dom = TruncatedDomain::make(DomainKind::Whole, 3, static_cast<double>(st.range(0)));
  LinearSolverOptions opt;
  opt.backend = backend_of(st);
  DirichletSolver solver(dom, opt);
  const auto f = delta_field(dom, LatticePoint::origin(3));
  for (auto _ : st) {
    auto u = solver.solve(f);
    benchmark::DoNotOptimize(u.data().data());
  }
}

}  // namespace

BENCHMARK(BM_NegLaplacian)->ArgsProduct({{20, 40, 80}, {0, 1}})->ArgNames({"R", "parallel"});
BENCHMARK(BM_Dot)->ArgsProduct({{20, 40, 80}, {0, 1}})->ArgNames({"R", "parallel"});
BENCHMARK(BM_Solve)->ArgsProduct({{20, 40}, {0, 1}})->ArgNames({"R", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
