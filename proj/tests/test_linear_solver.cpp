#include <doctest.h>

#include <cmath>
#include <random>

#include "lanemden/linear_solver.hpp"
#include "oracles.hpp"

using namespace lanemden;

namespace {

LatticeField random_source(const DomainPtr& dom, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  return sample_field<double>(dom, [&](const LatticePoint&) { return U(rng); });
}

double max_diff(const LatticeField& a, const LatticeField& b) {
  double m = 0;
  for (std::int64_t i = 0; i < a.domain().box_size(); ++i) m = std::max(m, std::abs(a.at_index(i) - b.at_index(i)));
  return m;
}

}  // namespace

TEST_CASE("solver agrees with a sparse direct solve on every kind and dimension") {
  for (auto kind : {DomainKind::Whole, DomainKind::Half, DomainKind::Quadrant}) {
    for (int d = 2; d <= 4; ++d) {
      const auto dom = TruncatedDomain::make(kind, d, d == 2 ? 30 : (d == 3 ? 11 : 6));
      const auto f = random_source(dom, static_cast<unsigned>(d));
      const auto ref = oracle::direct_solve(dom, f);
      for (bool mg : {true, false}) {
        LinearSolverOptions opt;
        opt.tol = 1e-12;
        opt.multigrid = mg;
        LinearSolveReport rep;
        const auto u = DirichletSolver(dom, opt).solve(f, &rep);
        CHECK(rep.converged);
        CHECK(max_diff(u, ref) < 1e-9 * (1 + norm(ref, NormKind::Sup)));
        // zero Dirichlet data on the boundary
        double bmax = 0;
        for (const auto& x : dom->boundary_points()) bmax = std::max(bmax, std::abs(u(x)));
        CHECK(bmax == 0.0);
      }
    }
  }
}

TEST_CASE("residual report is honest") {
  const auto dom = TruncatedDomain::make(DomainKind::Whole, 3, 16);
  const auto f = delta_field(dom, LatticePoint::origin(3));
  LinearSolveReport rep;
  const auto u = DirichletSolver(dom, {.tol = 1e-11}).solve(f, &rep);
  double res = 0;
  for (const auto& x : dom->interior_points()) res = std::max(res, std::abs(-oracle::laplacian_at(u, x) - f(x)));
  CHECK(res <= rep.max_residual * (1 + 1e-6) + 1e-15);
  CHECK(rep.relative_residual <= 1e-11);
}

TEST_CASE("serial and parallel backends give the same solution") {
  const auto dom = TruncatedDomain::make(DomainKind::Half, 3, 18);
  const auto f = random_source(dom, 11);
  const auto us = DirichletSolver(dom, {.tol = 1e-12, .backend = kernels::Backend::Serial}).solve(f);
  const auto up = DirichletSolver(dom, {.tol = 1e-12, .backend = kernels::Backend::Parallel}).solve(f);
  CHECK(max_diff(us, up) < 1e-10 * norm(us, NormKind::Sup));
}

TEST_CASE("multigrid iteration count does not grow with the radius") {
  std::vector<int> its;
  for (double R : {10.0, 20.0, 40.0}) {
    const auto dom = TruncatedDomain::make(DomainKind::Whole, 3, R);
    LinearSolveReport rep;
    DirichletSolver solver(dom, {.tol = 1e-10});
    solver.solve(delta_field(dom, LatticePoint::origin(3)), &rep);
    CHECK(solver.levels() >= 2);
    its.push_back(rep.iterations);
  }
  CHECK(its[2] <= its[0] + 4);
  CHECK(its[2] <= 25);
}

TEST_CASE("truncated Green's function at the pole matches the frozen reference") {
  for (auto [R, ref] : {std::pair{20.0, oracle::kPhi3Raw20}, std::pair{40.0, oracle::kPhi3Raw40}}) {
    const auto dom = TruncatedDomain::make(DomainKind::Whole, 3, R);
    const auto u = DirichletSolver(dom, {.tol = 1e-12}).solve(delta_field(dom, LatticePoint::origin(3)));
    CHECK(u(LatticePoint::origin(3)) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("iteration cap raises SolverError with the report") {
  const auto dom = TruncatedDomain::make(DomainKind::Whole, 3, 20);
  DirichletSolver solver(dom, {.tol = 1e-14, .max_iterations = 2, .multigrid = false});
  try {
    solver.solve(delta_field(dom, LatticePoint::origin(3)));
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK_FALSE(e.report().converged);
    CHECK(e.report().iterations >= 2);
  }
}

TEST_CASE("sources off the interior are rejected or ignored") {
  const auto dom = TruncatedDomain::make(DomainKind::Quadrant, 2, 8);
  LatticeField f(dom);
  f.set(LatticePoint{0, 3}, 1.0);  // boundary point
  const auto u = DirichletSolver(dom).solve(f);
  CHECK(norm(u, NormKind::Sup) == 0.0);
}
