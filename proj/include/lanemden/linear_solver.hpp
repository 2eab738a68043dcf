#pragma once

// Dirichlet Poisson solver on a truncated domain: -Delta u = f on the
// interior, u = 0 elsewhere.  Conjugate gradients, optionally preconditioned
// by one geometric multigrid V-cycle per iteration.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lanemden/kernels.hpp"
#include "lanemden/lattice.hpp"

namespace lanemden {

struct LinearSolverOptions {
  double tol = 1e-10;      // relative residual ||f + Delta u|| / ||f||
  int max_iterations = 0;  // 0: 50 * R, at least 100
  bool multigrid = true;
  kernels::Backend backend = kernels::Backend::Parallel;
};

struct LinearSolveReport {
  int iterations = 0;
  double relative_residual = 0.0;  // Euclidean, recomputed from the final iterate
  double max_residual = 0.0;       // sup over the interior
  bool converged = false;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, LinearSolveReport report)
      : std::runtime_error(what), report_(report) {}
  const LinearSolveReport& report() const { return report_; }

 private:
  LinearSolveReport report_;
};

class MultigridHierarchy;

class DirichletSolver {
 public:
  explicit DirichletSolver(DomainPtr domain, LinearSolverOptions options = {});
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  const DomainPtr& domain() const { return domain_; }
  const LinearSolverOptions& options() const { return options_; }

  /// Solves for the interior values of u given the interior values of f
  /// (other entries of f are ignored).  u is used as the initial guess and
  /// must be zero off the interior.  Throws SolverError on non-convergence.
  LinearSolveReport solve(std::span<const double> f, std::span<double> u) const;

  LatticeField solve(const LatticeField& f, LinearSolveReport* report = nullptr) const;

  /// Number of multigrid levels (1 means a plain direct or CG solve).
  int levels() const;

 private:
  DomainPtr domain_;
  LinearSolverOptions options_;
  std::unique_ptr<MultigridHierarchy> mg_;
};

}  // namespace lanemden
