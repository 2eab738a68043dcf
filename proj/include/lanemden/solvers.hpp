#pragma once

// Poisson solves, the sublinear monotone iteration, the p = 2 power
// iteration, the p > 2 normalized fixed point, and the nonexistence probe.

#include <optional>
#include <string>
#include <vector>

#include "lanemden/analysis.hpp"
#include "lanemden/operators.hpp"

namespace lanemden {

struct IterationRecord {
  double norm = 0.0;   // sup norm of the iterate
  double value = 0.0;  // relative change, energy or Rayleigh quotient
};

struct SolveResult {
  LatticeField u;
  int iterations = 0;
  double residual = 0.0;  // sup-norm defect of the equation solved (relative where noted)
  bool monotone = false;
  std::vector<IterationRecord> history;
  std::optional<DecayFit> decay_fit;

  // Extras filled by particular solvers.
  std::optional<LatticeField> v;           // ground state of the dual equation
  std::optional<double> level;             // J0(t* v)
  std::optional<double> nehari_multiplier;
  std::optional<double> recovered_residual;  // sup|u - Phi*(Q u^{p-1})| / sup u
  std::optional<LatticeField> lower;       // sub- and supersolution bracketing u
  std::optional<LatticeField> upper;
  std::optional<double> seed_scale;
  std::optional<double> supersolution_scale;
  std::string regime;
};

struct EigenResult {
  double lambda1 = 0.0;
  LatticeField v1;
  std::vector<double> rayleigh_history;
  std::vector<double> residual_history;
  double residual = 0.0;  // ||K v1 - lambda1 v1||_2 / ||v1||_2
  int iterations = 0;
  bool regime_ok = false;   // the p = 2 exponent condition
  std::string regime_note;
};

/// -Delta u = f on the interior of `f`'s truncation, zero Dirichlet data.
/// f must vanish off the interior.
SolveResult solve_poisson(const LatticeField& f, double tol = 1e-10);
/// As above on the (kind, R) truncation; f must be supported in its interior.
SolveResult solve_poisson(DomainKind kind, const LatticeField& f, double R, double tol = 1e-10);

struct Supersolution {
  LatticeField field;
  double t1 = 1.0;
  double tau_p = 0.0;
  LatticeField source;  // (1+|x|)^{tau_p - 2} etc, before scaling
};

/// tau_p for the sublinear regime; throws naming the violated hypothesis.
double sublinear_tau(const ProblemSpec& spec);

/// t1 * Phi * source with -Delta(ubar) >= Q ubar^{p-1} on the interior.
Supersolution build_supersolution(const ProblemSpec& spec, double R, double lin_tol = 1e-12);

struct MonotoneOptions {
  int max_iterations = 10000;
  double lin_tol = 1e-12;
  /// Seed pole x0 (default: a maximizer of Q) and an extra factor applied to
  /// the power-of-two seed scale, for independent runs.
  std::optional<LatticePoint> seed_pole;
  double seed_factor = 1.0;
  double slack = 1e-12;
};

SolveResult monotone_solve(const ProblemSpec& spec, double R, double tol, const MonotoneOptions& opt = {});

struct EigenOptions {
  int max_iterations = 10000;
  double lin_tol = 1e-12;
};

EigenResult eigen_solve(const ProblemSpec& spec, double R, double tol, const EigenOptions& opt = {});

struct GroundStateOptions {
  int max_iterations = 10000;
  double lin_tol = 1e-12;
  double step_tol = 1e-8;  // relative sup change of normalized iterates
};

/// p > 2.  Throws std::runtime_error("no stable positive solution ...") if
/// the iterates collapse.
SolveResult ground_state_solve(const ProblemSpec& spec, double R, double tol, const GroundStateOptions& opt = {});

struct ProbeReport {
  std::vector<std::pair<double, double>> amplitudes;  // (R, sup u)
  std::string trend;  // "vanishing trend", "stable", "growing", "inconclusive"
  double weight_exponent = 0.0;  // q tau - alpha
  std::vector<std::pair<int, double>> partial_sums;  // (n, S_n) at dyadic n
  bool certificate = false;  // S_n unbounded
  std::string verdict;       // always labeled heuristic
};

/// Amplitude trend of ground states over increasing R, and the divergence
/// certificate: partial sums over |x| <= n of f(x) w(x) with
/// f = (1+|x|)^{q tau - alpha}, tau the bootstrap exponent at its
/// termination index (tau_0 otherwise), and w = (1+|x|)^{2-d} (whole),
/// (1+|x|)^{1-d} on A0 (half), (1+|x|)^{-d} on A1 (quadrant).  Heuristic.
ProbeReport nonexistence_probe(const ProblemSpec& spec, const std::vector<double>& radii, double tol,
                               int certificate_max_n = 0);  // 0: by dimension

}  // namespace lanemden
