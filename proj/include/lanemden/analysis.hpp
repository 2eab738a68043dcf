#pragma once

// Critical exponents, the (alpha, p) classifier, bootstrap decay sequences,
// decay-exponent fits, and the maximum-principle checker.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lanemden/lattice.hpp"
#include "lanemden/rational.hpp"

namespace lanemden {

// ---------------------------------------------------------------- exponents

/// Serrin exponent 1 + (d-alpha)/(d-2b) and Sobolev exponent
/// 2(d-alpha)/(d-2b), b = 1, 1/2, 0 for whole, half, quadrant.
struct ExponentPair {
  DomainKind kind;
  int d;
  double alpha;
  double serrin;
  double sobolev;
};

ExponentPair exponents(DomainKind kind, int d, double alpha);

/// Exact versions; `alpha` finite.
Rational serrin_exact(DomainKind kind, int d, const Rational& alpha);
Rational sobolev_exact(DomainKind kind, int d, const Rational& alpha);
/// 2b as an integer: 2, 1, 0.
int alpha_threshold(DomainKind kind);

// ---------------------------------------------------------------- classifier

enum class Verdict { ExistsVariational, ExistsSublinearUnique, LinearEigenRegime, Nonexistent, Open, OutOfTheory };

std::string_view to_string(Verdict v);

struct Classification {
  Verdict verdict;
  std::string citation;
};

/// Extra information about Q beyond its decay rate.
struct WeightTraits {
  /// Q(x) |x|^alpha -> 0 at infinity (the vanishing-weight hypotheses used
  /// at p equal to the sobolev exponent, and at p = 2 when it equals 2).
  bool weight_vanishes = false;
};

/// alpha = +inf stands for compactly supported Q.  Doubles are converted to
/// exact rationals first.  Throws std::invalid_argument for p <= 1.
Classification classify(DomainKind kind, int d, double alpha, double p, WeightTraits traits = {});
Classification classify_exact(DomainKind kind, int d, std::optional<Rational> alpha, const Rational& p,
                              WeightTraits traits = {});

// ---------------------------------------------------------------- bootstrap

enum class BootstrapVerdict { Terminates, ConvergesBelowThreshold, InvalidRegime };

std::string_view to_string(BootstrapVerdict v);

struct BootstrapTrace {
  DomainKind kind;
  int d;
  double alpha;
  double q;
  std::vector<double> tau;   // empty for InvalidRegime
  std::optional<int> j0;     // first j with the termination threshold met
  BootstrapVerdict verdict;
  std::string message;       // names the violated hypothesis for InvalidRegime
  /// Tail limit (c - alpha)/(1 - q) for q < 1, with c = 2, 1, 0.
  std::optional<double> limit;
};

/// tau_0 = 2-d, 1-d, -d and tau_{j+1} = q tau_j + c - alpha with c = 2, 1, 0
/// (whole, half, quadrant); threshold q tau_j - alpha >= -c.  Always
/// computes max_steps + 1 terms; j0 records the first threshold hit.
/// Regime: 0 < q < (d - alpha)/(d - 2b).
BootstrapTrace bootstrap(DomainKind kind, int d, double alpha, double q, int max_steps = 100);

// ---------------------------------------------------------------- decay fits

struct DecayFit {
  double exponent = 0.0;
  std::optional<double> log_power;
  double residual = 0.0;  // rms of the log fit
  int samples = 0;        // shells or ray points used
};

/// Least squares of ln(shell mean of u) against ln r (and ln ln r with
/// with_log) over integer-rounded radii rmin <= r <= rmax, using interior
/// points, optionally restricted to a cone.  Needs 5 nonempty shells and
/// u > 0 on every used point.
DecayFit decay_fit(const LatticeField& u, double rmin, double rmax, std::optional<Cone> cone = std::nullopt,
                   bool with_log = false);

/// Same fit along the ray {k * direction : k = 1, 2, ...} with rmin <= |x| <= rmax.
DecayFit decay_fit_ray(const std::function<double(const LatticePoint&)>& u, const LatticePoint& direction,
                       double rmin, double rmax, bool with_log = false);

// ---------------------------------------------------------------- max principle

struct MaxPrincipleReport {
  double tol = 0.0;  // 1e-9 max|u| unless given
  std::vector<LatticePoint> supersolution_defects;  // interior: -Delta u + kappa u < -tol
  std::vector<LatticePoint> boundary_negative;      // boundary: u < -tol
  double outer_shell_min = 0.0;                     // min over interior points with |x| > R - 1
  bool hypotheses_hold = false;
  std::vector<LatticePoint> negative_points;  // interior: u < -tol
  std::vector<int> negative_components;       // component of each negative point
  bool conclusion_violated = false;           // hypotheses hold yet u < -tol somewhere
  std::vector<int> dichotomy_failures;        // components with min ~ 0 inside but u not ~ 0
  std::vector<int> zero_components;           // components on which u ~ 0 identically
  int components = 0;
  bool identically_zero = false;

  std::size_t violations() const { return negative_points.size() + dichotomy_failures.size(); }
};

/// Components are those of the interior graph; component ids follow the
/// lexicographic order of their first point.  kappa must be >= 0.
MaxPrincipleReport check_max_principle(const LatticeField& u, const LatticeField& kappa,
                                       std::optional<double> tol = std::nullopt);

/// Component id of every interior cell (-1 elsewhere).
std::vector<int> interior_components(const TruncatedDomain& domain, int* count = nullptr);

}  // namespace lanemden
