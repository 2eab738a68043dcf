#pragma once

// The weight Q, the problem data, the Green operator f -> Phi * f on a
// truncation, the Birman-Schwinger operator K v = Q^{1/p} Phi * (Q^{1/p} v)
// and the energy J0(v) = (1/p') sum |v|^{p'} - (1/2) sum v K v.

#include <memory>
#include <string>

#include "lanemden/greens.hpp"
#include "lanemden/lattice.hpp"
#include "lanemden/linear_solver.hpp"

namespace lanemden {

struct PotentialSpec {
  enum class Form { PowerLaw, CompactSupport, Table };
  Form form = Form::PowerLaw;
  double c = 1.0;
  double alpha = 0.0;           // PowerLaw: Q = c (1+|x|)^{-alpha}
  double support_radius = 0.0;  // CompactSupport: Q = c on |x| <= radius, 0 outside
  std::shared_ptr<const LatticeField> table;  // Table: values read off the field, 0 elsewhere

  static PotentialSpec power_law(double c, double alpha);
  static PotentialSpec compact(double radius, double c = 1.0);
  static PotentialSpec from_table(LatticeField values);

  double operator()(const LatticePoint& x) const;
  /// alpha for power laws, +inf for compact support, NaN for tables.
  double decay_exponent() const;
  /// Q is bounded, and Q |x|^{alpha} -> 0 at infinity for the given alpha
  /// (true only for compact support).
  bool vanishes_faster_than(double alpha) const;
  std::string describe() const;
};

/// Q on the interior of `domain`.  With `reflect`, a half/quadrant domain is
/// replaced by the whole ball of the same radius and Q is extended evenly
/// across each Dirichlet hyperplane, with value 0 on the hyperplanes.
LatticeField sample_potential(const PotentialSpec& Q, const DomainPtr& domain, bool reflect = false);

struct ProblemSpec {
  int d = 3;
  DomainKind kind = DomainKind::Whole;
  PotentialSpec Q;
  double p = 2.0;

  double p_prime() const { return p / (p - 1.0); }
  double q() const { return p - 1.0; }
  double beta() const { return kernel_beta(kind); }
  /// Throws std::invalid_argument unless d >= 3 (whole) or d >= 2, and p > 1.
  void validate() const;
  std::string describe() const;
};

/// f -> Phi * f evaluated on a truncation.
class GreenOperator {
 public:
  virtual ~GreenOperator() = default;
  virtual const DomainPtr& domain() const = 0;
  /// f must vanish off the interior (std::out_of_range otherwise).
  virtual LatticeField apply(const LatticeField& f) const = 0;
};

/// Phi of the truncation itself: one Dirichlet solve per application.
class DirichletGreenOperator final : public GreenOperator {
 public:
  DirichletGreenOperator(DomainPtr domain, double tol);
  const DomainPtr& domain() const override { return solver_.domain(); }
  LatticeField apply(const LatticeField& f) const override;
  double tol() const { return solver_.options().tol; }

 private:
  DirichletSolver solver_;
};

/// Phi given by a kernel family, summed explicitly (small supports only).
class KernelGreenOperator final : public GreenOperator {
 public:
  KernelGreenOperator(DomainPtr domain, std::shared_ptr<const GreenFamily> kernel);
  const DomainPtr& domain() const override { return domain_; }
  LatticeField apply(const LatticeField& f) const override;

 private:
  DomainPtr domain_;
  std::shared_ptr<const GreenFamily> kernel_;
};

/// Throws std::out_of_range if f has a nonzero value off the interior.
void require_interior_support(const LatticeField& f);

class BirmanSchwinger {
 public:
  BirmanSchwinger(ProblemSpec spec, std::shared_ptr<const GreenOperator> green);

  const ProblemSpec& spec() const { return spec_; }
  const DomainPtr& domain() const { return green_->domain(); }
  const GreenOperator& green() const { return *green_; }
  const LatticeField& q_field() const { return q_; }
  /// Q^{1/p}, with 0^{1/p} = 0.
  const LatticeField& q_root() const { return q_root_; }

  LatticeField apply(const LatticeField& v) const;
  /// B(u, v) = sum u K(v).
  double form(const LatticeField& u, const LatticeField& v) const;

 private:
  ProblemSpec spec_;
  std::shared_ptr<const GreenOperator> green_;
  LatticeField q_, q_root_;
};

/// Convenience: K with the truncation's own Dirichlet kernel.
BirmanSchwinger make_dirichlet_operator(const ProblemSpec& spec, double R, double tol = 1e-12);

LatticeField apply_K(const LatticeField& v, const BirmanSchwinger& K);

/// sum |v|^s
double power_sum(const LatticeField& v, double s);

/// J0(v); requires p > 2.
double energy(const LatticeField& v, const BirmanSchwinger& K);
/// J0 from precomputed A = sum |v|^{p'} and B = B(v, v).
double energy_from_parts(double A, double B, double p_prime);
/// |v|^{p'-2} v - K v, with 0 where v = 0; requires p > 2.
LatticeField energy_gradient(const LatticeField& v, const BirmanSchwinger& K);
/// The multiplier t* = (A / B)^{1/(2-p')} at which t -> J0(t v) is stationary.
double nehari_scale(double A, double B, double p_prime);

}  // namespace lanemden
