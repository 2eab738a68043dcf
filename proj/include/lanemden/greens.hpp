#pragma once

// Lattice Green functions of -Delta on Z^d, the half lattice and the
// quadrant: truncated Dirichlet solves, Richardson refinement in R,
// image constructions, convolution, and bound reports.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanemden/lattice.hpp"
#include "lanemden/linear_solver.hpp"

namespace lanemden {

/// Phi(., pole) tabulated on the closure (interior and boundary) of a truncation.
struct GreenTable {
  DomainKind kind = DomainKind::Whole;
  int dim = 0;
  LatticePoint pole;
  double radius = 0.0;
  double tol = 0.0;
  LatticeField values;
  /// d >= 3 whole: the constant c in Phi(x) ~ c |x|^{2-d}; d = 2 whole: the
  /// additive constant in Phi(x) ~ -ln|x| / (2 pi) + c.  Fitted on shells.
  std::optional<double> fitted_constant;
  /// (R, value at pole) for each truncated solve; the extrapolated value is
  /// recorded with R = +inf.
  std::vector<std::pair<double, double>> extrapolation_record;
  /// Sup-norm residual of the defining equation at interior points.
  double max_residual = 0.0;

  bool covers(const LatticePoint& x) const { return values.domain().contains(x); }
  /// Phi(x, pole); throws std::out_of_range outside interior and boundary.
  double at(const LatticePoint& x) const;
};

/// Whole-lattice kernel.  d >= 3: Dirichlet solves on origin-centred balls of
/// radius R and 2R, extrapolated pointwise assuming an error a R^{2-d}.
/// d = 2: G_R - G_R(pole).  With extrapolate = false (d >= 3) the plain
/// radius-R solve is returned.  Requires R >= 10 and the pole interior.
GreenTable whole_green(int d, const LatticePoint& pole, double R, double tol,
                       bool extrapolate = true);

/// Truncated Dirichlet kernel of a half or quadrant ball (or whole ball),
/// solved directly on that truncation.  Used as the reference for the image
/// constructions.  Boundary values are exactly zero.
GreenTable direct_green(DomainKind kind, int d, const LatticePoint& pole, double R, double tol);

/// Half/quadrant kernel from a whole-ball solve with the same pole by the
/// method of images; it coincides with direct_green up to solver tolerance.
GreenTable image_green(DomainKind kind, int d, const LatticePoint& pole, double R, double tol);

/// Phi_{d,+}(x, y) from a whole-lattice table.  If base.pole == y the image
/// is taken by reflecting x, which is exact for the symmetric truncation of
/// base; if base.pole is the origin, translation invariance is used:
/// base(x - y) - base(x - y*).  Exactly 0 when x1 = 0 or y1 = 0.
double half_green(const LatticePoint& x, const LatticePoint& y, const GreenTable& base);

/// Phi_{d,*}(x, y) as the four-image alternating sum, with the same two
/// evaluation modes as half_green.  Exactly 0 when x1, x2, y1 or y2 is 0.
double quadrant_green(const LatticePoint& x, const LatticePoint& y, const GreenTable& base);

/// Kernel Phi(x, y) of some domain kind, possibly only partially tabulated.
class GreenFamily {
 public:
  virtual ~GreenFamily() = default;
  virtual DomainKind kind() const = 0;
  virtual int dim() const = 0;
  /// Throws std::out_of_range when (x, y) is not covered.
  virtual double operator()(const LatticePoint& x, const LatticePoint& y) const = 0;
};

/// Kernel from a whole-lattice table with pole 0, via translation and images.
class TranslationFamily final : public GreenFamily {
 public:
  TranslationFamily(DomainKind kind, std::shared_ptr<const GreenTable> base);
  DomainKind kind() const override { return kind_; }
  int dim() const override { return base_->dim; }
  double operator()(const LatticePoint& x, const LatticePoint& y) const override;

 private:
  DomainKind kind_;
  std::shared_ptr<const GreenTable> base_;
};

/// Kernel given column by column (one table per pole).
class ColumnFamily final : public GreenFamily {
 public:
  ColumnFamily(DomainKind kind, int dim) : kind_(kind), dim_(dim) {}
  void add(GreenTable column);
  DomainKind kind() const override { return kind_; }
  int dim() const override { return dim_; }
  double operator()(const LatticePoint& x, const LatticePoint& y) const override;
  const GreenTable& column(const LatticePoint& y) const;

 private:
  DomainKind kind_;
  int dim_;
  std::map<LatticePoint, GreenTable> columns_;
};

/// (Phi * f)(x) = sum_y Phi(x, y) f(y) for every interior and boundary
/// point x of `target`.  Throws std::out_of_range on coverage violations.
LatticeField convolve(const GreenFamily& kernel, const LatticeField& f, const DomainPtr& target);

struct BoundReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::int64_t samples = 0;
  double rmin = 0.0, rmax = 0.0;
};

/// Range of Phi(x, pole) / profile(x) over rmin <= |x| <= rmax (default
/// [R/4, R/2]), optionally inside a cone, and for half/quadrant kinds only
/// where |x| >= 2|pole|.  Profiles: whole (1+|x-y|)^{2-d} (d = 2: the
/// logarithm ln(1+|x-y|)); half x1 y1 (1+|x-y|)^{-d}; quadrant
/// x1 x2 y1 y2 (1+|x-y|)^{-d-2}.  Throws std::invalid_argument on an empty region.
BoundReport kernel_bound_report(const GreenTable& table, std::optional<Cone> cone = std::nullopt,
                                std::optional<double> rmin = std::nullopt,
                                std::optional<double> rmax = std::nullopt);

/// Whole-lattice tables memoized in memory and, when the LANE_EMDEN_CACHE
/// environment variable names a directory, on disk.
std::shared_ptr<const GreenTable> cached_whole_green(int d, const LatticePoint& pole, double R,
                                                     double tol);

}  // namespace lanemden
