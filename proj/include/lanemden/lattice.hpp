#pragma once

// Lattice geometry: points of Z^d, the three domain kinds, truncated
// domains with an interior/boundary split, dense fields over a truncation,
// the graph Laplacian and the strong/weak/sup norms.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanemden/grid.hpp"

namespace lanemden {

class LatticePoint {
 public:
  LatticePoint() = default;
  LatticePoint(std::initializer_list<int> coords);
  explicit LatticePoint(std::span<const int> coords);

  static LatticePoint origin(int dim);
  /// sign * e_axis (axis is zero based).
  static LatticePoint unit(int dim, int axis, int sign = 1);

  int dim() const { return dim_; }
  int operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  int& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

  std::int64_t norm_sq() const;
  double norm() const;
  /// l1 (graph) norm |x|_Q.
  std::int64_t graph_norm() const;

  /// Copy with coordinate `axis` negated.
  LatticePoint reflected(int axis) const;

  LatticePoint& operator+=(const LatticePoint& o);
  LatticePoint& operator-=(const LatticePoint& o);
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }

  // Lexicographic in the coordinates; unused slots are always zero.
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;

  std::string to_string() const;

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

/// The 2d lattice neighbours of x in the fixed order +e1, -e1, +e2, -e2, ...
std::vector<LatticePoint> neighbors(const LatticePoint& x);

enum class DomainKind { Whole, Half, Quadrant };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

/// Membership in Z^d, Z^d_+ (x1 > 0) or Z^d_* (x1 > 0 and x2 > 0).
bool in_kind(DomainKind kind, const LatticePoint& x);

/// Exponent of the kernel decay attached to a domain kind: 1, 1/2, 0.
double kernel_beta(DomainKind kind);

enum class CellLabel : std::uint8_t { Outside = 0, Interior = 1, Boundary = 2 };

/// Ball of Euclidean radius R intersected with a domain kind.  Interior is
/// {x in kind : |x| <= R}; boundary is every non-interior lattice point
/// adjacent to an interior point.  Storage is the bounding box of the
/// closure, indexed with x1 as the slowest axis so that flat order is
/// lexicographic order.
class TruncatedDomain {
 public:
  TruncatedDomain(DomainKind kind, int dim, double radius);

  static std::shared_ptr<const TruncatedDomain> make(DomainKind kind, int dim, double radius);

  DomainKind kind() const { return kind_; }
  int dim() const { return grid_.dim; }
  double radius() const { return radius_; }

  /// Box and interior runs, consumed by the grid kernels.
  const Grid& grid() const { return grid_; }
  std::int64_t box_size() const { return grid_.size; }
  std::int64_t interior_count() const { return grid_.active; }
  std::int64_t boundary_count() const { return boundary_count_; }

  CellLabel label(std::int64_t index) const { return labels_[static_cast<std::size_t>(index)]; }
  CellLabel label(const LatticePoint& x) const;
  bool is_interior(const LatticePoint& x) const { return label(x) == CellLabel::Interior; }
  bool is_boundary(const LatticePoint& x) const { return label(x) == CellLabel::Boundary; }
  /// Interior or boundary.
  bool contains(const LatticePoint& x) const { return label(x) != CellLabel::Outside; }

  /// Flat box index, or -1 when x lies outside the box.
  std::int64_t index_of(const LatticePoint& x) const;
  LatticePoint point_at(std::int64_t index) const;

  /// Lexicographically sorted.
  std::vector<LatticePoint> interior_points() const;
  std::vector<LatticePoint> boundary_points() const;

  bool same_as(const TruncatedDomain& o) const {
    return kind_ == o.kind_ && grid_.dim == o.grid_.dim && radius_ == o.radius_;
  }

 private:
  DomainKind kind_;
  double radius_;
  Grid grid_;
  std::vector<CellLabel> labels_;
  std::int64_t boundary_count_ = 0;
};

using DomainPtr = std::shared_ptr<const TruncatedDomain>;

/// Points of the l1 cube {x : sum |x_i - c_i| <= ell}.
std::vector<LatticePoint> cube_points(const LatticePoint& center, int ell);

/// Real or integer valued function on a truncation, stored densely over the
/// box.  Entries outside interior and boundary are always zero, which is the
/// zero extension used for Dirichlet problems.
template <class T>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(DomainPtr domain)
      : domain_(std::move(domain)), values_(static_cast<std::size_t>(domain_->box_size()), T{}) {}

  const TruncatedDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  T operator()(const LatticePoint& x) const {
    const auto i = domain_->index_of(x);
    return i < 0 ? T{} : values_[static_cast<std::size_t>(i)];
  }
  /// Throws std::out_of_range unless x is interior or boundary.
  void set(const LatticePoint& x, T value);

  T at_index(std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }

  std::span<T> data() { return values_; }
  std::span<const T> data() const { return values_; }

  BasicField& operator+=(const BasicField& o);
  BasicField& operator-=(const BasicField& o);
  BasicField& operator*=(T s);
  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(T s, BasicField a) { return a *= s; }

  bool all_finite() const;

 private:
  DomainPtr domain_;
  std::vector<T> values_;
};

using LatticeField = BasicField<double>;
using IntegerField = BasicField<std::int64_t>;

enum class Support { Interior, Closure };

/// Field with f(x) evaluated at every interior (or interior and boundary) point.
template <class T, class F>
BasicField<T> sample_field(const DomainPtr& domain, F&& f, Support support = Support::Interior) {
  BasicField<T> out(domain);
  auto values = out.data();
  for (std::int64_t i = 0; i < domain->box_size(); ++i) {
    const auto lab = domain->label(i);
    if (lab == CellLabel::Interior || (support == Support::Closure && lab == CellLabel::Boundary)) {
      values[static_cast<std::size_t>(i)] = f(domain->point_at(i));
    }
  }
  return out;
}

/// Delta mass at y (which must be interior or boundary).
LatticeField delta_field(const DomainPtr& domain, const LatticePoint& y);

/// (Delta u)(x) = sum_{y ~ x} (u(y) - u(x)) at interior points, zero elsewhere.
/// Exact for integer fields.
template <class T>
BasicField<T> laplacian_apply(const BasicField<T>& u);

enum class NormKind { Strong, Sup, Weak };

/// Strong L^q, sup, or weak L^{q,inf} norm over the stored values.  The weak
/// norm is the supremum over lambda > 0 of lambda |{|u| > lambda}|^{1/q},
/// evaluated exactly as max_k v_k * #{|u| >= v_k}^{1/q} over distinct values.
double norm(const LatticeField& u, NormKind kind, double q = 2.0);
double norm(std::span<const double> values, NormKind kind, double q = 2.0);

/// A0 = {x1 > |x|/4}, A1 = {x1 > |x|/8 and x2 > |x|/8}; decided exactly in
/// integers (16 x1^2 > |x|^2 with x1 > 0, etc).
enum class Cone { A0, A1 };
bool in_cone(Cone cone, const LatticePoint& x);
std::string_view to_string(Cone cone);

/// Comparison profiles used as barriers.
struct BarrierField {
  enum class Family { PowerTail, HalfBarrier, QuadrantBarrier, LogBarrier };
  Family family = Family::PowerTail;
  double param = 1.0;  // tau, or sigma for LogBarrier

  double operator()(const LatticePoint& x) const;
  LatticeField sample(const DomainPtr& domain, Support support = Support::Interior) const;
};

/// CSV dump: header x1,...,xd,value then one row per interior or boundary
/// point in lexicographic order, values with 17 significant digits.
void write_field_csv(std::ostream& os, const LatticeField& u);
LatticeField read_field_csv(std::istream& is, const DomainPtr& domain);

}  // namespace lanemden
