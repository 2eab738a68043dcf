#include "lanemden/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lanemden {

namespace {

void check_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw std::invalid_argument("lattice dimension must be in [2, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(dim));
  }
}

}  // namespace

// ---------------------------------------------------------------- points

LatticePoint::LatticePoint(std::initializer_list<int> coords)
    : LatticePoint(std::span<const int>(coords.begin(), coords.size())) {}

LatticePoint::LatticePoint(std::span<const int> coords) {
  check_dim(static_cast<int>(coords.size()));
  dim_ = static_cast<int>(coords.size());
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint LatticePoint::origin(int dim) {
  check_dim(dim);
  LatticePoint p;
  p.dim_ = dim;
  return p;
}

LatticePoint LatticePoint::unit(int dim, int axis, int sign) {
  auto p = origin(dim);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("unit: axis out of range");
  p.c_[static_cast<std::size_t>(axis)] = sign;
  return p;
}

std::int64_t LatticePoint::norm_sq() const {
  std::int64_t s = 0;
  for (int k = 0; k < dim_; ++k) s += std::int64_t{(*this)[k]} * (*this)[k];
  return s;
}

double LatticePoint::norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

std::int64_t LatticePoint::graph_norm() const {
  std::int64_t s = 0;
  for (int k = 0; k < dim_; ++k) s += std::abs((*this)[k]);
  return s;
}

LatticePoint LatticePoint::reflected(int axis) const {
  auto p = *this;
  p[axis] = -p[axis];
  return p;
}

LatticePoint& LatticePoint::operator+=(const LatticePoint& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("point dimension mismatch");
  for (int k = 0; k < dim_; ++k) (*this)[k] += o[k];
  return *this;
}

LatticePoint& LatticePoint::operator-=(const LatticePoint& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("point dimension mismatch");
  for (int k = 0; k < dim_; ++k) (*this)[k] -= o[k];
  return *this;
}

std::string LatticePoint::to_string() const {
  std::string s = "(";
  for (int k = 0; k < dim_; ++k) {
    if (k) s += ",";
    s += std::to_string((*this)[k]);
  }
  return s + ")";
}

std::vector<LatticePoint> neighbors(const LatticePoint& x) {
  std::vector<LatticePoint> out;
  out.reserve(static_cast<std::size_t>(2 * x.dim()));
  for (int k = 0; k < x.dim(); ++k) {
    for (int s : {1, -1}) {
      auto y = x;
      y[k] += s;
      out.push_back(y);
    }
  }
  return out;
}

// ---------------------------------------------------------------- kinds

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Whole: return "whole";
    case DomainKind::Half: return "half";
    case DomainKind::Quadrant: return "quadrant";
  }
  return "?";
}

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "whole") return DomainKind::Whole;
  if (name == "half") return DomainKind::Half;
  if (name == "quadrant") return DomainKind::Quadrant;
  throw std::invalid_argument("unknown domain kind '" + std::string(name) + "'");
}

bool in_kind(DomainKind kind, const LatticePoint& x) {
  switch (kind) {
    case DomainKind::Whole: return true;
    case DomainKind::Half: return x[0] > 0;
    case DomainKind::Quadrant: return x[0] > 0 && x[1] > 0;
  }
  return false;
}

double kernel_beta(DomainKind kind) {
  switch (kind) {
    case DomainKind::Whole: return 1.0;
    case DomainKind::Half: return 0.5;
    case DomainKind::Quadrant: return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------- grid

void Grid::finalize_box() {
  size = 1;
  for (int k = dim - 1; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] = size;
    size *= extent[static_cast<std::size_t>(k)];
  }
}

// ---------------------------------------------------------------- domains

TruncatedDomain::TruncatedDomain(DomainKind kind, int dim, double radius)
    : kind_(kind), radius_(radius) {
  check_dim(dim);
  if (!(radius > 0) || !std::isfinite(radius)) {
    throw std::invalid_argument("truncation radius must be positive and finite");
  }
  if (radius > 1 << 20) throw std::invalid_argument("truncation radius too large");
  const int f = static_cast<int>(std::floor(radius));
  grid_.dim = dim;
  for (int k = 0; k < dim; ++k) {
    const bool clipped =
        (kind == DomainKind::Half && k == 0) || (kind == DomainKind::Quadrant && k < 2);
    const std::int64_t lo = clipped ? 0 : -(f + 1);
    grid_.lo[static_cast<std::size_t>(k)] = lo;
    grid_.extent[static_cast<std::size_t>(k)] = f + 1 - lo + 1;
  }
  grid_.finalize_box();

  labels_.assign(static_cast<std::size_t>(grid_.size), CellLabel::Outside);
  const double r2 = radius * radius;
  for (std::int64_t i = 0; i < grid_.size; ++i) {
    const auto x = point_at(i);
    if (in_kind(kind, x) && static_cast<double>(x.norm_sq()) <= r2) {
      labels_[static_cast<std::size_t>(i)] = CellLabel::Interior;
    }
  }
  // The box keeps one layer around the ball, so every neighbour of an
  // interior cell has a flat index.
  for (std::int64_t i = 0; i < grid_.size; ++i) {
    if (labels_[static_cast<std::size_t>(i)] != CellLabel::Interior) continue;
    for (int k = 0; k < dim; ++k) {
      for (std::int64_t j : {i + grid_.stride[static_cast<std::size_t>(k)],
                             i - grid_.stride[static_cast<std::size_t>(k)]}) {
        auto& lab = labels_[static_cast<std::size_t>(j)];
        if (lab == CellLabel::Outside) {
          lab = CellLabel::Boundary;
          ++boundary_count_;
        }
      }
    }
  }
  grid_.build_runs(
      [&](std::int64_t i) { return labels_[static_cast<std::size_t>(i)] == CellLabel::Interior; });
}

std::shared_ptr<const TruncatedDomain> TruncatedDomain::make(DomainKind kind, int dim,
                                                             double radius) {
  return std::make_shared<const TruncatedDomain>(kind, dim, radius);
}

std::int64_t TruncatedDomain::index_of(const LatticePoint& x) const {
  if (x.dim() != grid_.dim) throw std::invalid_argument("point dimension does not match domain");
  std::int64_t idx = 0;
  for (int k = 0; k < grid_.dim; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const std::int64_t c = x[k] - grid_.lo[ku];
    if (c < 0 || c >= grid_.extent[ku]) return -1;
    idx += c * grid_.stride[ku];
  }
  return idx;
}

LatticePoint TruncatedDomain::point_at(std::int64_t index) const {
  auto p = LatticePoint::origin(grid_.dim);
  for (int k = grid_.dim - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    p[k] = static_cast<int>(index % grid_.extent[ku] + grid_.lo[ku]);
    index /= grid_.extent[ku];
  }
  return p;
}

CellLabel TruncatedDomain::label(const LatticePoint& x) const {
  const auto i = index_of(x);
  return i < 0 ? CellLabel::Outside : labels_[static_cast<std::size_t>(i)];
}

std::vector<LatticePoint> TruncatedDomain::interior_points() const {
  std::vector<LatticePoint> out;
  out.reserve(static_cast<std::size_t>(interior_count()));
  for (std::int64_t i = 0; i < grid_.size; ++i) {
    if (labels_[static_cast<std::size_t>(i)] == CellLabel::Interior) out.push_back(point_at(i));
  }
  return out;
}

std::vector<LatticePoint> TruncatedDomain::boundary_points() const {
  std::vector<LatticePoint> out;
  out.reserve(static_cast<std::size_t>(boundary_count_));
  for (std::int64_t i = 0; i < grid_.size; ++i) {
    if (labels_[static_cast<std::size_t>(i)] == CellLabel::Boundary) out.push_back(point_at(i));
  }
  return out;
}

std::vector<LatticePoint> cube_points(const LatticePoint& center, int ell) {
  if (ell < 0) throw std::invalid_argument("cube_points: negative size");
  std::vector<LatticePoint> out;
  auto x = center;
  const int d = center.dim();
  // Depth-first over axes with the remaining l1 budget.
  std::function<void(int, int)> rec = [&](int k, int budget) {
    if (k == d) {
      out.push_back(x);
      return;
    }
    for (int t = -budget; t <= budget; ++t) {
      x[k] = center[k] + t;
      rec(k + 1, budget - std::abs(t));
    }
    x[k] = center[k];
  };
  rec(0, ell);
  return out;
}

// ---------------------------------------------------------------- fields

template <class T>
void BasicField<T>::set(const LatticePoint& x, T value) {
  const auto i = domain_->index_of(x);
  if (i < 0 || domain_->label(i) == CellLabel::Outside) {
    throw std::out_of_range("field point " + x.to_string() + " outside interior and boundary");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite field value");
  }
  values_[static_cast<std::size_t>(i)] = value;
}

template <class T>
BasicField<T>& BasicField<T>::operator+=(const BasicField& o) {
  if (!domain_->same_as(o.domain())) throw std::invalid_argument("field domains differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

template <class T>
BasicField<T>& BasicField<T>::operator-=(const BasicField& o) {
  if (!domain_->same_as(o.domain())) throw std::invalid_argument("field domains differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

template <class T>
BasicField<T>& BasicField<T>::operator*=(T s) {
  for (auto& v : values_) v *= s;
  return *this;
}

template <class T>
bool BasicField<T>::all_finite() const {
  if constexpr (std::is_floating_point_v<T>) {
    return std::all_of(values_.begin(), values_.end(), [](T v) { return std::isfinite(v); });
  } else {
    return true;
  }
}

template class BasicField<double>;
template class BasicField<std::int64_t>;

LatticeField delta_field(const DomainPtr& domain, const LatticePoint& y) {
  LatticeField u(domain);
  u.set(y, 1.0);
  return u;
}

template <class T>
BasicField<T> laplacian_apply(const BasicField<T>& u) {
  const auto& g = u.domain().grid();
  BasicField<T> out(u.domain_ptr());
  auto in = u.data();
  auto res = out.data();
  for (const auto& run : g.runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      T acc{};
      for (int k = 0; k < g.dim; ++k) {
        const auto s = static_cast<std::size_t>(g.stride[static_cast<std::size_t>(k)]);
        acc += in[iu + s] + in[iu - s];
      }
      res[iu] = acc - static_cast<T>(2 * g.dim) * in[iu];
    }
  }
  return out;
}

template LatticeField laplacian_apply(const LatticeField&);
template IntegerField laplacian_apply(const IntegerField&);

// ---------------------------------------------------------------- norms

double norm(std::span<const double> values, NormKind kind, double q) {
  if (kind != NormKind::Sup && !(q >= 1.0)) throw std::invalid_argument("norm: q must be >= 1");
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (kind == NormKind::Sup || m == 0.0) return m;
  if (kind == NormKind::Strong) {
    double s = 0.0;
    for (double v : values) {
      if (v != 0.0) s += std::pow(std::abs(v) / m, q);
    }
    return m * std::pow(s, 1.0 / q);
  }
  std::vector<double> mags;
  for (double v : values) {
    if (v != 0.0) mags.push_back(std::abs(v));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t i = 0; i < mags.size();) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    best = std::max(best, mags[i] * std::pow(static_cast<double>(j), 1.0 / q));
    i = j;
  }
  return best;
}

double norm(const LatticeField& u, NormKind kind, double q) { return norm(u.data(), kind, q); }

// ---------------------------------------------------------------- cones

bool in_cone(Cone cone, const LatticePoint& x) {
  const std::int64_t r2 = x.norm_sq();
  const std::int64_t a = x[0], b = x[1];
  switch (cone) {
    case Cone::A0: return a > 0 && 16 * a * a > r2;
    case Cone::A1: return a > 0 && b > 0 && 64 * a * a > r2 && 64 * b * b > r2;
  }
  return false;
}

std::string_view to_string(Cone cone) { return cone == Cone::A0 ? "A0" : "A1"; }

// ---------------------------------------------------------------- barriers

double BarrierField::operator()(const LatticePoint& x) const {
  const double r2 = static_cast<double>(x.norm_sq());
  // |x|^{-tau} at the origin is taken as 1.
  const double tail = r2 == 0.0 ? 1.0 : std::pow(r2, -0.5 * param);
  switch (family) {
    case Family::PowerTail: return tail;
    case Family::HalfBarrier: return x[0] * tail;
    case Family::QuadrantBarrier: return static_cast<double>(x[0]) * x[1] * tail;
    case Family::LogBarrier: {
      const double t = std::numbers::e + r2;
      return std::pow(t, 0.5 * (2 - x.dim())) * std::pow(std::log(t), param);
    }
  }
  return 0.0;
}

LatticeField BarrierField::sample(const DomainPtr& domain, Support support) const {
  return sample_field<double>(domain, *this, support);
}

// ---------------------------------------------------------------- csv

void write_field_csv(std::ostream& os, const LatticeField& u) {
  const auto& dom = u.domain();
  for (int k = 0; k < dom.dim(); ++k) os << 'x' << (k + 1) << ',';
  os << "value\n";
  char buf[40];
  auto vals = u.data();
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    if (dom.label(i) == CellLabel::Outside) continue;
    const auto x = dom.point_at(i);
    for (int k = 0; k < dom.dim(); ++k) os << x[k] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", vals[static_cast<std::size_t>(i)]);
    os << buf << '\n';
  }
}

LatticeField read_field_csv(std::istream& is, const DomainPtr& domain) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("field csv: missing header");
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns != domain->dim() + 1) throw std::runtime_error("field csv: header dimension mismatch");
  LatticeField u(domain);
  std::vector<int> coords(static_cast<std::size_t>(domain->dim()));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (auto& c : coords) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("field csv: short row " + std::to_string(lineno));
      c = std::stoi(cell);
    }
    if (!std::getline(row, cell)) throw std::runtime_error("field csv: missing value " + std::to_string(lineno));
    u.set(LatticePoint(std::span<const int>(coords)), std::stod(cell));
  }
  return u;
}

}  // namespace lanemden
