#include "lanemden/greens.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lanemden/io.hpp"

namespace lanemden {

namespace {

double interior_residual(const LatticeField& values, const LatticePoint& pole) {
  const auto lap = laplacian_apply(values);
  const auto& dom = values.domain();
  const auto pi = dom.index_of(pole);
  double worst = 0.0;
  for (const auto& run : dom.grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      const double r = -lap.at_index(i) - (i == pi ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

LatticeField solve_delta(const DomainPtr& dom, const LatticePoint& pole, double tol) {
  if (!dom->is_interior(pole)) {
    throw std::invalid_argument("pole " + pole.to_string() + " is not interior to the truncation");
  }
  LinearSolverOptions opt;
  opt.tol = tol;
  return DirichletSolver(dom, opt).solve(delta_field(dom, pole));
}

void check_common(int d, double R, double tol) {
  if (d < 2 || d > kMaxDim) throw std::invalid_argument("dimension out of range");
  if (!(R > 0)) throw std::invalid_argument("radius must be positive");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
}

// Least-squares constant of the d >= 3 tail, or the d = 2 additive constant.
std::optional<double> fit_whole_constant(const LatticeField& v, const LatticePoint& pole, double lo,
                                         double hi) {
  const auto& dom = v.domain();
  const int d = dom.dim();
  double num = 0.0, den = 0.0, sum = 0.0;
  std::int64_t n = 0;
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    if (dom.label(i) != CellLabel::Interior) continue;
    const double r = (dom.point_at(i) - pole).norm();
    if (r < lo || r > hi) continue;
    if (d >= 3) {
      const double h = std::pow(r, 2.0 - d);
      num += v.at_index(i) * h;
      den += h * h;
    } else {
      sum += v.at_index(i) + std::log(r) / (2 * std::numbers::pi);
    }
    ++n;
  }
  if (n == 0) return std::nullopt;
  return d >= 3 ? num / den : sum / static_cast<double>(n);
}

}  // namespace

double GreenTable::at(const LatticePoint& x) const {
  const auto& dom = values.domain();
  const auto i = dom.index_of(x);
  if (i < 0 || dom.label(i) == CellLabel::Outside) {
    std::ostringstream os;
    os << "point " << x.to_string() << " outside the " << to_string(kind) << " table of radius "
       << radius;
    throw std::out_of_range(os.str());
  }
  return values.at_index(i);
}

GreenTable whole_green(int d, const LatticePoint& pole, double R, double tol, bool extrapolate) {
  check_common(d, R, tol);
  if (R < 10) throw std::invalid_argument("whole_green requires R >= 10");
  if (pole.dim() != d) throw std::invalid_argument("pole dimension mismatch");
  const auto dom = TruncatedDomain::make(DomainKind::Whole, d, R);
  GreenTable t;
  t.kind = DomainKind::Whole;
  t.dim = d;
  t.pole = pole;
  t.radius = R;
  t.tol = tol;
  const auto g_r = solve_delta(dom, pole, tol);
  t.extrapolation_record.emplace_back(R, g_r(pole));

  if (d == 2) {
    t.values = g_r;
    const double shift = g_r(pole);
    auto vals = t.values.data();
    for (std::int64_t i = 0; i < dom->box_size(); ++i) {
      if (dom->label(i) != CellLabel::Outside) vals[static_cast<std::size_t>(i)] -= shift;
    }
    t.fitted_constant = fit_whole_constant(t.values, pole, 2.0, R / 4);
  } else if (!extrapolate) {
    t.values = g_r;
  } else {
    const auto dom2 = TruncatedDomain::make(DomainKind::Whole, d, 2 * R);
    const auto g_2r = solve_delta(dom2, pole, tol);
    t.extrapolation_record.emplace_back(2 * R, g_2r(pole));
    const double c = std::ldexp(1.0, d - 2);
    t.values = sample_field<double>(
        dom, [&](const LatticePoint& x) { return (c * g_2r(x) - g_r(x)) / (c - 1); },
        Support::Closure);
    t.extrapolation_record.emplace_back(std::numeric_limits<double>::infinity(), t.values(pole));
  }
  if (d >= 3) t.fitted_constant = fit_whole_constant(t.values, pole, R / 4, R / 2);
  t.max_residual = interior_residual(t.values, pole);
  return t;
}

GreenTable direct_green(DomainKind kind, int d, const LatticePoint& pole, double R, double tol) {
  check_common(d, R, tol);
  if (!in_kind(kind, pole)) throw std::invalid_argument("pole outside the domain kind");
  const auto dom = TruncatedDomain::make(kind, d, R);
  GreenTable t;
  t.kind = kind;
  t.dim = d;
  t.pole = pole;
  t.radius = R;
  t.tol = tol;
  t.values = solve_delta(dom, pole, tol);
  t.extrapolation_record.emplace_back(R, t.values(pole));
  t.max_residual = interior_residual(t.values, pole);
  return t;
}

GreenTable image_green(DomainKind kind, int d, const LatticePoint& pole, double R, double tol) {
  check_common(d, R, tol);
  if (kind == DomainKind::Whole) throw std::invalid_argument("image_green: kind must be half or quadrant");
  if (!in_kind(kind, pole)) throw std::invalid_argument("pole outside the domain kind");
  const auto whole = TruncatedDomain::make(DomainKind::Whole, d, R);
  GreenTable base;
  base.kind = DomainKind::Whole;
  base.dim = d;
  base.pole = pole;
  base.radius = R;
  base.values = solve_delta(whole, pole, tol);

  const auto dom = TruncatedDomain::make(kind, d, R);
  GreenTable t;
  t.kind = kind;
  t.dim = d;
  t.pole = pole;
  t.radius = R;
  t.tol = tol;
  t.values = sample_field<double>(
      dom,
      [&](const LatticePoint& x) {
        return kind == DomainKind::Half ? half_green(x, pole, base) : quadrant_green(x, pole, base);
      },
      Support::Closure);
  t.extrapolation_record.emplace_back(R, t.values(pole));
  t.max_residual = interior_residual(t.values, pole);
  return t;
}

namespace {

void check_base(const GreenTable& base, const LatticePoint& x, const LatticePoint& y) {
  if (base.kind != DomainKind::Whole) throw std::invalid_argument("image kernels need a whole-lattice base table");
  if (x.dim() != base.dim || y.dim() != base.dim) throw std::invalid_argument("dimension mismatch");
}

enum class Mode { Reflect, Translate };

Mode image_mode(const GreenTable& base, const LatticePoint& y) {
  if (base.pole == y) return Mode::Reflect;
  if (base.pole == LatticePoint::origin(base.dim)) return Mode::Translate;
  throw std::invalid_argument("base table pole must be the origin or the source point");
}

}  // namespace

double half_green(const LatticePoint& x, const LatticePoint& y, const GreenTable& base) {
  check_base(base, x, y);
  if (x[0] < 0 || y[0] < 0) throw std::invalid_argument("half_green: points must satisfy x1 >= 0");
  if (x[0] == 0 || y[0] == 0) return 0.0;
  if (image_mode(base, y) == Mode::Reflect) return base.at(x) - base.at(x.reflected(0));
  return base.at(x - y) - base.at(x - y.reflected(0));
}

double quadrant_green(const LatticePoint& x, const LatticePoint& y, const GreenTable& base) {
  check_base(base, x, y);
  if (x[0] < 0 || x[1] < 0 || y[0] < 0 || y[1] < 0) {
    throw std::invalid_argument("quadrant_green: points must satisfy x1, x2 >= 0");
  }
  if (x[0] == 0 || x[1] == 0 || y[0] == 0 || y[1] == 0) return 0.0;
  const auto xs = x.reflected(0), xh = x.reflected(1), xsh = xs.reflected(1);
  if (image_mode(base, y) == Mode::Reflect) {
    return base.at(x) - base.at(xs) - base.at(xh) + base.at(xsh);
  }
  const auto ys = y.reflected(0), yh = y.reflected(1), ysh = ys.reflected(1);
  return base.at(x - y) - base.at(x - ys) - base.at(x - yh) + base.at(x - ysh);
}

TranslationFamily::TranslationFamily(DomainKind kind, std::shared_ptr<const GreenTable> base)
    : kind_(kind), base_(std::move(base)) {
  if (base_->kind != DomainKind::Whole || base_->pole != LatticePoint::origin(base_->dim)) {
    throw std::invalid_argument("translation family needs a whole-lattice table with pole 0");
  }
}

double TranslationFamily::operator()(const LatticePoint& x, const LatticePoint& y) const {
  switch (kind_) {
    case DomainKind::Whole: return base_->at(x - y);
    case DomainKind::Half: return half_green(x, y, *base_);
    case DomainKind::Quadrant: return quadrant_green(x, y, *base_);
  }
  return 0.0;
}

void ColumnFamily::add(GreenTable column) {
  if (column.kind != kind_ || column.dim != dim_) throw std::invalid_argument("column kind/dimension mismatch");
  const auto pole = column.pole;
  columns_.insert_or_assign(pole, std::move(column));
}

const GreenTable& ColumnFamily::column(const LatticePoint& y) const {
  const auto it = columns_.find(y);
  if (it == columns_.end()) throw std::out_of_range("no kernel column for pole " + y.to_string());
  return it->second;
}

double ColumnFamily::operator()(const LatticePoint& x, const LatticePoint& y) const {
  return column(y).at(x);
}

LatticeField convolve(const GreenFamily& kernel, const LatticeField& f, const DomainPtr& target) {
  if (f.domain().dim() != kernel.dim() || target->dim() != kernel.dim()) {
    throw std::invalid_argument("convolve: dimension mismatch");
  }
  LatticeField out(target);
  auto acc = out.data();
  const auto& src = f.domain();
  for (std::int64_t j = 0; j < src.box_size(); ++j) {
    const double fy = f.at_index(j);
    if (fy == 0.0) continue;
    const auto y = src.point_at(j);
    for (std::int64_t i = 0; i < target->box_size(); ++i) {
      if (target->label(i) == CellLabel::Outside) continue;
      acc[static_cast<std::size_t>(i)] += kernel(target->point_at(i), y) * fy;
    }
  }
  return out;
}

BoundReport kernel_bound_report(const GreenTable& table, std::optional<Cone> cone,
                                std::optional<double> rmin, std::optional<double> rmax) {
  BoundReport rep;
  rep.rmin = rmin.value_or(table.radius / 4);
  rep.rmax = rmax.value_or(table.radius / 2);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  const auto& dom = table.values.domain();
  const auto& y = table.pole;
  const int d = table.dim;
  const double ynorm = y.norm();
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    if (dom.label(i) == CellLabel::Outside) continue;
    const auto x = dom.point_at(i);
    const double r = x.norm();
    if (r < rep.rmin || r > rep.rmax) continue;
    if (cone && !in_cone(*cone, x)) continue;
    const double dist = 1.0 + (x - y).norm();
    double profile = 0.0;
    switch (table.kind) {
      case DomainKind::Whole:
        profile = d == 2 ? std::log(dist) : std::pow(dist, 2.0 - d);
        break;
      case DomainKind::Half:
        if (r < 2 * ynorm) continue;
        profile = double(x[0]) * y[0] * std::pow(dist, -d);
        break;
      case DomainKind::Quadrant:
        if (r < 2 * ynorm) continue;
        profile = double(x[0]) * x[1] * y[0] * y[1] * std::pow(dist, -d - 2.0);
        break;
    }
    if (profile == 0.0) continue;
    const double ratio = table.values.at_index(i) / profile;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.samples;
  }
  if (rep.samples == 0) throw std::invalid_argument("kernel_bound_report: empty region");
  return rep;
}

std::shared_ptr<const GreenTable> cached_whole_green(int d, const LatticePoint& pole, double R,
                                                     double tol) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const GreenTable>> memo;
  std::ostringstream key;
  key << "whole_d" << d << "_R" << io::format_double(R) << "_tol" << io::format_double(tol) << "_pole";
  for (int k = 0; k < pole.dim(); ++k) key << '_' << pole[k];
  std::lock_guard lock(mu);
  if (auto it = memo.find(key.str()); it != memo.end()) return it->second;

  std::shared_ptr<const GreenTable> table;
  const auto dir = io::cache_dir();
  const auto path = dir ? *dir / (key.str() + ".csv") : std::filesystem::path();
  if (dir && std::filesystem::exists(path) && std::filesystem::exists(path.string() + ".json")) {
    try {
      table = std::make_shared<const GreenTable>(io::load_table(path));
    } catch (const std::exception&) {
      table.reset();  // stale or corrupt entry: recompute
    }
  }
  if (!table) {
    table = std::make_shared<const GreenTable>(whole_green(d, pole, R, tol));
    if (dir) io::save_table(path, *table);
  }
  memo.emplace(key.str(), table);
  return table;
}

}  // namespace lanemden
