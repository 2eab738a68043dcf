#include "lanemden/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace lanemden {

// ---------------------------------------------------------------- exponents

int alpha_threshold(DomainKind kind) {
  switch (kind) {
    case DomainKind::Whole: return 2;
    case DomainKind::Half: return 1;
    case DomainKind::Quadrant: return 0;
  }
  return 0;
}

namespace {

void check_exponent_dim(DomainKind kind, int d) {
  if (d < 2 || (kind == DomainKind::Whole && d < 3)) {
    throw std::invalid_argument("critical exponents need d >= 3 (whole) or d >= 2");
  }
}

}  // namespace

ExponentPair exponents(DomainKind kind, int d, double alpha) {
  check_exponent_dim(kind, d);
  const double denom = d - alpha_threshold(kind);
  return {kind, d, alpha, 1.0 + (d - alpha) / denom, 2.0 * (d - alpha) / denom};
}

Rational serrin_exact(DomainKind kind, int d, const Rational& alpha) {
  check_exponent_dim(kind, d);
  return Rational(1) + (Rational(d) - alpha) / Rational(d - alpha_threshold(kind));
}

Rational sobolev_exact(DomainKind kind, int d, const Rational& alpha) {
  check_exponent_dim(kind, d);
  return Rational(2) * (Rational(d) - alpha) / Rational(d - alpha_threshold(kind));
}

// ---------------------------------------------------------------- classifier

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ExistsVariational: return "ExistsVariational";
    case Verdict::ExistsSublinearUnique: return "ExistsSublinearUnique";
    case Verdict::LinearEigenRegime: return "LinearEigenRegime";
    case Verdict::Nonexistent: return "Nonexistent";
    case Verdict::Open: return "Open";
    case Verdict::OutOfTheory: return "OutOfTheory";
  }
  return "?";
}

Classification classify(DomainKind kind, int d, double alpha, double p, WeightTraits traits) {
  if (!(p > 1)) throw std::invalid_argument("classify: p must exceed 1");
  std::optional<Rational> a;
  if (std::isinf(alpha) && alpha > 0) {
    a = std::nullopt;
  } else if (std::isfinite(alpha)) {
    a = Rational::from_double(alpha);
  } else {
    throw std::invalid_argument("classify: alpha must be finite or +inf");
  }
  return classify_exact(kind, d, a, Rational::from_double(p), traits);
}

Classification classify_exact(DomainKind kind, int d, std::optional<Rational> alpha, const Rational& p,
                              WeightTraits traits) {
  using V = Verdict;
  if (p <= Rational(1)) throw std::invalid_argument("classify: p must exceed 1");
  if (d < 2 || (kind == DomainKind::Whole && d < 3)) {
    return {V::OutOfTheory, "whole-lattice theory needs d >= 3"};
  }
  const Rational two(2);
  const Rational astar(alpha_threshold(kind));
  // alpha = +inf (compact support) behaves like alpha larger than every threshold.
  const bool a_inf = !alpha.has_value();
  auto a_cmp = [&](const Rational& x) {
    return a_inf ? std::strong_ordering::greater : (*alpha <=> x);
  };
  const bool bounded = a_cmp(Rational(0)) >= 0;
  // serrin/sobolev exist as finite numbers only for finite alpha; for
  // alpha = +inf both are -inf.
  auto p_vs_serrin = [&]() {
    return a_inf ? std::strong_ordering::greater : (p <=> serrin_exact(kind, d, *alpha));
  };
  auto p_vs_sobolev = [&]() {
    return a_inf ? std::strong_ordering::greater : (p <=> sobolev_exact(kind, d, *alpha));
  };

  if (p < two) {
    if (a_cmp(astar) > 0) return {V::ExistsSublinearUnique, "sublinear: 1 < p < 2 and alpha > 2b gives a unique positive solution"};
    if (a_cmp(astar) < 0) return {V::Nonexistent, "nonexistence: alpha < 2b and 1 < p < serrin"};
    return {V::OutOfTheory, "alpha = 2b with 1 < p < 2 is not covered"};
  }

  if (p == two) {
    if (a_cmp(astar) < 0) return {V::Nonexistent, "nonexistence: alpha < 2b and p = 2 < serrin"};
    if (kind == DomainKind::Quadrant) {
      return {V::OutOfTheory, "p = 2 eigenvalue regime needs 0 < b < d/2; not available in the quadrant"};
    }
    if (a_cmp(astar) > 0) return {V::LinearEigenRegime, "p = 2: sobolev < 2, compact Birman-Schwinger operator"};
    if (traits.weight_vanishes) return {V::LinearEigenRegime, "p = 2 = sobolev with vanishing weight"};
    return {V::OutOfTheory, "p = 2 = sobolev without vanishing weight"};
  }

  // p > 2
  if (kind == DomainKind::Quadrant) {
    if (bounded) return {V::ExistsVariational, "quadrant existence: p > 2 and Q bounded"};
    const auto s = p_vs_serrin();
    if (s < 0) return {V::Nonexistent, "quadrant nonexistence: alpha < 0 and p < serrin"};
    if (s == 0) return {V::Open, "quadrant p = serrin: no statement either way"};
    return {V::OutOfTheory, "quadrant with unbounded Q above serrin"};
  }

  const auto sob = p_vs_sobolev();
  if (bounded && sob > 0) return {V::ExistsVariational, "existence: p > 2, p > sobolev, Q bounded"};
  if (bounded && sob == 0 && traits.weight_vanishes) {
    return {V::ExistsVariational, "existence: p > 2, p = sobolev with vanishing weight"};
  }
  if (a_cmp(astar) < 0) {
    const auto s = p_vs_serrin();
    if (s < 0) return {V::Nonexistent, "nonexistence: alpha < 2b and p < serrin"};
    if (s == 0) return {V::Nonexistent, "nonexistence: alpha < 2b and p = serrin > 2"};
    if (bounded && sob <= 0) return {V::Open, "open strip: serrin < p <= sobolev with 0 <= alpha < 2b"};
    return {V::OutOfTheory, "alpha < 0 above serrin"};
  }
  return {V::OutOfTheory, "p = sobolev without vanishing weight"};
}

// ---------------------------------------------------------------- bootstrap

std::string_view to_string(BootstrapVerdict v) {
  switch (v) {
    case BootstrapVerdict::Terminates: return "Terminates";
    case BootstrapVerdict::ConvergesBelowThreshold: return "ConvergesBelowThreshold";
    case BootstrapVerdict::InvalidRegime: return "InvalidRegime";
  }
  return "?";
}

BootstrapTrace bootstrap(DomainKind kind, int d, double alpha, double q, int max_steps) {
  BootstrapTrace t{kind, d, alpha, q, {}, std::nullopt, BootstrapVerdict::InvalidRegime, {}, std::nullopt};
  if (max_steps < 0) throw std::invalid_argument("bootstrap: negative step count");
  const int c = alpha_threshold(kind);
  if (d < 2 || (kind == DomainKind::Whole && d < 3)) {
    t.message = "dimension: need d >= 3 (whole) or d >= 2";
    return t;
  }
  const double bound = (d - alpha) / static_cast<double>(d - c);
  if (!(q > 0)) {
    t.message = "q > 0 violated";
    return t;
  }
  if (!(q < bound)) {
    t.message = "q < (d - alpha)/(d - 2b) = " + std::to_string(bound) + " violated";
    return t;
  }
  double tau = kind == DomainKind::Whole ? 2.0 - d : (kind == DomainKind::Half ? 1.0 - d : -double(d));
  for (int j = 0; j <= max_steps; ++j) {
    t.tau.push_back(tau);
    if (!t.j0 && q * tau - alpha >= -c) t.j0 = j;
    tau = q * tau + c - alpha;
  }
  t.verdict = t.j0 ? BootstrapVerdict::Terminates : BootstrapVerdict::ConvergesBelowThreshold;
  if (q < 1) t.limit = (c - alpha) / (1 - q);
  return t;
}

// ---------------------------------------------------------------- decay fits

namespace {

DecayFit fit_log(const std::vector<double>& r, const std::vector<double>& v, bool with_log) {
  const auto n = static_cast<Eigen::Index>(r.size());
  const int cols = with_log ? 3 : 2;
  Eigen::MatrixXd a(n, cols);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lr = std::log(r[static_cast<std::size_t>(i)]);
    a(i, 0) = 1.0;
    a(i, 1) = lr;
    if (with_log) a(i, 2) = std::log(lr);
    b(i) = std::log(v[static_cast<std::size_t>(i)]);
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  DecayFit fit;
  fit.exponent = x(1);
  if (with_log) fit.log_power = x(2);
  fit.residual = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n));
  fit.samples = static_cast<int>(n);
  return fit;
}

void check_fit_range(double rmin, double rmax, bool with_log) {
  if (!(rmin > 0) || !(rmax >= rmin)) throw std::invalid_argument("decay_fit: need 0 < rmin <= rmax");
  if (with_log && rmin < 2) throw std::invalid_argument("decay_fit: the log term needs rmin >= 2");
}

}  // namespace

DecayFit decay_fit(const LatticeField& u, double rmin, double rmax, std::optional<Cone> cone, bool with_log) {
  check_fit_range(rmin, rmax, with_log);
  const auto& dom = u.domain();
  std::map<long, std::pair<double, long>> shells;
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    if (dom.label(i) != CellLabel::Interior) continue;
    const auto x = dom.point_at(i);
    const long r = std::lround(x.norm());
    if (r < rmin || r > rmax) continue;
    if (cone && !in_cone(*cone, x)) continue;
    const double v = u.at_index(i);
    if (!(v > 0)) throw std::domain_error("decay_fit: nonpositive sample at " + x.to_string());
    auto& s = shells[r];
    s.first += v;
    s.second += 1;
  }
  if (shells.size() < 5) throw std::invalid_argument("decay_fit: fewer than 5 nonempty shells");
  std::vector<double> rs, vs;
  for (const auto& [r, s] : shells) {
    rs.push_back(static_cast<double>(r));
    vs.push_back(s.first / static_cast<double>(s.second));
  }
  return fit_log(rs, vs, with_log);
}

DecayFit decay_fit_ray(const std::function<double(const LatticePoint&)>& u, const LatticePoint& direction,
                       double rmin, double rmax, bool with_log) {
  check_fit_range(rmin, rmax, with_log);
  const double step = direction.norm();
  if (step == 0) throw std::invalid_argument("decay_fit_ray: zero direction");
  std::vector<double> rs, vs;
  for (int k = 1; k * step <= rmax; ++k) {
    if (k * step < rmin) continue;
    auto x = direction;
    for (int a = 0; a < x.dim(); ++a) x[a] *= k;
    const double v = u(x);
    if (!(v > 0)) throw std::domain_error("decay_fit_ray: nonpositive sample at " + x.to_string());
    rs.push_back(k * step);
    vs.push_back(v);
  }
  if (rs.size() < 5) throw std::invalid_argument("decay_fit_ray: fewer than 5 ray points");
  return fit_log(rs, vs, with_log);
}

// ---------------------------------------------------------------- max principle

std::vector<int> interior_components(const TruncatedDomain& dom, int* count) {
  std::vector<int> comp(static_cast<std::size_t>(dom.box_size()), -1);
  const auto& g = dom.grid();
  int next = 0;
  std::deque<std::int64_t> queue;
  for (std::int64_t s = 0; s < dom.box_size(); ++s) {
    if (dom.label(s) != CellLabel::Interior || comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (int k = 0; k < g.dim; ++k) {
        for (std::int64_t j : {i + g.stride[static_cast<std::size_t>(k)], i - g.stride[static_cast<std::size_t>(k)]}) {
          if (dom.label(j) == CellLabel::Interior && comp[static_cast<std::size_t>(j)] < 0) {
            comp[static_cast<std::size_t>(j)] = next;
            queue.push_back(j);
          }
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

MaxPrincipleReport check_max_principle(const LatticeField& u, const LatticeField& kappa, std::optional<double> tol) {
  const auto& dom = u.domain();
  if (!kappa.domain().same_as(dom)) throw std::invalid_argument("kappa lives on another truncation");
  for (double k : kappa.data()) {
    if (k < 0) throw std::invalid_argument("kappa must be nonnegative");
  }
  MaxPrincipleReport rep;
  rep.tol = tol.value_or(1e-9 * norm(u, NormKind::Sup));
  const double eps = rep.tol;
  const auto lap = laplacian_apply(u);
  const auto comp = interior_components(dom, &rep.components);

  rep.outer_shell_min = std::numeric_limits<double>::infinity();
  std::vector<double> cmin(static_cast<std::size_t>(rep.components), std::numeric_limits<double>::infinity());
  std::vector<double> cmax(static_cast<std::size_t>(rep.components), -std::numeric_limits<double>::infinity());
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    const auto lab = dom.label(i);
    const double v = u.at_index(i);
    if (lab == CellLabel::Boundary) {
      if (v < -eps) rep.boundary_negative.push_back(dom.point_at(i));
      continue;
    }
    if (lab != CellLabel::Interior) continue;
    const auto x = dom.point_at(i);
    if (-lap.at_index(i) + kappa.at_index(i) * v < -eps) rep.supersolution_defects.push_back(x);
    if (x.norm() > dom.radius() - 1) rep.outer_shell_min = std::min(rep.outer_shell_min, v);
    const int c = comp[static_cast<std::size_t>(i)];
    cmin[static_cast<std::size_t>(c)] = std::min(cmin[static_cast<std::size_t>(c)], v);
    cmax[static_cast<std::size_t>(c)] = std::max(cmax[static_cast<std::size_t>(c)], std::abs(v));
    if (v < -eps) {
      rep.negative_points.push_back(x);
      rep.negative_components.push_back(c);
    }
  }
  if (!std::isfinite(rep.outer_shell_min)) rep.outer_shell_min = 0.0;
  rep.hypotheses_hold = rep.supersolution_defects.empty() && rep.boundary_negative.empty() &&
                        rep.outer_shell_min >= -eps;
  rep.conclusion_violated = rep.hypotheses_hold && !rep.negative_points.empty();
  // Strong form: a component whose minimum is ~0 must vanish identically.
  // Only meaningful where the supersolution inequality holds throughout.
  for (int c = 0; c < rep.components; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    if (cmax[cu] <= eps) {
      rep.zero_components.push_back(c);
    } else if (rep.hypotheses_hold && std::abs(cmin[cu]) <= eps) {
      rep.dichotomy_failures.push_back(c);
    }
  }
  rep.identically_zero = rep.zero_components.size() == static_cast<std::size_t>(rep.components);
  return rep;
}

}  // namespace lanemden
