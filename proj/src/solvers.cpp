#include "lanemden/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lanemden {

namespace {

using Span = std::span<double>;

double sup_abs(const LatticeField& u) { return norm(u, NormKind::Sup); }

// Pointwise helpers over the interior; other entries stay zero.
template <class F>
LatticeField map_interior(const LatticeField& a, F&& f) {
  LatticeField out(a.domain_ptr());
  auto od = out.data();
  const auto ad = a.data();
  for (const auto& run : a.domain().grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      const auto k = static_cast<std::size_t>(i);
      od[k] = f(ad[k], k);
    }
  }
  return out;
}

double pow_pos(double x, double e) { return x > 0 ? std::pow(x, e) : 0.0; }

LatticePoint argmax_interior(const LatticeField& q) {
  const auto& dom = q.domain();
  std::int64_t best = -1;
  double bv = -1.0;
  for (const auto& run : dom.grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      // Ties go to the point closest to the origin, then lexicographic order.
      const double v = q.at_index(i);
      if (v > bv || (v == bv && best >= 0 && dom.point_at(i).norm_sq() < dom.point_at(best).norm_sq())) {
        bv = v;
        best = i;
      }
    }
  }
  if (best < 0 || !(bv > 0)) throw std::invalid_argument("Q vanishes on the truncation interior");
  return dom.point_at(best);
}

std::optional<DecayFit> try_decay_fit(const LatticeField& u, double rmin, double rmax) {
  try {
    return decay_fit(u, rmin, rmax);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

// ---------------------------------------------------------------- Poisson

SolveResult solve_poisson(const LatticeField& f, double tol) {
  require_interior_support(f);
  LinearSolverOptions opt;
  opt.tol = tol;
  LinearSolveReport rep;
  SolveResult res;
  res.u = DirichletSolver(f.domain_ptr(), opt).solve(f, &rep);
  res.iterations = rep.iterations;
  const auto lap = laplacian_apply(res.u);
  double worst = 0.0;
  for (const auto& run : f.domain().grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      worst = std::max(worst, std::abs(-lap.at_index(i) - f.at_index(i)));
    }
  }
  res.residual = worst;
  res.regime = "poisson";
  return res;
}

SolveResult solve_poisson(DomainKind kind, const LatticeField& f, double R, double tol) {
  const auto target = TruncatedDomain::make(kind, f.domain().dim(), R);
  if (target->same_as(f.domain())) return solve_poisson(f, tol);
  LatticeField g(target);
  const auto& src = f.domain();
  for (std::int64_t i = 0; i < src.box_size(); ++i) {
    const double v = f.at_index(i);
    if (v == 0.0) continue;
    const auto x = src.point_at(i);
    if (!target->is_interior(x)) {
      throw std::out_of_range("source is nonzero at " + x.to_string() + ", outside the truncation interior");
    }
    g.set(x, v);
  }
  return solve_poisson(g, tol);
}

// ---------------------------------------------------------------- sublinear

double sublinear_tau(const ProblemSpec& spec) {
  spec.validate();
  const double p = spec.p;
  if (!(p > 1 && p < 2)) throw std::invalid_argument("sublinear regime: hypothesis 1 < p < 2 violated");
  const double alpha = spec.Q.decay_exponent();
  if (std::isnan(alpha)) throw std::invalid_argument("sublinear regime: Q needs a decay exponent (power law or compact)");
  const int c = alpha_threshold(spec.kind);
  if (!(alpha > c)) {
    throw std::invalid_argument("sublinear regime: hypothesis alpha > " + std::to_string(c) + " violated");
  }
  const double d = spec.d;
  const double first = std::isinf(alpha) ? -std::numeric_limits<double>::infinity() : -(alpha - c) / (2 - p);
  const double second = (c - d) / 2.0;
  return std::max(first, second);
}

Supersolution build_supersolution(const ProblemSpec& spec, double R, double lin_tol) {
  Supersolution s;
  s.tau_p = sublinear_tau(spec);
  const auto dom = TruncatedDomain::make(spec.kind, spec.d, R);
  const double shift = alpha_threshold(spec.kind);
  const double e = s.tau_p - shift;
  s.source = sample_field<double>(dom, [&](const LatticePoint& x) { return std::pow(1.0 + x.norm(), e); });
  const DirichletGreenOperator green(dom, lin_tol);
  const auto base = green.apply(s.source);
  const auto q = sample_potential(spec.Q, dom);
  const double qe = spec.q();
  double C = 0.0;
  for (const auto& run : dom->grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      C = std::max(C, q.at_index(i) * pow_pos(base.at_index(i), qe) / s.source.at_index(i));
    }
  }
  s.t1 = std::max(1.0, std::pow(C, 1.0 / (2.0 - spec.p)));
  s.field = s.t1 * base;
  return s;
}

SolveResult monotone_solve(const ProblemSpec& spec, double R, double tol, const MonotoneOptions& opt) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!(opt.seed_factor > 0 && opt.seed_factor <= 1)) throw std::invalid_argument("seed_factor must lie in (0, 1]");
  const auto super = build_supersolution(spec, R, opt.lin_tol);
  const auto dom = super.field.domain_ptr();
  const DirichletGreenOperator green(dom, opt.lin_tol);
  const auto Q = sample_potential(spec.Q, dom);
  const double q = spec.q();
  auto Qpow = [&](const LatticeField& u) {
    return map_interior(u, [&](double v, std::size_t k) { return Q.data()[k] * pow_pos(v, q); });
  };

  // Seed w = t2 Phi(., x0): Phi * (Q (t Phi)^q) >= t Phi  iff  t^{q-1} >= max Phi / Phi*(Q Phi^q).
  const LatticePoint x0 = opt.seed_pole.value_or(argmax_interior(Q));
  if (!dom->is_interior(x0) || !(Q(x0) > 0)) throw std::invalid_argument("seed pole must be interior with Q > 0");
  const auto phi = green.apply(delta_field(dom, x0));
  const auto g = green.apply(Qpow(phi));
  double M = 0.0;
  for (const auto& run : dom->grid().runs) {
    for (std::int64_t i = run.start; i < run.start + run.length; ++i) {
      if (phi.at_index(i) > 0 && g.at_index(i) > 0) M = std::max(M, phi.at_index(i) / g.at_index(i));
    }
  }
  if (!(M > 0)) throw std::runtime_error("could not build a subsolution seed");
  double t2 = std::exp2(std::floor(std::log2(std::pow(1.0 / M, 1.0 / (1.0 - q))))) * opt.seed_factor;
  for (int guard = 0; guard < 200; ++guard) {
    bool below = true;
    for (std::size_t k = 0; k < phi.data().size() && below; ++k) {
      below = t2 * phi.data()[k] <= super.field.data()[k];
    }
    if (below) break;
    t2 /= 2;
  }
  auto w = t2 * phi;

  SolveResult res;
  res.regime = "sublinear monotone iteration";
  res.seed_scale = t2;
  res.supersolution_scale = super.t1;
  res.monotone = true;

  LatticeField prev = w;
  LatticeField prev_pow = Qpow(w);
  LatticeField u = green.apply(prev_pow);
  for (int n = 1;; ++n) {
    double min_step = std::numeric_limits<double>::infinity(), max_step = 0.0;
    const auto ud = u.data();
    const auto pd = prev.data();
    for (std::size_t k = 0; k < ud.size(); ++k) {
      const double s = ud[k] - pd[k];
      min_step = std::min(min_step, s);
      max_step = std::max(max_step, std::abs(s));
    }
    const double sup_u = sup_abs(u);
    res.history.push_back({sup_u, max_step / sup_u});
    res.iterations = n;
    if (min_step < -opt.slack) {
      res.monotone = false;
      std::ostringstream os;
      os << "monotone iteration decreased by " << -min_step << " at step " << n
         << " (kernel/truncation inconsistency)";
      throw std::runtime_error(os.str());
    }
    if (max_step / sup_u <= tol) break;
    if (n >= opt.max_iterations) throw std::runtime_error("monotone iteration: iteration cap reached");
    // Increment form: the linear solve error scales with the increment.
    auto cur_pow = Qpow(u);
    const auto inc = green.apply(cur_pow - prev_pow);
    prev = u;
    prev_pow = std::move(cur_pow);
    u += inc;
  }

  const auto check = green.apply(Qpow(u));
  res.residual = sup_abs(u - check) / sup_abs(u);
  res.u = u;
  res.lower = w;
  res.upper = super.field;
  res.decay_fit = try_decay_fit(u, R / 8, std::max(R / 4, R / 8 + 5));
  return res;
}

// ---------------------------------------------------------------- p = 2

EigenResult eigen_solve(const ProblemSpec& spec, double R, double tol, const EigenOptions& opt) {
  if (spec.p != 2.0) throw std::invalid_argument("eigen_solve needs p = 2");
  EigenResult res;
  const double alpha = spec.Q.decay_exponent();
  if (std::isnan(alpha)) {
    res.regime_note = "decay exponent of Q unknown; condition 2*_{b,alpha} < 2 not checked";
  } else {
    const auto cls = classify(spec.kind, spec.d, alpha, 2.0, {.weight_vanishes = spec.Q.vanishes_faster_than(alpha)});
    res.regime_ok = cls.verdict == Verdict::LinearEigenRegime;
    res.regime_note = res.regime_ok ? cls.citation : "condition 2*_{b,alpha} < 2 fails: " + cls.citation;
  }
  const auto K = make_dirichlet_operator(spec, R, opt.lin_tol);
  LatticeField v = K.q_root();
  const double n0 = norm(v, NormKind::Strong, 2.0);
  if (n0 == 0.0) throw std::invalid_argument("Q vanishes on the truncation");
  v *= 1.0 / n0;
  for (int it = 1;; ++it) {
    const auto w = K.apply(v);
    double lambda = 0.0;
    for (std::size_t k = 0; k < v.data().size(); ++k) lambda += v.data()[k] * w.data()[k];
    if (!(lambda > 1e-14)) throw std::runtime_error("degenerate input: top eigenvalue below 1e-14");
    const double r = norm(w - lambda * v, NormKind::Strong, 2.0);
    res.rayleigh_history.push_back(lambda);
    res.residual_history.push_back(r);
    res.iterations = it;
    res.lambda1 = lambda;
    res.residual = r;
    if (r <= tol) {
      res.v1 = v;
      break;
    }
    if (it >= opt.max_iterations) throw std::runtime_error("power iteration: iteration cap reached");
    v = (1.0 / norm(w, NormKind::Strong, 2.0)) * w;
  }
  return res;
}

// ---------------------------------------------------------------- p > 2

SolveResult ground_state_solve(const ProblemSpec& spec, double R, double tol, const GroundStateOptions& opt) {
  if (!(spec.p > 2)) throw std::invalid_argument("ground_state_solve needs p > 2");
  const auto K = make_dirichlet_operator(spec, R, opt.lin_tol);
  const auto dom = K.domain();
  const double p = spec.p, pp = spec.p_prime();
  SolveResult res;
  const double alpha = spec.Q.decay_exponent();
  if (std::isnan(alpha)) {
    res.regime = "exploratory (tabulated Q)";
  } else {
    const auto cls = classify(spec.kind, spec.d, alpha, p, {.weight_vanishes = spec.Q.vanishes_faster_than(alpha)});
    res.regime = cls.verdict == Verdict::ExistsVariational ? std::string(cls.citation)
                                                           : "exploratory (" + std::string(to_string(cls.verdict)) + ")";
  }

  auto normalize = [&](LatticeField& v) {
    const double n = norm(v, NormKind::Strong, pp);
    if (!(n > 0) || !std::isfinite(n)) {
      throw std::runtime_error("no stable positive solution at this R: iterates collapsed");
    }
    v *= 1.0 / n;
  };

  const LatticePoint x0 = argmax_interior(K.q_field());
  const auto column = K.green().apply(delta_field(dom, x0));
  LatticeField v = map_interior(column, [&](double c, std::size_t k) { return K.q_root().data()[k] * c; });
  normalize(v);

  LatticeField w;
  for (int it = 1;; ++it) {
    w = K.apply(v);
    auto next = map_interior(w, [&](double x, std::size_t) { return std::copysign(std::pow(std::abs(x), p - 1), x); });
    normalize(next);
    const double change = sup_abs(next - v) / sup_abs(next);
    double b = 0.0;
    for (std::size_t k = 0; k < v.data().size(); ++k) b += v.data()[k] * w.data()[k];
    res.history.push_back({sup_abs(v), b});
    res.iterations = it;
    v = std::move(next);
    if (change <= opt.step_tol) break;
    if (it >= opt.max_iterations) throw std::runtime_error("ground state iteration: iteration cap reached");
  }
  w = K.apply(v);
  double A = power_sum(v, pp), B = 0.0;
  for (std::size_t k = 0; k < v.data().size(); ++k) B += v.data()[k] * w.data()[k];
  if (!(B > 0)) throw std::runtime_error("no stable positive solution at this R: B(v, v) = 0");
  const double t = nehari_scale(A, B, pp);
  const LatticeField vs = t * v;
  const auto grad = energy_gradient(vs, K);
  const double scale = std::pow(sup_abs(vs), pp - 1);
  res.residual = sup_abs(grad) / scale;
  if (res.residual > tol) {
    std::ostringstream os;
    os << "ground state residual " << res.residual << " exceeds " << tol;
    throw std::runtime_error(os.str());
  }
  res.nehari_multiplier = t;
  res.level = energy_from_parts(std::pow(t, pp) * A, t * t * B, pp);
  res.v = vs;

  // u = Phi * (Q^{1/p} v) solves u = Phi * (Q u^{p-1}).
  const auto qv = map_interior(vs, [&](double x, std::size_t k) { return K.q_root().data()[k] * x; });
  res.u = K.green().apply(qv);
  const auto Q = K.q_field();
  const auto rhs = map_interior(res.u, [&](double x, std::size_t k) { return Q.data()[k] * pow_pos(x, p - 1); });
  res.recovered_residual = sup_abs(res.u - K.green().apply(rhs)) / sup_abs(res.u);
  res.decay_fit = try_decay_fit(res.u, R / 8, std::max(R / 4, R / 8 + 5));
  res.monotone = false;
  return res;
}

// ---------------------------------------------------------------- probe

ProbeReport nonexistence_probe(const ProblemSpec& spec, const std::vector<double>& radii, double tol,
                               int certificate_max_n) {
  spec.validate();
  ProbeReport rep;
  for (double R : radii) {
    try {
      const auto res = ground_state_solve(spec, R, tol);
      rep.amplitudes.emplace_back(R, sup_abs(res.u));
    } catch (const SolverError&) {
      throw;  // a linear-solver failure says nothing about existence
    } catch (const std::runtime_error&) {
      rep.amplitudes.emplace_back(R, 0.0);
    }
  }
  if (rep.amplitudes.size() >= 2) {
    const double a0 = rep.amplitudes.front().second;
    bool decreasing = true, increasing = true, stable = a0 > 0;
    for (std::size_t i = 1; i < rep.amplitudes.size(); ++i) {
      const double prev = rep.amplitudes[i - 1].second, cur = rep.amplitudes[i].second;
      decreasing = decreasing && cur < prev;
      increasing = increasing && cur > prev;
      stable = stable && std::abs(cur - a0) <= 0.1 * a0;
    }
    rep.trend = stable ? "stable" : decreasing ? "vanishing trend" : increasing ? "growing" : "inconclusive";
  } else {
    rep.trend = "inconclusive";
  }

  // Divergence certificate.
  const int c = alpha_threshold(spec.kind);
  const double alpha = spec.Q.decay_exponent();
  const double q = spec.q();
  const int d = spec.d;
  if (std::isnan(alpha) || std::isinf(alpha)) {
    rep.verdict = "heuristic: no certificate (Q has no finite decay exponent)";
    return rep;
  }
  const auto trace = bootstrap(spec.kind, d, alpha, q, 100);
  double tau = spec.kind == DomainKind::Whole ? 2.0 - d : (spec.kind == DomainKind::Half ? 1.0 - d : -double(d));
  if (trace.j0) tau = trace.tau[static_cast<std::size_t>(*trace.j0)];
  rep.weight_exponent = q * tau - alpha;
  const double wexp = spec.kind == DomainKind::Whole ? 2.0 - d : (spec.kind == DomainKind::Half ? 1.0 - d : -double(d));
  int nmax = certificate_max_n;
  if (nmax <= 0) nmax = d == 2 ? 2048 : (d == 3 ? 128 : 32);
  // Accumulate per integer shell, then partial sums at dyadic n.
  std::vector<double> shell(static_cast<std::size_t>(nmax) + 1, 0.0);
  const auto box = TruncatedDomain::make(spec.kind, d, nmax);
  for (std::int64_t i = 0; i < box->box_size(); ++i) {
    if (box->label(i) != CellLabel::Interior) continue;
    const auto x = box->point_at(i);
    if (spec.kind == DomainKind::Half && !in_cone(Cone::A0, x)) continue;
    if (spec.kind == DomainKind::Quadrant && !in_cone(Cone::A1, x)) continue;
    const double r = x.norm();
    const auto s = static_cast<std::size_t>(std::ceil(r));
    shell[s] += std::pow(1.0 + r, rep.weight_exponent + wexp);
  }
  double S = 0.0;
  int next = 1;
  for (int n = 0; n <= nmax; ++n) {
    S += shell[static_cast<std::size_t>(n)];
    if (n == next) {
      rep.partial_sums.emplace_back(n, S);
      next *= 2;
    }
  }
  // Unbounded: dyadic increments stop shrinking (log growth or faster).
  bool numeric = false;
  const auto& ps = rep.partial_sums;
  if (ps.size() >= 4) {
    const std::size_t m = ps.size();
    const double inc1 = ps[m - 2].second - ps[m - 3].second;
    const double inc2 = ps[m - 1].second - ps[m - 2].second;
    numeric = inc1 > 0 && std::log2(inc2 / inc1) >= -0.05;
  }
  const bool analytic = rep.weight_exponent >= -c;
  rep.certificate = numeric && analytic;
  rep.verdict = rep.certificate ? "heuristic: consistent with nonexistence (weighted sum diverges)"
                                : "heuristic: no divergence certificate";
  return rep;
}

}  // namespace lanemden
