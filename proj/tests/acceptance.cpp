// Acceptance run: one PASS/FAIL line per criterion.  Criterion 11 is
// exploratory and never affects the exit code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "lanemden/analysis.hpp"
#include "lanemden/greens.hpp"
#include "lanemden/solvers.hpp"
#include "oracles.hpp"

using namespace lanemden;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

ProblemSpec make_spec(DomainKind kind, int d, double p, PotentialSpec Q) {
  ProblemSpec s;
  s.kind = kind;
  s.d = d;
  s.p = p;
  s.Q = std::move(Q);
  return s;
}

double interior_residual(const GreenTable& t) {
  double r = 0;
  const auto& dom = t.values.domain();
  for (const auto& x : dom.interior_points()) {
    r = std::max(r, std::abs(-oracle::laplacian_at(t.values, x) - (x == t.pole ? 1.0 : 0.0)));
  }
  return r;
}

// ---------------------------------------------------------------- criteria

void laplacian_identities(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int d = 2; d <= 4; ++d) {
    const double R = d == 2 ? 40 : (d == 3 ? 20 : 10);
    const auto dom = TruncatedDomain::make(DomainKind::Whole, d, R);
    const auto c = sample_field<std::int64_t>(dom, [](const LatticePoint&) { return std::int64_t{5}; }, Support::Closure);
    const auto sq = sample_field<std::int64_t>(dom, [](const LatticePoint& x) { return x.norm_sq(); }, Support::Closure);
    const auto lc = laplacian_apply(c), lsq = laplacian_apply(sq);
    std::int64_t bad = 0;
    for (const auto& x : dom->interior_points()) bad += (lc(x) != 0) + (lsq(x) != 2 * d);
    o.require(bad == 0, "identity broken in d=" + std::to_string(d));
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << "d=2,3,4 exact; " << s << " s";
  o.require(s < 1.0, "runtime");
}

void green_equations(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double R = 40, tol = 1e-11;
  double worst_res = 0, worst_bdry = 0, worst_agree = 0;
  for (int d = 2; d <= 3; ++d) {
    const auto w = whole_green(d, LatticePoint::origin(d), R, tol);
    worst_res = std::max(worst_res, interior_residual(w));
    for (auto kind : {DomainKind::Half, DomainKind::Quadrant}) {
      std::vector<LatticePoint> poles;
      if (d == 2) poles = {LatticePoint{1, 1}, LatticePoint{4, 7}, LatticePoint{6, 2}};
      else poles = {LatticePoint{1, 1, 0}, LatticePoint{3, 5, -2}, LatticePoint{6, 2, 4}};
      for (const auto& y : poles) {
        const auto img = image_green(kind, d, y, R, tol);
        const auto dir = direct_green(kind, d, y, R, tol);
        worst_res = std::max({worst_res, interior_residual(img), interior_residual(dir)});
        for (const auto& x : img.values.domain().boundary_points()) worst_bdry = std::max(worst_bdry, std::abs(img.at(x)));
        for (const auto& x : img.values.domain().interior_points()) {
          if (x.norm() > 10) continue;
          worst_agree = std::max(worst_agree, std::abs(img.at(x) - dir.at(x)) / std::abs(dir.at(x)));
        }
      }
    }
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << "residual " << worst_res << ", boundary max " << worst_bdry << ", image/direct " << worst_agree << "; "
           << s << " s";
  o.require(worst_res <= 1e-9, "residual");
  o.require(worst_bdry == 0.0, "boundary not exactly zero");
  o.require(worst_agree <= 1e-6, "image/direct agreement");
  o.require(s <= 120, "runtime");
}

void asymptotics(Outcome& o) {
  const auto base = cached_whole_green(3, LatticePoint::origin(3), 60, 1e-10);
  const auto whole = decay_fit(base->values, 15, 30);
  const TranslationFamily half(DomainKind::Half, base), quad(DomainKind::Quadrant, base);
  const LatticePoint e1{1, 0, 0}, y111{1, 1, 1};
  const auto h = decay_fit_ray([&](const LatticePoint& x) { return half(x, e1); }, LatticePoint{1, 1, 1}, 15, 30);
  const auto q = decay_fit_ray([&](const LatticePoint& x) { return quad(x, y111); }, LatticePoint{1, 1, 1}, 15, 30);
  o.detail << "whole " << whole.exponent << ", half " << h.exponent << ", quadrant " << q.exponent;
  o.require(std::abs(whole.exponent + 1) <= 0.05, "whole exponent");
  o.require(std::abs(h.exponent + 2) <= 0.1, "half exponent");
  o.require(std::abs(q.exponent + 3) <= 0.15, "quadrant exponent");
}

void operator_layer(Outcome& o) {
  const auto spec = make_spec(DomainKind::Whole, 3, 7, PotentialSpec::power_law(1, 0));
  const auto K = make_dirichlet_operator(spec, 8);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  auto rnd = [&](bool nonzero) {
    return sample_field<double>(K.domain(), [&](const LatticePoint&) {
      double v = U(rng);
      if (nonzero && std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
      return v;
    });
  };
  double sym = 0, min_form = INFINITY, grad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto u = rnd(false), v = rnd(false);
    const double a = K.form(u, v), b = K.form(v, u);
    sym = std::max(sym, std::abs(a - b) / std::abs(a));
  }
  for (int i = 0; i < 100; ++i) {
    const auto u = rnd(false);
    min_form = std::min(min_form, K.form(u, u));
  }
  for (int i = 0; i < 20; ++i) {
    const auto v = rnd(true), w = rnd(false);
    const double h = 1e-6 * norm(v, NormKind::Strong, 2);
    const double fd = (energy(v + h * w, K) - energy(v - h * w, K)) / (2 * h);
    const auto g = energy_gradient(v, K);
    double an = 0;
    for (std::int64_t k = 0; k < g.domain().box_size(); ++k) an += g.at_index(k) * w.at_index(k);
    grad = std::max(grad, std::abs(fd - an) / std::abs(an));
  }
  o.detail << "symmetry " << sym << ", min form " << min_form << ", gradient " << grad;
  o.require(sym <= 1e-10, "symmetry");
  o.require(min_form >= 0, "form sign");
  o.require(grad <= 1e-5, "gradient");
}

void sublinear(Outcome& o) {
  const auto spec = make_spec(DomainKind::Whole, 3, 1.5, PotentialSpec::power_law(1, 3));
  const double R = 40;
  const auto res = monotone_solve(spec, R, 1e-8);
  bool sandwich = true;
  for (const auto& x : res.u.domain().interior_points()) sandwich = sandwich && res.u(x) > 0 && res.u(x) <= (*res.upper)(x);
  const double fit = res.decay_fit ? res.decay_fit->exponent : NAN;
  // uniqueness: two different seeds, run to a tighter tolerance so the
  // comparison measures the solutions rather than the stopping rule
  MonotoneOptions a, b;
  b.seed_pole = LatticePoint{3, -2, 1};
  b.seed_factor = 0.125;
  const auto ua = monotone_solve(spec, R, 1e-11, a), ub = monotone_solve(spec, R, 1e-11, b);
  const double gap = norm(ua.u - ub.u, NormKind::Sup);
  o.detail << res.iterations << " iterations, residual " << res.residual << ", decay " << fit << ", seed gap " << gap;
  o.require(res.monotone, "monotonicity");
  o.require(res.iterations <= 200, "iteration count");
  o.require(res.residual <= 2e-8, "fixed-point residual");
  o.require(sandwich, "0 < u <= supersolution");
  o.require(fit >= -1.1 && fit <= -0.4, "decay exponent");
  o.require(gap <= 1e-7, "uniqueness");
}

void linear(Outcome& o) {
  const auto spec = make_spec(DomainKind::Whole, 3, 2, PotentialSpec::power_law(1, 3));
  const auto e = eigen_solve(spec, 40, 1e-8);
  bool nondecreasing = true;
  for (std::size_t i = 1; i < e.rayleigh_history.size(); ++i) {
    nondecreasing = nondecreasing && e.rayleigh_history[i] >= e.rayleigh_history[i - 1] * (1 - 1e-12);
  }
  bool positive = true;
  for (const auto& x : e.v1.domain().interior_points()) positive = positive && e.v1(x) > 0;
  o.detail << "lambda1 " << e.lambda1 << ", " << e.iterations << " iterations, residual " << e.residual;
  o.require(e.lambda1 > 0, "lambda1 > 0");
  o.require(nondecreasing, "Rayleigh history");
  o.require(e.residual <= 1e-8, "residual");
  o.require(positive, "positivity");
}

void supercritical(Outcome& o) {
  struct Case {
    DomainKind kind;
    int d;
    double p;
  };
  for (const auto& c : {Case{DomainKind::Whole, 3, 7}, Case{DomainKind::Half, 2, 5}}) {
    const auto spec = make_spec(c.kind, c.d, c.p, PotentialSpec::compact(5));
    const auto res = ground_state_solve(spec, 30, 1e-6);
    bool positive = true;
    for (const auto& x : res.u.domain().interior_points()) positive = positive && res.u(x) > 0;
    o.detail << to_string(c.kind) << " d=" << c.d << " p=" << c.p << ": " << res.iterations << " iterations, residual "
             << res.residual << ", level " << *res.level << "; ";
    o.require(res.residual <= 1e-6, "residual");
    o.require(positive, "u > 0");
    o.require(*res.level > 0, "level > 0");
  }
}

void bootstrap_certificates(Outcome& o) {
  const auto a = bootstrap(DomainKind::Whole, 3, 0, 0.5);
  double tail = 0;
  for (std::size_t j = 60; j < a.tau.size(); ++j) tail = std::max(tail, std::abs(a.tau[j] - 4));
  const auto b = bootstrap(DomainKind::Whole, 3, 0, 2.9);
  const auto c = bootstrap(DomainKind::Whole, 3, 0, 3);
  double lim = 0;
  for (double alpha : {0.0, 0.3, 0.7}) {
    for (double f : {0.2, 0.5, 0.8}) {
      // stay inside q < (d - alpha)/(d - 2b) for both domains
      const double q = f * (3 - alpha) / 3;
      const auto h = bootstrap(DomainKind::Half, 3, alpha, q, 200);
      const auto k = bootstrap(DomainKind::Quadrant, 3, alpha, q, 200);
      if (h.tau.empty() || k.tau.empty()) {
        lim = INFINITY;
        continue;
      }
      lim = std::max({lim, std::abs(h.tau.back() - (1 - alpha) / (1 - q)), std::abs(k.tau.back() + alpha / (1 - q))});
    }
  }
  o.detail << "tail " << tail << ", j0(q=2.9) " << (b.j0 ? *b.j0 : -1) << ", q=3 " << to_string(c.verdict)
           << ", limit error " << lim;
  o.require(tail <= 1e-9, "tail");
  o.require(b.j0 && *b.j0 == 2, "termination index");
  o.require(c.verdict == BootstrapVerdict::InvalidRegime, "regime boundary");
  o.require(lim <= 1e-9, "half/quadrant limits");
}

void classifier_grid(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Rational step(1, 20);
  int transitions = 0, unexplained = 0, open_quadrant = 0;
  struct Dom {
    DomainKind kind;
    int d;
  };
  for (const auto& dm : {Dom{DomainKind::Whole, 3}, Dom{DomainKind::Half, 3}, Dom{DomainKind::Quadrant, 3},
                         Dom{DomainKind::Quadrant, 2}}) {
    const int b2 = dm.kind == DomainKind::Whole ? 2 : (dm.kind == DomainKind::Half ? 1 : 0);
    for (Rational a(0); a <= Rational(4); a = a + step) {
      // critical values written out from the exponent formulas
      const Rational ser = Rational(1) + (Rational(dm.d) - a) / Rational(dm.d - b2);
      const Rational sob = Rational(2) * (Rational(dm.d) - a) / Rational(dm.d - b2);
      std::optional<Verdict> prev;
      Rational pprev(1);
      for (Rational p = Rational(1) + step; p <= Rational(8); p = p + step) {
        const auto v = classify_exact(dm.kind, dm.d, a, p).verdict;
        if (dm.kind == DomainKind::Quadrant && v == Verdict::Open) ++open_quadrant;
        if (prev && *prev != v) {
          ++transitions;
          bool explained = false;
          for (const auto& c : {ser, sob, Rational(2)}) explained = explained || (pprev <= c && c <= p);
          unexplained += !explained;
        }
        prev = v;
        pprev = p;
      }
    }
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << transitions << " transitions, " << unexplained << " off the exponent curves, " << open_quadrant
           << " open quadrant cells; " << s << " s";
  o.require(unexplained == 0, "transition placement");
  o.require(open_quadrant == 0, "quadrant open cells");
  o.require(s <= 10, "runtime");
}

void max_principle_suite(Outcome& o) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(0, 1);
  int violations = 0, planted_missed = 0, runs = 0;
  for (auto kind : {DomainKind::Whole, DomainKind::Half, DomainKind::Quadrant}) {
    const auto dom = TruncatedDomain::make(kind, 3, 10);
    const auto pts = dom->interior_points();
    const auto comp = interior_components(*dom);
    const LatticeField kappa(dom);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (int i = 0; i < 50; ++i, ++runs) {
      const double density = U(rng);
      const auto f = sample_field<double>(dom, [&](const LatticePoint&) { return U(rng) < density ? U(rng) : 0.0; });
      const auto u = solve_poisson(f, 1e-12).u;
      violations += static_cast<int>(check_max_principle(u, kappa).violations());
      auto bad = u;
      const auto x = pts[pick(rng)];
      bad.set(x, -1.0 - U(rng));
      const auto r = check_max_principle(bad, kappa);
      const bool found = r.negative_points.size() == 1 && r.negative_points[0] == x &&
                         r.negative_components[0] == comp[static_cast<std::size_t>(dom->index_of(x))];
      planted_missed += !found;
    }
  }
  o.detail << runs << " solves, " << violations << " violations, " << planted_missed << " planted misses";
  o.require(violations == 0, "violations");
  o.require(planted_missed == 0, "planted detection");
}

void probe(Outcome& o) {
  const auto p3 = nonexistence_probe(make_spec(DomainKind::Whole, 3, 3, PotentialSpec::power_law(1, 0)), {10, 20, 40}, 1e-6);
  const auto p7 = nonexistence_probe(make_spec(DomainKind::Whole, 3, 7, PotentialSpec::power_law(1, 0)), {20, 40}, 1e-6);
  o.detail << "p=3 " << p3.trend << " (";
  for (const auto& [R, a] : p3.amplitudes) o.detail << "R=" << R << ":" << a << " ";
  o.detail << "certificate " << (p3.certificate ? "fires" : "silent") << "); p=7 " << p7.trend << " (";
  for (const auto& [R, a] : p7.amplitudes) o.detail << "R=" << R << ":" << a << " ";
  o.detail << ")";
  o.require(p3.trend == "vanishing trend", "p=3 trend");
  o.require(p7.trend == "stable", "p=7 trend");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
    bool gating;
  };
  const std::vector<Criterion> all = {
      {1, "laplacian identities", laplacian_identities, true},
      {2, "green defining equations", green_equations, true},
      {3, "kernel asymptotics", asymptotics, true},
      {4, "operator layer", operator_layer, true},
      {5, "sublinear regime", sublinear, true},
      {6, "linear regime", linear, true},
      {7, "supercritical regime", supercritical, true},
      {8, "bootstrap certificates", bootstrap_certificates, true},
      {9, "classifier grid", classifier_grid, true},
      {10, "maximum principle suite", max_principle_suite, true},
      {11, "nonexistence probe (exploratory)", probe, false},
  };
  int gating_failures = 0;
  for (const auto& c : all) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.pass ? "PASS" : (c.gating ? "FAIL" : "FAIL (non-gating)");
    std::printf("criterion %2d %-34s %s  %.1fs  %s\n", c.id, c.name, tag, s, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass && c.gating) ++gating_failures;
  }
  return gating_failures == 0 ? 0 : 1;
}
