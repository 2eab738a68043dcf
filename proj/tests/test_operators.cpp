#include <doctest.h>

#include <cmath>
#include <random>

#include "lanemden/greens.hpp"
#include "lanemden/operators.hpp"
#include "oracles.hpp"

using namespace lanemden;

namespace {

ProblemSpec spec3(double p, double alpha) {
  ProblemSpec s;
  s.d = 3;
  s.kind = DomainKind::Whole;
  s.p = p;
  s.Q = PotentialSpec::power_law(1.0, alpha);
  return s;
}

LatticeField random_field(const DomainPtr& dom, std::mt19937& rng, bool nonzero = false) {
  std::uniform_real_distribution<double> U(-1, 1);
  return sample_field<double>(dom, [&](const LatticePoint&) {
    double v = U(rng);
    if (nonzero && std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
    return v;
  });
}

double dot(const LatticeField& a, const LatticeField& b) {
  double s = 0;
  for (std::int64_t i = 0; i < a.domain().box_size(); ++i) s += a.at_index(i) * b.at_index(i);
  return s;
}

}  // namespace

TEST_CASE("potentials") {
  const auto Q0 = PotentialSpec::power_law(2.5, 0.0);
  CHECK(Q0(LatticePoint{7, -3, 1}) == 2.5);
  const auto Q2 = PotentialSpec::power_law(3.0, 2.0);
  CHECK(Q2(LatticePoint{3, 0, 0}) == doctest::Approx(3.0 / 16));
  CHECK(Q2.decay_exponent() == 2.0);
  CHECK_FALSE(Q2.vanishes_faster_than(2.0));
  const auto C = PotentialSpec::compact(5);
  CHECK(C(LatticePoint{3, 4, 0}) == 1.0);
  CHECK(C(LatticePoint{3, 4, 1}) == 0.0);
  CHECK(std::isinf(C.decay_exponent()));
  CHECK(C.vanishes_faster_than(100));

  const auto dom = TruncatedDomain::make(DomainKind::Half, 3, 8);
  const auto q = sample_potential(Q2, dom, true);
  CHECK(q.domain().kind() == DomainKind::Whole);
  CHECK(q(LatticePoint{-3, 1, 2}) == q(LatticePoint{3, 1, 2}));
  CHECK(q(LatticePoint{3, 1, 2}) > 0);
  CHECK(q(LatticePoint{0, 1, 2}) == 0.0);
}

TEST_CASE("problem validation") {
  auto s = spec3(3, 0);
  CHECK_NOTHROW(s.validate());
  s.d = 2;
  CHECK_THROWS(s.validate());  // whole plane is recurrent
  s.kind = DomainKind::Half;
  CHECK_NOTHROW(s.validate());
  s.p = 1.0;
  CHECK_THROWS(s.validate());
  CHECK(spec3(7, 0).p_prime() == doctest::Approx(7.0 / 6));
}

TEST_CASE("K of a delta is the weighted kernel column") {
  const auto spec = spec3(4, 1);
  const auto K = make_dirichlet_operator(spec, 8);
  const LatticePoint y{2, -1, 0};
  const auto kv = K.apply(delta_field(K.domain(), y));
  const auto col = direct_green(DomainKind::Whole, 3, y, 8, 1e-13);
  const double qy = std::pow(spec.Q(y), 1 / spec.p);
  double err = 0;
  for (const auto& x : K.domain()->interior_points()) {
    err = std::max(err, std::abs(kv(x) - std::pow(spec.Q(x), 1 / spec.p) * col.at(x) * qy));
  }
  CHECK(err < 1e-11);
}

TEST_CASE("K vanishes where Q does") {
  ProblemSpec s = spec3(3, 0);
  s.Q = PotentialSpec::compact(2);
  const auto K = make_dirichlet_operator(s, 8);
  const auto v = sample_field<double>(K.domain(), [](const LatticePoint& x) { return x.norm() > 3 ? 1.0 : 0.0; });
  CHECK(norm(K.apply(v), NormKind::Sup) == 0.0);
}

TEST_CASE("K is symmetric and positive semidefinite") {
  const auto K = make_dirichlet_operator(spec3(7, 0), 8);
  std::mt19937 rng(1);
  double worst = 0, min_form = 1;
  for (int i = 0; i < 100; ++i) {
    const auto u = random_field(K.domain(), rng), v = random_field(K.domain(), rng);
    const double a = K.form(u, v), b = K.form(v, u);
    worst = std::max(worst, std::abs(a - b) / std::abs(a));
    min_form = std::min(min_form, K.form(u, u));
  }
  CHECK(worst <= 1e-10);
  CHECK(min_form >= 0);
}

TEST_CASE("kernel-backed and solver-backed K agree") {
  auto s = spec3(3, 2);
  s.kind = DomainKind::Half;
  const double R = 6;
  const auto dom = TruncatedDomain::make(DomainKind::Half, 3, R);
  auto fam = std::make_shared<ColumnFamily>(DomainKind::Half, 3);
  for (const auto& y : dom->interior_points()) fam->add(image_green(DomainKind::Half, 3, y, R, 1e-13));
  const BirmanSchwinger Kk(s, std::make_shared<KernelGreenOperator>(dom, fam));
  const auto Kd = make_dirichlet_operator(s, R);
  std::mt19937 rng(2);
  const auto v = random_field(dom, rng);
  const auto a = Kk.apply(v), b = Kd.apply(v);
  double err = 0;
  for (const auto& x : dom->interior_points()) err = std::max(err, std::abs(a(x) - b(x)));
  CHECK(err < 1e-10 * norm(b, NormKind::Sup));
}

TEST_CASE("energy: ray identity and value at zero") {
  const auto spec = spec3(7, 0);
  const auto K = make_dirichlet_operator(spec, 8);
  const double pp = spec.p_prime();
  std::mt19937 rng(3);
  const auto v = random_field(K.domain(), rng);
  CHECK(energy(LatticeField(K.domain()), K) == 0.0);
  const double A = power_sum(v, pp), B = K.form(v, v);
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(energy(t * v, K) == doctest::Approx(std::pow(t, pp) / pp * A - t * t / 2 * B).epsilon(1e-12));
  }
  // d/dt J0(t v) = t^{p'-1} A - t B vanishes at t*.
  const double ts = nehari_scale(A, B, pp);
  CHECK(std::pow(ts, pp - 1) * A - ts * B == doctest::Approx(0.0).scale(A));
  CHECK(energy_from_parts(std::pow(ts, pp) * A, ts * ts * B, pp) > 0);
}

TEST_CASE("energy is bounded below on a small sphere") {
  const auto spec = spec3(7, 0);
  const auto K = make_dirichlet_operator(spec, 8);
  const double pp = spec.p_prime();
  std::mt19937 rng(4);
  std::vector<LatticeField> probes;
  double cstar = 0;
  for (int i = 0; i < 30; ++i) {
    probes.push_back(random_field(K.domain(), rng));
    const double n = std::pow(power_sum(probes.back(), pp), 1 / pp);
    cstar = std::max(cstar, K.form(probes.back(), probes.back()) / (n * n));
  }
  const double rho = std::pow(1 / (pp * cstar), 1 / (2 - pp));
  for (const auto& v : probes) {
    const double n = std::pow(power_sum(v, pp), 1 / pp);
    CHECK(energy((rho / n) * v, K) >= std::pow(rho, pp) / (2 * pp) * (1 - 1e-12));
  }
}

TEST_CASE("energy gradient against central differences") {
  const auto spec = spec3(7, 0);
  const auto K = make_dirichlet_operator(spec, 8);
  std::mt19937 rng(5);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto v = random_field(K.domain(), rng, true);
    const auto w = random_field(K.domain(), rng);
    const double h = 1e-6 * norm(v, NormKind::Strong, 2);
    const double fd = (energy(v + h * w, K) - energy(v - h * w, K)) / (2 * h);
    const double an = dot(energy_gradient(v, K), w);
    worst = std::max(worst, std::abs(fd - an) / std::abs(an));
  }
  CHECK(worst <= 1e-5);
  CHECK(norm(energy_gradient(LatticeField(K.domain()), K), NormKind::Sup) == 0.0);
}

TEST_CASE("energy requires the superlinear regime") {
  const auto K = make_dirichlet_operator(spec3(1.5, 3), 6);
  CHECK_THROWS(energy(LatticeField(K.domain()), K));
}
