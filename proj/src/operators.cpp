#include "lanemden/operators.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lanemden {

PotentialSpec PotentialSpec::power_law(double c, double alpha) {
  if (!(c > 0) || !std::isfinite(alpha)) throw std::invalid_argument("power law needs c > 0 and finite alpha");
  PotentialSpec q;
  q.form = Form::PowerLaw;
  q.c = c;
  q.alpha = alpha;
  return q;
}

PotentialSpec PotentialSpec::compact(double radius, double c) {
  if (!(radius >= 0) || !(c > 0)) throw std::invalid_argument("compact potential needs radius >= 0, c > 0");
  PotentialSpec q;
  q.form = Form::CompactSupport;
  q.c = c;
  q.support_radius = radius;
  q.alpha = std::numeric_limits<double>::infinity();
  return q;
}

PotentialSpec PotentialSpec::from_table(LatticeField values) {
  bool positive = false;
  for (double v : values.data()) {
    if (v < 0) throw std::invalid_argument("tabulated potential must be nonnegative");
    positive = positive || v > 0;
  }
  if (!positive) throw std::invalid_argument("tabulated potential is identically zero");
  PotentialSpec q;
  q.form = Form::Table;
  q.table = std::make_shared<const LatticeField>(std::move(values));
  q.alpha = std::numeric_limits<double>::quiet_NaN();
  return q;
}

double PotentialSpec::operator()(const LatticePoint& x) const {
  switch (form) {
    case Form::PowerLaw: return c * std::pow(1.0 + x.norm(), -alpha);
    case Form::CompactSupport:
      return static_cast<double>(x.norm_sq()) <= support_radius * support_radius ? c : 0.0;
    case Form::Table: return (*table)(x);
  }
  return 0.0;
}

double PotentialSpec::decay_exponent() const { return alpha; }

bool PotentialSpec::vanishes_faster_than(double) const { return form == Form::CompactSupport; }

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  switch (form) {
    case Form::PowerLaw: os << "power_law(c=" << c << ", alpha=" << alpha << ")"; break;
    case Form::CompactSupport: os << "compact(radius=" << support_radius << ", c=" << c << ")"; break;
    case Form::Table: os << "table"; break;
  }
  return os.str();
}

LatticeField sample_potential(const PotentialSpec& Q, const DomainPtr& domain, bool reflect) {
  const DomainKind kind = domain->kind();
  if (!reflect || kind == DomainKind::Whole) {
    return sample_field<double>(domain, Q);
  }
  const auto whole = TruncatedDomain::make(DomainKind::Whole, domain->dim(), domain->radius());
  const int folded_axes = kind == DomainKind::Half ? 1 : 2;
  return sample_field<double>(whole, [&](const LatticePoint& x) {
    auto y = x;
    for (int k = 0; k < folded_axes; ++k) {
      if (y[k] == 0) return 0.0;
      y[k] = std::abs(y[k]);
    }
    return Q(y);
  });
}

void ProblemSpec::validate() const {
  if (d < 2 || d > kMaxDim) throw std::invalid_argument("dimension out of range");
  if (kind == DomainKind::Whole && d < 3) throw std::invalid_argument("whole-lattice problems need d >= 3");
  if (!(p > 1)) throw std::invalid_argument("exponent p must exceed 1");
}

std::string ProblemSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind) << " d=" << d << " p=" << p << " Q=" << Q.describe();
  return os.str();
}

void require_interior_support(const LatticeField& f) {
  const auto& dom = f.domain();
  for (std::int64_t i = 0; i < dom.box_size(); ++i) {
    if (f.at_index(i) != 0.0 && dom.label(i) != CellLabel::Interior) {
      throw std::out_of_range("field is nonzero at " + dom.point_at(i).to_string() +
                              ", outside the kernel's interior");
    }
  }
}

DirichletGreenOperator::DirichletGreenOperator(DomainPtr domain, double tol)
    : solver_(std::move(domain), LinearSolverOptions{.tol = tol}) {}

LatticeField DirichletGreenOperator::apply(const LatticeField& f) const {
  if (!f.domain().same_as(*domain())) throw std::invalid_argument("field lives on another truncation");
  require_interior_support(f);
  return solver_.solve(f);
}

KernelGreenOperator::KernelGreenOperator(DomainPtr domain, std::shared_ptr<const GreenFamily> kernel)
    : domain_(std::move(domain)), kernel_(std::move(kernel)) {
  if (kernel_->kind() != domain_->kind() || kernel_->dim() != domain_->dim()) {
    throw std::invalid_argument("kernel family does not match the truncation");
  }
}

LatticeField KernelGreenOperator::apply(const LatticeField& f) const {
  require_interior_support(f);
  return convolve(*kernel_, f, domain_);
}

BirmanSchwinger::BirmanSchwinger(ProblemSpec spec, std::shared_ptr<const GreenOperator> green)
    : spec_(std::move(spec)), green_(std::move(green)) {
  spec_.validate();
  if (green_->domain()->kind() != spec_.kind || green_->domain()->dim() != spec_.d) {
    throw std::invalid_argument("kernel truncation does not match the problem");
  }
  q_ = sample_potential(spec_.Q, green_->domain());
  q_root_ = q_;
  const double e = 1.0 / spec_.p;
  for (double& v : q_root_.data()) v = v > 0 ? std::pow(v, e) : 0.0;
}

LatticeField BirmanSchwinger::apply(const LatticeField& v) const {
  if (!v.domain().same_as(*domain())) throw std::invalid_argument("field lives on another truncation");
  require_interior_support(v);
  LatticeField w(domain());
  auto wd = w.data();
  const auto vd = v.data();
  const auto qr = q_root_.data();
  for (std::size_t i = 0; i < wd.size(); ++i) wd[i] = qr[i] * vd[i];
  auto out = green_->apply(w);
  auto od = out.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] *= qr[i];
  return out;
}

double BirmanSchwinger::form(const LatticeField& u, const LatticeField& v) const {
  const auto kv = apply(v);
  double s = 0.0;
  const auto ud = u.data();
  const auto kd = kv.data();
  for (std::size_t i = 0; i < ud.size(); ++i) s += ud[i] * kd[i];
  return s;
}

BirmanSchwinger make_dirichlet_operator(const ProblemSpec& spec, double R, double tol) {
  spec.validate();
  auto dom = TruncatedDomain::make(spec.kind, spec.d, R);
  return BirmanSchwinger(spec, std::make_shared<DirichletGreenOperator>(dom, tol));
}

LatticeField apply_K(const LatticeField& v, const BirmanSchwinger& K) { return K.apply(v); }

double power_sum(const LatticeField& v, double s) {
  double a = 0.0;
  for (double x : v.data()) {
    if (x != 0.0) a += std::pow(std::abs(x), s);
  }
  return a;
}

namespace {

void require_superlinear(const BirmanSchwinger& K) {
  if (!(K.spec().p > 2)) throw std::invalid_argument("energy is defined here for p > 2 only");
}

}  // namespace

double energy_from_parts(double A, double B, double p_prime) { return A / p_prime - 0.5 * B; }

double energy(const LatticeField& v, const BirmanSchwinger& K) {
  require_superlinear(K);
  const double pp = K.spec().p_prime();
  return energy_from_parts(power_sum(v, pp), K.form(v, v), pp);
}

LatticeField energy_gradient(const LatticeField& v, const BirmanSchwinger& K) {
  require_superlinear(K);
  const double pp = K.spec().p_prime();
  auto g = K.apply(v);
  auto gd = g.data();
  const auto vd = v.data();
  for (std::size_t i = 0; i < gd.size(); ++i) {
    const double x = vd[i];
    const double nl = x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), pp - 1.0), x);
    gd[i] = nl - gd[i];
  }
  return g;
}

double nehari_scale(double A, double B, double p_prime) {
  if (!(B > 0)) throw std::domain_error("Nehari rescale needs B(v, v) > 0");
  return std::pow(A / B, 1.0 / (2.0 - p_prime));
}

}  // namespace lanemden
