#include "lanemden/linear_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace lanemden {

using kernels::Backend;

namespace {

// Largest coarse level handed to the dense Cholesky factorization.
constexpr std::int64_t kDirectMax = 800;
constexpr int kPreSweeps = 2;
constexpr int kPostSweeps = 2;

inline std::size_t u(std::int64_t i) { return static_cast<std::size_t>(i); }

std::int64_t half_floor(std::int64_t a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }

// Coarse cell c is active iff fine cell 2c is.  The coarse box is the
// bounding box of active cells plus one layer, so stencils stay in range.
Grid coarsen(const Grid& fine) {
  const int d = fine.dim;
  Grid probe;
  probe.dim = d;
  for (int k = 0; k < d; ++k) {
    const auto ku = u(k);
    const std::int64_t lo = half_floor(fine.lo[ku]);
    const std::int64_t hi = half_floor(fine.lo[ku] + fine.extent[ku] - 1);
    probe.lo[ku] = lo;
    probe.extent[ku] = hi - lo + 1;
  }
  probe.finalize_box();

  std::vector<char> fine_active(u(fine.size), 0);
  for (const auto& run : fine.runs) {
    std::fill_n(fine_active.begin() + run.start, run.length, 1);
  }
  auto fine_index_of_double = [&](std::int64_t ci, std::int64_t* c) -> std::int64_t {
    std::int64_t rem = ci, idx = 0;
    for (int k = d - 1; k >= 0; --k) {
      const auto ku = u(k);
      c[k] = rem % probe.extent[ku] + probe.lo[ku];
      rem /= probe.extent[ku];
    }
    for (int k = 0; k < d; ++k) {
      const auto ku = u(k);
      const std::int64_t f = 2 * c[k] - fine.lo[ku];
      if (f < 0 || f >= fine.extent[ku]) return -1;
      idx += f * fine.stride[ku];
    }
    return idx;
  };

  std::array<std::int64_t, kMaxDim> amin{}, amax{};
  amin.fill(INT64_MAX);
  amax.fill(INT64_MIN);
  std::vector<char> active(u(probe.size), 0);
  std::int64_t c[kMaxDim];
  for (std::int64_t i = 0; i < probe.size; ++i) {
    const auto fi = fine_index_of_double(i, c);
    if (fi >= 0 && fine_active[u(fi)]) {
      active[u(i)] = 1;
      for (int k = 0; k < d; ++k) {
        amin[u(k)] = std::min(amin[u(k)], c[k]);
        amax[u(k)] = std::max(amax[u(k)], c[k]);
      }
    }
  }
  Grid coarse;
  coarse.dim = d;
  if (amin[0] == INT64_MAX) {
    coarse.finalize_box();
    return coarse;  // no active cells
  }
  for (int k = 0; k < d; ++k) {
    coarse.lo[u(k)] = amin[u(k)] - 1;
    coarse.extent[u(k)] = amax[u(k)] - amin[u(k)] + 3;
  }
  coarse.finalize_box();
  coarse.build_runs([&](std::int64_t i) {
    std::int64_t rem = i, pi = 0;
    for (int k = d - 1; k >= 0; --k) {
      const auto ku = u(k);
      const std::int64_t ck = rem % coarse.extent[ku] + coarse.lo[ku];
      rem /= coarse.extent[ku];
      const std::int64_t off = ck - probe.lo[ku];
      if (off < 0 || off >= probe.extent[ku]) return false;
      pi += off * probe.stride[ku];
    }
    return active[u(pi)] != 0;
  });
  return coarse;
}

}  // namespace

class MultigridHierarchy {
 public:
  MultigridHierarchy(const Grid& fine, Backend be) : be_(be) {
    grids_.push_back(&fine);
    scales_.push_back(1.0);
    while (grids_.back()->active > kDirectMax) {
      const Grid& g = *grids_.back();
      bool can = true;
      for (int k = 0; k < g.dim; ++k) can = can && g.extent[u(k)] > 4;
      if (!can) break;
      Grid c = coarsen(g);
      if (c.active == 0) break;
      owned_.push_back(std::move(c));
      grids_.push_back(&owned_.back());
      scales_.push_back(scales_.back() * 0.25);
    }
    factor_coarsest();
  }

  int levels() const { return static_cast<int>(grids_.size()); }

  struct Workspace {
    std::vector<std::vector<double>> b, x, r, t;
  };

  Workspace workspace() const {
    Workspace w;
    for (std::size_t l = 0; l < grids_.size(); ++l) {
      const auto n = u(grids_[l]->size);
      w.b.emplace_back(l == 0 ? 0 : n, 0.0);
      w.x.emplace_back(n, 0.0);
      w.r.emplace_back(n, 0.0);
      w.t.emplace_back(n, 0.0);
    }
    return w;
  }

  /// z = M^{-1} r on the finest grid.
  void apply(Workspace& w, std::span<const double> r, std::span<double> z) const {
    cycle(w, 0, r);
    kernels::scale_copy(be_, *grids_[0], 1.0, w.x[0], z);
  }

 private:
  void cycle(Workspace& w, std::size_t l, std::span<const double> b) const {
    const Grid& g = *grids_[l];
    auto& x = w.x[l];
    if (l + 1 == grids_.size()) {
      direct_solve(b, x);
      return;
    }
    const double s = scales_[l];
    const double omega = 2.0 * g.dim / (2.0 * g.dim + 1.0);
    kernels::scale_copy(be_, g, 0.0, x, x);
    for (int i = 0; i < kPreSweeps; ++i) {
      kernels::jacobi(be_, g, s, omega, b, x, w.t[l]);
      std::swap(x, w.t[l]);
    }
    kernels::residual(be_, g, s, b, x, w.r[l]);
    kernels::restrict_full_weighting(be_, g, *grids_[l + 1], w.r[l], w.b[l + 1]);
    cycle(w, l + 1, w.b[l + 1]);
    kernels::prolong_add(be_, *grids_[l + 1], g, w.x[l + 1], x);
    for (int i = 0; i < kPostSweeps; ++i) {
      kernels::jacobi(be_, g, s, omega, b, x, w.t[l]);
      std::swap(x, w.t[l]);
    }
  }

  void factor_coarsest() {
    const Grid& g = *grids_.back();
    const double s = scales_.back();
    for (const auto& run : g.runs) {
      for (std::int64_t i = run.start; i < run.start + run.length; ++i) cells_.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(cells_.size());
    std::unordered_map<std::int64_t, Eigen::Index> pos;
    for (Eigen::Index i = 0; i < n; ++i) pos[cells_[u(i)]] = i;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = s * 2.0 * g.dim;
      for (int k = 0; k < g.dim; ++k) {
        for (std::int64_t nb : {cells_[u(i)] + g.stride[u(k)], cells_[u(i)] - g.stride[u(k)]}) {
          const auto it = pos.find(nb);
          if (it != pos.end()) a(i, it->second) = -s;
        }
      }
    }
    llt_.compute(a);
  }

  void direct_solve(std::span<const double> b, std::span<double> x) const {
    const auto n = static_cast<Eigen::Index>(cells_.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = b[u(cells_[u(i)])];
    const Eigen::VectorXd sol = llt_.solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i) x[u(cells_[u(i)])] = sol(i);
  }

  Backend be_;
  std::deque<Grid> owned_;
  std::vector<const Grid*> grids_;
  std::vector<double> scales_;
  std::vector<std::int64_t> cells_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

DirichletSolver::DirichletSolver(DomainPtr domain, LinearSolverOptions options)
    : domain_(std::move(domain)), options_(options) {
  if (!(options_.tol > 0)) throw std::invalid_argument("solver tolerance must be positive");
  if (options_.max_iterations <= 0) {
    options_.max_iterations = std::max(100, static_cast<int>(std::ceil(50 * domain_->radius())));
  }
  if (options_.multigrid) mg_ = std::make_unique<MultigridHierarchy>(domain_->grid(), options_.backend);
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

int DirichletSolver::levels() const { return mg_ ? mg_->levels() : 1; }

LinearSolveReport DirichletSolver::solve(std::span<const double> f, std::span<double> x) const {
  const Grid& g = domain_->grid();
  const Backend be = options_.backend;
  const auto n = u(g.size);
  if (f.size() != n || x.size() != n) throw std::invalid_argument("solve: vector size mismatch");

  std::vector<double> b(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
  kernels::scale_copy(be, g, 1.0, f, b);
  LinearSolveReport rep;
  const double bnorm = std::sqrt(kernels::dot(be, g, b, b));
  if (bnorm == 0.0) {
    kernels::scale_copy(be, g, 0.0, x, x);
    rep.converged = true;
    return rep;
  }

  std::optional<MultigridHierarchy::Workspace> ws;
  if (mg_) ws = mg_->workspace();
  auto precondition = [&]() {
    if (mg_) {
      mg_->apply(*ws, r, z);
    } else {
      kernels::scale_copy(be, g, 1.0, r, z);
    }
  };

  const double tol = options_.tol;
  double rel = 0.0;
  // Restart when the recursively updated residual drifts from the true one.
  for (int restart = 0; restart < 4 && rep.iterations < options_.max_iterations; ++restart) {
    kernels::residual(be, g, 1.0, b, x, r);
    rel = std::sqrt(kernels::dot(be, g, r, r)) / bnorm;
    if (rel <= tol) break;
    precondition();
    kernels::scale_copy(be, g, 1.0, z, p);
    double rz = kernels::dot(be, g, r, z);
    while (rep.iterations < options_.max_iterations) {
      ++rep.iterations;
      kernels::neg_laplacian(be, g, 1.0, p, q);
      const double alpha = rz / kernels::dot(be, g, p, q);
      kernels::axpy(be, g, alpha, p, x);
      kernels::axpy(be, g, -alpha, q, r);
      if (std::sqrt(kernels::dot(be, g, r, r)) / bnorm <= tol) break;
      precondition();
      const double rz_new = kernels::dot(be, g, r, z);
      kernels::xpby(be, g, z, rz_new / rz, p);
      rz = rz_new;
    }
  }
  kernels::residual(be, g, 1.0, b, x, r);
  rep.relative_residual = std::sqrt(kernels::dot(be, g, r, r)) / bnorm;
  rep.max_residual = kernels::max_abs(be, g, r);
  rep.converged = rep.relative_residual <= tol;
  if (!rep.converged) {
    std::ostringstream os;
    os << "Dirichlet solve did not converge: relative residual " << rep.relative_residual << " > " << tol
       << " after " << rep.iterations << " iterations";
    throw SolverError(os.str(), rep);
  }
  return rep;
}

LatticeField DirichletSolver::solve(const LatticeField& f, LinearSolveReport* report) const {
  if (!f.domain().same_as(*domain_)) throw std::invalid_argument("solve: field on another domain");
  LatticeField out(domain_);
  const auto rep = solve(f.data(), out.data());
  if (report) *report = rep;
  return out;
}

}  // namespace lanemden
