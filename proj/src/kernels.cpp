#include "lanemden/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lanemden::kernels {

namespace {

using Idx = std::int64_t;

inline std::size_t u(Idx i) { return static_cast<std::size_t>(i); }

// Apply f(run) to every run; the parallel backend splits runs statically.
template <class F>
void for_each_run(Backend be, const Grid& g, F&& f) {
  const Idx n = static_cast<Idx>(g.runs.size());
  if (be == Backend::Serial) {
    for (Idx r = 0; r < n; ++r) f(g.runs[u(r)]);
    return;
  }
#pragma omp parallel for schedule(static)
  for (Idx r = 0; r < n; ++r) f(g.runs[u(r)]);
}

// Sum of f(run) over runs.  Serial: one running sum.  Parallel: fixed blocks
// of runs, partials added in block order.
template <class F>
double reduce_runs(Backend be, const Grid& g, F&& f) {
  const std::size_t n = g.runs.size();
  if (be == Backend::Serial) {
    double s = 0.0;
    for (const auto& run : g.runs) s += f(run);
    return s;
  }
  const Idx blocks = static_cast<Idx>((n + kRunsPerBlock - 1) / kRunsPerBlock);
  std::vector<double> partial(u(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (Idx b = 0; b < blocks; ++b) {
    const std::size_t lo = u(b) * kRunsPerBlock;
    const std::size_t hi = std::min(n, lo + kRunsPerBlock);
    double s = 0.0;
    for (std::size_t r = lo; r < hi; ++r) s += f(g.runs[r]);
    partial[u(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

inline double neighbor_sum(const Grid& g, const double* x, Idx i) {
  double s = 0.0;
  for (int k = 0; k < g.dim; ++k) {
    const Idx st = g.stride[static_cast<std::size_t>(k)];
    s += x[i + st] + x[i - st];
  }
  return s;
}

// Stencil over one run, with the dimension fixed at compile time so the
// inner loop vectorizes.
template <int D, class Out>
inline void stencil_run(const Grid& g, const double* x, const Run& run, Out&& out) {
  const Idx s0 = g.stride[0], s1 = g.stride[1];
  const Idx s2 = D > 2 ? g.stride[2] : 0, s3 = D > 3 ? g.stride[3] : 0;
  const Idx end = run.start + run.length;
#pragma omp simd
  for (Idx i = run.start; i < end; ++i) {
    double s = x[i + s0] + x[i - s0] + x[i + s1] + x[i - s1];
    if constexpr (D > 2) s += x[i + s2] + x[i - s2];
    if constexpr (D > 3) s += x[i + s3] + x[i - s3];
    out(i, 2.0 * D * x[i] - s);
  }
}

template <class Out>
inline void stencil_dispatch(const Grid& g, const double* x, const Run& run, Out&& out) {
  switch (g.dim) {
    case 2: stencil_run<2>(g, x, run, out); break;
    case 3: stencil_run<3>(g, x, run, out); break;
    default: stencil_run<4>(g, x, run, out); break;
  }
}

// Absolute coordinates of flat index i in g.
inline void decode(const Grid& g, Idx i, Idx* c) {
  for (int k = g.dim - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    c[k] = i % g.extent[ku] + g.lo[ku];
    i /= g.extent[ku];
  }
}

// Floor division by 2 for possibly negative even/odd coordinates.
inline Idx half_floor(Idx a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }

}  // namespace

void neg_laplacian(Backend be, const Grid& g, double scale, std::span<const double> x,
                   std::span<double> y) {
  const double* xp = x.data();
  double* yp = y.data();
  if (be == Backend::Serial) {
    for (const auto& run : g.runs) {
      for (Idx i = run.start; i < run.start + run.length; ++i) {
        yp[i] = scale * (2.0 * g.dim * xp[i] - neighbor_sum(g, xp, i));
      }
    }
    return;
  }
  for_each_run(be, g, [&](const Run& run) {
    stencil_dispatch(g, xp, run, [&](Idx i, double v) { yp[i] = scale * v; });
  });
}

void residual(Backend be, const Grid& g, double scale, std::span<const double> b,
              std::span<const double> x, std::span<double> r) {
  const double* xp = x.data();
  const double* bp = b.data();
  double* rp = r.data();
  if (be == Backend::Serial) {
    for (const auto& run : g.runs) {
      for (Idx i = run.start; i < run.start + run.length; ++i) {
        rp[i] = bp[i] - scale * (2.0 * g.dim * xp[i] - neighbor_sum(g, xp, i));
      }
    }
    return;
  }
  for_each_run(be, g, [&](const Run& run) {
    stencil_dispatch(g, xp, run, [&](Idx i, double v) { rp[i] = bp[i] - scale * v; });
  });
}

double dot(Backend be, const Grid& g, std::span<const double> a, std::span<const double> b) {
  const double* ap = a.data();
  const double* bp = b.data();
  return reduce_runs(be, g, [&](const Run& run) {
    double s = 0.0;
    for (Idx i = run.start; i < run.start + run.length; ++i) s += ap[i] * bp[i];
    return s;
  });
}

double max_abs(Backend be, const Grid& g, std::span<const double> a) {
  const double* ap = a.data();
  double m = 0.0;
  if (be == Backend::Serial) {
    for (const auto& run : g.runs) {
      for (Idx i = run.start; i < run.start + run.length; ++i) m = std::max(m, std::abs(ap[i]));
    }
    return m;
  }
  const Idx n = static_cast<Idx>(g.runs.size());
#pragma omp parallel for schedule(static) reduction(max : m)
  for (Idx r = 0; r < n; ++r) {
    const auto& run = g.runs[u(r)];
    for (Idx i = run.start; i < run.start + run.length; ++i) m = std::max(m, std::abs(ap[i]));
  }
  return m;
}

void axpy(Backend be, const Grid& g, double alpha, std::span<const double> x, std::span<double> y) {
  const double* xp = x.data();
  double* yp = y.data();
  for_each_run(be, g, [&](const Run& run) {
    for (Idx i = run.start; i < run.start + run.length; ++i) yp[i] += alpha * xp[i];
  });
}

void xpby(Backend be, const Grid& g, std::span<const double> x, double beta, std::span<double> y) {
  const double* xp = x.data();
  double* yp = y.data();
  for_each_run(be, g, [&](const Run& run) {
    for (Idx i = run.start; i < run.start + run.length; ++i) yp[i] = xp[i] + beta * yp[i];
  });
}

void scale_copy(Backend be, const Grid& g, double alpha, std::span<const double> x,
                std::span<double> y) {
  const double* xp = x.data();
  double* yp = y.data();
  for_each_run(be, g, [&](const Run& run) {
    for (Idx i = run.start; i < run.start + run.length; ++i) yp[i] = alpha * xp[i];
  });
}

void jacobi(Backend be, const Grid& g, double scale, double omega, std::span<const double> b,
            std::span<const double> x, std::span<double> out) {
  const double* xp = x.data();
  const double* bp = b.data();
  double* op = out.data();
  const double w = omega / (2.0 * g.dim * scale);
  if (be == Backend::Serial) {
    for (const auto& run : g.runs) {
      for (Idx i = run.start; i < run.start + run.length; ++i) {
        const double ax = scale * (2.0 * g.dim * xp[i] - neighbor_sum(g, xp, i));
        op[i] = xp[i] + w * (bp[i] - ax);
      }
    }
    return;
  }
  for_each_run(be, g, [&](const Run& run) {
    stencil_dispatch(g, xp, run,
                     [&](Idx i, double v) { op[i] = xp[i] + w * (bp[i] - scale * v); });
  });
}

void restrict_full_weighting(Backend be, const Grid& fine, const Grid& coarse,
                             std::span<const double> rf, std::span<double> rc) {
  const int d = coarse.dim;
  const double norm = std::ldexp(1.0, -d);
  int combos = 1;
  for (int k = 0; k < d; ++k) combos *= 3;
  const double* fp = rf.data();
  double* cp = rc.data();
  for_each_run(be, coarse, [&](const Run& run) {
    Idx c[kMaxDim];
    decode(coarse, run.start, c);
    for (Idx i = run.start; i < run.start + run.length; ++i, ++c[d - 1]) {
      double s = 0.0;
      for (int m = 0; m < combos; ++m) {
        int t = m;
        double w = 1.0;
        Idx idx = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          const int delta = t % 3 - 1;
          t /= 3;
          if (delta != 0) w *= 0.5;
          const Idx f = 2 * c[k] + delta - fine.lo[ku];
          if (f < 0 || f >= fine.extent[ku]) {
            inside = false;
            break;
          }
          idx += f * fine.stride[ku];
        }
        if (inside) s += w * fp[idx];
      }
      cp[i] = norm * s;
    }
  });
}

void prolong_add(Backend be, const Grid& coarse, const Grid& fine, std::span<const double> ec,
                 std::span<double> xf) {
  const int d = fine.dim;
  const double* cp = ec.data();
  double* fp = xf.data();
  for_each_run(be, fine, [&](const Run& run) {
    Idx f[kMaxDim];
    decode(fine, run.start, f);
    for (Idx i = run.start; i < run.start + run.length; ++i, ++f[d - 1]) {
      // Per axis: one coarse parent (even) or two (odd).
      Idx lo[kMaxDim];
      int two[kMaxDim];
      int combos = 1;
      for (int k = 0; k < d; ++k) {
        lo[k] = half_floor(f[k]);
        two[k] = static_cast<int>(f[k] & 1);
        combos <<= two[k];
      }
      double s = 0.0;
      for (int m = 0; m < combos; ++m) {
        int t = m;
        Idx idx = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          Idx c = lo[k];
          if (two[k]) {
            c += t & 1;
            t >>= 1;
          }
          const Idx off = c - coarse.lo[ku];
          if (off < 0 || off >= coarse.extent[ku]) {
            inside = false;
            break;
          }
          idx += off * coarse.stride[ku];
        }
        if (inside) s += cp[idx];
      }
      fp[i] += s / combos;
    }
  });
}

}  // namespace lanemden::kernels
