#pragma once

// Data-parallel grid kernels.  Every kernel touches only the active cells of
// a Grid; vectors are box sized and inactive entries are left alone (callers
// keep them zero).  The Serial backend is the plain reference; Parallel uses
// OpenMP over fixed blocks of runs, so reductions are combined in a fixed
// order and results do not depend on the thread count.

#include <cstdint>
#include <span>

#include "lanemden/grid.hpp"

namespace lanemden::kernels {

enum class Backend { Serial, Parallel };

/// Runs per reduction block in the parallel backend.
inline constexpr std::size_t kRunsPerBlock = 32;

/// y = scale * (-Delta x) on active cells.
void neg_laplacian(Backend be, const Grid& g, double scale, std::span<const double> x,
                   std::span<double> y);

/// r = b - scale * (-Delta x) on active cells.
void residual(Backend be, const Grid& g, double scale, std::span<const double> b,
              std::span<const double> x, std::span<double> r);

double dot(Backend be, const Grid& g, std::span<const double> a, std::span<const double> b);
double max_abs(Backend be, const Grid& g, std::span<const double> a);

/// y += alpha x
void axpy(Backend be, const Grid& g, double alpha, std::span<const double> x, std::span<double> y);
/// y = x + beta y
void xpby(Backend be, const Grid& g, std::span<const double> x, double beta, std::span<double> y);
/// y = alpha x
void scale_copy(Backend be, const Grid& g, double alpha, std::span<const double> x,
                std::span<double> y);

/// One damped Jacobi sweep for scale*(-Delta) x = b: out = x + omega/(2d scale) (b - A x).
void jacobi(Backend be, const Grid& g, double scale, double omega, std::span<const double> b,
            std::span<const double> x, std::span<double> out);

/// Full weighting onto the coarse grid (coarse cell c sits on fine cell 2c):
/// rc(c) = 2^-d sum_{delta in {-1,0,1}^d} prod_k w(delta_k) rf(2c + delta),
/// w(0) = 1, w(+-1) = 1/2.  This is 2^-d times the transpose of prolong_add.
void restrict_full_weighting(Backend be, const Grid& fine, const Grid& coarse,
                             std::span<const double> rf, std::span<double> rc);

/// xf += multilinear interpolation of ec, on active fine cells.
void prolong_add(Backend be, const Grid& coarse, const Grid& fine, std::span<const double> ec,
                 std::span<double> xf);

}  // namespace lanemden::kernels
