#pragma once

// Box grid with a set of active cells, stored as runs along the last axis.
// Shared by the truncated domains and the multigrid hierarchy.

#include <array>
#include <cstdint>
#include <vector>

namespace lanemden {

inline constexpr int kMaxDim = 4;

struct Run {
  std::int64_t start;  // flat index of the first cell
  std::int64_t length;
};

struct Grid {
  int dim = 0;
  std::array<std::int64_t, kMaxDim> lo{};      // coordinate of the first cell per axis
  std::array<std::int64_t, kMaxDim> extent{};  // cells per axis
  std::array<std::int64_t, kMaxDim> stride{};  // last axis contiguous
  std::int64_t size = 0;
  std::vector<Run> runs;  // active cells, increasing start
  std::int64_t active = 0;

  /// Fills stride and size from dim/lo/extent.
  void finalize_box();
  /// Builds runs from a per-cell activity predicate on flat indices.
  template <class Pred>
  void build_runs(Pred&& is_active) {
    runs.clear();
    active = 0;
    std::int64_t i = 0;
    while (i < size) {
      if (!is_active(i)) {
        ++i;
        continue;
      }
      // Runs never cross a row of the last axis.
      const std::int64_t row_end = (i / extent[dim - 1] + 1) * extent[dim - 1];
      std::int64_t j = i;
      while (j < row_end && is_active(j)) ++j;
      runs.push_back({i, j - i});
      active += j - i;
      i = j;
    }
  }
};

}  // namespace lanemden
