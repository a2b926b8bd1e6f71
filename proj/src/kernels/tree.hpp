#pragma once

#include <vector>

namespace scengame::simd {

// Pairwise reduction over rows [lo, hi): split at lo + (hi - lo) / 2, left
// half into out, right half into the next scratch level, then out += scratch.
// Ops supplies the per-row leaf and the row addition.
template <class Ops>
void tree_level(const double* a, double alpha, const double* b, int lo, int hi,
                int cols, double* out, double* scratch) {
  const std::ptrdiff_t stride = cols;
  if (hi - lo == 1) {
    Ops::leaf(a + lo * stride, alpha, b ? b + lo * stride : nullptr, cols, out);
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  tree_level<Ops>(a, alpha, b, lo, mid, cols, out, scratch);
  tree_level<Ops>(a, alpha, b, mid, hi, cols, scratch, scratch + stride);
  Ops::add(out, scratch, cols);
}

template <class Ops>
void tree_sum_rows(const double* a, double alpha, const double* b, int rows, int cols,
                   double* out) {
  if (rows <= 0) {
    for (int c = 0; c < cols; ++c) out[c] = 0.0;
    return;
  }
  int depth = 1;
  while ((1 << depth) < rows) ++depth;
  std::vector<double> scratch(static_cast<std::size_t>(cols) * (depth + 1));
  tree_level<Ops>(a, alpha, b, 0, rows, cols, out, scratch.data());
}

}  // namespace scengame::simd
