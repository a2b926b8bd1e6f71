#include <vector>

#include "scengame/kernels.hpp"
#include "tree.hpp"

namespace scengame::simd {

namespace {

struct ScalarOps {
  static void leaf(const double* a, double alpha, const double* b, int cols,
                   double* out) {
    if (b) {
      for (int c = 0; c < cols; ++c) out[c] = alpha * a[c] + b[c];
    } else {
      for (int c = 0; c < cols; ++c) out[c] = alpha * a[c];
    }
  }
  static void add(double* out, const double* in, int cols) {
    for (int c = 0; c < cols; ++c) out[c] = out[c] + in[c];
  }
};

void sum_rows(const double* a, double alpha, const double* b, int rows, int cols,
              double* out) {
  tree_sum_rows<ScalarOps>(a, alpha, b, rows, cols, out);
}

void dual_update(double* lambda, const double* w, const double* x, int rows, int cols,
                 double rho) {
  for (int j = 0; j < rows; ++j) {
    double* l = lambda + static_cast<std::ptrdiff_t>(j) * cols;
    const double* wj = w + static_cast<std::ptrdiff_t>(j) * cols;
    for (int c = 0; c < cols; ++c) l[c] = l[c] + rho * (wj[c] - x[c]);
  }
}

void row_squared_distance(const double* a, const double* b, std::ptrdiff_t b_stride,
                          int rows, int cols, double* out) {
  for (int j = 0; j < rows; ++j) {
    const double* aj = a + static_cast<std::ptrdiff_t>(j) * cols;
    const double* bj = b + j * b_stride;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (int c = 0; c < cols; ++c) {
      const double d = aj[c] - bj[c];
      lane[c & 3] = lane[c & 3] + d * d;
    }
    out[j] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{&sum_rows, &dual_update, &row_squared_distance};
  return k;
}

double pairwise_sum(const double* values, int n) {
  if (n <= 0) return 0.0;
  if (n == 1) return values[0];
  const int mid = n / 2;
  return pairwise_sum(values, mid) + pairwise_sum(values + mid, n - mid);
}

}  // namespace scengame::simd
