#include <immintrin.h>

#include "scengame/kernels.hpp"
#include "tree.hpp"

namespace scengame::simd {

namespace {

struct Avx2Ops {
  static void leaf(const double* a, double alpha, const double* b, int cols,
                   double* out) {
    const __m256d va = _mm256_set1_pd(alpha);
    int c = 0;
    if (b) {
      for (; c + 4 <= cols; c += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(a + c));
        _mm256_storeu_pd(out + c, _mm256_add_pd(prod, _mm256_loadu_pd(b + c)));
      }
      for (; c < cols; ++c) out[c] = alpha * a[c] + b[c];
    } else {
      for (; c + 4 <= cols; c += 4) {
        _mm256_storeu_pd(out + c, _mm256_mul_pd(va, _mm256_loadu_pd(a + c)));
      }
      for (; c < cols; ++c) out[c] = alpha * a[c];
    }
  }
  static void add(double* out, const double* in, int cols) {
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      _mm256_storeu_pd(out + c,
                       _mm256_add_pd(_mm256_loadu_pd(out + c), _mm256_loadu_pd(in + c)));
    }
    for (; c < cols; ++c) out[c] = out[c] + in[c];
  }
};

void sum_rows(const double* a, double alpha, const double* b, int rows, int cols,
              double* out) {
  tree_sum_rows<Avx2Ops>(a, alpha, b, rows, cols, out);
}

void dual_update(double* lambda, const double* w, const double* x, int rows, int cols,
                 double rho) {
  const __m256d vr = _mm256_set1_pd(rho);
  for (int j = 0; j < rows; ++j) {
    double* l = lambda + static_cast<std::ptrdiff_t>(j) * cols;
    const double* wj = w + static_cast<std::ptrdiff_t>(j) * cols;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(wj + c), _mm256_loadu_pd(x + c));
      _mm256_storeu_pd(l + c, _mm256_add_pd(_mm256_loadu_pd(l + c), _mm256_mul_pd(vr, d)));
    }
    for (; c < cols; ++c) l[c] = l[c] + rho * (wj[c] - x[c]);
  }
}

void row_squared_distance(const double* a, const double* b, std::ptrdiff_t b_stride,
                          int rows, int cols, double* out) {
  for (int j = 0; j < rows; ++j) {
    const double* aj = a + static_cast<std::ptrdiff_t>(j) * cols;
    const double* bj = b + j * b_stride;
    __m256d acc = _mm256_setzero_pd();
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(aj + c), _mm256_loadu_pd(bj + c));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; c < cols; ++c) {
      const double d = aj[c] - bj[c];
      lane[c & 3] = lane[c & 3] + d * d;
    }
    out[j] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{&sum_rows, &dual_update, &row_squared_distance};
  return &k;
}

}  // namespace scengame::simd
