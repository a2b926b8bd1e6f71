#pragma once

#include <cstddef>

// Consensus-phase arithmetic over S x cols row-major stacks. The scalar and
// AVX2 variants use the same operation order per coordinate (no FMA, same
// pairwise tree over rows, same four-lane partial sums), so their results are
// bit-identical and traces do not depend on the host CPU.
namespace scengame::simd {

enum class Isa { Scalar, Avx2 };

struct Kernels {
  // out[c] = sum_j (alpha * a[j][c] + b[j][c]) over rows j, pairwise tree
  // order. b may be null.
  void (*sum_rows)(const double* a, double alpha, const double* b, int rows,
                   int cols, double* out);
  // lambda[j][c] += rho * (w[j][c] - x[c]).
  void (*dual_update)(double* lambda, const double* w, const double* x, int rows,
                      int cols, double rho);
  // out[j] = |a[j] - b[j]|^2 where b[j] starts at b + j * b_stride (stride 0
  // broadcasts one row).
  void (*row_squared_distance)(const double* a, const double* b,
                               std::ptrdiff_t b_stride, int rows, int cols,
                               double* out);
};

const Kernels& scalar_kernels();
// Null when the binary was built without AVX2 support.
const Kernels* avx2_kernels();

bool isa_available(Isa isa);
const Kernels& kernels_for(Isa isa);

/// The variant used by the solvers: AVX2 when the CPU supports it, unless
/// SCENGAME_SIMD=scalar is set in the environment.
Isa active_isa();
const Kernels& kernels();
const char* isa_name(Isa isa);

/// Pairwise sum of n values (same tree as sum_rows).
double pairwise_sum(const double* values, int n);

}  // namespace scengame::simd
