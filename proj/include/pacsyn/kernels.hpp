#pragma once

// Data-parallel inner loops used by value iteration and the known-state test.
//
// Every kernel has a scalar reference and an AVX2 variant. The reference
// accumulates in four interleaved lanes and reduces them as
// (l0 + l2) + (l1 + l3), which is exactly the AVX2 lane order, so both
// backends produce bit-identical results. Neither backend uses FMA.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace pacsyn::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  /// sum_i weights[i] * values[index[i]]
  double (*gather_dot)(const double* weights, const std::uint32_t* index, std::size_t n,
                       const double* values);
  /// max_i |a[i] - b[i]|, 0 for n == 0
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  /// Largest MLE variance c(T - c) / (T^2 (T + 1)) over the count vector,
  /// where T = total. Requires total > 0.
  double (*max_mle_variance)(const std::uint32_t* counts, std::size_t n, std::uint64_t total);
  /// Fills mean[i] = c/T and var[i] = c(T - c) / (T^2 (T + 1)).
  void (*mle_moments)(const std::uint32_t* counts, std::size_t n, std::uint64_t total,
                      double* mean, double* var);
};

const KernelTable& scalar_table();
/// Null when the AVX2 translation unit was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports_avx2();

/// Active table. Chosen once from CPUID; PACSYN_SIMD=scalar|avx2 overrides.
const KernelTable& active();
Backend active_backend();
/// Forces a backend; returns false (and changes nothing) if unavailable.
bool select_backend(Backend backend);
std::string_view backend_name(Backend backend);

inline double gather_dot(const double* w, const std::uint32_t* idx, std::size_t n,
                         const double* values) {
  return active().gather_dot(w, idx, n, values);
}
inline double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return active().max_abs_diff(a, b, n);
}

}  // namespace pacsyn::kernels
