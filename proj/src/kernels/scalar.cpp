#include <cmath>

#include "pacsyn/kernels.hpp"

namespace pacsyn::kernels {
namespace {

double gather_dot_scalar(const double* w, const std::uint32_t* idx, std::size_t n,
                         const double* values) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) lane[j] = lane[j] + w[i + j] * values[idx[i + j]];
  }
  for (std::size_t j = 0; i + j < n; ++j) lane[j] = lane[j] + w[i + j] * values[idx[i + j]];
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

inline double mle_var(double c, double t) { return (c * (t - c)) / ((t * t) * (t + 1.0)); }

double max_mle_variance_scalar(const std::uint32_t* counts, std::size_t n, std::uint64_t total) {
  const double t = static_cast<double>(total);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = mle_var(static_cast<double>(counts[i]), t);
    if (v > m) m = v;
  }
  return m;
}

void mle_moments_scalar(const std::uint32_t* counts, std::size_t n, std::uint64_t total,
                        double* mean, double* var) {
  const double t = static_cast<double>(total);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(counts[i]);
    mean[i] = c / t;
    var[i] = mle_var(c, t);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{gather_dot_scalar, max_abs_diff_scalar, max_mle_variance_scalar,
                                 mle_moments_scalar};
  return table;
}

}  // namespace pacsyn::kernels
