#include "tei/kernels.hpp"

namespace tei::kernels::scalar {

MinArg min_diff_argmin(const double* c, const double* g, std::size_t n) {
  MinArg best{c[0] - g[0], 0};
  for (std::size_t j = 1; j < n; ++j) {
    const double v = c[j] - g[j];
    if (v < best.value) {
      best.value = v;
      best.index = j;
    }
  }
  return best;
}

MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n) {
  MaxArg best{0.0, n};
  for (std::size_t j = 0; j < n; ++j) {
    const double v = (g[j] - gi) * w[j];
    if (v > best.value) {
      best.value = v;
      best.index = j;
    }
  }
  return best;
}

}  // namespace tei::kernels::scalar
