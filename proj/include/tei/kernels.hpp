#pragma once

#include <cstddef>

// Hot inner loops with a scalar reference and an AVX2 variant chosen at
// runtime. Both variants return bitwise-identical results: the operations are
// min/max/subtract/multiply only and the AVX2 unit is built without FMA.
namespace tei::kernels {

struct MinArg {
  double value;
  std::size_t index;  // lowest index attaining the minimum
};

struct MaxArg {
  double value;       // 0 when no positive increment exists
  std::size_t index;  // lowest index attaining a positive maximum, n otherwise
};

enum class Isa { scalar, avx2 };

// min_j (c[j] - g[j]) and its lowest argmin. n must be positive.
MinArg min_diff_argmin(const double* c, const double* g, std::size_t n);

// max(0, max_j (g[j] - gi) * w[j]) and its lowest argmax among positive terms.
MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n);

Isa active_isa();
const char* isa_name(Isa isa);
// Overrides the runtime choice; requesting avx2 on a CPU without it falls back to scalar.
void force_isa(Isa isa);
bool avx2_available();

namespace scalar {
MinArg min_diff_argmin(const double* c, const double* g, std::size_t n);
MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n);
}  // namespace scalar

namespace avx2 {
MinArg min_diff_argmin(const double* c, const double* g, std::size_t n);
MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n);
}  // namespace avx2

}  // namespace tei::kernels
