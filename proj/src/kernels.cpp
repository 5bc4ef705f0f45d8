#include "tei/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tei::kernels {

#ifndef TEI_HAVE_AVX2
namespace avx2 {
MinArg min_diff_argmin(const double* c, const double* g, std::size_t n) {
  return scalar::min_diff_argmin(c, g, n);
}
MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n) {
  return scalar::max_scaled_increment(g, w, gi, n);
}
}  // namespace avx2
#endif

namespace {

Isa detect() {
  const char* env = std::getenv("TEI_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
#if defined(TEI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

MinArg min_diff_argmin(const double* c, const double* g, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::min_diff_argmin(c, g, n) : scalar::min_diff_argmin(c, g, n);
}

MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::max_scaled_increment(g, w, gi, n)
                                   : scalar::max_scaled_increment(g, w, gi, n);
}

}  // namespace tei::kernels
