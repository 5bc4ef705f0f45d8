#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "tei/kernels.hpp"

using namespace tei::kernels;

namespace {

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, int levels) {
  // Few distinct levels force ties across lanes.
  std::uniform_int_distribution<int> lv(0, levels - 1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = levels > 0 ? lv(rng) * 0.25 : z(rng);
  return v;
}

}  // namespace

TEST_CASE("min_diff_argmin agrees across implementations") {
  if (!avx2_available()) return;
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 70; ++n)
    for (int levels : {0, 2, 5}) {
      const auto c = draw(rng, n, levels), g = draw(rng, n, levels);
      const MinArg s = scalar::min_diff_argmin(c.data(), g.data(), n);
      const MinArg v = avx2::min_diff_argmin(c.data(), g.data(), n);
      CHECK(s.index == v.index);
      CHECK(std::bit_cast<std::uint64_t>(s.value) == std::bit_cast<std::uint64_t>(v.value));
    }
}

TEST_CASE("max_scaled_increment agrees across implementations, with -inf sentinels") {
  if (!avx2_available()) return;
  std::mt19937_64 rng(11);
  std::bernoulli_distribution hole(0.2);
  for (std::size_t n = 1; n <= 70; ++n)
    for (int levels : {0, 3}) {
      auto g = draw(rng, n, levels);
      auto w = draw(rng, n, 0);
      for (std::size_t j = 0; j < n; ++j) {
        w[j] = std::abs(w[j]);
        if (hole(rng)) w[j] = 0.0;
        if (hole(rng)) g[j] = -1e300;
      }
      for (double gi : {-1.0, 0.0, 0.25, 2.0}) {
        const MaxArg s = scalar::max_scaled_increment(g.data(), w.data(), gi, n);
        const MaxArg v = avx2::max_scaled_increment(g.data(), w.data(), gi, n);
        CHECK(s.index == v.index);
        CHECK(s.value == v.value);
      }
    }
}

TEST_CASE("scalar reference semantics") {
  const double c[] = {3, 1, 2, 1};
  const double g[] = {0, 0, 1, 0};
  const MinArg m = scalar::min_diff_argmin(c, g, 4);
  CHECK(m.value == 1.0);
  CHECK(m.index == 1);  // tie between 1 and 2 and 3 goes to the lowest index

  const double gg[] = {0, 1, 3};
  const double w[] = {0, 1, 0.5};
  const MaxArg x = scalar::max_scaled_increment(gg, w, 0.0, 3);
  CHECK(x.value == 1.5);
  CHECK(x.index == 2);
  const MaxArg none = scalar::max_scaled_increment(gg, w, 10.0, 3);
  CHECK(none.value == 0.0);
  CHECK(none.index == 3);
}

TEST_CASE("forcing the scalar path") {
  const Isa before = active_isa();
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  const double c[] = {1, 0, 2, 5, 4, 3, 2, 1, 0, 9};
  const double g[] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(min_diff_argmin(c, g, 10).index == 1);
  force_isa(Isa::avx2);
  CHECK(active_isa() == (avx2_available() ? Isa::avx2 : Isa::scalar));
  CHECK(min_diff_argmin(c, g, 10).index == 1);
  force_isa(before);
}
