#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/inequality.hpp"

namespace tei {

namespace {

// Mean position of the mu quantile range matched to each point of nu.
std::vector<double> barycentric_rearrangement(std::span<const double> x, const ProbVector& nu, const ProbVector& mu) {
  const std::size_t n = x.size();
  std::vector<double> t(n, 0.0);
  long double fn = 0;
  std::size_t j = 0;
  long double gj = mu.w[0];
  for (std::size_t i = 0; i < n; ++i) {
    const long double lo = fn, hi = fn + nu.w[i];
    fn = hi;
    if (!(nu.w[i] > 0)) {
      t[i] = x[i];
      continue;
    }
    long double acc = 0, pos = lo;
    while (pos < hi) {
      while (j + 1 < n && gj <= pos) {
        gj += mu.w[++j];
      }
      const long double end = std::min(hi, j + 1 < n ? gj : hi);
      acc += (end - pos) * x[j];
      if (end <= pos) break;
      pos = end;
    }
    // Masses below the resolution of the cumulative sum map to the current quantile.
    t[i] = hi > lo ? static_cast<double>(acc / (hi - lo)) : x[j];
  }
  return t;
}

}  // namespace

MaProfile ma_residual_1d(std::span<const double> x, const ProbVector& mu, const ProbVector& nu, double lambda, const MaOptions& opt) {
  const std::size_t n = x.size();
  if (mu.size() != n || nu.size() != n) throw Error(ErrorCode::DimensionMismatch, "grid and measures differ in length");
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "grid needs at least 3 points");
  if (!(lambda > 0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  const double h = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i] - x[i - 1] - h) > 1e-9 * std::abs(h)) throw Error(ErrorCode::InvalidArgument, "grid must be uniform");
  for (std::size_t i = 0; i < n; ++i)
    if (nu.w[i] > 0 && !(mu.w[i] > 0)) throw Error(ErrorCode::AbsoluteContinuityViolated, "nu charges a point outside supp(mu)");

  MaProfile p;
  p.x.assign(x.begin(), x.end());
  p.stencil = opt.stencil > 0 ? opt.stencil : std::max<std::size_t>(1, std::lround(std::sqrt(static_cast<double>(n)) / 2.0));
  const std::size_t k = p.stencil;
  const double inf = std::numeric_limits<double>::infinity();
  p.V.assign(n, inf);
  for (std::size_t i = 0; i < n; ++i)
    if (nu.w[i] > 0) p.V[i] = -std::log(nu.w[i] / mu.w[i]);
  p.T = barycentric_rearrangement(x, nu, mu);
  p.dV.assign(n, 0.0);
  p.d2V.assign(n, 0.0);
  p.pre_residual.assign(n, 0.0);
  p.ma_residual.assign(n, 0.0);
  p.boundary.assign(n, true);

  auto log_density = [&](double at) {
    double t = std::clamp((at - x[0]) / h, 0.0, static_cast<double>(n - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
    const double f = t - static_cast<double>(i);
    auto lh = [&](std::size_t m) { return mu.w[m] > 0 ? std::log(mu.w[m] / h) : -745.0; };
    return (1 - f) * lh(i) + f * lh(i + 1);
  };

  long double s_pre = 0, s_ma = 0, sw = 0;
  const double kh = static_cast<double>(k) * h;
  for (std::size_t i = k; i + k < n; ++i) {
    if (!std::isfinite(p.V[i - k]) || !std::isfinite(p.V[i]) || !std::isfinite(p.V[i + k])) continue;
    p.boundary[i] = false;
    p.dV[i] = (p.V[i + k] - p.V[i - k]) / (2.0 * kh);
    p.d2V[i] = (p.V[i + k] - 2.0 * p.V[i] + p.V[i - k]) / (kh * kh);
    p.pre_residual[i] = lambda * p.dV[i] - 2.0 * (p.T[i] - x[i]);
    p.ma_residual[i] = std::exp(log_density(x[i] + 0.5 * lambda * p.dV[i])) * (1.0 + 0.5 * lambda * p.d2V[i]) -
                       std::exp(-p.V[i]) * mu.w[i] / h;
    s_pre += nu.w[i] * p.pre_residual[i] * p.pre_residual[i];
    s_ma += nu.w[i] * p.ma_residual[i] * p.ma_residual[i];
    sw += nu.w[i];
  }
  if (sw > 0) {
    p.rms_pre = static_cast<double>(std::sqrt(s_pre / sw));
    p.rms_ma = static_cast<double>(std::sqrt(s_ma / sw));
  }
  p.min_convexity = inf;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!std::isfinite(p.V[i - 1]) || !std::isfinite(p.V[i]) || !std::isfinite(p.V[i + 1])) continue;
    auto u = [&](std::size_t m) { return p.V[m] + x[m] * x[m] / lambda; };
    p.min_convexity = std::min(p.min_convexity, u(i + 1) - 2.0 * u(i) + u(i - 1));
  }
  if (!std::isfinite(p.min_convexity)) p.min_convexity = 0;
  return p;
}

}  // namespace tei
