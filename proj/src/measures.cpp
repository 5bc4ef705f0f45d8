#include "tei/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/kernels.hpp"

namespace tei {

ProbVector ProbVector::from_weights(std::vector<double> w, bool normalize) {
  if (w.empty()) throw Error(ErrorCode::DimensionMismatch, "empty weight vector");
  long double total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) throw Error(ErrorCode::NonFinite, "non-finite weight", {static_cast<long>(i), -1, -1});
    if (w[i] < 0) throw Error(ErrorCode::InvalidArgument, "negative weight", {static_cast<long>(i), -1, -1});
    total += w[i];
  }
  if (normalize) {
    if (!(total > 0)) throw Error(ErrorCode::InvalidArgument, "weights have zero mass");
    for (double& v : w) v = static_cast<double>(v / total);
  } else if (std::abs(static_cast<double>(total) - 1.0) > kMassTol) {
    throw Error(ErrorCode::InvalidArgument, "weights do not sum to 1");
  }
  ProbVector p;
  p.w = std::move(w);
  for (std::size_t i = 0; i < p.w.size(); ++i)
    if (p.w[i] > 0) p.support.push_back(i);
  return p;
}

ProbVector ProbVector::point_mass(std::size_t n, std::size_t i) {
  std::vector<double> w(n, 0.0);
  w.at(i) = 1.0;
  return from_weights(std::move(w));
}

ProbVector ProbVector::uniform(std::size_t n) { return from_weights(std::vector<double>(n, 1.0), true); }

ProbVector gaussian_on_grid(std::span<const double> x, double mean, double sigma) {
  if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - mean) / sigma;
    w[i] = std::exp(-0.5 * z * z);
  }
  return ProbVector::from_weights(std::move(w), true);
}

double total_variation(const ProbVector& a, const ProbVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "total variation of different sizes");
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.w[i] - b.w[i]);
  return static_cast<double>(s / 2);
}

double relative_entropy(const ProbVector& nu, const ProbVector& mu) {
  if (nu.size() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "relative entropy of different sizes");
  std::vector<long double> terms;
  terms.reserve(nu.support.size());
  for (std::size_t i : nu.support) {
    if (!(mu.w[i] > 0)) return std::numeric_limits<double>::infinity();
    const long double v = nu.w[i];
    terms.push_back(v * std::log(v / static_cast<long double>(mu.w[i])));
  }
  std::sort(terms.begin(), terms.end(), [](long double x, long double y) { return std::abs(x) < std::abs(y); });
  long double s = 0;
  for (long double t : terms) s += t;
  return std::max(0.0, static_cast<double>(s));
}

double fisher_information(const ProbVector& nu, const ProbVector& mu, const SlopeEngine& slope) {
  const std::size_t n = nu.size();
  if (mu.size() != n || slope.size() != n) throw Error(ErrorCode::DimensionMismatch, "fisher information sizes");
  constexpr double kOffSupport = -1e300;
  std::vector<double> g(n, kOffSupport);
  for (std::size_t i : nu.support) {
    if (!(mu.w[i] > 0))
      throw Error(ErrorCode::AbsoluteContinuityViolated, "nu charges a point outside supp(mu)", {static_cast<long>(i), -1, -1});
    g[i] = std::log(nu.w[i] / mu.w[i]);
  }
  long double total = 0;
  for (std::size_t i : nu.support) {
    const double s = kernels::max_scaled_increment(g.data(), slope.weights(i), g[i], n).value;
    total += static_cast<long double>(nu.w[i]) * s * s;
  }
  return static_cast<double>(total);
}

ExpIntegral exp_integral(const ProbVector& mu, const Matrix& cost, double delta) {
  if (cost.rows() != mu.size() || !cost.square()) throw Error(ErrorCode::DimensionMismatch, "exp integral sizes");
  if (!std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "delta must be finite");
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i : mu.support)
    for (std::size_t j : mu.support)
      top = std::max(top, std::log(mu.w[i]) + std::log(mu.w[j]) + delta * cost(i, j));
  long double s = 0;
  for (std::size_t i : mu.support)
    for (std::size_t j : mu.support)
      s += std::exp(static_cast<long double>(std::log(mu.w[i]) + std::log(mu.w[j]) + delta * cost(i, j) - top));
  ExpIntegral out;
  out.log_value = top + static_cast<double>(std::log(s));
  if (out.log_value > std::log(std::numeric_limits<double>::max())) {
    out.overflow = true;
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.value = std::exp(out.log_value);
  }
  return out;
}

std::vector<double> distinct_radii(const Matrix& dtilde) {
  std::vector<double> v(dtilde.values());
  v.push_back(0.0);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x > out.back() * (1.0 + 1e-12)) out.push_back(x);
  }
  if (out.front() != 0.0) out.insert(out.begin(), 0.0);
  return out;
}

namespace {

constexpr double kReach = 1.0 + 1e-12;

ConcentrationProfile exact_profile(const ProbVector& mu, const Matrix& d, const std::vector<double>& radii) {
  const std::size_t n = mu.size();
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  const std::size_t count = std::size_t{1} << n;
  // Mass of a mask from two half tables.
  const std::size_t lo_bits = n / 2, hi_bits = n - lo_bits;
  std::vector<double> lo_mass(std::size_t{1} << lo_bits, 0.0), hi_mass(std::size_t{1} << hi_bits, 0.0);
  for (std::size_t m = 1; m < lo_mass.size(); ++m) {
    const unsigned b = static_cast<unsigned>(__builtin_ctzll(m));
    lo_mass[m] = lo_mass[m & (m - 1)] + mu.w[b];
  }
  for (std::size_t m = 1; m < hi_mass.size(); ++m) {
    const unsigned b = static_cast<unsigned>(__builtin_ctzll(m));
    hi_mass[m] = hi_mass[m & (m - 1)] + mu.w[lo_bits + b];
  }
  const std::uint32_t lo_mask = static_cast<std::uint32_t>((std::size_t{1} << lo_bits) - 1);
  auto mass = [&](std::uint32_t m) { return lo_mass[m & lo_mask] + hi_mass[m >> lo_bits]; };

  ConcentrationProfile prof;
  prof.radii = radii;
  prof.exact = true;
  prof.alpha.assign(radii.size(), 0.0);
  prof.witness.assign(radii.size(), 0);
  std::vector<std::uint32_t> ext(count);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    std::vector<std::uint32_t> nb(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d(i, j) <= radii[k] * kReach) nb[i] |= 1u << j;
    ext[0] = 0;
    double best = -1.0;
    std::uint32_t arg = 0;
    for (std::size_t s = 1; s < count; ++s) {
      const auto m = static_cast<std::uint32_t>(s);
      ext[s] = ext[s & (s - 1)] | nb[static_cast<std::size_t>(__builtin_ctz(m))];
      if (mass(m) < 0.5 - kAdmissibleTol) continue;
      const double out = mass(~ext[s] & full);
      if (out > best) {
        best = out;
        arg = m;
      }
    }
    prof.alpha[k] = std::max(0.0, best);
    prof.witness[k] = arg;
  }
  for (std::uint64_t m : prof.witness) {
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1u) set.push_back(i);
    prof.witness_sets.push_back(std::move(set));
  }
  return prof;
}

ConcentrationProfile sublevel_profile(const ProbVector& mu, const Matrix& d, const std::vector<double>& radii) {
  const std::size_t n = mu.size();
  std::vector<std::vector<std::size_t>> orders;
  std::vector<std::size_t> idx(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d(c, a) < d(c, b); });
    orders.push_back(idx);
  }
  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return dir == 0 ? mu.w[a] > mu.w[b] : mu.w[a] < mu.w[b];
    });
    orders.push_back(idx);
  }

  ConcentrationProfile prof;
  prof.radii = radii;
  prof.exact = false;
  prof.alpha.assign(radii.size(), -1.0);
  prof.witness.assign(radii.size(), 0);
  prof.witness_sets.assign(radii.size(), {});
  std::vector<double> dist_to(n);
  std::vector<std::size_t> by_dist(n);
  for (const auto& order : orders) {
    // Smallest admissible prefix; supersets only shrink the complement of A_r.
    std::vector<std::size_t> set;
    long double m = 0;
    for (std::size_t i : order) {
      set.push_back(i);
      m += mu.w[i];
      if (m >= 0.5L - kAdmissibleTol) break;
    }
    if (m < 0.5L - kAdmissibleTol) continue;
    std::fill(dist_to.begin(), dist_to.end(), std::numeric_limits<double>::infinity());
    for (std::size_t a : set)
      for (std::size_t x = 0; x < n; ++x) dist_to[x] = std::min(dist_to[x], d(a, x));
    for (std::size_t i = 0; i < n; ++i) by_dist[i] = i;
    std::sort(by_dist.begin(), by_dist.end(), [&](std::size_t a, std::size_t b) {
      return dist_to[a] != dist_to[b] ? dist_to[a] > dist_to[b] : a < b;
    });
    // Walk radii downward, accumulating mass of points farther than r.
    long double far = 0;
    std::size_t p = 0;
    for (std::size_t k = radii.size(); k-- > 0;) {
      while (p < n && dist_to[by_dist[p]] > radii[k] * kReach) far += mu.w[by_dist[p++]];
      const double a = static_cast<double>(far);
      if (a > prof.alpha[k]) {
        prof.alpha[k] = a;
        prof.witness_sets[k] = set;
      }
    }
  }
  for (std::size_t k = 0; k < radii.size(); ++k) {
    prof.alpha[k] = std::max(0.0, prof.alpha[k]);
    std::uint64_t mask = 0;
    for (std::size_t i : prof.witness_sets[k])
      if (i < 64) mask |= std::uint64_t{1} << i;
    prof.witness[k] = mask;
  }
  return prof;
}

}  // namespace

ConcentrationProfile concentration_profile(const ProbVector& mu, const Matrix& dtilde, ProfileMode mode) {
  if (!dtilde.square() || dtilde.rows() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "profile sizes");
  const auto radii = distinct_radii(dtilde);
  if (mode == ProfileMode::exact) {
    if (mu.size() > kExactProfileMax) throw Error(ErrorCode::TooLargeForExact, "exact profile needs n <= 20");
    return exact_profile(mu, dtilde, radii);
  }
  return sublevel_profile(mu, dtilde, radii);
}

double minimal_a_prime(const ConcentrationProfile& profile, double p_o, double r_o) {
  double a = 0.0;
  const std::size_t m = profile.radii.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double al = profile.alpha[k];
    if (al <= 0.0) continue;
    if (k + 1 == m) return std::numeric_limits<double>::infinity();
    const double gap = profile.radii[k + 1] - r_o;
    if (gap <= 0.0) continue;
    a = std::max(a, std::pow(gap, p_o) / -std::log(al));
  }
  return a;
}

ConcentrationFit fit_concentration_constants(const ConcentrationProfile& profile, double p_o) {
  ConcentrationFit fit;
  fit.r_o = 0.0;
  fit.a_prime = minimal_a_prime(profile, p_o, 0.0);
  for (double r : profile.radii) {
    fit.frontier_r_o.push_back(r);
    fit.frontier_a_prime.push_back(minimal_a_prime(profile, p_o, r));
  }
  return fit;
}

bool profile_bound_holds(const ConcentrationProfile& profile, double p_o, double a_prime, double r_o, double tol) {
  const std::size_t m = profile.radii.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double al = profile.alpha[k];
    if (al <= 0.0) continue;
    if (k + 1 == m) return false;
    const double gap = profile.radii[k + 1] - r_o;
    if (gap <= 0.0) continue;
    const double bound = a_prime > 0.0 ? std::exp(-std::pow(gap, p_o) / a_prime) : 0.0;
    if (al > bound + tol) return false;
  }
  return true;
}

}  // namespace tei
