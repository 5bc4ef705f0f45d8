#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tei/matrix.hpp"
#include "tei/metric.hpp"

namespace tei {

inline constexpr double kMassTol = 1e-12;

struct ProbVector {
  std::vector<double> w;
  std::vector<std::size_t> support;  // indices with w > 0, ascending

  // Validates nonnegativity and unit mass (kMassTol). With normalize, any
  // nonnegative vector of positive finite mass is rescaled first.
  static ProbVector from_weights(std::vector<double> w, bool normalize = false);
  static ProbVector point_mass(std::size_t n, std::size_t i);
  static ProbVector uniform(std::size_t n);

  std::size_t size() const noexcept { return w.size(); }
  double operator[](std::size_t i) const noexcept { return w[i]; }
  bool full_support() const noexcept { return support.size() == w.size(); }
};

// Density on grid points, renormalized over the grid.
ProbVector gaussian_on_grid(std::span<const double> x, double mean, double sigma);

double total_variation(const ProbVector& a, const ProbVector& b);

// Sum over supp(nu) of nu log(nu / mu); +infinity if supp(nu) is not inside supp(mu).
double relative_entropy(const ProbVector& nu, const ProbVector& mu);

// Integral of |grad+ log(nu/mu)|^2 d nu. Points off supp(nu) carry g = -infinity.
double fisher_information(const ProbVector& nu, const ProbVector& mu, const SlopeEngine& slope);

struct ExpIntegral {
  double value = 1.0;      // +infinity when overflowing
  double log_value = 0.0;  // always finite for finite costs
  bool overflow = false;
};

// sum_ij mu_i mu_j exp(delta c_ij), via log-sum-exp.
ExpIntegral exp_integral(const ProbVector& mu, const Matrix& cost, double delta);

struct ConcentrationProfile {
  std::vector<double> radii;           // ascending, starts at 0
  std::vector<double> alpha;           // max over mu(A) >= 1/2 of 1 - mu(A_r)
  std::vector<std::uint64_t> witness;  // bitmask of the maximizing A (first 64 points)
  std::vector<std::vector<std::size_t>> witness_sets;
  bool exact = false;
};

enum class ProfileMode { exact, sublevel };

inline constexpr std::size_t kExactProfileMax = 20;
// Admissible sets satisfy mu(A) >= 1/2 - kAdmissibleTol.
inline constexpr double kAdmissibleTol = 1e-12;

// Distinct values of the matrix (plus 0), merged when within 1e-12 relative.
std::vector<double> distinct_radii(const Matrix& dtilde);

// A_r = {x : d(x, A) <= r (1 + 1e-12)}.
ConcentrationProfile concentration_profile(const ProbVector& mu, const Matrix& dtilde, ProfileMode mode);

struct ConcentrationFit {
  double a_prime = 0.0;
  double r_o = 0.0;
  // Minimal a' as a function of r_o, sampled at each profile radius.
  std::vector<double> frontier_r_o;
  std::vector<double> frontier_a_prime;
};

// Minimal a' such that alpha(r) <= exp(-(r - r_o)_+^p / a') for all r, using
// the left limit at each jump of the profile.
double minimal_a_prime(const ConcentrationProfile& profile, double p_o, double r_o);
// Returns the minimal a' with r_o = 0 plus the frontier a'(r_o).
ConcentrationFit fit_concentration_constants(const ConcentrationProfile& profile, double p_o);
// Checks alpha(r) <= exp(-(r - r_o)^p / a') for r >= r_o, including left limits.
bool profile_bound_holds(const ConcentrationProfile& profile, double p_o, double a_prime, double r_o,
                         double tol = 1e-12);

}  // namespace tei
