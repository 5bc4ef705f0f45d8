#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tei/matrix.hpp"
#include "tei/measures.hpp"
#include "tei/transport.hpp"

namespace tei {

// Scalar profiles for the entropy and transport terms.
struct ScalarProfile {
  enum class Kind { sqrt, identity, power };
  Kind kind = Kind::identity;
  double q = 1.0;  // exponent for Kind::power

  static ScalarProfile sqrt() { return {Kind::sqrt, 0.5}; }
  static ScalarProfile identity() { return {Kind::identity, 1.0}; }
  static ScalarProfile power(double q) { return {Kind::power, q}; }

  double value(double t) const;
  double derivative(double t) const;  // +infinity at 0 when the exponent is below 1
  double exponent() const;
  std::string name() const;
};

// F(nu) = alpha(a H(nu|mu)) - beta(T_slack(nu, mu)) where
// T_slack = ((T^(1/p_o) - slack)_+)^p_o. slack = 0 is the plain transport cost.
struct FunctionalSpec {
  ScalarProfile alpha = ScalarProfile::identity();
  ScalarProfile beta = ScalarProfile::identity();
  double a = 1.0;
  double slack = 0.0;
  double p_o = 2.0;

  // Throws InvalidSpec for non-positive a, negative slack, or an (alpha, beta)
  // pair for which t -> alpha(t) - beta(t + b) is unbounded below.
  void validate() const;
  bool identity_case() const;
  double slack_transport(double t) const;
  double slack_derivative(double t) const;
};

struct FunctionalState {
  double entropy = 0;
  double transport = 0;        // T_c
  double slack_transport = 0;  // after slack
  double value = 0;
  TransportSolution ot;
};

FunctionalState evaluate_state(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost);
double evaluate(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost);

struct LowerBoundCertificate {
  double value = 0;     // inf over h >= 0 of alpha(a h) - beta(h / delta + I_delta / (e delta))
  double b = 0;         // max(0, -value): F >= -b
  double i_delta = 0;
  double h_star = 0;
};

LowerBoundCertificate lower_bound_certificate(const ProbVector& mu, const Matrix& cost, double delta, const FunctionalSpec& spec);

// Scale linking the entropy and transport derivatives at nu:
// a alpha'(a H) / (beta'(T_slack) dT_slack/dT), clamped to [1e-8, 1e8].
double lambda_bar(const FunctionalSpec& spec, const FunctionalState& st);

struct FirstVariation {
  std::vector<double> kernel;  // zero off supp(nu), nu-centered
  bool boundary = false;       // supp(nu) strictly inside supp(mu)
  FunctionalState state;
};

FirstVariation first_variation(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost);
std::vector<double> variation_kernel(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu,
                                     const FunctionalState& st);

struct Stationarity {
  double lambda_bar = 0;
  double residual = 0;  // nu-weighted std of lambda log(nu/mu) - psi on supp(nu)
  double constant = 0;  // nu-weighted mean of the same
};

Stationarity stationarity(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const FunctionalState& st);

struct MinimizeConfig {
  std::size_t multistarts = 32;
  std::size_t max_iter = 5000;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  double damping = 0.5;
  std::size_t max_halvings = 6;
  double ball = 1e-10;
  double tie_tol = 1e-9;
  std::vector<ProbVector> extra_starts;
};

enum class Method { mirror, fixed_point, truncation };
const char* to_string(Method m);

struct StartOutcome {
  ProbVector nu;
  double value = 0;
  std::size_t iterations = 0;
  bool stalled = false;
  bool oscillation = false;
  std::vector<double> trace;
};

struct MinimizationResult {
  ProbVector minimizer;
  double value = 0;
  Method method = Method::mirror;
  double lambda_bar = 0;
  double residual = 0;
  double constant = 0;
  std::vector<double> trace;  // winner's per-iteration values, or per-level minima for truncation
  std::size_t multistart_count = 0;
  double agreement_tv = 0;
  std::vector<ProbVector> ties;
  std::size_t best_start = 0;  // 0 is mu itself, s >= 1 is the run from start s - 1
  bool stalled = false;
  bool oscillation = false;
  bool trace_monotone = true;
  std::vector<double> levels;
};

// Starting points: mu, cost-difference tilts, vertex tilts and Dirichlet draws,
// all supported on supp(mu). Deterministic in the seed.
std::vector<ProbVector> multistart_battery(const ProbVector& mu, const Matrix& cost, std::size_t count, std::uint64_t seed);

StartOutcome mirror_run(const FunctionalSpec& spec, const ProbVector& start, const ProbVector& mu, const Matrix& cost,
                        const MinimizeConfig& cfg);
StartOutcome fixed_point_run(const FunctionalSpec& spec, const ProbVector& start, const ProbVector& mu, const Matrix& cost,
                             const MinimizeConfig& cfg);

MinimizationResult minimize_mirror(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const MinimizeConfig& cfg);
MinimizationResult minimize_fixed_point(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost,
                                        const MinimizeConfig& cfg);
// Levels must increase; a final level at max(c) is appended when missing.
MinimizationResult minimize_truncation(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost,
                                       const std::vector<double>& levels, const MinimizeConfig& cfg);

}  // namespace tei
