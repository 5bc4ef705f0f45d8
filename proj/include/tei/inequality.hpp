#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tei/matrix.hpp"
#include "tei/measures.hpp"
#include "tei/metric.hpp"
#include "tei/transport.hpp"
#include "tei/variational.hpp"

namespace tei {

// Half the smallest positive entry of the induced distance.
double default_slack(const Matrix& dtilde);

// T_slack(nu, mu) / H(nu|mu); 0 at nu = mu.
double t2_ratio(const ProbVector& nu, const ProbVector& mu, const Matrix& cost, double slack, double p_o);

struct T2Options {
  double slack = 0.0;
  double bracket_tol = 0.01;  // hi = lo (1 + bracket_tol)
  double p_o = 2.0;
  std::size_t multistarts = 32;
  std::size_t max_iter = 1500;
  std::size_t ascent_iters = 300;
  std::size_t max_rounds = 8;
  std::uint64_t seed = 1;
};

// Lower end from ratio ascent (a witness); upper end from the multistart
// minimum of F = sqrt(a H) - sqrt(T_slack) being nonnegative at a = hi.
struct T2Estimate {
  double lo = 0, hi = 0;
  ProbVector witness;
  double witness_ratio = 0;
  double slack = 0;
  double min_value_at_hi = 0;
  bool certified = false;
  std::size_t rounds = 0;
};

T2Estimate estimate_t2(const ProbVector& mu, const Matrix& cost, const T2Options& opt);

struct SuiteOptions {
  std::size_t probes = 64;
  std::size_t semiconcave_probes = 16;
  std::size_t ascent_steps = 50;
  std::size_t refine_top = 8;
  // Per-step cap on log-weight changes during refinement. The ratios are unbounded
  // near point masses, so refinement stays local to the probes.
  double max_log_step = 0.1;
  std::uint64_t seed = 1;
};

struct RatioEstimate {
  double value = 0;
  ProbVector witness;
  bool has_witness = false;
  std::string slope_tag;
  std::size_t probes = 0;
  std::size_t degenerate = 0;  // probes with I = 0 < numerator, skipped
};

// Fisher information and its first variation (as a kernel on supp(nu)).
double fisher_with_gradient(const ProbVector& nu, const ProbVector& mu, const SlopeEngine& slope, std::vector<double>* grad);

// Test densities e^g mu with g a sum of Gaussian bumps at three correlation
// lengths (0.1, 0.3, 1 times the diameter), plus semiconcave tilts.
std::vector<ProbVector> probe_suite(const ProbVector& mu, const Matrix& dist, const SuiteOptions& opt);

// sup H / I over the suite with ascent refinement.
RatioEstimate estimate_lsi(const ProbVector& mu, const Matrix& dist, const SlopeEngine& slope, const SuiteOptions& opt);
// sup T_slack / I over the suite with ascent refinement.
RatioEstimate estimate_w2i(const ProbVector& mu, const Matrix& dist, const Matrix& cost, const SlopeEngine& slope,
                           const SuiteOptions& opt, double slack, double p_o);

enum class LevelVerdict { trivial, nontrivial, inconclusive };
const char* to_string(LevelVerdict v);

struct AMuOptions {
  double slack = 0.0;
  double p_o = 2.0;
  double tol = 0.01;  // relative bracket width
  double lo_hint = 0.0;
  double hi_hint = 0.0;
  std::size_t multistarts = 16;
  std::size_t max_iter = 3000;
  std::size_t max_levels = 60;
  std::uint64_t seed = 1;
};

struct AMuLevel {
  double a = 0;
  LevelVerdict verdict = LevelVerdict::inconclusive;
};

struct AMuEstimate {
  double lo = 0, hi = 0;
  bool inconclusive = false;
  std::vector<AMuLevel> levels;
  ProbVector nontrivial_witness;  // at the level equal to lo, when lo > 0
};

// Runs the damped fixed-point iteration for the identity functional from the
// multistart battery and classifies the level.
LevelVerdict classify_level(const ProbVector& mu, const Matrix& cost, double a, const AMuOptions& opt, ProbVector* witness);
AMuEstimate estimate_a_mu(const ProbVector& mu, const Matrix& cost, const AMuOptions& opt);

// f(x) = min_y { -g(y) + lambda d(x, y)^2 } for random g and lambda in (0, lambda_o).
struct SemiconcaveClass {
  double lambda_o = 1.0;
  std::vector<std::vector<double>> samples;
  std::vector<double> lambdas;

  static SemiconcaveClass sample(const Matrix& dist, double lambda_o, std::size_t count, std::uint64_t seed);
  // min over grid midpoints of f(m) - f(x)/2 - f(y)/2 + lambda |x - y|^2 / 4; needs a uniform 1D grid.
  double worst_midpoint_margin(const FiniteMetricSpace& space) const;
};

struct SubdifferentialCheck {
  double lhs = 0;     // sum nu_i s_i^p
  double primal = 0;  // T_c
  bool holds = false;
};
SubdifferentialCheck subdifferential_check(const TransportSolution& sol, const Matrix& cost);

// For c = d^2: (psi(y) - psi(x)) / d(x, y) - d(x, y) <= 2 s(x) for admissible y.
double slope_potential_violation(const TransportSolution& sol, const ProbVector& nu, const Matrix& dist, const SlopeEngine& slope);

struct OvReport {
  double c_t2_hi = 0, c_lsi = 0, c_lsi_upper = 0, bound = 0;
  bool holds = false;
  std::size_t subdifferential_instances = 0;
  bool subdifferential_all = true;
  double slope_bound_violation = 0;
  bool slope_bound_ok = true;
  std::string slope_tag;
};

// c_t2.hi <= 4 c_lsi (1 + margin) + abs_tol, plus the subdifferential checks on the given measures.
OvReport verify_otto_villani(const T2Estimate& t2, const RatioEstimate& lsi, const std::vector<ProbVector>& instances,
                             const ProbVector& mu, const Matrix& cost, const Matrix& dist, const SlopeEngine& slope,
                             double margin, double abs_tol = 1e-6);

struct W2iReport {
  double c_t2_hi = 0, c_w2i = 0, c_w2i_upper = 0, bound = 0;
  bool holds = false;
};
W2iReport verify_w2i(const T2Estimate& t2, const RatioEstimate& w2i, double margin, double abs_tol = 1e-6);

struct RestrictedReport {
  double d_restricted = 0, d_full = 0, lambda_o = 0, bound = 0, c_t2_hi = 0;
  double worst_midpoint_margin = 0;
  bool class_ok = false;
  bool subset_ok = false;
  bool holds = false;
  ProbVector witness;
};
RestrictedReport verify_restricted_lsi(const ProbVector& mu, const FiniteMetricSpace& space, const T2Estimate& t2,
                                       const RatioEstimate& lsi_full, const SemiconcaveClass& cls, const SlopeEngine& slope,
                                       double margin, double abs_tol = 1e-6);

struct ChainReport {
  bool t2_le_amu = false;   // c_t2.lo - tol <= a_mu.hi
  bool amu_le_w2i = false;  // a_mu.lo - tol <= 2 sqrt(c_w2i upper)
  bool w2i_le_lsi = false;  // 2 sqrt(c_w2i) - tol <= 4 c_lsi upper
  bool ok() const { return t2_le_amu && amu_le_w2i && w2i_le_lsi; }
};
// tol = 1e-6 + 1% of the larger side; upper ends of suite estimates are inflated by margin.
ChainReport constants_chain(const T2Estimate& t2, const AMuEstimate& amu, const RatioEstimate& w2i, const RatioEstimate& lsi,
                            double margin);

// Identity case: D(psi) = -sum phi mu - a log sum e^(psi/a) mu with phi = psi^c.
double dual_objective(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const std::vector<double>& psi);

struct DualConfig {
  std::size_t multistarts = 64;
  std::size_t max_iter = 2000;
  std::uint64_t seed = 1;
};

struct DualResult {
  double value = 0;
  std::vector<double> psi;
  std::size_t best_start = 0;
};

DualResult dual_value(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const DualConfig& cfg);

struct MaOptions {
  std::size_t stencil = 0;  // 0 selects max(1, round(sqrt(n) / 2))
};

struct MaProfile {
  std::vector<double> x, V, dV, d2V, T, pre_residual, ma_residual;
  std::vector<bool> boundary;
  std::size_t stencil = 1;
  double rms_pre = 0, rms_ma = 0;
  double min_convexity = 0;  // min second difference (3-point) of V + x^2 / lambda
};

// Residuals of lambda V' = 2 (T - x) and h(x + lambda V'/2)(1 + lambda V''/2) = e^-V h(x)
// on a uniform grid, where V = -log(nu/mu), h is the grid density of mu and T is the
// barycentric monotone rearrangement of nu onto mu.
MaProfile ma_residual_1d(std::span<const double> x, const ProbVector& mu, const ProbVector& nu, double lambda,
                         const MaOptions& opt = {});

// Radius offsets used by the concentration transfers.
double transfer_r_o(double a, double b, double p_o);                   // (a log 2)^{1/p} + 2 b^{1/p}
double exp_integral_r_o(double delta, double i_delta, double p_o);     // (log(2 I_delta) / delta)^{1/p}

}  // namespace tei
