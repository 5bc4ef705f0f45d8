#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tei/matrix.hpp"

namespace tei {

inline constexpr double kTriangleTol = 1e-12;

struct FiniteMetricSpace {
  std::size_t n = 0;
  std::vector<double> points;  // 1D coordinates for grid spaces, empty otherwise
  Matrix dist;

  // Smallest positive distance; the grid step for uniform grids.
  double min_positive_distance() const;
  double diameter() const;
};

// Validates a distance matrix: square, finite, nonnegative, zero diagonal,
// positive off-diagonal, symmetric, triangle inequality up to kTriangleTol.
// TriangleViolation carries (i, j, k) with dist[i][j] > dist[i][k] + dist[k][j].
FiniteMetricSpace validate_space(const Matrix& dist, std::vector<double> points = {});

// n equally spaced points on [a, b] with |x - y|.
FiniteMetricSpace grid_space(double a, double b, std::size_t n);

// Convex profiles phi with phi(0) = 0.
struct CostProfile {
  enum class Kind { square, power, linear_plus_square };
  Kind kind = Kind::square;
  double p = 2.0;  // exponent for Kind::power

  static CostProfile square() { return {Kind::square, 2.0}; }
  static CostProfile power(double p) { return {Kind::power, p}; }
  static CostProfile linear_plus_square() { return {Kind::linear_plus_square, 2.0}; }

  double operator()(double x) const;
  double right_derivative(double x) const;
  std::string name() const;
};

inline constexpr double kDoublingCap = 1e6;

// sup phi(2x)/phi(x) over the log grid, joined with the analytic limit.
double doubling_ratio(const CostProfile& phi, double cap = kDoublingCap);

// sup x phi'(x)/phi(x); exact for the library profiles.
double cost_exponent(const CostProfile& phi, double cap = kDoublingCap);

struct PowerTypeCost {
  CostProfile phi;
  double exponent_po = 2.0;
  double doubling_K = 4.0;
  Matrix cost;
  std::optional<double> truncation_level;
};

PowerTypeCost make_cost(const FiniteMetricSpace& space, const CostProfile& phi,
                        std::optional<double> truncate = std::nullopt);

// c^(1/p_o); throws TriangleViolation when the result is not a metric.
Matrix induced_distance(const FiniteMetricSpace& space, const PowerTypeCost& cost);

// First (i, j, k) with d[i][j] > d[i][k] + d[k][j] + tol, if any.
std::optional<std::array<std::size_t, 3>> find_triangle_violation(const Matrix& d, double tol = kTriangleTol);

struct SlopeOperator {
  enum class Mode { global, graph };
  Mode mode = Mode::global;
  double radius = 0.0;

  static SlopeOperator global() { return {Mode::global, 0.0}; }
  static SlopeOperator graph(double r) { return {Mode::graph, r}; }
  std::string tag() const;
};

// Precomputed inverse-distance weights for repeated slope evaluations.
// Graph mode admits y with d(x, y) <= r (1 + 1e-9).
class SlopeEngine {
 public:
  SlopeEngine(const Matrix& dist, SlopeOperator op);

  const SlopeOperator& op() const noexcept { return op_; }
  std::size_t size() const noexcept { return n_; }

  // |grad+ g|(x) = max_y [g(y) - g(x)]_+ / d(x, y) over admissible y.
  std::vector<double> operator()(std::span<const double> g) const;
  // Same, also reporting the maximizing y per point (n when the slope is 0).
  void evaluate(std::span<const double> g, std::vector<double>& slope, std::vector<std::size_t>& argmax) const;
  const double* weights(std::size_t i) const { return inv_.row(i); }

 private:
  SlopeOperator op_;
  std::size_t n_;
  Matrix inv_;
};

std::vector<double> slope(const FiniteMetricSpace& space, const SlopeOperator& op, std::span<const double> g);

}  // namespace tei
