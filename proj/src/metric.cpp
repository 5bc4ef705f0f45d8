#include "tei/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/kernels.hpp"

namespace tei {

double FiniteMetricSpace::min_positive_distance() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) m = std::min(m, dist(i, j));
  return m;
}

double FiniteMetricSpace::diameter() const { return dist.max_entry(); }

std::optional<std::array<std::size_t, 3>> find_triangle_violation(const Matrix& d, double tol) {
  const std::size_t n = d.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* di = d.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = di[j];
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (dij > di[k] + d(k, j) + tol) return std::array<std::size_t, 3>{i, j, k};
      }
    }
  }
  return std::nullopt;
}

FiniteMetricSpace validate_space(const Matrix& dist, std::vector<double> points) {
  if (!dist.square() || dist.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "distance matrix must be square and nonempty");
  const std::size_t n = dist.rows();
  if (!points.empty() && points.size() != n) throw Error(ErrorCode::DimensionMismatch, "coordinate count differs from matrix size");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dist(i, j);
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite distance", {li, lj, -1});
      if (v < 0) throw Error(ErrorCode::NegativeDistance, "negative distance", {li, lj, -1});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (dist(i, i) != 0.0) throw Error(ErrorCode::NonzeroDiagonal, "nonzero diagonal entry", {static_cast<long>(i), static_cast<long>(i), -1});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      if (dist(i, j) != dist(j, i)) throw Error(ErrorCode::AsymmetricDistance, "dist[i][j] != dist[j][i]", {li, lj, -1});
      if (dist(i, j) == 0.0) throw Error(ErrorCode::DegenerateDistance, "zero distance between distinct points", {li, lj, -1});
    }
  }
  if (auto v = find_triangle_violation(dist)) {
    const auto [i, j, k] = *v;
    throw Error(ErrorCode::TriangleViolation, "triangle inequality fails",
                {static_cast<long>(i), static_cast<long>(j), static_cast<long>(k)});
  }
  return FiniteMetricSpace{n, std::move(points), dist};
}

FiniteMetricSpace grid_space(double a, double b, std::size_t n) {
  if (n < 1 || !(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidArgument, "grid needs n >= 1 and a < b");
  std::vector<double> x(n);
  const double h = n > 1 ? (b - a) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 0; i < n; ++i) x[i] = a + h * static_cast<double>(i);
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::abs(x[i] - x[j]);
  return validate_space(d, std::move(x));
}

double CostProfile::operator()(double x) const {
  switch (kind) {
    case Kind::square: return x * x;
    case Kind::power: return std::pow(x, p);
    case Kind::linear_plus_square: return x + x * x;
  }
  return 0.0;
}

double CostProfile::right_derivative(double x) const {
  switch (kind) {
    case Kind::square: return 2.0 * x;
    case Kind::power: return p == 1.0 ? 1.0 : p * std::pow(x, p - 1.0);
    case Kind::linear_plus_square: return 1.0 + 2.0 * x;
  }
  return 0.0;
}

std::string CostProfile::name() const {
  switch (kind) {
    case Kind::square: return "square";
    case Kind::power: return "power";
    case Kind::linear_plus_square: return "linear_plus_square";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kLogGrid = 2048;

template <class F>
double log_grid_sup(F f) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kLogGrid; ++k) {
    const double x = std::pow(10.0, -6.0 + 12.0 * static_cast<double>(k) / static_cast<double>(kLogGrid - 1));
    best = std::max(best, f(x));
  }
  return best;
}

void check_profile(const CostProfile& phi) {
  if (phi.kind == CostProfile::Kind::power && !(phi.p >= 1.0 && std::isfinite(phi.p)))
    throw Error(ErrorCode::InvalidArgument, "power profile needs p >= 1");
}

// Limits as x -> 0 or infinity, where the sups of the library profiles are attained.
double analytic_exponent(const CostProfile& phi) {
  return phi.kind == CostProfile::Kind::power ? phi.p : 2.0;
}

double analytic_doubling(const CostProfile& phi) {
  return phi.kind == CostProfile::Kind::power ? std::exp2(phi.p) : 4.0;
}

}  // namespace

double doubling_ratio(const CostProfile& phi, double cap) {
  check_profile(phi);
  const double numeric = log_grid_sup([&](double x) { return phi(2.0 * x) / phi(x); });
  const double k = std::max(numeric, analytic_doubling(phi));
  if (!(k <= cap)) throw Error(ErrorCode::DoublingUnbounded, "doubling ratio exceeds cap");
  return analytic_doubling(phi);
}

double cost_exponent(const CostProfile& phi, double cap) {
  doubling_ratio(phi, cap);
  const double numeric = log_grid_sup([&](double x) { return x * phi.right_derivative(x) / phi(x); });
  const double exact = analytic_exponent(phi);
  // The grid sup must not exceed the analytic sup beyond rounding.
  if (numeric > exact * (1.0 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "profile exponent mismatch");
  return exact;
}

PowerTypeCost make_cost(const FiniteMetricSpace& space, const CostProfile& phi, std::optional<double> truncate) {
  PowerTypeCost out;
  out.phi = phi;
  out.doubling_K = doubling_ratio(phi);
  out.exponent_po = cost_exponent(phi);
  if (truncate && !(*truncate > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation level must be positive");
  out.truncation_level = truncate;
  const std::size_t n = space.n;
  out.cost = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double c = i == j ? 0.0 : phi(space.dist(i, j));
      if (truncate) c = std::min(c, *truncate);
      out.cost(i, j) = c;
    }
  }
  return out;
}

Matrix induced_distance(const FiniteMetricSpace& space, const PowerTypeCost& cost) {
  const std::size_t n = space.n;
  if (cost.cost.rows() != n) throw Error(ErrorCode::DimensionMismatch, "cost size differs from space");
  Matrix d(n, n);
  const double inv = 1.0 / cost.exponent_po;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double c = cost.cost(i, j);
      d(i, j) = inv == 1.0 ? c : (inv == 0.5 ? std::sqrt(c) : std::pow(c, inv));
    }
  if (auto v = find_triangle_violation(d)) {
    const auto [i, j, k] = *v;
    throw Error(ErrorCode::TriangleViolation, "induced distance is not a metric",
                {static_cast<long>(i), static_cast<long>(j), static_cast<long>(k)});
  }
  return d;
}

std::string SlopeOperator::tag() const {
  if (mode == Mode::global) return "global";
  return "graph(r=" + std::to_string(radius) + ")";
}

SlopeEngine::SlopeEngine(const Matrix& dist, SlopeOperator op) : op_(op), n_(dist.rows()), inv_(n_, n_) {
  if (op.mode == SlopeOperator::Mode::graph && !(op.radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "graph slope needs a positive radius");
  const double reach = op.radius * (1.0 + 1e-9);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double d = dist(i, j);
      if (op.mode == SlopeOperator::Mode::graph && d > reach) continue;
      inv_(i, j) = 1.0 / d;
    }
}

void SlopeEngine::evaluate(std::span<const double> g, std::vector<double>& out, std::vector<std::size_t>& arg) const {
  if (g.size() != n_) throw Error(ErrorCode::DimensionMismatch, "slope input size");
  out.assign(n_, 0.0);
  arg.assign(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto m = kernels::max_scaled_increment(g.data(), inv_.row(i), g[i], n_);
    out[i] = m.value;
    arg[i] = m.index;
  }
}

std::vector<double> SlopeEngine::operator()(std::span<const double> g) const {
  std::vector<double> out;
  std::vector<std::size_t> arg;
  evaluate(g, out, arg);
  return out;
}

std::vector<double> slope(const FiniteMetricSpace& space, const SlopeOperator& op, std::span<const double> g) {
  for (double v : g)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "slope input must be finite");
  return SlopeEngine(space.dist, op)(g);
}

}  // namespace tei
