#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tei/matrix.hpp"
#include "tei/measures.hpp"
#include "tei/metric.hpp"

namespace tei {

struct TransportSolution {
  Matrix plan;             // rows follow nu, columns follow mu
  double primal_cost = 0;  // sum pi_ij c_ij, row-major, extended precision
  std::vector<double> psi;  // nu side, psi = phi^c on every point
  std::vector<double> phi;  // mu side, phi = psi^c on every point
  double duality_gap = 0;   // primal_cost - (sum psi nu + sum phi mu)
  std::vector<std::pair<std::size_t, std::size_t>> support_pairs;  // pi_ij > 0, row-major
  std::size_t pivots = 0;
};

struct OtOptions {
  std::size_t max_pivots = 0;          // 0 selects 50 (m + k)^2 + 1000
  std::size_t degenerate_streak = 50;  // consecutive zero-step pivots before Bland's rule
};

// Exact transportation simplex on supp(nu) x supp(mu).
TransportSolution ot_solve(const ProbVector& nu, const ProbVector& mu, const Matrix& cost, const OtOptions& opt = {});

enum class TransformSide {
  to_nu,  // out(x) = min_y c(x, y) - g(y)
  to_mu,  // out(y) = min_x c(x, y) - g(x)
};

std::vector<double> c_transform(std::span<const double> g, const Matrix& cost, TransformSide side);

// Per point of supp(nu): min d~(x, y) over support pairs (x, y); 0 off supp(nu).
std::vector<double> subdifferential_distances(const TransportSolution& sol, const ProbVector& nu, const Matrix& dtilde);

// sum_ij pi_ij min_{(i,k) in support} c_ik, accumulated in the order used for
// primal_cost. Never exceeds primal_cost.
double subdifferential_cost(const TransportSolution& sol, const Matrix& cost);

PowerTypeCost truncate_cost(const PowerTypeCost& cost, double level);
Matrix truncate_cost(const Matrix& cost, double level);

// Largest violation of the solution invariants, for diagnostics and tests.
struct TransportCheck {
  double marginal_error = 0;
  double feasibility_violation = 0;  // max(psi_i + phi_j - c_ij, 0)
  double slackness_error = 0;        // max |psi_i + phi_j - c_ij| on support pairs
};
TransportCheck check_solution(const TransportSolution& sol, const ProbVector& nu, const ProbVector& mu, const Matrix& cost);

}  // namespace tei
