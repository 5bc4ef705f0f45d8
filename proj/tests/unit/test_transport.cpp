#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tei/error.hpp"
#include "tei/inequality.hpp"
#include "tei/transport.hpp"

using namespace tei;

namespace {

struct Random {
  std::mt19937_64 rng;
  explicit Random(std::uint64_t s) : rng(s) {}
  ProbVector measure(std::size_t n, double zero_prob) {
    std::gamma_distribution<double> g(1.0);
    std::bernoulli_distribution z(zero_prob);
    std::vector<double> w(n);
    for (double& x : w) x = g(rng);
    for (std::size_t i = 1; i < n; ++i)
      if (z(rng)) w[i] = 0;
    return ProbVector::from_weights(w, true);
  }
  FiniteMetricSpace space(std::size_t n) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::array<double, 2>> p(n);
    for (auto& q : p) q = {u(rng), u(rng)};
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
    return validate_space(d);
  }
};

}  // namespace

TEST_CASE("trivial couplings") {
  const auto two = validate_space(Matrix::from_rows({{0, 1}, {1, 0}}));
  const auto c = make_cost(two, CostProfile::square());
  const auto mu = ProbVector::from_weights({0.3, 0.7});
  const auto same = ot_solve(mu, mu, c.cost);
  CHECK(same.primal_cost == 0.0);
  CHECK(same.plan(0, 0) == 0.3);
  CHECK(same.plan(1, 1) == 0.7);

  const auto moved = ot_solve(ProbVector::point_mass(2, 0), ProbVector::point_mass(2, 1), c.cost);
  CHECK(moved.primal_cost == 1.0);
  CHECK(moved.plan(0, 1) == 1.0);
  const auto s = subdifferential_distances(moved, ProbVector::point_mass(2, 0), two.dist);
  CHECK(s[0] == 1.0);
  const auto s0 = subdifferential_distances(same, mu, two.dist);
  CHECK(s0[0] == 0.0);
  CHECK(s0[1] == 0.0);
}

TEST_CASE("optimal cost matches the shortest-path oracle") {
  Random r(17);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + t % 8;
    const auto space = r.space(n);
    const auto cost = make_cost(space, t % 2 ? CostProfile::square() : CostProfile::linear_plus_square());
    const auto nu = r.measure(n, 0.25), mu = r.measure(n, 0.25);
    const auto sol = ot_solve(nu, mu, cost.cost);
    const double ref = oracle::transport_cost(nu.w, mu.w, cost.cost.to_rows());
    CHECK(sol.primal_cost == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
    const auto chk = check_solution(sol, nu, mu, cost.cost);
    CHECK(chk.marginal_error <= 1e-12);
    CHECK(chk.feasibility_violation <= 1e-12);
    CHECK(chk.slackness_error <= 1e-12);
    CHECK(sol.duality_gap >= 0.0);
    CHECK(sol.duality_gap <= 1e-12);
  }
}

TEST_CASE("c-transforms") {
  const auto two = validate_space(Matrix::from_rows({{0, 1}, {1, 0}}));
  const auto c2 = make_cost(two, CostProfile::square());
  const std::vector<double> zero{0, 0};
  const auto t = c_transform(zero, c2.cost, TransformSide::to_mu);
  CHECK(t == std::vector<double>{0, 0});

  Random r(2);
  const auto space = r.space(8);
  const auto cost = make_cost(space, CostProfile::square());
  std::normal_distribution<double> z(0, 1);
  std::vector<double> g(8), gk(8);
  for (std::size_t i = 0; i < 8; ++i) {
    g[i] = z(r.rng);
    gk[i] = g[i] + 2.5;
  }
  const auto gc = c_transform(g, cost.cost, TransformSide::to_mu);
  const auto gkc = c_transform(gk, cost.cost, TransformSide::to_mu);
  for (std::size_t i = 0; i < 8; ++i) CHECK(gkc[i] == doctest::Approx(gc[i] - 2.5).epsilon(1e-14));
  const auto gcc = c_transform(gc, cost.cost, TransformSide::to_nu);
  const auto gccc = c_transform(gcc, cost.cost, TransformSide::to_mu);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(gccc[i] == gc[i]);
    CHECK(gcc[i] >= g[i]);
  }
}

TEST_CASE("potentials are a conjugate pair") {
  Random r(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + t % 10;
    const auto space = r.space(n);
    const auto cost = make_cost(space, CostProfile::square());
    const auto nu = r.measure(n, 0.3), mu = r.measure(n, 0.3);
    const auto sol = ot_solve(nu, mu, cost.cost);
    const auto psi = c_transform(sol.phi, cost.cost, TransformSide::to_nu);
    for (std::size_t i = 0; i < n; ++i) CHECK(psi[i] == sol.psi[i]);
  }
}

TEST_CASE("subdifferential cost never exceeds the transport cost") {
  Random r(12);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + t % 12;
    const auto space = r.space(n);
    const auto cost = make_cost(space, CostProfile::square());
    const auto nu = r.measure(n, 0.2), mu = r.measure(n, 0.2);
    const auto sol = ot_solve(nu, mu, cost.cost);
    const auto chk = subdifferential_check(sol, cost.cost);
    CHECK(chk.holds);
    const auto s = subdifferential_distances(sol, nu, space.dist);
    long double sum = 0;
    for (std::size_t i : nu.support) sum += static_cast<long double>(nu.w[i]) * s[i] * s[i];
    CHECK(static_cast<double>(sum) <= sol.primal_cost * (1 + 1e-14));
  }
}

TEST_CASE("truncated costs") {
  const Matrix c = Matrix::from_rows({{0, 1}, {1, 0}});
  const Matrix t = truncate_cost(c, 0.5);
  CHECK(t(0, 1) == 0.5);
  CHECK(t(0, 0) == 0.0);
  const Matrix same = truncate_cost(c, 3.0);
  CHECK(same(0, 1) == 1.0);

  Random r(30);
  const auto space = r.space(9);
  const auto cost = make_cost(space, CostProfile::square());
  const auto nu = r.measure(9, 0), mu = r.measure(9, 0);
  double prev = 0;
  const double top = cost.cost.max_entry();
  for (double level : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double v = ot_solve(nu, mu, truncate_cost(cost.cost, level * top)).primal_cost;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  CHECK(ot_solve(nu, mu, truncate_cost(cost.cost, top)).primal_cost == ot_solve(nu, mu, cost.cost).primal_cost);
}

TEST_CASE("solver input errors") {
  const Matrix c = Matrix::from_rows({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(ot_solve(ProbVector::uniform(3), ProbVector::uniform(2), c), Error);
}

TEST_CASE("rows far below unit mass keep their plan mass") {
  const auto grid = grid_space(-6, 6, 81);
  const auto cost = make_cost(grid, CostProfile::square());
  const auto mu = gaussian_on_grid(grid.points, 0, 1);
  std::vector<double> w(81);
  for (std::size_t i = 0; i < 81; ++i) w[i] = std::exp(-0.5 * std::pow(grid.points[i] - 1.0, 2) * (i % 3 ? 1.0 : 20.0));
  const auto nu = ProbVector::from_weights(w, true);
  const auto sol = ot_solve(nu, mu, cost.cost);
  for (std::size_t i : nu.support) {
    double row = 0;
    for (std::size_t j = 0; j < 81; ++j) row += sol.plan(i, j);
    CHECK(row == doctest::Approx(nu.w[i]).epsilon(1e-6));
  }
  CHECK_NOTHROW(subdifferential_distances(sol, nu, cost.cost));
}
