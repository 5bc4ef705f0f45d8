#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tei/error.hpp"
#include "tei/inequality.hpp"

using namespace tei;

namespace {

FiniteMetricSpace two_points() { return validate_space(Matrix::from_rows({{0, 1}, {1, 0}}), {0, 1}); }

ProbVector random_measure(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(1.0);
  std::vector<double> w(n);
  for (double& x : w) x = g(rng) + 0.05;
  return ProbVector::from_weights(w, true);
}

FiniteMetricSpace random_space(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::array<double, 2>> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
  return validate_space(d);
}

}  // namespace

TEST_CASE("single atom constants are zero") {
  const auto two = two_points();
  const auto c = make_cost(two, CostProfile::square());
  const auto atom = ProbVector::point_mass(2, 1);
  T2Options o;
  o.slack = 0.25;
  const auto t2 = estimate_t2(atom, c.cost, o);
  CHECK(t2.lo == 0.0);
  CHECK(t2.hi == 0.0);
  const SlopeEngine slope(two.dist, SlopeOperator::global());
  CHECK(estimate_lsi(atom, two.dist, slope, {}).value == 0.0);
  const auto amu = estimate_a_mu(atom, c.cost, {});
  CHECK(amu.lo == 0.0);
  CHECK(amu.hi == 0.0);
}

TEST_CASE("two-point T2 bracket matches the segment scan") {
  const auto two = two_points();
  const auto c = make_cost(two, CostProfile::square());
  for (double m0 : {0.5, 0.25}) {
    const auto mu = ProbVector::from_weights({m0, 1 - m0});
    T2Options o;
    o.slack = default_slack(two.dist);
    o.multistarts = 8;
    const auto e = estimate_t2(mu, c.cost, o);
    const double scan = oracle::two_point_t2(m0, 1.0, o.slack);
    CHECK(e.certified);
    CHECK(e.lo <= scan * (1 + 1e-9));
    CHECK(e.lo == doctest::Approx(scan).epsilon(1e-4));
    CHECK(e.hi >= scan);
    CHECK(t2_ratio(e.witness, mu, c.cost, o.slack, 2.0) == doctest::Approx(e.lo).epsilon(1e-12));
  }
  CHECK(default_slack(two.dist) == 0.5);
}

TEST_CASE("two-point LSI ratio") {
  const auto two = two_points();
  const SlopeEngine slope(two.dist, SlopeOperator::global());
  const auto mu = ProbVector::uniform(2);
  const auto nu = ProbVector::from_weights({0.75, 0.25});
  const double h = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  const double l3 = std::log(3.0);
  CHECK(relative_entropy(nu, mu) / fisher_information(nu, mu, slope) == doctest::Approx(h / (0.25 * l3 * l3)).epsilon(1e-13));
  const auto est = estimate_lsi(mu, two.dist, slope, {});
  CHECK(est.value >= h / (0.25 * l3 * l3) * (1 - 1e-9));
  CHECK(est.slope_tag == "global");
}

TEST_CASE("A(mu) levels on two points follow the segment scan") {
  const auto two = two_points();
  const auto c = make_cost(two, CostProfile::square());
  const auto mu = ProbVector::uniform(2);
  AMuOptions o;
  o.slack = 0.5;
  for (double a : {0.02, 0.05, 2.0, 5.0}) {
    double seg_min = 0;
    for (int k = 0; k <= 20000; ++k) {
      const double t = k / 20000.0;
      const double f = a * oracle::entropy({t, 1 - t}, mu.w) - oracle::slack_transport(std::abs(t - 0.5), 0.5, 2.0);
      seg_min = std::min(seg_min, f);
    }
    ProbVector w;
    const auto v = classify_level(mu, c.cost, a, o, &w);
    if (seg_min < -1e-6) {
      CHECK(v == LevelVerdict::nontrivial);
      CHECK(total_variation(w, mu) > 1e-6);
    } else {
      CHECK(v == LevelVerdict::trivial);
    }
  }
  const auto est = estimate_a_mu(mu, c.cost, o);
  const double scan = oracle::two_point_t2(0.5, 1.0, 0.5);
  CHECK_FALSE(est.inconclusive);
  CHECK(est.lo <= est.hi);
  CHECK(est.hi >= scan * (1 - 0.02));
}

TEST_CASE("semiconcave class") {
  const auto grid = grid_space(-3, 3, 41);
  const auto cls = SemiconcaveClass::sample(grid.dist, 0.7, 12, 3);
  CHECK(cls.samples.size() == 12);
  for (double l : cls.lambdas) {
    CHECK(l > 0.0);
    CHECK(l < 0.7);
  }
  CHECK(cls.worst_midpoint_margin(grid) >= -1e-9);
}

TEST_CASE("slope of Kantorovich potentials") {
  const auto grid = grid_space(-2, 2, 21);
  const auto cost = make_cost(grid, CostProfile::square());
  const SlopeEngine graph(grid.dist, SlopeOperator::graph(grid.min_positive_distance()));
  const SlopeEngine global(grid.dist, SlopeOperator::global());
  std::mt19937_64 rng(2);
  const auto mu = gaussian_on_grid(grid.points, 0, 1);
  for (int t = 0; t < 20; ++t) {
    const auto nu = random_measure(rng, 21);
    const auto sol = ot_solve(nu, mu, cost.cost);
    CHECK(slope_potential_violation(sol, nu, grid.dist, graph) <= 1e-9);
    CHECK(slope_potential_violation(sol, nu, grid.dist, global) <= 1e-9);
  }
}

TEST_CASE("chain bookkeeping") {
  T2Estimate t2;
  t2.lo = 1.9;
  t2.hi = 1.95;
  AMuEstimate amu;
  amu.lo = 1.96;
  amu.hi = 2.0;
  RatioEstimate w2i, lsi;
  w2i.value = 0.95;
  lsi.value = 0.5;
  CHECK(constants_chain(t2, amu, w2i, lsi, 0.1).ok());
  amu.hi = 1.0;
  CHECK_FALSE(constants_chain(t2, amu, w2i, lsi, 0.1).t2_le_amu);
}

TEST_CASE("dual objective") {
  std::mt19937_64 rng(4);
  const auto space = random_space(rng, 6);
  const auto cost = make_cost(space, CostProfile::square());
  const auto mu = random_measure(rng, 6);
  FunctionalSpec spec;
  spec.a = 0.3;
  const std::vector<double> zero(6, 0.0);
  CHECK(dual_objective(spec, mu, cost.cost, zero) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  std::normal_distribution<double> z(0, 1);
  std::vector<double> psi(6), shifted(6);
  for (std::size_t i = 0; i < 6; ++i) {
    psi[i] = z(rng);
    shifted[i] = psi[i] + 3.25;
  }
  CHECK(dual_objective(spec, mu, cost.cost, shifted) == doctest::Approx(dual_objective(spec, mu, cost.cost, psi)).epsilon(1e-12));
  // Weak duality: every dual value bounds the primal value from below... and from above at the optimum.
  MinimizeConfig cfg;
  cfg.multistarts = 16;
  const double primal = minimize_fixed_point(spec, mu, cost.cost, cfg).value;
  CHECK(dual_value(spec, mu, cost.cost, {}).value == doctest::Approx(primal).epsilon(1e-4).scale(1.0));
  FunctionalSpec sq = spec;
  sq.alpha = sq.beta = ScalarProfile::sqrt();
  CHECK_THROWS_AS(dual_value(sq, mu, cost.cost, {}), Error);
}

TEST_CASE("Monge-Ampere residuals vanish at mu") {
  const auto grid = grid_space(-3, 3, 61);
  const auto mu = gaussian_on_grid(grid.points, 0.2, 0.9);
  const auto p = ma_residual_1d(grid.points, mu, mu, 0.5);
  for (std::size_t i = 0; i < 61; ++i) {
    CHECK(p.V[i] == 0.0);
    CHECK(p.T[i] == doctest::Approx(grid.points[i]).epsilon(1e-12).scale(1.0));
    CHECK(std::abs(p.ma_residual[i]) <= 1e-12);
    CHECK(std::abs(p.pre_residual[i]) <= 1e-12);
  }
  CHECK(p.rms_ma <= 1e-12);
  CHECK_THROWS_AS(ma_residual_1d(grid.points, mu, mu, -1.0), Error);
}

TEST_CASE("transfer radii") {
  CHECK(transfer_r_o(2.0, 0.0, 2.0) == doctest::Approx(std::sqrt(2 * std::log(2.0))).epsilon(1e-15));
  CHECK(transfer_r_o(1.0, 0.25, 2.0) == doctest::Approx(std::sqrt(std::log(2.0)) + 1.0).epsilon(1e-15));
  CHECK(exp_integral_r_o(1.0, 0.5, 2.0) == 0.0);
}
