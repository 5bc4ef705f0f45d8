// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tei/commands.hpp"
#include "tei/inequality.hpp"
#include "tei/transport.hpp"
#include "tei/variational.hpp"

using namespace tei;

namespace {

const std::string kData = TEI_DATA_DIR;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t s) : rng(s) {}
  double unif(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_unif(double lo, double hi) { return std::exp(unif(std::log(lo), std::log(hi))); }
  std::size_t size(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
  ProbVector measure(std::size_t n, double drop = 0.0) {
    std::gamma_distribution<double> g(1.0);
    std::vector<double> w(n);
    for (double& x : w) x = unif(0, 1) < drop ? 0.0 : g(rng) + 0.05;
    if (*std::max_element(w.begin(), w.end()) == 0.0) w[0] = 1.0;
    return ProbVector::from_weights(w, true);
  }
  FiniteMetricSpace plane(std::size_t n, double scale = 1.0) {
    std::vector<std::array<double, 2>> p(n);
    for (auto& q : p) q = {scale * unif(0, 1), scale * unif(0, 1)};
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
    return validate_space(d);
  }
};

FunctionalSpec identity_spec(double a, double slack = 0.0) {
  FunctionalSpec s;
  s.a = a;
  s.slack = slack;
  return s;
}

FunctionalSpec sqrt_spec(double a, double slack) {
  FunctionalSpec s = identity_spec(a, slack);
  s.alpha = s.beta = ScalarProfile::sqrt();
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome gaussian_talagrand() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  cfg.command = "constants";
  cfg.instance = kData + "/gaussian201.json";
  const auto out = execute(cfg);
  const auto& t2 = out.report["result"]["c_t2"];
  const double secs = seconds_since(t0);
  if (!t2["lo"].is_number() || !t2["hi"].is_number()) return {false, "bracket not finite"};
  const double lo = t2["lo"].get<double>(), hi = t2["hi"].get<double>();
  return {lo >= 1.7 && hi <= 2.05 && secs <= 300, fmt("c_t2 in [%.5f, %.5f], limit 300 s", lo, hi)};
}

Outcome strong_duality() {
  const auto t0 = std::chrono::steady_clock::now();
  Gen g(101);
  double worst_gap = 0, worst_slack = 0, worst_marg = 0, min_gap = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = g.size(2, 64);
    const auto space = g.plane(n, g.log_unif(0.2, 5));
    const auto cost = make_cost(space, t % 2 ? CostProfile::square() : CostProfile::linear_plus_square());
    const auto nu = g.measure(n, 0.2), mu = g.measure(n, 0.2);
    const auto sol = ot_solve(nu, mu, cost.cost);
    const auto chk = check_solution(sol, nu, mu, cost.cost);
    worst_gap = std::max(worst_gap, sol.duality_gap);
    min_gap = std::min(min_gap, sol.duality_gap);
    worst_slack = std::max({worst_slack, chk.slackness_error, chk.feasibility_violation});
    worst_marg = std::max(worst_marg, chk.marginal_error);
  }
  const double secs = seconds_since(t0);
  return {worst_gap <= 1e-8 && min_gap >= 0 && worst_slack <= 1e-8 && worst_marg <= 1e-10 && secs <= 120,
          fmt("max gap %.2e, max slackness %.2e, max marginal error %.2e, limit 120 s", worst_gap, worst_slack, worst_marg)};
}

Outcome minimizer_characterization() {
  Gen g(103);
  int used = 0, draws = 0;
  double worst_res = 0, worst_tv = 0;
  MinimizeConfig mc;
  mc.multistarts = 128;
  while (used < 50 && draws < 500) {
    ++draws;
    const std::size_t n = g.size(3, 10);
    const auto space = g.plane(n);
    const auto cost = make_cost(space, CostProfile::square());
    const auto mu = g.measure(n);
    const auto spec = identity_spec(g.log_unif(0.02, 0.15));
    const auto fp = minimize_fixed_point(spec, mu, cost.cost, mc);
    if (!(fp.value < -1e-8)) continue;
    ++used;
    const auto md = minimize_mirror(spec, mu, cost.cost, mc);
    worst_res = std::max(worst_res, fp.residual);
    worst_tv = std::max(worst_tv, total_variation(fp.minimizer, md.minimizer));
  }
  return {used == 50 && worst_res <= 1e-6 && worst_tv <= 1e-4,
          fmt("%.0f instances, max residual %.2e, max TV(mirror, fixed point) %.2e", used, worst_res, worst_tv)};
}

Outcome argmin_threshold() {
  Gen g(107);
  int fails = 0;
  double worst_tv = 0, worst_below = -1e300;
  MinimizeConfig mc;
  mc.multistarts = 24;
  for (int t = 0; t < 20; ++t) {
    ProbVector mu;
    Matrix c;
    double slack = 0, C = 0;
    if (t < 10) {
      const double d = g.unif(0.5, 2.0), m0 = g.unif(0.15, 0.85);
      const auto space = validate_space(Matrix::from_rows({{0, d}, {d, 0}}));
      c = make_cost(space, CostProfile::square()).cost;
      mu = ProbVector::from_weights({m0, 1 - m0});
      slack = default_slack(space.dist);
      C = oracle::two_point_t2(m0, d * d, slack);
    } else {
      const std::size_t n = g.size(3, 6);
      const auto space = g.plane(n);
      c = make_cost(space, CostProfile::square()).cost;
      mu = g.measure(n);
      slack = default_slack(space.dist);
      C = oracle::random_search_t2(mu.w, c.to_rows(), slack, 1000 + t);
    }
    const auto above = minimize_mirror(sqrt_spec(1.1 * C, slack), mu, c, mc);
    const auto below = minimize_mirror(sqrt_spec(0.9 * C, slack), mu, c, mc);
    const double tv = total_variation(above.minimizer, mu);
    worst_tv = std::max(worst_tv, tv);
    worst_below = std::max(worst_below, below.value);
    if (tv > 1e-6 || !(below.value < -1e-8)) ++fails;
  }
  return {fails == 0, fmt("%.0f failures; max TV at 1.1 C %.2e; largest minimum at 0.9 C %.3e", fails, worst_tv, worst_below)};
}

Outcome lower_bound_certificate_check() {
  Gen g(109);
  double worst = 1e300, worst_min = 1e300;
  int minimized = 0;
  MinimizeConfig mc;
  mc.multistarts = 8;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = g.size(2, 10);
    const auto space = g.plane(n, g.log_unif(0.3, 3));
    const auto cost = make_cost(space, t % 2 ? CostProfile::square() : CostProfile::linear_plus_square());
    const auto mu = g.measure(n), nu = g.measure(n, 0.3);
    const double delta = g.log_unif(0.05, 5);
    double lhs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) lhs += cost.cost(i, j) * nu.w[i] * mu.w[j];
    const auto ei = exp_integral(mu, cost.cost, delta);
    const double rhs = relative_entropy(nu, mu) / delta + std::exp(ei.log_value - 1.0) / delta;
    worst = std::min(worst, rhs - lhs);
    if (t % 10 == 0) {
      const double a = g.unif(1.0, 2.0) / delta;
      const auto spec = t % 20 ? identity_spec(a) : sqrt_spec(a, 0.0);
      const auto cert = lower_bound_certificate(mu, cost.cost, delta, spec);
      const auto res = minimize_mirror(spec, mu, cost.cost, mc);
      worst_min = std::min(worst_min, res.value + cert.b);
      ++minimized;
    }
  }
  return {worst >= -1e-10 && worst_min >= -1e-10,
          fmt("min slack %.3e over 1000 triples; min (value + b) %.3e over %.0f minimizations", worst, worst_min, minimized)};
}

Outcome concentration_transfer() {
  Gen g(113);
  int fails = 0;
  double min_b = 1e300, max_b = 0;
  MinimizeConfig mc;
  mc.multistarts = 24;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = g.size(6, 14);
    const auto space = g.plane(n, g.unif(1, 3));
    const auto cost = make_cost(space, CostProfile::square());
    const auto dt = induced_distance(space, cost);
    const auto mu = g.measure(n);
    const auto prof = concentration_profile(mu, dt, ProfileMode::exact);
    // b from a minimization of a H - T
    const double a = g.unif(0.3, 3.0);
    const auto m = minimize_mirror(identity_spec(a), mu, cost.cost, mc);
    const double b = std::max(0.0, -m.value);
    // b from the exponential-integral certificate with a = 1 / delta
    const double delta = g.unif(0.2, 2.0);
    const double b_cert = std::exp(exp_integral(mu, cost.cost, delta).log_value - 1.0) / delta;
    min_b = std::min(min_b, b);
    max_b = std::max(max_b, b);
    for (auto [aa, bb] : {std::pair{a, b}, std::pair{1.0 / delta, b_cert}}) {
      const double r_o = transfer_r_o(aa, bb, 2.0);
      const bool brute = oracle::brute_concentration_bound(mu.w, dt.to_rows(), aa, r_o, 2.0);
      const bool lib = profile_bound_holds(prof, 2.0, aa, r_o);
      if (!brute || !lib) ++fails;
    }
  }
  return {fails == 0, fmt("%.0f failures over 20 (a, b) pairs; minimized b in [%.3g, %.3g]", fails, min_b, max_b)};
}

Outcome truncation_convergence() {
  Gen g(127);
  int fails = 0;
  double worst_trace = 0;
  MinimizeConfig mc;
  mc.multistarts = 16;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = g.size(4, 10);
    const auto space = g.plane(n, 2.0);
    const auto cost = make_cost(space, t % 2 ? CostProfile::square() : CostProfile::linear_plus_square());
    const auto mu = g.measure(n);
    const double maxc = cost.cost.max_entry();
    std::vector<double> levels;
    for (int k = 1; k <= static_cast<int>(std::ceil(maxc)) + 1; ++k) levels.push_back(k);
    for (int r = 0; r < 5; ++r) {
      const auto nu = g.measure(n, 0.2);
      const double full = ot_solve(nu, mu, cost.cost).primal_cost;
      double prev = -1;
      for (double L : levels) {
        const double v = ot_solve(nu, mu, truncate_cost(cost.cost, L)).primal_cost;
        if (v < prev - 1e-12) ++fails;
        if (L >= maxc && v != full) ++fails;
        prev = v;
      }
    }
    const auto spec = identity_spec(g.unif(0.05, 0.4));
    const auto tr = minimize_truncation(spec, mu, cost.cost, levels, mc);
    const auto direct = minimize_mirror(spec, mu, cost.cost, mc);
    const double diff = std::abs(tr.trace.back() - direct.value);
    worst_trace = std::max(worst_trace, diff);
    if (diff > 1e-6) ++fails;
  }
  return {fails == 0, fmt("%.0f failures; max |trace end - direct minimum| %.2e", fails, worst_trace)};
}

Outcome dual_agreement() {
  Gen g(131);
  double worst = 0;
  MinimizeConfig mc;
  mc.multistarts = 128;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = g.size(3, 16);
    const auto space = g.plane(n);
    const auto cost = make_cost(space, t % 2 ? CostProfile::square() : CostProfile::linear_plus_square());
    const auto mu = g.measure(n);
    const auto spec = identity_spec(g.log_unif(0.02, 0.5));
    const double primal = std::min(minimize_fixed_point(spec, mu, cost.cost, mc).value, minimize_mirror(spec, mu, cost.cost, mc).value);
    const double dual = dual_value(spec, mu, cost.cost, {}).value;
    worst = std::max(worst, std::abs(primal - dual));
  }
  return {worst <= 1e-4, fmt("max |primal - dual| %.2e", worst)};
}

Outcome ov_and_w2i_chains() {
  const std::vector<std::string> names = {"gaussian201", "bimodal101", "mixture_skew101", "mixture_three101", "mixture_wide101",
                                          "mixture_close101"};
  std::string detail;
  bool ok = true;
  for (const auto& name : names) {
    RunConfig cfg;
    cfg.instance = kData + "/" + name + ".json";
    cfg.command = "verify-ov";
    const auto ov = execute(cfg);
    cfg.command = "verify-w2i";
    const auto w2 = execute(cfg);
    const auto& a = ov.report["result"];
    const auto& b = w2.report["result"];
    const bool subdiff_ok = a["subdifferential_bound_all"].get<bool>();
    const bool pass = a["holds"].get<bool>() && b["holds"].get<bool>() && subdiff_ok;
    ok = ok && pass;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s: t2.hi %.4f vs %.4f and %.4f%s", detail.empty() ? "" : "; ", name.c_str(),
                  a["c_t2"]["hi"].is_number() ? a["c_t2"]["hi"].get<double>() : INFINITY,
                  a["bound"].is_number() ? a["bound"].get<double>() : INFINITY, b["bound"].is_number() ? b["bound"].get<double>() : INFINITY,
                  subdiff_ok ? "" : ", subdifferential bound violated");
    detail += buf;
  }
  return {ok, detail};
}

Outcome monge_ampere_refinement() {
  struct Tilt {
    const char* name;
    std::function<double(double)> log_density;
  };
  const std::vector<Tilt> tilts = {
      {"quartic", [](double x) { return 0.3 * x - 0.5 * x * x - 0.25 * x * x * x * x; }},
      {"skewed", [](double x) { return -0.5 * x * x + 0.4 * x - 0.1 * x * x * x * x; }},
  };
  bool ok = true;
  std::string detail;
  MinimizeConfig mc;
  mc.multistarts = 8;
  for (const auto& tilt : tilts) {
    double prev = INFINITY, worst_conv = INFINITY;
    std::string rms;
    for (std::size_t n : {101, 201, 401}) {
      const auto grid = grid_space(-4, 4, n);
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(tilt.log_density(grid.points[i]));
      const auto mu = ProbVector::from_weights(w, true);
      const auto cost = make_cost(grid, CostProfile::square());
      const auto m = minimize_fixed_point(identity_spec(0.6), mu, cost.cost, mc);
      const bool nontrivial = total_variation(m.minimizer, mu) > 1e-6;
      const auto p = ma_residual_1d(grid.points, mu, m.minimizer, m.lambda_bar);
      ok = ok && nontrivial && p.rms_ma < prev;
      prev = p.rms_ma;
      worst_conv = std::min(worst_conv, p.min_convexity);
      rms += fmt(" %.4g", p.rms_ma);
    }
    ok = ok && worst_conv >= -1e-8;
    detail += (detail.empty() ? "" : "; ") + std::string(tilt.name) + ": rms" + rms + fmt(", min convexity %.2e", worst_conv);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"gaussian talagrand bracket", gaussian_talagrand},
      {"strong duality", strong_duality},
      {"minimizer characterization", minimizer_characterization},
      {"argmin threshold", argmin_threshold},
      {"lower-bound certificate", lower_bound_certificate_check},
      {"concentration transfer", concentration_transfer},
      {"truncation convergence", truncation_convergence},
      {"dual agreement", dual_agreement},
      {"information inequality chains", ov_and_w2i_chains},
      {"monge-ampere refinement", monge_ampere_refinement},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s; %.1f s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
