#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tei/error.hpp"
#include "tei/parallel.hpp"
#include "tei/variational.hpp"

namespace tei {

const char* to_string(Method m) {
  switch (m) {
    case Method::mirror: return "mirror";
    case Method::fixed_point: return "fixed_point";
    case Method::truncation: return "truncation";
  }
  return "unknown";
}

namespace {

// Normalizes exp(logw) over the given indices; weights below e^-600 of the top are clipped there.
ProbVector from_log_weights(std::size_t n, const std::vector<std::size_t>& idx, const std::vector<double>& logw) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) top = std::max(top, logw[i]);
  std::vector<double> w(n, 0.0);
  for (std::size_t i : idx) w[i] = std::exp(std::max(logw[i] - top, -600.0));
  return ProbVector::from_weights(std::move(w), true);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

bool worse(double v, double ref) { return v > ref + 1e-12 * std::max(1.0, std::abs(ref)); }

}  // namespace

std::vector<ProbVector> multistart_battery(const ProbVector& mu, const Matrix& cost, std::size_t count, std::uint64_t seed) {
  std::vector<ProbVector> out;
  if (count == 0) return out;
  out.push_back(mu);
  const std::size_t n = mu.size();
  const auto& sup = mu.support;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<std::size_t> pick(0, sup.size() - 1);
  std::vector<double> psi(n), logw(n);
  for (std::size_t s = 1; s < count; ++s) {
    const std::size_t kind = s % 4;
    if (kind == 3) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i : sup) w[i] = expo(rng) + 1e-12;
      out.push_back(ProbVector::from_weights(std::move(w), true));
      continue;
    }
    const std::size_t k = sup[pick(rng)];
    const std::size_t l = sup[pick(rng)];
    for (std::size_t i : sup) {
      if (kind == 1) psi[i] = cost(i, l) - cost(i, k);  // shift toward k
      else if (kind == 2) psi[i] = normal(rng);         // vertex-seeking
      else psi[i] = -cost(i, k);                         // concentrate near k
    }
    double scale = 0.0;
    for (std::size_t i : sup) scale = std::max(scale, std::abs(psi[i]));
    if (!(scale > 0)) scale = 1.0;
    const double t = kind == 2 ? log_uniform(rng, 1.0, 50.0) : log_uniform(rng, 0.3, 30.0);
    for (std::size_t i : sup) logw[i] = std::log(mu.w[i]) + t * psi[i] / scale;
    out.push_back(from_log_weights(n, sup, logw));
  }
  return out;
}

StartOutcome mirror_run(const FunctionalSpec& spec, const ProbVector& start, const ProbVector& mu, const Matrix& cost,
                        const MinimizeConfig& cfg) {
  StartOutcome out;
  out.nu = start;
  FunctionalState st = evaluate_state(spec, out.nu, mu, cost);
  out.value = st.value;
  out.trace.push_back(out.value);
  std::vector<double> k = variation_kernel(spec, out.nu, mu, st);
  auto kmax_of = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  double kmax = kmax_of(k);
  if (!(kmax > 0) || !std::isfinite(kmax)) return out;
  double eta = 0.5 / kmax;
  std::vector<double> logw(start.size());
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    out.iterations = it + 1;
    for (std::size_t i : out.nu.support) logw[i] = std::log(out.nu.w[i]) - eta * k[i];
    ProbVector cand = from_log_weights(start.size(), out.nu.support, logw);
    FunctionalState cst = evaluate_state(spec, cand, mu, cost);
    if (cst.value < out.value) {
      const double tv = total_variation(cand, out.nu);
      out.nu = std::move(cand);
      st = std::move(cst);
      out.value = st.value;
      out.trace.push_back(out.value);
      k = variation_kernel(spec, out.nu, mu, st);
      kmax = kmax_of(k);
      if (tv <= cfg.tol || !(kmax > 0) || !std::isfinite(kmax)) break;
      eta = std::min(eta * 2.0, 1e12 / kmax);
    } else {
      eta *= 0.5;
      if (eta * kmax < 1e-12) {
        out.stalled = true;
        break;
      }
    }
  }
  return out;
}

StartOutcome fixed_point_run(const FunctionalSpec& spec, const ProbVector& start, const ProbVector& mu, const Matrix& cost,
                             const MinimizeConfig& cfg) {
  StartOutcome out;
  out.nu = start;
  FunctionalState st = evaluate_state(spec, out.nu, mu, cost);
  out.value = st.value;
  out.trace.push_back(out.value);
  const bool guarded = !spec.identity_case();
  double tau = cfg.damping;
  std::size_t halvings = 0, flat = 0;
  std::vector<double> logw(start.size());
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    if (guarded && st.entropy < cfg.ball) break;
    out.iterations = it + 1;
    const double lam = lambda_bar(spec, st);
    const auto& idx = tau >= 1.0 ? mu.support : out.nu.support;
    for (std::size_t i : idx) {
      const double target = std::log(mu.w[i]) + st.ot.psi[i] / lam;
      logw[i] = tau >= 1.0 ? target : (1.0 - tau) * std::log(out.nu.w[i]) + tau * target;
    }
    ProbVector cand = from_log_weights(start.size(), idx, logw);
    FunctionalState cst = evaluate_state(spec, cand, mu, cost);
    if (worse(cst.value, out.value)) {
      if (++halvings > cfg.max_halvings) {
        out.oscillation = true;
        break;
      }
      tau *= 0.5;
      continue;
    }
    const double tv = total_variation(cand, out.nu);
    const double drop = out.value - cst.value;
    out.nu = std::move(cand);
    st = std::move(cst);
    out.value = st.value;
    out.trace.push_back(out.value);
    if (tv <= cfg.tol) break;
    flat = drop <= 1e-15 * std::max(1.0, std::abs(out.value)) ? flat + 1 : 0;
    if (flat >= 50) break;
  }
  if (!out.oscillation && !(guarded && st.entropy < cfg.ball)) {
    // Undamped polish: lands exactly on the fixed point once the potential stops changing.
    for (std::size_t it = 0; it < 200; ++it) {
      const double lam = lambda_bar(spec, st);
      for (std::size_t i : mu.support) logw[i] = std::log(mu.w[i]) + st.ot.psi[i] / lam;
      ProbVector cand = from_log_weights(start.size(), mu.support, logw);
      FunctionalState cst = evaluate_state(spec, cand, mu, cost);
      if (worse(cst.value, out.value)) break;
      const double tv = total_variation(cand, out.nu);
      out.nu = std::move(cand);
      st = std::move(cst);
      out.value = st.value;
      out.trace.push_back(out.value);
      if (tv <= 1e-15) break;
    }
  }
  return out;
}

namespace {

MinimizationResult aggregate(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, Method method,
                             std::vector<StartOutcome> runs, const MinimizeConfig& cfg) {
  MinimizationResult res;
  res.method = method;
  res.multistart_count = runs.size();
  // Candidate 0 is mu itself.
  StartOutcome at_mu;
  at_mu.nu = mu;
  at_mu.value = evaluate(spec, mu, mu, cost);
  runs.insert(runs.begin(), std::move(at_mu));
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s)
    if (runs[s].value < runs[best].value) best = s;
  const double ref = runs[best].value;
  const double band = cfg.tie_tol * std::max(1.0, std::abs(ref));
  for (std::size_t s = 0; s < runs.size(); ++s) {
    if (runs[s].value <= ref + band) {
      res.ties.push_back(runs[s].nu);
      res.agreement_tv = std::max(res.agreement_tv, total_variation(runs[s].nu, runs[best].nu));
    }
    res.stalled = res.stalled || runs[s].stalled;
    res.oscillation = res.oscillation || runs[s].oscillation;
  }
  res.best_start = best;
  res.minimizer = runs[best].nu;
  res.value = runs[best].value;
  res.trace = runs[best].trace;
  const FunctionalState st = evaluate_state(spec, res.minimizer, mu, cost);
  const Stationarity sn = stationarity(spec, res.minimizer, mu, st);
  res.lambda_bar = sn.lambda_bar;
  res.residual = sn.residual;
  res.constant = sn.constant;
  return res;
}

template <class Run>
MinimizationResult multistart(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost,
                              const MinimizeConfig& cfg, Method method, Run run) {
  spec.validate();
  auto starts = multistart_battery(mu, cost, cfg.multistarts, cfg.seed);
  for (const auto& s : cfg.extra_starts) starts.push_back(s);
  std::vector<StartOutcome> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) { runs[s] = run(spec, starts[s], mu, cost, cfg); });
  return aggregate(spec, mu, cost, method, std::move(runs), cfg);
}

}  // namespace

MinimizationResult minimize_mirror(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const MinimizeConfig& cfg) {
  return multistart(spec, mu, cost, cfg, Method::mirror, mirror_run);
}

MinimizationResult minimize_fixed_point(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost,
                                        const MinimizeConfig& cfg) {
  return multistart(spec, mu, cost, cfg, Method::fixed_point, fixed_point_run);
}

MinimizationResult minimize_truncation(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost,
                                       const std::vector<double>& levels, const MinimizeConfig& cfg) {
  if (levels.empty()) throw Error(ErrorCode::ScheduleNotIncreasing, "empty truncation schedule");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0)) throw Error(ErrorCode::InvalidArgument, "truncation levels must be positive");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw Error(ErrorCode::ScheduleNotIncreasing, "truncation levels must increase");
  }
  std::vector<double> sched = levels;
  const double top = cost.max_entry();
  if (sched.back() < top) sched.push_back(top);

  MinimizationResult res;
  MinimizeConfig level_cfg = cfg;
  std::vector<double> values;
  for (double level : sched) {
    const Matrix cn = truncate_cost(cost, level);
    MinimizationResult r = minimize_fixed_point(spec, mu, cn, level_cfg);
    values.push_back(r.value);
    level_cfg.extra_starts = cfg.extra_starts;
    level_cfg.extra_starts.push_back(r.minimizer);
    res = std::move(r);
  }
  res.method = Method::truncation;
  res.levels = sched;
  res.trace = values;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + cfg.tie_tol * std::max(1.0, std::abs(values[i - 1]))) res.trace_monotone = false;
  return res;
}

}  // namespace tei
