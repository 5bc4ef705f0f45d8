#include "tei/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "tei/error.hpp"
#include "tei/kernels.hpp"
#include "tei/parallel.hpp"

namespace tei {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProbVector tilt(const ProbVector& base, const std::vector<double>& logf) {
  double top = -kInf;
  for (std::size_t i : base.support) top = std::max(top, logf[i]);
  std::vector<double> w(base.size(), 0.0);
  for (std::size_t i : base.support) w[i] = base.w[i] * std::exp(std::max(logf[i] - top, -600.0));
  return ProbVector::from_weights(std::move(w), true);
}

struct RatioEval {
  double num = 0, den = 0;
  std::vector<double> gnum, gden;
};

using RatioFn = std::function<RatioEval(const ProbVector&)>;

struct AscentOut {
  ProbVector nu;
  double ratio = -1;  // -1 when the start is unusable (0 denominator)
};

// Mirror ascent on num/den, accepting only strict improvements.
// max_log_step bounds the per-step change of any log-weight.
AscentOut ratio_ascent(const RatioFn& f, const ProbVector& start, std::size_t steps, double max_log_step = kInf) {
  AscentOut out;
  out.nu = start;
  RatioEval e = f(start);
  if (!(e.den > 0) || !std::isfinite(e.num)) return out;
  out.ratio = e.num / e.den;
  const std::size_t n = start.size();
  std::vector<double> k(n), logw(n);
  auto build = [&](const ProbVector& nu, const RatioEval& ev, double r) {
    long double mean = 0;
    std::fill(k.begin(), k.end(), 0.0);
    for (std::size_t i : nu.support) {
      k[i] = (ev.gnum[i] - r * ev.gden[i]) / ev.den;
      mean += nu.w[i] * k[i];
    }
    double m = 0;
    for (std::size_t i : nu.support) {
      k[i] -= static_cast<double>(mean);
      m = std::max(m, std::abs(k[i]));
    }
    return m;
  };
  double kmax = build(out.nu, e, out.ratio);
  if (!(kmax > 0) || !std::isfinite(kmax)) return out;
  double eta = std::min(0.5, max_log_step) / kmax;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i : out.nu.support) logw[i] = std::log(out.nu.w[i]) + eta * k[i];
    double top = -kInf;
    for (std::size_t i : out.nu.support) top = std::max(top, logw[i]);
    std::vector<double> w(n, 0.0);
    for (std::size_t i : out.nu.support) w[i] = std::exp(std::max(logw[i] - top, -600.0));
    ProbVector cand = ProbVector::from_weights(std::move(w), true);
    RatioEval ce = f(cand);
    const double cr = ce.den > 0 ? ce.num / ce.den : -kInf;
    if (cr > out.ratio && std::isfinite(cr)) {
      out.nu = std::move(cand);
      out.ratio = cr;
      e = std::move(ce);
      kmax = build(out.nu, e, out.ratio);
      if (!(kmax > 0) || !std::isfinite(kmax)) break;
      eta = std::min(2.0 * eta, std::min(1e12, max_log_step) / kmax);
    } else {
      eta *= 0.5;
      if (eta * kmax < 1e-12) break;
    }
  }
  return out;
}

std::vector<double> log_ratio(const ProbVector& nu, const ProbVector& mu) {
  std::vector<double> g(nu.size(), 0.0);
  for (std::size_t i : nu.support) g[i] = std::log(nu.w[i] / mu.w[i]);
  return g;
}

FunctionalSpec slack_spec(double slack, double p_o) {
  FunctionalSpec s;
  s.slack = slack;
  s.p_o = p_o;
  return s;
}

RatioFn t2_ratio_fn(const ProbVector& mu, const Matrix& cost, double slack, double p_o) {
  const FunctionalSpec sp = slack_spec(slack, p_o);
  return [&mu, &cost, sp](const ProbVector& nu) {
    RatioEval e;
    e.den = relative_entropy(nu, mu);
    if (!(e.den > 0) || !std::isfinite(e.den)) {
      e.den = 0;
      return e;
    }
    const TransportSolution ot = ot_solve(nu, mu, cost);
    const double t = std::max(0.0, ot.primal_cost);
    e.num = sp.slack_transport(t);
    const double ds = sp.slack_derivative(t);
    e.gnum.assign(nu.size(), 0.0);
    for (std::size_t i : nu.support) e.gnum[i] = ds * ot.psi[i];
    e.gden = log_ratio(nu, mu);
    return e;
  };
}

}  // namespace

double default_slack(const Matrix& dtilde) {
  double m = kInf;
  for (double v : dtilde.values())
    if (v > 0) m = std::min(m, v);
  return std::isfinite(m) ? 0.5 * m : 0.0;
}

double t2_ratio(const ProbVector& nu, const ProbVector& mu, const Matrix& cost, double slack, double p_o) {
  const double h = relative_entropy(nu, mu);
  if (!(h > 0)) return 0.0;
  if (!std::isfinite(h)) return kInf;
  return slack_spec(slack, p_o).slack_transport(std::max(0.0, ot_solve(nu, mu, cost).primal_cost)) / h;
}

T2Estimate estimate_t2(const ProbVector& mu, const Matrix& cost, const T2Options& opt) {
  T2Estimate est;
  est.slack = opt.slack;
  est.witness = mu;
  if (mu.support.size() <= 1) {
    est.certified = true;
    return est;
  }
  const RatioFn ratio = t2_ratio_fn(mu, cost, opt.slack, opt.p_o);
  auto starts = multistart_battery(mu, cost, opt.multistarts, opt.seed);
  starts.erase(starts.begin());
  std::vector<AscentOut> outs(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) { outs[s] = ratio_ascent(ratio, starts[s], opt.ascent_iters); });
  for (const auto& o : outs)
    if (o.ratio > est.lo) {
      est.lo = o.ratio;
      est.witness = o.nu;
    }
  for (std::size_t round = 0; round < opt.max_rounds; ++round) {
    est.rounds = round + 1;
    const double a_hi = est.lo + opt.bracket_tol * std::max(1.0, est.lo);
    FunctionalSpec spec;
    spec.alpha = ScalarProfile::sqrt();
    spec.beta = ScalarProfile::sqrt();
    spec.a = a_hi;
    spec.slack = opt.slack;
    spec.p_o = opt.p_o;
    MinimizeConfig cfg;
    cfg.multistarts = opt.multistarts;
    cfg.max_iter = opt.max_iter;
    cfg.seed = opt.seed + 7919 * (round + 1);
    if (est.lo > 0) cfg.extra_starts.push_back(est.witness);
    const MinimizationResult res = minimize_mirror(spec, mu, cost, cfg);
    est.min_value_at_hi = res.value;
    if (res.value < 0.0) {
      // A violation at a_hi is a witness with ratio above a_hi.
      AscentOut o = ratio_ascent(ratio, res.minimizer, opt.ascent_iters);
      if (o.ratio > est.lo) {
        est.lo = o.ratio;
        est.witness = o.nu;
      }
      continue;
    }
    est.hi = a_hi;
    est.certified = true;
    break;
  }
  if (!est.certified) est.hi = kInf;
  est.witness_ratio = est.lo;
  return est;
}

double fisher_with_gradient(const ProbVector& nu, const ProbVector& mu, const SlopeEngine& slope, std::vector<double>* grad) {
  const std::size_t n = nu.size();
  constexpr double kOffSupport = -1e300;
  std::vector<double> g(n, kOffSupport);
  for (std::size_t i : nu.support) {
    if (!(mu.w[i] > 0)) throw Error(ErrorCode::AbsoluteContinuityViolated, "nu charges a point outside supp(mu)");
    g[i] = std::log(nu.w[i] / mu.w[i]);
  }
  std::vector<double> s(n, 0.0);
  std::vector<std::size_t> arg(n, n);
  long double total = 0;
  for (std::size_t i : nu.support) {
    const auto m = kernels::max_scaled_increment(g.data(), slope.weights(i), g[i], n);
    s[i] = m.value;
    arg[i] = m.index;
    total += static_cast<long double>(nu.w[i]) * m.value * m.value;
  }
  if (grad) {
    grad->assign(n, 0.0);
    for (std::size_t i : nu.support) {
      (*grad)[i] += s[i] * s[i];
      if (arg[i] == n) continue;
      const std::size_t j = arg[i];
      const double w = slope.weights(i)[j];
      (*grad)[j] += 2.0 * nu.w[i] * s[i] * w / nu.w[j];
      (*grad)[i] -= 2.0 * s[i] * w;
    }
  }
  return static_cast<double>(total);
}

SemiconcaveClass SemiconcaveClass::sample(const Matrix& dist, double lambda_o, std::size_t count, std::uint64_t seed) {
  if (!(lambda_o > 0)) throw Error(ErrorCode::InvalidArgument, "lambda_o must be positive");
  SemiconcaveClass cls;
  cls.lambda_o = lambda_o;
  const std::size_t n = dist.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> lamp(std::log(0.1), std::log(3.0));
  for (std::size_t s = 0; s < count; ++s) {
    const double lambda = unit(rng) * lambda_o;
    const double amp = std::exp(lamp(rng));
    std::vector<double> g(n);
    for (double& v : g) v = amp * normal(rng);
    std::vector<double> f(n);
    for (std::size_t x = 0; x < n; ++x) {
      double best = kInf;
      for (std::size_t y = 0; y < n; ++y) best = std::min(best, -g[y] + lambda * dist(x, y) * dist(x, y));
      f[x] = best;
    }
    cls.samples.push_back(std::move(f));
    cls.lambdas.push_back(lambda);
  }
  return cls;
}

double SemiconcaveClass::worst_midpoint_margin(const FiniteMetricSpace& space) const {
  const auto& x = space.points;
  const std::size_t n = space.n;
  if (x.size() != n || n < 3) throw Error(ErrorCode::InvalidArgument, "midpoint test needs a 1D grid");
  const double h = x[1] - x[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i] - x[i - 1] - h) > 1e-9 * std::abs(h)) throw Error(ErrorCode::InvalidArgument, "midpoint test needs a uniform grid");
  double worst = kInf;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& f = samples[s];
    const double lam = lambdas[s];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 2; j < n; j += 2) {
        const std::size_t m = (i + j) / 2;
        const double dx = x[j] - x[i];
        worst = std::min(worst, f[m] - 0.5 * f[i] - 0.5 * f[j] + 0.25 * lam * dx * dx);
      }
  }
  return worst;
}

std::vector<ProbVector> probe_suite(const ProbVector& mu, const Matrix& dist, const SuiteOptions& opt) {
  std::vector<ProbVector> out;
  const std::size_t n = mu.size();
  const double diam = std::max(dist.max_entry(), 1e-300);
  const auto& sup = mu.support;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, sup.size() - 1);
  std::uniform_real_distribution<double> lamp(std::log(0.1), std::log(5.0));
  std::bernoulli_distribution sign(0.5);
  const double lengths[3] = {0.1, 0.3, 1.0};
  std::vector<double> g(n);
  for (std::size_t p = 0; p < opt.probes; ++p) {
    const double ell = lengths[p % 3] * diam;
    const std::size_t bumps = 1 + p / 3 % 3;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t b = 0; b < bumps; ++b) {
      const std::size_t c = sup[pick(rng)];
      const double w = (sign(rng) ? 1.0 : -1.0) * std::exp(lamp(rng));
      for (std::size_t x = 0; x < n; ++x) {
        const double d = dist(x, c) / ell;
        g[x] += w * std::exp(-0.5 * d * d);
      }
    }
    out.push_back(tilt(mu, g));
  }
  if (opt.semiconcave_probes > 0) {
    const auto cls = SemiconcaveClass::sample(dist, 1.0, opt.semiconcave_probes, opt.seed + 1);
    for (const auto& f : cls.samples) out.push_back(tilt(mu, f));
  }
  return out;
}

namespace {

RatioEstimate suite_estimate(const ProbVector& mu, const Matrix& dist, const SlopeEngine& slope, const SuiteOptions& opt,
                             const RatioFn& ratio) {
  RatioEstimate est;
  est.slope_tag = slope.op().tag();
  est.witness = mu;
  if (mu.support.size() <= 1) return est;
  const auto probes = probe_suite(mu, dist, opt);
  est.probes = probes.size();
  std::vector<double> r(probes.size(), -1.0);
  std::vector<char> degenerate(probes.size(), 0);
  parallel_for(probes.size(), [&](std::size_t p) {
    const RatioEval e = ratio(probes[p]);
    if (e.den > 0) r[p] = e.num / e.den;
    else if (e.num > 0) degenerate[p] = 1;
  });
  est.degenerate = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  std::vector<std::size_t> order(probes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
  for (std::size_t p : order) {
    if (r[p] > est.value) {
      est.value = r[p];
      est.witness = probes[p];
      est.has_witness = true;
    }
  }
  const std::size_t top = std::min(opt.refine_top, order.size());
  std::vector<AscentOut> outs(top);
  parallel_for(top, [&](std::size_t t) {
    if (r[order[t]] > 0) outs[t] = ratio_ascent(ratio, probes[order[t]], opt.ascent_steps, opt.max_log_step);
  });
  for (const auto& o : outs)
    if (o.ratio > est.value) {
      est.value = o.ratio;
      est.witness = o.nu;
      est.has_witness = true;
    }
  return est;
}

}  // namespace

RatioEstimate estimate_lsi(const ProbVector& mu, const Matrix& dist, const SlopeEngine& slope, const SuiteOptions& opt) {
  const RatioFn ratio = [&](const ProbVector& nu) {
    RatioEval e;
    e.num = relative_entropy(nu, mu);
    e.den = fisher_with_gradient(nu, mu, slope, &e.gden);
    e.gnum = log_ratio(nu, mu);
    if (!(e.num > 0)) e.num = 0;
    return e;
  };
  return suite_estimate(mu, dist, slope, opt, ratio);
}

RatioEstimate estimate_w2i(const ProbVector& mu, const Matrix& dist, const Matrix& cost, const SlopeEngine& slope,
                           const SuiteOptions& opt, double slack, double p_o) {
  const FunctionalSpec sp = slack_spec(slack, p_o);
  const RatioFn ratio = [&](const ProbVector& nu) {
    RatioEval e;
    const TransportSolution ot = ot_solve(nu, mu, cost);
    const double t = std::max(0.0, ot.primal_cost);
    e.num = sp.slack_transport(t);
    const double ds = sp.slack_derivative(t);
    e.gnum.assign(nu.size(), 0.0);
    for (std::size_t i : nu.support) e.gnum[i] = ds * ot.psi[i];
    e.den = fisher_with_gradient(nu, mu, slope, &e.gden);
    return e;
  };
  return suite_estimate(mu, dist, slope, opt, ratio);
}

const char* to_string(LevelVerdict v) {
  switch (v) {
    case LevelVerdict::trivial: return "trivial";
    case LevelVerdict::nontrivial: return "nontrivial";
    case LevelVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

LevelVerdict classify_level(const ProbVector& mu, const Matrix& cost, double a, const AMuOptions& opt, ProbVector* witness) {
  FunctionalSpec spec;
  spec.a = a;
  spec.slack = opt.slack;
  spec.p_o = opt.p_o;
  spec.validate();
  MinimizeConfig cfg;
  cfg.max_iter = opt.max_iter;
  const auto starts = multistart_battery(mu, cost, opt.multistarts, opt.seed);
  std::vector<LevelVerdict> v(starts.size(), LevelVerdict::inconclusive);
  std::vector<ProbVector> ends(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    StartOutcome o = fixed_point_run(spec, starts[s], mu, cost, cfg);
    if (total_variation(o.nu, mu) <= 1e-6) {
      v[s] = o.oscillation ? LevelVerdict::inconclusive : LevelVerdict::trivial;
    } else {
      const FunctionalState st = evaluate_state(spec, o.nu, mu, cost);
      if (stationarity(spec, o.nu, mu, st).residual <= 1e-6) v[s] = LevelVerdict::nontrivial;
    }
    ends[s] = std::move(o.nu);
  });
  for (std::size_t s = 0; s < v.size(); ++s)
    if (v[s] == LevelVerdict::nontrivial) {
      if (witness) *witness = ends[s];
      return LevelVerdict::nontrivial;
    }
  for (auto x : v)
    if (x != LevelVerdict::trivial) return LevelVerdict::inconclusive;
  return LevelVerdict::trivial;
}

AMuEstimate estimate_a_mu(const ProbVector& mu, const Matrix& cost, const AMuOptions& opt) {
  AMuEstimate est;
  est.nontrivial_witness = mu;
  if (mu.support.size() <= 1) return est;
  auto probe = [&](double a, ProbVector* w) {
    const LevelVerdict v = classify_level(mu, cost, a, opt, w);
    est.levels.push_back({a, v});
    return v;
  };
  // Upper end: grow until every start collapses onto mu.
  double hi = opt.hi_hint > 0 ? opt.hi_hint : 1.0;
  std::size_t budget = opt.max_levels;
  ProbVector w;
  LevelVerdict v;
  while ((v = probe(hi, &w)) != LevelVerdict::trivial) {
    if (--budget == 0 || hi > 1e12) {
      est.hi = kInf;
      est.inconclusive = true;
      return est;
    }
    if (v == LevelVerdict::nontrivial) {
      est.lo = std::max(est.lo, hi);
      est.nontrivial_witness = w;
    } else {
      est.inconclusive = true;
    }
    hi *= 2.0;
  }
  // Lower end: shrink until a nontrivial fixed point shows up.
  double lo = est.lo > 0 ? est.lo : (opt.lo_hint > 0 && opt.lo_hint < hi ? opt.lo_hint : hi / 2.0);
  if (est.lo == 0) {
    while ((v = probe(lo, &w)) != LevelVerdict::nontrivial) {
      if (v == LevelVerdict::trivial) hi = lo;
      else est.inconclusive = true;
      if (--budget == 0 || lo < 1e-12) {
        est.lo = 0;
        est.hi = hi;
        return est;
      }
      lo /= 2.0;
    }
    est.nontrivial_witness = w;
  }
  while (hi - lo > opt.tol * std::max(1.0, lo) && budget-- > 0) {
    const double mid = 0.5 * (lo + hi);
    v = probe(mid, &w);
    if (v == LevelVerdict::trivial) {
      hi = mid;
    } else if (v == LevelVerdict::nontrivial) {
      lo = mid;
      est.nontrivial_witness = w;
    } else {
      est.inconclusive = true;
      break;
    }
  }
  est.lo = lo;
  est.hi = hi;
  return est;
}

SubdifferentialCheck subdifferential_check(const TransportSolution& sol, const Matrix& cost) {
  SubdifferentialCheck c;
  c.lhs = subdifferential_cost(sol, cost);
  c.primal = sol.primal_cost;
  c.holds = c.lhs <= c.primal;
  return c;
}

double slope_potential_violation(const TransportSolution& sol, const ProbVector& nu, const Matrix& dist, const SlopeEngine& slope) {
  const std::vector<double> s = subdifferential_distances(sol, nu, dist);
  const std::size_t n = nu.size();
  double worst = -kInf;
  for (std::size_t i : nu.support) {
    const double* w = slope.weights(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double lhs = (sol.psi[j] - sol.psi[i]) * w[j] - dist(i, j);
      worst = std::max(worst, lhs - 2.0 * s[i]);
    }
  }
  return worst;
}

OvReport verify_otto_villani(const T2Estimate& t2, const RatioEstimate& lsi, const std::vector<ProbVector>& instances,
                             const ProbVector& mu, const Matrix& cost, const Matrix& dist, const SlopeEngine& slope,
                             double margin, double abs_tol) {
  OvReport r;
  r.slope_tag = lsi.slope_tag;
  r.c_t2_hi = t2.hi;
  r.c_lsi = lsi.value;
  r.c_lsi_upper = lsi.value * (1.0 + margin);
  r.bound = 4.0 * r.c_lsi_upper + abs_tol;
  r.holds = r.c_t2_hi <= r.bound;
  double worst = -kInf;
  for (const auto& nu : instances) {
    const TransportSolution sol = ot_solve(nu, mu, cost);
    ++r.subdifferential_instances;
    if (!subdifferential_check(sol, cost).holds) r.subdifferential_all = false;
    worst = std::max(worst, slope_potential_violation(sol, nu, dist, slope));
  }
  r.slope_bound_violation = instances.empty() ? 0.0 : worst;
  r.slope_bound_ok = r.slope_bound_violation <= 1e-9;
  return r;
}

W2iReport verify_w2i(const T2Estimate& t2, const RatioEstimate& w2i, double margin, double abs_tol) {
  W2iReport r;
  r.c_t2_hi = t2.hi;
  r.c_w2i = w2i.value;
  r.c_w2i_upper = w2i.value * (1.0 + margin);
  r.bound = 2.0 * std::sqrt(w2i.value) * (1.0 + margin) + abs_tol;
  r.holds = r.c_t2_hi <= r.bound;
  return r;
}

RestrictedReport verify_restricted_lsi(const ProbVector& mu, const FiniteMetricSpace& space, const T2Estimate& t2,
                                       const RatioEstimate& lsi_full, const SemiconcaveClass& cls, const SlopeEngine& slope,
                                       double margin, double abs_tol) {
  RestrictedReport r;
  r.lambda_o = cls.lambda_o;
  r.c_t2_hi = t2.hi;
  r.d_full = lsi_full.value;
  r.witness = mu;
  r.worst_midpoint_margin = space.points.size() == space.n ? cls.worst_midpoint_margin(space) : 0.0;
  r.class_ok = r.worst_midpoint_margin >= -1e-9;
  const double scales[3] = {0.25, 0.5, 1.0};
  for (const auto& f : cls.samples) {
    for (double t : scales) {
      std::vector<double> g(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) g[i] = t * f[i];
      const ProbVector nu = tilt(mu, g);
      const double h = relative_entropy(nu, mu);
      const double info = fisher_information(nu, mu, slope);
      if (h > 0 && info > 0 && h / info > r.d_restricted) {
        r.d_restricted = h / info;
        r.witness = nu;
      }
    }
  }
  r.subset_ok = r.d_restricted <= r.d_full * (1.0 + margin) + abs_tol;
  r.bound = std::max(4.0 * r.d_restricted * (1.0 + margin), 1.0 / cls.lambda_o) + abs_tol;
  r.holds = r.c_t2_hi <= r.bound;
  return r;
}

ChainReport constants_chain(const T2Estimate& t2, const AMuEstimate& amu, const RatioEstimate& w2i, const RatioEstimate& lsi,
                            double margin) {
  auto tol = [](double x, double y) { return 1e-6 + 0.01 * std::max(std::abs(x), std::abs(y)); };
  ChainReport c;
  c.t2_le_amu = t2.lo - tol(t2.lo, amu.hi) <= amu.hi;
  const double w2i_upper = 2.0 * std::sqrt(w2i.value * (1.0 + margin));
  c.amu_le_w2i = amu.lo - tol(amu.lo, w2i_upper) <= w2i_upper;
  const double w2i_lower = 2.0 * std::sqrt(w2i.value);
  const double lsi_upper = 4.0 * lsi.value * (1.0 + margin);
  c.w2i_le_lsi = w2i_lower - tol(w2i_lower, lsi_upper) <= lsi_upper;
  return c;
}

double transfer_r_o(double a, double b, double p_o) {
  return std::pow(a * std::log(2.0), 1.0 / p_o) + 2.0 * std::pow(std::max(0.0, b), 1.0 / p_o);
}

double exp_integral_r_o(double delta, double i_delta, double p_o) {
  return std::pow(std::max(0.0, std::log(2.0 * i_delta)) / delta, 1.0 / p_o);
}

}  // namespace tei
