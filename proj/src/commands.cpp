#include "tei/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>

#include "tei/error.hpp"
#include "tei/inequality.hpp"
#include "tei/kernels.hpp"
#include "tei/parallel.hpp"

namespace tei {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(v > 0 ? "inf" : (v < 0 ? "-inf" : "nan")); }

Json weights(const ProbVector& p) { return Json(p.w); }

ScalarProfile profile_of(const std::string& name, double q) {
  if (name == "sqrt") return ScalarProfile::sqrt();
  if (name == "identity") return ScalarProfile::identity();
  if (name == "power") return ScalarProfile::power(q);
  throw Error(ErrorCode::InputParse, "unknown scalar profile '" + name + "'");
}

FunctionalSpec spec_of(const RunConfig& cfg, double p_o) {
  FunctionalSpec s;
  s.alpha = profile_of(cfg.alpha, cfg.alpha_q);
  s.beta = profile_of(cfg.beta, cfg.beta_q);
  s.a = cfg.a;
  s.slack = cfg.slack.value_or(0.0);
  s.p_o = p_o;
  s.validate();
  return s;
}

Json spec_json(const FunctionalSpec& s) {
  Json j;
  j["alpha"] = s.alpha.name();
  j["beta"] = s.beta.name();
  j["a"] = s.a;
  j["slack"] = s.slack;
  j["p_o"] = s.p_o;
  return j;
}

SlopeOperator slope_of(const RunConfig& cfg, const FiniteMetricSpace& space) {
  SlopeOperator op;
  if (cfg.slope == "global") {
    op.mode = SlopeOperator::Mode::global;
  } else if (cfg.slope == "graph") {
    op.mode = SlopeOperator::Mode::graph;
    op.radius = cfg.slope_radius > 0 ? cfg.slope_radius : space.min_positive_distance();
  } else {
    throw Error(ErrorCode::InputParse, "unknown slope mode '" + cfg.slope + "'");
  }
  return op;
}

struct Context {
  Instance inst;
  PowerTypeCost cost;
  Matrix dtilde;
  double slack = 0;
};

Context load(const RunConfig& cfg) {
  if (cfg.instance.empty()) throw Error(ErrorCode::InputParse, "no instance given");
  Context c{load_instance(cfg.instance), {}, {}, 0};
  c.cost = make_cost(c.inst.space, c.inst.profile, c.inst.truncate);
  c.dtilde = induced_distance(c.inst.space, c.cost);
  c.slack = cfg.slack.value_or(default_slack(c.dtilde));
  return c;
}

void require_square(const Context& c, const char* what) {
  if (c.inst.profile.kind != CostProfile::Kind::square)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs the square cost");
}

Json t2_json(const T2Estimate& e) {
  Json j;
  j["lo"] = num(e.lo);
  j["hi"] = num(e.hi);
  j["certified"] = e.certified;
  j["slack"] = e.slack;
  j["rounds"] = e.rounds;
  j["min_value_at_hi"] = e.min_value_at_hi;
  j["witness_ratio"] = num(e.witness_ratio);
  j["witness"] = weights(e.witness);
  return j;
}

Json ratio_json(const RatioEstimate& e, double margin) {
  Json j;
  j["value"] = num(e.value);
  j["upper_with_margin"] = num(e.value * (1.0 + margin));
  j["kind"] = "suite lower bound";
  j["slope"] = e.slope_tag;
  j["probes"] = e.probes;
  j["degenerate_probes"] = e.degenerate;
  j["witness"] = weights(e.witness);
  return j;
}

Json amu_json(const AMuEstimate& e) {
  Json j;
  j["lo"] = num(e.lo);
  j["hi"] = num(e.hi);
  j["inconclusive"] = e.inconclusive;
  Json lv = Json::array();
  for (const auto& l : e.levels) lv.push_back({{"a", l.a}, {"verdict", to_string(l.verdict)}});
  j["levels"] = lv;
  j["nontrivial_witness"] = weights(e.nontrivial_witness);
  return j;
}

T2Options t2_options(const RunConfig& cfg, const Context& c) {
  T2Options o;
  o.slack = c.slack;
  o.bracket_tol = cfg.bracket_tol;
  o.p_o = c.cost.exponent_po;
  o.multistarts = cfg.multistarts;
  o.seed = cfg.seed;
  return o;
}

SuiteOptions suite_options(const RunConfig& cfg) {
  SuiteOptions o;
  o.probes = cfg.probes;
  o.seed = cfg.seed;
  return o;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CommandOutput cmd_validate(const RunConfig& cfg) {
  Context c = load(cfg);
  CommandOutput out;
  Json& r = out.report;
  r["points"] = c.inst.space.n;
  r["diameter"] = c.inst.space.diameter();
  r["min_positive_distance"] = c.inst.space.min_positive_distance();
  r["cost_exponent_po"] = c.cost.exponent_po;
  r["doubling_K"] = c.cost.doubling_K;
  r["induced_diameter"] = c.dtilde.max_entry();
  r["mu_support"] = c.inst.mu.support.size();
  r["default_slack"] = default_slack(c.dtilde);
  out.summary = fmt("valid space: %.0f points, diameter %.6g", static_cast<double>(c.inst.space.n), c.inst.space.diameter());
  return out;
}

CommandOutput cmd_transport(const RunConfig& cfg) {
  Context c = load(cfg);
  if (!c.inst.nu) throw Error(ErrorCode::InputParse, "transport needs 'nu' in the instance");
  const ProbVector& nu = *c.inst.nu;
  const TransportSolution sol = ot_solve(nu, c.inst.mu, c.cost.cost);
  const TransportCheck chk = check_solution(sol, nu, c.inst.mu, c.cost.cost);
  const SubdifferentialCheck sub = subdifferential_check(sol, c.cost.cost);
  CommandOutput out;
  Json& r = out.report;
  r["primal_cost"] = sol.primal_cost;
  r["duality_gap"] = sol.duality_gap;
  r["pivots"] = sol.pivots;
  r["marginal_error"] = chk.marginal_error;
  r["feasibility_violation"] = chk.feasibility_violation;
  r["slackness_error"] = chk.slackness_error;
  r["subdifferential_cost"] = sub.lhs;
  r["subdifferential_bound_holds"] = sub.holds;
  r["psi"] = sol.psi;
  r["phi"] = sol.phi;
  Json pairs = Json::array();
  std::vector<double> pi, pj, pm;
  for (const auto& [i, j] : sol.support_pairs) {
    pairs.push_back({i, j, sol.plan(i, j)});
    pi.push_back(static_cast<double>(i));
    pj.push_back(static_cast<double>(j));
    pm.push_back(sol.plan(i, j));
  }
  r["plan_support"] = pairs;
  out.side_files.push_back({"plan.csv", csv_table({"i", "j", "mass"}, {pi, pj, pm})});
  const bool ok = sol.duality_gap <= 1e-8 && chk.slackness_error <= 1e-8 && sub.holds;
  r["checks_pass"] = ok;
  out.status = ok ? kExitOk : kExitAssertion;
  out.summary = fmt("transport cost %.12g, duality gap %.3g", sol.primal_cost, sol.duality_gap);
  return out;
}

MinimizationResult run_minimizer(const RunConfig& cfg, const FunctionalSpec& spec, const Context& c) {
  MinimizeConfig mc;
  mc.multistarts = cfg.multistarts;
  mc.max_iter = cfg.max_iter;
  mc.seed = cfg.seed;
  if (cfg.method == "mirror") return minimize_mirror(spec, c.inst.mu, c.cost.cost, mc);
  if (cfg.method == "fixed_point") return minimize_fixed_point(spec, c.inst.mu, c.cost.cost, mc);
  if (cfg.method == "truncation") return minimize_truncation(spec, c.inst.mu, c.cost.cost, cfg.levels, mc);
  throw Error(ErrorCode::InputParse, "unknown method '" + cfg.method + "'");
}

Json minimization_json(const MinimizationResult& m, const ProbVector& mu) {
  Json j;
  j["method"] = to_string(m.method);
  j["value"] = m.value;
  j["tv_from_mu"] = total_variation(m.minimizer, mu);
  j["lambda_bar"] = num(m.lambda_bar);
  j["residual"] = num(m.residual);
  j["constant"] = num(m.constant);
  j["multistart_count"] = m.multistart_count;
  j["agreement_tv"] = m.agreement_tv;
  j["best_start"] = m.best_start;
  j["stalled"] = m.stalled;
  j["oscillation"] = m.oscillation;
  j["trace_monotone"] = m.trace_monotone;
  if (!m.levels.empty()) j["levels"] = m.levels;
  j["trace"] = m.trace;
  j["minimizer"] = weights(m.minimizer);
  return j;
}

CommandOutput cmd_minimize(const RunConfig& cfg) {
  Context c = load(cfg);
  const FunctionalSpec spec = spec_of(cfg, c.cost.exponent_po);
  const MinimizationResult m = run_minimizer(cfg, spec, c);
  CommandOutput out;
  out.report["spec"] = spec_json(spec);
  out.report["result"] = minimization_json(m, c.inst.mu);
  std::vector<double> idx(c.inst.space.n);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
  std::vector<std::string> header = {"i", "mu", "minimizer"};
  std::vector<std::vector<double>> cols = {idx, c.inst.mu.w, m.minimizer.w};
  if (c.inst.space.points.size() == c.inst.space.n) {
    header.insert(header.begin() + 1, "x");
    cols.insert(cols.begin() + 1, c.inst.space.points);
  }
  out.side_files.push_back({"minimizer.csv", csv_table(header, cols)});
  if (m.method == Method::truncation && !m.trace_monotone) out.status = kExitAssertion;
  out.summary = fmt("minimum %.12g at TV %.3g from mu, residual %.3g", m.value, total_variation(m.minimizer, c.inst.mu), m.residual);
  return out;
}

struct Constants {
  T2Estimate t2;
  RatioEstimate lsi, w2i;
  AMuEstimate amu;
  ChainReport chain;
  bool chain_applies = false;
};

Constants compute_constants(const RunConfig& cfg, const Context& c, bool with_amu) {
  Constants k;
  const SlopeEngine slope(c.inst.space.dist, slope_of(cfg, c.inst.space));
  k.t2 = estimate_t2(c.inst.mu, c.cost.cost, t2_options(cfg, c));
  k.lsi = estimate_lsi(c.inst.mu, c.inst.space.dist, slope, suite_options(cfg));
  k.w2i = estimate_w2i(c.inst.mu, c.inst.space.dist, c.cost.cost, slope, suite_options(cfg), c.slack, c.cost.exponent_po);
  if (with_amu) {
    AMuOptions ao;
    ao.slack = c.slack;
    ao.p_o = c.cost.exponent_po;
    ao.tol = cfg.bracket_tol;
    ao.seed = cfg.seed;
    if (k.t2.lo > 0) ao.hi_hint = std::isfinite(k.t2.hi) ? k.t2.hi : k.t2.lo;
    k.amu = estimate_a_mu(c.inst.mu, c.cost.cost, ao);
    k.chain_applies = c.inst.profile.kind == CostProfile::Kind::square;
    k.chain = constants_chain(k.t2, k.amu, k.w2i, k.lsi, cfg.margin);
  }
  return k;
}

CommandOutput cmd_constants(const RunConfig& cfg) {
  Context c = load(cfg);
  const Constants k = compute_constants(cfg, c, true);
  CommandOutput out;
  Json& r = out.report;
  r["c_t2"] = t2_json(k.t2);
  r["c_lsi"] = ratio_json(k.lsi, cfg.margin);
  r["c_w2i"] = ratio_json(k.w2i, cfg.margin);
  r["a_mu"] = amu_json(k.amu);
  r["suite_seed"] = cfg.seed;
  r["estimate_directions"] = "c_t2 and a_mu are brackets; c_lsi and c_w2i are suite lower bounds inflated by margin for chain checks";
  if (k.chain_applies) {
    r["chain"] = {{"t2_le_amu", k.chain.t2_le_amu}, {"amu_le_w2i", k.chain.amu_le_w2i}, {"w2i_le_lsi", k.chain.w2i_le_lsi}};
    r["chain_ok"] = k.chain.ok();
    if (!k.chain.ok()) out.status = kExitAssertion;
  } else {
    r["chain"] = "not applicable: needs the square cost";
  }
  out.summary = fmt("c_t2 in [%.6g, %.6g], c_lsi >= %.6g", k.t2.lo, k.t2.hi, k.lsi.value);
  if (k.chain_applies) out.summary += k.chain.ok() ? ", chain ok" : ", chain violated";
  return out;
}

std::vector<ProbVector> check_instances(const RunConfig& cfg, const Context& c, const std::vector<const ProbVector*>& extra) {
  std::vector<ProbVector> v;
  for (const ProbVector* p : extra) v.push_back(*p);
  auto battery = multistart_battery(c.inst.mu, c.cost.cost, 9, cfg.seed);
  for (std::size_t s = 1; s < battery.size(); ++s) v.push_back(battery[s]);
  return v;
}

CommandOutput cmd_verify_ov(const RunConfig& cfg) {
  Context c = load(cfg);
  require_square(c, "verify-ov");
  const SlopeEngine slope(c.inst.space.dist, slope_of(cfg, c.inst.space));
  const T2Estimate t2 = estimate_t2(c.inst.mu, c.cost.cost, t2_options(cfg, c));
  const RatioEstimate lsi = estimate_lsi(c.inst.mu, c.inst.space.dist, slope, suite_options(cfg));
  const auto inst = check_instances(cfg, c, {&t2.witness, &lsi.witness});
  const OvReport ov = verify_otto_villani(t2, lsi, inst, c.inst.mu, c.cost.cost, c.inst.space.dist, slope, cfg.margin);
  CommandOutput out;
  Json& r = out.report;
  r["c_t2"] = t2_json(t2);
  r["c_lsi"] = ratio_json(lsi, cfg.margin);
  r["bound"] = num(ov.bound);
  r["holds"] = ov.holds;
  r["subdifferential_instances"] = ov.subdifferential_instances;
  r["subdifferential_bound_all"] = ov.subdifferential_all;
  r["slope_potential_violation"] = ov.slope_bound_violation;
  r["slope_potential_ok"] = ov.slope_bound_ok;
  const bool ok = ov.holds && ov.subdifferential_all && ov.slope_bound_ok;
  r["ok"] = ok;
  if (!ok) out.status = kExitAssertion;
  out.summary = fmt("c_t2.hi %.6g vs 4 c_lsi (1 + margin) %.6g", t2.hi, ov.bound) + (ok ? ": holds" : ": violated");
  return out;
}

CommandOutput cmd_verify_w2i(const RunConfig& cfg) {
  Context c = load(cfg);
  require_square(c, "verify-w2i");
  const SlopeEngine slope(c.inst.space.dist, slope_of(cfg, c.inst.space));
  const T2Estimate t2 = estimate_t2(c.inst.mu, c.cost.cost, t2_options(cfg, c));
  const RatioEstimate w2i =
      estimate_w2i(c.inst.mu, c.inst.space.dist, c.cost.cost, slope, suite_options(cfg), c.slack, c.cost.exponent_po);
  const W2iReport rep = verify_w2i(t2, w2i, cfg.margin);
  CommandOutput out;
  out.report["c_t2"] = t2_json(t2);
  out.report["c_w2i"] = ratio_json(w2i, cfg.margin);
  out.report["bound"] = num(rep.bound);
  out.report["holds"] = rep.holds;
  if (!rep.holds) out.status = kExitAssertion;
  out.summary = fmt("c_t2.hi %.6g vs 2 sqrt(c_w2i) (1 + margin) %.6g", t2.hi, rep.bound) + (rep.holds ? ": holds" : ": violated");
  return out;
}

CommandOutput cmd_verify_restricted(const RunConfig& cfg) {
  Context c = load(cfg);
  require_square(c, "verify-restricted-lsi");
  const SlopeEngine slope(c.inst.space.dist, slope_of(cfg, c.inst.space));
  const T2Estimate t2 = estimate_t2(c.inst.mu, c.cost.cost, t2_options(cfg, c));
  const RatioEstimate lsi = estimate_lsi(c.inst.mu, c.inst.space.dist, slope, suite_options(cfg));
  const SemiconcaveClass cls = SemiconcaveClass::sample(c.inst.space.dist, cfg.lambda_o, cfg.semiconcave_samples, cfg.seed + 1);
  const RestrictedReport rep = verify_restricted_lsi(c.inst.mu, c.inst.space, t2, lsi, cls, slope, cfg.margin);
  CommandOutput out;
  Json& r = out.report;
  r["c_t2"] = t2_json(t2);
  r["c_lsi_full"] = ratio_json(lsi, cfg.margin);
  r["d_restricted"] = rep.d_restricted;
  r["lambda_o"] = rep.lambda_o;
  r["worst_midpoint_margin"] = rep.worst_midpoint_margin;
  r["class_ok"] = rep.class_ok;
  r["subset_ok"] = rep.subset_ok;
  r["bound"] = num(rep.bound);
  r["holds"] = rep.holds;
  r["witness"] = weights(rep.witness);
  const bool ok = rep.holds && rep.class_ok && rep.subset_ok;
  r["ok"] = ok;
  if (!ok) out.status = kExitAssertion;
  out.summary = fmt("restricted D %.6g, c_t2.hi %.6g vs bound %.6g", rep.d_restricted, t2.hi, rep.bound) + (ok ? ": holds" : ": violated");
  return out;
}

CommandOutput cmd_concentration(const RunConfig& cfg) {
  Context c = load(cfg);
  const ProfileMode mode = c.inst.space.n <= kExactProfileMax ? ProfileMode::exact : ProfileMode::sublevel;
  const ConcentrationProfile prof = concentration_profile(c.inst.mu, c.dtilde, mode);
  const ConcentrationFit fit = fit_concentration_constants(prof, c.cost.exponent_po);
  CommandOutput out;
  Json& r = out.report;
  r["exact"] = prof.exact;
  r["radii"] = prof.radii;
  r["alpha"] = prof.alpha;
  r["fit"] = {{"a_prime", num(fit.a_prime)}, {"r_o", fit.r_o}};
  Json fr = Json::array();
  for (std::size_t i = 0; i < fit.frontier_r_o.size(); ++i) fr.push_back({fit.frontier_r_o[i], num(fit.frontier_a_prime[i])});
  r["frontier"] = fr;
  out.side_files.push_back({"profile.csv", csv_table({"r", "alpha"}, {prof.radii, prof.alpha})});
  out.summary = fmt("profile over %.0f radii, a' = %.6g at r_o = 0", static_cast<double>(prof.radii.size()), fit.a_prime);
  if (cfg.concentration_a) {
    const double a = *cfg.concentration_a, b = cfg.concentration_b.value_or(0.0);
    const double r_o = transfer_r_o(a, b, c.cost.exponent_po);
    const bool holds = profile_bound_holds(prof, c.cost.exponent_po, a, r_o);
    r["transfer"] = {{"a", a}, {"b", b}, {"r_o", r_o}, {"holds", holds}};
    if (!holds) out.status = kExitAssertion;
    out.summary += holds ? ", transfer bound holds" : ", transfer bound violated";
  }
  return out;
}

CommandOutput cmd_dual_check(const RunConfig& cfg) {
  Context c = load(cfg);
  RunConfig id = cfg;
  id.alpha = id.beta = "identity";
  if (!id.slack) id.slack = 0.0;
  const FunctionalSpec spec = spec_of(id, c.cost.exponent_po);
  MinimizeConfig mc;
  mc.multistarts = cfg.multistarts;
  mc.max_iter = cfg.max_iter;
  mc.seed = cfg.seed;
  const MinimizationResult fp = minimize_fixed_point(spec, c.inst.mu, c.cost.cost, mc);
  const MinimizationResult md = minimize_mirror(spec, c.inst.mu, c.cost.cost, mc);
  const double primal = std::min(fp.value, md.value);
  DualConfig dc;
  dc.multistarts = std::max<std::size_t>(1, 2 * cfg.multistarts);
  dc.seed = cfg.seed;
  const DualResult dual = dual_value(spec, c.inst.mu, c.cost.cost, dc);
  const double gap = std::abs(primal - dual.value);
  CommandOutput out;
  Json& r = out.report;
  r["spec"] = spec_json(spec);
  r["primal"] = primal;
  r["dual"] = dual.value;
  r["gap"] = gap;
  r["tolerance"] = cfg.dual_tol;
  r["psi"] = dual.psi;
  if (gap > cfg.dual_tol) {
    r["error"] = to_string(ErrorCode::DualPrimalGap);
    out.status = kExitAssertion;
  }
  out.summary = fmt("primal %.10g, dual %.10g, gap %.3g", primal, dual.value, gap);
  return out;
}

CommandOutput cmd_ma_residual(const RunConfig& cfg) {
  Context c = load(cfg);
  if (!c.inst.grid) throw Error(ErrorCode::InvalidArgument, "ma-residual needs a grid instance");
  require_square(c, "ma-residual");
  RunConfig id = cfg;
  id.alpha = id.beta = "identity";
  if (!id.slack) id.slack = 0.0;
  const FunctionalSpec spec = spec_of(id, 2.0);
  MinimizeConfig mc;
  mc.multistarts = cfg.multistarts;
  mc.max_iter = cfg.max_iter;
  mc.seed = cfg.seed;
  const MinimizationResult m = minimize_fixed_point(spec, c.inst.mu, c.cost.cost, mc);
  MaOptions mo;
  mo.stencil = cfg.ma_stencil;
  const MaProfile p = ma_residual_1d(c.inst.space.points, c.inst.mu, m.minimizer, m.lambda_bar, mo);
  CommandOutput out;
  Json& r = out.report;
  r["spec"] = spec_json(spec);
  r["minimum"] = m.value;
  r["tv_from_mu"] = total_variation(m.minimizer, c.inst.mu);
  r["lambda_bar"] = m.lambda_bar;
  r["stencil"] = p.stencil;
  r["rms_pre"] = p.rms_pre;
  r["rms_ma"] = p.rms_ma;
  r["min_convexity"] = p.min_convexity;
  std::vector<double> bd(p.boundary.size());
  for (std::size_t i = 0; i < bd.size(); ++i) bd[i] = p.boundary[i] ? 1.0 : 0.0;
  out.side_files.push_back({"ma_residual.csv", csv_table({"x", "V", "dV", "d2V", "pre_residual", "ma_residual", "boundary"},
                                                         {p.x, p.V, p.dV, p.d2V, p.pre_residual, p.ma_residual, bd})});
  if (p.min_convexity < -1e-8) out.status = kExitAssertion;
  out.summary = fmt("MA rms %.4g, pre rms %.4g, min convexity %.3g", p.rms_ma, p.rms_pre, p.min_convexity);
  return out;
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"validate",   "transport",    "minimize",   "constants",   "verify-ov",
                                                 "verify-restricted-lsi",     "verify-w2i", "concentration", "dual-check",
                                                 "ma-residual"};
  return names;
}

CommandOutput execute(const RunConfig& cfg) {
  CommandOutput out;
  if (cfg.command == "validate") out = cmd_validate(cfg);
  else if (cfg.command == "transport") out = cmd_transport(cfg);
  else if (cfg.command == "minimize") out = cmd_minimize(cfg);
  else if (cfg.command == "constants") out = cmd_constants(cfg);
  else if (cfg.command == "verify-ov") out = cmd_verify_ov(cfg);
  else if (cfg.command == "verify-restricted-lsi") out = cmd_verify_restricted(cfg);
  else if (cfg.command == "verify-w2i") out = cmd_verify_w2i(cfg);
  else if (cfg.command == "concentration") out = cmd_concentration(cfg);
  else if (cfg.command == "dual-check") out = cmd_dual_check(cfg);
  else if (cfg.command == "ma-residual") out = cmd_ma_residual(cfg);
  else throw Error(ErrorCode::UnknownCommand, "'" + cfg.command + "'");
  Json full;
  full["schema"] = 1;
  full["version"] = TEI_VERSION;
  full["command"] = cfg.command;
  full["config"] = to_json(cfg);
  full["status"] = out.status;
  full["result"] = std::move(out.report);
  out.report = std::move(full);
  return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    CommandOutput res = execute(cfg);
    Json doc = res.report;
    doc["metadata"] = {{"timestamp", timestamp()}, {"threads", thread_count()}, {"isa", kernels::isa_name(kernels::active_isa())}};
    const std::filesystem::path dir(cfg.output_dir);
    write_atomic(dir / (cfg.command + ".json"), doc.dump(2) + "\n");
    for (const auto& [name, content] : res.side_files) write_atomic(dir / name, content);
    out << cfg.command << ": " << res.summary << '\n';
    return res.status;
  } catch (const Error& e) {
    err << cfg.command << ": " << e.what() << '\n';
    return e.code() == ErrorCode::AssertionFailure || e.code() == ErrorCode::DualPrimalGap ? kExitAssertion : kExitInput;
  } catch (const std::exception& e) {
    err << cfg.command << ": " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace tei
