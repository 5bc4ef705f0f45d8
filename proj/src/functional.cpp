#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/variational.hpp"

namespace tei {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ScalarProfile::value(double t) const {
  switch (kind) {
    case Kind::sqrt: return std::sqrt(t);
    case Kind::identity: return t;
    case Kind::power: return std::pow(t, q);
  }
  return 0.0;
}

double ScalarProfile::derivative(double t) const {
  switch (kind) {
    case Kind::sqrt: return t > 0 ? 0.5 / std::sqrt(t) : kInf;
    case Kind::identity: return 1.0;
    case Kind::power:
      if (q == 1.0) return 1.0;
      if (t > 0) return q * std::pow(t, q - 1.0);
      return q < 1.0 ? kInf : 0.0;
  }
  return 0.0;
}

double ScalarProfile::exponent() const { return kind == Kind::sqrt ? 0.5 : (kind == Kind::identity ? 1.0 : q); }

std::string ScalarProfile::name() const {
  switch (kind) {
    case Kind::sqrt: return "sqrt";
    case Kind::identity: return "identity";
    case Kind::power: return "power";
  }
  return "unknown";
}

void FunctionalSpec::validate() const {
  if (!(a > 0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidSpec, "a must be positive and finite");
  if (!(slack >= 0) || !std::isfinite(slack)) throw Error(ErrorCode::InvalidSpec, "slack must be nonnegative");
  if (!(p_o >= 1)) throw Error(ErrorCode::InvalidSpec, "p_o must be at least 1");
  const double qa = alpha.exponent(), qb = beta.exponent();
  if (!(qa > 0) || !(qb > 0)) throw Error(ErrorCode::InvalidSpec, "profile exponents must be positive");
  // alpha(t) - beta(t + b) stays bounded below iff alpha grows faster, or both
  // grow like t^q with q <= 1.
  const bool ok = qa > qb || (qa == qb && qa <= 1.0);
  if (!ok) throw Error(ErrorCode::InvalidSpec, "(" + alpha.name() + ", " + beta.name() + ") is unbounded below");
}

bool FunctionalSpec::identity_case() const {
  return alpha.kind == ScalarProfile::Kind::identity && beta.kind == ScalarProfile::Kind::identity;
}

double FunctionalSpec::slack_transport(double t) const {
  if (slack == 0.0) return t;
  const double w = p_o == 2.0 ? std::sqrt(t) : std::pow(t, 1.0 / p_o);
  const double r = std::max(0.0, w - slack);
  return p_o == 2.0 ? r * r : std::pow(r, p_o);
}

double FunctionalSpec::slack_derivative(double t) const {
  if (slack == 0.0) return 1.0;
  if (!(t > 0)) return 0.0;
  const double w = p_o == 2.0 ? std::sqrt(t) : std::pow(t, 1.0 / p_o);
  const double r = std::max(0.0, 1.0 - slack / w);
  return p_o == 2.0 ? r : std::pow(r, p_o - 1.0);
}

FunctionalState evaluate_state(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost) {
  FunctionalState st;
  st.entropy = relative_entropy(nu, mu);
  if (!std::isfinite(st.entropy)) throw Error(ErrorCode::EntropyInfinite, "supp(nu) is not inside supp(mu)");
  st.ot = ot_solve(nu, mu, cost);
  st.transport = std::max(0.0, st.ot.primal_cost);
  st.slack_transport = spec.slack_transport(st.transport);
  st.value = spec.alpha.value(spec.a * st.entropy) - spec.beta.value(st.slack_transport);
  return st;
}

double evaluate(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost) {
  return evaluate_state(spec, nu, mu, cost).value;
}

LowerBoundCertificate lower_bound_certificate(const ProbVector& mu, const Matrix& cost, double delta, const FunctionalSpec& spec) {
  spec.validate();
  if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (spec.a < 1.0 / delta) throw Error(ErrorCode::BoundVacuous, "a < 1/delta");
  LowerBoundCertificate out;
  const ExpIntegral ie = exp_integral(mu, cost, delta);
  out.i_delta = ie.value;
  if (ie.overflow) {
    out.value = -kInf;
    out.b = kInf;
    return out;
  }
  const double k = std::exp(-1.0) * ie.value / delta;
  auto f = [&](double h) { return spec.alpha.value(spec.a * h) - spec.beta.value(h / delta + k); };
  // Coarse scan over h = 0 and a log grid, then golden-section refinement.
  double best_h = 0.0, best = f(0.0);
  const int m = 481;
  std::vector<double> hs(m);
  for (int i = 0; i < m; ++i) hs[i] = std::pow(10.0, -12.0 + 24.0 * i / (m - 1));
  int best_i = -1;
  for (int i = 0; i < m; ++i) {
    const double v = f(hs[i]);
    if (v < best) {
      best = v;
      best_h = hs[i];
      best_i = i;
    }
  }
  if (best_i >= 0) {
    double lo = best_i > 0 ? hs[best_i - 1] : 0.0, hi = best_i + 1 < m ? hs[best_i + 1] : hs[best_i];
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = f(x2);
      }
    }
    const double xm = 0.5 * (lo + hi);
    if (f(xm) < best) {
      best = f(xm);
      best_h = xm;
    }
  }
  out.value = best;
  out.h_star = best_h;
  out.b = std::max(0.0, -best);
  return out;
}

double lambda_bar(const FunctionalSpec& spec, const FunctionalState& st) {
  const double num = spec.a * spec.alpha.derivative(spec.a * st.entropy);
  const double den = spec.beta.derivative(st.slack_transport) * spec.slack_derivative(st.transport);
  double l = den > 0 ? num / den : kInf;
  if (std::isnan(l)) l = kInf;
  return std::clamp(l, 1e-8, 1e8);
}

std::vector<double> variation_kernel(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu,
                                     const FunctionalState& st) {
  const double da = spec.a * spec.alpha.derivative(spec.a * st.entropy);
  // The transport term is flat inside the slack zone, so no infinity * 0 there.
  const double ds = spec.slack_derivative(st.transport);
  const double db = ds > 0 ? spec.beta.derivative(st.slack_transport) * ds : 0.0;
  std::vector<double> k(nu.size(), 0.0);
  long double mean = 0;
  for (std::size_t i : nu.support) {
    const double lg = std::log(nu.w[i] / mu.w[i]);
    const double ent = lg == 0.0 ? 0.0 : da * lg;
    const double tr = db == 0.0 ? 0.0 : db * st.ot.psi[i];
    k[i] = ent - tr;
    mean += static_cast<long double>(nu.w[i]) * k[i];
  }
  for (std::size_t i : nu.support) k[i] -= static_cast<double>(mean);
  return k;
}

FirstVariation first_variation(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const Matrix& cost) {
  FirstVariation fv;
  fv.state = evaluate_state(spec, nu, mu, cost);
  fv.boundary = nu.support.size() < mu.support.size();
  fv.kernel = variation_kernel(spec, nu, mu, fv.state);
  return fv;
}

Stationarity stationarity(const FunctionalSpec& spec, const ProbVector& nu, const ProbVector& mu, const FunctionalState& st) {
  Stationarity out;
  out.lambda_bar = lambda_bar(spec, st);
  long double m = 0, m2 = 0;
  for (std::size_t i : nu.support) {
    const long double r = static_cast<long double>(out.lambda_bar) * std::log(nu.w[i] / mu.w[i]) - st.ot.psi[i];
    m += nu.w[i] * r;
  }
  for (std::size_t i : nu.support) {
    const long double r = static_cast<long double>(out.lambda_bar) * std::log(nu.w[i] / mu.w[i]) - st.ot.psi[i] - m;
    m2 += nu.w[i] * r * r;
  }
  out.constant = static_cast<double>(m);
  out.residual = static_cast<double>(std::sqrt(m2));
  return out;
}

}  // namespace tei
