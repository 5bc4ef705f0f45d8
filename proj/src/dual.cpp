#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/inequality.hpp"
#include "tei/parallel.hpp"

namespace tei {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DualEval {
  double value = kInf;
  std::vector<double> nu_psi;  // Gibbs measure e^{psi/a} mu, normalized
  std::vector<double> cell;    // mu mass of the points where x attains psi^c
};

DualEval dual_eval(double a, const ProbVector& mu, const Matrix& cost, const std::vector<double>& psi) {
  const auto& sup = mu.support;
  const std::size_t n = mu.size();
  DualEval e;
  e.nu_psi.assign(n, 0.0);
  e.cell.assign(n, 0.0);
  long double phi_mass = 0;
  for (std::size_t y : sup) {
    double best = kInf;
    std::size_t arg = sup.front();
    for (std::size_t x : sup) {
      const double v = cost(x, y) - psi[x];
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    phi_mass += static_cast<long double>(mu.w[y]) * best;
    e.cell[arg] += mu.w[y];
  }
  double top = -kInf;
  for (std::size_t x : sup) top = std::max(top, psi[x] / a);
  long double z = 0;
  for (std::size_t x : sup) {
    e.nu_psi[x] = mu.w[x] * std::exp(psi[x] / a - top);
    z += e.nu_psi[x];
  }
  for (std::size_t x : sup) e.nu_psi[x] = static_cast<double>(e.nu_psi[x] / z);
  e.value = static_cast<double>(-phi_mass - a * (top + std::log(z)));
  return e;
}

struct DualRun {
  double value = kInf;
  std::vector<double> psi;
};

// Alternates a majorize-minimize step (optimal potential for the current Gibbs measure)
// with a backtracking subgradient step; both are accepted only on decrease.
DualRun dual_run(double a, const ProbVector& mu, const Matrix& cost, std::vector<double> psi, std::size_t max_iter) {
  DualEval cur = dual_eval(a, mu, cost, psi);
  double eta = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const double before = cur.value;
    const double tol = 1e-15 * std::max(1.0, std::abs(before));

    const ProbVector gibbs = ProbVector::from_weights(cur.nu_psi, true);
    const TransportSolution ot = ot_solve(gibbs, mu, cost);
    std::vector<double> next = ot.psi;
    DualEval ne = dual_eval(a, mu, cost, next);
    if (ne.value < cur.value) {
      psi = std::move(next);
      cur = std::move(ne);
    }

    std::vector<double> g(mu.size(), 0.0);
    double gmax = 0;
    for (std::size_t x : mu.support) {
      g[x] = cur.cell[x] - cur.nu_psi[x];
      gmax = std::max(gmax, std::abs(g[x]));
    }
    if (gmax > 0) {
      for (int tries = 0; tries < 30; ++tries) {
        std::vector<double> trial = psi;
        for (std::size_t x : mu.support) trial[x] -= eta * g[x];
        DualEval te = dual_eval(a, mu, cost, trial);
        if (te.value < cur.value) {
          psi = std::move(trial);
          cur = std::move(te);
          eta *= 2.0;
          break;
        }
        eta *= 0.5;
      }
    }
    if (!(before - cur.value > tol)) break;
  }
  return {cur.value, std::move(psi)};
}

}  // namespace

double dual_objective(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const std::vector<double>& psi) {
  if (!spec.identity_case()) throw Error(ErrorCode::InvalidSpec, "dual formulation needs the identity spec");
  if (psi.size() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "psi length differs from mu");
  return dual_eval(spec.a, mu, cost, psi).value;
}

DualResult dual_value(const FunctionalSpec& spec, const ProbVector& mu, const Matrix& cost, const DualConfig& cfg) {
  spec.validate();
  if (!spec.identity_case() || spec.slack != 0.0) throw Error(ErrorCode::InvalidSpec, "dual formulation needs the identity spec without slack");
  if (cost.rows() != mu.size() || cost.cols() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "cost shape differs from mu");
  const auto starts = multistart_battery(mu, cost, cfg.multistarts, cfg.seed);
  std::vector<DualRun> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    std::vector<double> psi(mu.size(), 0.0);
    for (std::size_t x : mu.support) psi[x] = starts[s].w[x] > 0 ? spec.a * std::log(starts[s].w[x] / mu.w[x]) : -1e3 * spec.a;
    runs[s] = dual_run(spec.a, mu, cost, std::move(psi), cfg.max_iter);
  });
  DualResult r;
  r.value = kInf;
  for (std::size_t s = 0; s < runs.size(); ++s)
    if (runs[s].value < r.value) {
      r.value = runs[s].value;
      r.psi = runs[s].psi;
      r.best_start = s;
    }
  return r;
}

}  // namespace tei
