#include "tei/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tei/error.hpp"
#include "tei/kernels.hpp"

namespace tei {

namespace {

struct Cell {
  std::size_t i, j;
  double flow;
};

// Spanning-tree basis over m row nodes and k column nodes (ids m..m+k-1).
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand, Matrix cost, const OtOptions& opt)
      : m_(supply.size()), k_(demand.size()), s_(std::move(supply)), d_(std::move(demand)), c_(std::move(cost)),
        opt_(opt), adj_(m_ + k_), u_(m_), v_(k_), parent_(m_ + k_), seen_(m_ + k_) {
    double scale = 1.0;
    for (double x : c_.values()) scale = std::max(scale, std::abs(x));
    eps_ = 1e-13 * scale;
  }

  void solve() {
    north_west();
    duals();
    const std::size_t cap = opt_.max_pivots ? opt_.max_pivots : 50 * (m_ + k_) * (m_ + k_) + 1000;
    std::size_t degenerate = 0;
    for (;;) {
      std::size_t ei = 0, ej = 0;
      const bool bland = degenerate >= opt_.degenerate_streak;
      if (!(bland ? price_bland(ei, ej) : price_dantzig(ei, ej))) break;
      if (pivots_ >= cap) throw Error(ErrorCode::SolverStall, "transport simplex reached its pivot cap");
      const double step = pivot(ei, ej);
      degenerate = step > 0.0 ? 0 : degenerate + 1;
      ++pivots_;
      duals();
    }
    recompute_flows();
  }

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<double>& u() const { return u_; }
  std::size_t pivots() const { return pivots_; }

 private:
  void add_cell(std::size_t i, std::size_t j, double flow) {
    const std::size_t id = cells_.size();
    cells_.push_back({i, j, flow});
    adj_[i].push_back(id);
    adj_[m_ + j].push_back(id);
  }

  void north_west() {
    std::size_t i = 0, j = 0;
    double rs = s_[0], cd = d_[0];
    for (;;) {
      const double q = std::min(rs, cd);
      add_cell(i, j, q);
      rs -= q;
      cd -= q;
      if (i + 1 == m_ && j + 1 == k_) break;
      if (j + 1 == k_ || (i + 1 < m_ && rs <= cd)) {
        rs = s_[++i];
      } else {
        cd = d_[++j];
      }
    }
  }

  // Basic flows from the tree alone, peeling leaves: pivot updates accumulate
  // rounding that can erase rows far below unit mass.
  void recompute_flows() {
    std::vector<double> rest(m_ + k_);
    std::vector<std::size_t> degree(m_ + k_);
    for (std::size_t i = 0; i < m_; ++i) rest[i] = s_[i];
    for (std::size_t j = 0; j < k_; ++j) rest[m_ + j] = d_[j];
    for (std::size_t v = 0; v < m_ + k_; ++v) degree[v] = adj_[v].size();
    std::vector<char> done(cells_.size(), 0);
    queue_.clear();
    for (std::size_t v = 0; v < m_ + k_; ++v)
      if (degree[v] == 1) queue_.push_back(v);
    for (std::size_t q = 0; q < queue_.size(); ++q) {
      const std::size_t v = queue_[q];
      if (degree[v] != 1) continue;
      std::size_t id = 0;
      for (std::size_t e : adj_[v])
        if (!done[e]) id = e;
      const std::size_t w = other(id, v);
      const double f = std::max(0.0, rest[v]);
      cells_[id].flow = f;
      done[id] = 1;
      degree[v] = 0;
      rest[w] -= f;
      if (--degree[w] == 1) queue_.push_back(w);
    }
  }

  std::size_t other(std::size_t id, std::size_t node) const {
    const Cell& c = cells_[id];
    return node < m_ ? m_ + c.j : c.i;
  }

  void duals() {
    std::fill(seen_.begin(), seen_.end(), 0);
    queue_.assign(1, 0);
    u_[0] = 0.0;
    seen_[0] = 1;
    for (std::size_t q = 0; q < queue_.size(); ++q) {
      const std::size_t node = queue_[q];
      for (std::size_t id : adj_[node]) {
        const std::size_t nb = other(id, node);
        if (seen_[nb]) continue;
        seen_[nb] = 1;
        const Cell& c = cells_[id];
        if (nb >= m_) v_[c.j] = c_(c.i, c.j) - u_[c.i];
        else u_[c.i] = c_(c.i, c.j) - v_[c.j];
        queue_.push_back(nb);
      }
    }
  }

  bool price_dantzig(std::size_t& ei, std::size_t& ej) const {
    double best = -eps_;
    bool found = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto r = kernels::min_diff_argmin(c_.row(i), v_.data(), k_);
      const double red = r.value - u_[i];
      if (red < best) {
        best = red;
        ei = i;
        ej = r.index;
        found = true;
      }
    }
    return found;
  }

  bool price_bland(std::size_t& ei, std::size_t& ej) const {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (c_(i, j) - u_[i] - v_[j] < -eps_) {
          ei = i;
          ej = j;
          return true;
        }
    return false;
  }

  // Moves theta around the cycle closed by (ei, ej); returns theta.
  double pivot(std::size_t ei, std::size_t ej) {
    // Tree path from column node ej back to row node ei.
    std::fill(seen_.begin(), seen_.end(), 0);
    const std::size_t start = m_ + ej, goal = ei;
    queue_.assign(1, start);
    seen_[start] = 1;
    for (std::size_t q = 0; q < queue_.size() && !seen_[goal]; ++q) {
      const std::size_t node = queue_[q];
      for (std::size_t id : adj_[node]) {
        const std::size_t nb = other(id, node);
        if (seen_[nb]) continue;
        seen_[nb] = 1;
        parent_[nb] = id;
        queue_.push_back(nb);
      }
    }
    path_.clear();
    for (std::size_t node = goal; node != start;) {
      const std::size_t id = parent_[node];
      path_.push_back(id);
      node = other(id, node);
    }
    std::reverse(path_.begin(), path_.end());
    // path_[0] touches column ej and loses mass; signs alternate from there.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path_.front();
    for (std::size_t t = 0; t < path_.size(); t += 2) {
      const Cell& c = cells_[path_[t]];
      const Cell& l = cells_[leave];
      if (c.flow < theta || (c.flow == theta && (c.i < l.i || (c.i == l.i && c.j < l.j)))) {
        theta = c.flow;
        leave = path_[t];
      }
    }
    for (std::size_t t = 0; t < path_.size(); ++t) {
      Cell& c = cells_[path_[t]];
      c.flow = t % 2 == 0 ? c.flow - theta : c.flow + theta;
    }
    cells_[leave].flow = 0.0;
    // Reuse the leaving slot for the entering cell.
    Cell& lc = cells_[leave];
    auto drop = [&](std::size_t node) {
      auto& a = adj_[node];
      a.erase(std::find(a.begin(), a.end(), leave));
    };
    drop(lc.i);
    drop(m_ + lc.j);
    lc = {ei, ej, theta};
    adj_[ei].push_back(leave);
    adj_[m_ + ej].push_back(leave);
    return theta;
  }

  std::size_t m_, k_;
  std::vector<double> s_, d_;
  Matrix c_;
  OtOptions opt_;
  double eps_ = 0;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_, v_;
  std::vector<std::size_t> parent_, queue_, path_;
  std::vector<char> seen_;
  std::size_t pivots_ = 0;
};

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace

TransportSolution ot_solve(const ProbVector& nu, const ProbVector& mu, const Matrix& cost, const OtOptions& opt) {
  const std::size_t n = nu.size();
  if (mu.size() != n || cost.rows() != n || cost.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "transport sizes differ");
  for (double x : cost.values())
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "cost must be finite");
  const auto& rows = nu.support;
  const auto& cols = mu.support;
  const std::size_t m = rows.size(), k = cols.size();
  std::vector<double> supply(m), demand(k);
  for (std::size_t r = 0; r < m; ++r) supply[r] = nu.w[rows[r]];
  for (std::size_t c = 0; c < k; ++c) demand[c] = mu.w[cols[c]];
  Matrix sub(m, k);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < k; ++c) sub(r, c) = cost(rows[r], cols[c]);

  TransportSimplex simplex(std::move(supply), std::move(demand), std::move(sub), opt);
  simplex.solve();

  TransportSolution sol;
  sol.pivots = simplex.pivots();
  sol.plan = Matrix(n, n);
  for (const auto& c : simplex.cells())
    if (c.flow > 0.0) sol.plan(rows[c.i], cols[c.j]) += c.flow;

  // Conjugate pair: phi = (psi on supp nu)^c on every point, then psi = phi^c.
  const auto& u = simplex.u();
  Matrix cols_of_rows(n, m);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t r = 0; r < m; ++r) cols_of_rows(y, r) = cost(rows[r], y);
  sol.phi.resize(n);
  for (std::size_t y = 0; y < n; ++y) sol.phi[y] = kernels::min_diff_argmin(cols_of_rows.row(y), u.data(), m).value;
  sol.psi = c_transform(sol.phi, cost, TransformSide::to_nu);

  long double primal = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = sol.plan(i, j);
      if (p > 0.0) {
        sol.support_pairs.emplace_back(i, j);
        primal += static_cast<long double>(p * cost(i, j));
      }
    }
  long double dual = 0;
  for (std::size_t i : nu.support) dual += static_cast<long double>(sol.psi[i]) * nu.w[i];
  for (std::size_t j : mu.support) dual += static_cast<long double>(sol.phi[j]) * mu.w[j];
  sol.primal_cost = static_cast<double>(primal);
  // Exact duality holds; a negative difference is summation rounding.
  const long double gap = primal - dual;
  const long double scale = 1e-12L * std::max(1.0L, std::fabs(primal));
  sol.duality_gap = gap < 0 && gap > -scale ? 0.0 : static_cast<double>(gap);
  return sol;
}

std::vector<double> c_transform(std::span<const double> g, const Matrix& cost, TransformSide side) {
  const std::size_t n = g.size();
  if (cost.rows() != n || cost.cols() != n) throw Error(ErrorCode::DimensionMismatch, "c-transform sizes");
  std::vector<double> out(n);
  if (side == TransformSide::to_nu) {
    for (std::size_t x = 0; x < n; ++x) out[x] = kernels::min_diff_argmin(cost.row(x), g.data(), n).value;
  } else {
    const Matrix t = transpose(cost);
    for (std::size_t y = 0; y < n; ++y) out[y] = kernels::min_diff_argmin(t.row(y), g.data(), n).value;
  }
  return out;
}

std::vector<double> subdifferential_distances(const TransportSolution& sol, const ProbVector& nu, const Matrix& dtilde) {
  const std::size_t n = nu.size();
  std::vector<double> s(n, std::numeric_limits<double>::infinity());
  for (const auto& [i, j] : sol.support_pairs) s[i] = std::min(s[i], dtilde(i, j));
  for (std::size_t i = 0; i < n; ++i) {
    if (nu.w[i] > 0.0 && !std::isfinite(s[i])) throw Error(ErrorCode::AssertionFailure, "empty plan row on supp(nu)");
    if (!(nu.w[i] > 0.0)) s[i] = 0.0;
  }
  return s;
}

double subdifferential_cost(const TransportSolution& sol, const Matrix& cost) {
  const std::size_t n = cost.rows();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (const auto& [i, j] : sol.support_pairs) best[i] = std::min(best[i], cost(i, j));
  long double total = 0;
  for (const auto& [i, j] : sol.support_pairs) total += static_cast<long double>(sol.plan(i, j) * best[i]);
  return static_cast<double>(total);
}

Matrix truncate_cost(const Matrix& cost, double level) {
  if (!(level > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation level must be positive");
  Matrix out = cost;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = std::min(out(i, j), level);
  return out;
}

PowerTypeCost truncate_cost(const PowerTypeCost& cost, double level) {
  PowerTypeCost out = cost;
  out.cost = truncate_cost(cost.cost, level);
  out.truncation_level = cost.truncation_level ? std::min(*cost.truncation_level, level) : level;
  return out;
}

TransportCheck check_solution(const TransportSolution& sol, const ProbVector& nu, const ProbVector& mu, const Matrix& cost) {
  const std::size_t n = nu.size();
  TransportCheck chk;
  for (std::size_t i = 0; i < n; ++i) {
    long double r = 0, c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      r += sol.plan(i, j);
      c += sol.plan(j, i);
    }
    chk.marginal_error = std::max({chk.marginal_error, std::abs(static_cast<double>(r) - nu.w[i]),
                                   std::abs(static_cast<double>(c) - mu.w[i])});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      chk.feasibility_violation = std::max(chk.feasibility_violation, sol.psi[i] + sol.phi[j] - cost(i, j));
  for (const auto& [i, j] : sol.support_pairs)
    chk.slackness_error = std::max(chk.slackness_error, std::abs(sol.psi[i] + sol.phi[j] - cost(i, j)));
  return chk;
}

}  // namespace tei
