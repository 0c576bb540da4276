#include "approxflow/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "approxflow/sparsify.hpp"

namespace approxflow {

double lmax(std::span<const double> x) {
  double a = 0.0;
  for (double v : x) a = std::max(a, std::abs(v));
  double s = 0.0;
  for (double v : x) s += std::exp(v - a) + std::exp(-v - a);
  return a + std::log(s);
}

double lmax_gradient(std::span<const double> x, std::span<double> grad) {
  double a = 0.0;
  for (double v : x) a = std::max(a, std::abs(v));
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::exp(x[i] - a);
    const double q = std::exp(-x[i] - a);
    grad[i] = p - q;
    s += p + q;
  }
  for (double& v : grad) v /= s;
  return a + std::log(s);
}

SweepCut extract_sweep_cut(const Graph& g, std::span<const double> potential,
                           std::span<const double> b) {
  const Vertex n = g.num_vertices();
  if (potential.size() != static_cast<std::size_t>(n) ||
      b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("extract_sweep_cut: dimension mismatch");
  }
  if (n < 2) throw std::invalid_argument("extract_sweep_cut: n < 2");
  for (double p : potential) {
    if (!std::isfinite(p)) {
      throw std::invalid_argument("extract_sweep_cut: non-finite potential");
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto ratio = [&](double dem, double cap, double vol) {
    if (cap <= 1e-12 * vol) return std::abs(dem) > 0.0 ? inf : 0.0;
    return std::abs(dem) / cap;
  };
  SweepCut best;
  best.ratio = -1.0;
  const bool flat = std::all_of(potential.begin(), potential.end(),
                                [&](double p) { return p == potential[0]; });
  if (flat) {
    for (Vertex v = 0; v < n; ++v) {
      const double d = g.weighted_degree(v);
      const double r = ratio(b[v], d, d);
      if (r > best.ratio) {
        best.ratio = r;
        best.cut = CutSet{v};
      }
    }
    return best;
  }
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Vertex a, Vertex c) {
    return potential[a] != potential[c] ? potential[a] < potential[c] : a < c;
  });
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  double cap = 0.0;
  double dem = 0.0;
  double vol = 0.0;
  Vertex best_len = 1;
  for (Vertex i = 0; i + 1 < n; ++i) {
    const Vertex v = order[i];
    in[v] = 1;
    dem += b[v];
    for (const Incidence& inc : g.incident(v)) {
      const Edge& e = g.edge(inc.edge);
      const Vertex w = inc.sign > 0 ? e.head : e.tail;
      cap += in[w] ? -e.capacity : e.capacity;
      vol += e.capacity;
    }
    const double r = ratio(dem, cap, vol);
    if (r > best.ratio) {
      best.ratio = r;
      best_len = i + 1;
    }
  }
  best.cut = CutSet(std::vector<Vertex>(order.begin(), order.begin() + best_len));
  if (std::isfinite(best.ratio)) {
    best.ratio = std::abs(cut_demand(b, best.cut)) / cut_capacity(g, best.cut);
  }
  return best;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double exact_ratio(const Graph& g, std::span<const double> b, const CutSet& s) {
  const double cap = cut_capacity(g, s);
  const double dem = std::abs(cut_demand(b, s));
  if (cap <= 0.0) {
    return dem > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return dem / cap;
}

class Solver {
 public:
  Solver(const Graph& g, const CongestionApproximator& r,
         const SolverParams& params, std::span<const double> b)
      : g_(g),
        r_(r),
        p_(params),
        n_(g.num_vertices()),
        m_(g.num_edges()),
        rows_(std::max(r.num_rows(), 0)),
        b_(b.begin(), b.end()) {}

  FlowCutSolution run(SolverStats* stats);

 private:
  // Fills value, gradient and cached row residual for the current z.
  double evaluate(std::span<const double> z);
  void check(int iter);
  void residual_rows(std::span<const double> z, std::span<double> rows);

  const Graph& g_;
  const CongestionApproximator& r_;
  SolverParams p_;
  Vertex n_;
  EdgeId m_;
  std::int32_t rows_;
  std::vector<double> b_;
  RootedTree tree_;
  double alpha_ = 1.0;
  double beta_ = 1.0;

  std::vector<double> z_;
  std::vector<double> y_;     // R(b - B u z)
  std::vector<double> grad_;  // gradient in z
  std::vector<double> pi_;    // R^T q
  double value_ = 0.0;

  double ub_ = std::numeric_limits<double>::infinity();
  double lb_ = 0.0;
  Flow best_flow_;
  CutSet best_cut_;
  bool improved_ = false;
};

void Solver::residual_rows(std::span<const double> z, std::span<double> rows) {
  std::vector<double> f(static_cast<std::size_t>(m_));
  for (EdgeId e = 0; e < m_; ++e) f[e] = z[e] * g_.edge(e).capacity;
  std::vector<double> res = net_outflow(g_, f);
  for (Vertex v = 0; v < n_; ++v) res[v] = b_[v] - res[v];
  r_.apply(res, rows);
}

double Solver::evaluate(std::span<const double> z) {
  std::vector<double> x(static_cast<std::size_t>(m_));
  std::vector<double> p(static_cast<std::size_t>(m_));
  for (EdgeId e = 0; e < m_; ++e) x[e] = beta_ * z[e];
  const double v1 = lmax_gradient(x, p);
  std::vector<double> yy(static_cast<std::size_t>(rows_));
  std::vector<double> q(static_cast<std::size_t>(rows_));
  const double scale = 2.0 * alpha_ * beta_;
  for (std::int32_t i = 0; i < rows_; ++i) yy[i] = scale * y_[i];
  const double v2 = lmax_gradient(yy, q);
  r_.transpose_apply(q, pi_);
  const std::vector<double> diff = potential_difference(g_, pi_);
  for (EdgeId e = 0; e < m_; ++e) {
    grad_[e] = p[e] - 2.0 * alpha_ * g_.edge(e).capacity * diff[e];
  }
  return (v1 + v2) / beta_;
}

void Solver::check(int iter) {
  improved_ = false;
  Flow f(static_cast<std::size_t>(m_));
  for (EdgeId e = 0; e < m_; ++e) f[e] = z_[e] * g_.edge(e).capacity;
  std::vector<double> res = net_outflow(g_, f);
  for (Vertex v = 0; v < n_; ++v) res[v] = b_[v] - res[v];
  const Flow fix = route_on_tree(g_, tree_, res);
  for (EdgeId e = 0; e < m_; ++e) f[e] += fix[e];
  const double cong = congestion(g_, f);
  if (cong < ub_) {
    if (cong < ub_ * (1.0 - 1e-6)) improved_ = true;
    ub_ = cong;
    best_flow_ = std::move(f);
  }
  const SweepCut sc = extract_sweep_cut(g_, pi_, b_);
  if (sc.ratio > lb_) {
    if (sc.ratio > lb_ * (1.0 + 1e-6)) improved_ = true;
    lb_ = sc.ratio;
    best_cut_ = sc.cut;
  }
  if (p_.trace) {
    *p_.trace << iter << ',' << value_ << ',' << ub_ << ',' << lb_ << '\n';
  }
}

FlowCutSolution Solver::run(SolverStats* stats) {
  FlowCutSolution sol;
  sol.flow.assign(static_cast<std::size_t>(m_), 0.0);
  const double inf = std::numeric_limits<double>::infinity();

  // feasibility per component
  const Components comps = connected_components(g_);
  {
    std::vector<double> sums(static_cast<std::size_t>(comps.count), 0.0);
    double scale = 0.0;
    for (Vertex v = 0; v < n_; ++v) {
      sums[comps.label[v]] += b_[v];
      scale = std::max(scale, std::abs(b_[v]));
    }
    for (std::int32_t c = 0; c < comps.count; ++c) {
      if (std::abs(sums[c]) > 1e-9 * std::max(1.0, scale)) {
        std::vector<bool> mask(static_cast<std::size_t>(n_));
        for (Vertex v = 0; v < n_; ++v) mask[v] = comps.label[v] == c;
        sol.cut = CutSet::from_mask(mask);
        sol.flow_congestion = inf;
        sol.cut_ratio = inf;
        sol.epsilon_achieved = inf;
        sol.infeasible = true;
        return sol;
      }
    }
    if (scale == 0.0 || n_ < 2) {
      sol.cut = n_ >= 2 ? CutSet{0} : CutSet{};
      sol.converged = true;
      return sol;
    }
  }
  if (comps.count > 1) {
    throw std::invalid_argument("approximator_max_flow: graph is disconnected");
  }
  if (r_.num_vertices() != n_) {
    throw std::invalid_argument("approximator_max_flow: approximator size");
  }

  tree_ = root_tree(g_, spanning_tree(g_, TreeStrategy::kMaxCapacity), 0);
  alpha_ = r_.quality() > 0.0 ? r_.quality() : p_.alpha_hint;
  if (p_.alpha_cap > 0.0) alpha_ = std::min(alpha_, p_.alpha_cap);
  alpha_ = std::max(alpha_, 1.0);
  const double alpha_max = alpha_;
  if (p_.alpha_start > 0.0) alpha_ = std::max(1.0, std::min(alpha_, p_.alpha_start));

  // Normalize so that the initial lower bound is 1.
  const auto rm = r_.max_abs_row(b_);
  double lb0 = 0.0;
  CutSet cut0;
  if (rm.row >= 0) {
    cut0 = r_.row_cut(rm.row);
    lb0 = exact_ratio(g_, b_, cut0);
  }
  {
    const SweepCut s = extract_sweep_cut(g_, b_, b_);
    if (s.ratio > lb0) {
      lb0 = s.ratio;
      cut0 = s.cut;
    }
  }
  const double unit = lb0;
  for (double& v : b_) v /= unit;
  lb_ = 1.0;
  best_cut_ = cut0;

  z_.assign(static_cast<std::size_t>(m_), 0.0);
  y_.assign(static_cast<std::size_t>(rows_), 0.0);
  grad_.assign(static_cast<std::size_t>(m_), 0.0);
  pi_.assign(static_cast<std::size_t>(n_), 0.0);
  residual_rows(z_, y_);
  check(0);

  SolverStats local;
  local.alpha = alpha_max;
  const double eps = p_.epsilon;
  const double log_term =
      std::log(2.0 * std::max<double>(std::max<double>(m_, rows_), 1.0));
  double beta_mult = 1.0;
  int iter = 0;
  std::vector<double> bd(static_cast<std::size_t>(n_));
  std::vector<double> rd(static_cast<std::size_t>(rows_));
  std::vector<double> d(static_cast<std::size_t>(m_));
  std::vector<double> z_new(static_cast<std::size_t>(m_));
  std::vector<double> y_new(static_cast<std::size_t>(rows_));
  std::vector<double> g_old(static_cast<std::size_t>(m_));
  std::vector<double> fdir(static_cast<std::size_t>(m_));

  bool done = ub_ <= (1.0 + eps) * lb_;
  while (!done && iter < p_.max_iters) {
    // new stage
    ++local.stages;
    const double target = std::sqrt(lb_ * ub_);
    beta_ = beta_mult * p_.beta_constant * log_term / (eps * target);
    std::deque<std::vector<double>> s_hist;
    std::deque<std::vector<double>> y_hist;
    value_ = evaluate(z_);
    int quiet_checks = 0;
    int flat_checks = 0;
    double last_value = std::numeric_limits<double>::infinity();
    bool restart = false;
    while (!restart && iter < p_.max_iters) {
      // direction
      const double gnorm = std::abs(*std::max_element(
          grad_.begin(), grad_.end(),
          [](double a, double c) { return std::abs(a) < std::abs(c); }));
      if (!(gnorm > 0.0) || !std::isfinite(gnorm)) {
        beta_mult *= 2.0;
        ++local.beta_raises;
        break;
      }
      bool quasi = p_.rule == DescentRule::kLbfgs && !s_hist.empty();
      if (quasi) {
        std::vector<double> q = grad_;
        const std::size_t k = s_hist.size();
        std::vector<double> a(k);
        std::vector<double> rho(k);
        for (std::size_t i = k; i-- > 0;) {
          rho[i] = 1.0 / dot(y_hist[i], s_hist[i]);
          a[i] = rho[i] * dot(s_hist[i], q);
          for (EdgeId e = 0; e < m_; ++e) q[e] -= a[i] * y_hist[i][e];
        }
        const double gamma = dot(s_hist.back(), y_hist.back()) /
                             dot(y_hist.back(), y_hist.back());
        for (double& v : q) v *= gamma;
        for (std::size_t i = 0; i < k; ++i) {
          const double bcoef = rho[i] * dot(y_hist[i], q);
          for (EdgeId e = 0; e < m_; ++e) q[e] += s_hist[i][e] * (a[i] - bcoef);
        }
        for (EdgeId e = 0; e < m_; ++e) d[e] = -q[e];
        if (!(dot(d, grad_) < 0.0)) {
          s_hist.clear();
          y_hist.clear();
          quasi = false;
        }
      }
      if (!quasi) {
        const double step = 1.0 / (16.0 * alpha_ * beta_ * gnorm);
        for (EdgeId e = 0; e < m_; ++e) d[e] = -grad_[e] * step;
      }
      // rows along the direction
      for (EdgeId e = 0; e < m_; ++e) fdir[e] = d[e] * g_.edge(e).capacity;
      bd = net_outflow(g_, fdir);
      r_.apply(bd, rd);
      const double slope = dot(d, grad_);
      double t = 1.0;
      double v_new = 0.0;
      std::vector<double> x(static_cast<std::size_t>(m_));
      std::vector<double> yy(static_cast<std::size_t>(rows_));
      const double scale = 2.0 * alpha_ * beta_;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (EdgeId e = 0; e < m_; ++e) {
          z_new[e] = z_[e] + t * d[e];
          x[e] = beta_ * z_new[e];
        }
        for (std::int32_t i = 0; i < rows_; ++i) {
          y_new[i] = y_[i] - t * rd[i];
          yy[i] = scale * y_new[i];
        }
        v_new = (lmax(x) + lmax(yy)) / beta_;
        if (v_new <= value_ + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
        ++local.line_search_halvings;
      }
      ++iter;
      if (!accepted) {
        beta_mult *= 2.0;
        ++local.beta_raises;
        restart = true;
        break;
      }
      if (v_new > value_ + 1e-12 * std::abs(value_)) ++local.potential_increases;
      g_old = grad_;
      z_.swap(z_new);
      y_.swap(y_new);
      value_ = evaluate(z_);
      if (p_.rule == DescentRule::kLbfgs) {
        std::vector<double> s(static_cast<std::size_t>(m_));
        std::vector<double> yk(static_cast<std::size_t>(m_));
        for (EdgeId e = 0; e < m_; ++e) {
          s[e] = t * d[e];
          yk[e] = grad_[e] - g_old[e];
        }
        const double sy = dot(s, yk);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yk, yk))) {
          s_hist.push_back(std::move(s));
          y_hist.push_back(std::move(yk));
          if (static_cast<int>(s_hist.size()) > p_.lbfgs_memory) {
            s_hist.pop_front();
            y_hist.pop_front();
          }
        }
      }
      if (iter % p_.check_every == 0) {
        residual_rows(z_, y_);
        value_ = evaluate(z_);
        check(iter);
        if (ub_ <= (1.0 + eps) * lb_) {
          done = true;
          break;
        }
        quiet_checks = improved_ ? 0 : quiet_checks + 1;
        const bool flat = p_.flat_tol > 0.0 && !improved_ &&
                          last_value - value_ <= p_.flat_tol * std::abs(value_);
        flat_checks = flat ? flat_checks + 1 : 0;
        last_value = value_;
        if (ub_ < target) {
          restart = true;
        } else if (quiet_checks >= p_.stall_checks || flat_checks >= 2) {
          if (alpha_ < alpha_max) {
            alpha_ = std::min(alpha_max, p_.alpha_growth * alpha_);
            ++local.alpha_raises;
          } else {
            beta_mult *= 2.0;
            ++local.beta_raises;
          }
          restart = true;
        }
      }
    }
  }
  if (!done) check(iter);

  sol.iterations = iter;
  sol.flow = std::move(best_flow_);
  for (double& v : sol.flow) v *= unit;
  sol.cut = best_cut_;
  sol.flow_congestion = congestion(g_, sol.flow);
  sol.cut_ratio = exact_ratio(g_, std::span<const double>(b_), best_cut_) * unit;
  sol.epsilon_achieved = sol.flow_congestion / sol.cut_ratio - 1.0;
  sol.converged = sol.flow_congestion <= (1.0 + eps) * sol.cut_ratio;
  local.alpha_final = alpha_;
  if (stats) *stats = local;
  return sol;
}

}  // namespace

FlowCutSolution approximator_max_flow(const Graph& g,
                                      const CongestionApproximator& r,
                                      const SolverParams& params,
                                      std::span<const double> b,
                                      SolverStats* stats) {
  if (b.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("approximator_max_flow: dimension mismatch");
  }
  if (!(params.epsilon > 0.0) || params.max_iters < 1 || !(params.alpha_growth > 1.0)) {
    throw std::invalid_argument("approximator_max_flow: bad parameters");
  }
  Solver s(g, r, params, b);
  return s.run(stats);
}

}  // namespace approxflow
